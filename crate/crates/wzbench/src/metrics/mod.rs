//! Block similarity criteria behind one polarity-aware interface.

pub mod cwssim;
pub mod pyramid;
pub mod ssim;
pub mod vif;

pub use cwssim::{cw_ssim, cw_ssim_pyramids, cw_ssim_window};
pub use pyramid::{Decomposer, Pyramid};
pub use ssim::ssim;
pub use vif::{vif, vif_pyramids, vif_window, VifScore};

use crate::error::{Error, Result};
use crate::video::Frame;

/// Borrowed rectangular pixel region.
#[derive(Debug, Clone, Copy)]
pub struct Region<'a> {
    pub data: &'a [u8],
    pub width: usize,
    pub height: usize,
}

impl<'a> Region<'a> {
    pub fn new(data: &'a [u8], width: usize, height: usize) -> Self {
        assert_eq!(data.len(), width * height);
        Self {
            data,
            width,
            height,
        }
    }

    pub fn from_frame(frame: &'a Frame) -> Self {
        Self {
            data: frame.data(),
            width: frame.width(),
            height: frame.height(),
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

pub(crate) fn check_same_shape(x: &Region, y: &Region) -> Result<()> {
    if x.width != y.width || x.height != y.height {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            x.width, x.height, y.width, y.height
        )));
    }
    Ok(())
}

/// Whether smaller or larger scores mean a better match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Distance,
    Similarity,
}

/// The five block comparison criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Sad,
    Mse,
    Ssim,
    CwSsim,
    Vif,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Sad,
        MetricKind::Mse,
        MetricKind::Ssim,
        MetricKind::CwSsim,
        MetricKind::Vif,
    ];

    pub fn polarity(self) -> Polarity {
        match self {
            MetricKind::Sad | MetricKind::Mse => Polarity::Distance,
            MetricKind::Ssim | MetricKind::CwSsim | MetricKind::Vif => Polarity::Similarity,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Sad => "sad",
            MetricKind::Mse => "mse",
            MetricKind::Ssim => "ssim",
            MetricKind::CwSsim => "cwssim",
            MetricKind::Vif => "vif",
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sad" => Ok(MetricKind::Sad),
            "mse" => Ok(MetricKind::Mse),
            "ssim" => Ok(MetricKind::Ssim),
            "cwssim" | "cw-ssim" | "cw_ssim" => Ok(MetricKind::CwSsim),
            "vif" => Ok(MetricKind::Vif),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

/// SSIM stabilizers and window geometry.
#[derive(Debug, Clone, Copy)]
pub struct SsimParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Square window side for local statistics; slides with step 1.
    pub window: usize,
}

impl Default for SsimParams {
    fn default() -> Self {
        let c2 = (0.03 * 255.0) * (0.03 * 255.0);
        Self {
            c1: (0.01 * 255.0) * (0.01 * 255.0),
            c2,
            c3: c2 / 2.0,
            window: 8,
        }
    }
}

/// Complex-wavelet SSIM configuration.
#[derive(Debug, Clone, Copy)]
pub struct CwSsimParams {
    pub k: f64,
    pub levels: usize,
    pub orientations: usize,
    /// Coefficient window side per local comparison.
    pub patch: usize,
    /// Step between patch positions inside a subband.
    pub stride: usize,
}

impl Default for CwSsimParams {
    fn default() -> Self {
        Self {
            k: 0.03,
            levels: 3,
            orientations: 6,
            patch: 7,
            stride: 3,
        }
    }
}

/// VIF configuration; shares the pyramid structure with CW-SSIM.
#[derive(Debug, Clone, Copy)]
pub struct VifParams {
    /// HVS neural-noise variance in coefficient units squared.
    pub sigma_n2: f64,
    /// Coefficient vector length per GSM patch; must be a square number.
    pub patch: usize,
    pub levels: usize,
    pub orientations: usize,
    /// Step between patch positions inside a subband.
    pub stride: usize,
}

impl Default for VifParams {
    fn default() -> Self {
        Self {
            sigma_n2: 0.1,
            patch: 9,
            levels: 3,
            orientations: 6,
            stride: 1,
        }
    }
}

/// Bundle of all metric parameters, as loaded from configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct MetricParams {
    pub ssim: SsimParams,
    pub cwssim: CwSsimParams,
    pub vif: VifParams,
}

/// Sum of absolute differences.
pub fn sad(x: Region, y: Region) -> Result<u64> {
    check_same_shape(&x, &y)?;
    Ok(x.data
        .iter()
        .zip(y.data)
        .map(|(&a, &b)| (a as i32 - b as i32).unsigned_abs() as u64)
        .sum())
}

/// Mean squared error.
pub fn mse(x: Region, y: Region) -> Result<f64> {
    check_same_shape(&x, &y)?;
    let sum: u64 = x
        .data
        .iter()
        .zip(y.data)
        .map(|(&a, &b)| {
            let d = a as i64 - b as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / x.data.len() as f64)
}

/// Peak signal-to-noise ratio in dB; zero MSE maps to infinity.
pub fn psnr(mse_value: f64) -> Result<f64> {
    if mse_value < 0.0 {
        return Err(Error::Config(format!("negative MSE {mse_value}")));
    }
    if mse_value == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse_value).log10())
}

/// A metric score together with its optimization direction.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub score: f64,
    pub polarity: Polarity,
}

/// Uniform dispatch over the five criteria.
pub fn evaluate(kind: MetricKind, x: Region, y: Region, params: &MetricParams) -> Result<Evaluation> {
    let score = match kind {
        MetricKind::Sad => sad(x, y)? as f64,
        MetricKind::Mse => mse(x, y)?,
        MetricKind::Ssim => ssim(x, y, &params.ssim)?,
        MetricKind::CwSsim => cw_ssim(x, y, &params.cwssim)?,
        MetricKind::Vif => vif(x, y, &params.vif)?.value,
    };
    Ok(Evaluation {
        score,
        polarity: kind.polarity(),
    })
}
