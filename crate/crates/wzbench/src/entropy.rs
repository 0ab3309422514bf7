//! Bitplane error statistics and conditional-rate estimates behind the
//! side-information comparison table.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{MetricKind, MetricParams};
use crate::motion::{block_match, interpolate_si, si_quality_report, SearchParams};
use crate::video::{Frame, VideoSequence};

/// Binary entropy in bits, with the 0*log0 = 0 convention.
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Per-plane flip rates between a true frame and its side information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneErrorStats {
    /// Most significant plane first.
    pub per_plane: [f64; 8],
    pub average: f64,
    pub four_msb: [f64; 4],
}

/// Flip rate of each bitplane, most significant first.
pub fn plane_errors(truth: &Frame, si: &Frame) -> Result<PlaneErrorStats> {
    if truth.width() != si.width() || truth.height() != si.height() {
        return Err(Error::DimensionMismatch(format!(
            "truth {}x{}, side information {}x{}",
            truth.width(),
            truth.height(),
            si.width(),
            si.height()
        )));
    }
    let mut flips = [0u64; 8];
    for (&t, &s) in truth.data().iter().zip(si.data()) {
        let diff = t ^ s;
        for (k, f) in flips.iter_mut().enumerate() {
            *f += u64::from(diff >> (7 - k) & 1);
        }
    }
    let n = truth.data().len() as f64;
    let per_plane = flips.map(|f| f as f64 / n);
    Ok(PlaneErrorStats {
        per_plane,
        average: per_plane.iter().sum::<f64>() / 8.0,
        four_msb: [per_plane[0], per_plane[1], per_plane[2], per_plane[3]],
    })
}

/// Estimation model behind the conditional-rate figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// Binary entropy of each plane's empirical flip rate.
    #[default]
    PerPlaneBsc,
    /// Conditions each bit on its side-information bit and the true
    /// higher-significance bits of the same pixel, with add-one smoothing.
    Context,
}

impl RateModel {
    pub fn tag(self) -> &'static str {
        match self {
            RateModel::PerPlaneBsc => "per-plane-bsc",
            RateModel::Context => "context",
        }
    }
}

impl std::str::FromStr for RateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "per-plane-bsc" | "bsc" => Ok(RateModel::PerPlaneBsc),
            "context" => Ok(RateModel::Context),
            other => Err(Error::Config(format!("unknown rate model {other:?}"))),
        }
    }
}

/// Conditional rate of the true frames given their side information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalRateEstimate {
    /// Bits per source bit, in [0, 1].
    pub h: f64,
    pub model: RateModel,
    pub frames: usize,
}

fn bsc_rate(truth: &Frame, si: &Frame) -> Result<f64> {
    let stats = plane_errors(truth, si)?;
    Ok(stats.per_plane.iter().map(|&p| h2(p)).sum::<f64>() / 8.0)
}

fn context_rate(truth: &Frame, si: &Frame) -> Result<f64> {
    plane_errors(truth, si)?;
    let n = truth.data().len() as f64;
    let mut total = 0.0;
    for k in 0..8usize {
        let shift = 7 - k;
        // Context: the k already-decoded higher true bits plus the SI bit.
        let mut counts = vec![[0u64; 2]; 1 << (k + 1)];
        for (&t, &s) in truth.data().iter().zip(si.data()) {
            let higher = (t as usize) >> (shift + 1);
            let si_bit = (s as usize) >> shift & 1;
            let bit = (t as usize) >> shift & 1;
            counts[higher << 1 | si_bit][bit] += 1;
        }
        let mut hk = 0.0;
        for c in &counts {
            let seen = (c[0] + c[1]) as f64;
            if seen == 0.0 {
                continue;
            }
            let p0 = (c[0] as f64 + 1.0) / (seen + 2.0);
            let p1 = (c[1] as f64 + 1.0) / (seen + 2.0);
            hk += seen / n * -(p0 * p0.log2() + p1 * p1.log2());
        }
        total += hk;
    }
    Ok(total / 8.0)
}

/// Mean conditional rate over (truth, side information) frame pairs.
pub fn conditional_rate(
    pairs: &[(&Frame, &Frame)],
    model: RateModel,
) -> Result<ConditionalRateEstimate> {
    if pairs.is_empty() {
        return Err(Error::TooFewFrames {
            needed: 1,
            actual: 0,
        });
    }
    let mut sum = 0.0;
    for &(truth, si) in pairs {
        sum += match model {
            RateModel::PerPlaneBsc => bsc_rate(truth, si)?,
            RateModel::Context => context_rate(truth, si)?,
        };
    }
    Ok(ConditionalRateEstimate {
        h: sum / pairs.len() as f64,
        model,
        frames: pairs.len(),
    })
}

/// One comparison-table row: SI quality, plane errors, and rate for a metric.
#[derive(Debug, Clone, PartialEq)]
pub struct SiReportRow {
    pub metric: MetricKind,
    pub mse: f64,
    pub ssim: f64,
    pub vif: f64,
    pub avg_plane_err: f64,
    pub four_msb: [f64; 4],
    pub time_sec: f64,
    pub h_cond: f64,
}

/// Knobs for the comparison-table run.
#[derive(Debug, Clone, Copy)]
pub struct Table1Options {
    /// Wyner-Ziv frames averaged per metric.
    pub frames: usize,
    pub model: RateModel,
    /// Off zeroes the wall-time column so reruns are byte-identical.
    pub measure_time: bool,
    pub block_size: usize,
    pub search_range: usize,
    /// Opt-in narrower search window for the heaviest metric.
    pub vif_search_range: Option<usize>,
    pub metric_params: MetricParams,
}

impl Default for Table1Options {
    fn default() -> Self {
        Self {
            frames: 20,
            model: RateModel::PerPlaneBsc,
            measure_time: true,
            block_size: 16,
            search_range: 16,
            vif_search_range: None,
            metric_params: MetricParams::default(),
        }
    }
}

/// Builds side information for each metric over the leading WZ frames of a
/// GOP-2 split with undistorted key frames, and aggregates one row per metric.
pub fn table1_report(
    seq: &VideoSequence,
    metrics: &[MetricKind],
    opts: &Table1Options,
) -> Result<Vec<SiReportRow>> {
    let needed = 2 * opts.frames + 1;
    if seq.len() < needed {
        return Err(Error::TooFewFrames {
            needed,
            actual: seq.len(),
        });
    }
    if opts.frames == 0 {
        return Err(Error::Config("frame count must be positive".into()));
    }
    let mut rows = Vec::with_capacity(metrics.len());
    for &metric in metrics {
        let search_range = match metric {
            MetricKind::Vif => opts.vif_search_range.unwrap_or(opts.search_range),
            _ => opts.search_range,
        };
        let params = SearchParams {
            block_size: opts.block_size,
            search_range,
            metric,
            metric_params: opts.metric_params,
        };
        let start = Instant::now();
        let mut si_frames = Vec::with_capacity(opts.frames);
        for i in 0..opts.frames {
            let prev = seq.frame(2 * i);
            let next = seq.frame(2 * i + 2);
            let field = block_match(prev, next, &params)?;
            si_frames.push(interpolate_si(prev, next, &field)?);
        }
        let elapsed = start.elapsed().as_secs_f64();

        let mut mse_sum = 0.0;
        let mut ssim_sum = 0.0;
        let mut vif_sum = 0.0;
        let mut per_plane_sum = [0.0f64; 8];
        for (i, si) in si_frames.iter().enumerate() {
            let truth = seq.frame(2 * i + 1);
            let report = si_quality_report(si, truth, 2 * i + 1, &opts.metric_params)?;
            mse_sum += report.mse;
            ssim_sum += report.ssim;
            vif_sum += report.vif;
            let stats = plane_errors(truth, si)?;
            for (acc, p) in per_plane_sum.iter_mut().zip(stats.per_plane) {
                *acc += p;
            }
        }
        let pairs: Vec<(&Frame, &Frame)> = (0..opts.frames)
            .map(|i| (seq.frame(2 * i + 1), &si_frames[i]))
            .collect();
        let rate = conditional_rate(&pairs, opts.model)?;

        let n = opts.frames as f64;
        let per_plane = per_plane_sum.map(|s| s / n);
        rows.push(SiReportRow {
            metric,
            mse: mse_sum / n,
            ssim: ssim_sum / n,
            vif: vif_sum / n,
            avg_plane_err: per_plane.iter().sum::<f64>() / 8.0,
            four_msb: [per_plane[0], per_plane[1], per_plane[2], per_plane[3]],
            time_sec: if opts.measure_time { elapsed } else { 0.0 },
            h_cond: rate.h,
        });
    }
    Ok(rows)
}

/// CSV header shared by the report writers.
pub const TABLE1_HEADER: &str =
    "metric,mse,ssim,vif,avg_plane_err,msb1,msb2,msb3,msb4,time_sec,h_cond";

/// Serializes rows with fixed precision so equal runs are byte-identical.
pub fn table1_csv(rows: &[SiReportRow]) -> String {
    let mut out = String::from(TABLE1_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.4},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.3},{:.6}",
            r.metric,
            r.mse,
            r.ssim,
            r.vif,
            r.avg_plane_err,
            r.four_msb[0],
            r.four_msb[1],
            r.four_msb[2],
            r.four_msb[3],
            r.time_sec,
            r.h_cond
        );
    }
    out
}
