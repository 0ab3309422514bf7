//! Band-wise uniform quantization with an HVS-flavored step table.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::transform::dct::{Dct8, DctBlockSet, ZIGZAG};

/// Quantizer geometry of one zig-zag band.
#[derive(Debug, Clone, Copy)]
pub struct BandInfo {
    /// Effective quantizer step at the plan's quality knob.
    pub step: f64,
    /// Power-of-two level count; 0 for uncoded bands.
    pub levels: u32,
    /// log2(levels); 0 for uncoded bands.
    pub plane_count: u8,
    pub coded: bool,
    /// Reachable coefficient range (min, max) for 8-bit input.
    pub range: (f64, f64),
}

impl BandInfo {
    /// Center of bin `idx` in coefficient units.
    pub fn center(&self, idx: u32) -> f64 {
        self.range.0 + idx as f64 * self.step
    }

    /// Nominal bin interval around the center.
    pub fn bin_interval(&self, idx: u32) -> (f64, f64) {
        let c = self.center(idx);
        (c - self.step / 2.0, c + self.step / 2.0)
    }
}

/// Per-band quantizer plan for one quality knob.
#[derive(Debug, Clone)]
pub struct BandPlan {
    pub quality: u32,
    pub bands: [BandInfo; 64],
}

impl BandPlan {
    /// Sum of bitplane counts over coded bands.
    pub fn total_planes(&self) -> u32 {
        self.bands.iter().map(|b| b.plane_count as u32).sum()
    }

    pub fn coded_bands(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(|&b| self.bands[b].coded)
    }
}

#[derive(Deserialize)]
struct HvsTable {
    scales: Vec<f64>,
    steps: Vec<f64>,
}

fn hvs_table() -> &'static HvsTable {
    static TABLE: OnceLock<HvsTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let raw = include_str!("../../fixtures/hvs_steps.toml");
        let t: HvsTable = toml::from_str(raw).expect("malformed step table fixture");
        assert_eq!(t.steps.len(), 64, "step table must cover 64 bands");
        assert!(t.scales.windows(2).all(|w| w[0] > w[1]), "scales must decrease");
        assert!(t.steps.iter().all(|&s| s > 0.0) && t.scales.iter().all(|&s| s > 0.0));
        t
    })
}

/// Builds the band plan for a quality knob in 1..=8 (1 coarsest).
pub fn hvs_band_plan(quality: u32) -> Result<BandPlan> {
    let table = hvs_table();
    if quality < 1 || quality as usize > table.scales.len() {
        return Err(Error::UnknownQualityKnob(quality));
    }
    let scale = table.scales[quality as usize - 1];
    let dct = Dct8::new();
    let mut bands = [BandInfo {
        step: 0.0,
        levels: 0,
        plane_count: 0,
        coded: false,
        range: (0.0, 0.0),
    }; 64];
    for (band, info) in bands.iter_mut().enumerate() {
        let pos = ZIGZAG[band];
        let range = dct.coeff_range(pos / 8, pos % 8);
        let step = table.steps[band] * scale;
        let span = range.1 - range.0;
        let raw_levels = (span / step).ceil() as u32;
        let coded = raw_levels > 1;
        let levels = if coded {
            raw_levels.next_power_of_two().max(2)
        } else {
            0
        };
        *info = BandInfo {
            step,
            levels,
            plane_count: if coded { levels.trailing_zeros() as u8 } else { 0 },
            coded,
            range,
        };
    }
    Ok(BandPlan { quality, bands })
}

/// Scalar mid-tread quantizer; returns (index, saturated).
pub fn quantize_value(x: f64, band: &BandInfo) -> (u32, bool) {
    let raw = ((x - band.range.0) / band.step + 0.5).floor() as i64;
    let clamped = raw.clamp(0, band.levels as i64 - 1);
    (clamped as u32, raw != clamped)
}

/// Quantization indices per coded band, blocks in raster order.
#[derive(Debug, Clone)]
pub struct QuantizedBands {
    /// indices[band] is empty for uncoded bands.
    pub indices: Vec<Vec<u32>>,
    pub saturated: u64,
}

/// Quantizes every coded band of the block set.
pub fn quantize_bands(set: &DctBlockSet, plan: &BandPlan) -> QuantizedBands {
    let mut indices = vec![Vec::new(); 64];
    let mut saturated = 0;
    for band in plan.coded_bands() {
        let info = &plan.bands[band];
        let values = set.band_values(band);
        let mut idx = Vec::with_capacity(values.len());
        for v in values {
            let (q, sat) = quantize_value(v, info);
            idx.push(q);
            saturated += sat as u64;
        }
        indices[band] = idx;
    }
    QuantizedBands { indices, saturated }
}

/// Wyner-Ziv reconstruction: keep the side-information value when it falls
/// in the decoded bin, otherwise snap to the nearest bin boundary.
pub fn reconstruct(idx: u32, si_value: f64, band: &BandInfo) -> Result<f64> {
    if !band.coded || idx >= band.levels {
        return Err(Error::InvalidQuantIndex {
            index: idx,
            levels: band.levels,
        });
    }
    let (lo, hi) = band.bin_interval(idx);
    Ok(si_value.clamp(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn test_band() -> BandInfo {
        BandInfo {
            step: 4.0,
            levels: 16,
            plane_count: 4,
            coded: true,
            range: (-32.0, 32.0),
        }
    }

    #[test]
    fn bin_center_is_a_fixed_point() {
        let band = test_band();
        for idx in 0..band.levels {
            let c = band.center(idx);
            let (q, sat) = quantize_value(c, &band);
            assert_eq!(q, idx);
            assert!(!sat);
        }
    }

    #[test]
    fn out_of_range_saturates() {
        let band = test_band();
        let (q, sat) = quantize_value(1000.0, &band);
        assert_eq!(q, band.levels - 1);
        assert!(sat);
        let (q, sat) = quantize_value(-1000.0, &band);
        assert_eq!(q, 0);
        assert!(sat);
    }

    #[test]
    fn matches_floor_division_oracle() {
        let band = test_band();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..2000 {
            let x = rng.gen_range(band.range.0..band.range.1);
            let expect = (((x - band.range.0) / band.step + 0.5).floor() as i64)
                .clamp(0, band.levels as i64 - 1) as u32;
            assert_eq!(quantize_value(x, &band).0, expect);
        }
    }

    #[test]
    fn center_reconstruction_error_bounded_by_step() {
        let band = test_band();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let x = rng.gen_range(band.range.0..band.range.1);
            let (q, _) = quantize_value(x, &band);
            assert!((x - band.center(q)).abs() <= band.step + 1e-12);
        }
    }

    #[test]
    fn si_clamp_rule() {
        let band = test_band();
        let (lo, hi) = band.bin_interval(5);
        let mid = (lo + hi) / 2.0;
        assert_eq!(reconstruct(5, mid, &band).unwrap(), mid);
        assert_eq!(reconstruct(5, lo - 3.0, &band).unwrap(), lo);
        assert_eq!(reconstruct(5, hi + 3.0, &band).unwrap(), hi);
    }

    #[test]
    fn reconstruct_rejects_bad_index() {
        let band = test_band();
        assert!(reconstruct(16, 0.0, &band).is_err());
    }

    #[test]
    fn plans_are_deterministic() {
        let a = hvs_band_plan(4).unwrap();
        let b = hvs_band_plan(4).unwrap();
        for band in 0..64 {
            assert_eq!(a.bands[band].step, b.bands[band].step);
            assert_eq!(a.bands[band].levels, b.bands[band].levels);
            assert_eq!(a.bands[band].coded, b.bands[band].coded);
        }
    }

    #[test]
    fn coarser_knob_never_shrinks_steps() {
        for q in 1..8 {
            let coarse = hvs_band_plan(q).unwrap();
            let fine = hvs_band_plan(q + 1).unwrap();
            for band in 0..64 {
                assert!(
                    coarse.bands[band].step >= fine.bands[band].step,
                    "band {band} at knob {q}"
                );
            }
        }
    }

    #[test]
    fn knob_sweep_plane_count_monotone() {
        // Sweeping from fine to coarse clamps or shrinks every band, so the
        // total plane count never increases.
        let mut last = 0;
        for q in 1..=8 {
            let planes = hvs_band_plan(q).unwrap().total_planes();
            assert!(planes >= last, "knob {q}: {planes} < {last}");
            last = planes;
        }
        // The sweep must actually span distinct operating points.
        assert!(
            hvs_band_plan(1).unwrap().total_planes() < hvs_band_plan(8).unwrap().total_planes()
        );
    }

    #[test]
    fn coarse_knob_leaves_tail_uncoded() {
        let coarse = hvs_band_plan(1).unwrap();
        let fine = hvs_band_plan(8).unwrap();
        assert!(!coarse.bands[63].coded);
        assert!(fine.bands[63].coded);
        // DC is always coded with power-of-two levels.
        for q in 1..=8 {
            let plan = hvs_band_plan(q).unwrap();
            assert!(plan.bands[0].coded);
            for b in plan.coded_bands() {
                let levels = plan.bands[b].levels;
                assert!(levels >= 2 && levels.is_power_of_two());
            }
        }
    }

    #[test]
    fn unknown_knob_is_rejected() {
        assert!(hvs_band_plan(0).is_err());
        assert!(hvs_band_plan(9).is_err());
    }

    #[test]
    fn full_band_quantization_covers_frame() {
        use crate::fixtures;
        use crate::transform::dct::dct_forward;

        let seq = fixtures::pan_sequence(48, 32, 1, 3, (0, 0));
        let dct = Dct8::new();
        let set = dct_forward(seq.frame(0), &dct).unwrap();
        let plan = hvs_band_plan(6).unwrap();
        let q = quantize_bands(&set, &plan);
        assert_eq!(q.saturated, 0, "exact ranges admit no saturation");
        for band in 0..64 {
            if plan.bands[band].coded {
                assert_eq!(q.indices[band].len(), set.n_blocks());
                let max = *q.indices[band].iter().max().unwrap();
                assert!(max < plan.bands[band].levels);
            } else {
                assert!(q.indices[band].is_empty());
            }
        }
    }
}
