//! Visual information fidelity under a scalar Gaussian scale mixture.

use crate::error::{Error, Result};
use crate::metrics::pyramid::{Decomposer, Pyramid};
use crate::metrics::{check_same_shape, Region, VifParams};

/// VIF result; `degenerate` marks a blank-reference evaluation.
#[derive(Debug, Clone, Copy)]
pub struct VifScore {
    pub value: f64,
    pub degenerate: bool,
}

/// Information ratio between the distorted and reference channels.
pub fn vif(reference: Region, distorted: Region, params: &VifParams) -> Result<VifScore> {
    check_same_shape(&reference, &distorted)?;
    let side = patch_side(params)?;
    if reference.width < side || reference.height < side {
        return Err(Error::RegionTooSmall {
            width: reference.width,
            height: reference.height,
            needed: format!("a {side}x{side} GSM patch"),
        });
    }
    let d = Decomposer::new(params.levels, params.orientations);
    let pr = d.decompose(reference)?;
    let pd = d.decompose(distorted)?;
    Ok(vif_pyramids(&pr, &pd, params))
}

/// Same ratio on two existing decompositions (e.g. cached crops).
///
/// Per patch the distorted coefficients are regressed onto the reference
/// (gain g, residual variance sigma_v2), the local scale z is the mean
/// squared reference coefficient, and both channels contribute their
/// Gaussian mutual-information terms.
pub fn vif_pyramids(pr: &Pyramid, pd: &Pyramid, params: &VifParams) -> VifScore {
    assert_eq!((pr.width, pr.height), (pd.width, pd.height));
    vif_window(pr, pd, (0, 0), (0, 0), pr.width, pr.height, params)
}

/// Same ratio over a `w` x `h` window of each decomposition, without copying
/// coefficients. Offsets may differ; motion search scores candidate blocks
/// against cached whole-frame pyramids this way.
pub fn vif_window(
    pr: &Pyramid,
    pd: &Pyramid,
    at_r: (usize, usize),
    at_d: (usize, usize),
    w: usize,
    h: usize,
    params: &VifParams,
) -> VifScore {
    assert_eq!(pr.subbands.len(), pd.subbands.len());
    let side = patch_side(params).expect("validated params");
    let m = params.patch as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (sr, sd) in pr.subbands.iter().zip(&pd.subbands) {
        // The bank is undecimated, so adjacent coefficients at level l are
        // oversampled by 2^l and nearly collinear; spacing the patch samples
        // by 2^l recovers a decimated pyramid's decorrelated 3x3 GSM
        // neighborhood. Patch positions slide densely.
        let dilation = 1usize << sr.level;
        let extent = (side - 1) * dilation + 1;
        for y0 in patch_positions(h, extent, params.stride) {
            for x0 in patch_positions(w, extent, params.stride) {
                let mut scc = 0.0;
                let mut scd = 0.0;
                let mut sdd = 0.0;
                for dy in 0..side {
                    for dx in 0..side {
                        let c = sr
                            .at(at_r.0 + x0 + dx * dilation, at_r.1 + y0 + dy * dilation)
                            .re;
                        let d = sd
                            .at(at_d.0 + x0 + dx * dilation, at_d.1 + y0 + dy * dilation)
                            .re;
                        scc += c * c;
                        scd += c * d;
                        sdd += d * d;
                    }
                }
                let z = scc / m;
                let (g, sigma_v2) = if scc > 0.0 {
                    let g = scd / scc;
                    (g, ((sdd - g * scd) / m).max(0.0))
                } else {
                    (0.0, sdd / m)
                };
                num += 0.5 * (1.0 + g * g * z / (sigma_v2 + params.sigma_n2)).ln();
                den += 0.5 * (1.0 + z / params.sigma_n2).ln();
            }
        }
    }
    if den < 1e-9 {
        VifScore {
            value: 1.0,
            degenerate: true,
        }
    } else {
        VifScore {
            value: num / den,
            degenerate: false,
        }
    }
}

fn patch_side(params: &VifParams) -> Result<usize> {
    let side = (params.patch as f64).sqrt().round() as usize;
    if side * side != params.patch || params.patch < 4 {
        return Err(Error::Config(format!(
            "VIF patch length {} is not a square number >= 4",
            params.patch
        )));
    }
    Ok(side)
}

fn patch_positions(extent: usize, patch: usize, stride: usize) -> impl Iterator<Item = usize> {
    // Empty when the patch overhangs the window, so undersized windows skip
    // the coarse levels instead of reading past the edge.
    (0..(extent + 1).saturating_sub(patch)).step_by(stride.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{scene_sequence, SceneParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn texture(seed: u64) -> Vec<u8> {
        let seq = scene_sequence(&SceneParams::clean(32, 32, 1, seed)).unwrap();
        seq.frame(0).data().to_vec()
    }

    // GSM fits need reference energy at every pyramid scale, like natural images
    // have. Band-limited texture leaves fine subbands empty and the local gain
    // fits there measure nothing but their own variance. Blending a hashed white
    // component into the scene base fills the spectrum.
    fn broadband_texture(seed: u64) -> Vec<u8> {
        fn hash01(seed: u64, x: u32, y: u32) -> f64 {
            let mut h = seed ^ (u64::from(x) << 32) ^ u64::from(y);
            h = h.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            h ^= h >> 31;
            h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
            h ^= h >> 29;
            (h >> 11) as f64 / (1u64 << 53) as f64
        }
        let mut ps = SceneParams::clean(32, 32, 1, seed);
        ps.texture_persistence = 0.7;
        ps.texture_freq = 1.0 / 12.0;
        ps.contrast = 90.0;
        ps.objects.clear();
        let base = scene_sequence(&ps).unwrap().frame(0).data().to_vec();
        let mut out = vec![0u8; 32 * 32];
        for y in 0..32u32 {
            for x in 0..32u32 {
                let white = (hash01(seed ^ 0xA5A5, x, y) - 0.5) * 2.0;
                let v = base[(y * 32 + x) as usize] as f64 + 45.0 * white;
                out[(y * 32 + x) as usize] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
        out
    }

    fn with_gauss_noise(a: &[u8], sigma: f64, seed: u64) -> Vec<u8> {
        use rand_distr::{Distribution, Normal};
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let dist = Normal::new(0.0, sigma).unwrap();
        a.iter()
            .map(|&v| (v as f64 + dist.sample(&mut rng)).round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    #[test]
    fn identity_is_one() {
        let a = texture(8);
        let x = Region::new(&a, 32, 32);
        let s = vif(x, x, &VifParams::default()).unwrap();
        assert!(!s.degenerate);
        assert!((s.value - 1.0).abs() < 1e-9, "{}", s.value);
    }

    #[test]
    fn heavy_noise_collapses_information() {
        let p = VifParams::default();
        // Dense patch sampling keeps the high-SNR coarse subbands in the
        // sums, so heavy pixel noise floors the ratio near 0.25 rather than
        // driving it to zero; the mild/heavy gap is the property under test.
        for seed in [1, 3, 5] {
            let a = broadband_texture(seed);
            let mild = with_gauss_noise(&a, 5.0, seed ^ 0x11);
            let heavy = with_gauss_noise(&a, 60.0, seed ^ 0x77);
            let x = Region::new(&a, 32, 32);
            let sm = vif(x, Region::new(&mild, 32, 32), &p).unwrap();
            let sh = vif(x, Region::new(&heavy, 32, 32), &p).unwrap();
            assert!(!sm.degenerate && !sh.degenerate);
            assert!(sm.value > 0.5, "seed {seed}: mild {}", sm.value);
            assert!(sh.value < 0.3, "seed {seed}: heavy {}", sh.value);
        }
    }

    #[test]
    fn blank_reference_is_degenerate() {
        let blank = vec![90u8; 32 * 32];
        let b = texture(4);
        let s = vif(
            Region::new(&blank, 32, 32),
            Region::new(&b, 32, 32),
            &VifParams::default(),
        )
        .unwrap();
        assert!(s.degenerate);
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn contrast_amplification_can_exceed_one() {
        let a = texture(6);
        let amplified: Vec<u8> = a
            .iter()
            .map(|&v| ((v as f64 - 122.0) * 1.3 + 122.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        let s = vif(
            Region::new(&a, 32, 32),
            Region::new(&amplified, 32, 32),
            &VifParams::default(),
        )
        .unwrap();
        assert!(s.value > 1.0, "{}", s.value);
        assert!(s.value.is_finite());
    }

    #[test]
    fn non_square_patch_rejected() {
        let a = texture(7);
        let x = Region::new(&a, 32, 32);
        let mut p = VifParams::default();
        p.patch = 8;
        assert!(vif(x, x, &p).is_err());
    }
}
