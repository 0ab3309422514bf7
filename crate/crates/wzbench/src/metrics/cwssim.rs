//! Complex-wavelet SSIM.

use crate::error::{Error, Result};
use crate::metrics::pyramid::{Decomposer, Pyramid};
use crate::metrics::{check_same_shape, CwSsimParams, Region};

/// Mean CW-SSIM over subbands and coefficient patches.
pub fn cw_ssim(x: Region, y: Region, params: &CwSsimParams) -> Result<f64> {
    check_same_shape(&x, &y)?;
    if x.width < params.patch || x.height < params.patch {
        return Err(Error::RegionTooSmall {
            width: x.width,
            height: x.height,
            needed: format!("a {0}x{0} coefficient patch", params.patch),
        });
    }
    let d = Decomposer::new(params.levels, params.orientations);
    let px = d.decompose(x)?;
    let py = d.decompose(y)?;
    Ok(cw_ssim_pyramids(&px, &py, params))
}

/// Same comparison on two existing decompositions (e.g. cached crops).
pub fn cw_ssim_pyramids(px: &Pyramid, py: &Pyramid, params: &CwSsimParams) -> f64 {
    assert_eq!((px.width, px.height), (py.width, py.height));
    cw_ssim_window(px, py, (0, 0), (0, 0), px.width, px.height, params)
}

/// Compare a `w` x `h` window of one decomposition against an equally sized
/// window of another, without copying coefficients. Offsets may differ, which
/// is what motion search needs when both frames share cached pyramids.
pub fn cw_ssim_window(
    px: &Pyramid,
    py: &Pyramid,
    at_x: (usize, usize),
    at_y: (usize, usize),
    w: usize,
    h: usize,
    params: &CwSsimParams,
) -> f64 {
    assert_eq!(px.subbands.len(), py.subbands.len());
    let mut band_total = 0.0;
    let mut band_count = 0usize;
    for (sx, sy) in px.subbands.iter().zip(&py.subbands) {
        // The bank is undecimated, so coarser levels are oversampled by
        // 2^level: adjacent coefficients there are nearly collinear and add
        // no independent samples to a patch. Spacing the patch samples and
        // anchors by 2^level recovers a decimated pyramid's geometry; the
        // patch shrinks when the window cannot hold the dilated extent.
        let dilation = 1usize << sx.level;
        let stride = params.stride << sx.level;
        let side = params.patch.min((w.min(h) - 1) / dilation + 1);
        let extent = (side - 1) * dilation + 1;
        let k = params.k;
        let mut total = 0.0;
        let mut count = 0usize;
        for y0 in patch_positions(h, extent, stride) {
            for x0 in patch_positions(w, extent, stride) {
                let mut s_mag = 0.0;
                let mut s_xx = 0.0;
                let mut s_yy = 0.0;
                let mut s_cross = num_complex::Complex64::new(0.0, 0.0);
                for dy in 0..side {
                    for dx in 0..side {
                        let (ox, oy) = (x0 + dx * dilation, y0 + dy * dilation);
                        let cx = sx.at(at_x.0 + ox, at_x.1 + oy);
                        let cy = sy.at(at_y.0 + ox, at_y.1 + oy);
                        let mx = sx.mag_at(at_x.0 + ox, at_x.1 + oy);
                        let my = sy.mag_at(at_y.0 + ox, at_y.1 + oy);
                        s_mag += mx * my;
                        s_xx += mx * mx;
                        s_yy += my * my;
                        s_cross += cx * cy.conj();
                    }
                }
                let magnitude = (2.0 * s_mag + k) / (s_xx + s_yy + k);
                let phase = (2.0 * s_cross.norm() + k) / (2.0 * s_mag + k);
                total += magnitude * phase;
                count += 1;
            }
        }
        if count > 0 {
            band_total += total / count as f64;
            band_count += 1;
        }
    }
    band_total / band_count.max(1) as f64
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
    use crate::metrics::ssim::ssim;
    use crate::metrics::SsimParams;
    use crate::video::Frame;

    fn crop(frame: &Frame, x: usize, y: usize, side: usize) -> Vec<u8> {
        let mut out = Vec::new();
        frame.copy_block(x, y, side, side, &mut out);
        out
    }

    #[test]
    fn identity_is_one() {
        let seq = scene_sequence(&SceneParams::clean(64, 64, 1, 31)).unwrap();
        let a = crop(seq.frame(0), 8, 8, 32);
        let x = Region::new(&a, 32, 32);
        let s = cw_ssim(x, x, &CwSsimParams::default()).unwrap();
        assert!((s - 1.0).abs() < 1e-9, "{s}");
    }

    #[test]
    fn symmetric_in_arguments() {
        let seq = scene_sequence(&SceneParams::clean(64, 64, 2, 40)).unwrap();
        let a = crop(seq.frame(0), 4, 4, 32);
        let b = crop(seq.frame(1), 4, 4, 32);
        let p = CwSsimParams::default();
        let xy = cw_ssim(Region::new(&a, 32, 32), Region::new(&b, 32, 32), &p).unwrap();
        let yx = cw_ssim(Region::new(&b, 32, 32), Region::new(&a, 32, 32), &p).unwrap();
        assert!((xy - yx).abs() < 1e-12);
    }

    #[test]
    fn stays_in_unit_interval() {
        let seq = scene_sequence(&SceneParams::natural(64, 64, 2, 55)).unwrap();
        let a = crop(seq.frame(0), 0, 0, 32);
        let b = crop(seq.frame(1), 16, 16, 32);
        let s = cw_ssim(
            Region::new(&a, 32, 32),
            Region::new(&b, 32, 32),
            &CwSsimParams::default(),
        )
        .unwrap();
        assert!((0.0..=1.0).contains(&s), "{s}");
    }

    #[test]
    fn tolerates_translation_better_than_ssim() {
        // Small geometric distortions are phase shifts, not structure loss.
        // Needs crisp detail: on smooth content both metrics saturate and the
        // comparison degenerates into noise.
        let mut ps = SceneParams::clean(96, 96, 1, 77);
        ps.texture_persistence = 0.75;
        ps.texture_freq = 1.0 / 14.0;
        ps.contrast = 120.0;
        let seq = scene_sequence(&ps).unwrap();
        let frame = seq.frame(0);
        let mut wins = 0;
        let mut trials = 0;
        for (ox, oy) in [
            (4usize, 4usize),
            (12, 8),
            (20, 16),
            (28, 24),
            (36, 5),
            (44, 13),
            (9, 33),
            (17, 41),
            (25, 49),
            (33, 57),
        ] {
            let a = crop(frame, ox, oy, 32);
            let b = crop(frame, ox + 1, oy, 32);
            let cw = cw_ssim(
                Region::new(&a, 32, 32),
                Region::new(&b, 32, 32),
                &CwSsimParams::default(),
            )
            .unwrap();
            let s = ssim(
                Region::new(&a, 32, 32),
                Region::new(&b, 32, 32),
                &SsimParams::default(),
            )
            .unwrap();
            trials += 1;
            if cw > s {
                wins += 1;
            }
        }
        assert_eq!(trials, 10);
        assert!(wins >= 9, "CW-SSIM beat SSIM in only {wins}/10 shifted crops");
    }

    #[test]
    fn doubled_magnitudes_score_four_fifths() {
        let seq = scene_sequence(&SceneParams::clean(64, 64, 1, 3)).unwrap();
        let a = crop(seq.frame(0), 8, 8, 32);
        let params = CwSsimParams::default();
        let d = Decomposer::new(params.levels, params.orientations);
        let px = d.decompose(Region::new(&a, 32, 32)).unwrap();
        let mut py = px.clone();
        for sb in &mut py.subbands {
            for c in &mut sb.coeffs {
                *c *= 2.0;
            }
            sb.refresh_mag();
        }
        // Phases identical, magnitudes doubled: magnitude term 4/5, phase
        // term 1 (the stabilizer K nudges it just above 0.8).
        let s = cw_ssim_pyramids(&px, &py, &params);
        assert!(s >= 0.8 && (s - 0.8).abs() < 0.01, "{s}");
    }

    #[test]
    fn too_small_region_is_rejected() {
        let a = vec![0u8; 16];
        let x = Region::new(&a, 4, 4);
        assert!(cw_ssim(x, x, &CwSsimParams::default()).is_err());
    }
}
