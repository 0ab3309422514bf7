//! Undecimated complex oriented filter bank.
//!
//! Log-Gabor filters with single-half-plane angular support, applied in the
//! frequency domain. The half-plane support makes every subband an analytic
//! (complex) signal, so small translations show up as smooth local phase
//! rotation instead of structural change, which is exactly the behavior
//! CW-SSIM and VIF rely on.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::metrics::Region;

/// One oriented bandpass subband, same raster size as the input region.
#[derive(Debug, Clone)]
pub struct Subband {
    pub level: usize,
    pub orientation: usize,
    pub width: usize,
    pub height: usize,
    pub coeffs: Vec<Complex64>,
    /// Cached coefficient magnitudes; search loops read each coefficient many
    /// times and the square roots dominate otherwise.
    pub mag: Vec<f64>,
}

impl Subband {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.coeffs[y * self.width + x]
    }

    #[inline]
    pub fn mag_at(&self, x: usize, y: usize) -> f64 {
        self.mag[y * self.width + x]
    }

    /// Rebuilds the magnitude cache after direct coefficient edits.
    pub fn refresh_mag(&mut self) {
        self.mag = self.coeffs.iter().map(|c| c.norm()).collect();
    }
}

/// Full decomposition of one region.
#[derive(Debug, Clone)]
pub struct Pyramid {
    pub width: usize,
    pub height: usize,
    pub subbands: Vec<Subband>,
}

impl Pyramid {
    /// Copies the axis-aligned window (x0, y0, w, h) out of every subband.
    ///
    /// Because the bank is undecimated, a coefficient crop is the natural
    /// cached stand-in for decomposing the cropped pixels; it avoids block
    /// boundary effects and repeated transforms in search loops.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Pyramid {
        assert!(x0 + w <= self.width && y0 + h <= self.height);
        let subbands = self
            .subbands
            .iter()
            .map(|sb| {
                let mut coeffs = Vec::with_capacity(w * h);
                let mut mag = Vec::with_capacity(w * h);
                for y in y0..y0 + h {
                    coeffs.extend_from_slice(&sb.coeffs[y * sb.width + x0..y * sb.width + x0 + w]);
                    mag.extend_from_slice(&sb.mag[y * sb.width + x0..y * sb.width + x0 + w]);
                }
                Subband {
                    level: sb.level,
                    orientation: sb.orientation,
                    width: w,
                    height: h,
                    coeffs,
                    mag,
                }
            })
            .collect();
        Pyramid {
            width: w,
            height: h,
            subbands,
        }
    }
}

/// Log-Gabor radial bandwidth as the sigma/f0 ratio; closer to 1 means a
/// narrower band and smoother phase behavior under small shifts.
const RADIAL_BANDWIDTH_RATIO: f64 = 0.75;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    #[allow(clippy::type_complexity)]
    static FILTERS: RefCell<HashMap<(usize, usize, usize, usize), Arc<Vec<Vec<f64>>>>> =
        RefCell::new(HashMap::new());
}

fn fft2(data: &mut [Complex64], w: usize, h: usize, inverse: bool) {
    let (row_fft, col_fft) = PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
        } else {
            (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
        }
    });
    let mut scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(w) {
        row_fft.process_with_scratch(row, &mut scratch);
    }
    let mut t = vec![Complex64::default(); w * h];
    for y in 0..h {
        for x in 0..w {
            t[x * h + y] = data[y * w + x];
        }
    }
    scratch.resize(col_fft.get_inplace_scratch_len(), Complex64::default());
    for col in t.chunks_exact_mut(h) {
        col_fft.process_with_scratch(col, &mut scratch);
    }
    for y in 0..h {
        for x in 0..w {
            data[y * w + x] = t[x * h + y];
        }
    }
}

#[inline]
fn signed_freq(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64 / n as f64
    } else {
        i as f64 / n as f64 - 1.0
    }
}

/// Frequency-domain magnitude responses for all (level, orientation) pairs.
fn build_filters(w: usize, h: usize, levels: usize, orientations: usize) -> Arc<Vec<Vec<f64>>> {
    let key = (w, h, levels, orientations);
    FILTERS.with(|cache| {
        if let Some(f) = cache.borrow().get(&key) {
            return f.clone();
        }
        let sigma_r = RADIAL_BANDWIDTH_RATIO.ln();
        let sigma_theta = std::f64::consts::PI / orientations as f64 / 1.3;
        let mut filters = Vec::with_capacity(levels * orientations);
        for level in 0..levels {
            let f0 = (1.0 / 3.0) / 2.0f64.powi(level as i32);
            for k in 0..orientations {
                let theta_k = k as f64 * std::f64::consts::PI / orientations as f64;
                let mut resp = vec![0.0; w * h];
                for v in 0..h {
                    let fy = signed_freq(v, h);
                    for u in 0..w {
                        let fx = signed_freq(u, w);
                        let r = (fx * fx + fy * fy).sqrt();
                        if r < 1e-12 {
                            continue;
                        }
                        let radial = (-(r / f0).ln().powi(2) / (2.0 * sigma_r * sigma_r)).exp();
                        let mut d = fy.atan2(fx) - theta_k;
                        d = (d + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                            - std::f64::consts::PI;
                        let angular = (-d * d / (2.0 * sigma_theta * sigma_theta)).exp();
                        resp[v * w + u] = radial * angular;
                    }
                }
                filters.push(resp);
            }
        }
        let arc = Arc::new(filters);
        cache.borrow_mut().insert(key, arc.clone());
        arc
    })
}

/// Reusable decomposition front end for a fixed bank shape.
#[derive(Debug, Clone, Copy)]
pub struct Decomposer {
    pub levels: usize,
    pub orientations: usize,
}

impl Decomposer {
    pub fn new(levels: usize, orientations: usize) -> Self {
        Self {
            levels,
            orientations,
        }
    }

    /// Decomposes with symmetric reflection padding, so the circular FFT
    /// sees no wraparound discontinuity at the region borders.
    pub fn decompose(&self, region: Region) -> Result<Pyramid> {
        self.check_size(region)?;
        let (w, h) = (region.width, region.height);
        let (pw, ph) = (2 * w, 2 * h);
        let mut padded = vec![0u8; pw * ph];
        for y in 0..ph {
            let sy = if y < h { y } else { ph - 1 - y };
            for x in 0..pw {
                let sx = if x < w { x } else { pw - 1 - x };
                padded[y * pw + x] = region.data[sy * w + sx];
            }
        }
        let full = self.decompose_raw(Region::new(&padded, pw, ph))?;
        Ok(full.crop(0, 0, w, h))
    }

    /// Plain circular decomposition without padding. Used where the caller
    /// manages boundaries, e.g. whole-frame caches cropped per block.
    pub fn decompose_raw(&self, region: Region) -> Result<Pyramid> {
        self.check_size(region)?;
        let (w, h) = (region.width, region.height);
        let mut spectrum: Vec<Complex64> = region
            .data
            .iter()
            .map(|&p| Complex64::new(p as f64, 0.0))
            .collect();
        fft2(&mut spectrum, w, h, false);

        let filters = build_filters(w, h, self.levels, self.orientations);
        let norm = 1.0 / (w * h) as f64;
        let mut subbands = Vec::with_capacity(self.levels * self.orientations);
        for level in 0..self.levels {
            for orientation in 0..self.orientations {
                let resp = &filters[level * self.orientations + orientation];
                let mut band: Vec<Complex64> = spectrum
                    .iter()
                    .zip(resp)
                    .map(|(&s, &r)| s * r)
                    .collect();
                fft2(&mut band, w, h, true);
                for c in band.iter_mut() {
                    *c *= norm;
                }
                let mag = band.iter().map(|c| c.norm()).collect();
                subbands.push(Subband {
                    level,
                    orientation,
                    width: w,
                    height: h,
                    coeffs: band,
                    mag,
                });
            }
        }
        Ok(Pyramid {
            width: w,
            height: h,
            subbands,
        })
    }

    fn check_size(&self, region: Region) -> Result<()> {
        let min_side = 1usize << self.levels;
        if region.width < min_side || region.height < min_side {
            return Err(Error::RegionTooSmall {
                width: region.width,
                height: region.height,
                needed: format!("{min_side} pixels per side for {} pyramid levels", self.levels),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::metrics::Region;

    fn texture(w: usize, h: usize, seed: u64) -> Vec<u8> {
        fixtures::pan_sequence(w.max(16), h.max(16), 1, seed, (0, 0))
            .frame(0)
            .data()[..w * h]
            .to_vec()
    }

    #[test]
    fn constant_region_has_no_response() {
        let data = vec![137u8; 32 * 32];
        let p = Decomposer::new(3, 6)
            .decompose(Region::new(&data, 32, 32))
            .unwrap();
        for sb in &p.subbands {
            let energy: f64 = sb.coeffs.iter().map(|c| c.norm_sqr()).sum();
            assert!(energy < 1e-12, "level {} orient {}", sb.level, sb.orientation);
        }
    }

    #[test]
    fn texture_excites_every_subband() {
        let data = texture(32, 32, 5);
        let p = Decomposer::new(3, 6)
            .decompose(Region::new(&data, 32, 32))
            .unwrap();
        assert_eq!(p.subbands.len(), 18);
        for sb in &p.subbands {
            let energy: f64 = sb.coeffs.iter().map(|c| c.norm_sqr()).sum();
            assert!(energy > 1.0, "level {} orient {}", sb.level, sb.orientation);
        }
    }

    #[test]
    fn decomposition_is_linear() {
        // Even-valued inputs make the pixel average exact, so the only error
        // left is float roundoff.
        let a: Vec<u8> = texture(16, 16, 1).iter().map(|&v| v & !1).collect();
        let b: Vec<u8> = texture(16, 16, 2).iter().map(|&v| v & !1).collect();
        let avg_px: Vec<u8> = a
            .iter()
            .zip(&b)
            .map(|(&p, &q)| ((p as u16 + q as u16) / 2) as u8)
            .collect();
        let d = Decomposer::new(2, 4);
        let pa = d.decompose(Region::new(&a, 16, 16)).unwrap();
        let pb = d.decompose(Region::new(&b, 16, 16)).unwrap();
        let ps = d.decompose(Region::new(&avg_px, 16, 16)).unwrap();
        for ((sa, sb2), ss) in pa.subbands.iter().zip(&pb.subbands).zip(&ps.subbands) {
            for i in 0..ss.coeffs.len() {
                let avg = (sa.coeffs[i] + sb2.coeffs[i]) / 2.0;
                assert!((ss.coeffs[i] - avg).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn circular_shift_shifts_coefficients() {
        let w = 32;
        let data = texture(w, w, 9);
        let mut shifted = vec![0u8; w * w];
        for y in 0..w {
            for x in 0..w {
                shifted[y * w + x] = data[y * w + (x + 1) % w];
            }
        }
        let d = Decomposer::new(3, 6);
        let p0 = d.decompose_raw(Region::new(&data, w, w)).unwrap();
        let p1 = d.decompose_raw(Region::new(&shifted, w, w)).unwrap();
        // Circular filtering commutes with circular shift exactly.
        for (s0, s1) in p0.subbands.iter().zip(&p1.subbands) {
            for y in 0..w {
                for x in 0..w {
                    let expect = s0.at((x + 1) % w, y);
                    let got = s1.at(x, y);
                    assert!((expect - got).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn crop_matches_manual_slice() {
        let data = texture(32, 24, 3);
        let p = Decomposer::new(2, 4)
            .decompose(Region::new(&data, 32, 24))
            .unwrap();
        let c = p.crop(5, 3, 16, 16);
        assert_eq!(c.width, 16);
        assert_eq!(c.subbands.len(), 8);
        for (full, cropped) in p.subbands.iter().zip(&c.subbands) {
            for y in 0..16 {
                for x in 0..16 {
                    assert_eq!(full.at(5 + x, 3 + y), cropped.at(x, y));
                }
            }
        }
    }

    #[test]
    fn small_region_is_rejected() {
        let data = vec![0u8; 16];
        assert!(Decomposer::new(3, 6)
            .decompose(Region::new(&data, 4, 4))
            .is_err());
    }
}
