//! Deterministic synthetic sequences for tests and benchmarks.
//!
//! The scene generator composes a fractal-noise background, a few moving
//! textured objects, a slowly drifting illumination field and sensor noise.
//! Everything is derived from a single seed, so two runs with the same
//! parameters produce byte-identical video on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::video::{Frame, VideoSequence};

/// Hash of a lattice point, uniform in [-1, 1].
fn lattice(seed: u64, ix: i64, iy: i64) -> f64 {
    let mut h = seed
        ^ (ix as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (iy as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    h ^= h >> 30;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^= h >> 31;
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Smoothly interpolated lattice noise; integer coordinates hit lattice
/// values exactly, so integer translation is an exact pixel shift.
fn value_noise(seed: u64, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let (ix, iy) = (x0 as i64, y0 as i64);
    let sx = smooth(x - x0);
    let sy = smooth(y - y0);
    let v00 = lattice(seed, ix, iy);
    let v10 = lattice(seed, ix + 1, iy);
    let v01 = lattice(seed, ix, iy + 1);
    let v11 = lattice(seed, ix + 1, iy + 1);
    let a = v00 + sx * (v10 - v00);
    let b = v01 + sx * (v11 - v01);
    a + sy * (b - a)
}

/// Octave sum of value noise, normalized to roughly [-1, 1].
///
/// Octaves past the pixel Nyquist rate would alias into incoherent noise,
/// so they are skipped.
fn fbm(seed: u64, x: f64, y: f64, octaves: u32, base_freq: f64, persistence: f64) -> f64 {
    let mut sum = 0.0;
    let mut amp = 1.0;
    let mut freq = base_freq;
    let mut norm = 0.0;
    for o in 0..octaves {
        if freq > 0.45 {
            break;
        }
        sum += amp * value_noise(seed.wrapping_add(o as u64 * 0x9E37), x * freq, y * freq);
        norm += amp;
        amp *= persistence;
        freq *= 2.0;
    }
    if norm == 0.0 {
        0.0
    } else {
        sum / norm
    }
}

/// Triangle-wave fold of `p` into [lo, hi]; used to bounce object paths.
fn reflect(p: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    let q = (p - lo).rem_euclid(2.0 * span);
    lo + if q < span { q } else { 2.0 * span - q }
}

fn to_luma(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Smooth shoulder compression into [0, 255]: identity on the midrange,
/// exponential approach at the ends. Hard clipping would draw crisp false
/// contours that move with the lighting rather than the scene.
fn soft_shoulder(v: f64) -> f64 {
    const KNEE: f64 = 27.5;
    let hi = 255.0 - KNEE;
    if v > hi {
        hi + KNEE * (1.0 - (-(v - hi) / KNEE).exp())
    } else if v < KNEE {
        KNEE - KNEE * (1.0 - (-(KNEE - v) / KNEE).exp())
    } else {
        v
    }
}

/// Constant-valued frames, mostly for degenerate-input tests.
pub fn constant_sequence(width: usize, height: usize, frames: usize, value: u8) -> VideoSequence {
    let fs = (0..frames)
        .map(|_| Frame::new(width, height, vec![value; width * height]).unwrap())
        .collect();
    VideoSequence::new(fs).unwrap()
}

/// Textured sequence translating by an exact integer vector per frame.
///
/// Frame t shows the noise field sampled at (x + vx*t, y + vy*t), so scene
/// content moves by (-vx, -vy) pixels from one frame to the next.
pub fn pan_sequence(
    width: usize,
    height: usize,
    frames: usize,
    seed: u64,
    velocity: (isize, isize),
) -> VideoSequence {
    let fs = (0..frames)
        .map(|t| {
            let ox = (velocity.0 * t as isize) as f64;
            let oy = (velocity.1 * t as isize) as f64;
            let mut data = Vec::with_capacity(width * height);
            for y in 0..height {
                for x in 0..width {
                    let v = fbm(seed, x as f64 + ox, y as f64 + oy, 4, 1.0 / 12.0, 0.55);
                    data.push(to_luma(125.0 + 105.0 * v));
                }
            }
            Frame::new(width, height, data).unwrap()
        })
        .collect();
    VideoSequence::new(fs).unwrap()
}

/// A textured disk drifting over the background.
#[derive(Debug, Clone)]
pub struct MovingObject {
    pub start: (f64, f64),
    pub velocity: (f64, f64),
    pub radius: f64,
    /// Width of the soft alpha edge in pixels.
    pub edge: f64,
    pub dc_offset: f64,
    pub texture_seed: u64,
    /// Object texture frequency as a multiple of the background's.
    pub texture_freq_mul: f64,
    /// Object texture swing as a multiple of the background contrast.
    pub contrast_mul: f64,
}

/// Full scene description; see the named profiles for sensible defaults.
#[derive(Debug, Clone)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    /// Base spatial frequency of the background texture, cycles per pixel.
    pub texture_freq: f64,
    pub texture_octaves: u32,
    pub texture_persistence: f64,
    /// Luma swing applied to the unit-range noise.
    pub contrast: f64,
    /// Depth of the slow contrast envelope over the background texture
    /// (0 disables): 0.85 leaves some areas nearly flat and others vivid.
    pub texture_mod_depth: f64,
    /// Spatial frequency of the contrast envelope, cycles per pixel.
    pub texture_mod_freq: f64,
    /// Lower bound kept under the contrast envelope, so dim areas stay
    /// weakly textured instead of dropping to bare sensor noise.
    pub texture_mod_floor: f64,
    /// Temporal swing of the envelope depth (0 freezes it); local texture
    /// contrast then breathes over time like shimmer or focus hunting.
    pub texture_mod_flicker: f64,
    /// Frames per full cycle of the envelope flicker.
    pub texture_mod_period: f64,
    pub background_velocity: (f64, f64),
    pub objects: Vec<MovingObject>,
    /// Peak of the multiplicative illumination swing (0 disables).
    pub gain_amplitude: f64,
    /// Spatial frequency of the illumination field, cycles per pixel.
    pub gain_freq: f64,
    /// Frames per full cycle of the gain envelope.
    pub gain_period: f64,
    /// Peak of the additive brightness swing.
    pub brightness_amplitude: f64,
    pub brightness_period: f64,
    /// Spatial frequency of the brightness field, cycles per pixel
    /// (0 keeps the swing spatially uniform).
    pub brightness_freq: f64,
    /// Velocity of the brightness field in pixels per frame; decoupling it
    /// from the scene motion makes it a lighting change, not content.
    pub brightness_velocity: (f64, f64),
    pub noise_sigma: f64,
    /// Compress highlights and shadows smoothly instead of hard clipping.
    pub soft_clip: bool,
    /// Extra edge clearance for object paths (0 keeps the legacy near-edge
    /// bounce): centres then stay `radius + clearance` away from every edge.
    pub object_clearance: f64,
}

impl SceneParams {
    /// Camera-like profile: textured pan, two moving objects, drifting
    /// illumination gain, global brightness flicker and sensor noise.
    pub fn natural(width: usize, height: usize, frames: usize, seed: u64) -> Self {
        Self {
            width,
            height,
            frames,
            seed,
            texture_freq: 1.0 / 22.0,
            texture_octaves: 5,
            texture_persistence: 0.55,
            contrast: 155.0,
            texture_mod_depth: 0.0,
            texture_mod_freq: 0.0,
            texture_mod_floor: 0.0,
            texture_mod_flicker: 0.0,
            texture_mod_period: 1.0,
            background_velocity: (1.3, 0.6),
            objects: vec![
                MovingObject {
                    start: (width as f64 * 0.30, height as f64 * 0.40),
                    velocity: (-1.7, 0.9),
                    radius: width.min(height) as f64 * 0.16,
                    edge: 2.5,
                    dc_offset: 18.0,
                    texture_seed: seed ^ 0x51CE_B00C,
                    texture_freq_mul: 1.6,
                    contrast_mul: 0.9,
                },
                MovingObject {
                    start: (width as f64 * 0.68, height as f64 * 0.62),
                    velocity: (1.1, -1.4),
                    radius: width.min(height) as f64 * 0.11,
                    edge: 2.0,
                    dc_offset: -22.0,
                    texture_seed: seed ^ 0x0DD_BA11,
                    texture_freq_mul: 1.6,
                    contrast_mul: 0.9,
                },
            ],
            gain_amplitude: 0.15,
            gain_freq: 1.4 / width as f64,
            gain_period: 9.0,
            brightness_amplitude: 7.0,
            brightness_period: 13.0,
            brightness_freq: 0.0,
            brightness_velocity: (0.0, 0.0),
            noise_sigma: 2.0,
            soft_clip: false,
            object_clearance: 0.0,
        }
    }

    /// Benchmark profile for metric comparisons: a smooth panning background,
    /// crisply textured moving objects, photometric drift that is uniform or
    /// low-frequency in space, and sensor noise.
    ///
    /// The photometric terms (global gain flicker plus a slow additive
    /// brightness field moving independently of the content) disturb
    /// intensity-difference matching without changing local structure, which
    /// is the regime the perceptual metrics are built for.
    pub fn benchmark(width: usize, height: usize, frames: usize, seed: u64) -> Self {
        let min = width.min(height) as f64;
        Self {
            width,
            height,
            frames,
            seed,
            texture_freq: 1.0 / 24.0,
            texture_octaves: 4,
            texture_persistence: 0.55,
            contrast: 95.0,
            texture_mod_depth: 0.85,
            texture_mod_freq: 1.0 / 32.0,
            texture_mod_floor: 0.25,
            texture_mod_flicker: 0.3,
            texture_mod_period: 6.0,
            background_velocity: (0.25, 0.25),
            objects: vec![
                // Quarter-pixel velocity components put every second-frame
                // object displacement half a pixel off the integer grid, so
                // no search candidate aligns exactly and alignment tolerance
                // separates the metrics.
                MovingObject {
                    start: (width as f64 * 0.28, height as f64 * 0.36),
                    velocity: (-1.25, 0.75),
                    radius: min * 0.17,
                    edge: 3.5,
                    dc_offset: 16.0,
                    texture_seed: seed ^ 0x51CE_B00C,
                    texture_freq_mul: 1.15,
                    contrast_mul: 0.95,
                },
                MovingObject {
                    start: (width as f64 * 0.70, height as f64 * 0.60),
                    velocity: (1.25, -0.75),
                    radius: min * 0.12,
                    edge: 3.5,
                    dc_offset: -20.0,
                    texture_seed: seed ^ 0x0DD_BA11,
                    texture_freq_mul: 1.1,
                    contrast_mul: 0.95,
                },
                MovingObject {
                    start: (width as f64 * 0.50, height as f64 * 0.78),
                    velocity: (1.75, 0.25),
                    radius: min * 0.09,
                    edge: 3.5,
                    dc_offset: 8.0,
                    texture_seed: seed ^ 0xCAFE_D00D,
                    texture_freq_mul: 1.2,
                    contrast_mul: 0.9,
                },
            ],
            gain_amplitude: 0.16,
            gain_freq: 0.0,
            gain_period: 7.0,
            brightness_amplitude: 28.0,
            brightness_period: 5.0,
            // Shading varies inside an 8x8 window at this wavelength, which
            // pixel-domain statistics cannot cancel as a local mean shift.
            brightness_freq: 1.0 / 10.0,
            brightness_velocity: (0.6, 0.25),
            noise_sigma: 2.6,
            soft_clip: true,
            object_clearance: 22.0,
        }
    }

    /// Same geometry and motion but stable lighting and no noise.
    pub fn clean(width: usize, height: usize, frames: usize, seed: u64) -> Self {
        let mut p = Self::natural(width, height, frames, seed);
        p.gain_amplitude = 0.0;
        p.brightness_amplitude = 0.0;
        p.noise_sigma = 0.0;
        p
    }
}

/// Renders the scene described by `params`.
pub fn scene_sequence(params: &SceneParams) -> Result<VideoSequence> {
    let w = params.width;
    let h = params.height;
    let margin = 4.0;
    let mut frames = Vec::with_capacity(params.frames);

    for t in 0..params.frames {
        let tf = t as f64;
        let mut rng = ChaCha12Rng::seed_from_u64(
            params.seed ^ (t as u64).wrapping_mul(0xA076_1D64_78BD_642F),
        );
        let noise = Normal::new(0.0, params.noise_sigma.max(f64::MIN_POSITIVE)).unwrap();

        let centers: Vec<(f64, f64)> = params
            .objects
            .iter()
            .map(|o| {
                let m = if params.object_clearance > 0.0 {
                    o.radius + params.object_clearance
                } else {
                    margin
                };
                (
                    reflect(o.start.0 + o.velocity.0 * tf, m, w as f64 - m),
                    reflect(o.start.1 + o.velocity.1 * tf, m, h as f64 - m),
                )
            })
            .collect();

        let gain_env = params.gain_amplitude * (std::f64::consts::TAU * tf / params.gain_period + 0.7).sin();
        let mod_depth = params.texture_mod_depth
            * (1.0
                + params.texture_mod_flicker
                    * (std::f64::consts::TAU * tf / params.texture_mod_period + 0.3).sin());
        let brightness = params.brightness_amplitude
            * (std::f64::consts::TAU * tf / params.brightness_period + 1.9).sin();

        let bg_ox = params.background_velocity.0 * tf;
        let bg_oy = params.background_velocity.1 * tf;

        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let (xf, yf) = (x as f64, y as f64);
                // The contrast envelope rides the same pan as the texture, so
                // it is scene content rather than a photometric disturbance.
                let envelope = if params.texture_mod_depth > 0.0 {
                    (1.0 + mod_depth
                        * value_noise(
                            params.seed ^ 0x5EA5_04A1,
                            (xf + bg_ox) * params.texture_mod_freq,
                            (yf + bg_oy) * params.texture_mod_freq,
                        ))
                    .max(params.texture_mod_floor)
                } else {
                    1.0
                };
                let mut luma = 122.0
                    + params.contrast
                        * envelope
                        * fbm(
                            params.seed,
                            xf + bg_ox,
                            yf + bg_oy,
                            params.texture_octaves,
                            params.texture_freq,
                            params.texture_persistence,
                        );

                for (obj, &(cx, cy)) in params.objects.iter().zip(&centers) {
                    let d = ((xf - cx).powi(2) + (yf - cy).powi(2)).sqrt();
                    if d < obj.radius {
                        let alpha = smooth(((obj.radius - d) / obj.edge).clamp(0.0, 1.0));
                        let tex = fbm(
                            obj.texture_seed,
                            xf - cx,
                            yf - cy,
                            params.texture_octaves,
                            params.texture_freq * obj.texture_freq_mul,
                            params.texture_persistence,
                        );
                        let obj_luma =
                            122.0 + obj.dc_offset + params.contrast * obj.contrast_mul * tex;
                        luma += alpha * (obj_luma - luma);
                    }
                }

                if params.gain_amplitude != 0.0 {
                    // Zero spatial frequency means a pure exposure flicker,
                    // identical over the frame.
                    let field = if params.gain_freq > 0.0 {
                        value_noise(
                            params.seed ^ 0xFACE_F00D,
                            xf * params.gain_freq + 0.11 * tf,
                            yf * params.gain_freq + 0.07 * tf,
                        )
                    } else {
                        1.0
                    };
                    luma *= 1.0 + gain_env * field;
                }
                luma += if params.brightness_freq > 0.0 {
                    brightness
                        * value_noise(
                            params.seed ^ 0xB117_7E55,
                            (xf + params.brightness_velocity.0 * tf) * params.brightness_freq
                                + 0.05 * tf,
                            (yf + params.brightness_velocity.1 * tf) * params.brightness_freq
                                + 0.03 * tf,
                        )
                } else {
                    brightness
                };
                if params.noise_sigma > 0.0 {
                    luma += noise.sample(&mut rng);
                }
                if params.soft_clip {
                    luma = soft_shoulder(luma);
                }
                data.push(to_luma(luma));
            }
        }
        frames.push(Frame::new(w, h, data)?);
    }
    VideoSequence::new(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_is_reproducible() {
        let p = SceneParams::natural(64, 48, 4, 77);
        let a = scene_sequence(&p).unwrap();
        let b = scene_sequence(&p).unwrap();
        for i in 0..a.len() {
            assert_eq!(a.frame(i).data(), b.frame(i).data());
        }
    }

    #[test]
    fn seeds_change_content() {
        let a = scene_sequence(&SceneParams::natural(64, 48, 1, 1)).unwrap();
        let b = scene_sequence(&SceneParams::natural(64, 48, 1, 2)).unwrap();
        assert_ne!(a.frame(0).data(), b.frame(0).data());
    }

    #[test]
    fn pan_shifts_content_exactly() {
        let seq = pan_sequence(48, 32, 2, 9, (3, 1));
        let (f0, f1) = (seq.frame(0), seq.frame(1));
        // Frame 1 samples the field 3 right and 1 down of frame 0, so the
        // overlapping interior must match exactly.
        for y in 0..31 {
            for x in 0..45 {
                assert_eq!(f1.at(x, y), f0.at(x + 3, y + 1), "at ({x},{y})");
            }
        }
    }

    #[test]
    fn natural_profile_has_texture() {
        let seq = scene_sequence(&SceneParams::natural(96, 80, 1, 5)).unwrap();
        let data = seq.frame(0).data();
        let mean = data.iter().map(|&v| v as f64).sum::<f64>() / data.len() as f64;
        let var = data
            .iter()
            .map(|&v| (v as f64 - mean).powi(2))
            .sum::<f64>()
            / data.len() as f64;
        let sigma = var.sqrt();
        assert!(sigma > 25.0, "luma spread too small: {sigma:.1}");
        assert!((60.0..190.0).contains(&mean), "mean luma drifted: {mean:.1}");
    }
}
