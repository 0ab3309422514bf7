//! Orthonormal 8x8 type-II DCT over whole frames.

use crate::error::{Error, Result};
use crate::video::Frame;

/// Transform block edge length.
pub const BLOCK: usize = 8;

/// Scan position (band index) to raster position inside an 8x8 block.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

/// Precomputed orthonormal DCT basis; row k holds the k-th frequency vector.
pub struct Dct8 {
    basis: [[f64; BLOCK]; BLOCK],
}

impl Default for Dct8 {
    fn default() -> Self {
        Self::new()
    }
}

impl Dct8 {
    pub fn new() -> Self {
        let mut basis = [[0.0; BLOCK]; BLOCK];
        for (k, row) in basis.iter_mut().enumerate() {
            let a = if k == 0 {
                (1.0 / BLOCK as f64).sqrt()
            } else {
                (2.0 / BLOCK as f64).sqrt()
            };
            for (n, b) in row.iter_mut().enumerate() {
                *b = a
                    * (std::f64::consts::PI * (2 * n + 1) as f64 * k as f64
                        / (2 * BLOCK) as f64)
                        .cos();
            }
        }
        Self { basis }
    }

    /// 2D forward transform of one block; out[v*8+u] pairs vertical
    /// frequency v with horizontal frequency u.
    pub fn forward_block(&self, block: &[f64; 64]) -> [f64; 64] {
        let mut tmp = [0.0; 64];
        for y in 0..BLOCK {
            for u in 0..BLOCK {
                let mut s = 0.0;
                for x in 0..BLOCK {
                    s += block[y * BLOCK + x] * self.basis[u][x];
                }
                tmp[y * BLOCK + u] = s;
            }
        }
        let mut out = [0.0; 64];
        for v in 0..BLOCK {
            for u in 0..BLOCK {
                let mut s = 0.0;
                for y in 0..BLOCK {
                    s += tmp[y * BLOCK + u] * self.basis[v][y];
                }
                out[v * BLOCK + u] = s;
            }
        }
        out
    }

    pub fn inverse_block(&self, coeffs: &[f64; 64]) -> [f64; 64] {
        let mut tmp = [0.0; 64];
        for v in 0..BLOCK {
            for x in 0..BLOCK {
                let mut s = 0.0;
                for u in 0..BLOCK {
                    s += coeffs[v * BLOCK + u] * self.basis[u][x];
                }
                tmp[v * BLOCK + x] = s;
            }
        }
        let mut out = [0.0; 64];
        for y in 0..BLOCK {
            for x in 0..BLOCK {
                let mut s = 0.0;
                for v in 0..BLOCK {
                    s += tmp[v * BLOCK + x] * self.basis[v][y];
                }
                out[y * BLOCK + x] = s;
            }
        }
        out
    }

    /// Exact reachable range of the (v, u) coefficient for 8-bit input.
    pub fn coeff_range(&self, v: usize, u: usize) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for y in 0..BLOCK {
            for x in 0..BLOCK {
                let b = self.basis[v][y] * self.basis[u][x];
                if b > 0.0 {
                    hi += 255.0 * b;
                } else {
                    lo += 255.0 * b;
                }
            }
        }
        (lo, hi)
    }
}

/// Per-block DCT coefficients of a whole frame, blocks in raster order.
#[derive(Debug, Clone)]
pub struct DctBlockSet {
    width: usize,
    height: usize,
    blocks_x: usize,
    blocks_y: usize,
    blocks: Vec<[f64; 64]>,
}

impl DctBlockSet {
    /// All-zero coefficient set for a frame of the given geometry.
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        if width % BLOCK != 0 || height % BLOCK != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} is not a multiple of the {BLOCK}x{BLOCK} transform size"
            )));
        }
        let blocks_x = width / BLOCK;
        let blocks_y = height / BLOCK;
        Ok(Self {
            width,
            height,
            blocks_x,
            blocks_y,
            blocks: vec![[0.0; 64]; blocks_x * blocks_y],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &[f64; 64] {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [f64; 64] {
        &mut self.blocks[i]
    }

    /// Gathers one band (zig-zag position) across all blocks.
    pub fn band_values(&self, band: usize) -> Vec<f64> {
        let pos = ZIGZAG[band];
        self.blocks.iter().map(|b| b[pos]).collect()
    }

    /// Scatters one band back into all blocks.
    pub fn set_band_values(&mut self, band: usize, values: &[f64]) {
        assert_eq!(values.len(), self.blocks.len());
        let pos = ZIGZAG[band];
        for (b, &v) in self.blocks.iter_mut().zip(values) {
            b[pos] = v;
        }
    }
}

/// Transforms every 8x8 block of the frame.
pub fn dct_forward(frame: &Frame, dct: &Dct8) -> Result<DctBlockSet> {
    let mut set = DctBlockSet::zeros(frame.width(), frame.height())?;
    let mut pixels = [0.0; 64];
    for by in 0..set.blocks_y {
        for bx in 0..set.blocks_x {
            for y in 0..BLOCK {
                let row = frame.row(by * BLOCK + y);
                for x in 0..BLOCK {
                    pixels[y * BLOCK + x] = row[bx * BLOCK + x] as f64;
                }
            }
            set.blocks[by * set.blocks_x + bx] = dct.forward_block(&pixels);
        }
    }
    Ok(set)
}

/// Inverse transform, rounding and clamping back to 8-bit samples.
pub fn dct_inverse(set: &DctBlockSet, dct: &Dct8) -> Frame {
    let mut frame = Frame::zeros(set.width, set.height).unwrap();
    for by in 0..set.blocks_y {
        for bx in 0..set.blocks_x {
            let pixels = dct.inverse_block(&set.blocks[by * set.blocks_x + bx]);
            for y in 0..BLOCK {
                for x in 0..BLOCK {
                    let v = pixels[y * BLOCK + x].round().clamp(0.0, 255.0) as u8;
                    frame.set(bx * BLOCK + x, by * BLOCK + y, v);
                }
            }
        }
    }
    frame
}
