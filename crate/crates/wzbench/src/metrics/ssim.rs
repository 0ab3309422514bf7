//! Structural similarity with a uniform sliding window.

use crate::error::{Error, Result};
use crate::metrics::{check_same_shape, Region, SsimParams};

/// Summed-area table with one guard row and column of zeros.
struct Integral {
    width: usize,
    sums: Vec<f64>,
}

impl Integral {
    fn build<F: Fn(usize) -> f64>(w: usize, h: usize, f: F) -> Self {
        let stride = w + 1;
        let mut sums = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let mut row_acc = 0.0;
            for x in 0..w {
                row_acc += f(y * w + x);
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row_acc;
            }
        }
        Self { width: w, sums }
    }

    /// Sum over the window with top-left (x, y) and side `n`.
    #[inline]
    fn window(&self, x: usize, y: usize, n: usize) -> f64 {
        let s = self.width + 1;
        self.sums[(y + n) * s + x + n] + self.sums[y * s + x]
            - self.sums[y * s + x + n]
            - self.sums[(y + n) * s + x]
    }
}

/// Mean of the three-factor local similarity over all window placements.
pub fn ssim(x: Region, y: Region, params: &SsimParams) -> Result<f64> {
    check_same_shape(&x, &y)?;
    let win = params.window;
    if x.width < win || x.height < win {
        return Err(Error::RegionTooSmall {
            width: x.width,
            height: x.height,
            needed: format!("a {win}x{win} statistics window"),
        });
    }

    let ix = Integral::build(x.width, x.height, |i| x.data[i] as f64);
    let iy = Integral::build(x.width, x.height, |i| y.data[i] as f64);
    let ixx = Integral::build(x.width, x.height, |i| {
        let v = x.data[i] as f64;
        v * v
    });
    let iyy = Integral::build(x.width, x.height, |i| {
        let v = y.data[i] as f64;
        v * v
    });
    let ixy = Integral::build(x.width, x.height, |i| x.data[i] as f64 * y.data[i] as f64);

    let n = (win * win) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for wy in 0..=x.height - win {
        for wx in 0..=x.width - win {
            let mx = ix.window(wx, wy, win) / n;
            let my = iy.window(wx, wy, win) / n;
            let vx = (ixx.window(wx, wy, win) / n - mx * mx).max(0.0);
            let vy = (iyy.window(wx, wy, win) / n - my * my).max(0.0);
            let cov = ixy.window(wx, wy, win) / n - mx * my;
            total += local_ssim(mx, my, vx, vy, cov, params);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// The three factors of the local index, kept separate on purpose.
fn local_ssim(mx: f64, my: f64, vx: f64, vy: f64, cov: f64, p: &SsimParams) -> f64 {
    let sx = vx.sqrt();
    let sy = vy.sqrt();
    let luminance = (2.0 * mx * my + p.c1) / (mx * mx + my * my + p.c1);
    let contrast = (2.0 * sx * sy + p.c2) / (vx + vy + p.c2);
    let structure = (cov + p.c3) / (sx * sy + p.c3);
    luminance * contrast * structure
}
