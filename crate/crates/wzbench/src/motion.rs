//! Decoder-side motion estimation and side-information synthesis.
//!
//! The two key frames around a WZ frame are block-matched by exhaustive
//! search under any of the quality metrics, then the side information is
//! built by bidirectional half-vector compensation.

use crate::error::{Error, Result};
use crate::metrics::{
    cw_ssim_window, mse, psnr, ssim, vif, vif_window, Decomposer, MetricKind, MetricParams,
    Polarity, Pyramid, Region,
};
use crate::video::Frame;

/// Non-overlapping square tiling of a frame for block matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    pub block_size: usize,
    pub width: usize,
    pub height: usize,
    pub blocks_x: usize,
    pub blocks_y: usize,
}

impl BlockGrid {
    /// Tiling must be exact; QCIF dimensions are multiples of 16.
    pub fn new(width: usize, height: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 || width % block_size != 0 || height % block_size != 0 {
            return Err(Error::Config(format!(
                "{width}x{height} frame does not tile into {block_size}x{block_size} blocks"
            )));
        }
        Ok(Self {
            block_size,
            width,
            height,
            blocks_x: width / block_size,
            blocks_y: height / block_size,
        })
    }

    pub fn block_count(&self) -> usize {
        self.blocks_x * self.blocks_y
    }

    /// Top-left pixel of block `i`, raster order.
    pub fn position(&self, i: usize) -> (usize, usize) {
        (
            i % self.blocks_x * self.block_size,
            i / self.blocks_x * self.block_size,
        )
    }
}

/// Displacement from a block in the earlier key frame to its match in the
/// later one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

/// Full-search output: one vector and its best score per block.
#[derive(Debug, Clone)]
pub struct MotionField {
    pub grid: BlockGrid,
    pub metric: MetricKind,
    pub vectors: Vec<MotionVector>,
    pub scores: Vec<f64>,
}

/// Search controls. `search_range` bounds |dx| and |dy|, so the candidate
/// window has side `block_size + 2 * search_range`.
#[derive(Debug, Clone)]
pub struct SearchParams {
    pub block_size: usize,
    pub search_range: usize,
    pub metric: MetricKind,
    pub metric_params: MetricParams,
}

impl SearchParams {
    /// Window with side three times the block: range equals the block size.
    pub fn standard(metric: MetricKind) -> Self {
        Self {
            block_size: 16,
            search_range: 16,
            metric,
            metric_params: MetricParams::default(),
        }
    }
}

/// True when `candidate` beats `incumbent` under the metric's polarity.
pub fn improves(polarity: Polarity, candidate: f64, incumbent: f64) -> bool {
    match polarity {
        Polarity::Distance => candidate < incumbent,
        Polarity::Similarity => candidate > incumbent,
    }
}

/// Per-pair scoring state. Pixel metrics read the frames directly; the
/// pyramid metrics decompose each whole frame once and score candidate
/// blocks as coefficient windows, which turns a per-candidate FFT into a
/// per-frame one.
struct Scorer<'a> {
    prev: &'a Frame,
    next: &'a Frame,
    params: &'a SearchParams,
    pyramids: Option<(Pyramid, Pyramid)>,
    buf_a: Vec<u8>,
    buf_b: Vec<u8>,
}

impl<'a> Scorer<'a> {
    fn new(prev: &'a Frame, next: &'a Frame, params: &'a SearchParams) -> Result<Self> {
        let pyramids = match params.metric {
            MetricKind::CwSsim => {
                let p = &params.metric_params.cwssim;
                Some(Decomposer::new(p.levels, p.orientations))
            }
            MetricKind::Vif => {
                let p = &params.metric_params.vif;
                Some(Decomposer::new(p.levels, p.orientations))
            }
            _ => None,
        }
        .map(|d| -> Result<_> {
            // Circular decomposition: near the border the bank wraps in
            // opposite-edge content, which both frames share and which
            // translates with the scene, so border blocks keep healthy
            // coefficient energy. Reflection padding would instead cancel
            // odd-symmetric components there and starve the border scores.
            Ok((
                d.decompose_raw(Region::from_frame(prev))?,
                d.decompose_raw(Region::from_frame(next))?,
            ))
        })
        .transpose()?;
        Ok(Self {
            prev,
            next,
            params,
            pyramids,
            buf_a: Vec::new(),
            buf_b: Vec::new(),
        })
    }

    /// Metric between the block of `prev` at `p` and the block of `next`
    /// at `c`, both fully inside their frames.
    fn score(&mut self, p: (usize, usize), c: (usize, usize)) -> Result<f64> {
        let n = self.params.block_size;
        match self.params.metric {
            MetricKind::Sad => {
                let mut sum = 0u64;
                for dy in 0..n {
                    let ra = &self.prev.row(p.1 + dy)[p.0..p.0 + n];
                    let rb = &self.next.row(c.1 + dy)[c.0..c.0 + n];
                    for (a, b) in ra.iter().zip(rb) {
                        sum += (*a as i32 - *b as i32).unsigned_abs() as u64;
                    }
                }
                Ok(sum as f64)
            }
            MetricKind::Mse => {
                let mut sum = 0u64;
                for dy in 0..n {
                    let ra = &self.prev.row(p.1 + dy)[p.0..p.0 + n];
                    let rb = &self.next.row(c.1 + dy)[c.0..c.0 + n];
                    for (a, b) in ra.iter().zip(rb) {
                        let d = *a as i64 - *b as i64;
                        sum += (d * d) as u64;
                    }
                }
                Ok(sum as f64 / (n * n) as f64)
            }
            MetricKind::Ssim => {
                self.prev.copy_block(p.0, p.1, n, n, &mut self.buf_a);
                self.next.copy_block(c.0, c.1, n, n, &mut self.buf_b);
                ssim(
                    Region::new(&self.buf_a, n, n),
                    Region::new(&self.buf_b, n, n),
                    &self.params.metric_params.ssim,
                )
            }
            MetricKind::CwSsim => {
                let (pp, pn) = self.pyramids.as_ref().expect("prepared in new");
                Ok(cw_ssim_window(
                    pp,
                    pn,
                    p,
                    c,
                    n,
                    n,
                    &self.params.metric_params.cwssim,
                ))
            }
            MetricKind::Vif => {
                let (pp, pn) = self.pyramids.as_ref().expect("prepared in new");
                Ok(vif_window(pp, pn, p, c, n, n, &self.params.metric_params.vif).value)
            }
        }
    }
}

/// Exhaustive block matching from `prev` toward `next`.
///
/// Every displacement with |dx|, |dy| ≤ `search_range` whose candidate block
/// stays in-frame is scored; ties go to the smallest |dx| + |dy|, then to the
/// earliest candidate in (dy, dx) raster order.
pub fn block_match(prev: &Frame, next: &Frame, params: &SearchParams) -> Result<MotionField> {
    if (prev.width(), prev.height()) != (next.width(), next.height()) {
        return Err(Error::DimensionMismatch(format!(
            "block matching {}x{} against {}x{}",
            prev.width(),
            prev.height(),
            next.width(),
            next.height()
        )));
    }
    let grid = BlockGrid::new(prev.width(), prev.height(), params.block_size)?;
    let window = params.block_size + 2 * params.search_range;
    if window > prev.width().min(prev.height()) {
        return Err(Error::Config(format!(
            "{window}px search window exceeds the {}x{} frame",
            prev.width(),
            prev.height()
        )));
    }
    let polarity = params.metric.polarity();
    let mut scorer = Scorer::new(prev, next, params)?;
    let n = params.block_size as i64;
    let r = params.search_range as i64;
    let (w, h) = (prev.width() as i64, prev.height() as i64);
    let mut vectors = Vec::with_capacity(grid.block_count());
    let mut scores = Vec::with_capacity(grid.block_count());
    for i in 0..grid.block_count() {
        let (bx, by) = grid.position(i);
        let mut best = f64::NAN;
        let mut best_mv = MotionVector::default();
        let mut best_l1 = i64::MAX;
        for dy in -r..=r {
            let cy = by as i64 + dy;
            if cy < 0 || cy + n > h {
                continue;
            }
            for dx in -r..=r {
                let cx = bx as i64 + dx;
                if cx < 0 || cx + n > w {
                    continue;
                }
                let s = scorer.score((bx, by), (cx as usize, cy as usize))?;
                let l1 = dx.abs() + dy.abs();
                if best.is_nan() || improves(polarity, s, best) || (s == best && l1 < best_l1) {
                    best = s;
                    best_mv = MotionVector {
                        dx: dx as i32,
                        dy: dy as i32,
                    };
                    best_l1 = l1;
                }
            }
        }
        vectors.push(best_mv);
        scores.push(best);
    }
    Ok(MotionField {
        grid,
        metric: params.metric,
        vectors,
        scores,
    })
}

/// Bidirectional half-vector interpolation of the side-information frame.
///
/// Each output block at p averages the block of `prev` at p - MV/2 with the
/// block of `next` at p + MV/2: content that travelled MV across the key-frame
/// gap has covered half of it by the middle frame. Out-of-frame fetches clamp
/// to the border.
pub fn interpolate_si(prev: &Frame, next: &Frame, field: &MotionField) -> Result<Frame> {
    if (prev.width(), prev.height()) != (field.grid.width, field.grid.height)
        || (next.width(), next.height()) != (field.grid.width, field.grid.height)
    {
        return Err(Error::DimensionMismatch(
            "motion field does not match the key frames".into(),
        ));
    }
    let n = field.grid.block_size;
    let mut out = Frame::zeros(field.grid.width, field.grid.height)?;
    for i in 0..field.grid.block_count() {
        let (bx, by) = field.grid.position(i);
        let mv = field.vectors[i];
        // Integer division truncates toward zero: exactly round-to-nearest
        // with ties toward zero for a halved integer, so static blocks stay
        // static.
        let hx = (mv.dx / 2) as isize;
        let hy = (mv.dy / 2) as isize;
        for v in 0..n {
            for u in 0..n {
                let x = (bx + u) as isize;
                let y = (by + v) as isize;
                let a = prev.at_clamped(x - hx, y - hy);
                let b = next.at_clamped(x + hx, y + hy);
                out.set(bx + u, by + v, ((a as u16 + b as u16 + 1) / 2) as u8);
            }
        }
    }
    Ok(out)
}

/// Fidelity of one side-information frame against the true WZ frame.
#[derive(Debug, Clone, Copy)]
pub struct SiReport {
    pub frame_index: usize,
    pub mse: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub vif: f64,
}

/// Scores `si` against `truth` (reference-first for the asymmetric metrics).
pub fn si_quality_report(
    si: &Frame,
    truth: &Frame,
    frame_index: usize,
    params: &MetricParams,
) -> Result<SiReport> {
    let t = Region::from_frame(truth);
    let s = Region::from_frame(si);
    let mse_v = mse(t, s)?;
    Ok(SiReport {
        frame_index,
        mse: mse_v,
        psnr: psnr(mse_v)?,
        ssim: ssim(t, s, &params.ssim)?,
        vif: vif(t, s, &params.vif)?.value,
    })
}
