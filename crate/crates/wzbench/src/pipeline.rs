//! End-to-end codec orchestration: encode/decode runs, rate-distortion
//! sweeps, and the report subcommands behind the CLI.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::entropy::{table1_csv, table1_report, RateModel, SiReportRow, Table1Options};
use crate::error::{Error, Result};
use crate::fixtures::{scene_sequence, SceneParams};
use crate::metrics::{mse, psnr, ssim, MetricKind, MetricParams, Region};
use crate::motion::{block_match, interpolate_si, si_quality_report, SearchParams, SiReport};
use crate::transform::bitplane::{frame_from_bitplanes, frame_to_bitplanes, from_bitplanes, to_bitplanes};
use crate::transform::dct::{dct_forward, dct_inverse, Dct8};
use crate::transform::quant::{hvs_band_plan, quantize_bands, reconstruct, BandPlan};
use crate::turbo::{
    chunk_positions, decode_with_feedback, CrossoverEstimator, DecodeLimits, EncodedBlock,
    Interleaver, ParityStore, RequestLog, TransmissionLog, TransmissionRecord, TurboEncoder,
    BLOCK_LEN,
};
use crate::video::{
    load_raw_sequence, write_raw_sequence, ChromaLayout, Frame, VideoSequence,
};

pub const CONFIG_FILE: &str = "config.toml";
pub const KEYS_FILE: &str = "keys.raw";
pub const PARITY_FILE: &str = "parity.wzps";
pub const TRANSMISSIONS_FILE: &str = "transmissions.wztx";
pub const REQUESTS_FILE: &str = "requests.wzrq";
pub const DECODED_FILE: &str = "decoded.raw";
pub const RD_FILE: &str = "rd.csv";
pub const SWEEP_FILE: &str = "rd_sweep.csv";
pub const PLOT_FILE: &str = "plot_rd.py";
pub const SI_VIDEO_FILE: &str = "si.raw";
pub const SI_REPORT_FILE: &str = "si_report.csv";
pub const TABLE1_FILE: &str = "table1.csv";

pub const RD_HEADER: &str = "metric,quality,rate_bits,psnr_db,ssim,unverified_planes";
pub const SI_REPORT_HEADER: &str = "frame,mse,psnr_db,ssim,vif";

/// What the Wyner-Ziv layer codes: raw pixel planes or quantized transform
/// bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineMode {
    PixelEntropy,
    #[default]
    TransformRd,
}

impl std::str::FromStr for PipelineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pixel-entropy" | "pixel" => Ok(PipelineMode::PixelEntropy),
            "transform-rd" | "transform" => Ok(PipelineMode::TransformRd),
            other => Err(Error::Config(format!("unknown pipeline mode {other:?}"))),
        }
    }
}

/// Everything a run needs; a copy is written next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Raw input video; absent means the built-in synthetic scene.
    pub input: Option<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub layout: ChromaLayout,
    /// Wyner-Ziv frames to process; needs 2*frames+1 source frames.
    pub frames: usize,
    pub metric: MetricKind,
    pub block_size: usize,
    pub search_range: usize,
    /// Opt-in narrower window for the heaviest metric; recorded in the
    /// config copy so restricted runs stay labeled.
    pub vif_search_range: Option<usize>,
    /// Band-plan quality knob, 1 (coarsest) to 8.
    pub quality: u32,
    pub mode: PipelineMode,
    pub rate_model: RateModel,
    /// Off zeroes wall-time columns so reruns are byte-identical.
    pub measure_time: bool,
    pub turbo_seed: u64,
    /// Seed of the synthetic scene when no input file is given.
    pub scene_seed: u64,
    /// Virtual-channel prior before any plane history exists.
    pub crossover_prior: f64,
    pub max_requests: usize,
    pub max_iter: usize,
    /// Accepted for interface stability; execution is sequential and
    /// outputs are identical for any value.
    pub workers: usize,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            width: 176,
            height: 144,
            layout: ChromaLayout::LumaOnly,
            frames: 20,
            metric: MetricKind::Sad,
            block_size: 16,
            search_range: 16,
            vif_search_range: None,
            quality: 4,
            mode: PipelineMode::TransformRd,
            rate_model: RateModel::PerPlaneBsc,
            measure_time: true,
            turbo_seed: 2024,
            scene_seed: 7,
            crossover_prior: 0.15,
            max_requests: 8,
            max_iter: 15,
            workers: 1,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("frame geometry must be positive".into()));
        }
        if self.block_size == 0 || self.width % self.block_size != 0 || self.height % self.block_size != 0
        {
            return Err(Error::Config(format!(
                "{}x{} does not tile into {}-pixel blocks",
                self.width, self.height, self.block_size
            )));
        }
        if self.mode == PipelineMode::TransformRd && (self.width % 8 != 0 || self.height % 8 != 0) {
            return Err(Error::Config(format!(
                "{}x{} does not tile into 8x8 transform blocks",
                self.width, self.height
            )));
        }
        let window = self.block_size + 2 * self.search_range.max(self.vif_search_range.unwrap_or(0));
        if self.search_range == 0 || window > self.width.min(self.height) {
            return Err(Error::Config(format!(
                "search window {window} exceeds the {}x{} frame",
                self.width, self.height
            )));
        }
        if self.frames == 0 {
            return Err(Error::Config("frame count must be positive".into()));
        }
        if self.mode == PipelineMode::TransformRd {
            let plan = hvs_band_plan(self.quality)?;
            if plan.total_planes() == 0 {
                return Err(Error::Config(format!(
                    "quality {} codes no bitplanes",
                    self.quality
                )));
            }
        }
        if !(self.crossover_prior > 0.0 && self.crossover_prior < 0.5) {
            return Err(Error::Config(format!(
                "crossover prior {} outside (0, 0.5)",
                self.crossover_prior
            )));
        }
        if self.max_requests == 0 || self.max_iter == 0 || self.workers == 0 {
            return Err(Error::Config(
                "max_requests, max_iter, and workers must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Search parameters for one metric, honoring the VIF restriction.
    pub fn search_params(&self, metric: MetricKind) -> SearchParams {
        let search_range = match metric {
            MetricKind::Vif => self.vif_search_range.unwrap_or(self.search_range),
            _ => self.search_range,
        };
        SearchParams {
            block_size: self.block_size,
            search_range,
            metric,
            metric_params: MetricParams::default(),
        }
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }

    fn limits(&self) -> DecodeLimits {
        DecodeLimits {
            max_iter: self.max_iter,
            max_requests: self.max_requests,
        }
    }
}

/// Loads the configured input, or renders the synthetic scene when no file
/// is given, truncated to the frames the run needs.
pub fn load_input(cfg: &PipelineConfig) -> Result<VideoSequence> {
    let needed = 2 * cfg.frames + 1;
    let mut seq = match &cfg.input {
        Some(path) => load_raw_sequence(path, cfg.width, cfg.height, cfg.layout, Some(needed))?,
        None => scene_sequence(&SceneParams::natural(
            cfg.width,
            cfg.height,
            needed,
            cfg.scene_seed,
        ))?,
    };
    if seq.len() < needed {
        return Err(Error::TooFewFrames {
            needed,
            actual: seq.len(),
        });
    }
    seq.truncate(needed);
    Ok(seq)
}

fn prepare_output_dir(cfg: &PipelineConfig) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    fs::write(cfg.out_path(CONFIG_FILE), cfg.to_toml_string())?;
    Ok(())
}

/// 1024-bit payload windows over one serialized plane.
fn segments(len: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
    (0..len).step_by(BLOCK_LEN).map(move |s| s..(s + BLOCK_LEN).min(len))
}

/// Plane bits of one frame in coding order (band-major, MSB first).
fn frame_planes(cfg: &PipelineConfig, plan: Option<&BandPlan>, dct: &Dct8, frame: &Frame) -> Result<Vec<Vec<u8>>> {
    match cfg.mode {
        PipelineMode::PixelEntropy => {
            let bp = frame_to_bitplanes(frame);
            Ok((0..8).map(|k| bp.plane(k).to_vec()).collect())
        }
        PipelineMode::TransformRd => {
            let plan = plan.expect("transform mode carries a band plan");
            let set = dct_forward(frame, dct)?;
            let q = quantize_bands(&set, plan);
            let mut out = Vec::new();
            for band in plan.coded_bands() {
                let info = &plan.bands[band];
                let bp = to_bitplanes(&q.indices[band], info.plane_count)?;
                for k in 0..info.plane_count as usize {
                    out.push(bp.plane(k).to_vec());
                }
            }
            Ok(out)
        }
    }
}

/// (band, plane) label for each entry of `frame_planes`, for channel
/// statistics keyed by position.
fn plane_labels(cfg: &PipelineConfig, plan: Option<&BandPlan>) -> Vec<(u16, u16)> {
    match cfg.mode {
        PipelineMode::PixelEntropy => (0..8).map(|k| (0, k)).collect(),
        PipelineMode::TransformRd => {
            let plan = plan.expect("transform mode carries a band plan");
            let mut out = Vec::new();
            for band in plan.coded_bands() {
                for k in 0..plan.bands[band].plane_count as u16 {
                    out.push((band as u16, k));
                }
            }
            out
        }
    }
}

/// Encode artifacts written to the output directory.
#[derive(Debug, Clone)]
pub struct EncodeSummary {
    pub blocks: usize,
    pub planes_per_frame: usize,
    pub parity_path: PathBuf,
    pub keys_path: PathBuf,
}

/// Splits the input GOP-2, stores key frames losslessly, and encodes every
/// WZ plane into the parity store.
pub fn encode(cfg: &PipelineConfig) -> Result<EncodeSummary> {
    cfg.validate()?;
    prepare_output_dir(cfg)?;
    let seq = load_input(cfg)?;

    let keys: Vec<Frame> = (0..=cfg.frames).map(|i| seq.frame(2 * i).clone()).collect();
    let keys_path = cfg.out_path(KEYS_FILE);
    write_raw_sequence(&keys_path, &VideoSequence::new(keys)?, ChromaLayout::LumaOnly)?;

    let plan = match cfg.mode {
        PipelineMode::TransformRd => Some(hvs_band_plan(cfg.quality)?),
        PipelineMode::PixelEntropy => None,
    };
    let dct = Dct8::new();
    let encoder = TurboEncoder::new(Interleaver::new(BLOCK_LEN, cfg.turbo_seed));
    let mut blocks = Vec::new();
    let mut planes_per_frame = 0;
    for f in 0..cfg.frames {
        let planes = frame_planes(cfg, plan.as_ref(), &dct, seq.frame(2 * f + 1))?;
        planes_per_frame = planes.len();
        for bits in &planes {
            for seg in segments(bits.len()) {
                blocks.push(encoder.encode_block(&bits[seg])?);
            }
        }
    }
    let store = ParityStore {
        block_len: BLOCK_LEN as u32,
        interleaver_seed: cfg.turbo_seed,
        blocks,
    };
    let parity_path = cfg.out_path(PARITY_FILE);
    store.write_to(&mut BufWriter::new(File::create(&parity_path)?))?;
    Ok(EncodeSummary {
        blocks: store.blocks.len(),
        planes_per_frame,
        parity_path,
        keys_path,
    })
}

/// One operating point of the codec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    /// Transmitted WZ bits (parity plus checksums) per WZ frame.
    pub rate: f64,
    /// PSNR of decoded WZ frames against the source, pooled over frames.
    pub psnr: f64,
    /// Mean SSIM of decoded WZ frames against the source.
    pub ssim: f64,
}

/// Decode result with its audit trail.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub rd: RdPoint,
    /// Planes containing at least one block the checksum never confirmed.
    pub unverified_planes: usize,
    pub total_planes: usize,
    /// Transmitted bits recounted from the serialized transmission log.
    pub total_bits: usize,
    /// Reassembled sequence, key frames at even indices.
    pub decoded: VideoSequence,
}

fn log_served_chunks(
    tx: &mut TransmissionLog,
    rq: &mut RequestLog,
    block_id: u32,
    block: &EncodedBlock,
    requests: usize,
    block_len: usize,
) {
    for c in 0..requests {
        rq.push(block_id, c as u8);
        let bits: Vec<u8> = chunk_positions(block_len, c)
            .map(|(s, t)| if s == 0 { block.parity1[t] } else { block.parity2[t] })
            .collect();
        tx.push(TransmissionRecord {
            block_id,
            chunk_id: c as u8,
            crc: (c == 0).then_some(block.crc),
            bits,
        });
    }
}

/// Rebuilds side information from the stored key frames, turbo-decodes every
/// plane against it, reconstructs the WZ frames, and reports rate/quality.
pub fn decode(cfg: &PipelineConfig) -> Result<DecodeOutcome> {
    cfg.validate()?;
    let store = ParityStore::read_from(&mut BufReader::new(File::open(cfg.out_path(PARITY_FILE))?))?;
    let block_len = store.block_len as usize;
    let interleaver = Interleaver::new(block_len, store.interleaver_seed);
    let keys = load_raw_sequence(
        &cfg.out_path(KEYS_FILE),
        cfg.width,
        cfg.height,
        ChromaLayout::LumaOnly,
        None,
    )?;
    if keys.len() != cfg.frames + 1 {
        return Err(Error::CorruptStream(format!(
            "key stream has {} frames, configuration expects {}",
            keys.len(),
            cfg.frames + 1
        )));
    }
    let plan = match cfg.mode {
        PipelineMode::TransformRd => Some(hvs_band_plan(cfg.quality)?),
        PipelineMode::PixelEntropy => None,
    };
    let labels = plane_labels(cfg, plan.as_ref());
    let dct = Dct8::new();
    let params = cfg.search_params(cfg.metric);
    let limits = cfg.limits();

    let mut estimator = CrossoverEstimator::new(cfg.crossover_prior);
    let mut history: HashMap<(u16, u16), (usize, usize)> = HashMap::new();
    let mut tx = TransmissionLog::default();
    let mut rq = RequestLog::default();
    let mut next_block = 0usize;
    let mut unverified_planes = 0usize;
    let mut decoded_wz = Vec::with_capacity(cfg.frames);

    for f in 0..cfg.frames {
        let prev = keys.frame(f);
        let next = keys.frame(f + 1);
        let field = block_match(prev, next, &params)?;
        let si = interpolate_si(prev, next, &field)?;

        // SI planes in the encoder's coding order.
        let si_set = match cfg.mode {
            PipelineMode::TransformRd => Some(dct_forward(&si, &dct)?),
            PipelineMode::PixelEntropy => None,
        };
        let si_planes = match (&si_set, plan.as_ref()) {
            (Some(set), Some(plan)) => {
                let q = quantize_bands(set, plan);
                let mut out = Vec::new();
                for band in plan.coded_bands() {
                    let info = &plan.bands[band];
                    let bp = to_bitplanes(&q.indices[band], info.plane_count)?;
                    for k in 0..info.plane_count as usize {
                        out.push(bp.plane(k).to_vec());
                    }
                }
                out
            }
            _ => {
                let bp = frame_to_bitplanes(&si);
                (0..8).map(|k| bp.plane(k).to_vec()).collect()
            }
        };

        let mut decoded_planes: Vec<Vec<u8>> = Vec::with_capacity(si_planes.len());
        for (label, si_bits) in labels.iter().zip(&si_planes) {
            let p_hat = estimator.estimate(*label);
            let mut plane_bits = Vec::with_capacity(si_bits.len());
            let mut plane_ok = true;
            for seg in segments(si_bits.len()) {
                let block = store.blocks.get(next_block).ok_or_else(|| {
                    Error::CorruptStream(format!(
                        "parity stream exhausted after {next_block} blocks"
                    ))
                })?;
                let r = decode_with_feedback(&si_bits[seg], block, p_hat, &interleaver, limits)?;
                log_served_chunks(&mut tx, &mut rq, next_block as u32, block, r.requests, block_len);
                plane_ok &= r.verified;
                plane_bits.extend_from_slice(&r.bits);
                next_block += 1;
            }
            if plane_ok {
                // Channel statistics only learn from confirmed planes.
                let flips = plane_bits.iter().zip(si_bits).filter(|(a, b)| a != b).count();
                let entry = history.entry(*label).or_insert((0, 0));
                entry.0 += flips;
                entry.1 += plane_bits.len();
                estimator.observe(*label, entry.0, entry.1);
            } else {
                unverified_planes += 1;
            }
            decoded_planes.push(plane_bits);
        }

        let frame = match (si_set, plan.as_ref()) {
            (Some(si_set), Some(plan)) => {
                let mut rec = si_set.clone();
                let mut at = 0usize;
                for band in plan.coded_bands() {
                    let info = &plan.bands[band];
                    let n_planes = info.plane_count as usize;
                    let mut bp = to_bitplanes(
                        &vec![0u32; si_set.n_blocks()],
                        info.plane_count,
                    )?;
                    for k in 0..n_planes {
                        bp.set_plane(k, decoded_planes[at + k].clone());
                    }
                    at += n_planes;
                    let indices = from_bitplanes(&bp);
                    let si_values = si_set.band_values(band);
                    let values: Vec<f64> = indices
                        .iter()
                        .zip(si_values)
                        .map(|(&idx, s)| reconstruct(idx, s, info))
                        .collect::<Result<_>>()?;
                    rec.set_band_values(band, &values);
                }
                dct_inverse(&rec, &dct)
            }
            _ => {
                let mut bp = frame_to_bitplanes(&si);
                for (k, bits) in decoded_planes.into_iter().enumerate() {
                    bp.set_plane(k, bits);
                }
                frame_from_bitplanes(&bp, cfg.width, cfg.height)?
            }
        };
        decoded_wz.push(frame);
    }
    if next_block != store.blocks.len() {
        return Err(Error::CorruptStream(format!(
            "parity stream has {} blocks, configuration consumed {next_block}",
            store.blocks.len()
        )));
    }

    tx.write_to(&mut BufWriter::new(File::create(cfg.out_path(TRANSMISSIONS_FILE))?))?;
    rq.write_to(&mut BufWriter::new(File::create(cfg.out_path(REQUESTS_FILE))?))?;
    // The reported rate is recounted from the serialized stream, not from
    // in-memory bookkeeping.
    let reread =
        TransmissionLog::read_from(&mut BufReader::new(File::open(cfg.out_path(TRANSMISSIONS_FILE))?))?;
    let total_bits = reread.total_bits();

    let mut frames_out = Vec::with_capacity(2 * cfg.frames + 1);
    for f in 0..cfg.frames {
        frames_out.push(keys.frame(f).clone());
        frames_out.push(decoded_wz[f].clone());
    }
    frames_out.push(keys.frame(cfg.frames).clone());
    let decoded = VideoSequence::new(frames_out)?;
    write_raw_sequence(&cfg.out_path(DECODED_FILE), &decoded, cfg.layout)?;

    let truth = load_input(cfg)?;
    let default_params = MetricParams::default();
    let mut sq_err = 0.0;
    let mut ssim_sum = 0.0;
    for f in 0..cfg.frames {
        let t = Region::from_frame(truth.frame(2 * f + 1));
        let d = Region::from_frame(&decoded_wz[f]);
        sq_err += mse(t, d)?;
        ssim_sum += ssim(t, d, &default_params.ssim)?;
    }
    let rd = RdPoint {
        rate: total_bits as f64 / cfg.frames as f64,
        psnr: psnr(sq_err / cfg.frames as f64)?,
        ssim: ssim_sum / cfg.frames as f64,
    };
    let outcome = DecodeOutcome {
        rd,
        unverified_planes,
        total_planes: cfg.frames * labels.len(),
        total_bits,
        decoded,
    };
    let mut csv = String::from(RD_HEADER);
    csv.push('\n');
    let _ = writeln!(csv, "{}", rd_row(cfg.metric, cfg.quality, &outcome));
    fs::write(cfg.out_path(RD_FILE), csv)?;
    Ok(outcome)
}

fn rd_row(metric: MetricKind, quality: u32, outcome: &DecodeOutcome) -> String {
    format!(
        "{},{},{:.1},{:.4},{:.6},{}",
        metric, quality, outcome.rd.rate, outcome.rd.psnr, outcome.rd.ssim, outcome.unverified_planes
    )
}

/// Full encode-then-decode round trip through the serialized artifacts.
pub fn run_wz_codec(cfg: &PipelineConfig) -> Result<DecodeOutcome> {
    encode(cfg)?;
    decode(cfg)
}

/// One sweep row: an operating point of one metric at one quality knob.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub metric: MetricKind,
    pub quality: u32,
    pub point: RdPoint,
    pub unverified_planes: usize,
}

fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut csv = String::from(RD_HEADER);
    csv.push('\n');
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{:.1},{:.4},{:.6},{}",
            r.metric, r.quality, r.point.rate, r.point.psnr, r.point.ssim, r.unverified_planes
        );
    }
    fs::write(path, csv)?;
    Ok(())
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Renders rate-distortion curves from rd_sweep.csv."""
import collections
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "rd_sweep.csv"
series = collections.defaultdict(list)
with open(path) as fh:
    for row in csv.DictReader(fh):
        if row["psnr_db"] in ("inf", ""):
            continue
        series[row["metric"]].append((float(row["rate_bits"]), float(row["psnr_db"])))

for metric, pts in sorted(series.items()):
    pts.sort()
    plt.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=metric)
plt.xlabel("WZ bits per frame")
plt.ylabel("PSNR (dB)")
plt.legend()
plt.grid(True, alpha=0.3)
plt.tight_layout()
plt.savefig("rd_curves.png", dpi=150)
print("wrote rd_curves.png")
"#;

/// Runs the codec once per metric and quality knob, saving the table after
/// every point so partial sweeps survive interruption.
pub fn rd_sweep(cfg: &PipelineConfig, knobs: &[u32], metrics: &[MetricKind]) -> Result<Vec<SweepRow>> {
    if knobs.len() < 2 {
        return Err(Error::Config("a sweep needs at least two quality knobs".into()));
    }
    if metrics.is_empty() {
        return Err(Error::Config("a sweep needs at least one metric".into()));
    }
    cfg.validate()?;
    prepare_output_dir(cfg)?;
    fs::write(cfg.out_path(PLOT_FILE), PLOT_SCRIPT)?;
    let csv_path = cfg.out_path(SWEEP_FILE);
    let mut rows = Vec::new();
    for &metric in metrics {
        for &quality in knobs {
            let mut point_cfg = cfg.clone();
            point_cfg.metric = metric;
            point_cfg.quality = quality;
            point_cfg.output_dir = cfg.output_dir.join(format!("{metric}_q{quality}"));
            let outcome = run_wz_codec(&point_cfg)?;
            rows.push(SweepRow {
                metric,
                quality,
                point: outcome.rd,
                unverified_planes: outcome.unverified_planes,
            });
            rows.sort_by(|a, b| {
                (a.metric.name(), a.point.rate)
                    .partial_cmp(&(b.metric.name(), b.point.rate))
                    .expect("rates are finite")
            });
            write_sweep_csv(&csv_path, &rows)?;
        }
    }
    Ok(rows)
}

/// Comparison-table subcommand: SI quality and conditional rate per metric.
pub fn run_table1(cfg: &PipelineConfig) -> Result<Vec<SiReportRow>> {
    cfg.validate()?;
    prepare_output_dir(cfg)?;
    let seq = load_input(cfg)?;
    let opts = Table1Options {
        frames: cfg.frames,
        model: cfg.rate_model,
        measure_time: cfg.measure_time,
        block_size: cfg.block_size,
        search_range: cfg.search_range,
        vif_search_range: cfg.vif_search_range,
        metric_params: MetricParams::default(),
    };
    let rows = table1_report(&seq, &MetricKind::ALL, &opts)?;
    fs::write(cfg.out_path(TABLE1_FILE), table1_csv(&rows))?;
    Ok(rows)
}

/// Side-information-only subcommand: builds SI frames for the configured
/// metric and reports their quality without running the turbo layer.
pub fn run_si_only(cfg: &PipelineConfig) -> Result<Vec<SiReport>> {
    cfg.validate()?;
    prepare_output_dir(cfg)?;
    let seq = load_input(cfg)?;
    let params = cfg.search_params(cfg.metric);
    let default_params = MetricParams::default();
    let mut reports = Vec::with_capacity(cfg.frames);
    let mut si_frames = Vec::with_capacity(cfg.frames);
    for f in 0..cfg.frames {
        let prev = seq.frame(2 * f);
        let next = seq.frame(2 * f + 2);
        let field = block_match(prev, next, &params)?;
        let si = interpolate_si(prev, next, &field)?;
        reports.push(si_quality_report(&si, seq.frame(2 * f + 1), 2 * f + 1, &default_params)?);
        si_frames.push(si);
    }
    write_raw_sequence(
        &cfg.out_path(SI_VIDEO_FILE),
        &VideoSequence::new(si_frames)?,
        ChromaLayout::LumaOnly,
    )?;
    let mut csv = String::from(SI_REPORT_HEADER);
    csv.push('\n');
    for r in &reports {
        let _ = writeln!(
            csv,
            "{},{:.4},{:.4},{:.6},{:.6}",
            r.frame_index, r.mse, r.psnr, r.ssim, r.vif
        );
    }
    fs::write(cfg.out_path(SI_REPORT_FILE), csv)?;
    Ok(reports)
}
