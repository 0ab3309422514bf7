//! Command-line front end for the Wyner-Ziv codec workbench.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wzbench::entropy::RateModel;
use wzbench::metrics::MetricKind;
use wzbench::pipeline::{
    decode, encode, rd_sweep, run_si_only, run_table1, PipelineConfig, PipelineMode, RD_FILE,
    SI_REPORT_FILE, SWEEP_FILE, TABLE1_FILE,
};
use wzbench::video::ChromaLayout;
use wzbench::{Error, Result};

/// Success is 0; nonzero codes distinguish the failure class.
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_UNVERIFIED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "wzbench",
    version,
    about = "Wyner-Ziv distributed video codec workbench",
    long_about = "Encodes video as key frames plus turbo-coded parity, decodes with \
                  metric-driven side information, and emits entropy and rate-distortion reports."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flag overrides for every config field; a --config file takes precedence
/// over flags for the keys it sets.
#[derive(Args, Debug)]
struct ConfigArgs {
    /// TOML config file; its keys override the corresponding flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raw input video; omit to use the built-in synthetic scene
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// Input chroma layout: luma-only or planar420
    #[arg(long)]
    layout: Option<ChromaLayout>,
    /// Wyner-Ziv frames to process
    #[arg(long)]
    frames: Option<usize>,
    /// Block matching criterion: sad, mse, ssim, cwssim, or vif
    #[arg(long)]
    metric: Option<MetricKind>,
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long)]
    search_range: Option<usize>,
    /// Narrower search window for VIF only (runtime bound, labeled in config copy)
    #[arg(long)]
    vif_search_range: Option<usize>,
    /// Band-plan quality knob, 1 (coarsest) to 8
    #[arg(long)]
    quality: Option<u32>,
    /// Coding domain: transform-rd or pixel-entropy
    #[arg(long)]
    mode: Option<PipelineMode>,
    /// Conditional-rate estimator: per-plane-bsc or context
    #[arg(long)]
    rate_model: Option<RateModel>,
    /// Report wall times (true) or zero them for reproducible output (false)
    #[arg(long)]
    measure_time: Option<bool>,
    #[arg(long)]
    turbo_seed: Option<u64>,
    /// Seed of the synthetic scene used when no input file is given
    #[arg(long)]
    scene_seed: Option<u64>,
    /// Virtual-channel prior used before any plane history exists
    #[arg(long)]
    crossover_prior: Option<f64>,
    /// Parity chunks the decoder may request per block (1 to 8)
    #[arg(long)]
    max_requests: Option<usize>,
    /// APP iterations per parity increment
    #[arg(long)]
    max_iter: Option<usize>,
    /// Accepted for interface stability; outputs are identical for any value
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field.clone() { cfg.$field = v; })*
            };
        }
        apply!(
            width, height, layout, frames, metric, block_size, search_range, quality, mode,
            rate_model, measure_time, turbo_seed, scene_seed, crossover_prior, max_requests,
            max_iter, workers, output_dir
        );
        if self.input.is_some() {
            cfg.input = self.input.clone();
        }
        if self.vif_search_range.is_some() {
            cfg.vif_search_range = self.vif_search_range;
        }
        if let Some(path) = &self.config {
            let file: toml::Table = toml::from_str(&std::fs::read_to_string(path)?)
                .map_err(|e| Error::Config(format!("bad config file: {e}")))?;
            let mut merged: toml::Table =
                toml::from_str(&cfg.to_toml_string()).expect("config reserializes");
            for (k, v) in file {
                merged.insert(k, v);
            }
            cfg = PipelineConfig::from_toml_str(
                &toml::to_string(&merged).expect("merged config serializes"),
            )?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compare all five metrics: SI quality, bitplane errors, conditional rate
    Table1(ConfigArgs),
    /// Run the codec across quality knobs and metrics, emit RD curves
    RdSweep {
        #[command(flatten)]
        args: ConfigArgs,
        /// Quality knobs to sweep
        #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
        knobs: Vec<u32>,
        /// Metrics to sweep; defaults to all five
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<MetricKind>>,
    },
    /// Store key frames and turbo parity for the WZ frames
    Encode(ConfigArgs),
    /// Reconstruct WZ frames from stored keys and parity
    Decode(ConfigArgs),
    /// Build side information only and report its quality
    SiOnly(ConfigArgs),
}

fn error_exit(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::TruncatedFile { .. }
        | Error::EmptyFile { .. }
        | Error::BadMagic { .. }
        | Error::UnsupportedVersion(_)
        | Error::CorruptStream(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Table1(args) => {
            let cfg = args.resolve()?;
            let rows = run_table1(&cfg)?;
            for r in &rows {
                println!(
                    "{:<7} ssim {:.4}  plane_err {:.4}  h_cond {:.4}  {:.1}s",
                    r.metric.name(),
                    r.ssim,
                    r.avg_plane_err,
                    r.h_cond,
                    r.time_sec
                );
            }
            println!("report: {}", cfg.out_path(TABLE1_FILE).display());
            Ok(0)
        }
        Command::RdSweep {
            args,
            knobs,
            metrics,
        } => {
            let cfg = args.resolve()?;
            let metrics = metrics.unwrap_or_else(|| MetricKind::ALL.to_vec());
            let rows = rd_sweep(&cfg, &knobs, &metrics)?;
            let mut unverified = 0;
            for r in &rows {
                println!(
                    "{:<7} q{}  {:>10.1} bits/frame  psnr {:.3} dB  ssim {:.4}",
                    r.metric.name(),
                    r.quality,
                    r.point.rate,
                    r.point.psnr,
                    r.point.ssim
                );
                unverified += r.unverified_planes;
            }
            println!("table: {}", cfg.out_path(SWEEP_FILE).display());
            Ok(if unverified > 0 { EXIT_UNVERIFIED } else { 0 })
        }
        Command::Encode(args) => {
            let cfg = args.resolve()?;
            let summary = encode(&cfg)?;
            println!(
                "encoded {} planes/frame into {} turbo blocks",
                summary.planes_per_frame, summary.blocks
            );
            println!("parity: {}", summary.parity_path.display());
            Ok(0)
        }
        Command::Decode(args) => {
            let cfg = args.resolve()?;
            let outcome = decode(&cfg)?;
            println!(
                "decoded {} frames  {:.1} bits/frame  psnr {:.3} dB  ssim {:.4}",
                outcome.decoded.len(),
                outcome.rd.rate,
                outcome.rd.psnr,
                outcome.rd.ssim
            );
            println!("report: {}", cfg.out_path(RD_FILE).display());
            if outcome.unverified_planes > 0 {
                eprintln!(
                    "warning: {}/{} planes left unverified",
                    outcome.unverified_planes, outcome.total_planes
                );
                Ok(EXIT_UNVERIFIED)
            } else {
                Ok(0)
            }
        }
        Command::SiOnly(args) => {
            let cfg = args.resolve()?;
            let reports = run_si_only(&cfg)?;
            for r in &reports {
                println!(
                    "frame {:>3}  mse {:>8.2}  psnr {:.3} dB  ssim {:.4}  vif {:.4}",
                    r.frame_index, r.mse, r.psnr, r.ssim, r.vif
                );
            }
            println!("report: {}", cfg.out_path(SI_REPORT_FILE).display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit(&e))
        }
    }
}
