//! End-to-end checks of the command-line interface and its exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use wzbench::fixtures::{scene_sequence, SceneParams};
use wzbench::pipeline::{PipelineConfig, PipelineMode, CONFIG_FILE, DECODED_FILE, PARITY_FILE, SI_REPORT_FILE, SWEEP_FILE};
use wzbench::video::{write_raw_sequence, ChromaLayout, VideoSequence};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wzbench"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wzbench_cli_{}_{}", name, std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn static_input(dir: &PathBuf, seed: u64) -> PathBuf {
    let f = scene_sequence(&SceneParams::natural(48, 48, 1, seed)).unwrap().frames()[0].clone();
    let seq = VideoSequence::new(vec![f; 5]).unwrap();
    let path = dir.join("input.raw");
    write_raw_sequence(&path, &seq, ChromaLayout::LumaOnly).unwrap();
    path
}

fn moving_input(dir: &PathBuf, seed: u64) -> PathBuf {
    let seq = scene_sequence(&SceneParams::natural(48, 48, 3, seed)).unwrap();
    let path = dir.join("input.raw");
    write_raw_sequence(&path, &seq, ChromaLayout::LumaOnly).unwrap();
    path
}

fn write_cfg(dir: &PathBuf, cfg: &PipelineConfig) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, cfg.to_toml_string()).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process not signaled")
}

#[test]
fn help_succeeds() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["table1", "rd-sweep", "encode", "decode", "si-only"] {
        assert!(text.contains(sub), "missing {sub} in help");
    }
}

#[test]
fn encode_then_decode_round_trips() {
    let dir = tmp_dir("roundtrip");
    let input = static_input(&dir, 41);
    let cfg = PipelineConfig {
        input: Some(input.clone()),
        width: 48,
        height: 48,
        frames: 2,
        measure_time: false,
        output_dir: dir.join("out"),
        ..PipelineConfig::default()
    };
    let cfg_path = write_cfg(&dir, &cfg);

    let enc = bin().args(["encode", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(code(&enc), 0, "stderr: {}", String::from_utf8_lossy(&enc.stderr));
    assert!(cfg.out_path(PARITY_FILE).exists());

    let dec = bin().args(["decode", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(code(&dec), 0, "stderr: {}", String::from_utf8_lossy(&dec.stderr));
    // Static scene: side information is exact, so decoding is lossless.
    assert_eq!(fs::read(cfg.out_path(DECODED_FILE)).unwrap(), fs::read(&input).unwrap());
}

#[test]
fn config_file_overrides_flags() {
    let dir = tmp_dir("precedence");
    let input = static_input(&dir, 42);
    let cfg = PipelineConfig {
        input: Some(input),
        width: 48,
        height: 48,
        frames: 1,
        quality: 3,
        output_dir: dir.join("out"),
        ..PipelineConfig::default()
    };
    let cfg_path = write_cfg(&dir, &cfg);
    let out = bin()
        .args(["encode", "--quality", "5", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let copy = fs::read_to_string(cfg.out_path(CONFIG_FILE)).unwrap();
    assert!(copy.contains("quality = 3"), "config copy:\n{copy}");
}

#[test]
fn sweep_writes_the_table() {
    let dir = tmp_dir("sweep");
    let input = static_input(&dir, 43);
    let cfg = PipelineConfig {
        input: Some(input),
        width: 48,
        height: 48,
        frames: 1,
        measure_time: false,
        output_dir: dir.join("out"),
        ..PipelineConfig::default()
    };
    let cfg_path = write_cfg(&dir, &cfg);
    let out = bin()
        .args(["rd-sweep", "--knobs", "2,4", "--metrics", "sad", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(cfg.out_path(SWEEP_FILE)).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn si_only_runs_are_reproducible() {
    let dir = tmp_dir("si_repro");
    let input = moving_input(&dir, 44);
    let mut reports = Vec::new();
    for sub in ["a", "b"] {
        let cfg = PipelineConfig {
            input: Some(input.clone()),
            width: 48,
            height: 48,
            frames: 1,
            output_dir: dir.join(sub),
            ..PipelineConfig::default()
        };
        let cfg_path = dir.join(format!("{sub}.toml"));
        fs::write(&cfg_path, cfg.to_toml_string()).unwrap();
        let out = bin().args(["si-only", "--config"]).arg(&cfg_path).output().unwrap();
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
        reports.push(fs::read(cfg.out_path(SI_REPORT_FILE)).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn config_errors_exit_2() {
    let out = bin().args(["encode", "--quality", "9"]).output().unwrap();
    assert_eq!(code(&out), 2);
    let dir = tmp_dir("badfile");
    fs::write(dir.join("bad.toml"), "not_a_key = true").unwrap();
    let out = bin().args(["encode", "--config"]).arg(dir.join("bad.toml")).output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn io_errors_exit_3() {
    let dir = tmp_dir("noparity");
    let input = static_input(&dir, 45);
    let cfg = PipelineConfig {
        input: Some(input),
        width: 48,
        height: 48,
        frames: 1,
        output_dir: dir.join("out"),
        ..PipelineConfig::default()
    };
    let cfg_path = write_cfg(&dir, &cfg);
    let out = bin().args(["decode", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unverified_decode_exits_4() {
    let dir = tmp_dir("unverified");
    let input = moving_input(&dir, 46);
    let cfg = PipelineConfig {
        input: Some(input),
        width: 48,
        height: 48,
        frames: 1,
        mode: PipelineMode::PixelEntropy,
        // One chunk cannot carry the noisy low planes, so some stay
        // unverified by construction.
        max_requests: 1,
        output_dir: dir.join("out"),
        ..PipelineConfig::default()
    };
    let cfg_path = write_cfg(&dir, &cfg);
    let enc = bin().args(["encode", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(code(&enc), 0);
    let dec = bin().args(["decode", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(code(&dec), 4, "stderr: {}", String::from_utf8_lossy(&dec.stderr));
}
