use wzbench::entropy::{table1_report, Table1Options};
use wzbench::fixtures::{scene_sequence, SceneParams};
use wzbench::metrics::{vif_window, Decomposer, MetricKind, Region, VifParams};
use wzbench::motion::{block_match, SearchParams};

fn diag(w: usize, h: usize, seed: u64, triple: usize) {
    let seq = scene_sequence(&SceneParams::benchmark(w, h, 2 * triple + 3, seed)).unwrap();
    let (prev, truth, next) = (
        seq.frame(2 * triple),
        seq.frame(2 * triple + 1),
        seq.frame(2 * triple + 2),
    );
    let fields: Vec<_> = [
        MetricKind::Sad,
        MetricKind::CwSsim,
        MetricKind::Vif,
        MetricKind::Ssim,
    ]
    .iter()
    .map(|&m| block_match(prev, next, &SearchParams::standard(m)).unwrap())
    .collect();
    let vp = VifParams::default();
    let d = Decomposer::new(vp.levels, vp.orientations);
    let pp = d.decompose_raw(Region::from_frame(prev)).unwrap();
    let pn = d.decompose_raw(Region::from_frame(next)).unwrap();
    let block_mse = |bx: usize, by: usize, dxy: (i32, i32)| -> f64 {
        let mut sum = 0.0;
        for v in 0..16usize {
            for u in 0..16usize {
                let x = (bx + u) as isize;
                let y = (by + v) as isize;
                let a = prev.at_clamped(x - (dxy.0 / 2) as isize, y - (dxy.1 / 2) as isize);
                let b = next.at_clamped(x + (dxy.0 / 2) as isize, y + (dxy.1 / 2) as isize);
                let si = (a as u16 + b as u16 + 1) / 2;
                let d = si as f64 - truth.at(bx + u, by + v) as f64;
                sum += d * d;
            }
        }
        sum / 256.0
    };
    if std::env::var("TRACE_BLOCK").is_ok() {
        let tb: usize = std::env::var("TRACE_BLOCK").unwrap().parse().unwrap();
        let (bx, by) = fields[0].grid.position(tb);
        println!(
            "search score for block {tb}: {:.6} at ({},{})",
            fields[2].scores[tb], fields[2].vectors[tb].dx, fields[2].vectors[tb].dy
        );
        for &(dx, dy) in &[(fields[2].vectors[tb].dx, fields[2].vectors[tb].dy), (fields[0].vectors[tb].dx, fields[0].vectors[tb].dy), (3, 0), (0, 0)] {
            let cx = (bx as i64 + dx as i64) as usize;
            let cy = (by as i64 + dy as i64) as usize;
            let v = vif_window(&pp, &pn, (bx, by), (cx, cy), 16, 16, &vp).value;
            println!("  recomputed vif at ({dx},{dy}) window ({cx},{cy}): {v:.6}");
        }
        return;
    }
    println!("block | sad mv       cw mv        vif mv       ssim mv    | vif@vif vif@sad vif@00 | simse sad/cw/vif/ssim");
    for i in 0..fields[0].grid.block_count() {
        let (bx, by) = fields[0].grid.position(i);
        let mv: Vec<_> = fields.iter().map(|f| f.vectors[i]).collect();
        let vs = |dx: i32, dy: i32| -> f64 {
            let cx = (bx as i64 + dx as i64).clamp(0, w as i64 - 16) as usize;
            let cy = (by as i64 + dy as i64).clamp(0, h as i64 - 16) as usize;
            vif_window(&pp, &pn, (bx, by), (cx, cy), 16, 16, &vp).value
        };
        println!(
            "{:2} ({:2},{:2}) | ({:3},{:3}) ({:3},{:3}) ({:3},{:3}) ({:3},{:3}) | {:7.4} {:7.4} {:7.4} | {:6.1} {:6.1} {:6.1} {:6.1}",
            i, bx / 16, by / 16,
            mv[0].dx, mv[0].dy, mv[1].dx, mv[1].dy, mv[2].dx, mv[2].dy, mv[3].dx, mv[3].dy,
            vs(mv[2].dx, mv[2].dy), vs(mv[0].dx, mv[0].dy), vs(0, 0),
            block_mse(bx, by, (mv[0].dx, mv[0].dy)),
            block_mse(bx, by, (mv[1].dx, mv[1].dy)),
            block_mse(bx, by, (mv[2].dx, mv[2].dy)),
            block_mse(bx, by, (mv[3].dx, mv[3].dy)),
        );
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let profile = args.get(1).map_or("bench", |s| s.as_str()).to_string();
    if profile == "diag" {
        let w: usize = args.get(2).map_or(96, |s| s.parse().unwrap());
        let h: usize = args.get(3).map_or(96, |s| s.parse().unwrap());
        let seed: u64 = args.get(4).map_or(7, |s| s.parse().unwrap());
        let triple: usize = args.get(5).map_or(0, |s| s.parse().unwrap());
        diag(w, h, seed, triple);
        return;
    }
    let w: usize = args.get(2).map_or(96, |s| s.parse().unwrap());
    let h: usize = args.get(3).map_or(96, |s| s.parse().unwrap());
    let frames: usize = args.get(4).map_or(4, |s| s.parse().unwrap());
    let seed: u64 = args.get(5).map_or(7, |s| s.parse().unwrap());

    let mut params = match profile.as_str() {
        "natural" => SceneParams::natural(w, h, 2 * frames + 1, seed),
        "bench" => SceneParams::benchmark(w, h, 2 * frames + 1, seed),
        other => panic!("unknown profile {other}"),
    };
    let envf = |k: &str| std::env::var(k).ok().and_then(|v| v.parse::<f64>().ok());
    if let Some(v) = envf("WZ_NOISE") {
        params.noise_sigma = v;
    }
    if let Some(v) = envf("WZ_DRIFT") {
        params.background_velocity = (v, v);
    }
    if let Some(v) = envf("WZ_GAIN") {
        params.gain_amplitude = v;
    }
    if let Some(v) = envf("WZ_BRIGHT") {
        params.brightness_amplitude = v;
    }
    if envf("WZ_OBJSUB").is_some() {
        let subs = [(-1.25, 0.75), (1.25, -0.75), (1.75, 0.25)];
        for (o, v) in params.objects.iter_mut().zip(subs) {
            o.velocity = v;
        }
    }
    if let Some(v) = envf("WZ_BFREQ") {
        params.brightness_freq = 1.0 / v;
    }
    let seq = scene_sequence(&params).unwrap();
    let mut opts = Table1Options {
        frames,
        measure_time: true,
        vif_search_range: Some(8),
        ..Table1Options::default()
    };
    if let Some(v) = envf("WZ_CWK") {
        opts.metric_params.cwssim.k = v;
    }
    if let Some(v) = envf("WZ_VIFSN") {
        opts.metric_params.vif.sigma_n2 = v;
    }
    if let Some(v) = envf("WZ_VIFSR") {
        opts.vif_search_range = if v <= 0.0 { None } else { Some(v as usize) };
    }
    let t0 = std::time::Instant::now();
    let rows = table1_report(&seq, &MetricKind::ALL, &opts).unwrap();
    println!(
        "{} {}x{} frames={} seed={}  ({:.1}s total)",
        profile,
        w,
        h,
        frames,
        seed,
        t0.elapsed().as_secs_f64()
    );
    println!(
        "{:<7} {:>9} {:>7} {:>7} {:>7} | {:>6} {:>6} {:>6} {:>6} | {:>7} {:>7}",
        "metric", "mse", "ssim", "vif", "perr", "msb1", "msb2", "msb3", "msb4", "time", "h_cond"
    );
    for r in &rows {
        println!(
            "{:<7} {:>9.2} {:>7.4} {:>7.4} {:>7.4} | {:>6.3} {:>6.3} {:>6.3} {:>6.3} | {:>7.2} {:>7.4}",
            r.metric.name(),
            r.mse,
            r.ssim,
            r.vif,
            r.avg_plane_err,
            r.four_msb[0],
            r.four_msb[1],
            r.four_msb[2],
            r.four_msb[3],
            r.time_sec,
            r.h_cond
        );
    }

    let by = |k: MetricKind| rows.iter().find(|r| r.metric == k).unwrap();
    let (sad, mse, ssim, cw, vif) = (
        by(MetricKind::Sad),
        by(MetricKind::Mse),
        by(MetricKind::Ssim),
        by(MetricKind::CwSsim),
        by(MetricKind::Vif),
    );
    let a4 = vif.h_cond < cw.h_cond
        && cw.h_cond < ssim.h_cond
        && ssim.h_cond < mse.h_cond.min(sad.h_cond);
    let a5 = vif.ssim > cw.ssim
        && cw.ssim > ssim.ssim
        && ssim.ssim > mse.ssim.max(sad.ssim);
    let a6 = vif.avg_plane_err < sad.avg_plane_err.min(mse.avg_plane_err)
        && rows.iter().all(|r| {
            r.four_msb[0] <= r.four_msb[1]
                && r.four_msb[1] <= r.four_msb[2]
                && r.four_msb[2] <= r.four_msb[3]
        });
    let a9 = sad.time_sec < ssim.time_sec
        && mse.time_sec < ssim.time_sec
        && ssim.time_sec < cw.time_sec
        && cw.time_sec < vif.time_sec;
    println!("A4 h-order {}  A5 ssim-order {}  A6 perr/monotone {}  A9 time-order {}", a4, a5, a6, a9);
}

#[allow(dead_code)]
fn trace() {}
