//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! its measurement and runtime; any failure makes the target exit non-zero.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use imgauth_core::detect::{autocovariance, detect_forgery, project, theoretical_derivative_variance, NUM_ANGLES};
use imgauth_core::field::Field;
use imgauth_core::nn::{compute_gradients, forward, init_network, mse, predict, train, Network, TrainConfig};
use imgauth_core::pgm::{load_pgm, save_pgm, write_pgm_file};
use imgauth_core::pipeline::corpus::noise_image;
use imgauth_core::pipeline::forge::scale_forgery;
use imgauth_core::pipeline::PipelineConfig;
use imgauth_core::synth::InterpolationKernel;
use imgauth_core::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn(&mut Ctx) -> Result<String, String>;

struct Ctx {
    dir: tempfile::TempDir,
    fixtures: PathBuf,
    first_calibration: Option<(Vec<u8>, Vec<u8>)>,
    first_training: Option<TrainArtifacts>,
    first_xor: Option<(Vec<u64>, Network)>,
}

#[derive(PartialEq)]
struct TrainArtifacts {
    model: Vec<u8>,
    curve: Vec<String>,
    answers: Vec<String>,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self) -> PathBuf {
        self.fixtures.join("imgauth.json")
    }
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn imgauth<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_imgauth"))
        .args(args)
        .output()
        .expect("spawn imgauth");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn expect_ok(r: &Run, what: &str) -> Result<(), String> {
    if r.code == 0 {
        Ok(())
    } else {
        Err(format!("{what} exited {}: {}{}", r.code, r.stdout, r.stderr))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn quantized(img: &GrayImage) -> GrayImage {
    load_pgm(&save_pgm(img)).expect("own PGM output decodes")
}

fn criterion_1(_: &mut Ctx) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for kernel in InterpolationKernel::ALL {
        for n in [1, 2] {
            for step in [1.0, 2.5] {
                for _ in 0..100 {
                    let x: f64 = rng.random_range(-10.0..10.0);
                    let v = theoretical_derivative_variance(kernel, n, x, step);
                    for m in [1.0, 7.0] {
                        let d = (v - theoretical_derivative_variance(kernel, n, x + m * step, step)).abs();
                        worst = worst.max(d);
                        ensure(d < 1e-9, || {
                            format!("{kernel} n={n} step={step} x={x} m={m}: diff {d:e}")
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!("1200 points, max |v(x) - v(x + m*step)| = {worst:e}"))
}

fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

fn criterion_2(_: &mut Ctx) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for (w, h) in [(16usize, 16usize), (33, 17)] {
        let field = Field {
            width: w,
            height: h,
            values: (0..w * h).map(|_| rng.random::<f64>()).collect(),
        };
        let (cx, cy) = (((w - 1) / 2) as isize, ((h - 1) / 2) as isize);
        let total: f64 = field.values.iter().sum();

        let p0 = project(&field, 0);
        ensure(p0.values.len() == w, || {
            format!("{w}x{h}: theta=0 has {} bins", p0.values.len())
        })?;
        for col in 0..w {
            let brute: f64 = (0..h).map(|r| field.values[r * w + col]).sum();
            let idx = (col as isize - cx + p0.origin as isize) as usize;
            ensure(close_rel(p0.values[idx], brute, 1e-6), || {
                format!("{w}x{h} column {col}: {} vs {brute}", p0.values[idx])
            })?;
        }
        let p90 = project(&field, 90);
        ensure(p90.values.len() == h, || {
            format!("{w}x{h}: theta=90 has {} bins", p90.values.len())
        })?;
        for row in 0..h {
            let brute: f64 = field.values[row * w..(row + 1) * w].iter().sum();
            let idx = (row as isize - cy + p90.origin as isize) as usize;
            ensure(close_rel(p90.values[idx], brute, 1e-6), || {
                format!("{w}x{h} row {row}: {} vs {brute}", p90.values[idx])
            })?;
        }
        for angle in 0..NUM_ANGLES as u32 {
            let t = project(&field, angle).total();
            ensure(close_rel(t, total, 1e-6), || {
                format!("{w}x{h} angle {angle}: mass {t} vs {total}")
            })?;
        }
    }
    Ok("16x16 and 33x17: axis projections and mass at 180 angles match brute force".into())
}

fn criterion_3(_: &mut Ctx) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = rng.random_range(2..=256usize);
        let offset: f64 = rng.random_range(-3.0..3.0);
        let v: Vec<f64> = (0..n).map(|_| offset + rng.random_range(-5.0..5.0)).collect();
        let max_lag = rng.random_range(0..n);
        let got = autocovariance(&v, max_lag).map_err(|e| format!("case {case}: {e}"))?;
        let mean = v.iter().sum::<f64>() / n as f64;
        for k in 0..=max_lag {
            let mut acc = 0.0;
            for i in 0..n - k {
                acc += (v[i] - mean) * (v[i + k] - mean);
            }
            let direct = acc / n as f64;
            let d = (got.values[k] - direct).abs();
            worst = worst.max(d);
            ensure(d < 1e-10, || {
                format!("case {case} lag {k}: {} vs {direct}", got.values[k])
            })?;
        }
    }
    Ok(format!("200 vectors, max abs deviation {worst:e}"))
}

fn calibrate_once(ctx: &Ctx, tag: &str) -> Result<(PathBuf, Vec<u8>, Vec<u8>), String> {
    let originals = ctx.path(&format!("cal_{tag}"));
    expect_ok(
        &imgauth([
            "generate".as_ref(),
            "noise".as_ref(),
            originals.as_os_str(),
            "--count".as_ref(),
            "20".as_ref(),
            "--seed".as_ref(),
            "1000".as_ref(),
        ]),
        "generate noise",
    )?;
    let cfg = ctx.path(&format!("calibrated_{tag}.json"));
    let csv = ctx.path(&format!("strengths_{tag}.csv"));
    let r = imgauth([
        "calibrate".as_ref(),
        originals.as_os_str(),
        cfg.as_os_str(),
        "--csv".as_ref(),
        csv.as_os_str(),
    ]);
    expect_ok(&r, "calibrate")?;
    let cfg_bytes = std::fs::read(&cfg).map_err(|e| e.to_string())?;
    let csv_bytes = std::fs::read(&csv).map_err(|e| e.to_string())?;
    Ok((cfg, cfg_bytes, csv_bytes))
}

/// Verdict line fields `key=value` after the leading word.
fn fields(line: &str) -> BTreeMap<String, String> {
    line.split_whitespace()
        .filter_map(|t| t.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn criterion_4(ctx: &mut Ctx) -> Result<String, String> {
    let (cfg_path, cfg_bytes, csv_bytes) = calibrate_once(ctx, "a")?;
    ctx.first_calibration = Some((cfg_bytes, csv_bytes));
    let cfg = PipelineConfig::load(&cfg_path).map_err(|e| e.to_string())?;
    let tau = cfg.detector.threshold;

    // Held-out seeds 5000..5049 are disjoint from the calibration seeds 1000..1019.
    let (mut tn, mut tp) = (0, 0);
    for seed in 5000..5050u64 {
        let original = quantized(&noise_image(128, seed).map_err(|e| e.to_string())?);
        let forged = quantized(&scale_forgery(&original, 1.2, InterpolationKernel::Linear).map_err(|e| e.to_string())?);
        if !detect_forgery(&original, &cfg.detector)
            .map_err(|e| e.to_string())?
            .is_forged()
        {
            tn += 1;
        }
        if detect_forgery(&forged, &cfg.detector)
            .map_err(|e| e.to_string())?
            .is_forged()
        {
            tp += 1;
        }
    }
    let ba = 0.5 * (tn as f64 / 50.0 + tp as f64 / 50.0);
    ensure(ba >= 0.9, || {
        format!("balanced accuracy {ba} (TN {tn}/50, TP {tp}/50, tau {tau})")
    })?;

    // The spectrum dump of a forgery shows a dominant non-DC peak at the reported angle.
    let orig_path = ctx.path("heldout_original.pgm");
    let forged_path = ctx.path("heldout_forged.pgm");
    write_pgm_file(&orig_path, &noise_image(128, 5000).unwrap()).map_err(|e| e.to_string())?;
    let s = imgauth([
        "synth".as_ref(),
        orig_path.as_os_str(),
        forged_path.as_os_str(),
        "--scale".as_ref(),
        "1.2".as_ref(),
        "--kernel".as_ref(),
        "linear".as_ref(),
    ]);
    expect_ok(&s, "synth")?;
    let spectrum = ctx.path("spectrum.csv");
    let v = imgauth([
        "--config".as_ref(),
        cfg_path.as_os_str(),
        "verify".as_ref(),
        forged_path.as_os_str(),
        "--csv".as_ref(),
        spectrum.as_os_str(),
    ]);
    ensure(v.code == 3 && v.stdout.starts_with("FORGED"), || {
        format!("verify on forgery: exit {} {}", v.code, v.stdout)
    })?;
    let f = fields(&v.stdout);
    let angle: u32 = f["angle"].parse().map_err(|_| "bad angle".to_string())?;
    let freq: f64 = f["freq"].parse().map_err(|_| "bad freq".to_string())?;
    let text = std::fs::read_to_string(&spectrum).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    ensure(lines.next() == Some("angle,frequency,magnitude"), || {
        "spectrum CSV header".into()
    })?;
    let rows: Vec<(f64, f64)> = lines
        .filter_map(|l| {
            let mut it = l.split(',');
            let a: u32 = it.next()?.parse().ok()?;
            (a == angle).then(|| (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap()))
        })
        .collect();
    let non_dc = &rows[cfg.detector.dc_exclusion_bins..];
    let (peak_f, peak_m) = non_dc
        .iter()
        .cloned()
        .fold((0.0, f64::NEG_INFINITY), |b, r| if r.1 > b.1 { r } else { b });
    let mut mags: Vec<f64> = non_dc.iter().map(|r| r.1).collect();
    mags.sort_by(f64::total_cmp);
    let median = if mags.len() % 2 == 1 {
        mags[mags.len() / 2]
    } else {
        0.5 * (mags[mags.len() / 2 - 1] + mags[mags.len() / 2])
    };
    ensure(peak_f == freq && peak_f > 0.0, || {
        format!("CSV peak at {peak_f}, verdict says {freq}")
    })?;
    ensure(peak_m / median > tau, || {
        format!("CSV peak/median {} not above tau {tau}", peak_m / median)
    })?;
    let o = imgauth([
        "--config".as_ref(),
        cfg_path.as_os_str(),
        "verify".as_ref(),
        orig_path.as_os_str(),
    ]);
    ensure(o.code == 0 && o.stdout.starts_with("AUTHENTIC"), || {
        format!("verify on original: exit {} {}", o.code, o.stdout)
    })?;

    Ok(format!(
        "tau {tau:.3}; held-out balanced accuracy {ba:.3} (TN {tn}/50, TP {tp}/50); forgery spectrum peak {:.1}x median at freq {freq}, angle {angle}",
        peak_m / median
    ))
}

fn nudge(n: &mut Network, block: usize, i: usize, delta: f64) {
    let p = match block {
        0 => &mut n.hidden.weights[i],
        1 => &mut n.hidden.biases[i],
        2 => &mut n.output.weights[i],
        _ => &mut n.output.biases[i],
    };
    *p += delta;
}

fn finite_difference_check(seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = init_network([8, 5, 3], seed).map_err(|e| e.to_string())?;
    for b in net.hidden.biases.iter_mut().chain(net.output.biases.iter_mut()) {
        *b = rng.random_range(-1.0..1.0);
    }
    let x: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let t: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
    let g = compute_gradients(&net, &x, &t).map_err(|e| e.to_string())?;
    let loss = |n: &Network| mse(&forward(n, &x).unwrap().output, &t);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let analytic = [&g.hidden.weights, &g.hidden.biases, &g.output.weights, &g.output.biases];
    for (block, grads) in analytic.iter().enumerate() {
        for (i, &ga) in grads.iter().enumerate() {
            let mut plus = net.clone();
            let mut minus = net.clone();
            nudge(&mut plus, block, i, h);
            nudge(&mut minus, block, i, -h);
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let abs = (ga - fd).abs();
            let scale = ga.abs().max(fd.abs());
            if scale < 1e-6 {
                ensure(abs < 1e-8, || {
                    format!("seed {seed} block {block} index {i}: near-zero backprop {ga} vs fd {fd}")
                })?;
                continue;
            }
            let rel = abs / scale;
            worst = worst.max(rel);
            ensure(rel < 1e-5, || {
                format!("seed {seed} block {block} index {i}: backprop {ga} vs fd {fd}")
            })?;
        }
    }
    Ok(worst)
}

fn criterion_5(_: &mut Ctx) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        worst = worst.max(finite_difference_check(seed)?);
    }
    Ok(format!(
        "100 [8,5,3] networks, 6300 partials, worst relative error {worst:e}"
    ))
}

struct XorRun {
    mse_bits: Vec<u64>,
    network: Network,
    final_mse: f64,
    epochs: usize,
    /// (predicted, expected) per example.
    predictions: Vec<(usize, usize)>,
}

fn xor_run() -> Result<XorRun, String> {
    let data = vec![
        (vec![0.0, 0.0], 0),
        (vec![0.0, 1.0], 1),
        (vec![1.0, 0.0], 1),
        (vec![1.0, 1.0], 0),
    ];
    let cfg = TrainConfig::default();
    let net = init_network([2, 4, 1], cfg.seed).map_err(|e| e.to_string())?;
    let out = train(net, &data, &cfg).map_err(|e| e.to_string())?;
    let predictions = data
        .iter()
        .map(|(x, l)| (predict(&out.network, x, 0.5).unwrap().label, *l))
        .collect();
    let bits = out.history.iter().map(|r| r.mse.to_bits()).collect();
    Ok(XorRun {
        mse_bits: bits,
        network: out.network.clone(),
        final_mse: out.final_mse(),
        epochs: out.history.len(),
        predictions,
    })
}

fn criterion_6(ctx: &mut Ctx) -> Result<String, String> {
    let XorRun {
        mse_bits: bits,
        network: net,
        final_mse,
        epochs,
        predictions: preds,
    } = xor_run()?;
    ensure(final_mse < 0.01, || {
        format!("final MSE {final_mse} after {epochs} epochs")
    })?;
    ensure(epochs <= 5000, || format!("{epochs} epochs"))?;
    ensure(preds.iter().all(|(p, l)| p == l), || format!("predictions {preds:?}"))?;
    ctx.first_xor = Some((bits, net));
    Ok(format!(
        "final MSE {final_mse:.2e} after {epochs} epochs; 4/4 predictions correct"
    ))
}

fn manifest(dir: &Path) -> Vec<(String, String)> {
    std::fs::read_to_string(dir.join("manifest.tsv"))
        .expect("manifest")
        .lines()
        .filter_map(|l| l.split_once('\t').map(|(a, b)| (a.to_string(), b.to_string())))
        .collect()
}

/// Label named by a `MATCH <label> …` or `REJECTED … best=<label>` line.
fn answered_label(stdout: &str) -> Option<String> {
    let line = stdout.lines().next()?;
    if let Some(rest) = line.strip_prefix("MATCH ") {
        return rest.split_whitespace().next().map(str::to_string);
    }
    if line.starts_with("REJECTED") {
        return fields(line).get("best").cloned();
    }
    None
}

fn train_gallery(ctx: &Ctx, gallery: &Path, model: &Path) -> Result<Run, String> {
    let r = imgauth([
        "--config".as_ref(),
        ctx.config().as_os_str(),
        "train".as_ref(),
        gallery.as_os_str(),
        model.as_os_str(),
    ]);
    expect_ok(&r, "train")?;
    Ok(r)
}

/// Rank-1 hits per matcher, the raw answers, and the probe count.
type ProbeScores = (BTreeMap<&'static str, usize>, Vec<String>, usize);

fn score_probes(ctx: &Ctx, probes: &Path, model: &Path) -> Result<ProbeScores, String> {
    let entries = manifest(probes);
    let mut hits = BTreeMap::new();
    let mut answers = Vec::new();
    for matcher in ["network", "euclidean"] {
        let mut ok = 0;
        for (label, file) in &entries {
            let r = imgauth([
                "--config".as_ref(),
                ctx.config().as_os_str(),
                "recognize".as_ref(),
                probes.join(file).as_os_str(),
                "--model".as_ref(),
                model.as_os_str(),
                "--matcher".as_ref(),
                matcher.as_ref(),
            ]);
            ensure(r.code == 0 || r.code == 4, || {
                format!("recognize {file}: exit {} {}{}", r.code, r.stdout, r.stderr)
            })?;
            if answered_label(&r.stdout).as_deref() == Some(label.as_str()) {
                ok += 1;
            }
            answers.push(format!("{matcher} {file} {}", r.stdout.trim()));
        }
        hits.insert(matcher, ok);
    }
    Ok((hits, answers, entries.len()))
}

fn training_pass(ctx: &Ctx, tag: &str) -> Result<(TrainArtifacts, BTreeMap<&'static str, usize>, usize), String> {
    let desk = ctx.fixtures.join("desk");
    let model = ctx.path(&format!("desk_{tag}.json"));
    train_gallery(ctx, &desk.join("train"), &model)?;
    let curve = std::fs::read_to_string(model.with_extension("train.csv")).map_err(|e| e.to_string())?;
    // The seconds column is wall-clock time; epoch and MSE must repeat exactly.
    let curve: Vec<String> = curve
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect();
    let (hits, answers, total) = score_probes(ctx, &desk.join("test"), &model)?;
    let model = std::fs::read(&model).map_err(|e| e.to_string())?;
    Ok((TrainArtifacts { model, curve, answers }, hits, total))
}

fn criterion_7(ctx: &mut Ctx) -> Result<String, String> {
    let desk = ctx.fixtures.join("desk");

    // The committed gallery is exactly what the generator produces.
    let regen = ctx.path("desk_regen");
    expect_ok(
        &imgauth([
            "--seed".as_ref(),
            "7".as_ref(),
            "generate".as_ref(),
            "desk".as_ref(),
            regen.as_os_str(),
        ]),
        "generate desk",
    )?;
    for split in ["train", "test"] {
        for (_, file) in manifest(&desk.join(split)) {
            let a = std::fs::read(desk.join(split).join(&file)).map_err(|e| e.to_string())?;
            let b = std::fs::read(regen.join(split).join(&file)).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("committed {split}/{file} differs from regenerated"))?;
        }
    }

    let (artifacts, hits, total) = training_pass(ctx, "a")?;
    for (m, ok) in &hits {
        let acc = *ok as f64 / total as f64;
        ensure(acc >= 0.9, || format!("{m} rank-1 {ok}/{total}"))?;
    }
    ctx.first_training = Some(artifacts);

    // Two-subject reduction: the first two subjects of each split.
    let mut reduced_hits = BTreeMap::new();
    let reduced = ctx.path("desk_two");
    for split in ["train", "test"] {
        let dst = reduced.join(split);
        std::fs::create_dir_all(&dst).map_err(|e| e.to_string())?;
        let mut lines = String::new();
        for (label, file) in manifest(&desk.join(split)) {
            if label == "s01" || label == "s02" {
                std::fs::copy(desk.join(split).join(&file), dst.join(&file)).map_err(|e| e.to_string())?;
                lines.push_str(&format!("{label}\t{file}\n"));
            }
        }
        std::fs::write(dst.join("manifest.tsv"), lines).map_err(|e| e.to_string())?;
    }
    let model = ctx.path("desk_two.json");
    train_gallery(ctx, &reduced.join("train"), &model)?;
    let (hits2, _, total2) = score_probes(ctx, &reduced.join("test"), &model)?;
    for (m, ok) in &hits2 {
        ensure(*ok == total2, || format!("two-subject {m} rank-1 {ok}/{total2}"))?;
        reduced_hits.insert(*m, *ok);
    }
    Ok(format!(
        "10 subjects: network {}/{total}, euclidean {}/{total}; 2 subjects: network {}/{total2}, euclidean {}/{total2}",
        hits["network"], hits["euclidean"], reduced_hits["network"], reduced_hits["euclidean"]
    ))
}

fn criterion_8(ctx: &mut Ctx) -> Result<String, String> {
    let train_dir = ctx.fixtures.join("desk").join("train");
    let csv = ctx.path("hidden.csv");
    let r = imgauth([
        "--config".as_ref(),
        ctx.config().as_os_str(),
        "bench".as_ref(),
        train_dir.as_os_str(),
        csv.as_os_str(),
        "--hidden-sweep".as_ref(),
    ]);
    expect_ok(&r, "bench --hidden-sweep")?;
    let text = std::fs::read_to_string(&csv).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    ensure(
        lines.next() == Some("hidden,epochs,macs,macs_per_epoch,seconds_per_epoch,final_mse"),
        || "hidden CSV header".into(),
    )?;
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    ensure(rows.len() == 5, || format!("{} rows", rows.len()))?;
    // 40 training images, 39 PCA features, 10 subjects.
    let (samples, d, c) = (40u64, 39u64, 10u64);
    let mut prev = 0u64;
    for row in &rows {
        let h: u64 = row[0].parse().unwrap();
        let epochs: u64 = row[1].parse().unwrap();
        let macs: u64 = row[2].parse().unwrap();
        let expected = epochs * samples * (2 * d * h + 3 * h * c);
        ensure(macs == expected, || format!("H={h}: {macs} MACs, expected {expected}"))?;
        ensure(macs > prev, || format!("H={h}: MACs {macs} not above {prev}"))?;
        prev = macs;
    }
    let spe = |i: usize| rows[i][4].parse::<f64>().unwrap();
    ensure(spe(4) > spe(0), || {
        format!("per-epoch time H=360 {} <= H=30 {}", spe(4), spe(0))
    })?;
    Ok(format!(
        "MACs strictly increasing and exact; per-epoch seconds H=30 {:.2e}, H=360 {:.2e}",
        spe(0),
        spe(4)
    ))
}

fn criterion_9(ctx: &mut Ctx) -> Result<String, String> {
    let model = ctx.path("desk_a.json");
    ensure(model.exists(), || "criterion 7 model missing".into())?;
    let probe = ctx.fixtures.join("desk").join("test").join("s03_01.pgm");
    let forged = ctx.path("s03_forged.pgm");
    expect_ok(
        &imgauth([
            "synth".as_ref(),
            probe.as_os_str(),
            forged.as_os_str(),
            "--scale".as_ref(),
            "1.2".as_ref(),
            "--kernel".as_ref(),
            "linear".as_ref(),
        ]),
        "synth",
    )?;
    let mut notes = Vec::new();
    for matcher in ["network", "euclidean"] {
        let run = |img: &Path| {
            imgauth([
                "--config".as_ref(),
                ctx.config().as_os_str(),
                "recognize".as_ref(),
                img.as_os_str(),
                "--model".as_ref(),
                model.as_os_str(),
                "--matcher".as_ref(),
                matcher.as_ref(),
            ])
        };
        let f = run(&forged);
        ensure(f.code == 3, || {
            format!("{matcher}: forged probe exit {} {}", f.code, f.stdout)
        })?;
        ensure(!f.stdout.contains("MATCH") && !f.stdout.contains("REJECTED"), || {
            format!("{matcher}: forged probe printed {}", f.stdout)
        })?;
        let o = run(&probe);
        ensure(o.code == 0 || o.code == 4, || {
            format!("{matcher}: original probe exit {} {}", o.code, o.stdout)
        })?;
        notes.push(format!("{matcher}: forged exit 3, original exit {}", o.code));
    }
    Ok(notes.join("; "))
}

fn criterion_10(ctx: &mut Ctx) -> Result<String, String> {
    let (_, cfg_b, csv_b) = calibrate_once(ctx, "b")?;
    let (cfg_a, csv_a) = ctx
        .first_calibration
        .as_ref()
        .ok_or("criterion 4 did not record its outputs")?;
    ensure(*cfg_a == cfg_b && *csv_a == csv_b, || {
        "calibration config or strength CSV differs between runs".into()
    })?;

    let XorRun {
        mse_bits: bits,
        network: net,
        ..
    } = xor_run()?;
    let (bits_a, net_a) = ctx.first_xor.as_ref().ok_or("criterion 6 did not record its outputs")?;
    ensure(*bits_a == bits && *net_a == net, || {
        "XOR training differs between runs".into()
    })?;

    let (second, _, _) = training_pass(ctx, "b")?;
    let first = ctx
        .first_training
        .as_ref()
        .ok_or("criterion 7 did not record its outputs")?;
    ensure(first.model == second.model, || "model files differ between runs".into())?;
    ensure(first.curve == second.curve, || {
        "training curves (epoch,mse) differ between runs".into()
    })?;
    ensure(first.answers == second.answers, || {
        "recognition output differs between runs".into()
    })?;
    Ok(format!(
        "calibration config + strength CSV, XOR MSE history ({} epochs), desk model file ({} bytes), training curve and {} recognition lines identical",
        bits.len(),
        second.model.len(),
        second.answers.len()
    ))
}

fn main() {
    let mut ctx = Ctx {
        dir: tempfile::tempdir().expect("tempdir"),
        fixtures: Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
        first_calibration: None,
        first_training: None,
        first_xor: None,
    };
    let criteria: [(u32, &str, u64, Check); 10] = [
        (1, "derivative variance periodicity", 1, criterion_1),
        (2, "Radon oracle", 5, criterion_2),
        (3, "autocovariance oracle", 5, criterion_3),
        (4, "detector separation", 300, criterion_4),
        (5, "gradient correctness", 30, criterion_5),
        (6, "XOR convergence", 10, criterion_6),
        (7, "desk-scale recognition", 120, criterion_7),
        (8, "hidden-width cost trend", 180, criterion_8),
        (9, "verify-before-recognize gating", 60, criterion_9),
        (10, "determinism", 600, criterion_10),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in criteria {
        let start = Instant::now();
        let result = match catch_unwind(AssertUnwindSafe(|| check(&mut ctx))) {
            Ok(r) => r,
            Err(_) => Err("panicked".to_string()),
        };
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= Duration::from_secs(limit) {
                Ok(detail)
            } else {
                Err(format!(
                    "{detail}; runtime {:.1}s exceeds {limit}s",
                    elapsed.as_secs_f64()
                ))
            }
        });
        match result {
            Ok(detail) => println!(
                "criterion {n:>2} PASS  {name}: {detail} [{:.2}s, limit {limit}s]",
                elapsed.as_secs_f64()
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {n:>2} FAIL  {name}: {detail} [{:.2}s, limit {limit}s]",
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
