use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use imgauth_core::detect::detect_forgery_with_spectra;
use imgauth_core::detect::write_spectrum_csv;
use imgauth_core::nn::TrainRecord;
use imgauth_core::pgm::{read_pgm_file, write_pgm_file};
use imgauth_core::pipeline::bench::{hidden_sweep, split_gallery, subject_sweep, write_hidden_csv, write_subject_csv};
use imgauth_core::pipeline::corpus::{desk_gallery, noise_image};
use imgauth_core::pipeline::forge::{calibrate, write_strength_csv, SynthSpec};
use imgauth_core::pipeline::gallery::write_gallery;
use imgauth_core::pipeline::recognize::{forged_members, recognize, train_model, Recognition};
use imgauth_core::pipeline::{verdict_line, Gallery, PipelineConfig, RecognitionModel};
use imgauth_core::{crop, CropRect, GrayImage};

use crate::{Cli, Command, Generate};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FORGED: u8 = 3;
pub const EXIT_REJECTED: u8 = 4;

/// Seed used by `generate` without `--seed`.
const DEFAULT_SEED: u64 = 1000;

pub fn run(cli: Cli) -> Result<u8> {
    let mut cfg = PipelineConfig::load_or_default(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.train.seed = seed;
    }
    match cli.command {
        Command::Verify { image, csv } => verify(&image, &cfg, csv.as_deref()),
        Command::Synth {
            image,
            out,
            scale,
            rotate_deg,
            skew,
            kernel,
        } => synth(
            &image,
            &out,
            SynthSpec {
                scale,
                rotate_deg,
                skew,
                kernel,
            },
        ),
        Command::Calibrate {
            originals_dir,
            config_out,
            csv,
        } => run_calibrate(&originals_dir, &config_out, csv.as_deref(), cfg),
        Command::Train {
            gallery_dir,
            model_out,
            csv,
        } => {
            let csv = csv.unwrap_or_else(|| model_out.with_extension("train.csv"));
            run_train(&gallery_dir, &model_out, &csv, &cfg)
        }
        Command::Recognize {
            image,
            models,
            crop,
            matcher,
        } => {
            if let Some(m) = matcher {
                cfg.matcher = m;
            }
            run_recognize(&image, &models, crop, &cfg)
        }
        Command::Bench {
            gallery_dir,
            csv_out,
            sweep,
            epochs,
            test_gallery,
            matcher,
        } => {
            if let Some(m) = matcher {
                cfg.matcher = m;
            }
            run_bench(
                &gallery_dir,
                &csv_out,
                sweep.hidden_sweep,
                epochs,
                test_gallery.as_deref(),
                &cfg,
            )
        }
        Command::Generate(g) => generate(g, cli.seed),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn verify(path: &Path, cfg: &PipelineConfig, csv: Option<&Path>) -> Result<u8> {
    let img = read_pgm_file(path)?;
    let (verdict, spectra) = detect_forgery_with_spectra(&img, &cfg.detector)?;
    if let Some(csv) = csv {
        let mut w = create(csv)?;
        write_spectrum_csv(&mut w, &spectra)?;
        w.flush()?;
    }
    println!("{}", verdict_line(&verdict));
    Ok(if verdict.is_forged() { EXIT_FORGED } else { EXIT_OK })
}

fn synth(input: &Path, out: &Path, spec: SynthSpec) -> Result<u8> {
    let img = read_pgm_file(input)?;
    let (warped, params) = spec.apply(&img)?;
    write_pgm_file(out, &warped)?;
    println!("{params}");
    Ok(EXIT_OK)
}

fn pgm_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn run_calibrate(dir: &Path, config_out: &Path, csv: Option<&Path>, mut cfg: PipelineConfig) -> Result<u8> {
    let originals = pgm_files(dir)?
        .into_iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, read_pgm_file(&p)?))
        })
        .collect::<Result<Vec<(String, GrayImage)>>>()?;
    let cal = calibrate(&originals, &cfg.detector)?;
    if let Some(csv) = csv {
        let mut w = create(csv)?;
        write_strength_csv(&mut w, &cal.samples)?;
        w.flush()?;
    }
    cfg.detector.threshold = cal.threshold;
    cfg.save(config_out)?;
    println!(
        "tau={} balanced_accuracy={} originals={} forgeries={}",
        cal.threshold,
        cal.balanced_accuracy,
        originals.len(),
        cal.samples.len() - originals.len()
    );
    Ok(EXIT_OK)
}

fn write_history(path: &Path, history: &[TrainRecord]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "epoch,mse,seconds")?;
    for r in history {
        writeln!(w, "{},{},{}", r.epoch, r.mse, r.wall_time)?;
    }
    w.flush()?;
    Ok(())
}

fn run_train(dir: &Path, model_out: &Path, csv: &Path, cfg: &PipelineConfig) -> Result<u8> {
    let gallery = Gallery::open(dir)?;
    let images = gallery.load_images()?;
    let forged = forged_members(&images, &cfg.detector)?;
    if !forged.is_empty() {
        for (path, v) in &forged {
            println!("{} {}", path.display(), verdict_line(v));
        }
        eprintln!("error: {} gallery image(s) failed verification", forged.len());
        return Ok(EXIT_FORGED);
    }
    let trained = train_model(&images, cfg)?;
    trained.model.save(model_out)?;
    write_history(csv, &trained.outcome.history)?;
    let epochs = trained.outcome.history.len();
    if !trained.outcome.converged {
        eprintln!(
            "warning: error goal {} not reached after {epochs} epochs",
            cfg.train.error_goal
        );
    }
    println!(
        "trained subjects={} features={} epochs={epochs} final_mse={}",
        trained.model.labels.len(),
        trained.model.network.hidden.inputs,
        trained.outcome.final_mse()
    );
    Ok(EXIT_OK)
}

fn run_recognize(
    path: &Path,
    model_paths: &[PathBuf],
    crop_rect: Option<CropRect>,
    cfg: &PipelineConfig,
) -> Result<u8> {
    let mut img = read_pgm_file(path)?;
    if let Some(r) = crop_rect {
        img = crop(&img, r)?;
    }
    let models = model_paths
        .iter()
        .map(|p| RecognitionModel::load(p).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let describe = |c: &imgauth_core::pipeline::recognize::Candidate| {
        let mut s = format!("confidence={}", c.confidence);
        if let Some(d) = c.distance {
            s.push_str(&format!(" distance={d}"));
        }
        if model_paths.len() > 1 {
            s.push_str(&format!(" model={}", model_paths[c.model_index].display()));
        }
        s
    };
    match recognize(&img, &models, cfg)? {
        Recognition::Forged(v) => {
            println!("{}", verdict_line(&v));
            Ok(EXIT_FORGED)
        }
        Recognition::Match(c) => {
            println!("MATCH {} {}", c.label, describe(&c));
            Ok(EXIT_OK)
        }
        Recognition::Rejected(c) => {
            println!("REJECTED {} best={}", describe(&c), c.label);
            Ok(EXIT_REJECTED)
        }
    }
}

fn run_bench(
    dir: &Path,
    csv_out: &Path,
    hidden: bool,
    epochs: usize,
    test_dir: Option<&Path>,
    cfg: &PipelineConfig,
) -> Result<u8> {
    let images = Gallery::open(dir)?.load_images()?;
    let forged = forged_members(&images, &cfg.detector)?;
    if let Some((path, _)) = forged.first() {
        bail!("gallery image {} failed verification", path.display());
    }
    let mut w = create(csv_out)?;
    if hidden {
        let rows = hidden_sweep(&images, cfg, epochs)?;
        write_hidden_csv(&mut w, &rows)?;
        println!("hidden sweep rows={}", rows.len());
    } else {
        let (train, test) = match test_dir {
            Some(t) => (images, Gallery::open(t)?.load_images()?),
            None => split_gallery(&images)?,
        };
        let rows = subject_sweep(&train, &test, cfg, cfg.matcher)?;
        write_subject_csv(&mut w, &rows)?;
        println!("subject sweep rows={}", rows.len());
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn generate(g: Generate, seed: Option<u64>) -> Result<u8> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    match g {
        Generate::Noise { out_dir, count, side } => {
            std::fs::create_dir_all(&out_dir)?;
            for i in 0..count {
                let img = noise_image(side, seed + i as u64)?;
                write_pgm_file(out_dir.join(format!("noise_{i:03}.pgm")), &img)?;
            }
            println!("wrote {count} images to {}", out_dir.display());
        }
        Generate::Desk {
            out_dir,
            subjects,
            train,
            test,
            side,
        } => {
            if subjects == 0 || train == 0 || test == 0 {
                bail!("subjects, train and test counts must be positive");
            }
            let (tr, te) = desk_gallery(subjects, train, test, side, seed)?;
            write_gallery(&out_dir.join("train"), &tr)?;
            write_gallery(&out_dir.join("test"), &te)?;
            println!(
                "wrote {} train and {} test images to {}",
                tr.len(),
                te.len(),
                out_dir.display()
            );
        }
    }
    Ok(EXIT_OK)
}
