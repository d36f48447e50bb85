//! `imgauth`: verify images for resampling traces and recognize authentic ones.
//!
//! Exit codes: 0 success or match, 1 error, 3 forged, 4 rejected.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imgauth_core::pipeline::Matcher;
use imgauth_core::synth::InterpolationKernel;
use imgauth_core::CropRect;

#[derive(Parser, Debug)]
#[command(
    name = "imgauth",
    version,
    about = "Image authentication and face recognition pipeline"
)]
pub struct Cli {
    /// Pipeline configuration (JSON). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Overrides the training/generation seed from the configuration.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check an image for resampling traces (exit 0 authentic, 3 forged).
    Verify {
        image: PathBuf,
        /// Write every angle's spectrum as CSV (angle,frequency,magnitude).
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Write a rescaled, sheared and/or rotated copy of an image.
    Synth {
        image: PathBuf,
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long = "rotate-deg", default_value_t = 0.0, allow_negative_numbers = true)]
        rotate_deg: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        skew: f64,
        #[arg(long, default_value = "cubic")]
        kernel: InterpolationKernel,
    },
    /// Choose the detector threshold from a directory of original PGM images.
    Calibrate {
        originals_dir: PathBuf,
        config_out: PathBuf,
        /// Write every strength as CSV (source,kind,scale,kernel,strength).
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Train a recognition model on a gallery (exit 3 if any member is forged).
    Train {
        gallery_dir: PathBuf,
        model_out: PathBuf,
        /// Training curve CSV (epoch,mse,seconds); defaults to the model path with `.train.csv`.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Verify an image, then match it against one or more models.
    Recognize {
        image: PathBuf,
        /// Model file; repeat to search several galleries.
        #[arg(long = "model", required = true, value_name = "PATH")]
        models: Vec<PathBuf>,
        /// Crop `x0,y0,w,h` applied before verification.
        #[arg(long)]
        crop: Option<CropRect>,
        /// Overrides the configured matcher.
        #[arg(long, value_parser = parse_matcher)]
        matcher: Option<Matcher>,
    },
    /// Timing and accuracy sweeps.
    ///
    /// --hidden-sweep columns: hidden,epochs,macs,macs_per_epoch,seconds_per_epoch,final_mse.
    /// --subject-sweep columns: subjects,train_images,test_images,correct,accuracy.
    Bench {
        gallery_dir: PathBuf,
        csv_out: PathBuf,
        #[command(flatten)]
        sweep: SweepArg,
        /// Epochs per hidden width.
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        /// Separate probe gallery; otherwise the last third of each subject is held out.
        #[arg(long, value_name = "DIR")]
        test_gallery: Option<PathBuf>,
        #[arg(long, value_parser = parse_matcher)]
        matcher: Option<Matcher>,
    },
    /// Write synthetic corpora.
    #[command(subcommand)]
    Generate(Generate),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct SweepArg {
    #[arg(long)]
    pub hidden_sweep: bool,
    #[arg(long)]
    pub subject_sweep: bool,
}

#[derive(Subcommand, Debug)]
pub enum Generate {
    /// Uniform white-noise originals `noise_000.pgm`, … (seed, seed+1, …).
    Noise {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 128)]
        side: usize,
    },
    /// Synthetic subjects written as `train/` and `test/` galleries.
    Desk {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        subjects: usize,
        #[arg(long, default_value_t = 4)]
        train: usize,
        #[arg(long, default_value_t = 2)]
        test: usize,
        #[arg(long, default_value_t = 128)]
        side: usize,
    },
}

fn parse_matcher(s: &str) -> Result<Matcher, String> {
    s.parse().map_err(|e: imgauth_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
