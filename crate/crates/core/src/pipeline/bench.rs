//! Timing and accuracy sweeps over a gallery.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::nn::{init_network, macs_per_epoch, train, TrainConfig};
use crate::pipeline::config::{Matcher, PipelineConfig};
use crate::pipeline::forge::par_map;
use crate::pipeline::gallery::GalleryImage;
use crate::pipeline::recognize::{fit_extractor, index_labels, rank1_accuracy, train_model};
use crate::preprocess::preprocess_with;

pub const HIDDEN_SWEEP: [usize; 5] = [30, 60, 90, 180, 360];

#[derive(Clone, Debug, PartialEq)]
pub struct HiddenRow {
    pub hidden: usize,
    pub epochs: usize,
    pub macs: u64,
    pub seconds_per_epoch: f64,
    pub final_mse: f64,
}

/// Trains once per hidden width for exactly `epochs` epochs on the same features.
pub fn hidden_sweep(images: &[GalleryImage], cfg: &PipelineConfig, epochs: usize) -> Result<Vec<HiddenRow>> {
    cfg.validate()?;
    if epochs == 0 {
        return Err(Error::param("hidden sweep needs at least one epoch"));
    }
    let (labels, targets) = index_labels(images);
    if labels.len() < 2 {
        return Err(Error::Gallery("hidden sweep needs at least two subjects".into()));
    }
    let pre = cfg.preprocess();
    let vectors = par_map(images, |g| preprocess_with(&g.image, &pre))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let extractor = fit_extractor(&vectors, cfg)?;
    let data = vectors
        .iter()
        .zip(&targets)
        .map(|(v, &t)| Ok((extractor.extract(v)?.values, t)))
        .collect::<Result<Vec<_>>>()?;
    let d = data[0].0.len();
    let train_cfg = TrainConfig {
        max_epochs: epochs,
        error_goal: f64::MIN_POSITIVE,
        ..cfg.train.clone()
    };
    HIDDEN_SWEEP
        .iter()
        .map(|&h| {
            let sizes = [d, h, labels.len()];
            let net = init_network(sizes, cfg.train.seed)?;
            let start = Instant::now();
            let out = train(net, &data, &train_cfg)?;
            let secs = start.elapsed().as_secs_f64();
            let ran = out.history.len();
            debug_assert_eq!(out.macs, ran as u64 * macs_per_epoch(sizes, data.len()));
            Ok(HiddenRow {
                hidden: h,
                epochs: ran,
                macs: out.macs,
                seconds_per_epoch: secs / ran as f64,
                final_mse: out.final_mse(),
            })
        })
        .collect()
}

/// Splits each subject's images in manifest order, holding out the last third.
pub fn split_gallery(images: &[GalleryImage]) -> Result<(Vec<GalleryImage>, Vec<GalleryImage>)> {
    let (labels, idx) = index_labels(images);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (l, label) in labels.iter().enumerate() {
        let own: Vec<&GalleryImage> = images
            .iter()
            .zip(&idx)
            .filter(|(_, &i)| i == l)
            .map(|(g, _)| g)
            .collect();
        if own.len() < 2 {
            return Err(Error::Gallery(format!(
                "subject {label} needs at least two images to split"
            )));
        }
        let held = (own.len() / 3).max(1);
        let cut = own.len() - held;
        train.extend(own[..cut].iter().map(|g| (*g).clone()));
        test.extend(own[cut..].iter().map(|g| (*g).clone()));
    }
    Ok((train, test))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubjectRow {
    pub subjects: usize,
    pub train_images: usize,
    pub test_images: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Trains on the first `C` subjects for `C = 2, 4, …` and scores rank-1 accuracy.
pub fn subject_sweep(
    train_set: &[GalleryImage],
    test_set: &[GalleryImage],
    cfg: &PipelineConfig,
    matcher: Matcher,
) -> Result<Vec<SubjectRow>> {
    let (labels, _) = index_labels(train_set);
    if labels.len() < 2 {
        return Err(Error::Gallery("subject sweep needs at least two subjects".into()));
    }
    let mut rows = Vec::new();
    for c in (2..=labels.len()).step_by(2) {
        let keep = &labels[..c];
        let tr: Vec<GalleryImage> = train_set.iter().filter(|g| keep.contains(&g.label)).cloned().collect();
        let te: Vec<GalleryImage> = test_set.iter().filter(|g| keep.contains(&g.label)).cloned().collect();
        if te.is_empty() {
            return Err(Error::Gallery(format!("no test images for the first {c} subjects")));
        }
        let model = train_model(&tr, cfg)?.model;
        let (correct, total) = rank1_accuracy(&model, &te, matcher)?;
        rows.push(SubjectRow {
            subjects: c,
            train_images: tr.len(),
            test_images: total,
            correct,
            accuracy: correct as f64 / total as f64,
        });
    }
    Ok(rows)
}

pub const HIDDEN_CSV_HEADER: &str = "hidden,epochs,macs,macs_per_epoch,seconds_per_epoch,final_mse";
pub const SUBJECT_CSV_HEADER: &str = "subjects,train_images,test_images,correct,accuracy";

pub fn write_hidden_csv<W: std::io::Write>(mut out: W, rows: &[HiddenRow]) -> std::io::Result<()> {
    writeln!(out, "{HIDDEN_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.hidden,
            r.epochs,
            r.macs,
            r.macs / r.epochs as u64,
            r.seconds_per_epoch,
            r.final_mse
        )?;
    }
    Ok(())
}

pub fn write_subject_csv<W: std::io::Write>(mut out: W, rows: &[SubjectRow]) -> std::io::Result<()> {
    writeln!(out, "{SUBJECT_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.subjects, r.train_images, r.test_images, r.correct, r.accuracy
        )?;
    }
    Ok(())
}
