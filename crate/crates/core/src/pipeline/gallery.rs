//! Labeled image collections described by a `manifest.tsv` file.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::pgm::{read_pgm_file, write_pgm_file};

pub const MANIFEST_NAME: &str = "manifest.tsv";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalleryEntry {
    pub label: String,
    /// Path relative to the gallery root.
    pub path: PathBuf,
}

#[derive(Clone, Debug)]
pub struct Gallery {
    pub root: PathBuf,
    pub entries: Vec<GalleryEntry>,
    /// Hex SHA-256 of the manifest bytes.
    pub checksum: String,
}

/// A decoded gallery image.
#[derive(Clone, Debug)]
pub struct GalleryImage {
    pub label: String,
    pub path: PathBuf,
    pub image: GrayImage,
}

pub fn parse_manifest(text: &str) -> Result<Vec<GalleryEntry>> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (label, path) = line
            .split_once('\t')
            .ok_or_else(|| Error::Gallery(format!("manifest line {}: expected label<TAB>path", i + 1)))?;
        if label.is_empty() || path.is_empty() || path.contains('\t') {
            return Err(Error::Gallery(format!("manifest line {}: empty label or path", i + 1)));
        }
        let path = PathBuf::from(path);
        if path.is_absolute() {
            return Err(Error::Gallery(format!(
                "manifest line {}: path must be relative",
                i + 1
            )));
        }
        entries.push(GalleryEntry {
            label: label.to_string(),
            path,
        });
    }
    if entries.is_empty() {
        return Err(Error::Gallery("manifest lists no images".into()));
    }
    Ok(entries)
}

impl Gallery {
    /// Reads `root/manifest.tsv` and checks that every listed file decodes.
    pub fn open(root: &Path) -> Result<Gallery> {
        let manifest = root.join(MANIFEST_NAME);
        let bytes = std::fs::read(&manifest).map_err(|e| Error::io(&manifest, e))?;
        let text =
            std::str::from_utf8(&bytes).map_err(|_| Error::Gallery(format!("{} is not UTF-8", manifest.display())))?;
        let entries = parse_manifest(text)?;
        let gallery = Gallery {
            root: root.to_path_buf(),
            entries,
            checksum: hex::encode(Sha256::digest(&bytes)),
        };
        gallery.load_images()?;
        Ok(gallery)
    }

    /// Subject labels in order of first appearance.
    pub fn labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for e in &self.entries {
            if !labels.contains(&e.label) {
                labels.push(e.label.clone());
            }
        }
        labels
    }

    pub fn load_images(&self) -> Result<Vec<GalleryImage>> {
        self.entries
            .iter()
            .map(|e| {
                let path = self.root.join(&e.path);
                let image = read_pgm_file(&path).map_err(|err| Error::Gallery(format!("{}: {err}", path.display())))?;
                Ok(GalleryImage {
                    label: e.label.clone(),
                    path,
                    image,
                })
            })
            .collect()
    }
}

/// Writes each image as `<label>_<index>.pgm` under `root` plus the manifest.
pub fn write_gallery(root: &Path, images: &[(String, GrayImage)]) -> Result<Gallery> {
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let mut manifest = String::new();
    let mut counts: Vec<(String, usize)> = Vec::new();
    for (label, img) in images {
        if label.is_empty() || label.contains(['\t', '\n', '/']) {
            return Err(Error::Gallery(format!(
                "label {label:?} cannot be written to a manifest"
            )));
        }
        let idx = match counts.iter_mut().find(|(l, _)| l == label) {
            Some((_, n)) => {
                *n += 1;
                *n
            }
            None => {
                counts.push((label.clone(), 1));
                1
            }
        };
        let name = format!("{label}_{idx:02}.pgm");
        write_pgm_file(root.join(&name), img)?;
        manifest.push_str(&format!("{label}\t{name}\n"));
    }
    let path = root.join(MANIFEST_NAME);
    std::fs::write(&path, &manifest).map_err(|e| Error::io(&path, e))?;
    Gallery::open(root)
}
