//! MNIST IDX reader. Header fields are big-endian `u32`s.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use qgan_core::data::ImageDataset;
use qgan_core::linalg::Matrix;

pub const IMAGES_MAGIC: u32 = 2051;
pub const LABELS_MAGIC: u32 = 2049;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IdxError {
    #[error("bad magic: expected {expected}, found {found}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated IDX file: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32, IdxError> {
    let b = bytes.get(at..at + 4).ok_or(IdxError::Truncated {
        need: at + 4,
        have: bytes.len(),
    })?;
    Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<(), IdxError> {
    let found = be_u32(bytes, 0)?;
    if found != expected {
        return Err(IdxError::BadMagic { expected, found });
    }
    Ok(())
}

pub fn parse_images(bytes: &[u8]) -> Result<IdxImages, IdxError> {
    check_magic(bytes, IMAGES_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let need = 16 + count * rows * cols;
    if bytes.len() < need {
        return Err(IdxError::Truncated {
            need,
            have: bytes.len(),
        });
    }
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: bytes[16..need].to_vec(),
    })
}

pub fn parse_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    check_magic(bytes, LABELS_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let need = 8 + count;
    if bytes.len() < need {
        return Err(IdxError::Truncated {
            need,
            have: bytes.len(),
        });
    }
    Ok(bytes[8..need].to_vec())
}

/// Pixels are scaled by 1/255.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> anyhow::Result<ImageDataset> {
    let raw = fs::read(images_path).with_context(|| format!("reading {}", images_path.display()))?;
    let images = parse_images(&raw).with_context(|| format!("parsing {}", images_path.display()))?;
    let raw = fs::read(labels_path).with_context(|| format!("reading {}", labels_path.display()))?;
    let labels = parse_labels(&raw).with_context(|| format!("parsing {}", labels_path.display()))?;
    if images.count != labels.len() {
        return Err(IdxError::CountMismatch {
            images: images.count,
            labels: labels.len(),
        }
        .into());
    }
    let data = images.pixels.iter().map(|&b| f64::from(b) / 255.0).collect();
    let matrix = Matrix::from_vec(images.count, images.rows * images.cols, data)?;
    Ok(ImageDataset::new(matrix, labels, images.rows, images.cols)?)
}

const FILE_PAIRS: [(&str, &str); 3] = [
    ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    ("images-idx3-ubyte", "labels-idx1-ubyte"),
    ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
];

/// First image/label file pair present in `dir`.
pub fn locate(dir: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
    for (img, lbl) in FILE_PAIRS {
        let (i, l) = (dir.join(img), dir.join(lbl));
        if i.is_file() && l.is_file() {
            return Ok((i, l));
        }
    }
    anyhow::bail!(
        "no IDX image/label pair in {} (expected e.g. {} and {})",
        dir.display(),
        FILE_PAIRS[0].0,
        FILE_PAIRS[0].1
    )
}

pub fn load_dir(dir: &Path) -> anyhow::Result<ImageDataset> {
    let (i, l) = locate(dir)?;
    load_idx(&i, &l)
}
