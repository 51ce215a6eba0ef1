//! In-memory image datasets, whole-row patch layouts and block pooling.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

/// Grayscale images flattened row-major, pixels in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageDataset {
    images: Matrix,
    labels: Vec<u8>,
    rows: usize,
    cols: usize,
}

impl ImageDataset {
    pub fn new(images: Matrix, labels: Vec<u8>, rows: usize, cols: usize) -> Result<Self> {
        check_len("image width", rows * cols, images.cols())?;
        check_len("label count", images.rows(), labels.len())?;
        if images.as_slice().iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Layout("pixel values must lie in [0, 1]".into()));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 9) {
            return Err(Error::Layout(format!("label {bad} outside 0..=9")));
        }
        Ok(ImageDataset {
            images,
            labels,
            rows,
            cols,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn image_dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn images(&self) -> &Matrix {
        &self.images
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn image(&self, i: usize) -> &[f64] {
        self.images.row(i)
    }

    /// Images at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.image_dim());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.image(i));
            labels.push(self.labels[i]);
        }
        ImageDataset {
            images: Matrix::from_vec(indices.len(), self.image_dim(), data).expect("consistent widths"),
            labels,
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn take(&self, n: usize) -> Self {
        let idx: Vec<usize> = (0..n.min(self.len())).collect();
        self.select(&idx)
    }

    pub fn filter_class(&self, digit: u8) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] == digit).collect();
        self.select(&idx)
    }
}

/// Horizontal strips of whole rows, one strip per generator step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchLayout {
    pub strips: usize,
    pub patch_dim: usize,
    pub rows: usize,
    pub cols: usize,
}

impl PatchLayout {
    pub fn new(rows: usize, cols: usize, strips: usize) -> Result<Self> {
        if strips == 0 || !rows.is_multiple_of(strips) {
            return Err(Error::Layout(format!("{rows} rows cannot be split into {strips} whole-row strips")));
        }
        Ok(PatchLayout {
            strips,
            patch_dim: rows / strips * cols,
            rows,
            cols,
        })
    }

    pub fn rows_per_strip(&self) -> usize {
        self.rows / self.strips
    }
}

/// `n × steps × patch_dim` patch tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchTensor {
    n: usize,
    steps: usize,
    patch_dim: usize,
    data: Vec<f64>,
}

impl PatchTensor {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn patch_dim(&self) -> usize {
        self.patch_dim
    }

    pub fn patch(&self, image: usize, step: usize) -> &[f64] {
        let start = (image * self.steps + step) * self.patch_dim;
        &self.data[start..start + self.patch_dim]
    }

    /// All patches of one image laid end to end, i.e. the original image.
    pub fn image(&self, image: usize) -> &[f64] {
        let w = self.steps * self.patch_dim;
        &self.data[image * w..(image + 1) * w]
    }
}

pub fn extract_patches(dataset: &ImageDataset, layout: &PatchLayout) -> Result<PatchTensor> {
    if layout.rows != dataset.rows || layout.cols != dataset.cols {
        return Err(Error::Layout(format!(
            "layout is {}x{}, images are {}x{}",
            layout.rows, layout.cols, dataset.rows, dataset.cols
        )));
    }
    chunk_patches(dataset, layout.patch_dim)
}

/// Splits every image into consecutive row-major chunks of `patch_dim`
/// pixels. Whole-row strips are the special case `patch_dim = k·cols`.
pub fn chunk_patches(dataset: &ImageDataset, patch_dim: usize) -> Result<PatchTensor> {
    let dim = dataset.image_dim();
    if patch_dim == 0 || !dim.is_multiple_of(patch_dim) {
        return Err(Error::Layout(format!("{dim} pixels do not split into {patch_dim}-pixel patches")));
    }
    Ok(PatchTensor {
        n: dataset.len(),
        steps: dim / patch_dim,
        patch_dim,
        data: dataset.images.as_slice().to_vec(),
    })
}

/// Concatenates patches back into flat images.
pub fn reassemble(patches: &PatchTensor) -> Matrix {
    Matrix::from_vec(patches.n, patches.steps * patches.patch_dim, patches.data.clone()).expect("consistent widths")
}

/// Block-mean pooling by `factor` in both directions.
pub fn downscale(dataset: &ImageDataset, factor: usize) -> Result<ImageDataset> {
    if factor == 0 || !dataset.rows.is_multiple_of(factor) || !dataset.cols.is_multiple_of(factor) {
        return Err(Error::Layout(format!(
            "{}x{} images are not divisible by factor {factor}",
            dataset.rows, dataset.cols
        )));
    }
    let (rows, cols) = (dataset.rows / factor, dataset.cols / factor);
    let area = (factor * factor) as f64;
    let mut out = Matrix::zeros(dataset.len(), rows * cols);
    for i in 0..dataset.len() {
        let src = dataset.image(i);
        let dst = out.row_mut(i);
        for r in 0..rows {
            for c in 0..cols {
                let mut sum = 0.0;
                for dr in 0..factor {
                    let base = (r * factor + dr) * dataset.cols + c * factor;
                    sum += src[base..base + factor].iter().sum::<f64>();
                }
                dst[r * cols + c] = (sum / area).clamp(0.0, 1.0);
            }
        }
    }
    ImageDataset::new(out, dataset.labels.clone(), rows, cols)
}

/// Centered crop to `rows × cols`.
pub fn crop_center(dataset: &ImageDataset, rows: usize, cols: usize) -> Result<ImageDataset> {
    if rows > dataset.rows || cols > dataset.cols || rows == 0 || cols == 0 {
        return Err(Error::Layout(format!(
            "cannot crop {}x{} images to {rows}x{cols}",
            dataset.rows, dataset.cols
        )));
    }
    let (r0, c0) = ((dataset.rows - rows) / 2, (dataset.cols - cols) / 2);
    let mut out = Matrix::zeros(dataset.len(), rows * cols);
    for i in 0..dataset.len() {
        let src = dataset.image(i);
        let dst = out.row_mut(i);
        for r in 0..rows {
            let s = (r0 + r) * dataset.cols + c0;
            dst[r * cols..(r + 1) * cols].copy_from_slice(&src[s..s + cols]);
        }
    }
    ImageDataset::new(out, dataset.labels.clone(), rows, cols)
}

/// Desk-scale profile: 28×28 → 24×24 center crop → 8×8 by 3×3 block means.
pub fn toy_profile(dataset: &ImageDataset) -> Result<ImageDataset> {
    downscale(&crop_center(dataset, 24, 24)?, 3)
}

pub const TOY_STRIPS: usize = 4;
pub const TOY_QUBITS: usize = 3;
