//! Fréchet distance between image sets under a fixed feature map.

use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::{column_means, covariance, symmetric_eigen, Matrix, Normalization};
use crate::math;
use crate::pca::PcaModel;

pub const DEFAULT_PCA_FEATURES: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMap {
    RawPixels,
    Pca(PcaModel),
}

impl FeatureMap {
    pub fn apply(&self, images: &Matrix) -> Result<Matrix> {
        match self {
            FeatureMap::RawPixels => Ok(images.clone()),
            FeatureMap::Pca(model) => model.transform(images),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetScore {
    pub value: f64,
    pub n_real: usize,
    pub n_gen: usize,
}

/// Symmetric PSD square root, negative eigenvalues clamped to zero.
fn psd_sqrt(a: &Matrix) -> Result<Matrix> {
    let eig = symmetric_eigen(a)?;
    let n = a.rows();
    let mut out = Matrix::zeros(n, n);
    for (j, &lambda) in eig.values.iter().enumerate() {
        let s = math::sqrt(lambda.max(0.0));
        if s == 0.0 {
            continue;
        }
        let v = eig.vectors.column(j);
        out.add_outer(&v, &v, s)?;
    }
    Ok(out)
}

/// `tr((Σ_a Σ_b)^{1/2})`, evaluated as `tr((A^{1/2} B A^{1/2})^{1/2})` so
/// every decomposition is of a symmetric matrix.
fn trace_sqrt_product(a: &Matrix, b: &Matrix) -> Result<f64> {
    let ra = psd_sqrt(a)?;
    let m = ra.matmul(b)?.matmul(&ra)?;
    let eig = symmetric_eigen(&m)?;
    Ok(eig.values.iter().map(|&v| math::sqrt(v.max(0.0))).sum())
}

/// `‖μ_r − μ_g‖² + tr(Σ_r + Σ_g − 2 (Σ_r Σ_g)^{1/2})` with unbiased
/// covariances; rows are samples.
pub fn frechet_distance(real: &Matrix, generated: &Matrix) -> Result<FrechetScore> {
    check_len("feature dimension", real.cols(), generated.cols())?;
    for m in [real, generated] {
        if m.rows() < 2 {
            return Err(Error::NotEnoughSamples { need: 2, got: m.rows() });
        }
    }
    let (mu_r, mu_g) = (column_means(real), column_means(generated));
    let sigma_r = covariance(real, &mu_r, Normalization::Unbiased)?;
    let sigma_g = covariance(generated, &mu_g, Normalization::Unbiased)?;
    let mean_term: f64 = mu_r.iter().zip(&mu_g).map(|(a, b)| (a - b) * (a - b)).sum();
    let cross = trace_sqrt_product(&sigma_r, &sigma_g)?;
    let value = mean_term + sigma_r.trace() + sigma_g.trace() - 2.0 * cross;
    Ok(FrechetScore {
        value: value.max(0.0),
        n_real: real.rows(),
        n_gen: generated.rows(),
    })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    sab / math::sqrt(saa * sbb)
}

/// For each candidate, the highest Pearson correlation with any reference
/// image; averaged over candidates. Constant images correlate as 0.
pub fn mean_nearest_neighbor_correlation(candidates: &Matrix, reference: &Matrix) -> Result<f64> {
    check_len("image dimension", reference.cols(), candidates.cols())?;
    if candidates.rows() == 0 || reference.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let best: Vec<f64> = (0..candidates.rows())
        .map(|i| {
            (0..reference.rows())
                .map(|j| pearson(candidates.row(i), reference.row(j)))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(best.iter().sum::<f64>() / best.len() as f64)
}
