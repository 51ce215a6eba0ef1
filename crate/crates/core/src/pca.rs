//! Principal component analysis on standardized features.
//!
//! Features are centred and divided by their population standard deviation
//! (constant features keep scale 1), and the population covariance of the
//! result is diagonalised. Scores are `Z = X_std · V_k`; the inverse maps
//! `Z · V_kᵀ` back through the standardization.

use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::linalg::{column_means, covariance, symmetric_eigen, Matrix, Normalization};
use crate::math;
use crate::rng::{self, standard_normal};

/// Scales at or below this are treated as zero variance.
pub const SCALE_GUARD: f64 = 1e-12;

pub const PCA_STREAM: &str = "pca";

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    scale: Vec<f64>,
    /// `feature_dim × k`, orthonormal columns.
    components: Matrix,
    /// Full covariance spectrum, descending.
    spectrum: Vec<f64>,
    score_mean: Vec<f64>,
    score_std: Vec<f64>,
}

impl PcaModel {
    pub fn fit(samples: &Matrix, k: usize) -> Result<Self> {
        let (n, dim) = (samples.rows(), samples.cols());
        if n < 2 {
            return Err(Error::NotEnoughSamples { need: 2, got: n });
        }
        if k == 0 || k > dim {
            return Err(Error::ComponentCount { k, dim });
        }
        if !math::all_finite(samples.as_slice()) {
            return Err(Error::NonFinite("PCA samples"));
        }
        let mean = column_means(samples);
        let mut scale = vec_zeros(dim);
        for r in 0..n {
            for ((s, &x), &m) in scale.iter_mut().zip(samples.row(r)).zip(&mean) {
                *s += (x - m) * (x - m);
            }
        }
        for s in scale.iter_mut() {
            let sd = math::sqrt(*s / n as f64);
            *s = if sd <= SCALE_GUARD { 1.0 } else { sd };
        }
        let std = standardize(samples, &mean, &scale);
        let cov = covariance(&std, &vec_zeros(dim), Normalization::Population)?;
        let eig = symmetric_eigen(&cov)?;
        let mut components = Matrix::zeros(dim, k);
        for i in 0..dim {
            for j in 0..k {
                components[(i, j)] = eig.vectors[(i, j)];
            }
        }
        let mut model = PcaModel {
            mean,
            scale,
            components,
            spectrum: eig.values,
            score_mean: Vec::new(),
            score_std: Vec::new(),
        };
        let scores = std.matmul(&model.components)?;
        model.score_mean = column_means(&scores);
        model.score_std = (0..k)
            .map(|j| {
                let m = model.score_mean[j];
                let var = (0..n).map(|r| (scores[(r, j)] - m) * (scores[(r, j)] - m)).sum::<f64>() / n as f64;
                math::sqrt(var)
            })
            .collect();
        Ok(model)
    }

    pub fn k(&self) -> usize {
        self.components.cols()
    }

    pub fn feature_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn components(&self) -> &Matrix {
        &self.components
    }

    /// The retained eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum[..self.k()]
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Sum of the eigenvalues beyond the first `k`.
    pub fn discarded_variance(&self) -> f64 {
        self.spectrum[self.k()..].iter().sum()
    }

    pub fn score_mean(&self) -> &[f64] {
        &self.score_mean
    }

    pub fn score_std(&self) -> &[f64] {
        &self.score_std
    }

    pub fn standardize(&self, x: &Matrix) -> Result<Matrix> {
        check_len("PCA features", self.feature_dim(), x.cols())?;
        Ok(standardize(x, &self.mean, &self.scale))
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        self.standardize(x)?.matmul(&self.components)
    }

    pub fn inverse_transform(&self, z: &Matrix) -> Result<Matrix> {
        check_len("PCA scores", self.k(), z.cols())?;
        let mut x = z.matmul(&self.components.transpose())?;
        for r in 0..x.rows() {
            for ((v, &s), &m) in x.row_mut(r).iter_mut().zip(&self.scale).zip(&self.mean) {
                *v = *v * s + m;
            }
        }
        Ok(x)
    }

    /// `n` images from scores drawn independently per component from a
    /// normal with the training scores' mean and standard deviation, mapped
    /// back to pixels and clamped to `[0, 1]`.
    pub fn random_inverse_study(&self, n: usize, seed: u64) -> Result<Matrix> {
        let mut rng = rng::substream(seed, PCA_STREAM, 0);
        let mut z = Matrix::zeros(n, self.k());
        for r in 0..n {
            for (j, v) in z.row_mut(r).iter_mut().enumerate() {
                *v = self.score_mean[j] + self.score_std[j] * standard_normal(&mut rng);
            }
        }
        let mut x = self.inverse_transform(&z)?;
        x.as_mut_slice().iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        Ok(x)
    }
}

fn vec_zeros(n: usize) -> Vec<f64> {
    alloc::vec![0.0; n]
}

fn standardize(x: &Matrix, mean: &[f64], scale: &[f64]) -> Matrix {
    let mut out = x.clone();
    for r in 0..out.rows() {
        for ((v, &m), &s) in out.row_mut(r).iter_mut().zip(mean).zip(scale) {
            *v = (*v - m) / s;
        }
    }
    out
}

/// Mean squared reconstruction error in standardized units: the squared
/// norm of each sample's residual, averaged over samples.
pub fn reconstruction_mse(model: &PcaModel, x: &Matrix) -> Result<f64> {
    let std = model.standardize(x)?;
    let recon = model.standardize(&model.inverse_transform(&model.transform(x)?)?)?;
    let total: f64 = std
        .as_slice()
        .iter()
        .zip(recon.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(total / x.rows() as f64)
}
