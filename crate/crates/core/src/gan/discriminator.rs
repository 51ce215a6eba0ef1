use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::params::ParamSet;
use crate::rng::uniform;

pub const HIDDEN_WIDTHS: [usize; 2] = [64, 16];
pub const LEAKY_SLOPE: f64 = 0.2;

fn leaky(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        LEAKY_SLOPE * z
    }
}

fn leaky_slope(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// Fully connected patch critic `d → h1 → h2 → 1` with leaky-ReLU hidden
/// layers and a raw (unsquashed) score.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
    pub w3: Vec<f64>,
    /// Output bias, stored as a one-element slice.
    pub b3: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DiscCache {
    x: Vec<f64>,
    z1: Vec<f64>,
    a1: Vec<f64>,
    z2: Vec<f64>,
    a2: Vec<f64>,
}

impl Discriminator {
    pub fn zeros(patch_dim: usize) -> Self {
        Self::zeros_with_widths(patch_dim, HIDDEN_WIDTHS[0], HIDDEN_WIDTHS[1])
    }

    pub fn zeros_with_widths(patch_dim: usize, h1: usize, h2: usize) -> Self {
        Discriminator {
            w1: Matrix::zeros(h1, patch_dim),
            b1: vec![0.0; h1],
            w2: Matrix::zeros(h2, h1),
            b2: vec![0.0; h2],
            w3: vec![0.0; h2],
            b3: vec![0.0],
        }
    }

    pub fn init<R: Rng + ?Sized>(patch_dim: usize, rng: &mut R) -> Self {
        Self::init_with_widths(patch_dim, HIDDEN_WIDTHS[0], HIDDEN_WIDTHS[1], rng)
    }

    /// Weights and biases uniform in `±1/√fan_in`.
    pub fn init_with_widths<R: Rng + ?Sized>(patch_dim: usize, h1: usize, h2: usize, rng: &mut R) -> Self {
        let mut d = Self::zeros_with_widths(patch_dim, h1, h2);
        let mut fill = |s: &mut [f64], fan_in: usize| {
            let bound = 1.0 / math::sqrt(fan_in as f64);
            s.iter_mut().for_each(|v| *v = uniform(rng, -bound, bound));
        };
        fill(d.w1.as_mut_slice(), patch_dim);
        fill(&mut d.b1, patch_dim);
        fill(d.w2.as_mut_slice(), h1);
        fill(&mut d.b2, h1);
        fill(&mut d.w3, h2);
        fill(&mut d.b3, h2);
        d
    }

    pub fn patch_dim(&self) -> usize {
        self.w1.cols()
    }

    pub fn forward(&self, x: &[f64]) -> Result<(f64, DiscCache)> {
        check_len("discriminator input", self.patch_dim(), x.len())?;
        if !math::all_finite(x) {
            return Err(Error::NonFinite("discriminator input"));
        }
        let mut z1 = self.w1.matvec(x)?;
        z1.iter_mut().zip(&self.b1).for_each(|(z, b)| *z += b);
        let a1: Vec<f64> = z1.iter().map(|&z| leaky(z)).collect();
        let mut z2 = self.w2.matvec(&a1)?;
        z2.iter_mut().zip(&self.b2).for_each(|(z, b)| *z += b);
        let a2: Vec<f64> = z2.iter().map(|&z| leaky(z)).collect();
        let score = math::dot(&self.w3, &a2) + self.b3[0];
        Ok((
            score,
            DiscCache {
                x: x.to_vec(),
                z1,
                a1,
                z2,
                a2,
            },
        ))
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.forward(x).map(|(s, _)| s)
    }

    /// Adds `d_score · ∂score/∂θ` into `grads` and returns
    /// `d_score · ∂score/∂x`.
    pub fn backward(&self, cache: &DiscCache, d_score: f64, grads: &mut Discriminator) -> Result<Vec<f64>> {
        check_len("cached input", self.patch_dim(), cache.x.len())?;
        check_len("cached hidden", self.b1.len(), cache.z1.len())?;
        for (g, a) in grads.w3.iter_mut().zip(&cache.a2) {
            *g += d_score * a;
        }
        grads.b3[0] += d_score;
        let dz2: Vec<f64> = self
            .w3
            .iter()
            .zip(&cache.z2)
            .map(|(w, &z)| d_score * w * leaky_slope(z))
            .collect();
        grads.w2.add_outer(&dz2, &cache.a1, 1.0)?;
        grads.b2.iter_mut().zip(&dz2).for_each(|(g, d)| *g += d);
        let mut dz1 = self.w2.matvec_t(&dz2)?;
        dz1.iter_mut().zip(&cache.z1).for_each(|(d, &z)| *d *= leaky_slope(z));
        grads.w1.add_outer(&dz1, &cache.x, 1.0)?;
        grads.b1.iter_mut().zip(&dz1).for_each(|(g, d)| *g += d);
        self.w1.matvec_t(&dz1)
    }

    /// `∂score/∂x`, returned together with the backpropagated hidden
    /// cotangents `(u1, u2)` it was built from.
    fn input_gradient_parts(&self, cache: &DiscCache) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let u2: Vec<f64> = self
            .w3
            .iter()
            .zip(&cache.z2)
            .map(|(w, &z)| w * leaky_slope(z))
            .collect();
        let mut u1 = self.w2.matvec_t(&u2)?;
        u1.iter_mut().zip(&cache.z1).for_each(|(u, &z)| *u *= leaky_slope(z));
        let g = self.w1.matvec_t(&u1)?;
        Ok((g, u1, u2))
    }

    pub fn input_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (_, cache) = self.forward(x)?;
        Ok(self.input_gradient_parts(&cache)?.0)
    }

    /// Gradient penalty `(‖∇ₓD(x)‖ − 1)²` at `x`. Adds `scale · ∂penalty/∂θ`
    /// into `grads` and returns `(penalty, ‖∇ₓD(x)‖)`.
    ///
    /// The input gradient is piecewise multilinear in the weights, so the
    /// parameter gradient is exact away from activation kinks. Biases only
    /// select the linear piece and receive no gradient.
    pub fn penalty_and_gradient(&self, x: &[f64], scale: f64, grads: &mut Discriminator) -> Result<(f64, f64)> {
        let (_, cache) = self.forward(x)?;
        let (g, u1, u2) = self.input_gradient_parts(&cache)?;
        let norm = math::norm(&g);
        let penalty = (norm - 1.0) * (norm - 1.0);
        if norm < 1e-12 {
            return Ok((penalty, norm));
        }
        let coef = scale * 2.0 * (norm - 1.0) / norm;
        let gamma: Vec<f64> = g.iter().map(|v| coef * v).collect();
        grads.w1.add_outer(&u1, &gamma, 1.0)?;
        let mut beta = self.w1.matvec(&gamma)?;
        beta.iter_mut().zip(&cache.z1).for_each(|(b, &z)| *b *= leaky_slope(z));
        grads.w2.add_outer(&u2, &beta, 1.0)?;
        let w2_beta = self.w2.matvec(&beta)?;
        for ((gw, wb), &z) in grads.w3.iter_mut().zip(&w2_beta).zip(&cache.z2) {
            *gw += leaky_slope(z) * wb;
        }
        Ok((penalty, norm))
    }
}

impl ParamSet for Discriminator {
    fn visit(&self, f: &mut dyn FnMut(&[f64])) {
        f(self.w1.as_slice());
        f(&self.b1);
        f(self.w2.as_slice());
        f(&self.b2);
        f(&self.w3);
        f(&self.b3);
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut [f64])) {
        f(self.w1.as_mut_slice());
        f(&mut self.b1);
        f(self.w2.as_mut_slice());
        f(&mut self.b2);
        f(&mut self.w3);
        f(&mut self.b3);
    }
}
