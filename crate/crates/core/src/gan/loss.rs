use alloc::vec::Vec;

use super::discriminator::Discriminator;
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::params::zeros_like;

/// Floor applied to σ(·) before taking logs.
pub const LOG_CLAMP: f64 = 1e-12;

fn log_sigmoid(x: f64) -> f64 {
    math::ln(math::sigmoid(x).max(LOG_CLAMP))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BceLosses {
    pub disc_loss: f64,
    pub gen_loss: f64,
}

/// Binary cross-entropy on raw scores:
/// `DL = −mean log σ(r) − mean log(1 − σ(f))`, `GL = −mean log σ(f)`.
pub fn bce_losses(real_scores: &[f64], fake_scores: &[f64]) -> Result<BceLosses> {
    if real_scores.is_empty() || fake_scores.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mean = |s: &[f64], f: &dyn Fn(f64) -> f64| s.iter().map(|&x| f(x)).sum::<f64>() / s.len() as f64;
    let real = mean(real_scores, &log_sigmoid);
    let fake_neg = mean(fake_scores, &|x| log_sigmoid(-x));
    let fake = mean(fake_scores, &log_sigmoid);
    Ok(BceLosses {
        disc_loss: -real - fake_neg,
        gen_loss: -fake,
    })
}

/// BCE losses and `∂DL/∂θ_d` over a batch of real and fake patches (rows).
///
/// Score derivatives use the unclamped logistic form, which keeps a signal
/// where the clamp would report a flat loss.
pub fn bce_critic(disc: &Discriminator, real: &Matrix, fake: &Matrix) -> Result<(BceLosses, Discriminator)> {
    let mut grads = zeros_like(disc);
    let mut real_scores = Vec::with_capacity(real.rows());
    let mut fake_scores = Vec::with_capacity(fake.rows());
    let nr = real.rows() as f64;
    let nf = fake.rows() as f64;
    for i in 0..real.rows() {
        let (s, cache) = disc.forward(real.row(i))?;
        disc.backward(&cache, -math::sigmoid(-s) / nr, &mut grads)?;
        real_scores.push(s);
    }
    for i in 0..fake.rows() {
        let (s, cache) = disc.forward(fake.row(i))?;
        disc.backward(&cache, math::sigmoid(s) / nf, &mut grads)?;
        fake_scores.push(s);
    }
    Ok((bce_losses(&real_scores, &fake_scores)?, grads))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WganGpLosses {
    pub disc_loss: f64,
    pub gen_loss: f64,
    /// `mean (‖∇D(x̂)‖ − 1)²`, before multiplying by λ.
    pub penalty: f64,
}

fn check_pairs(disc: &Discriminator, real: &Matrix, fake: &Matrix, eps: &[f64]) -> Result<()> {
    if real.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    check_len("fake batch", real.rows(), fake.rows())?;
    check_len("interpolation weights", real.rows(), eps.len())?;
    check_len("real patch", disc.patch_dim(), real.cols())?;
    check_len("fake patch", disc.patch_dim(), fake.cols())?;
    if eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::config("interpolation weights must lie in [0, 1]"));
    }
    Ok(())
}

fn interpolate(x: &[f64], y: &[f64], e: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| e * a + (1.0 - e) * b).collect()
}

pub fn wgan_gp_losses(disc: &Discriminator, real: &Matrix, fake: &Matrix, lambda: f64, eps: &[f64]) -> Result<WganGpLosses> {
    check_pairs(disc, real, fake, eps)?;
    let n = real.rows() as f64;
    let (mut real_mean, mut fake_mean, mut penalty) = (0.0, 0.0, 0.0);
    for i in 0..real.rows() {
        real_mean += disc.score(real.row(i))?;
        fake_mean += disc.score(fake.row(i))?;
        let g = disc.input_gradient(&interpolate(real.row(i), fake.row(i), eps[i]))?;
        let d = math::norm(&g) - 1.0;
        penalty += d * d;
    }
    let (real_mean, fake_mean, penalty) = (real_mean / n, fake_mean / n, penalty / n);
    Ok(WganGpLosses {
        disc_loss: fake_mean - real_mean + lambda * penalty,
        gen_loss: -fake_mean,
        penalty,
    })
}

/// Wasserstein-GP losses and the exact `∂DL/∂θ_d`, with
/// `x̂ᵢ = εᵢ xᵢ + (1 − εᵢ) x̃ᵢ`.
pub fn wgan_gp_critic(
    disc: &Discriminator,
    real: &Matrix,
    fake: &Matrix,
    lambda: f64,
    eps: &[f64],
) -> Result<(WganGpLosses, Discriminator)> {
    check_pairs(disc, real, fake, eps)?;
    let n = real.rows() as f64;
    let mut grads = zeros_like(disc);
    let (mut real_mean, mut fake_mean, mut penalty) = (0.0, 0.0, 0.0);
    for i in 0..real.rows() {
        let (s, cache) = disc.forward(real.row(i))?;
        disc.backward(&cache, -1.0 / n, &mut grads)?;
        real_mean += s;
        let (s, cache) = disc.forward(fake.row(i))?;
        disc.backward(&cache, 1.0 / n, &mut grads)?;
        fake_mean += s;
        let x_hat = interpolate(real.row(i), fake.row(i), eps[i]);
        penalty += disc.penalty_and_gradient(&x_hat, lambda / n, &mut grads)?.0;
    }
    let (real_mean, fake_mean, penalty) = (real_mean / n, fake_mean / n, penalty / n);
    Ok((
        WganGpLosses {
            disc_loss: fake_mean - real_mean + lambda * penalty,
            gen_loss: -fake_mean,
            penalty,
        },
        grads,
    ))
}
