use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::adam::Adam;
use super::discriminator::Discriminator;
use super::loss::{bce_critic, wgan_gp_critic};
use super::{LatentNoise, PatchGenerator};
use crate::data::PatchTensor;
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::params::{zeros_like, ParamSet};
use crate::rng::{self, uniform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Bce,
    WassersteinGp,
}

impl LossKind {
    pub fn default_critic_steps(self) -> usize {
        match self {
            LossKind::Bce => 1,
            LossKind::WassersteinGp => 5,
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Bce => "bce",
            LossKind::WassersteinGp => "wgan-gp",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bce" => Ok(LossKind::Bce),
            "wgan-gp" | "wgan" | "wasserstein" => Ok(LossKind::WassersteinGp),
            other => Err(Error::config(alloc::format!("unknown loss '{other}' (expected bce or wgan-gp)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub loss: LossKind,
    pub lambda_gp: f64,
    pub critic_steps: usize,
    pub seed: u64,
}

impl TrainConfig {
    /// Learning rate 2e-4, batch 128, λ = 10 and the loss's default number
    /// of critic steps.
    pub fn new(loss: LossKind, seed: u64) -> Self {
        TrainConfig {
            learning_rate: 2e-4,
            batch_size: 128,
            epochs: 1,
            loss,
            lambda_gp: 10.0,
            critic_steps: loss.default_critic_steps(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning rate must be finite and non-negative"));
        }
        if !(self.lambda_gp >= 0.0 && self.lambda_gp.is_finite()) {
            return Err(Error::config("lambda must be finite and non-negative"));
        }
        if self.batch_size == 0 || self.critic_steps == 0 {
            return Err(Error::config("batch size and critic steps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    /// 1-based index of the epoch just completed.
    pub epoch: u64,
    pub gen_loss: f64,
    pub disc_loss: f64,
    /// Mean gradient penalty (before λ); zero under BCE.
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainState<G> {
    pub generator: G,
    pub discriminator: Discriminator,
    pub gen_opt: Adam,
    pub disc_opt: Adam,
    pub epochs_done: u64,
}

impl<G: PatchGenerator> TrainState<G> {
    pub fn new(generator: G, discriminator: Discriminator, learning_rate: f64) -> Result<Self> {
        check_len("discriminator input", generator.patch_dim(), discriminator.patch_dim())?;
        Ok(TrainState {
            gen_opt: Adam::new(generator.param_count(), learning_rate),
            disc_opt: Adam::new(discriminator.param_count(), learning_rate),
            generator,
            discriminator,
            epochs_done: 0,
        })
    }
}

fn adam_update<P: ParamSet>(opt: &mut Adam, params: &mut P, grads: &P) -> Result<()> {
    let mut flat = params.to_flat();
    opt.step(&mut flat, &grads.to_flat())?;
    params.load_flat(&flat)
}

fn patch_rows(images: &[Vec<f64>], patch_dim: usize) -> Result<Matrix> {
    let per = images.first().map_or(0, |i| i.len());
    let data: Vec<f64> = images.iter().flatten().copied().collect();
    Matrix::from_vec(images.len() * (per / patch_dim), patch_dim, data)
}

/// Batch-mean generator gradient for the given latent draws, plus the
/// generator loss it descends. Each image contributes the average of its
/// per-patch gradients.
pub fn generator_step_gradient<G: PatchGenerator>(
    generator: &G,
    disc: &Discriminator,
    loss: LossKind,
    noise: &[LatentNoise],
) -> Result<(G, f64)> {
    if noise.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let steps = generator.steps();
    let pd = generator.patch_dim();
    let mut acc = zeros_like(generator);
    let mut total = 0.0;
    for z in noise {
        let (image, cache) = generator.forward(z)?;
        let mut d_patches = Vec::with_capacity(steps);
        for t in 0..steps {
            let patch = &image[t * pd..(t + 1) * pd];
            let (score, dcache) = disc.forward(patch)?;
            let (patch_loss, d_score) = match loss {
                LossKind::WassersteinGp => (-score, -1.0),
                LossKind::Bce => (
                    -math::ln(math::sigmoid(score).max(super::LOG_CLAMP)),
                    -math::sigmoid(-score),
                ),
            };
            total += patch_loss;
            let mut scratch = zeros_like(disc);
            d_patches.push(disc.backward(&dcache, d_score, &mut scratch)?);
        }
        let g = generator.patch_averaged_gradient(&cache, &d_patches)?;
        acc.add_scaled(&g, 1.0)?;
    }
    let n = noise.len() as f64;
    acc.scale(1.0 / n);
    Ok((acc, total / (n * steps as f64)))
}

/// One pass over `data` in a shuffled order keyed by the epoch index.
///
/// Each batch runs `critic_steps` discriminator updates against fresh fakes,
/// then one generator update. Reported losses are means over batches; the
/// discriminator figures average every critic step.
pub fn train_epoch<G: PatchGenerator>(
    state: &mut TrainState<G>,
    data: &PatchTensor,
    cfg: &TrainConfig,
) -> Result<EpochMetrics> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let gen_steps = state.generator.steps();
    let pd = state.generator.patch_dim();
    check_len("patches per image", gen_steps, data.steps())?;
    check_len("patch size", pd, data.patch_dim())?;
    check_len("discriminator input", pd, state.discriminator.patch_dim())?;
    state.gen_opt.lr = cfg.learning_rate;
    state.disc_opt.lr = cfg.learning_rate;

    let epoch = state.epochs_done;
    let order = rng::permutation(&mut rng::substream(cfg.seed, rng::SHUFFLE, epoch), data.len());
    let mut noise_rng = rng::substream(cfg.seed, rng::NOISE, epoch);
    let mut eps_rng = rng::substream(cfg.seed, rng::EPSILON, epoch);

    let (mut gl_sum, mut dl_sum, mut pen_sum) = (0.0, 0.0, 0.0);
    let (mut batches, mut critic_evals) = (0usize, 0usize);
    for chunk in order.chunks(cfg.batch_size) {
        let real_images: Vec<Vec<f64>> = chunk.iter().map(|&i| data.image(i).to_vec()).collect();
        let real = patch_rows(&real_images, pd)?;

        for _ in 0..cfg.critic_steps {
            let mut fakes = Vec::with_capacity(chunk.len());
            for _ in 0..chunk.len() {
                let z = state.generator.sample_noise(&mut noise_rng);
                fakes.push(state.generator.forward(&z)?.0);
            }
            let fake = patch_rows(&fakes, pd)?;
            let (dl, penalty, grads) = match cfg.loss {
                LossKind::WassersteinGp => {
                    let eps: Vec<f64> = (0..real.rows()).map(|_| uniform(&mut eps_rng, 0.0, 1.0)).collect();
                    let (l, g) = wgan_gp_critic(&state.discriminator, &real, &fake, cfg.lambda_gp, &eps)?;
                    (l.disc_loss, l.penalty, g)
                }
                LossKind::Bce => {
                    let (l, g) = bce_critic(&state.discriminator, &real, &fake)?;
                    (l.disc_loss, 0.0, g)
                }
            };
            adam_update(&mut state.disc_opt, &mut state.discriminator, &grads)?;
            dl_sum += dl;
            pen_sum += penalty;
            critic_evals += 1;
        }

        let noise: Vec<LatentNoise> = (0..chunk.len())
            .map(|_| state.generator.sample_noise(&mut noise_rng))
            .collect();
        let (grads, gl) = generator_step_gradient(&state.generator, &state.discriminator, cfg.loss, &noise)?;
        adam_update(&mut state.gen_opt, &mut state.generator, &grads)?;
        gl_sum += gl;
        batches += 1;
    }

    state.epochs_done += 1;
    Ok(EpochMetrics {
        epoch: state.epochs_done,
        gen_loss: gl_sum / batches as f64,
        disc_loss: dl_sum / critic_evals as f64,
        penalty: pen_sum / critic_evals as f64,
    })
}
