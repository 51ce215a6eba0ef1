//! Adversarial training of patch generators against a classical critic.
//!
//! A generator emits an image as `steps` consecutive patches. The critic
//! scores individual patches. Generator gradients are formed per patch and
//! averaged over the patches of each image before the optimiser step.

mod adam;
mod discriminator;
mod generator;
mod loss;
mod patchgan;
mod train;

use alloc::vec::Vec;

use rand::Rng;

pub use adam::Adam;
pub use discriminator::{DiscCache, Discriminator, HIDDEN_WIDTHS, LEAKY_SLOPE};
pub use generator::{generate, generate_with_cache, generator_backward, Generator, GeneratorCache, GeneratorConfig};
pub use loss::{
    bce_critic, bce_losses, wgan_gp_critic, wgan_gp_losses, BceLosses, WganGpLosses, LOG_CLAMP,
};
pub use patchgan::{generate_patchgan_baseline, PatchGanCache, PatchGanConfig, PatchGanGenerator};
pub use train::{
    generator_step_gradient, train_epoch, EpochMetrics, LossKind, TrainConfig, TrainState,
};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::params::ParamSet;
use crate::rng::{self, standard_normal};

/// Standard-normal latent input, one row per generator step.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentNoise {
    z: Matrix,
}

impl LatentNoise {
    pub fn sample<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut z = Matrix::zeros(rows, cols);
        for v in z.as_mut_slice() {
            *v = standard_normal(rng);
        }
        LatentNoise { z }
    }

    pub fn from_matrix(z: Matrix) -> Result<Self> {
        if !crate::math::all_finite(z.as_slice()) {
            return Err(Error::NonFinite("latent noise"));
        }
        Ok(LatentNoise { z })
    }

    pub fn rows(&self) -> usize {
        self.z.rows()
    }

    pub fn cols(&self) -> usize {
        self.z.cols()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        self.z.row(r)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.z
    }
}

/// A generator that emits images patch by patch and can return the
/// patch-averaged gradient of per-patch losses.
pub trait PatchGenerator: ParamSet + Clone {
    type Cache;

    fn steps(&self) -> usize;
    fn patch_dim(&self) -> usize;
    /// `(rows, cols)` of the [`LatentNoise`] it consumes.
    fn noise_shape(&self) -> (usize, usize);

    fn image_dim(&self) -> usize {
        self.steps() * self.patch_dim()
    }

    fn forward(&self, z: &LatentNoise) -> Result<(Vec<f64>, Self::Cache)>;

    /// `(1/T)·Σ_t ∇θ loss_t`, where `d_patches[t] = ∂loss_t/∂patch_t`, summed
    /// in step order.
    fn patch_averaged_gradient(&self, cache: &Self::Cache, d_patches: &[Vec<f64>]) -> Result<Self>;

    fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> LatentNoise {
        let (r, c) = self.noise_shape();
        LatentNoise::sample(r, c, rng)
    }
}

pub const GENERATE_STREAM: &str = "generate";

/// `n` images from one noise stream keyed by `seed`; image `i` does not
/// depend on `n`.
pub fn sample_images<G: PatchGenerator>(generator: &G, n: usize, seed: u64) -> Result<Matrix> {
    let mut rng = rng::substream(seed, GENERATE_STREAM, 0);
    let mut out = Matrix::zeros(n, generator.image_dim());
    for i in 0..n {
        let z = generator.sample_noise(&mut rng);
        let (img, _) = generator.forward(&z)?;
        out.row_mut(i).copy_from_slice(&img);
    }
    Ok(out)
}
