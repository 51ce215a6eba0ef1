use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{LatentNoise, PatchGenerator};
use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::params::{zeros_like, ParamSet};
use crate::qlstm::{stack_backward, stack_forward, HiddenMode, QlstmConfig, QlstmStack, StackCache};
use crate::rng::uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n_qubits: usize,
    pub reps: usize,
    pub layers: usize,
    pub hidden_mode: HiddenMode,
    pub steps: usize,
    pub patch_dim: usize,
}

impl GeneratorConfig {
    /// Two 7-qubit QLSTM layers emitting four 196-pixel strips of a 28×28
    /// image.
    pub fn mnist() -> Self {
        GeneratorConfig {
            n_qubits: 7,
            reps: 2,
            layers: 2,
            hidden_mode: HiddenMode::Probabilities,
            steps: 4,
            patch_dim: 196,
        }
    }

    /// 3 qubits, four 16-pixel strips of an 8×8 image.
    pub fn toy() -> Self {
        GeneratorConfig {
            n_qubits: 3,
            steps: 4,
            patch_dim: 16,
            ..Self::mnist()
        }
    }

    /// One fresh latent row per step, as wide as the register.
    pub fn z_dim(&self) -> usize {
        self.n_qubits
    }

    pub fn image_dim(&self) -> usize {
        self.steps * self.patch_dim
    }

    pub fn qlstm(&self) -> QlstmConfig {
        QlstmConfig {
            n_qubits: self.n_qubits,
            reps: self.reps,
            hidden_mode: self.hidden_mode,
            input_dim: self.z_dim(),
            layers: self.layers,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.patch_dim == 0 {
            return Err(Error::config("generator needs at least one step and one pixel per patch"));
        }
        self.qlstm().validate()
    }
}

/// QLSTM stack followed by a sigmoid output projection from the hidden
/// vector to one patch per step.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    config: GeneratorConfig,
    pub qlstm: QlstmStack,
    /// `patch_dim × hidden_dim`
    pub out_weights: Matrix,
    pub out_bias: Vec<f64>,
}

impl Generator {
    pub fn zeros(config: GeneratorConfig) -> Result<Self> {
        config.validate()?;
        let qlstm = QlstmStack::zeros(&config.qlstm())?;
        let hidden = qlstm.hidden_dim();
        Ok(Generator {
            config,
            qlstm,
            out_weights: Matrix::zeros(config.patch_dim, hidden),
            out_bias: vec![0.0; config.patch_dim],
        })
    }

    pub fn init<R: Rng + ?Sized>(config: GeneratorConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let qlstm = QlstmStack::init(&config.qlstm(), rng)?;
        let hidden = qlstm.hidden_dim();
        let bound = 1.0 / math::sqrt(hidden as f64);
        let mut out_weights = Matrix::zeros(config.patch_dim, hidden);
        for w in out_weights.as_mut_slice() {
            *w = uniform(rng, -bound, bound);
        }
        let out_bias = (0..config.patch_dim).map(|_| uniform(rng, -bound, bound)).collect();
        Ok(Generator {
            config,
            qlstm,
            out_weights,
            out_bias,
        })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }
}

impl ParamSet for Generator {
    fn visit(&self, f: &mut dyn FnMut(&[f64])) {
        self.qlstm.visit(f);
        f(self.out_weights.as_slice());
        f(&self.out_bias);
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut [f64])) {
        self.qlstm.visit_mut(f);
        f(self.out_weights.as_mut_slice());
        f(&mut self.out_bias);
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorCache {
    stack: StackCache,
    hidden: Vec<Vec<f64>>,
    patches: Vec<Vec<f64>>,
}

impl GeneratorCache {
    pub fn patches(&self) -> &[Vec<f64>] {
        &self.patches
    }
}

pub fn generate(generator: &Generator, z: &LatentNoise) -> Result<Vec<f64>> {
    generate_with_cache(generator, z).map(|(img, _)| img)
}

/// Feeds latent row `t` into the stack at step `t`; patch `t` is
/// `σ(W h_t + b)`. The image is the patches concatenated in step order.
pub fn generate_with_cache(generator: &Generator, z: &LatentNoise) -> Result<(Vec<f64>, GeneratorCache)> {
    let cfg = &generator.config;
    check_len("latent rows", cfg.steps, z.rows())?;
    check_len("latent width", cfg.z_dim(), z.cols())?;
    let xs: Vec<Vec<f64>> = (0..z.rows()).map(|t| z.row(t).to_vec()).collect();
    let (hidden, stack) = stack_forward(&generator.qlstm, &xs)?;
    let mut image = Vec::with_capacity(cfg.image_dim());
    let mut patches = Vec::with_capacity(cfg.steps);
    for h in &hidden {
        let mut patch = generator.out_weights.matvec(h)?;
        for (p, b) in patch.iter_mut().zip(&generator.out_bias) {
            *p = math::sigmoid(*p + b);
        }
        image.extend_from_slice(&patch);
        patches.push(patch);
    }
    Ok((image, GeneratorCache { stack, hidden, patches }))
}

/// Gradient of `Σ_t d_patches[t] · patch_t` for the first
/// `d_patches.len()` steps.
pub fn generator_backward(generator: &Generator, cache: &GeneratorCache, d_patches: &[Vec<f64>]) -> Result<Generator> {
    if d_patches.len() > cache.patches.len() {
        return Err(Error::StaleCache);
    }
    let mut grads = zeros_like(generator);
    let mut d_hidden = Vec::with_capacity(d_patches.len());
    for (t, dp) in d_patches.iter().enumerate() {
        check_len("patch cotangent", generator.config.patch_dim, dp.len())?;
        let d_pre: Vec<f64> = dp
            .iter()
            .zip(&cache.patches[t])
            .map(|(d, p)| d * p * (1.0 - p))
            .collect();
        grads.out_weights.add_outer(&d_pre, &cache.hidden[t], 1.0)?;
        for (b, d) in grads.out_bias.iter_mut().zip(&d_pre) {
            *b += d;
        }
        d_hidden.push(generator.out_weights.matvec_t(&d_pre)?);
    }
    let back = stack_backward(&generator.qlstm, &cache.stack, &d_hidden)?;
    grads.qlstm = back.grads;
    Ok(grads)
}

impl PatchGenerator for Generator {
    type Cache = GeneratorCache;

    fn steps(&self) -> usize {
        self.config.steps
    }

    fn patch_dim(&self) -> usize {
        self.config.patch_dim
    }

    fn noise_shape(&self) -> (usize, usize) {
        (self.config.steps, self.config.z_dim())
    }

    fn forward(&self, z: &LatentNoise) -> Result<(Vec<f64>, GeneratorCache)> {
        generate_with_cache(self, z)
    }

    /// One truncated backward pass per patch (patch `t` only depends on
    /// steps `0..=t`), accumulated in step order and scaled by `1/T`.
    fn patch_averaged_gradient(&self, cache: &GeneratorCache, d_patches: &[Vec<f64>]) -> Result<Self> {
        let steps = self.config.steps;
        check_len("patch cotangents", steps, d_patches.len())?;
        let mut acc = zeros_like(self);
        let mut upstream = vec![vec![0.0; self.config.patch_dim]; steps];
        for t in 0..steps {
            if d_patches[t].iter().all(|&d| d == 0.0) {
                continue;
            }
            upstream[t].clone_from(&d_patches[t]);
            let g = generator_backward(self, cache, &upstream[..=t])?;
            acc.add_scaled(&g, 1.0)?;
            upstream[t].fill(0.0);
        }
        acc.scale(1.0 / steps as f64);
        Ok(acc)
    }
}
