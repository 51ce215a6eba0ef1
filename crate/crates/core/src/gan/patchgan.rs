use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{LatentNoise, PatchGenerator};
use crate::ansatz::{build_hw_efficient, AnsatzSpec};
use crate::error::{check_len, Error, Result};
use crate::math::PI;
use crate::params::{zeros_like, ParamSet};
use crate::qsim::{run, shift_gradient, CircuitSpec};
use crate::rng::uniform;

/// Independent per-patch circuits: sub-generator `s` draws patch `s` from
/// the first `patch_pixels` outcome probabilities of its own register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchGanConfig {
    pub n_qubits: usize,
    pub reps: usize,
    pub subgenerators: usize,
    pub patch_pixels: usize,
}

impl PatchGanConfig {
    /// The scaling-study configurations over 784 pixels: patch size grows
    /// with the register so fewer sub-generators are needed.
    pub fn mnist(n_qubits: usize) -> Result<Self> {
        let patch_pixels = match n_qubits {
            5 => 14,
            6 => 28,
            7 => 98,
            8 => 196,
            _ => return Err(Error::config(format!("no 28x28 baseline layout for {n_qubits} qubits"))),
        };
        Ok(PatchGanConfig {
            n_qubits,
            reps: 2,
            subgenerators: 784 / patch_pixels,
            patch_pixels,
        })
    }

    /// 3-qubit baseline covering an 8×8 image with eight 8-pixel patches.
    pub fn toy() -> Self {
        PatchGanConfig {
            n_qubits: 3,
            reps: 2,
            subgenerators: 8,
            patch_pixels: 8,
        }
    }

    pub fn image_dim(&self) -> usize {
        self.subgenerators * self.patch_pixels
    }

    pub fn validate(&self) -> Result<()> {
        if self.subgenerators == 0 || self.patch_pixels == 0 {
            return Err(Error::config("baseline needs at least one sub-generator and one pixel"));
        }
        if self.n_qubits < 1 || self.n_qubits > 12 || self.patch_pixels > 1 << self.n_qubits {
            return Err(Error::config(format!(
                "{} qubits cannot supply {}-pixel patches",
                self.n_qubits, self.patch_pixels
            )));
        }
        Ok(())
    }

    fn circuit(&self) -> Result<CircuitSpec> {
        self.validate()?;
        build_hw_efficient(&AnsatzSpec::for_register(self.n_qubits, self.reps))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchGanGenerator {
    config: PatchGanConfig,
    circuit: CircuitSpec,
    pub params: Vec<Vec<f64>>,
}

impl PatchGanGenerator {
    pub fn zeros(config: PatchGanConfig) -> Result<Self> {
        let circuit = config.circuit()?;
        let params = vec![vec![0.0; circuit.param_count()]; config.subgenerators];
        Ok(PatchGanGenerator { config, circuit, params })
    }

    /// Angles uniform in `[0, π)`.
    pub fn init<R: Rng + ?Sized>(config: PatchGanConfig, rng: &mut R) -> Result<Self> {
        let mut g = Self::zeros(config)?;
        for p in g.params.iter_mut().flatten() {
            *p = uniform(rng, 0.0, PI);
        }
        Ok(g)
    }

    pub fn config(&self) -> &PatchGanConfig {
        &self.config
    }
}

impl ParamSet for PatchGanGenerator {
    fn visit(&self, f: &mut dyn FnMut(&[f64])) {
        self.params.iter().for_each(|p| f(p));
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut [f64])) {
        self.params.iter_mut().for_each(|p| f(p));
    }
}

#[derive(Debug, Clone)]
pub struct PatchGanCache {
    inputs: Vec<Vec<f64>>,
    /// Truncated probabilities per sub-generator.
    probs: Vec<Vec<f64>>,
    argmax: Vec<usize>,
}

pub fn generate_patchgan_baseline(generator: &PatchGanGenerator, z: &LatentNoise) -> Result<Vec<f64>> {
    generator.forward(z).map(|(img, _)| img)
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

impl PatchGenerator for PatchGanGenerator {
    type Cache = PatchGanCache;

    fn steps(&self) -> usize {
        self.config.subgenerators
    }

    fn patch_dim(&self) -> usize {
        self.config.patch_pixels
    }

    fn noise_shape(&self) -> (usize, usize) {
        (self.config.subgenerators, self.config.n_qubits)
    }

    /// Latent row `s` is used directly as the encoder angles of
    /// sub-generator `s`. Each patch is divided by its largest entry; an
    /// all-zero patch stays zero.
    fn forward(&self, z: &LatentNoise) -> Result<(Vec<f64>, PatchGanCache)> {
        let (rows, cols) = self.noise_shape();
        check_len("latent rows", rows, z.rows())?;
        check_len("latent width", cols, z.cols())?;
        let p = self.config.patch_pixels;
        let mut image = Vec::with_capacity(self.config.image_dim());
        let mut cache = PatchGanCache {
            inputs: Vec::with_capacity(rows),
            probs: Vec::with_capacity(rows),
            argmax: Vec::with_capacity(rows),
        };
        for (s, params) in self.params.iter().enumerate() {
            let inputs = z.row(s).to_vec();
            let mut probs = run(&self.circuit, params, &inputs)?.probabilities();
            probs.truncate(p);
            let k = argmax(&probs);
            let max = probs[k];
            if max < 1e-12 {
                image.extend(core::iter::repeat_n(0.0, p));
            } else {
                image.extend(probs.iter().map(|v| v / max));
            }
            cache.inputs.push(inputs);
            cache.probs.push(probs);
            cache.argmax.push(k);
        }
        Ok((image, cache))
    }

    fn patch_averaged_gradient(&self, cache: &PatchGanCache, d_patches: &[Vec<f64>]) -> Result<Self> {
        let steps = self.config.subgenerators;
        check_len("patch cotangents", steps, d_patches.len())?;
        if cache.probs.len() != steps {
            return Err(Error::StaleCache);
        }
        let mut acc = zeros_like(self);
        let dim = 1 << self.config.n_qubits;
        for s in 0..steps {
            let d = &d_patches[s];
            check_len("patch cotangent", self.config.patch_pixels, d.len())?;
            let probs = &cache.probs[s];
            let k = cache.argmax[s];
            let max = probs[k];
            if max < 1e-12 {
                continue;
            }
            let mut cot = vec![0.0; dim];
            for (c, dj) in cot.iter_mut().zip(d) {
                *c = dj / max;
            }
            let weighted: f64 = d.iter().zip(probs).map(|(a, b)| a * b).sum();
            cot[k] -= weighted / (max * max);
            let g = shift_gradient(&self.circuit, &self.params[s], &cache.inputs[s], &cot)?;
            for (a, b) in acc.params[s].iter_mut().zip(&g.params) {
                *a += b;
            }
        }
        acc.scale(1.0 / steps as f64);
        Ok(acc)
    }
}
