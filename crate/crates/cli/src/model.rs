//! Model descriptions shared by training, generation and scoring.

use qgan_core::ansatz::Architecture;
use qgan_core::data::{self, ImageDataset, PatchTensor};
use qgan_core::gan::{
    sample_images, train_epoch, Adam, Discriminator, EpochMetrics, Generator, GeneratorConfig, PatchGanConfig,
    PatchGanGenerator, PatchGenerator, TrainConfig, TrainState,
};
use qgan_core::linalg::Matrix;
use qgan_core::params::ParamSet;
use qgan_core::qlstm::HiddenMode;
use qgan_core::rng::{substream, INIT};

use crate::checkpoint::{Checkpoint, CorruptCheckpoint};
use crate::settings::{usage, KvMap, Layers};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenSpec {
    Lstm(GeneratorConfig),
    PatchGan(PatchGanConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub gen: GenSpec,
    /// Images are cropped to 24×24 and pooled to 8×8 before training.
    pub toy: bool,
    pub rows: usize,
    pub cols: usize,
}

impl Model {
    pub fn architecture(&self) -> Architecture {
        match self.gen {
            GenSpec::Lstm(_) => Architecture::LstmQgan,
            GenSpec::PatchGan(_) => Architecture::PatchGan,
        }
    }

    pub fn image_dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn patch_dim(&self) -> usize {
        match self.gen {
            GenSpec::Lstm(c) => c.patch_dim,
            GenSpec::PatchGan(c) => c.patch_pixels,
        }
    }

    /// Resolves `arch`, `toy`, `qubits`, `reps`, `layers`, `hidden`,
    /// `steps` and `patch_pixels`.
    pub fn resolve(s: &mut Layers) -> anyhow::Result<Self> {
        let arch: Architecture = s.get("arch", Architecture::LstmQgan)?;
        let toy = s.get("toy", false)?;
        let (rows, cols): (usize, usize) = if toy { (8, 8) } else { (28, 28) };
        let dim = rows * cols;
        let gen = match arch {
            Architecture::LstmQgan => {
                let steps = s.get("steps", data::TOY_STRIPS)?;
                let n_qubits = s.get("qubits", if toy { data::TOY_QUBITS } else { 7 })?;
                if steps == 0 || !rows.is_multiple_of(steps) {
                    return Err(usage(format!("{rows} image rows do not split into {steps} whole-row strips")));
                }
                let c = GeneratorConfig {
                    n_qubits,
                    reps: s.get("reps", 2)?,
                    layers: s.get("layers", 2)?,
                    hidden_mode: s.get("hidden", HiddenMode::Probabilities)?,
                    steps,
                    patch_dim: dim / steps,
                };
                c.validate().map_err(|e| usage(e.to_string()))?;
                GenSpec::Lstm(c)
            }
            Architecture::PatchGan => {
                let n_qubits: usize = s.get("qubits", if toy { data::TOY_QUBITS } else { 5 })?;
                let reps = s.get("reps", 2)?;
                let default_pixels = if toy {
                    default_patch_pixels(dim, n_qubits)
                } else {
                    PatchGanConfig::mnist(n_qubits).map_or_else(|_| default_patch_pixels(dim, n_qubits), |c| c.patch_pixels)
                };
                let patch_pixels: usize = s.get("patch_pixels", default_pixels)?;
                if patch_pixels == 0 || !dim.is_multiple_of(patch_pixels) {
                    return Err(usage(format!("{dim} pixels do not split into {patch_pixels}-pixel patches")));
                }
                let c = PatchGanConfig {
                    n_qubits,
                    reps,
                    subgenerators: dim / patch_pixels,
                    patch_pixels,
                };
                c.validate().map_err(|e| usage(e.to_string()))?;
                GenSpec::PatchGan(c)
            }
        };
        Ok(Model { gen, toy, rows, cols })
    }

    pub fn write_meta(&self, m: &mut KvMap) {
        m.set("arch", self.architecture());
        m.set("toy", self.toy);
        m.set("rows", self.rows);
        m.set("cols", self.cols);
        match self.gen {
            GenSpec::Lstm(c) => {
                m.set("qubits", c.n_qubits);
                m.set("reps", c.reps);
                m.set("layers", c.layers);
                m.set("hidden", c.hidden_mode);
                m.set("steps", c.steps);
                m.set("patch_dim", c.patch_dim);
            }
            GenSpec::PatchGan(c) => {
                m.set("qubits", c.n_qubits);
                m.set("reps", c.reps);
                m.set("subgenerators", c.subgenerators);
                m.set("patch_pixels", c.patch_pixels);
            }
        }
    }

    pub fn from_meta(meta: &KvMap) -> Result<Self, CorruptCheckpoint> {
        let bad = |e: anyhow::Error| CorruptCheckpoint(format!("model description: {e}"));
        let mut s = Layers::new(vec![meta.clone()]);
        let model = Model::resolve(&mut s).map_err(bad)?;
        let rows: usize = s.get("rows", 0).map_err(bad)?;
        let cols: usize = s.get("cols", 0).map_err(bad)?;
        if (rows, cols) != (model.rows, model.cols) {
            return Err(CorruptCheckpoint("image size does not match profile".into()));
        }
        Ok(model)
    }

    /// Loads the training images for this model: optional class filter and
    /// count limit, then the toy preprocessing if enabled.
    pub fn prepare(&self, raw: &ImageDataset, digit: Option<u8>, limit: Option<usize>) -> anyhow::Result<ImageDataset> {
        let mut ds = match digit {
            Some(d) => raw.filter_class(d),
            None => raw.clone(),
        };
        if let Some(n) = limit {
            ds = ds.take(n);
        }
        if self.toy {
            ds = data::toy_profile(&ds)?;
        }
        if (ds.rows(), ds.cols()) != (self.rows, self.cols) {
            anyhow::bail!(
                "dataset images are {}x{}, model expects {}x{}",
                ds.rows(),
                ds.cols(),
                self.rows,
                self.cols
            );
        }
        Ok(ds)
    }

    pub fn patches(&self, ds: &ImageDataset) -> anyhow::Result<PatchTensor> {
        Ok(data::chunk_patches(ds, self.patch_dim())?)
    }
}

/// Largest divisor of `dim` that a register of `n_qubits` can supply.
fn default_patch_pixels(dim: usize, n_qubits: usize) -> usize {
    let cap = 1usize << n_qubits.min(12);
    (1..=cap.min(dim)).rev().find(|&p| dim.is_multiple_of(p)).unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trainer {
    Lstm(TrainState<Generator>),
    PatchGan(TrainState<PatchGanGenerator>),
}

macro_rules! with_state {
    ($self:expr, $s:ident => $body:expr) => {
        match $self {
            Trainer::Lstm($s) => $body,
            Trainer::PatchGan($s) => $body,
        }
    };
}

fn unpack<P: ParamSet>(p: &mut P, flat: &[f64], what: &str) -> Result<(), CorruptCheckpoint> {
    p.load_flat(flat).map_err(|e| CorruptCheckpoint(format!("{what}: {e}")))
}

fn adam_from(m: &[f64], v: &[f64], t: u64, lr: f64, expected: usize) -> Result<Adam, CorruptCheckpoint> {
    if m.len() != expected || v.len() != expected {
        return Err(CorruptCheckpoint("optimizer state has the wrong length".into()));
    }
    let mut a = Adam::new(expected, lr);
    a.m = m.to_vec();
    a.v = v.to_vec();
    a.t = t;
    Ok(a)
}

impl Trainer {
    /// Generator from sub-stream `(seed, init, 0)`, discriminator from
    /// `(seed, init, 1)`.
    pub fn init(model: &Model, seed: u64, lr: f64) -> anyhow::Result<Self> {
        let disc = Discriminator::init(model.patch_dim(), &mut substream(seed, INIT, 1));
        let mut rng = substream(seed, INIT, 0);
        Ok(match model.gen {
            GenSpec::Lstm(c) => Trainer::Lstm(TrainState::new(Generator::init(c, &mut rng)?, disc, lr)?),
            GenSpec::PatchGan(c) => {
                Trainer::PatchGan(TrainState::new(PatchGanGenerator::init(c, &mut rng)?, disc, lr)?)
            }
        })
    }

    pub fn epochs_done(&self) -> u64 {
        with_state!(self, s => s.epochs_done)
    }

    pub fn epoch(&mut self, data: &PatchTensor, cfg: &TrainConfig) -> anyhow::Result<EpochMetrics> {
        Ok(with_state!(self, s => train_epoch(s, data, cfg)?))
    }

    pub fn sample(&self, n: usize, seed: u64) -> anyhow::Result<Matrix> {
        Ok(with_state!(self, s => sample_images(&s.generator, n, seed)?))
    }

    pub fn image_dim(&self) -> usize {
        with_state!(self, s => s.generator.image_dim())
    }

    pub fn to_checkpoint(&self, meta: KvMap) -> Checkpoint {
        let mut meta = meta;
        with_state!(self, s => {
            meta.set("epoch", s.epochs_done);
            meta.set("gen_adam_t", s.gen_opt.t);
            meta.set("disc_adam_t", s.disc_opt.t);
            Checkpoint {
                meta,
                arrays: vec![
                    s.generator.to_flat(),
                    s.discriminator.to_flat(),
                    s.gen_opt.m.clone(),
                    s.gen_opt.v.clone(),
                    s.disc_opt.m.clone(),
                    s.disc_opt.v.clone(),
                ],
            }
        })
    }

    pub fn from_checkpoint(model: &Model, ckpt: &Checkpoint, lr: f64) -> Result<Self, CorruptCheckpoint> {
        let num = |key: &str| -> Result<u64, CorruptCheckpoint> {
            ckpt.meta
                .get(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CorruptCheckpoint(format!("missing or invalid '{key}'")))
        };
        let (epoch, gen_t, disc_t) = (num("epoch")?, num("gen_adam_t")?, num("disc_adam_t")?);
        let a = &ckpt.arrays;
        let mut disc = Discriminator::zeros(model.patch_dim());
        unpack(&mut disc, &a[1], "discriminator")?;
        let disc_opt = adam_from(&a[4], &a[5], disc_t, lr, disc.param_count())?;
        macro_rules! restore {
            ($gen:expr, $variant:ident) => {{
                let mut gen = $gen.map_err(|e| CorruptCheckpoint(e.to_string()))?;
                unpack(&mut gen, &a[0], "generator")?;
                let gen_opt = adam_from(&a[2], &a[3], gen_t, lr, gen.param_count())?;
                Trainer::$variant(TrainState {
                    generator: gen,
                    discriminator: disc,
                    gen_opt,
                    disc_opt,
                    epochs_done: epoch,
                })
            }};
        }
        Ok(match model.gen {
            GenSpec::Lstm(c) => restore!(Generator::zeros(c), Lstm),
            GenSpec::PatchGan(c) => restore!(PatchGanGenerator::zeros(c), PatchGan),
        })
    }
}
