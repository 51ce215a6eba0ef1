use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use log::info;
use qgan_core::gan::{EpochMetrics, LossKind, TrainConfig};

use super::{create_dir, grid_cols, load_dataset};
use crate::checkpoint::Checkpoint;
use crate::model::{Model, Trainer};
use crate::pgm;
use crate::settings::{usage, KvMap, Layers};
use crate::TrainArgs;

pub const METRICS_HEADER: &str = "epoch,gl,dl,penalty,wall_seconds";

pub struct TrainOutcome {
    pub model: Model,
    pub trainer: Trainer,
    /// Epochs run by this invocation.
    pub metrics: Vec<EpochMetrics>,
}

pub fn checkpoint_path(out: &Path, epoch: u64) -> PathBuf {
    out.join(format!("checkpoint-{epoch:04}.qlg"))
}

pub fn samples_path(out: &Path, epoch: u64) -> PathBuf {
    out.join(format!("samples-{epoch:04}.pgm"))
}

fn flag_layer(a: &TrainArgs) -> KvMap {
    let mut m = KvMap::default();
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    m.set_opt("data", path(&a.data.data));
    m.set_opt("images", path(&a.data.images));
    m.set_opt("labels", path(&a.data.labels));
    m.set_opt("arch", a.arch.clone());
    if a.toy {
        m.set("toy", true);
    }
    m.set_opt("qubits", a.qubits);
    m.set_opt("reps", a.reps);
    m.set_opt("layers", a.layers);
    m.set_opt("hidden", a.hidden.clone());
    m.set_opt("steps", a.steps);
    m.set_opt("patch_pixels", a.patch_pixels);
    m.set_opt("loss", a.loss.clone());
    m.set_opt("lambda", a.lambda);
    m.set_opt("epochs", a.epochs);
    m.set_opt("batch", a.batch);
    m.set_opt("lr", a.lr);
    m.set_opt("critic_steps", a.critic_steps);
    m.set_opt("seed", a.seed);
    m.set_opt("limit", a.limit);
    m.set_opt("digit", a.digit);
    m.set_opt("save_every", a.save_every);
    m.set_opt("grid", a.grid);
    m
}

/// Keeps the header and rows up to `epochs_done`, so a run resumed from an
/// earlier checkpoint rewrites the later rows.
fn restart_metrics(path: &Path, epochs_done: u64) -> anyhow::Result<String> {
    let mut out = format!("{METRICS_HEADER}\n");
    if epochs_done == 0 || !path.exists() {
        return Ok(out);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    for line in text.lines().skip(1) {
        let epoch: u64 = line.split(',').next().and_then(|e| e.parse().ok()).unwrap_or(u64::MAX);
        if epoch <= epochs_done {
            writeln!(out, "{line}")?;
        }
    }
    Ok(out)
}

pub fn run(a: &TrainArgs) -> anyhow::Result<TrainOutcome> {
    let file = a.config.as_deref().map(KvMap::read).transpose()?.unwrap_or_default();
    let resumed = a.resume.as_deref().map(Checkpoint::load).transpose()?;
    let ckpt_layer = resumed.as_ref().map(|c| c.meta.clone()).unwrap_or_default();
    let mut s = Layers::new(vec![flag_layer(a), file, ckpt_layer]);

    let data = s.opt::<String>("data")?;
    let images = s.opt::<String>("images")?;
    let labels = s.opt::<String>("labels")?;
    let model = Model::resolve(&mut s)?;
    let loss: LossKind = s.get("loss", LossKind::WassersteinGp)?;
    let seed: u64 = s.get("seed", 0)?;
    let cfg = TrainConfig {
        learning_rate: s.get("lr", 2e-4)?,
        batch_size: s.get("batch", 128)?,
        epochs: 0,
        loss,
        lambda_gp: s.get("lambda", 10.0)?,
        critic_steps: s.get("critic_steps", loss.default_critic_steps())?,
        seed,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let epochs: u64 = s.get("epochs", 100)?;
    let limit = s.opt::<usize>("limit")?;
    let digit = s.opt::<u8>("digit")?;
    if digit.is_some_and(|d| d > 9) {
        return Err(usage("--digit must be 0-9"));
    }
    let save_every: u64 = s.get("save_every", 10)?;
    let grid: usize = s.get("grid", 16)?;
    if save_every == 0 {
        return Err(usage("save_every must be positive"));
    }

    let mut trainer = match &resumed {
        Some(ckpt) => {
            if Model::from_meta(&ckpt.meta)? != model {
                return Err(usage("model settings differ from the resumed checkpoint"));
            }
            Trainer::from_checkpoint(&model, ckpt, cfg.learning_rate)?
        }
        None => Trainer::init(&model, seed, cfg.learning_rate)?,
    };

    let raw = load_dataset(
        data.as_deref().map(Path::new),
        images.as_deref().map(Path::new),
        labels.as_deref().map(Path::new),
    )?;
    let ds = model.prepare(&raw, digit, limit)?;
    let patches = model.patches(&ds)?;
    info!("training on {} images of {}x{}", ds.len(), ds.rows(), ds.cols());

    create_dir(&a.out)?;
    let echo = s.resolved().render();
    for line in echo.lines() {
        info!("config: {line}");
    }
    fs::write(a.out.join("run_config.txt"), &echo).context("writing run_config.txt")?;

    let mut meta = KvMap::default();
    model.write_meta(&mut meta);
    meta.set("loss", cfg.loss);
    meta.set("lambda", cfg.lambda_gp);
    meta.set("batch", cfg.batch_size);
    meta.set("lr", cfg.learning_rate);
    meta.set("critic_steps", cfg.critic_steps);
    meta.set("seed", seed);
    meta.set_opt("limit", limit);
    meta.set_opt("digit", digit);

    let save = |t: &Trainer| -> anyhow::Result<()> {
        let e = t.epochs_done();
        t.to_checkpoint(meta.clone()).save(&checkpoint_path(&a.out, e))?;
        if grid > 0 {
            let imgs = t.sample(grid, seed)?;
            let (px, h, w) = pgm::tile(&imgs, model.rows, model.cols, grid_cols(grid));
            pgm::write(&samples_path(&a.out, e), h, w, &px)?;
        }
        Ok(())
    };

    let metrics_path = a.out.join("metrics.csv");
    fs::write(&metrics_path, restart_metrics(&metrics_path, trainer.epochs_done())?)
        .with_context(|| format!("writing {}", metrics_path.display()))?;
    if trainer.epochs_done() == 0 {
        save(&trainer)?;
    }

    let mut csv = fs::OpenOptions::new().append(true).open(&metrics_path)?;
    let mut metrics = Vec::new();
    while trainer.epochs_done() < epochs {
        let start = Instant::now();
        let m = trainer.epoch(&patches, &cfg)?;
        let secs = start.elapsed().as_secs_f64();
        let wall = if a.no_timing { "0".to_string() } else { format!("{secs:.3}") };
        writeln!(csv, "{},{},{},{},{wall}", m.epoch, m.gen_loss, m.disc_loss, m.penalty)?;
        csv.flush()?;
        info!(
            "epoch {}: gl {:.5} dl {:.5} penalty {:.5} ({secs:.2}s)",
            m.epoch, m.gen_loss, m.disc_loss, m.penalty
        );
        if m.epoch % save_every == 0 || m.epoch == epochs {
            save(&trainer)?;
        }
        metrics.push(m);
    }
    Ok(TrainOutcome { model, trainer, metrics })
}
