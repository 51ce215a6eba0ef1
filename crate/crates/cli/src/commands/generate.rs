use std::path::Path;

use qgan_core::linalg::Matrix;

use super::create_dir;
use crate::checkpoint::Checkpoint;
use crate::model::{Model, Trainer};
use crate::pgm;
use crate::GenerateArgs;

/// Model and trainer restored from a checkpoint file.
pub fn load_checkpoint(path: &Path) -> anyhow::Result<(Model, Trainer)> {
    let ckpt = Checkpoint::load(path)?;
    let model = Model::from_meta(&ckpt.meta)?;
    let lr = ckpt.meta.get("lr").and_then(|v| v.parse().ok()).unwrap_or(0.0);
    let trainer = Trainer::from_checkpoint(&model, &ckpt, lr)?;
    Ok((model, trainer))
}

pub fn sample_checkpoint(path: &Path, n: usize, seed: u64) -> anyhow::Result<(Model, Matrix)> {
    let (model, trainer) = load_checkpoint(path)?;
    Ok((model, trainer.sample(n, seed)?))
}

pub fn run(a: &GenerateArgs) -> anyhow::Result<()> {
    let (model, images) = sample_checkpoint(&a.checkpoint, a.n, a.seed)?;
    create_dir(&a.out)?;
    for i in 0..images.rows() {
        pgm::write(&a.out.join(format!("gen-{i:05}.pgm")), model.rows, model.cols, images.row(i))?;
    }
    if let Some(c) = a.grid_cols.filter(|_| a.n > 0) {
        let (px, h, w) = pgm::tile(&images, model.rows, model.cols, c.max(1));
        pgm::write(&a.out.join("grid.pgm"), h, w, &px)?;
    }
    log::info!("wrote {} images to {}", images.rows(), a.out.display());
    Ok(())
}
