use std::path::Path;

use qgan_core::data::ImageDataset;

use crate::idx;
use crate::settings::usage;

pub mod fid;
pub mod generate;
pub mod pca_study;
pub mod resources;
pub mod train;

pub(crate) fn load_dataset(dir: Option<&Path>, images: Option<&Path>, labels: Option<&Path>) -> anyhow::Result<ImageDataset> {
    match (dir, images, labels) {
        (Some(d), _, _) => idx::load_dir(d),
        (None, Some(i), Some(l)) => idx::load_idx(i, l),
        _ => Err(usage("no dataset given: pass --data DIR or --images FILE --labels FILE")),
    }
}

pub(crate) fn create_dir(dir: &Path) -> anyhow::Result<()> {
    use anyhow::Context;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Square-ish grid width for `n` tiles.
pub(crate) fn grid_cols(n: usize) -> usize {
    let mut c = 1;
    while c * c < n {
        c += 1;
    }
    c
}
