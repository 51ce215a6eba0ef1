use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use qgan_core::data::{self, ImageDataset};
use qgan_core::eval::{frechet_distance, FeatureMap, FrechetScore};
use qgan_core::linalg::Matrix;
use qgan_core::pca::PcaModel;
use qgan_core::rng::{permutation, substream};

use super::generate::sample_checkpoint;
use super::load_dataset;
use crate::pgm;
use crate::settings::usage;
use crate::FidArgs;

pub const FID_STREAM: &str = "fid";
pub const CSV_HEADER: &str = "label,features,fid,n_real,n_gen";

#[derive(Debug, Clone, PartialEq)]
pub struct FidRow {
    /// `all`, a digit, or `mean`.
    pub label: String,
    pub score: FrechetScore,
}

enum Features {
    Raw,
    Pca(usize),
}

fn class_path(path: &Path, digit: u8) -> PathBuf {
    let s = path.to_string_lossy();
    if s.contains("{digit}") {
        PathBuf::from(s.replace("{digit}", &digit.to_string()))
    } else {
        path.join(digit.to_string())
    }
}

/// At most `n` rows in an order fixed by `(seed, index)`.
fn subsample(m: &Matrix, n: usize, seed: u64, index: u64) -> Matrix {
    if m.rows() <= n {
        return m.clone();
    }
    let order = permutation(&mut substream(seed, FID_STREAM, index), m.rows());
    m.select_rows(&order[..n])
}

fn score(real: &Matrix, generated: &Matrix, features: &Features) -> anyhow::Result<FrechetScore> {
    if real.cols() != generated.cols() {
        anyhow::bail!("real images have {} pixels, generated have {}", real.cols(), generated.cols());
    }
    let map = match *features {
        Features::Raw => FeatureMap::RawPixels,
        Features::Pca(k) => {
            if k == 0 || k > real.cols() {
                return Err(usage(format!("--pca-k must be between 1 and {}", real.cols())));
            }
            FeatureMap::Pca(PcaModel::fit(real, k)?)
        }
    };
    Ok(frechet_distance(&map.apply(real)?, &map.apply(generated)?)?)
}

struct Sources<'a> {
    args: &'a FidArgs,
    dataset: Option<ImageDataset>,
}

impl Sources<'_> {
    fn real(&self, digit: Option<u8>) -> anyhow::Result<Matrix> {
        if let Some(ds) = &self.dataset {
            return Ok(match digit {
                Some(d) => ds.filter_class(d).images().clone(),
                None => ds.images().clone(),
            });
        }
        let dir = self.args.real.as_deref().ok_or_else(|| usage("no real images: pass --real DIR or a dataset"))?;
        let dir = digit.map_or_else(|| dir.to_path_buf(), |d| class_path(dir, d));
        Ok(pgm::load_dir(&dir)?.0)
    }

    fn generated(&self, digit: Option<u8>) -> anyhow::Result<Matrix> {
        let g = &self.args.generated;
        let path = match digit {
            Some(_) if g.is_file() => return Err(usage(format!(
                "per-class scoring needs one source per digit; put {{digit}} in the path instead of {}",
                g.display()
            ))),
            Some(d) => class_path(g, d),
            None => g.clone(),
        };
        if path.is_file() {
            Ok(sample_checkpoint(&path, self.args.n, self.args.seed)?.1)
        } else {
            Ok(pgm::load_dir(&path)?.0)
        }
    }
}

/// Whether the generated side is a toy-profile checkpoint, in which case an
/// IDX real set gets the same preprocessing.
fn checkpoint_is_toy(a: &FidArgs) -> anyhow::Result<bool> {
    let probe = if a.per_class { class_path(&a.generated, 0) } else { a.generated.clone() };
    if !probe.is_file() {
        return Ok(false);
    }
    let ckpt = crate::checkpoint::Checkpoint::load(&probe)?;
    Ok(ckpt.meta.get("toy") == Some("true"))
}

pub fn run(a: &FidArgs) -> anyhow::Result<Vec<FidRow>> {
    let features = match a.features.as_str() {
        "raw" => Features::Raw,
        "pca" => Features::Pca(a.pca_k),
        other => return Err(usage(format!("unknown feature map '{other}' (expected raw or pca)"))),
    };
    let has_dataset = a.data.data.is_some() || a.data.images.is_some();
    let dataset = if has_dataset {
        let ds = load_dataset(a.data.data.as_deref(), a.data.images.as_deref(), a.data.labels.as_deref())?;
        Some(if a.toy || checkpoint_is_toy(a)? { data::toy_profile(&ds)? } else { ds })
    } else if a.real.is_none() {
        return Err(usage("no real images: pass --real DIR, --data DIR or --images/--labels"));
    } else {
        None
    };
    let src = Sources { args: a, dataset };

    let one = |digit: Option<u8>| -> anyhow::Result<FrechetScore> {
        let index = digit.map_or(0, |d| 1 + u64::from(d));
        let real = subsample(&src.real(digit)?, a.n, a.seed, 2 * index);
        let generated = subsample(&src.generated(digit)?, a.n, a.seed, 2 * index + 1);
        score(&real, &generated, &features)
    };

    let mut rows = Vec::new();
    if a.per_class {
        for d in 0..10u8 {
            let s = one(Some(d)).with_context(|| format!("digit {d}"))?;
            rows.push(FidRow { label: d.to_string(), score: s });
        }
        let mean = |f: &dyn Fn(&FrechetScore) -> f64| rows.iter().map(|r| f(&r.score)).sum::<f64>() / 10.0;
        let mean_row = FidRow {
            label: "mean".into(),
            score: FrechetScore {
                value: mean(&|s| s.value),
                n_real: rows.iter().map(|r| r.score.n_real).sum(),
                n_gen: rows.iter().map(|r| r.score.n_gen).sum(),
            },
        };
        rows.push(mean_row);
    } else {
        rows.push(FidRow { label: "all".into(), score: one(None)? });
    }

    for r in &rows {
        println!("{:>5}  fid {:.6}  (real {}, generated {})", r.label, r.score.value, r.score.n_real, r.score.n_gen);
    }
    if let Some(path) = &a.csv {
        let fresh = !path.exists();
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        if fresh {
            writeln!(f, "{CSV_HEADER}")?;
        }
        for r in &rows {
            writeln!(f, "{},{},{},{},{}", r.label, a.features, r.score.value, r.score.n_real, r.score.n_gen)?;
        }
    }
    Ok(rows)
}
