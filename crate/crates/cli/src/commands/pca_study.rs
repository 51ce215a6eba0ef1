use std::fmt::Write as _;
use std::fs;

use anyhow::Context;
use qgan_core::eval::mean_nearest_neighbor_correlation;
use qgan_core::linalg::Matrix;
use qgan_core::pca::{reconstruction_mse, PcaModel};
use qgan_core::rng::{substream, uniform};

use super::{create_dir, grid_cols, load_dataset};
use crate::pgm;
use crate::settings::usage;
use crate::PcaStudyArgs;

/// Sub-stream for the uniform-noise comparison images.
pub const NOISE_IMAGES_STREAM: &str = "pca-noise";

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub k: usize,
    pub n_fit: usize,
    pub retained_variance: f64,
    pub reconstruction_mse: f64,
    /// Mean nearest-neighbour correlation of decoded images to the fit set.
    pub study_correlation: f64,
    /// The same for uniform-noise images.
    pub noise_correlation: f64,
}

impl StudyReport {
    pub fn render(&self) -> String {
        let total = self.retained_variance + self.reconstruction_mse;
        let mut s = String::new();
        let _ = writeln!(s, "components            {}", self.k);
        let _ = writeln!(s, "fit images            {}", self.n_fit);
        let _ = writeln!(s, "retained variance     {:.6} ({:.2}%)", self.retained_variance, 100.0 * self.retained_variance / total);
        let _ = writeln!(s, "reconstruction mse    {:.6}", self.reconstruction_mse);
        let _ = writeln!(s, "nn correlation, pca   {:.6}", self.study_correlation);
        let _ = writeln!(s, "nn correlation, noise {:.6}", self.noise_correlation);
        let _ = writeln!(s, "ratio                 {:.3}", self.study_correlation / self.noise_correlation);
        s
    }
}

pub fn run(a: &PcaStudyArgs) -> anyhow::Result<StudyReport> {
    if a.n == 0 {
        return Err(usage("--n must be positive"));
    }
    let ds = load_dataset(a.data.data.as_deref(), a.data.images.as_deref(), a.data.labels.as_deref())?;
    let fit = ds.take(a.n_fit);
    if a.k == 0 || a.k > fit.image_dim() {
        return Err(usage(format!("--k must be between 1 and {}", fit.image_dim())));
    }
    let model = PcaModel::fit(fit.images(), a.k)?;
    let study = model.random_inverse_study(a.n, a.seed)?;
    let mut rng = substream(a.seed, NOISE_IMAGES_STREAM, 0);
    let mut noise = Matrix::zeros(a.n, fit.image_dim());
    noise.as_mut_slice().iter_mut().for_each(|v| *v = uniform(&mut rng, 0.0, 1.0));

    let report = StudyReport {
        k: a.k,
        n_fit: fit.len(),
        retained_variance: model.eigenvalues().iter().sum(),
        reconstruction_mse: reconstruction_mse(&model, fit.images())?,
        study_correlation: mean_nearest_neighbor_correlation(&study, fit.images())?,
        noise_correlation: mean_nearest_neighbor_correlation(&noise, fit.images())?,
    };

    create_dir(&a.out)?;
    let (rows, cols) = (fit.rows(), fit.cols());
    for i in 0..study.rows() {
        pgm::write(&a.out.join(format!("study-{i:04}.pgm")), rows, cols, study.row(i))?;
    }
    let (px, h, w) = pgm::tile(&study, rows, cols, grid_cols(a.n));
    pgm::write(&a.out.join("study-grid.pgm"), h, w, &px)?;
    let (px, h, w) = pgm::tile(&noise, rows, cols, grid_cols(a.n));
    pgm::write(&a.out.join("noise-grid.pgm"), h, w, &px)?;

    let mut spectrum = String::from("component,eigenvalue\n");
    for (i, v) in model.spectrum().iter().enumerate() {
        writeln!(spectrum, "{},{v}", i + 1)?;
    }
    fs::write(a.out.join("spectrum.csv"), spectrum).context("writing spectrum.csv")?;
    let text = report.render();
    fs::write(a.out.join("summary.txt"), &text).context("writing summary.txt")?;
    print!("{text}");
    Ok(report)
}
