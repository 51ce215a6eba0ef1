//! Core algorithms for a QLSTM-driven patched quantum GAN.
//!
//! Everything here is `no_std` (with `alloc`): a dense statevector simulator
//! with parameter-shift gradients, the hardware-efficient ansatz and its
//! resource accounting, a QLSTM cell whose four gates are variational
//! circuits, the generator/discriminator pair with BCE and Wasserstein-GP
//! losses, PCA, and the Frechet distance used for evaluation. File formats,
//! IO and the command line live in the `qgan` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ansatz;
pub mod data;
mod error;
pub mod eval;
pub mod gan;
pub mod linalg;
pub mod math;
pub mod params;
pub mod pca;
pub mod qlstm;
pub mod qsim;
pub mod rng;

pub use error::{Error, Result};
