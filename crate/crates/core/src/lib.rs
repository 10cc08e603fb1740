//! Significance testing for the modes of a kernel density estimate.
//!
//! Candidate modes come from mean shift on one half of the sample. Each is
//! then tested on the other half by bootstrapping the Hessian eigenvalues of
//! the kernel estimate, mapped through elementary symmetric polynomials so
//! that repeated eigenvalues do not break the bootstrap. A superlevel-set
//! persistence test and a bandwidth selector built on the mode test are
//! included.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandwidth;
pub mod boot;
pub mod data;
pub mod error;
pub mod esp;
pub mod kde;
pub mod linalg;
pub mod modes;
pub mod modetest;
pub mod persist;
pub mod synth;

pub use bandwidth::{scan, BandwidthScan};
pub use boot::{EigenPortrait, Interval};
pub use data::DataMatrix;
pub use error::{Error, Result};
pub use esp::{EigenValues, EspVector};
pub use kde::{DensityModel, HessianEval, Kernel};
pub use linalg::SymMatrix;
pub use modes::{find_modes, MeanShiftOptions, ModeCandidate};
pub use modetest::{run_mode_test, ModeTestConfig, ModeTestReport};
pub use persist::{GridFunction, PersistenceDiagram, PersistencePair};
pub use synth::{generate, GeneratorSpec};
