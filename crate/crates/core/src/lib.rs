//! Localized frames and the Galerkin representation of operators.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: index sets with a metric, weights, weighted sequence norms,
//!   solid matrix-algebra norms, decay fits and SVD pseudo-inverses.
//! * [`frames`]: finite frames with their analysis, synthesis, frame and Gram
//!   operators, frame bounds and canonical duals.
//! * [`localization`]: localization reports for frame pairs, coorbit norms,
//!   norm-equivalence constants and inclusion checks.
//! * [`galerkin`]: the matrix of an operator with respect to a pair of frames,
//!   its inverse map, Schur-type boundedness certificates and generalized
//!   condition numbers.
//! * [`solver`]: projection (finite-section) and frame-Galerkin solvers with
//!   conjugate-gradient and Richardson iterations.
//! * [`container`]: the binary matrix container with its JSON sidecar.
//!
//! Everything works with dense complex matrices at desk scale.

pub mod container;
pub mod error;
pub mod frames;
pub mod galerkin;
pub mod linalg;
pub mod localization;
pub mod solver;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use frames::{Frame, FrameBounds, FrameSpec};
pub use linalg::{Exponent, IndexSet, Metric, SeqSpaceSpec, SpaceFamily, Weight, WeightFamily};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<C64>;

/// Default relative rank tolerance for pseudo-inverses and rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// `(0..n).map(f)`, fanned out over the rayon pool when enabled. Order is kept.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Send, F: Fn(usize) -> T + Send + Sync>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}
