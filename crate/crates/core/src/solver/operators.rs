use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::LinearOperator;
use crate::{CMat, C64};

/// Operators used by the solver examples and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestOperator {
    Identity,
    /// `I - theta T`, `T` the circulant with entries `(1+d)^{-exponent}`,
    /// rows normalized to sum one; `||T|| = 1`.
    IdentityMinusKernel { theta: f64, exponent: f64 },
    /// Circulant with entries `log(1 + 1/d^2) cos(omega d)` off the diagonal
    /// and the cell average of `log(1 + 1/x^2)` on it.
    HelmholtzToy {
        #[serde(default)]
        omega: f64,
    },
    Diagonal { values: Vec<f64> },
    /// Adjacency of the path graph; sections have eigenvalues near zero.
    PathAdjacency,
}

/// Smallest dimension accepted for the kernel operators.
pub const MIN_DIM: usize = 4;

fn circular(n: usize, j: usize, k: usize) -> usize {
    let d = j.abs_diff(k);
    d.min(n - d)
}

fn circulant(n: usize, kernel: impl Fn(usize) -> f64) -> CMat {
    let row: Vec<f64> = (0..n).map(|d| kernel(circular(n, 0, d))).collect();
    CMat::from_fn(n, n, |j, k| C64::new(row[(k + n - j) % n], 0.0))
}

impl TestOperator {
    pub fn name(&self) -> &'static str {
        match self {
            TestOperator::Identity => "identity",
            TestOperator::IdentityMinusKernel { .. } => "identity_minus_kernel",
            TestOperator::HelmholtzToy { .. } => "helmholtz_toy",
            TestOperator::Diagonal { .. } => "diagonal",
            TestOperator::PathAdjacency => "path_adjacency",
        }
    }

    /// Dense `n x n` matrix.
    pub fn matrix(&self, n: usize) -> Result<CMat> {
        match self {
            TestOperator::Identity => Ok(CMat::identity(n, n)),
            TestOperator::Diagonal { values } => {
                if values.len() != n {
                    return Err(Error::dim(n, values.len()));
                }
                Ok(CMat::from_fn(n, n, |j, k| if j == k { C64::new(values[j], 0.0) } else { C64::new(0.0, 0.0) }))
            }
            _ if n < MIN_DIM => Err(Error::InvalidParameter(format!("dimension {n} below {MIN_DIM}"))),
            TestOperator::IdentityMinusKernel { theta, exponent } => {
                if !(*exponent >= 2.0) {
                    return Err(Error::InvalidParameter(format!("kernel exponent {exponent} below 2")));
                }
                let kappa = |d: usize| (1.0 + d as f64).powf(-exponent);
                let total: f64 = (0..n).map(|d| kappa(circular(n, 0, d))).sum();
                let t = circulant(n, |d| kappa(d) / total);
                Ok(CMat::identity(n, n) - t * C64::new(*theta, 0.0))
            }
            TestOperator::HelmholtzToy { omega } => {
                let diagonal = 5f64.ln() + 4.0 * 0.5f64.atan();
                Ok(circulant(n, |d| {
                    if d == 0 {
                        diagonal
                    } else {
                        let d = d as f64;
                        (1.0 + 1.0 / (d * d)).ln() * (omega * d).cos()
                    }
                }))
            }
            TestOperator::PathAdjacency => Ok(CMat::from_fn(n, n, |j, k| {
                if j.abs_diff(k) == 1 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })),
        }
    }

    pub fn build(&self, n: usize) -> Result<LinearOperator> {
        self.matrix(n).map(LinearOperator::Dense)
    }

    /// Invertibility is not guaranteed by the parameters.
    pub fn warning(&self) -> Option<String> {
        match self {
            TestOperator::IdentityMinusKernel { theta, .. } if theta.abs() >= 1.0 => {
                Some(format!("|theta| = {} >= 1: I - theta T may fail to be invertible", theta.abs()))
            }
            TestOperator::Diagonal { values } if values.iter().any(|&v| v == 0.0) => {
                Some("diagonal has a zero entry".into())
            }
            TestOperator::PathAdjacency => Some("finite sections are not uniformly invertible".into()),
            _ => None,
        }
    }
}

/// Matrix of `kind` at dimension `n`, as a [`LinearOperator`].
pub fn make_test_operator(kind: &TestOperator, n: usize) -> Result<LinearOperator> {
    kind.build(n)
}
