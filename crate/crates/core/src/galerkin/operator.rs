use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::{CMat, CVec, C64};

type ApplyFn = Arc<dyn Fn(&CVec) -> CVec + Send + Sync>;

/// Linear map `C^cols -> C^rows`, dense or given by its action.
#[derive(Clone)]
pub enum LinearOperator {
    Dense(CMat),
    Closure {
        rows: usize,
        cols: usize,
        apply: ApplyFn,
        adjoint: Option<ApplyFn>,
    },
}

impl fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearOperator::Dense(m) => write!(f, "Dense({}x{})", m.nrows(), m.ncols()),
            LinearOperator::Closure { rows, cols, adjoint, .. } => write!(
                f,
                "Closure({rows}x{cols}, adjoint: {})",
                adjoint.is_some()
            ),
        }
    }
}

impl From<CMat> for LinearOperator {
    fn from(m: CMat) -> Self {
        LinearOperator::Dense(m)
    }
}

impl LinearOperator {
    pub fn identity(n: usize) -> Self {
        LinearOperator::Dense(CMat::identity(n, n))
    }

    pub fn closure(
        rows: usize,
        cols: usize,
        apply: impl Fn(&CVec) -> CVec + Send + Sync + 'static,
        adjoint: Option<Box<dyn Fn(&CVec) -> CVec + Send + Sync + 'static>>,
    ) -> Self {
        LinearOperator::Closure {
            rows,
            cols,
            apply: Arc::new(apply),
            adjoint: adjoint.map(Arc::from),
        }
    }

    /// `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            LinearOperator::Dense(m) => m.shape(),
            LinearOperator::Closure { rows, cols, .. } => (*rows, *cols),
        }
    }

    pub fn apply(&self, x: &CVec) -> Result<CVec> {
        let (r, c) = self.shape();
        if x.len() != c {
            return Err(Error::dim(c, x.len()));
        }
        let y = match self {
            LinearOperator::Dense(m) => m * x,
            LinearOperator::Closure { apply, .. } => apply(x),
        };
        if y.len() != r {
            return Err(Error::Contract(format!(
                "operator returned length {} instead of {r}",
                y.len()
            )));
        }
        Ok(y)
    }

    pub fn apply_adjoint(&self, y: &CVec) -> Result<CVec> {
        let (r, c) = self.shape();
        if y.len() != r {
            return Err(Error::dim(r, y.len()));
        }
        match self {
            LinearOperator::Dense(m) => Ok(m.ad_mul(y)),
            LinearOperator::Closure { adjoint: Some(adj), .. } => {
                let x = adj(y);
                if x.len() != c {
                    return Err(Error::Contract("adjoint returned wrong length".into()));
                }
                Ok(x)
            }
            LinearOperator::Closure { .. } => Ok(self.to_dense().ad_mul(y)),
        }
    }

    /// Columns `O e_l`; closures are probed column by column.
    pub fn to_dense(&self) -> CMat {
        match self {
            LinearOperator::Dense(m) => m.clone(),
            LinearOperator::Closure { rows, cols, apply, .. } => {
                let columns = crate::par_map(*cols, |l| {
                    let mut e = CVec::zeros(*cols);
                    e[l] = C64::new(1.0, 0.0);
                    apply(&e)
                });
                let mut m = CMat::zeros(*rows, *cols);
                for (l, col) in columns.into_iter().enumerate() {
                    m.set_column(l, &col);
                }
                m
            }
        }
    }

    /// Applies the operator to every column of `x`.
    pub fn apply_columns(&self, x: &CMat) -> Result<CMat> {
        let (r, c) = self.shape();
        if x.nrows() != c {
            return Err(Error::dim(c, x.nrows()));
        }
        match self {
            LinearOperator::Dense(m) => Ok(m * x),
            LinearOperator::Closure { apply, .. } => {
                let cols = crate::par_map(x.ncols(), |l| apply(&x.column(l).into_owned()));
                let mut out = CMat::zeros(r, x.ncols());
                for (l, col) in cols.into_iter().enumerate() {
                    if col.len() != r {
                        return Err(Error::Contract("operator returned wrong length".into()));
                    }
                    out.set_column(l, &col);
                }
                Ok(out)
            }
        }
    }

    pub fn scaled(&self, alpha: C64) -> LinearOperator {
        match self {
            LinearOperator::Dense(m) => LinearOperator::Dense(m * alpha),
            LinearOperator::Closure { rows, cols, apply, adjoint } => {
                let a = apply.clone();
                let adj = adjoint.clone();
                LinearOperator::Closure {
                    rows: *rows,
                    cols: *cols,
                    apply: Arc::new(move |x| a(x) * alpha),
                    adjoint: adj.map(|f| -> ApplyFn { Arc::new(move |y| f(y) * alpha.conj()) }),
                }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        let (r1, c1) = self.shape();
        let (r2, c2) = other.shape();
        if c1 != r2 {
            return Err(Error::dim(c1, r2));
        }
        if let (LinearOperator::Dense(a), LinearOperator::Dense(b)) = (self, other) {
            return Ok(LinearOperator::Dense(a * b));
        }
        let (a, b) = (self.clone(), other.clone());
        let (aa, bb) = (self.clone(), other.clone());
        Ok(LinearOperator::Closure {
            rows: r1,
            cols: c2,
            apply: Arc::new(move |x| a.apply(&b.apply(x).expect("shape checked")).expect("shape checked")),
            adjoint: Some(Arc::new(move |y| {
                bb.apply_adjoint(&aa.apply_adjoint(y).expect("shape checked"))
                    .expect("shape checked")
            })),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{random_cmat, random_cvec, seeded};

    #[test]
    fn closure_matches_dense() {
        let mut rng = seeded(1);
        let m = random_cmat(5, 4, &mut rng);
        let mc = m.clone();
        let op = LinearOperator::closure(5, 4, move |x| &mc * x, None);
        assert_eq!(op.to_dense(), m);
        let y = random_cvec(5, &mut rng);
        assert!((op.apply_adjoint(&y).unwrap() - m.ad_mul(&y)).norm() < 1e-12);
    }

    #[test]
    fn linearity_on_probes() {
        let mut rng = seeded(2);
        let m = random_cmat(6, 6, &mut rng);
        let op = LinearOperator::closure(6, 6, move |x| &m * x, None);
        let (f, g) = (random_cvec(6, &mut rng), random_cvec(6, &mut rng));
        let (a, b) = (C64::new(0.3, -1.2), C64::new(2.0, 0.5));
        let lhs = op.apply(&(&f * a + &g * b)).unwrap();
        let rhs = op.apply(&f).unwrap() * a + op.apply(&g).unwrap() * b;
        assert!((lhs - rhs).norm() <= 1e-12 * (f.norm() + g.norm()) * 10.0);
    }

    #[test]
    fn compose_and_shape_errors() {
        let a = LinearOperator::Dense(CMat::identity(3, 2));
        let b = LinearOperator::Dense(CMat::identity(2, 4));
        assert_eq!(a.compose(&b).unwrap().shape(), (3, 4));
        assert!(b.compose(&a).is_err());
        assert!(a.apply(&CVec::zeros(3)).is_err());
    }
}
