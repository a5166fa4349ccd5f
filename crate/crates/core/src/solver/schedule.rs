use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::galerkin::LinearOperator;
use crate::linalg::hermitian_eigen;
use crate::{CMat, CVec, C64, RANK_TOL};

/// Smallest level of the default schedule.
pub const FIRST_LEVEL: usize = 8;

/// Cap on `D_N / C_N` before the uniform-bounds monitor raises a flag.
pub const SUBFRAME_RATIO_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Members ordered by distance to the lattice origin.
    Centered,
    /// Members ordered by `|<y, psi_k>|`, largest first.
    Greedy,
}

impl FromStr for Selection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(Selection::Centered),
            "greedy" | "energy_greedy" => Ok(Selection::Greedy),
            other => Err(Error::InvalidParameter(format!("unknown schedule '{other}'"))),
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::Centered => "centered",
            Selection::Greedy => "greedy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub selection: Selection,
    /// Keep only the last `levels` sizes; the final level is always `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default = "default_first")]
    pub first: usize,
}

fn default_first() -> usize {
    FIRST_LEVEL
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            selection: Selection::Centered,
            levels: None,
            first: FIRST_LEVEL,
        }
    }
}

impl ScheduleSpec {
    /// `first, 2 first, 4 first, ... , k`, strictly increasing.
    pub fn sizes(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut s = self.first.max(1);
        while s < k {
            out.push(s);
            s *= 2;
        }
        out.push(k);
        if let Some(l) = self.levels {
            let l = l.max(1);
            if out.len() > l {
                out.drain(..out.len() - l);
            }
        }
        out
    }
}

/// Subframe `{psi_k : k in K_N}` together with an orthonormal basis of its span.
#[derive(Debug, Clone)]
pub struct SubframeLevel {
    pub indices: Vec<usize>,
    /// Orthonormal basis of `V_N`, eigenvectors of `S_N` with nonzero eigenvalue.
    pub basis: CMat,
    /// Nonzero eigenvalues of `S_N`, ascending.
    pub spectrum: Vec<f64>,
    vectors: CMat,
}

impl SubframeLevel {
    pub fn new(frame: &Frame, indices: &[usize]) -> Result<Self> {
        let sub = frame.subframe(indices)?;
        let v = sub.vectors().clone();
        let (vals, vecs) = hermitian_eigen(&(&v * v.adjoint()));
        let top = vals.last().cloned().unwrap_or(0.0);
        if top <= 0.0 {
            return Err(Error::Precondition("subset spans the zero subspace".into()));
        }
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > RANK_TOL * top).collect();
        let basis = CMat::from_fn(v.nrows(), keep.len(), |r, c| vecs[(r, keep[c])]);
        Ok(Self {
            indices: indices.to_vec(),
            basis,
            spectrum: keep.iter().map(|&i| vals[i]).collect(),
            vectors: v,
        })
    }

    /// `dim V_N`.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Frame bounds `(C_N, D_N)` of the subframe on `V_N`.
    pub fn bounds(&self) -> (f64, f64) {
        (self.spectrum[0], *self.spectrum.last().expect("nonempty"))
    }

    /// `P_N = Q Q^H`.
    pub fn projection_matrix(&self) -> CMat {
        &self.basis * self.basis.adjoint()
    }

    /// Canonical dual within `V_N`: `S_N^+ psi_k`.
    pub fn dual_vectors(&self) -> CMat {
        let inv = CVec::from_iterator(self.dim(), self.spectrum.iter().map(|&l| C64::new(1.0 / l, 0.0)));
        &self.basis * CMat::from_diagonal(&inv) * self.basis.ad_mul(&self.vectors)
    }

    /// Subframe members as columns.
    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }
}

/// Orthogonal projection onto `span{psi_k : k in subset}`.
pub fn subframe_projection(frame: &Frame, subset: &[usize]) -> Result<LinearOperator> {
    Ok(LinearOperator::Dense(SubframeLevel::new(frame, subset)?.projection_matrix()))
}

/// Nested index subsets `K_1 ⊂ K_2 ⊂ ... ⊂ K` with their subframes.
#[derive(Debug, Clone)]
pub struct ProjectionSchedule {
    pub frame_id: String,
    pub selection: Option<Selection>,
    pub levels: Vec<SubframeLevel>,
}

impl ProjectionSchedule {
    /// Prefixes of the selection order at the sizes of `spec`.
    pub fn build(frame: &Frame, spec: &ScheduleSpec, y: Option<&CVec>) -> Result<Self> {
        let order = match spec.selection {
            Selection::Centered => centered_order(frame),
            Selection::Greedy => {
                let y = y.ok_or_else(|| Error::InvalidParameter("greedy schedule needs a right-hand side".into()))?;
                greedy_order(frame, y)?
            }
        };
        let sizes = spec.sizes(frame.len());
        let mut s = Self::from_levels(frame, sizes.iter().map(|&n| order[..n].to_vec()).collect())?;
        s.selection = Some(spec.selection);
        Ok(s)
    }

    /// Explicit levels; must be strictly nested and end with the full index set.
    pub fn from_levels(frame: &Frame, levels: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParameter("schedule without levels".into()));
        }
        for w in levels.windows(2) {
            let nested = w[0].len() < w[1].len() && w[0].iter().all(|k| w[1].contains(k));
            if !nested {
                return Err(Error::InvalidParameter("schedule levels are not strictly nested".into()));
            }
        }
        let last = levels.last().expect("nonempty");
        let mut full = last.clone();
        full.sort_unstable();
        full.dedup();
        if full.len() != frame.len() || last.len() != frame.len() {
            return Err(Error::InvalidParameter("final level must be the full index set".into()));
        }
        let built = crate::par_map(levels.len(), |i| SubframeLevel::new(frame, &levels[i]));
        Ok(Self {
            frame_id: frame.id().to_string(),
            selection: None,
            levels: built.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.levels[0].basis.nrows()
    }

    /// Largest `D_N / C_N` over the levels.
    pub fn worst_bound_ratio(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| {
                let (c, d) = l.bounds();
                d / c
            })
            .fold(1.0, f64::max)
    }
}

fn centered_order(frame: &Frame) -> Vec<usize> {
    let idx = frame.index_set();
    let mut order: Vec<usize> = (0..frame.len()).collect();
    order.sort_by(|&a, &b| idx.magnitude(a).total_cmp(&idx.magnitude(b)).then(a.cmp(&b)));
    order
}

fn greedy_order(frame: &Frame, y: &CVec) -> Result<Vec<usize>> {
    let c = frame.analysis(y)?;
    let mut order: Vec<usize> = (0..frame.len()).collect();
    order.sort_by(|&a, &b| c[b].norm().total_cmp(&c[a].norm()).then(a.cmp(&b)));
    Ok(order)
}
