use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::index::IndexSet;
use super::seqspace::{Weight, WeightFamily};
use crate::error::{Error, Result};
use crate::CMat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    /// `sup |a_kl| (1 + d(k,l))^s`
    Jaffard,
    /// larger of the `(1 + d)^s`-weighted row and column sums
    SchurWeighted,
}

/// A solid matrix algebra with polynomial off-diagonal weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixAlgebraSpec {
    pub kind: AlgebraKind,
    pub s: f64,
    pub membership_threshold: f64,
}

/// Default norm cap used to call a finite matrix a member.
pub const DEFAULT_MEMBERSHIP_THRESHOLD: f64 = 10.0;

impl MatrixAlgebraSpec {
    pub fn jaffard(s: f64) -> Self {
        Self {
            kind: AlgebraKind::Jaffard,
            s,
            membership_threshold: DEFAULT_MEMBERSHIP_THRESHOLD,
        }
    }

    pub fn schur_weighted(s: f64) -> Self {
        Self {
            kind: AlgebraKind::SchurWeighted,
            s,
            membership_threshold: DEFAULT_MEMBERSHIP_THRESHOLD,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.membership_threshold = threshold;
        self
    }

    /// Checks `s > d` for the lattice dimension of `index`.
    pub fn validate_for(&self, index: &IndexSet) -> Result<()> {
        if self.s > index.dim() as f64 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "decay exponent s = {} must exceed the lattice dimension {}",
                self.s,
                index.dim()
            )))
        }
    }

    pub fn norm(&self, a: &CMat, rows: &IndexSet, cols: &IndexSet) -> Result<f64> {
        match self.kind {
            AlgebraKind::Jaffard => jaffard_norm(a, rows, cols, self.s),
            AlgebraKind::SchurWeighted => schur_weighted_norm(a, rows, cols, self.s),
        }
    }

    /// Constant `C` with `|A B| <= C |A| |B|` over the given geometries.
    ///
    /// Computed exactly from the envelope `(1 + d)^s`, so it accounts for
    /// distances that only approximately satisfy the triangle inequality
    /// across different index sets.
    pub fn product_constant(&self, rows: &IndexSet, mid: &IndexSet, cols: &IndexSet) -> f64 {
        let env = |d: f64| (1.0 + d).powf(self.s);
        let d_rm = IndexSet::distance_table(rows, mid).map(env);
        let d_mc = IndexSet::distance_table(mid, cols).map(env);
        let d_rc = IndexSet::distance_table(rows, cols).map(env);
        let mut c = 0.0f64;
        for k in 0..rows.len() {
            for l in 0..cols.len() {
                match self.kind {
                    AlgebraKind::Jaffard => {
                        let sum: f64 = (0..mid.len())
                            .map(|j| d_rc[(k, l)] / (d_rm[(k, j)] * d_mc[(j, l)]))
                            .sum();
                        c = c.max(sum);
                    }
                    AlgebraKind::SchurWeighted => {
                        for j in 0..mid.len() {
                            c = c.max(d_rc[(k, l)] / (d_rm[(k, j)] * d_mc[(j, l)]));
                        }
                    }
                }
            }
        }
        c
    }
}

fn check_shape(a: &CMat, rows: &IndexSet, cols: &IndexSet) -> Result<()> {
    if a.nrows() != rows.len() {
        return Err(Error::dim(rows.len(), a.nrows()));
    }
    if a.ncols() != cols.len() {
        return Err(Error::dim(cols.len(), a.ncols()));
    }
    Ok(())
}

pub fn jaffard_norm(a: &CMat, rows: &IndexSet, cols: &IndexSet, s: f64) -> Result<f64> {
    check_shape(a, rows, cols)?;
    let mut sup = 0.0f64;
    for l in 0..a.ncols() {
        for k in 0..a.nrows() {
            let d = rows.cross_distance(k, cols, l);
            sup = sup.max(a[(k, l)].norm() * (1.0 + d).powf(s));
        }
    }
    Ok(sup)
}

pub fn schur_weighted_norm(a: &CMat, rows: &IndexSet, cols: &IndexSet, s: f64) -> Result<f64> {
    check_shape(a, rows, cols)?;
    let mut row_sums = vec![0.0f64; a.nrows()];
    let mut col_sums = vec![0.0f64; a.ncols()];
    for l in 0..a.ncols() {
        for k in 0..a.nrows() {
            let d = rows.cross_distance(k, cols, l);
            let v = a[(k, l)].norm() * (1.0 + d).powf(s);
            row_sums[k] += v;
            col_sums[l] += v;
        }
    }
    let r = row_sums.into_iter().fold(0.0, f64::max);
    let c = col_sums.into_iter().fold(0.0, f64::max);
    Ok(r.max(c))
}

/// Log-log regression of off-diagonal decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub fitted_exponent: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// `(distance, max |entry|)` per distance shell, increasing distance.
    pub shell_maxima: Vec<(f64, f64)>,
    /// A semi-log (exponential) model fits markedly better than a power law.
    pub exponential_like: bool,
}

/// Shell maxima below this are dropped from the fit.
pub const SHELL_FLOOR: f64 = 1e-14;

fn shell_maxima(a: &CMat, rows: &IndexSet, cols: &IndexSet) -> Vec<(f64, f64)> {
    let mut shells: std::collections::BTreeMap<i64, (f64, f64)> = Default::default();
    for l in 0..a.ncols() {
        for k in 0..a.nrows() {
            let d = rows.cross_distance(k, cols, l);
            let key = (d * 1e6).round() as i64;
            let entry = shells.entry(key).or_insert((d, 0.0));
            entry.1 = entry.1.max(a[(k, l)].norm());
        }
    }
    shells.into_values().collect()
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

pub fn decay_fit(a: &CMat, rows: &IndexSet, cols: &IndexSet) -> Result<DecayFit> {
    check_shape(a, rows, cols)?;
    let all = shell_maxima(a, rows, cols);
    let usable: Vec<(f64, f64)> = all.iter().cloned().filter(|&(_, m)| m >= SHELL_FLOOR).collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 4 distance shells above {SHELL_FLOOR:e}, found {}",
            usable.len()
        )));
    }
    let y: Vec<f64> = usable.iter().map(|s| s.1.ln()).collect();
    let xlog: Vec<f64> = usable.iter().map(|s| (1.0 + s.0).ln()).collect();
    let xlin: Vec<f64> = usable.iter().map(|s| s.0).collect();
    let (slope, _, rms) = least_squares(&xlog, &y);
    let (_, _, rms_exp) = least_squares(&xlin, &y);
    Ok(DecayFit {
        fitted_exponent: -slope,
        residual: rms,
        shell_maxima: usable,
        exponential_like: rms_exp < 0.5 * rms,
    })
}

/// Outcome of [`admissible_weight_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Schur norm of `(1 + d)^{-s} max(w_k/w_l, w_l/w_k)`; bounds every
    /// algebra member on all `l^p_w` at once, up to the member's norm.
    pub worst_p_norm_bound: f64,
    /// `sup (w_k / w_l) (1 + d(k,l))^{-(s - d - 1/2)}` for explicit weights.
    pub moderation_constant: Option<f64>,
}

/// Margin in `|t| <= s - d - margin` for polynomial weights.
pub const ADMISSIBILITY_MARGIN: f64 = 0.5;
/// Largest moderation constant accepted for explicit weights.
pub const EXPLICIT_MODERATION_CAP: f64 = 4.0;

pub fn admissible_weight_check(
    alg: &MatrixAlgebraSpec,
    weight: &Weight,
    index: &IndexSet,
) -> Result<Admissibility> {
    if weight.len() != index.len() {
        return Err(Error::dim(index.len(), weight.len()));
    }
    let w = weight.values();
    if w.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter("weight must be positive".into()));
    }
    let d = index.dim() as f64;
    let budget = alg.s - d - ADMISSIBILITY_MARGIN;
    let dist = IndexSet::distance_table(index, index);
    let n = index.len();
    let envelope = DMatrix::from_fn(n, n, |k, l| {
        let r = w[k] / w[l];
        (1.0 + dist[(k, l)]).powf(-alg.s) * r.max(1.0 / r)
    });
    let row = (0..n).map(|k| envelope.row(k).sum()).fold(0.0, f64::max);
    let col = (0..n).map(|l| envelope.column(l).sum()).fold(0.0, f64::max);
    let bound = row.max(col);

    let (admissible, moderation) = match weight.family() {
        WeightFamily::Unit => (true, None),
        WeightFamily::Polynomial { t } => (t.abs() <= budget, None),
        WeightFamily::Exponential { a } => (*a == 0.0, None),
        WeightFamily::Explicit { .. } => {
            let mut c = 0.0f64;
            for k in 0..n {
                for l in 0..n {
                    c = c.max(w[k] / w[l] * (1.0 + dist[(k, l)]).powf(-budget.max(0.0)));
                }
            }
            (budget >= 0.0 && c <= EXPLICIT_MODERATION_CAP, Some(c))
        }
    };
    Ok(Admissibility {
        admissible,
        worst_p_norm_bound: bound,
        moderation_constant: moderation,
    })
}
