use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance rule on lattice positions.
///
/// Distances are Chebyshev (max over coordinates). `Circular` wraps each
/// coordinate with its period, given in lattice steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Absolute,
    Circular { periods: Vec<i64> },
}

/// Finite index set with lattice positions and a metric.
///
/// `spacing` gives the ambient length of one lattice step per coordinate. It
/// only matters when distances are measured between two different index
/// sets (cross-Gram matrices), where positions are compared in ambient units
/// on the shared leading coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSet {
    labels: Vec<String>,
    positions: Vec<Vec<i64>>,
    spacing: Vec<f64>,
    metric: Metric,
}

impl IndexSet {
    pub fn new(
        labels: Vec<String>,
        positions: Vec<Vec<i64>>,
        spacing: Vec<f64>,
        metric: Metric,
    ) -> Result<Self> {
        if labels.len() != positions.len() {
            return Err(Error::dim(labels.len(), positions.len()));
        }
        let d = spacing.len();
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "lattice dimension must be 1 or 2, got {d}"
            )));
        }
        if positions.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidParameter(
                "every position needs one coordinate per lattice dimension".into(),
            ));
        }
        if spacing.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidParameter("spacing must be positive".into()));
        }
        if let Metric::Circular { periods } = &metric {
            if periods.len() != d || periods.iter().any(|&p| p <= 0) {
                return Err(Error::InvalidParameter(
                    "circular metric needs one positive period per dimension".into(),
                ));
            }
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("index labels must be distinct".into()));
        }
        Ok(Self {
            labels,
            positions,
            spacing,
            metric,
        })
    }

    /// `0..n` on the integer line.
    pub fn line(n: usize) -> Self {
        Self::from_1d((0..n as i64).collect(), 1.0, Metric::Absolute)
    }

    /// `n` consecutive integers centered at the origin.
    pub fn centered_line(n: usize) -> Self {
        let start = -(n as i64) / 2;
        Self::from_1d((start..start + n as i64).collect(), 1.0, Metric::Absolute)
    }

    /// The cyclic group `Z_n`.
    pub fn cycle(n: usize) -> Self {
        Self::cycle_with_spacing(n, 1.0)
    }

    /// `count` points on a cycle, one lattice step being `spacing` ambient units.
    pub fn cycle_with_spacing(count: usize, spacing: f64) -> Self {
        Self::from_1d(
            (0..count as i64).collect(),
            spacing,
            Metric::Circular {
                periods: vec![count as i64],
            },
        )
    }

    /// Product lattice `Z_{n1} x Z_{n2}` with the given step lengths.
    pub fn torus(n1: usize, n2: usize, spacing: (f64, f64)) -> Self {
        let mut labels = Vec::with_capacity(n1 * n2);
        let mut positions = Vec::with_capacity(n1 * n2);
        for m in 0..n1 as i64 {
            for j in 0..n2 as i64 {
                labels.push(format!("({m},{j})"));
                positions.push(vec![m, j]);
            }
        }
        Self {
            labels,
            positions,
            spacing: vec![spacing.0, spacing.1],
            metric: Metric::Circular {
                periods: vec![n1 as i64, n2 as i64],
            },
        }
    }

    fn from_1d(pos: Vec<i64>, spacing: f64, metric: Metric) -> Self {
        Self {
            labels: pos.iter().map(|p| p.to_string()).collect(),
            positions: pos.into_iter().map(|p| vec![p]).collect(),
            spacing: vec![spacing],
            metric,
        }
    }

    /// Same positions repeated `copies` times; labels get a copy suffix.
    pub fn repeated(&self, copies: usize) -> Self {
        let mut labels = Vec::with_capacity(self.len() * copies);
        let mut positions = Vec::with_capacity(self.len() * copies);
        for c in 0..copies {
            for (l, p) in self.labels.iter().zip(&self.positions) {
                labels.push(format!("{l}#{c}"));
                positions.push(p.clone());
            }
        }
        Self {
            labels,
            positions,
            spacing: self.spacing.clone(),
            metric: self.metric.clone(),
        }
    }

    /// Sub-index set in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            positions: indices.iter().map(|&i| self.positions[i].clone()).collect(),
            spacing: self.spacing.clone(),
            metric: self.metric.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.spacing.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn positions(&self) -> &[Vec<i64>] {
        &self.positions
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    fn period(&self, axis: usize) -> Option<i64> {
        match &self.metric {
            Metric::Absolute => None,
            Metric::Circular { periods } => Some(periods[axis]),
        }
    }

    /// Distance between two members, in lattice steps.
    pub fn distance(&self, k: usize, l: usize) -> f64 {
        let (a, b) = (&self.positions[k], &self.positions[l]);
        let mut d = 0i64;
        for axis in 0..self.dim() {
            let mut delta = (a[axis] - b[axis]).abs();
            if let Some(p) = self.period(axis) {
                delta %= p;
                delta = delta.min(p - delta);
            }
            d = d.max(delta);
        }
        d as f64
    }

    /// Distance of member `k` to the lattice origin.
    pub fn magnitude(&self, k: usize) -> f64 {
        let a = &self.positions[k];
        let mut d = 0i64;
        for (axis, &x) in a.iter().enumerate() {
            let mut delta = x.abs();
            if let Some(p) = self.period(axis) {
                delta %= p;
                delta = delta.min(p - delta);
            }
            d = d.max(delta);
        }
        d as f64
    }

    /// Distance between `self[k]` and `other[l]`.
    ///
    /// Compares ambient coordinates on the shared leading axes and measures
    /// the result in the coarser of the two step lengths. Reduces to
    /// [`IndexSet::distance`] when `other == self`.
    pub fn cross_distance(&self, k: usize, other: &IndexSet, l: usize) -> f64 {
        if std::ptr::eq(self, other) {
            return self.distance(k, l);
        }
        let axes = self.dim().min(other.dim());
        let mut d = 0.0f64;
        for axis in 0..axes {
            let (s1, s2) = (self.spacing[axis], other.spacing[axis]);
            let x = self.positions[k][axis] as f64 * s1;
            let y = other.positions[l][axis] as f64 * s2;
            let mut delta = (x - y).abs();
            let period = self
                .period(axis)
                .map(|p| p as f64 * s1)
                .or_else(|| other.period(axis).map(|p| p as f64 * s2));
            if let Some(p) = period {
                delta %= p;
                delta = delta.min(p - delta);
            }
            d = d.max(delta / s1.max(s2));
        }
        d
    }

    /// Table of `cross_distance` for all row/column pairs.
    pub fn distance_table(rows: &IndexSet, cols: &IndexSet) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |k, l| rows.cross_distance(k, cols, l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_axioms_on_torus() {
        let ix = IndexSet::torus(6, 4, (2.0, 3.0));
        for k in 0..ix.len() {
            assert_eq!(ix.distance(k, k), 0.0);
            for l in 0..ix.len() {
                assert!(ix.distance(k, l) >= 0.0);
                assert_eq!(ix.distance(k, l), ix.distance(l, k));
            }
        }
    }

    #[test]
    fn circular_distance_wraps() {
        let ix = IndexSet::cycle(8);
        assert_eq!(ix.distance(0, 7), 1.0);
        assert_eq!(ix.distance(1, 5), 4.0);
        let line = IndexSet::line(8);
        assert_eq!(line.distance(0, 7), 7.0);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = IndexSet::new(
            vec!["a".into(), "a".into()],
            vec![vec![0], vec![1]],
            vec![1.0],
            Metric::Absolute,
        );
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn cross_distance_matches_self_distance_for_equal_sets() {
        let a = IndexSet::torus(4, 4, (4.0, 4.0));
        let b = a.clone();
        for k in 0..a.len() {
            for l in 0..a.len() {
                assert_eq!(a.cross_distance(k, &b, l), a.distance(k, l));
            }
        }
    }

    #[test]
    fn cross_distance_uses_shared_time_axis() {
        let gabor = IndexSet::torus(4, 4, (4.0, 4.0));
        let onb = IndexSet::cycle(16);
        // (m=1, j=3) sits at time 4; sample 5 is one sample away, under one coarse step.
        let k = 4 + 3;
        assert!((gabor.cross_distance(k, &onb, 5) - 0.25).abs() < 1e-12);
        // wrap-around: time 0 vs sample 15
        assert!((gabor.cross_distance(0, &onb, 15) - 0.25).abs() < 1e-12);
    }
}
