use serde::{Deserialize, Serialize};

use super::index::IndexSet;
use crate::error::{Error, Result};
use crate::C64;

/// Exponent of a weighted sequence space.
///
/// `Zero` is the closed subspace of sequences tending to zero. On a finite
/// index set it carries the sup norm, same as `Inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Exponent {
    One,
    Two,
    Finite(f64),
    Inf,
    Zero,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Exponent::One)
        } else if p == 2.0 {
            Ok(Exponent::Two)
        } else if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Inf)
        } else if p == 0.0 {
            Ok(Exponent::Zero)
        } else if p > 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "sequence exponent must be 0 or in [1, inf], got {p}"
            )))
        }
    }

    /// Numeric exponent; `Zero` maps to infinity.
    pub fn value(self) -> f64 {
        match self {
            Exponent::One => 1.0,
            Exponent::Two => 2.0,
            Exponent::Finite(p) => p,
            Exponent::Inf | Exponent::Zero => f64::INFINITY,
        }
    }

    /// Hölder conjugate, with the dual of `Zero` being `One`.
    pub fn dual(self) -> Self {
        match self {
            Exponent::One => Exponent::Inf,
            Exponent::Two => Exponent::Two,
            Exponent::Finite(p) => Exponent::new(p / (p - 1.0)).expect("conjugate of p > 1"),
            Exponent::Inf | Exponent::Zero => Exponent::One,
        }
    }

    pub fn is_sup(self) -> bool {
        matches!(self, Exponent::Inf | Exponent::Zero)
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::One => write!(f, "1"),
            Exponent::Two => write!(f, "2"),
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Inf => write!(f, "inf"),
            Exponent::Zero => write!(f, "0"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Exponent::Inf),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad exponent '{s}'")))
                .and_then(Exponent::new),
        }
    }
}

impl From<Exponent> for String {
    fn from(e: Exponent) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Parametric description of a weight, independent of any index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFamily {
    Unit,
    /// `(1 + |k|)^t`
    Polynomial { t: f64 },
    /// `exp(a |k|)`
    Exponential { a: f64 },
    Explicit { values: Vec<f64> },
}

impl WeightFamily {
    pub fn reciprocal(&self) -> Self {
        match self {
            WeightFamily::Unit => WeightFamily::Unit,
            WeightFamily::Polynomial { t } => WeightFamily::Polynomial { t: -t },
            WeightFamily::Exponential { a } => WeightFamily::Exponential { a: -a },
            WeightFamily::Explicit { values } => WeightFamily::Explicit {
                values: values.iter().map(|v| 1.0 / v).collect(),
            },
        }
    }

    fn value_at(&self, magnitude: f64) -> f64 {
        match self {
            WeightFamily::Unit => 1.0,
            WeightFamily::Polynomial { t } => (1.0 + magnitude).powf(*t),
            WeightFamily::Exponential { a } => (a * magnitude).exp(),
            WeightFamily::Explicit { .. } => unreachable!("explicit weights carry their values"),
        }
    }

    /// `(polynomial exponent, exponential rate)` of the family, if parametric.
    fn growth(&self) -> Option<(f64, f64)> {
        match self {
            WeightFamily::Unit => Some((0.0, 0.0)),
            WeightFamily::Polynomial { t } => Some((*t, 0.0)),
            WeightFamily::Exponential { a } => Some((0.0, *a)),
            WeightFamily::Explicit { .. } => None,
        }
    }
}

/// Strictly positive weight sampled on an index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    family: WeightFamily,
    values: Vec<f64>,
}

impl Weight {
    pub fn on(family: &WeightFamily, index: &IndexSet) -> Result<Self> {
        let values = match family {
            WeightFamily::Explicit { values } => {
                if values.len() != index.len() {
                    return Err(Error::dim(index.len(), values.len()));
                }
                values.clone()
            }
            f => (0..index.len()).map(|k| f.value_at(index.magnitude(k))).collect(),
        };
        Self::checked(family.clone(), values)
    }

    pub fn unit(len: usize) -> Self {
        Self {
            family: WeightFamily::Unit,
            values: vec![1.0; len],
        }
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::checked(
            WeightFamily::Explicit {
                values: values.clone(),
            },
            values,
        )
    }

    fn checked(family: WeightFamily, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "weights must be finite and strictly positive".into(),
            ));
        }
        Ok(Self { family, values })
    }

    pub fn reciprocal(&self) -> Self {
        Self {
            family: self.family.reciprocal(),
            values: self.values.iter().map(|v| 1.0 / v).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A weighted sequence space `l^p_w` on a concrete index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqSpaceSpec {
    pub p: Exponent,
    pub weight: Weight,
}

impl SeqSpaceSpec {
    pub fn new(p: Exponent, weight: Weight) -> Self {
        Self { p, weight }
    }

    pub fn unweighted(p: Exponent, len: usize) -> Self {
        Self::new(p, Weight::unit(len))
    }

    /// `(q, 1/w)` with `1/p + 1/q = 1`.
    pub fn dual(&self) -> Self {
        Self {
            p: self.p.dual(),
            weight: self.weight.reciprocal(),
        }
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    pub fn norm(&self, c: &[C64]) -> Result<f64> {
        seq_norm(c, self)
    }
}

/// A sequence-space family `(p, weight family)`, instantiated per index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFamily {
    pub p: Exponent,
    pub weight: WeightFamily,
}

impl SpaceFamily {
    pub fn new(p: Exponent, weight: WeightFamily) -> Self {
        Self { p, weight }
    }

    pub fn unweighted(p: Exponent) -> Self {
        Self::new(p, WeightFamily::Unit)
    }

    pub fn polynomial(p: Exponent, t: f64) -> Self {
        Self::new(p, WeightFamily::Polynomial { t })
    }

    pub fn on(&self, index: &IndexSet) -> Result<SeqSpaceSpec> {
        Ok(SeqSpaceSpec::new(self.p, Weight::on(&self.weight, index)?))
    }

    pub fn dual(&self) -> Self {
        Self::new(self.p.dual(), self.weight.reciprocal())
    }
}

/// `p`-norm of plain nonnegative magnitudes.
pub(crate) fn lp(values: impl Iterator<Item = f64>, p: Exponent) -> f64 {
    match p {
        Exponent::One => values.sum(),
        Exponent::Two => values.map(|v| v * v).sum::<f64>().sqrt(),
        Exponent::Finite(q) => values.map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q),
        Exponent::Inf | Exponent::Zero => values.fold(0.0, f64::max),
    }
}

/// `||w c||_p`.
pub fn seq_norm(c: &[C64], spec: &SeqSpaceSpec) -> Result<f64> {
    if c.len() != spec.len() {
        return Err(Error::dim(spec.len(), c.len()));
    }
    let w = spec.weight.values();
    Ok(lp(c.iter().zip(w).map(|(x, w)| w * x.norm()), spec.p))
}

/// `sum_k c_k conj(d_k)`.
pub fn dual_pairing(c: &[C64], d: &[C64]) -> Result<C64> {
    if c.len() != d.len() {
        return Err(Error::dim(c.len(), d.len()));
    }
    Ok(c.iter().zip(d).map(|(a, b)| a * b.conj()).sum())
}

/// Which sufficient-and-necessary test decided an inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionCriterion {
    /// `p_a <= p_b`: the weight ratio must be bounded.
    BoundedRatio,
    /// `p_a > p_b`: the weight ratio must lie in `l^r`, `1/r = 1/p_b - 1/p_a`.
    SummableRatio { r: f64 },
    /// `l^inf_{w_a}` into `l^0_{w_b}`: the weight ratio must tend to zero.
    VanishingRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionCertificate {
    pub included: bool,
    pub criterion: InclusionCriterion,
    /// Criterion quantity on the largest truncation.
    pub certificate: f64,
    /// `(N, quantity)` along the truncation schedule.
    pub schedule: Vec<(usize, f64)>,
    pub diverges: bool,
    /// True when the verdict was read off a finite explicit weight only.
    pub finite_only: bool,
}

/// Truncations used for asymptotic decisions.
pub const TRUNCATION_SCHEDULE: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];

pub(crate) fn inclusion_criterion(a: Exponent, b: Exponent) -> InclusionCriterion {
    if a == Exponent::Inf && b == Exponent::Zero {
        return InclusionCriterion::VanishingRatio;
    }
    let (pa, pb) = (a.value(), b.value());
    if pa <= pb {
        InclusionCriterion::BoundedRatio
    } else {
        InclusionCriterion::SummableRatio {
            r: 1.0 / (1.0 / pb - 1.0 / pa),
        }
    }
}

/// Criterion quantity for a sampled ratio `w_b / w_a`.
pub(crate) fn criterion_quantity(
    criterion: InclusionCriterion,
    ratio: &[f64],
    magnitudes: &[f64],
) -> f64 {
    match criterion {
        InclusionCriterion::BoundedRatio => ratio.iter().cloned().fold(0.0, f64::max),
        InclusionCriterion::SummableRatio { r } => {
            ratio.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
        }
        InclusionCriterion::VanishingRatio => {
            // ratio at the outermost shell
            let far = magnitudes.iter().cloned().fold(0.0, f64::max);
            ratio
                .iter()
                .zip(magnitudes)
                .filter(|(_, &m)| m == far)
                .map(|(v, _)| *v)
                .fold(0.0, f64::max)
        }
    }
}

/// Decides `l^{p_a}_{w_a} ⊆ l^{p_b}_{w_b}` on the integer line.
///
/// Parametric weights are decided exactly from their growth rates; the
/// criterion quantity is also evaluated on [`TRUNCATION_SCHEDULE`] so the
/// divergence is visible. Explicit weights live on a single finite set and
/// are therefore always included; only the finite quantity is reported.
pub fn seq_space_included(a: &SpaceFamily, b: &SpaceFamily) -> Result<InclusionCertificate> {
    let criterion = inclusion_criterion(a.p, b.p);
    match (a.weight.growth(), b.weight.growth()) {
        (Some((ta, aa)), Some((tb, ab))) => {
            let tau = tb - ta;
            let alpha = ab - aa;
            let included = match criterion {
                InclusionCriterion::BoundedRatio => alpha < 0.0 || (alpha == 0.0 && tau <= 0.0),
                InclusionCriterion::SummableRatio { r } => {
                    alpha < 0.0 || (alpha == 0.0 && tau * r < -1.0)
                }
                InclusionCriterion::VanishingRatio => alpha < 0.0 || (alpha == 0.0 && tau < 0.0),
            };
            let mut schedule = Vec::with_capacity(TRUNCATION_SCHEDULE.len());
            for &n in TRUNCATION_SCHEDULE.iter() {
                let ix = IndexSet::centered_line(n);
                let wa = Weight::on(&a.weight, &ix)?;
                let wb = Weight::on(&b.weight, &ix)?;
                let ratio: Vec<f64> = wb.values().iter().zip(wa.values()).map(|(x, y)| x / y).collect();
                let mags: Vec<f64> = (0..n).map(|k| ix.magnitude(k)).collect();
                schedule.push((n, criterion_quantity(criterion, &ratio, &mags)));
            }
            let certificate = schedule.last().map(|s| s.1).unwrap_or(f64::NAN);
            Ok(InclusionCertificate {
                included,
                criterion,
                certificate,
                schedule,
                diverges: !included,
                finite_only: false,
            })
        }
        _ => {
            let n = [&a.weight, &b.weight]
                .iter()
                .find_map(|w| match w {
                    WeightFamily::Explicit { values } => Some(values.len()),
                    _ => None,
                })
                .expect("at least one explicit weight");
            let ix = IndexSet::centered_line(n);
            let wa = Weight::on(&a.weight, &ix)?;
            let wb = Weight::on(&b.weight, &ix)?;
            let mags: Vec<f64> = (0..n).map(|k| ix.magnitude(k)).collect();
            let ratio: Vec<f64> = wb.values().iter().zip(wa.values()).map(|(x, y)| x / y).collect();
            let q = criterion_quantity(criterion, &ratio, &mags);
            Ok(InclusionCertificate {
                included: q.is_finite(),
                criterion,
                certificate: q,
                schedule: vec![(n, q)],
                diverges: false,
                finite_only: true,
            })
        }
    }
}
