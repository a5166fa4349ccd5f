//! Matrix representation of operators with respect to pairs of frames.
//!
//! `M(Φ,Ξ)(O) = C_Φ O D_Ξ = Φ^H O Ξ` and `O(Φ,Ξ)(M) = D_Φ M C_Ξ = Φ M Ξ^H`.

pub mod operator;
pub mod schur;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use operator::LinearOperator;
pub use schur::{schur_certificate, BoundCase, BoundCertificate};

use crate::error::{Error, Result};
use crate::frames::{gram, Frame};
use crate::linalg::algebra::MatrixAlgebraSpec;
use crate::linalg::dense::{norm2, probe_op_norm, pseudo_inverse, range_basis, singular_values, svd, weighted_op_norm};
use crate::linalg::{SeqSpaceSpec, SpaceFamily};
use crate::localization::localization_report;
use crate::{CMat, C64, RANK_TOL};

pub use crate::linalg::dense::generalized_condition_number;

/// Galerkin matrix tagged with the frames that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalerkinMatrix {
    #[serde(skip)]
    pub entries: CMat,
    pub left_frame: String,
    pub right_frame: String,
    pub domain_space: Option<SeqSpaceSpec>,
    pub codomain_space: Option<SeqSpaceSpec>,
}

impl GalerkinMatrix {
    pub fn new(entries: CMat, left: &Frame, right: &Frame) -> Result<Self> {
        if entries.shape() != (left.len(), right.len()) {
            return Err(Error::Contract(format!(
                "matrix is {}x{}, frames need {}x{}",
                entries.nrows(),
                entries.ncols(),
                left.len(),
                right.len()
            )));
        }
        Ok(Self {
            entries,
            left_frame: left.id().to_string(),
            right_frame: right.id().to_string(),
            domain_space: None,
            codomain_space: None,
        })
    }

    pub fn with_spaces(mut self, domain: SeqSpaceSpec, codomain: SeqSpaceSpec) -> Result<Self> {
        if domain.len() != self.entries.ncols() {
            return Err(Error::dim(self.entries.ncols(), domain.len()));
        }
        if codomain.len() != self.entries.nrows() {
            return Err(Error::dim(self.entries.nrows(), codomain.len()));
        }
        self.domain_space = Some(domain);
        self.codomain_space = Some(codomain);
        Ok(self)
    }
}

fn check_maps(o: &LinearOperator, left: &Frame, right: &Frame) -> Result<()> {
    let (r, c) = o.shape();
    if c != right.dim() {
        return Err(Error::dim(right.dim(), c));
    }
    if r != left.dim() {
        return Err(Error::dim(left.dim(), r));
    }
    Ok(())
}

/// `Φ^H O Ξ`, entries `<O ξ_l, φ_k>`.
///
/// Closures are applied to the columns `ξ_l`, in parallel when enabled.
pub fn galerkin_matrix(o: &LinearOperator, left: &Frame, right: &Frame) -> Result<GalerkinMatrix> {
    check_maps(o, left, right)?;
    let o_xi = o.apply_columns(right.vectors())?;
    GalerkinMatrix::new(left.vectors().ad_mul(&o_xi), left, right)
}

fn galerkin_dense(o: &CMat, left: &Frame, right: &Frame) -> CMat {
    left.vectors().ad_mul(&(o * right.vectors()))
}

/// `D_left M C_right` as a closure with adjoint.
pub fn operator_from_matrix(m: &CMat, left: &Frame, right: &Frame) -> Result<LinearOperator> {
    if m.shape() != (left.len(), right.len()) {
        return Err(Error::Contract(format!(
            "matrix is {}x{}, frames need {}x{}",
            m.nrows(),
            m.ncols(),
            left.len(),
            right.len()
        )));
    }
    let (l, r, mm) = (Arc::new(left.vectors().clone()), Arc::new(right.vectors().clone()), Arc::new(m.clone()));
    let (l2, r2, m2) = (l.clone(), r.clone(), mm.clone());
    Ok(LinearOperator::closure(
        left.dim(),
        right.dim(),
        move |x| &*l * (&*mm * r.ad_mul(x)),
        Some(Box::new(move |y| &*r2 * m2.ad_mul(&l2.ad_mul(y)))),
    ))
}

/// Dense form of [`operator_from_matrix`].
pub fn operator_matrix(m: &CMat, left: &Frame, right: &Frame) -> Result<CMat> {
    if m.shape() != (left.len(), right.len()) {
        return Err(Error::dim(left.len() * right.len(), m.len()));
    }
    Ok(left.vectors() * m * right.vectors().adjoint())
}

fn relative(diff: &CMat, reference: &CMat) -> f64 {
    let den = norm2(reference);
    let num = norm2(diff);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    /// `||O(Φ,Ψ)(M(Φ~,Ψ~)(O)) - O|| / ||O||`.
    pub forward: f64,
    /// `||O(Φ~,Ψ~)(M(Φ,Ψ)(O)) - O|| / ||O||`.
    pub mirrored: f64,
}

impl RoundtripReport {
    pub fn max(&self) -> f64 {
        self.forward.max(self.mirrored)
    }
}

/// Both orderings of the representation identity, in operator 2-norm.
pub fn roundtrip_check(o: &LinearOperator, phi: &Frame, psi: &Frame) -> Result<RoundtripReport> {
    check_maps(o, phi, psi)?;
    let od = o.to_dense();
    let (phi_d, psi_d) = (phi.canonical_dual()?, psi.canonical_dual()?);
    let m1 = galerkin_dense(&od, &phi_d, &psi_d);
    let back1 = operator_matrix(&m1, phi, psi)?;
    let m2 = galerkin_dense(&od, phi, psi);
    let back2 = operator_matrix(&m2, &phi_d, &psi_d)?;
    Ok(RoundtripReport {
        forward: relative(&(back1 - &od), &od),
        mirrored: relative(&(back2 - &od), &od),
    })
}

/// Relative Frobenius gap in `M(Φ,Ψ)(O1 O2) = M(Φ,Ξ)(O1) M(Ξ~,Ψ)(O2)`.
pub fn compose_rule_check(
    o1: &LinearOperator,
    o2: &LinearOperator,
    phi: &Frame,
    psi: &Frame,
    xi: &Frame,
) -> Result<f64> {
    check_maps(o1, phi, xi)?;
    check_maps(o2, xi, psi)?;
    let xi_d = xi.canonical_dual()?;
    let (a, b) = (o1.to_dense(), o2.to_dense());
    let lhs = galerkin_dense(&(&a * &b), phi, psi);
    let rhs = galerkin_dense(&a, phi, xi) * galerkin_dense(&b, &xi_d, psi);
    let den = lhs.norm();
    let num = (&lhs - rhs).norm();
    Ok(if den == 0.0 { num } else { num / den })
}

/// Domain and codomain space families of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacePair {
    pub domain: SpaceFamily,
    pub codomain: SpaceFamily,
}

impl SpacePair {
    pub fn new(domain: SpaceFamily, codomain: SpaceFamily) -> Self {
        Self { domain, codomain }
    }

    pub fn same(space: SpaceFamily) -> Self {
        Self { domain: space.clone(), codomain: space }
    }
}

/// `sup ||X c||_to / ||c||_from` over `c` in the column space of `range`.
///
/// Exact for `l^2 -> l^2` through an orthonormal basis `Q` of the range:
/// with `W1 Q = U S V^H` the value is `sigma_max(W2 X Q V S^{-1})`. Other
/// exponents fall back to the full-matrix bound, which dominates.
pub(crate) fn restricted_norm(x: &CMat, range: &CMat, from: &SeqSpaceSpec, to: &SeqSpaceSpec) -> Result<(f64, bool)> {
    use crate::linalg::Exponent;
    if from.p == Exponent::Two && to.p == Exponent::Two {
        let q = range_basis(range, RANK_TOL);
        if q.ncols() == 0 {
            return Ok((0.0, true));
        }
        let (w1, w2) = (from.weight.values(), to.weight.values());
        let w1q = CMat::from_fn(q.nrows(), q.ncols(), |i, j| q[(i, j)] * w1[i]);
        let d = svd(&w1q);
        let inv_s = CMat::from_diagonal(&crate::CVec::from_iterator(d.s.len(), d.s.iter().map(|s| C64::new(1.0 / s, 0.0))));
        let xq = x * &q * d.v_h.adjoint() * inv_s;
        let weighted = CMat::from_fn(xq.nrows(), xq.ncols(), |i, j| xq[(i, j)] * w2[i]);
        return Ok((norm2(&weighted), true));
    }
    let n = weighted_op_norm(x, from, to)?;
    Ok((n.value, false))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBoundReport {
    pub bound: f64,
    pub measured: f64,
    /// Norm of the left Gram factor.
    pub left_gram_norm: f64,
    /// Norm of the right Gram factor.
    pub right_gram_norm: f64,
    /// Norm of the middle factor on the reference coorbit spaces.
    pub operator_norm: f64,
    /// All three factors were computed exactly (otherwise upper bounds).
    pub exact_factors: bool,
    pub holds: bool,
    pub warning: Option<String>,
}

fn localization_warning(pairs: &[(&Frame, &Frame)], alg: &MatrixAlgebraSpec) -> Result<Option<String>> {
    let mut missing = Vec::new();
    for (a, b) in pairs {
        let r = localization_report(a, b, alg)?;
        if !r.member {
            missing.push(format!("({}, {})", r.left, r.right));
        }
    }
    Ok((!missing.is_empty()).then(|| format!("pairs not localized: {}", missing.join(", "))))
}

/// `||M(Φ,Ξ)(O)|| <= ||G_{Φ,Ψ}|| ||O|| ||G_{Ψ~,Ξ}||` with `||O||` taken on the
/// coorbit spaces of the reference frame `Ψ`.
///
/// Uses `M(Φ,Ξ)(O) = G_{Φ,Ψ} X G_{Ψ~,Ξ}` with `X = C_{Ψ~} O D_Ψ`; the
/// middle norm is restricted to `ran C_{Ψ~}`.
pub fn matrixrep_norm_bound(
    o: &LinearOperator,
    phi: &Frame,
    xi: &Frame,
    psi: &Frame,
    spaces: &SpacePair,
    alg: &MatrixAlgebraSpec,
    probes: usize,
    seed: u64,
) -> Result<NormBoundReport> {
    check_maps(o, phi, xi)?;
    if psi.dim() != phi.dim() || psi.dim() != xi.dim() {
        return Err(Error::dim(phi.dim(), psi.dim()));
    }
    let psi_d = psi.canonical_dual()?;
    let (d_xi, d_psi) = (spaces.domain.on(xi.index_set())?, spaces.domain.on(psi.index_set())?);
    let (c_phi, c_psi) = (spaces.codomain.on(phi.index_set())?, spaces.codomain.on(psi.index_set())?);
    let g_left = gram(phi, psi)?;
    let g_right = gram(&psi_d, xi)?;
    let x = galerkin_dense(&o.to_dense(), &psi_d, psi);
    let nl = weighted_op_norm(&g_left, &c_psi, &c_phi)?;
    let nr = weighted_op_norm(&g_right, &d_xi, &d_psi)?;
    let (no, exact_o) = restricted_norm(&x, &psi_d.analysis_matrix(), &d_psi, &c_psi)?;
    let bound = nl.value * no * nr.value;
    let m = galerkin_matrix(o, phi, xi)?.entries;
    let measured = probe_op_norm(&m, &d_xi, &c_phi, probes, seed)?;
    let warning = localization_warning(&[(phi, psi), (&psi_d, xi)], alg)?;
    Ok(NormBoundReport {
        bound,
        measured,
        left_gram_norm: nl.value,
        right_gram_norm: nr.value,
        operator_norm: no,
        exact_factors: nl.exact && nr.exact && exact_o,
        holds: measured <= bound * (1.0 + 1e-8),
        warning,
    })
}

/// Mirrored bound for `O(Φ,Ξ)(M)` on the coorbit spaces of `Ψ`:
/// `C_{Ψ~} D_Φ M C_Ξ D_Ψ = G_{Ψ~,Φ} M G_{Ξ,Ψ}`.
pub fn operator_norm_bound(
    m: &CMat,
    phi: &Frame,
    xi: &Frame,
    psi: &Frame,
    spaces: &SpacePair,
    probes: usize,
    seed: u64,
) -> Result<NormBoundReport> {
    if m.shape() != (phi.len(), xi.len()) {
        return Err(Error::dim(phi.len() * xi.len(), m.len()));
    }
    let psi_d = psi.canonical_dual()?;
    let (d_xi, d_psi) = (spaces.domain.on(xi.index_set())?, spaces.domain.on(psi.index_set())?);
    let (c_phi, c_psi) = (spaces.codomain.on(phi.index_set())?, spaces.codomain.on(psi.index_set())?);
    let g_left = gram(&psi_d, phi)?;
    let g_right = gram(xi, psi)?;
    let nl = weighted_op_norm(&g_left, &c_phi, &c_psi)?;
    let nr = weighted_op_norm(&g_right, &d_psi, &d_xi)?;
    let nm = weighted_op_norm(m, &d_xi, &c_phi)?;
    let bound = nl.value * nm.value * nr.value;
    // coorbit norm of the operator: restricted norm of its Ψ-matrix
    let op = operator_matrix(m, phi, xi)?;
    let x = galerkin_dense(&op, &psi_d, psi);
    let ran = psi_d.analysis_matrix();
    let measured = if d_psi.p == crate::Exponent::Two && c_psi.p == crate::Exponent::Two {
        restricted_norm(&x, &ran, &d_psi, &c_psi)?.0
    } else {
        let probe_basis = range_probe(&x, &ran, &d_psi, &c_psi, probes, seed)?;
        probe_basis
    };
    Ok(NormBoundReport {
        bound,
        measured,
        left_gram_norm: nl.value,
        right_gram_norm: nr.value,
        operator_norm: nm.value,
        exact_factors: nl.exact && nr.exact && nm.exact,
        holds: measured <= bound * (1.0 + 1e-8),
        warning: None,
    })
}

/// Largest `||X c|| / ||c||` over probes `c = R f` in the range of `R`.
fn range_probe(x: &CMat, range: &CMat, from: &SeqSpaceSpec, to: &SeqSpaceSpec, probes: usize, seed: u64) -> Result<f64> {
    use crate::linalg::dense::{random_cvec, seeded};
    use crate::linalg::seq_norm;
    let mut rng = seeded(seed);
    let mut best = 0.0f64;
    let n = range.ncols();
    let mut try_vec = |f: crate::CVec| -> Result<()> {
        let c = range * f;
        let den = seq_norm(c.as_slice(), from)?;
        if den > 0.0 {
            best = best.max(seq_norm((x * &c).as_slice(), to)? / den);
        }
        Ok(())
    };
    for j in 0..n {
        let mut e = crate::CVec::zeros(n);
        e[j] = C64::new(1.0, 0.0);
        try_vec(e)?;
    }
    for _ in 0..probes {
        try_vec(random_cvec(n, &mut rng))?;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedEquivReport {
    /// Probed norm of `M = M(Φ,Ψ)(O)` on `ran C_{Ψ~}`.
    pub matrix_norm: f64,
    /// Probed norm of `X = C_{Ψ~} O D_Ψ` on `ran C_{Ψ~}`, i.e. the coorbit norm of `O`.
    pub operator_norm: f64,
    /// `[1 / ||G_{Ψ~,Φ~}||, ||G_{Φ,Ψ}||]`.
    pub interval: (f64, f64),
    pub ratio: Option<f64>,
    pub consistent: bool,
}

/// Compares the sequence-space norm of the Galerkin matrix with the
/// coorbit norm of the operator.
///
/// `M = G_{Φ,Ψ} X` and `X = G_{Ψ~,Φ~} M`, so on a common probe set the
/// ratio lies in the Gram-norm interval.
pub fn bounded_equiv_check(
    o: &LinearOperator,
    phi: &Frame,
    psi: &Frame,
    spaces: &SpacePair,
    probes: usize,
    seed: u64,
) -> Result<BoundedEquivReport> {
    check_maps(o, phi, psi)?;
    if phi.dim() != psi.dim() {
        return Err(Error::dim(phi.dim(), psi.dim()));
    }
    let (phi_d, psi_d) = (phi.canonical_dual()?, psi.canonical_dual()?);
    let od = o.to_dense();
    let m = galerkin_dense(&od, phi, psi);
    let x = galerkin_dense(&od, &psi_d, psi);
    let from = spaces.domain.on(psi.index_set())?;
    let (to_phi, to_psi) = (spaces.codomain.on(phi.index_set())?, spaces.codomain.on(psi.index_set())?);
    let ran = psi_d.analysis_matrix();
    let (mn, xn) = if from.p == crate::Exponent::Two && to_phi.p == crate::Exponent::Two {
        (restricted_norm(&m, &ran, &from, &to_phi)?.0, restricted_norm(&x, &ran, &from, &to_psi)?.0)
    } else {
        (
            range_probe(&m, &ran, &from, &to_phi, probes, seed)?,
            range_probe(&x, &ran, &from, &to_psi, probes, seed)?,
        )
    };
    let up = weighted_op_norm(&gram(phi, psi)?, &to_psi, &to_phi)?.value;
    let dn = weighted_op_norm(&gram(&psi_d, &phi_d)?, &to_phi, &to_psi)?.value;
    let interval = (1.0 / dn, up);
    let scale = mn.max(xn);
    let (ratio, consistent) = if scale <= 1e-300 {
        (None, true)
    } else if xn == 0.0 || mn == 0.0 {
        (None, false)
    } else {
        let r = mn / xn;
        (Some(r), r >= interval.0 * (1.0 - 1e-8) && r <= interval.1 * (1.0 + 1e-8))
    };
    Ok(BoundedEquivReport {
        matrix_norm: mn,
        operator_norm: xn,
        interval,
        ratio,
        consistent,
    })
}

/// Condition number of `O` above which it is treated as singular.
pub const BIJECTIVITY_COND_CAP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoInverseReport {
    #[serde(skip)]
    pub matrix: CMat,
    /// `||M^+ M - G_{Ψ~,Ψ}|| / ||G_{Ψ~,Ψ}||`.
    pub projection_residual: f64,
    /// `||M^+ - pinv_svd(M)|| / ||pinv_svd(M)||`, an independent route.
    pub svd_agreement: f64,
    pub operator_condition: f64,
}

/// `M(Φ,Ψ)(O)^+ = M(Ψ~,Φ~)(O^{-1})`.
pub fn galerkin_pseudoinverse(o: &LinearOperator, phi: &Frame, psi: &Frame) -> Result<PseudoInverseReport> {
    check_maps(o, phi, psi)?;
    let od = o.to_dense();
    if od.nrows() != od.ncols() {
        return Err(Error::Contract("operator must be square to be inverted".into()));
    }
    let s = singular_values(&od);
    let cond = match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    };
    if !(cond < BIJECTIVITY_COND_CAP) {
        return Err(Error::NotBijective { condition: cond });
    }
    let inv = od.clone().try_inverse().ok_or(Error::NotBijective { condition: cond })?;
    let (phi_d, psi_d) = (phi.canonical_dual()?, psi.canonical_dual()?);
    let dagger = galerkin_dense(&inv, &psi_d, &phi_d);
    let m = galerkin_dense(&od, phi, psi);
    let p = gram(&psi_d, psi)?;
    let projection_residual = relative(&(&dagger * &m - &p), &p);
    let svd_pinv = pseudo_inverse(&m, RANK_TOL);
    let svd_agreement = relative(&(&dagger - &svd_pinv), &svd_pinv);
    Ok(PseudoInverseReport {
        matrix: dagger,
        projection_residual,
        svd_agreement,
        operator_condition: cond,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaProbe {
    /// `kappa(M(Φ,Ψ)(O))`.
    pub lhs: f64,
    /// `kappa(G_{Φ,Ψ}) kappa(G_{Ψ~,Ψ}) kappa(O)`.
    pub rhs: f64,
    pub ratio: f64,
    pub equality: bool,
    /// `lhs <= rhs (1 + 1e-8)`.
    pub inequality: bool,
}

/// Both sides of the condition-number factorization.
pub fn kappa_factorization_probe(o: &LinearOperator, phi: &Frame, psi: &Frame) -> Result<KappaProbe> {
    check_maps(o, phi, psi)?;
    let od = o.to_dense();
    let s = singular_values(&od);
    if s.last().is_none_or(|&v| v <= RANK_TOL * s[0]) {
        return Err(Error::NotBijective {
            condition: s.first().map_or(f64::INFINITY, |hi| hi / s.last().cloned().unwrap_or(0.0)),
        });
    }
    let psi_d = psi.canonical_dual()?;
    let lhs = generalized_condition_number(&galerkin_dense(&od, phi, psi))?;
    let rhs = generalized_condition_number(&gram(phi, psi)?)?
        * generalized_condition_number(&gram(&psi_d, psi)?)?
        * generalized_condition_number(&od)?;
    Ok(KappaProbe {
        lhs,
        rhs,
        ratio: lhs / rhs,
        equality: (lhs - rhs).abs() <= 1e-10 * rhs,
        inequality: lhs <= rhs * (1.0 + 1e-8),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{FrameSpec, GeneratorSpec, WindowSpec};
    use crate::linalg::dense::{random_cmat, seeded};
    use crate::linalg::{Exponent, WeightFamily};
    use approx::assert_relative_eq;

    fn max_abs(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn onb(n: usize) -> Frame {
        FrameSpec::Onb { n }.build().unwrap()
    }

    fn gabor16() -> Frame {
        FrameSpec::gabor(16, 4, 2, WindowSpec::Gaussian).build().unwrap()
    }

    #[test]
    fn identity_on_onb_and_gram() {
        let f = onb(6);
        let m = galerkin_matrix(&LinearOperator::identity(6), &f, &f).unwrap();
        assert_eq!(m.entries, CMat::identity(6, 6));
        let g = gabor16();
        let gd = g.canonical_dual().unwrap();
        let m = galerkin_matrix(&LinearOperator::identity(16), &g, &gd).unwrap();
        assert!(max_abs(&(m.entries - gram(&g, &gd).unwrap())) < 1e-12);
    }

    #[test]
    fn diagonal_on_onb() {
        let d = CMat::from_diagonal(&crate::CVec::from_fn(4, |i, _| C64::new(i as f64 + 1.0, 0.0)));
        let f = onb(4);
        assert_eq!(galerkin_matrix(&d.clone().into(), &f, &f).unwrap().entries, d);
    }

    #[test]
    fn entries_are_inner_products() {
        let g = gabor16();
        let t = FrameSpec::translates(16, 1, GeneratorSpec::Localized { decay: 2.0 }).build().unwrap();
        let o = random_cmat(16, 16, &mut seeded(5));
        let m = galerkin_matrix(&o.clone().into(), &g, &t).unwrap();
        let (k, l) = (7, 3);
        let direct = g.vector(k).dotc(&(&o * t.vector(l)));
        assert!((m.entries[(k, l)] - direct).norm() < 1e-12);
    }

    #[test]
    fn operator_from_identity_matrix_reconstructs() {
        let g = gabor16();
        let gd = g.canonical_dual().unwrap();
        let op = operator_from_matrix(&CMat::identity(g.len(), g.len()), &g, &gd).unwrap();
        assert!(max_abs(&(op.to_dense() - CMat::identity(16, 16))) < 1e-10);
        let zero = operator_from_matrix(&CMat::zeros(g.len(), g.len()), &g, &g).unwrap();
        assert_eq!(max_abs(&zero.to_dense()), 0.0);
    }

    #[test]
    fn roundtrip_rank_one() {
        let g = gabor16();
        let mut rng = seeded(2);
        let (u, v) = (crate::linalg::dense::random_cvec(16, &mut rng), crate::linalg::dense::random_cvec(16, &mut rng));
        let o: LinearOperator = (&u * v.adjoint()).into();
        let r = roundtrip_check(&o, &g, &g).unwrap();
        assert!(r.max() <= 1e-10, "{r:?}");
    }

    #[test]
    fn compose_with_rank_deficient_xi_fails() {
        let f = onb(4);
        let xi = f.subframe(&[0, 1, 2]).unwrap();
        let id = LinearOperator::identity(4);
        assert!(matches!(compose_rule_check(&id, &id, &f, &f, &xi), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn identity_norm_bound_on_onb() {
        let f = onb(8);
        let sp = SpacePair::same(SpaceFamily::unweighted(Exponent::One));
        let r = matrixrep_norm_bound(&LinearOperator::identity(8), &f, &f, &f, &sp, &MatrixAlgebraSpec::jaffard(3.0), 50, 1).unwrap();
        assert_relative_eq!(r.bound, 1.0);
        assert_relative_eq!(r.measured, 1.0);
        assert!(r.warning.is_none());
    }

    #[test]
    fn norm_bound_scales() {
        let g = gabor16();
        let sp = SpacePair::same(SpaceFamily::new(Exponent::Two, WeightFamily::Polynomial { t: 1.0 }));
        let o: LinearOperator = random_cmat(16, 16, &mut seeded(6)).into();
        let alg = MatrixAlgebraSpec::jaffard(3.0);
        let r1 = matrixrep_norm_bound(&o, &g, &g, &g, &sp, &alg, 50, 1).unwrap();
        let r2 = matrixrep_norm_bound(&o.scaled(C64::new(0.0, -3.0)), &g, &g, &g, &sp, &alg, 50, 1).unwrap();
        assert!(r1.holds);
        assert_relative_eq!(r2.bound, 3.0 * r1.bound, max_relative = 1e-10);
        assert_relative_eq!(r2.measured, 3.0 * r1.measured, max_relative = 1e-10);
        let b = operator_norm_bound(&galerkin_matrix(&o, &g, &g).unwrap().entries, &g, &g, &g, &sp, 50, 1).unwrap();
        assert!(b.holds, "{b:?}");
    }

    #[test]
    fn bounded_equiv_identity_and_zero() {
        let g = gabor16();
        let sp = SpacePair::same(SpaceFamily::unweighted(Exponent::Inf));
        let r = bounded_equiv_check(&LinearOperator::identity(16), &g, &g, &sp, 100, 3).unwrap();
        assert!(r.consistent, "{r:?}");
        let z = bounded_equiv_check(&CMat::zeros(16, 16).into(), &g, &g, &sp, 100, 3).unwrap();
        assert_eq!((z.matrix_norm, z.operator_norm), (0.0, 0.0));
        assert!(z.consistent);
    }

    #[test]
    fn pseudoinverse_of_identity_is_dual_gram() {
        let g = gabor16();
        let gd = g.canonical_dual().unwrap();
        let r = galerkin_pseudoinverse(&LinearOperator::identity(16), &g, &g).unwrap();
        assert!(max_abs(&(&r.matrix - gram(&gd, &gd).unwrap())) < 1e-10);
        let m = gram(&g, &g).unwrap();
        assert!(max_abs(&(&m * &r.matrix * &m - &m)) < 1e-10);
        assert!(r.projection_residual < 1e-9 && r.svd_agreement < 1e-8);
        let half = galerkin_pseudoinverse(&LinearOperator::identity(16).scaled(C64::new(2.0, 0.0)), &g, &g).unwrap();
        assert!(max_abs(&(&half.matrix * C64::new(2.0, 0.0) - &r.matrix)) < 1e-10);
    }

    #[test]
    fn singular_operator_rejected() {
        let f = onb(3);
        let d = CMat::from_diagonal(&crate::CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0)]));
        assert!(matches!(galerkin_pseudoinverse(&d.into(), &f, &f), Err(Error::NotBijective { .. })));
    }

    #[test]
    fn kappa_on_onb_is_kappa_of_operator() {
        let f = onb(6);
        let o = random_cmat(6, 6, &mut seeded(12));
        let k = kappa_factorization_probe(&o.clone().into(), &f, &f).unwrap();
        assert!(k.equality && k.inequality);
        assert_relative_eq!(k.lhs, generalized_condition_number(&o).unwrap(), max_relative = 1e-10);
    }
}
