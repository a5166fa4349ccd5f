//! Localization of frame pairs, coorbit norms and their finite-scale
//! equivalences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{gram, Frame, FrameSpec};
use crate::linalg::algebra::{
    admissible_weight_check, decay_fit, jaffard_norm, schur_weighted_norm, Admissibility,
    AlgebraKind, DecayFit, MatrixAlgebraSpec,
};
use crate::linalg::dense::{pseudo_inverse, weighted_op_norm};
use crate::linalg::seqspace::{
    dual_pairing, inclusion_criterion, seq_norm, seq_space_included, InclusionCertificate,
    InclusionCriterion, SpaceFamily,
};
use crate::linalg::{Exponent, SeqSpaceSpec, Weight};
use crate::{CMat, CVec, C64, RANK_TOL};

/// A fitted exponent may fall this far below `s` and still count as decay.
pub const FIT_SLACK: f64 = 0.25;
/// Largest tolerated drop of the dual's fitted exponent below the primal's.
pub const DUAL_EXPONENT_DROP: f64 = 0.5;
/// Minimal `inf_k ||psi_k||` for norm-bounded frames.
pub const NORM_BOUNDED_FLOOR: f64 = 1e-6;
/// Relative reconstruction residual accepted for a dual pair.
pub const DUALITY_TOL: f64 = 1e-8;
/// Relative round-off allowance when comparing witness ratios.
pub const WITNESS_SLACK: f64 = 1e-9;
/// Ambient dimensions along which witnesses are built.
pub const WITNESS_SCHEDULE: [usize; 6] = [16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub left: String,
    pub right: String,
    pub algebra: MatrixAlgebraSpec,
    /// Norm of the cross-Gram matrix in `algebra`.
    pub cross_gram_norm: f64,
    pub jaffard_norm: f64,
    pub schur_weighted_norm: f64,
    pub decay_fit: Option<DecayFit>,
    /// Why `decay_fit` is missing, if it is.
    pub decay_fit_note: Option<String>,
    pub member: bool,
}

impl LocalizationReport {
    /// `distance,max_abs` rows of the decay shells.
    pub fn shells_csv(&self) -> String {
        let mut out = String::from("distance,max_abs\n");
        if let Some(fit) = &self.decay_fit {
            for (d, m) in &fit.shell_maxima {
                out.push_str(&format!("{d},{m:e}\n"));
            }
        }
        out
    }

    pub fn fitted_exponent(&self) -> Option<f64> {
        self.decay_fit.as_ref().map(|f| f.fitted_exponent)
    }
}

/// Fit evidence is compatible with decay of order `s`.
fn fit_supports(fit: &Option<DecayFit>, s: f64) -> bool {
    match fit {
        None => true,
        Some(f) => f.exponential_like || f.fitted_exponent >= s - FIT_SLACK,
    }
}

fn report_for(g: &CMat, left: &Frame, right: &Frame, alg: &MatrixAlgebraSpec) -> Result<LocalizationReport> {
    let (rows, cols) = (left.index_set(), right.index_set());
    let jn = jaffard_norm(g, rows, cols, alg.s)?;
    let sn = schur_weighted_norm(g, rows, cols, alg.s)?;
    let norm = match alg.kind {
        AlgebraKind::Jaffard => jn,
        AlgebraKind::SchurWeighted => sn,
    };
    let (fit, note) = match decay_fit(g, rows, cols) {
        Ok(f) => (Some(f), None),
        Err(e @ Error::InsufficientData(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let member = norm.is_finite() && norm <= alg.membership_threshold && fit_supports(&fit, alg.s);
    Ok(LocalizationReport {
        left: left.id().to_string(),
        right: right.id().to_string(),
        algebra: *alg,
        cross_gram_norm: norm,
        jaffard_norm: jn,
        schur_weighted_norm: sn,
        decay_fit: fit,
        decay_fit_note: note,
        member,
    })
}

/// Measures whether `G_{left,right}` belongs to `alg`.
///
/// A pair is a member when the algebra norm stays below the threshold and
/// the decay fit, when one exists, reaches `s - 0.25` or is exponential.
pub fn localization_report(left: &Frame, right: &Frame, alg: &MatrixAlgebraSpec) -> Result<LocalizationReport> {
    let g = gram(left, right)?;
    report_for(&g, left, right, alg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DualLocalization {
    Checked {
        primal: LocalizationReport,
        dual: LocalizationReport,
        mixed: LocalizationReport,
        /// Primal fitted exponent minus the dual's, when both exist.
        exponent_drop: Option<f64>,
        /// The dual decays markedly slower than the primal.
        flagged: bool,
    },
    /// The primal frame is not intrinsically localized.
    Rejected { primal: LocalizationReport },
}

/// Reports for `(Psi~, Psi~)` and `(Psi, Psi~)` next to the primal one.
pub fn dual_localization_check(frame: &Frame, alg: &MatrixAlgebraSpec) -> Result<DualLocalization> {
    let primal = localization_report(frame, frame, alg)?;
    if !primal.member {
        return Ok(DualLocalization::Rejected { primal });
    }
    let dual = frame.canonical_dual()?;
    let dual_rep = localization_report(&dual, &dual, alg)?;
    let mixed = localization_report(frame, &dual, alg)?;
    let exponent_drop = match (primal.fitted_exponent(), dual_rep.fitted_exponent()) {
        (Some(p), Some(d)) => Some(p - d),
        _ => None,
    };
    let flagged = exponent_drop.is_some_and(|d| d > DUAL_EXPONENT_DROP);
    Ok(DualLocalization::Checked {
        primal,
        dual: dual_rep,
        mixed,
        exponent_drop,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub norm_psi_phi: f64,
    pub norm_phidual_xi: f64,
    pub norm_psi_xi: f64,
    /// Exact product constant of the algebra over the three index sets.
    pub constant: f64,
    pub bound: f64,
    pub hypotheses_member: bool,
    pub conclusion_member: bool,
    pub holds: bool,
    /// `||D_phi C_phidual - I|| / ||I||`.
    pub duality_residual: f64,
}

/// Checks `G_{Psi,Xi} = G_{Psi,Phi} G_{Phi^d,Xi}` at the level of algebra norms.
pub fn transitivity_check(
    psi: &Frame,
    phi: &Frame,
    phi_dual: &Frame,
    xi: &Frame,
    alg: &MatrixAlgebraSpec,
) -> Result<TransitivityReport> {
    let n = phi.dim();
    if phi_dual.dim() != n || phi_dual.len() != phi.len() {
        return Err(Error::Contract("phi_dual must share phi's shape".into()));
    }
    let recon = phi.vectors() * phi_dual.vectors().adjoint() - CMat::identity(n, n);
    let duality_residual = crate::linalg::dense::norm2(&recon);
    if duality_residual > DUALITY_TOL {
        return Err(Error::Contract(format!(
            "phi_dual is not a dual frame of phi (reconstruction residual {duality_residual:.3e})"
        )));
    }
    let a = localization_report(psi, phi, alg)?;
    let b = localization_report(phi_dual, xi, alg)?;
    let c = localization_report(psi, xi, alg)?;
    let constant = alg.product_constant(psi.index_set(), phi.index_set(), xi.index_set());
    let bound = constant * a.cross_gram_norm * b.cross_gram_norm;
    Ok(TransitivityReport {
        norm_psi_phi: a.cross_gram_norm,
        norm_phidual_xi: b.cross_gram_norm,
        norm_psi_xi: c.cross_gram_norm,
        constant,
        bound,
        hypotheses_member: a.member && b.member,
        conclusion_member: c.member,
        holds: c.cross_gram_norm <= bound * (1.0 + 1e-10),
        duality_residual,
    })
}

/// Coorbit space `H^p_w` of a frame: `||f|| = ||C_{Psi~} f||_{l^p_w}`.
#[derive(Debug, Clone)]
pub struct CoorbitSpec<'a> {
    frame: &'a Frame,
    dual: Frame,
    space: SeqSpaceSpec,
}

impl<'a> CoorbitSpec<'a> {
    pub fn new(frame: &'a Frame, space: SeqSpaceSpec) -> Result<Self> {
        if space.len() != frame.len() {
            return Err(Error::dim(frame.len(), space.len()));
        }
        Ok(Self {
            frame,
            dual: frame.canonical_dual()?,
            space,
        })
    }

    /// Evaluates `family` on the frame's index set.
    pub fn from_family(frame: &'a Frame, family: &SpaceFamily) -> Result<Self> {
        Self::new(frame, family.on(frame.index_set())?)
    }

    pub fn frame(&self) -> &Frame {
        self.frame
    }

    pub fn dual(&self) -> &Frame {
        &self.dual
    }

    pub fn space(&self) -> &SeqSpaceSpec {
        &self.space
    }

    pub fn admissibility(&self, alg: &MatrixAlgebraSpec) -> Result<Admissibility> {
        admissible_weight_check(alg, &self.space.weight, self.frame.index_set())
    }

    pub fn norm(&self, f: &CVec) -> Result<f64> {
        let c = self.dual.analysis(f)?;
        seq_norm(c.as_slice(), &self.space)
    }

    /// `<C_{Psi~} f, C_Psi h>`, which equals the ambient `<f, h>`.
    pub fn pairing(&self, f: &CVec, h: &CVec) -> Result<C64> {
        let c = self.dual.analysis(f)?;
        let d = self.frame.analysis(h)?;
        dual_pairing(c.as_slice(), d.as_slice())
    }
}

pub fn coorbit_norm(f: &CVec, spec: &CoorbitSpec) -> Result<f64> {
    spec.norm(f)
}

pub fn coorbit_pairing(f: &CVec, h: &CVec, spec: &CoorbitSpec) -> Result<C64> {
    spec.pairing(f, h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConstants {
    /// `1 / ||G_{Psi~,Psi~}||`.
    pub lower: f64,
    /// `||G_{Psi,Psi}||`.
    pub upper: f64,
    /// Both Gram norms were computed exactly.
    pub exact: bool,
}

/// Constants with `lower ||f||_H <= ||C_Psi f|| <= upper ||f||_H`.
///
/// Follows from `C_Psi f = G_{Psi,Psi} C_{Psi~} f` and
/// `C_{Psi~} f = G_{Psi~,Psi~} C_Psi f`.
pub fn equivalence_constants(frame: &Frame, space: &SeqSpaceSpec) -> Result<EquivalenceConstants> {
    let dual = frame.canonical_dual()?;
    let g = gram(frame, frame)?;
    let gd = gram(&dual, &dual)?;
    let up = weighted_op_norm(&g, space, space)?;
    let dn = weighted_op_norm(&gd, space, space)?;
    Ok(EquivalenceConstants {
        lower: 1.0 / dn.value,
        upper: up.value,
        exact: up.exact && dn.exact,
    })
}

/// Interval containing `||f||_{H(Psi)} / ||f||_{H(Phi)}` for every `f`.
///
/// From `C_{Psi~} f = G_{Psi~,Phi} C_{Phi~} f` and the mirrored identity.
pub fn frame_norm_equivalence(psi: &Frame, phi: &Frame, family: &SpaceFamily) -> Result<(f64, f64)> {
    let sp = family.on(psi.index_set())?;
    let sf = family.on(phi.index_set())?;
    let psi_d = psi.canonical_dual()?;
    let phi_d = phi.canonical_dual()?;
    let up = weighted_op_norm(&gram(&psi_d, phi)?, &sf, &sp)?;
    let dn = weighted_op_norm(&gram(&phi_d, psi)?, &sp, &sf)?;
    Ok((1.0 / dn.value, up.value))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionWitness {
    /// `(N, ||f_N||_b / ||f_N||_a)` along the schedule.
    pub ratios: Vec<(usize, f64)>,
    /// Nondecreasing along the schedule (up to round-off) and larger at the end.
    ///
    /// Two-dimensional families keep their redundancy when resized, so the
    /// outermost shell may stay put for one doubling.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoorbitInclusion {
    pub included: bool,
    pub seq_certificate: InclusionCertificate,
    pub witness: Option<InclusionWitness>,
    pub witness_note: Option<String>,
}

/// Coefficients whose synthesis separates `a` from `b`.
///
/// Sup-type criteria use the unit sequence where `w_b / w_a` peaks; the
/// summable criterion uses `v = rho^{r/p_a}` divided by `w_a`, which
/// saturates Hölder's inequality in the sequence spaces.
fn witness_coefficients(criterion: InclusionCriterion, pa: Exponent, wa: &Weight, wb: &Weight) -> CVec {
    let rho: Vec<f64> = wb.values().iter().zip(wa.values()).map(|(b, a)| b / a).collect();
    let k = rho.len();
    match criterion {
        InclusionCriterion::SummableRatio { r } => {
            let e = if pa.is_sup() { 0.0 } else { r / pa.value() };
            CVec::from_fn(k, |i, _| C64::new(rho[i].powf(e) / wa.values()[i], 0.0))
        }
        _ => {
            let top = (0..k).fold(0, |best, i| if rho[i] > rho[best] { i } else { best });
            let mut c = CVec::zeros(k);
            c[top] = C64::new(1.0, 0.0);
            c
        }
    }
}

fn witness_ratio(frame: &Frame, a: &SpaceFamily, b: &SpaceFamily, criterion: InclusionCriterion) -> Result<f64> {
    let sa = a.on(frame.index_set())?;
    let sb = b.on(frame.index_set())?;
    let c = witness_coefficients(criterion, a.p, &sa.weight, &sb.weight);
    let f = frame.synthesis(&c)?;
    // one dual for both norms
    let coef = frame.canonical_dual()?.analysis(&f)?;
    Ok(seq_norm(coef.as_slice(), &sb)? / seq_norm(coef.as_slice(), &sa)?)
}

/// Finite-scale check of `H^{p_a}_{w_a} ⊆ H^{p_b}_{w_b}`.
///
/// The verdict mirrors the sequence-space inclusion; a non-inclusion is
/// backed by a witness built along [`WITNESS_SCHEDULE`] from the frame's
/// constructor family.
pub fn coorbit_inclusion(frame: &Frame, a: &SpaceFamily, b: &SpaceFamily) -> Result<CoorbitInclusion> {
    let floor = frame.min_vector_norm();
    if floor < NORM_BOUNDED_FLOOR {
        return Err(Error::Precondition(format!(
            "frame is not norm-bounded below: inf ||psi_k|| = {floor:.3e}"
        )));
    }
    let cert = seq_space_included(a, b)?;
    if cert.included {
        return Ok(CoorbitInclusion {
            included: true,
            seq_certificate: cert,
            witness: None,
            witness_note: None,
        });
    }
    let criterion = inclusion_criterion(a.p, b.p);
    let Some(spec) = frame.spec() else {
        return Ok(CoorbitInclusion {
            included: false,
            seq_certificate: cert,
            witness: None,
            witness_note: Some("frame has no constructor family to grow".into()),
        });
    };
    let family = witness_family(spec);
    let ratios = crate::par_map(family.len(), |i| -> Result<(usize, f64)> {
        let (n, s) = &family[i];
        Ok((*n, witness_ratio(&s.build()?, a, b, criterion)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let note = (ratios.len() < 2).then(|| format!("family {} cannot be resized", spec.id()));
    let monotone = ratios.len() >= 2
        && ratios.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - WITNESS_SLACK))
        && ratios[ratios.len() - 1].1 > ratios[0].1 * (1.0 + WITNESS_SLACK);
    Ok(CoorbitInclusion {
        included: false,
        seq_certificate: cert,
        witness: (!ratios.is_empty()).then_some(InclusionWitness { ratios, monotone }),
        witness_note: note,
    })
}

/// Resized family used by witnesses; exposed for diagnostics.
pub fn witness_family(spec: &FrameSpec) -> Vec<(usize, FrameSpec)> {
    WITNESS_SCHEDULE
        .iter()
        .filter_map(|&n| spec.resized(n).map(|s| (n, s)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Exact,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisNorm {
    pub value: f64,
    pub kind: NormKind,
}

/// `inf { ||c||_{l^p_w} : f = D c }`.
///
/// Exact for `p = 2` through the weighted least-norm solution
/// `c = W^{-1} (V W^{-1})^+ f`; other exponents return the norm of the
/// canonical-dual coefficients, an upper bound.
pub fn min_synthesis_norm(f: &CVec, frame: &Frame, space: &SeqSpaceSpec) -> Result<SynthesisNorm> {
    if space.len() != frame.len() {
        return Err(Error::dim(frame.len(), space.len()));
    }
    if f.len() != frame.dim() {
        return Err(Error::dim(frame.dim(), f.len()));
    }
    frame.frame_bounds()?;
    if space.p == Exponent::Two {
        let w = space.weight.values();
        let scaled = CMat::from_fn(frame.dim(), frame.len(), |r, c| frame.vectors()[(r, c)] / w[c]);
        let u = pseudo_inverse(&scaled, RANK_TOL) * f;
        let c = CVec::from_fn(u.len(), |i, _| u[i] / w[i]);
        return Ok(SynthesisNorm {
            value: seq_norm(c.as_slice(), space)?,
            kind: NormKind::Exact,
        });
    }
    let c = frame.canonical_dual()?.analysis(f)?;
    Ok(SynthesisNorm {
        value: seq_norm(c.as_slice(), space)?,
        kind: NormKind::Bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::WindowSpec;
    use crate::linalg::dense::{random_cvec, seeded};
    use crate::linalg::WeightFamily;
    use approx::assert_relative_eq;

    fn onb(n: usize) -> Frame {
        FrameSpec::Onb { n }.build().unwrap()
    }

    #[test]
    fn onb_is_member_with_norm_one() {
        let f = onb(8);
        let r = localization_report(&f, &f, &MatrixAlgebraSpec::jaffard(3.0)).unwrap();
        assert_eq!(r.cross_gram_norm, 1.0);
        assert!(r.member);
        assert!(r.decay_fit.is_none());
        match dual_localization_check(&f, &MatrixAlgebraSpec::jaffard(3.0)).unwrap() {
            DualLocalization::Checked { primal, dual, mixed, .. } => {
                assert_eq!(primal.cross_gram_norm, 1.0);
                assert_eq!(dual.cross_gram_norm, 1.0);
                assert_eq!(mixed.cross_gram_norm, 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn perturbed_onb_member() {
        let f = FrameSpec::PerturbedOnb { n: 64, decay: 3.0, seed: 7 }.build().unwrap();
        let alg = MatrixAlgebraSpec::jaffard(3.0);
        let r = localization_report(&f, &f, &alg).unwrap();
        assert!(r.member, "{r:?}");
        match dual_localization_check(&f, &alg).unwrap() {
            DualLocalization::Checked { dual, .. } => {
                assert!(dual.fitted_exponent().unwrap() >= 2.5, "{:?}", dual.decay_fit);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn slow_window_is_not_in_high_order_class() {
        let f = FrameSpec::gabor(64, 4, 4, WindowSpec::Polynomial { decay: 1.0 }).build().unwrap();
        let r = localization_report(&f, &f, &MatrixAlgebraSpec::jaffard(5.0)).unwrap();
        assert!(!r.member, "{r:?}");
        assert!(r.fitted_exponent().unwrap() < 5.0);
    }

    #[test]
    fn tight_frame_dual_is_rescaled() {
        let f = FrameSpec::Mercedes.build().unwrap();
        let alg = MatrixAlgebraSpec::jaffard(2.0);
        match dual_localization_check(&f, &alg).unwrap() {
            DualLocalization::Checked { primal, dual, .. } => {
                // psi~ = psi / 1.5, so the Gram shrinks by 2.25
                assert_relative_eq!(dual.cross_gram_norm * 2.25, primal.cross_gram_norm, epsilon = 1e-10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transitivity_onb() {
        let f = onb(6);
        let t = transitivity_check(&f, &f, &f, &f, &MatrixAlgebraSpec::jaffard(3.0)).unwrap();
        assert!(t.holds && t.hypotheses_member);
        assert_eq!(t.norm_psi_xi, 1.0);
    }

    #[test]
    fn transitivity_rejects_foreign_dual() {
        let phi = FrameSpec::gabor(16, 4, 2, WindowSpec::Gaussian).build().unwrap();
        let other = FrameSpec::gabor(16, 2, 4, WindowSpec::Gaussian).build().unwrap();
        let wrong = other.canonical_dual().unwrap();
        let r = transitivity_check(&phi, &phi, &wrong, &phi, &MatrixAlgebraSpec::jaffard(3.0));
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn coorbit_norm_on_onb_is_sequence_norm() {
        let f = onb(5);
        let w = Weight::explicit(vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let spec = CoorbitSpec::new(&f, SeqSpaceSpec::new(Exponent::One, w.clone())).unwrap();
        let x = random_cvec(5, &mut seeded(2));
        let direct = seq_norm(x.as_slice(), &SeqSpaceSpec::new(Exponent::One, w)).unwrap();
        assert_relative_eq!(spec.norm(&x).unwrap(), direct, epsilon = 1e-14);
        assert_eq!(spec.norm(&CVec::zeros(5)).unwrap(), 0.0);
    }

    #[test]
    fn tight_frame_coorbit_norm() {
        let f = FrameSpec::Mercedes.build().unwrap();
        let spec = CoorbitSpec::new(&f, SeqSpaceSpec::unweighted(Exponent::Two, 3)).unwrap();
        let x = random_cvec(2, &mut seeded(4));
        assert_relative_eq!(spec.norm(&x).unwrap(), x.norm() / 1.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn pairing_matches_ambient_inner_product() {
        let f = FrameSpec::gabor(16, 4, 2, WindowSpec::Gaussian).build().unwrap();
        let spec = CoorbitSpec::new(&f, SeqSpaceSpec::unweighted(Exponent::One, f.len())).unwrap();
        let mut rng = seeded(9);
        let (x, y) = (random_cvec(16, &mut rng), random_cvec(16, &mut rng));
        let ambient = y.dotc(&x);
        assert!((spec.pairing(&x, &y).unwrap() - ambient).norm() < 1e-10 * x.norm() * y.norm());
    }

    #[test]
    fn equivalence_constants_of_duplicated_onb() {
        let f = FrameSpec::DuplicatedOnb { n: 4, copies: 2 }.build().unwrap();
        let c = equivalence_constants(&f, &SeqSpaceSpec::unweighted(Exponent::One, 8)).unwrap();
        // G has column sums 2; G~ = G / 4 has column sums 1/2
        assert_relative_eq!(c.upper, 2.0, epsilon = 1e-12);
        assert_relative_eq!(c.lower, 2.0, epsilon = 1e-12);
        assert!(c.exact);
        let onb = equivalence_constants(&onb(4), &SeqSpaceSpec::unweighted(Exponent::Inf, 4)).unwrap();
        assert_eq!((onb.lower, onb.upper), (1.0, 1.0));
    }

    #[test]
    fn min_synthesis_duplicated_onb() {
        let f = FrameSpec::DuplicatedOnb { n: 3, copies: 2 }.build().unwrap();
        let mut e1 = CVec::zeros(3);
        e1[0] = C64::new(1.0, 0.0);
        let r = min_synthesis_norm(&e1, &f, &SeqSpaceSpec::unweighted(Exponent::Two, 6)).unwrap();
        assert_eq!(r.kind, NormKind::Exact);
        assert_relative_eq!(r.value, 2f64.sqrt() / 2.0, epsilon = 1e-12);
        let r1 = min_synthesis_norm(&e1, &f, &SeqSpaceSpec::unweighted(Exponent::One, 6)).unwrap();
        assert_eq!(r1.kind, NormKind::Bound);
    }

    #[test]
    fn weighted_min_synthesis_prefers_light_copy() {
        // two copies of e_0 with weights 1 and 3: optimum puts 9/10 on the first
        let v = CMat::from_row_slice(1, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let f = Frame::new(v, crate::IndexSet::line(2), "pair").unwrap();
        let sp = SeqSpaceSpec::new(Exponent::Two, Weight::explicit(vec![1.0, 3.0]).unwrap());
        let one = CVec::from_element(1, C64::new(1.0, 0.0));
        let r = min_synthesis_norm(&one, &f, &sp).unwrap();
        let oracle = ((0.9f64).powi(2) + (3.0 * 0.1f64).powi(2)).sqrt();
        assert_relative_eq!(r.value, oracle, epsilon = 1e-12);
    }

    #[test]
    fn inclusion_on_onb() {
        let f = onb(16);
        let w = WeightFamily::Polynomial { t: 1.0 };
        let inc = coorbit_inclusion(&f, &SpaceFamily::new(Exponent::One, w.clone()), &SpaceFamily::new(Exponent::Two, w)).unwrap();
        assert!(inc.included);
        let a = SpaceFamily::unweighted(Exponent::Inf);
        let b = SpaceFamily::unweighted(Exponent::One);
        let inc = coorbit_inclusion(&f, &a, &b).unwrap();
        assert!(!inc.included);
        let wit = inc.witness.unwrap();
        assert!(wit.monotone);
        // constant coefficients: ratio is exactly N
        for (n, r) in wit.ratios {
            assert_relative_eq!(r, n as f64, epsilon = 1e-9);
        }
        let same = coorbit_inclusion(&f, &a, &a).unwrap();
        assert!(same.included);
        assert_eq!(same.seq_certificate.certificate, 1.0);
    }

    #[test]
    fn inclusion_requires_norm_bounded_frame() {
        let mut v = CMat::identity(3, 4);
        v[(0, 3)] = C64::new(0.0, 0.0);
        let f = Frame::new(v, crate::IndexSet::line(4), "zero-col").unwrap();
        let s = SpaceFamily::unweighted(Exponent::Two);
        assert!(matches!(coorbit_inclusion(&f, &s, &s), Err(Error::Precondition(_))));
    }
}
