use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::pseudo_inverse;
use crate::{CMat, CVec, C64, RANK_TOL};

/// Relative asymmetry above which a matrix is not treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Iterations without a new best residual before CG gives up.
pub const STAGNATION_WINDOW: usize = 50;
/// Richardson stops once the residual exceeds this multiple of the initial one.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
const RANGE_TOL: f64 = 1e-8;
const POWER_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterStatus {
    Converged,
    MaxIterations,
    Stagnated,
    NegativeCurvature,
    Diverged,
}

impl IterStatus {
    pub fn is_breakdown(self) -> bool {
        matches!(self, IterStatus::Stagnated | IterStatus::NegativeCurvature | IterStatus::Diverged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativeOutcome {
    #[serde(skip)]
    pub solution: CVec,
    pub iterations: usize,
    pub status: IterStatus,
    /// `||b - M c_j|| / ||b||`, starting with `j = 0`.
    pub residual_history: Vec<f64>,
    /// `1/2 c^H M c - Re b^H c` along the iterates (CG only).
    pub energy_history: Vec<f64>,
    /// The iteration ran on `M^H M c = M^H b`.
    pub normal_equations: bool,
    pub relaxation: Option<f64>,
    pub estimated_rate: Option<f64>,
    pub observed_rate: Option<f64>,
    pub warning: Option<String>,
}

impl IterativeOutcome {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("initial residual recorded")
    }

    fn trivial(n: usize) -> Self {
        Self {
            solution: CVec::zeros(n),
            iterations: 0,
            status: IterStatus::Converged,
            residual_history: vec![0.0],
            energy_history: vec![0.0],
            normal_equations: false,
            relaxation: None,
            estimated_rate: None,
            observed_rate: None,
            warning: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterOptions {
    pub tol: f64,
    /// Defaults to `10 K` for CG and `10000` for Richardson.
    pub max_iter: Option<usize>,
    /// Allow CG on the normal equations for non-Hermitian input.
    pub normal_equations: bool,
}

impl Default for IterOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            normal_equations: false,
        }
    }
}

/// `||M - M^H||_F <= tol ||M||_F`.
pub fn is_hermitian(m: &CMat) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= HERMITIAN_TOL * m.norm().max(f64::MIN_POSITIVE)
}

fn check_square(m: &CMat, b: &CVec) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Contract(format!("system matrix is {}x{}", m.nrows(), m.ncols())));
    }
    if b.len() != m.nrows() {
        return Err(Error::dim(m.nrows(), b.len()));
    }
    Ok(())
}

/// Projects `b` with `projector`, or checks that it already lies in `ran M`.
fn prepare_rhs(m: &CMat, b: &CVec, projector: Option<&CMat>) -> Result<CVec> {
    match projector {
        Some(p) => {
            if p.shape() != m.shape() {
                return Err(Error::dim(m.nrows(), p.nrows()));
            }
            Ok(p * b)
        }
        None => {
            let inside = m * (pseudo_inverse(m, RANK_TOL) * b);
            if (&inside - b).norm() > RANGE_TOL * b.norm() {
                return Err(Error::Contract("right-hand side has a component outside the range".into()));
            }
            Ok(b.clone())
        }
    }
}

fn energy(m: &CMat, b: &CVec, c: &CVec) -> f64 {
    0.5 * c.dotc(&(m * c)).re - b.dotc(c).re
}

/// Conjugate gradients for `M c = b` with `M` Hermitian positive semidefinite.
///
/// Starts at zero, so iterates stay in the Krylov space of `b` inside `ran M`
/// and converge to the minimal-norm solution.
pub fn cg_solve(m: &CMat, b: &CVec, projector: Option<&CMat>, opts: &IterOptions) -> Result<IterativeOutcome> {
    check_square(m, b)?;
    let (sys, rhs, normal) = if is_hermitian(m) {
        (m.clone(), prepare_rhs(m, b, projector)?, false)
    } else if opts.normal_equations {
        let b = match projector {
            Some(p) => p * b,
            None => b.clone(),
        };
        (m.ad_mul(m), m.ad_mul(&b), true)
    } else {
        return Err(Error::Contract("conjugate gradients need a Hermitian matrix".into()));
    };
    let mut out = cg_core(&sys, &rhs, opts);
    out.normal_equations = normal;
    Ok(out)
}

fn cg_core(m: &CMat, b: &CVec, opts: &IterOptions) -> IterativeOutcome {
    let n = b.len();
    let bn = b.norm();
    if bn == 0.0 {
        return IterativeOutcome::trivial(n);
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n.max(1));
    let mut x = CVec::zeros(n);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.norm_squared();
    let mut out = IterativeOutcome::trivial(n);
    out.residual_history = vec![1.0];
    out.status = IterStatus::MaxIterations;
    let (mut best, mut best_it) = (1.0, 0);
    for it in 1..=max_iter {
        let ap = m * &p;
        let curv = p.dotc(&ap).re;
        if curv <= 0.0 {
            out.status = IterStatus::NegativeCurvature;
            break;
        }
        let alpha = C64::new(rs / curv, 0.0);
        x.axpy(alpha, &p, C64::new(1.0, 0.0));
        r.axpy(-alpha, &ap, C64::new(1.0, 0.0));
        let rs_new = r.norm_squared();
        let rel = rs_new.sqrt() / bn;
        out.iterations = it;
        out.residual_history.push(rel);
        out.energy_history.push(energy(m, b, &x));
        if rel <= opts.tol {
            out.status = IterStatus::Converged;
            break;
        }
        if rel < best {
            (best, best_it) = (rel, it);
        } else if it - best_it >= STAGNATION_WINDOW {
            out.status = IterStatus::Stagnated;
            break;
        }
        let beta = C64::new(rs_new / rs, 0.0);
        p = &r + &p * beta;
        rs = rs_new;
    }
    out.solution = x;
    out
}

/// `||E^j v|| ^ (1/j)` estimate of the contraction factor of `E = I - w M` from `v`.
fn power_rate(m: &CMat, relaxation: f64, start: &CVec) -> f64 {
    let mut v = start.clone();
    let n0 = v.norm();
    if n0 == 0.0 {
        return 0.0;
    }
    v /= C64::new(n0, 0.0);
    let w = C64::new(relaxation, 0.0);
    let mut rate = 0.0;
    for _ in 0..POWER_STEPS {
        let next = &v - m * &v * w;
        rate = next.norm();
        if rate == 0.0 {
            break;
        }
        v = next / C64::new(rate, 0.0);
    }
    rate
}

/// `c <- c + w (b - M c)` from `c = 0`.
pub fn richardson_solve(
    m: &CMat,
    b: &CVec,
    relaxation: f64,
    projector: Option<&CMat>,
    opts: &IterOptions,
) -> Result<IterativeOutcome> {
    check_square(m, b)?;
    if !(relaxation > 0.0 && relaxation.is_finite()) {
        return Err(Error::InvalidParameter(format!("relaxation {relaxation}")));
    }
    let (sys, rhs, normal) = if is_hermitian(m) || !opts.normal_equations {
        let b = match projector {
            Some(p) => p * b,
            None => b.clone(),
        };
        (m.clone(), b, false)
    } else {
        let b = match projector {
            Some(p) => p * b,
            None => b.clone(),
        };
        (m.ad_mul(m), m.ad_mul(&b), true)
    };
    let n = rhs.len();
    let bn = rhs.norm();
    if bn == 0.0 {
        return Ok(IterativeOutcome::trivial(n));
    }
    let estimated = power_rate(&sys, relaxation, &rhs);
    let mut out = IterativeOutcome::trivial(n);
    out.normal_equations = normal;
    out.relaxation = Some(relaxation);
    out.estimated_rate = Some(estimated);
    out.energy_history.clear();
    out.residual_history = vec![1.0];
    out.status = IterStatus::MaxIterations;
    if estimated >= 1.0 {
        out.warning = Some(format!("estimated contraction factor {estimated:.4} is not below 1"));
    }
    let w = C64::new(relaxation, 0.0);
    let mut c = CVec::zeros(n);
    let mut r = rhs.clone();
    for it in 1..=opts.max_iter.unwrap_or(10_000) {
        c.axpy(w, &r, C64::new(1.0, 0.0));
        r = &rhs - &sys * &c;
        let rel = r.norm() / bn;
        out.iterations = it;
        out.residual_history.push(rel);
        if rel <= opts.tol {
            out.status = IterStatus::Converged;
            break;
        }
        if rel > DIVERGENCE_FACTOR || !rel.is_finite() {
            out.status = IterStatus::Diverged;
            break;
        }
    }
    out.observed_rate = observed_rate(&out.residual_history);
    out.solution = c;
    Ok(out)
}

/// Geometric mean contraction over the second half of the history.
fn observed_rate(h: &[f64]) -> Option<f64> {
    let last = h.len().checked_sub(1)?;
    let start = last / 2;
    if last == start || h[start] <= 0.0 || h[last] <= 0.0 {
        return None;
    }
    Some((h[last] / h[start]).powf(1.0 / (last - start) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{gram, FrameSpec, WindowSpec};
    use crate::linalg::dense::{random_cvec, seeded};
    use crate::linalg::hermitian_eigen;

    fn diag(values: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))))
    }

    #[test]
    fn cg_identity_one_step() {
        let b = random_cvec(5, &mut seeded(1));
        let out = cg_solve(&CMat::identity(5, 5), &b, None, &IterOptions::default()).unwrap();
        assert_eq!((out.iterations, out.status), (1, IterStatus::Converged));
        assert!((out.solution - b).norm() < 1e-14);
    }

    #[test]
    fn cg_finite_termination_on_distinct_spectrum() {
        let vals: Vec<f64> = (1..=10).map(f64::from).collect();
        let b = CVec::from_element(10, C64::new(1.0, 0.0));
        let out = cg_solve(&diag(&vals), &b, None, &IterOptions::default()).unwrap();
        assert_eq!(out.status, IterStatus::Converged);
        assert!(out.iterations <= 10);
        for (i, v) in vals.iter().enumerate() {
            assert!((out.solution[i].re - 1.0 / v).abs() < 1e-9);
        }
    }

    #[test]
    fn cg_energy_is_monotone() {
        let g = FrameSpec::gabor(32, 4, 4, WindowSpec::Gaussian).build().unwrap();
        let m = gram(&g, &g).unwrap();
        let b = g.analysis(&random_cvec(32, &mut seeded(3))).unwrap();
        let out = cg_solve(&m, &b, None, &IterOptions::default()).unwrap();
        assert_eq!(out.status, IterStatus::Converged);
        for w in out.energy_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn cg_contract_errors() {
        let mut m = diag(&[1.0, 2.0, 0.0]);
        let b = CVec::from_element(3, C64::new(1.0, 0.0));
        assert!(matches!(cg_solve(&m, &b, None, &IterOptions::default()), Err(Error::Contract(_))));
        let p = diag(&[1.0, 1.0, 0.0]);
        assert_eq!(cg_solve(&m, &b, Some(&p), &IterOptions::default()).unwrap().status, IterStatus::Converged);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(cg_solve(&m, &b, Some(&p), &IterOptions::default()), Err(Error::Contract(_))));
        let opts = IterOptions { normal_equations: true, ..Default::default() };
        m[(2, 2)] = C64::new(3.0, 0.0);
        let out = cg_solve(&m, &b, None, &opts).unwrap();
        assert!(out.normal_equations);
        assert!((&m * out.solution - b).norm() < 1e-8);
    }

    #[test]
    fn cg_reports_negative_curvature() {
        let m = diag(&[1.0, -1.0]);
        let b = CVec::from_vec(vec![C64::new(0.1, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(cg_solve(&m, &b, None, &IterOptions::default()).unwrap().status, IterStatus::NegativeCurvature);
    }

    #[test]
    fn richardson_identity_exact() {
        let b = random_cvec(4, &mut seeded(2));
        let out = richardson_solve(&CMat::identity(4, 4), &b, 1.0, None, &IterOptions::default()).unwrap();
        assert_eq!((out.iterations, out.status), (1, IterStatus::Converged));
    }

    #[test]
    fn richardson_frame_algorithm_rate() {
        let f = FrameSpec::PerturbedOnb { n: 24, decay: 3.0, seed: 7 }.build().unwrap();
        let s = f.frame_operator().clone();
        let (vals, _) = hermitian_eigen(&s);
        let (a, bb) = (vals[0], vals[vals.len() - 1]);
        let rate = (bb - a) / (bb + a);
        let b = random_cvec(24, &mut seeded(8));
        let out = richardson_solve(&s, &b, 2.0 / (a + bb), None, &IterOptions { tol: 1e-12, ..Default::default() }).unwrap();
        assert_eq!(out.status, IterStatus::Converged);
        let obs = out.observed_rate.unwrap();
        assert!((obs - rate).abs() <= 0.2 * rate, "observed {obs}, predicted {rate}");
        assert!((out.estimated_rate.unwrap() - rate).abs() <= 0.2 * rate);
    }

    #[test]
    fn richardson_overrelaxed_diverges() {
        let s = diag(&[1.0, 2.0, 3.0]);
        let b = CVec::from_element(3, C64::new(1.0, 0.0));
        let out = richardson_solve(&s, &b, 1.5, None, &IterOptions::default()).unwrap();
        assert_eq!(out.status, IterStatus::Diverged);
        assert!(out.warning.is_some());
    }
}
