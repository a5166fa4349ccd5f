//! Projection (finite-section) and frame-Galerkin solvers.
//!
//! Finite sections compress `A` to `A_N = Q_N^H A Q_N` on the span `V_N` of a
//! nested family of subframes and solve `P_N A P_N x = P_N y`. The frame-Galerkin
//! solver works on the coefficient system `M(Φ,Φ)(O) c = C_Φ g` and
//! synthesizes `f = D_Φ c`.

mod iterative;
mod operators;
mod schedule;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use iterative::{
    cg_solve, is_hermitian, richardson_solve, IterOptions, IterStatus, IterativeOutcome, DIVERGENCE_FACTOR,
    HERMITIAN_TOL, STAGNATION_WINDOW,
};
pub use operators::{make_test_operator, TestOperator, MIN_DIM};
pub use schedule::{
    subframe_projection, ProjectionSchedule, ScheduleSpec, Selection, SubframeLevel, FIRST_LEVEL, SUBFRAME_RATIO_CAP,
};

use crate::error::{Error, Result};
use crate::frames::{gram, Frame};
use crate::galerkin::LinearOperator;
use crate::linalg::dense::{norm2, svd};
use crate::linalg::{hermitian_eigen, numerical_rank, pseudo_inverse};
use crate::{CMat, CVec, RANK_TOL};

/// Slope of `log ||A_N^{-1}||` against `log N` above which the inverses are
/// not considered uniformly bounded.
pub const MONITOR_SLOPE_CAP: f64 = 0.5;
/// Share of the reference solution's energy used to start the monotonicity check.
pub const ENERGY_CAPTURE: f64 = 0.99;
/// Relative indefiniteness below which a Hermitian system counts as semidefinite.
const DEFINITE_TOL: f64 = 1e-10;
/// Iterative solvers run this much tighter than the requested tolerance.
const INNER_TOL_FACTOR: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cg,
    Richardson,
    Direct,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cg" => Ok(Method::Cg),
            "richardson" => Ok(Method::Richardson),
            "direct" => Ok(Method::Direct),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cg => "cg",
            Method::Richardson => "richardson",
            Method::Direct => "direct",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub method: Method,
    /// Target relative residual of the ambient equation.
    pub tol: f64,
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Cg,
            tol: 1e-10,
            max_iter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    /// `|K_N|`.
    pub size: usize,
    /// `dim V_N`.
    pub dim: usize,
    /// `||A x_N - y||`.
    pub residual: f64,
    pub relative_residual: f64,
    /// `||x_N - x*||` when the reference solution exists.
    pub error: Option<f64>,
    /// `||A_N^{-1}||`, or `||A_N^+||` on singular levels.
    pub inverse_norm: Option<f64>,
    pub kappa_dagger: Option<f64>,
    pub iterations: usize,
    pub status: IterStatus,
    pub singular: bool,
    /// Hermitian system with a negative eigenvalue handed to CG or Richardson.
    pub indefinite: bool,
    pub normal_equations: bool,
    /// `||x_N - x_{N-1}||`.
    pub cauchy_increment: Option<f64>,
    /// `||P_N x*||^2 / ||x*||^2`.
    pub energy_capture: Option<f64>,
    /// Frame bounds `(C_N, D_N)` of the subframe on `V_N`.
    pub subframe_bounds: (f64, f64),
}

impl LevelReport {
    pub fn failed(&self) -> bool {
        self.indefinite || self.status.is_breakdown()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    pub selection: Option<Selection>,
    pub frame: String,
    pub tolerance: f64,
    pub levels: Vec<LevelReport>,
    /// `||I - A||`; below one the projection method converges.
    pub identity_gap: Option<f64>,
    pub inverse_norm_sup: Option<f64>,
    pub monitor_slope: Option<f64>,
    pub uniform_bounds: bool,
    /// Some level has `D_N / C_N` above [`SUBFRAME_RATIO_CAP`].
    pub subframe_ratio_flag: bool,
    pub final_relative_residual: f64,
    pub converged: bool,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct CsvRow {
    level: usize,
    n: usize,
    dim: usize,
    residual: f64,
    error: Option<f64>,
    inverse_norm: Option<f64>,
    iterations: usize,
    kappa_dagger: Option<f64>,
    energy_capture: Option<f64>,
    singular: bool,
}

impl SolveReport {
    pub fn final_level(&self) -> &LevelReport {
        self.levels.last().expect("at least one level")
    }

    /// Some level broke down or was indefinite.
    pub fn diverged(&self) -> bool {
        self.levels.iter().any(LevelReport::failed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per level: N, residual, error, inverse norm, iterations.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for l in &self.levels {
            w.serialize(CsvRow {
                level: l.level,
                n: l.size,
                dim: l.dim,
                residual: l.residual,
                error: l.error,
                inverse_norm: l.inverse_norm,
                iterations: l.iterations,
                kappa_dagger: l.kappa_dagger,
                energy_capture: l.energy_capture,
                singular: l.singular,
            })
            .map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    /// Errors are nonincreasing from the first level holding [`ENERGY_CAPTURE`]
    /// of the reference energy. `None` without a reference solution.
    pub fn error_monotone_after_capture(&self, slack: f64) -> Option<bool> {
        let start = self.levels.iter().position(|l| l.energy_capture.is_some_and(|e| e >= ENERGY_CAPTURE))?;
        let errs: Option<Vec<f64>> = self.levels[start..].iter().map(|l| l.error).collect();
        Some(errs?.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack) + f64::MIN_POSITIVE))
    }
}

struct Spectrum {
    singular: bool,
    inverse_norm: Option<f64>,
    kappa: Option<f64>,
    /// Orthogonal projector onto `ran A_N`.
    range: CMat,
}

fn spectrum(a: &CMat) -> Spectrum {
    let d = svd(a);
    let rank = numerical_rank(&d.s, RANK_TOL);
    let full = rank == a.nrows().min(a.ncols());
    let u = d.u.columns(0, rank).into_owned();
    Spectrum {
        singular: !full,
        inverse_norm: (rank > 0).then(|| 1.0 / d.s[rank - 1]),
        kappa: (rank > 0).then(|| d.s[0] / d.s[rank - 1]),
        range: &u * u.adjoint(),
    }
}

struct Compressed {
    solution: CVec,
    iterations: usize,
    status: IterStatus,
    indefinite: bool,
    normal_equations: bool,
}

/// Solves `a z = b` on `ran a` with the chosen method.
fn solve_compressed(a: &CMat, b: &CVec, sp: &Spectrum, opts: &SolveOptions) -> Result<Compressed> {
    let projected = &sp.range * b;
    if opts.method == Method::Direct {
        let z = if sp.singular {
            pseudo_inverse(a, RANK_TOL) * b
        } else {
            a.clone().lu().solve(b).ok_or_else(|| Error::NotBijective { condition: f64::INFINITY })?
        };
        return Ok(Compressed {
            solution: z,
            iterations: 0,
            status: IterStatus::Converged,
            indefinite: false,
            normal_equations: false,
        });
    }
    let hermitian = is_hermitian(a);
    let iter = IterOptions {
        tol: opts.tol * INNER_TOL_FACTOR,
        max_iter: opts.max_iter,
        normal_equations: true,
    };
    // spectrum of the system the iteration actually sees
    let (vals, _) = if hermitian { hermitian_eigen(a) } else { hermitian_eigen(&a.ad_mul(a)) };
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let indefinite = hermitian && vals[0] < -DEFINITE_TOL * top;
    let out = match opts.method {
        Method::Cg => cg_solve(a, &projected, Some(&sp.range), &iter)?,
        Method::Richardson => {
            let low = vals.iter().map(|v| v.abs()).filter(|&v| v > RANK_TOL * top).fold(f64::INFINITY, f64::min);
            let relaxation = if top == 0.0 { 1.0 } else { 2.0 / (low + top) };
            richardson_solve(a, &projected, relaxation, Some(&sp.range), &iter)?
        }
        Method::Direct => unreachable!("handled above"),
    };
    Ok(Compressed {
        solution: out.solution,
        iterations: out.iterations,
        status: out.status,
        indefinite: indefinite && opts.method != Method::Direct,
        normal_equations: out.normal_equations,
    })
}

/// Least-squares slope of `log y` against `log x`.
fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

fn reference_solution(a: &CMat, y: &CVec) -> Option<CVec> {
    let s = crate::linalg::singular_values(a);
    if numerical_rank(&s, RANK_TOL) < a.nrows() {
        return None;
    }
    a.clone().lu().solve(y)
}

/// Projection method `P_N A P_N x_N = P_N y` along `schedule`.
///
/// Levels are independent and may be solved in parallel. Singular sections are
/// solved by pseudo-inverse and flagged; the schedule continues.
pub fn finite_section_solve(
    a: &LinearOperator,
    y: &CVec,
    schedule: &ProjectionSchedule,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    finite_section_run(a, y, schedule, opts).map(|(_, r)| r)
}

/// [`finite_section_solve`] that also returns the final-level solution.
pub fn finite_section_run(
    a: &LinearOperator,
    y: &CVec,
    schedule: &ProjectionSchedule,
    opts: &SolveOptions,
) -> Result<(CVec, SolveReport)> {
    let (r, c) = a.shape();
    if r != c {
        return Err(Error::Contract(format!("operator is {r}x{c}, not square")));
    }
    if c != schedule.ambient_dim() {
        return Err(Error::dim(schedule.ambient_dim(), c));
    }
    if y.len() != r {
        return Err(Error::dim(r, y.len()));
    }
    let ad = a.to_dense();
    let reference = reference_solution(&ad, y);
    let solved = crate::par_map(schedule.levels.len(), |i| -> Result<(CVec, LevelReport)> {
        let lvl = &schedule.levels[i];
        let q = &lvl.basis;
        let an = q.ad_mul(&(&ad * q));
        let bn = q.ad_mul(y);
        let sp = spectrum(&an);
        let out = solve_compressed(&an, &bn, &sp, opts)?;
        let x = q * &out.solution;
        let res = (&ad * &x - y).norm();
        let yn = y.norm();
        let report = LevelReport {
            level: i,
            size: lvl.indices.len(),
            dim: lvl.dim(),
            residual: res,
            relative_residual: if yn > 0.0 { res / yn } else { res },
            error: reference.as_ref().map(|xs| (&x - xs).norm()),
            inverse_norm: sp.inverse_norm,
            kappa_dagger: sp.kappa,
            iterations: out.iterations,
            status: out.status,
            singular: sp.singular,
            indefinite: out.indefinite,
            normal_equations: out.normal_equations,
            cauchy_increment: None,
            energy_capture: reference.as_ref().map(|xs| {
                let total = xs.norm_squared();
                if total == 0.0 {
                    1.0
                } else {
                    q.ad_mul(xs).norm_squared() / total
                }
            }),
            subframe_bounds: lvl.bounds(),
        };
        Ok((x, report))
    });
    let solved: Vec<(CVec, LevelReport)> = solved.into_iter().collect::<Result<_>>()?;
    let mut levels = Vec::with_capacity(solved.len());
    let mut prev: Option<&CVec> = None;
    for (x, rep) in &solved {
        let mut rep = rep.clone();
        rep.cauchy_increment = prev.map(|p| (x - p).norm());
        prev = Some(x);
        levels.push(rep);
    }
    let identity_gap = Some(norm2(&(CMat::identity(r, r) - &ad)));
    let mut warnings = Vec::new();
    if let Some(g) = identity_gap.filter(|&g| g >= 1.0) {
        warnings.push(format!("||I - A|| = {g:.6} is not below 1; convergence is not guaranteed"));
    }
    if reference.is_none() {
        warnings.push("A is numerically singular; no reference solution".into());
    }
    let x = solved.into_iter().last().expect("at least one level").0;
    let report = finish(levels, opts, schedule.selection, schedule.frame_id.clone(), identity_gap, warnings, schedule.worst_bound_ratio());
    Ok((x, report))
}

fn finish(
    levels: Vec<LevelReport>,
    opts: &SolveOptions,
    selection: Option<Selection>,
    frame: String,
    identity_gap: Option<f64>,
    mut warnings: Vec<String>,
    worst_ratio: f64,
) -> SolveReport {
    let points: Vec<(f64, f64)> = levels
        .iter()
        .filter_map(|l| l.inverse_norm.map(|v| (l.dim as f64, v)))
        .filter(|&(d, _)| d > 0.0)
        .collect();
    let inverse_norm_sup = points.iter().map(|p| p.1).reduce(f64::max);
    let monitor_slope = log_slope(&points);
    let uniform_bounds = points.len() == levels.len() && monitor_slope.is_none_or(|s| s < MONITOR_SLOPE_CAP);
    let subframe_ratio_flag = worst_ratio > SUBFRAME_RATIO_CAP;
    if subframe_ratio_flag {
        warnings.push(format!("subframe bound ratio {worst_ratio:.3e} exceeds the cap"));
    }
    let last = levels.last().expect("at least one level");
    let final_relative_residual = last.relative_residual;
    let converged = !last.singular && !last.failed() && final_relative_residual <= opts.tol && uniform_bounds;
    if levels.iter().any(|l| l.singular) {
        warnings.push("singular compressed systems were solved by pseudo-inverse".into());
    }
    SolveReport {
        method: opts.method,
        selection,
        frame,
        tolerance: opts.tol,
        levels,
        identity_gap,
        inverse_norm_sup,
        monitor_slope,
        uniform_bounds,
        subframe_ratio_flag,
        final_relative_residual,
        converged,
        warnings,
    }
}

/// Ambient and coefficient residuals of a frame-Galerkin solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualConsistency {
    /// `||O f - g||`.
    pub ambient: f64,
    /// `||M c - C_Φ g||`.
    pub coefficient: f64,
    /// `sqrt(A) ||O f - g||` and `sqrt(B) ||O f - g||`.
    pub bounds: (f64, f64),
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameGalerkinSolution {
    pub f: CVec,
    pub coefficients: CVec,
    pub report: SolveReport,
    pub consistency: ResidualConsistency,
}

/// Solves `M(Φ,Φ)(O) c = C_Φ g` for `c` in `ran C_Φ~` and returns `f = D_Φ c`.
///
/// The system matrix is singular for redundant frames; the right-hand side is
/// projected with `G_{Φ~,Φ}` and the iteration stays in that range.
pub fn frame_galerkin_solve(o: &LinearOperator, g: &CVec, phi: &Frame, opts: &SolveOptions) -> Result<FrameGalerkinSolution> {
    let (r, c) = o.shape();
    if r != c {
        return Err(Error::Contract(format!("operator is {r}x{c}, not square")));
    }
    if r != phi.dim() {
        return Err(Error::dim(phi.dim(), r));
    }
    if g.len() != r {
        return Err(Error::dim(r, g.len()));
    }
    let od = o.to_dense();
    let v = phi.vectors();
    let m = v.ad_mul(&(&od * v));
    let b = v.ad_mul(g);
    let bounds = phi.frame_bounds()?;
    let dual = phi.canonical_dual()?;
    let proj = gram(&dual, phi)?;
    let sp = spectrum(&m);
    let out = solve_compressed(&m, &b, &Spectrum { range: proj, ..sp }, opts)?;
    let sp = spectrum(&m);
    let coef = out.solution;
    let f = v * &coef;
    let amb = &od * &f - g;
    let ambient = amb.norm();
    let coefficient = (&m * &coef - &b).norm();
    let lo = bounds.lower.sqrt() * ambient;
    let hi = bounds.upper.sqrt() * ambient;
    let slack = 1e-8 * b.norm() + f64::MIN_POSITIVE;
    let consistency = ResidualConsistency {
        ambient,
        coefficient,
        bounds: (lo, hi),
        consistent: coefficient >= lo - slack && coefficient <= hi + slack,
    };
    let reference = reference_solution(&od, g);
    let gn = g.norm();
    let level = LevelReport {
        level: 0,
        size: phi.len(),
        dim: phi.dim(),
        residual: ambient,
        relative_residual: if gn > 0.0 { ambient / gn } else { ambient },
        error: reference.as_ref().map(|fs| (&f - fs).norm()),
        inverse_norm: sp.inverse_norm,
        kappa_dagger: sp.kappa,
        iterations: out.iterations,
        status: out.status,
        // M is singular whenever Φ is redundant; only a rank drop below dim counts
        singular: numerical_rank(&crate::linalg::singular_values(&m), RANK_TOL) < phi.dim(),
        indefinite: out.indefinite,
        normal_equations: out.normal_equations,
        cauchy_increment: None,
        energy_capture: None,
        subframe_bounds: (bounds.lower, bounds.upper),
    };
    let mut warnings = Vec::new();
    if reference.is_none() {
        warnings.push("O is numerically singular; f is a pseudo-solution".into());
    }
    let report = finish(vec![level], opts, None, phi.id().to_string(), None, warnings, bounds.upper / bounds.lower);
    Ok(FrameGalerkinSolution {
        f,
        coefficients: coef,
        report,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{FrameSpec, WindowSpec};
    use crate::linalg::dense::{random_cvec, seeded};

    fn onb_schedule(n: usize) -> ProjectionSchedule {
        let f = FrameSpec::Onb { n }.build().unwrap();
        ProjectionSchedule::build(&f, &ScheduleSpec::default(), None).unwrap()
    }

    #[test]
    fn identity_gives_projected_rhs() {
        let s = onb_schedule(32);
        let y = random_cvec(32, &mut seeded(1));
        for method in [Method::Direct, Method::Cg, Method::Richardson] {
            let opts = SolveOptions { method, ..Default::default() };
            let rep = finite_section_solve(&LinearOperator::identity(32), &y, &s, &opts).unwrap();
            assert!(rep.converged, "{method}");
            for (lvl, l) in rep.levels.iter().zip(&s.levels) {
                let py = l.projection_matrix() * &y;
                assert!((lvl.error.unwrap() - (&py - &y).norm()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn contraction_converges_with_bounded_monitor() {
        let n = 64;
        let a = TestOperator::IdentityMinusKernel { theta: 0.5, exponent: 3.0 }.build(n).unwrap();
        let y = random_cvec(n, &mut seeded(2));
        let rep = finite_section_solve(&a, &y, &onb_schedule(n), &SolveOptions::default()).unwrap();
        assert!(rep.converged, "{rep:#?}");
        assert!((rep.identity_gap.unwrap() - 0.5).abs() < 1e-12);
        assert!(rep.inverse_norm_sup.unwrap() <= 2.0 + 1e-9);
        assert!(rep.final_level().error.unwrap() <= 1e-8);
        assert_eq!(rep.error_monotone_after_capture(1e-12), Some(true));
        let csv = rep.to_csv().unwrap();
        assert_eq!(csv.lines().count(), rep.levels.len() + 1);
        assert!(csv.starts_with("level,n,dim,residual,error,inverse_norm,iterations"));
    }

    #[test]
    fn singular_operator_is_flagged() {
        let mut vals: Vec<f64> = (1..=16).map(f64::from).collect();
        vals[0] = 0.0;
        let a = TestOperator::Diagonal { values: vals }.build(16).unwrap();
        let y = random_cvec(16, &mut seeded(3));
        let rep = finite_section_solve(&a, &y, &onb_schedule(16), &SolveOptions { method: Method::Direct, ..Default::default() }).unwrap();
        assert!(rep.levels.iter().all(|l| l.singular));
        assert!(!rep.converged);
    }

    #[test]
    fn path_adjacency_monitor_grows() {
        let n = 128;
        let a = TestOperator::PathAdjacency.build(n).unwrap();
        let y = random_cvec(n, &mut seeded(4));
        let rep = finite_section_solve(&a, &y, &onb_schedule(n), &SolveOptions { method: Method::Direct, ..Default::default() }).unwrap();
        assert!(rep.monitor_slope.unwrap() >= MONITOR_SLOPE_CAP, "{:?}", rep.monitor_slope);
        assert!(!rep.uniform_bounds && !rep.converged);
    }

    #[test]
    fn indefinite_cg_is_divergent() {
        let n = 64;
        let a = TestOperator::IdentityMinusKernel { theta: 1.2, exponent: 3.0 }.build(n).unwrap();
        let y = random_cvec(n, &mut seeded(5));
        let rep = finite_section_solve(&a, &y, &onb_schedule(n), &SolveOptions::default()).unwrap();
        assert!(rep.diverged() && !rep.converged);
    }

    #[test]
    fn galerkin_identity_on_onb() {
        let f = FrameSpec::Onb { n: 12 }.build().unwrap();
        let g = random_cvec(12, &mut seeded(6));
        let sol = frame_galerkin_solve(&LinearOperator::identity(12), &g, &f, &SolveOptions::default()).unwrap();
        assert!((&sol.f - &g).norm() < 1e-12);
        assert_eq!(sol.report.final_level().iterations, 1);
    }

    #[test]
    fn galerkin_frame_operator_inverts() {
        let f = FrameSpec::gabor(16, 4, 2, WindowSpec::Gaussian).build().unwrap();
        let s: LinearOperator = f.frame_operator().clone().into();
        let g = random_cvec(16, &mut seeded(7));
        let sol = frame_galerkin_solve(&s, &g, &f, &SolveOptions { tol: 1e-12, ..Default::default() }).unwrap();
        let want = f.frame_operator_inverse().unwrap() * &g;
        assert!((&sol.f - want).norm() <= 1e-8);
        assert!(sol.consistency.consistent);
    }

    #[test]
    fn galerkin_redundant_frame_singular_matrix() {
        let f = FrameSpec::gabor(32, 4, 4, WindowSpec::Gaussian).build().unwrap();
        assert_eq!(f.redundancy(), 2.0);
        let o = TestOperator::IdentityMinusKernel { theta: 0.4, exponent: 3.0 }.build(32).unwrap();
        let g = random_cvec(32, &mut seeded(8));
        for method in [Method::Cg, Method::Richardson, Method::Direct] {
            let sol = frame_galerkin_solve(&o, &g, &f, &SolveOptions { method, tol: 1e-10, ..Default::default() }).unwrap();
            let lvl = sol.report.final_level();
            assert!(sol.report.converged, "{method}: {:#?}", sol.report);
            assert!(lvl.residual <= 1e-8 && lvl.error.unwrap() <= 1e-8, "{method}");
            assert!(sol.consistency.consistent);
        }
    }
}
