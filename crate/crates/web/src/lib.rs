//! Browser bindings for the demo page.
//!
//! Every export takes plain numbers and strings and returns a JSON document;
//! failures come back as `{"error": ..., "code": ...}` instead of throwing.

use locframe::frames::{gram, WindowSpec};
use locframe::galerkin::{schur_certificate, BoundCase};
use locframe::linalg::dense::{random_cmat, random_cvec, seeded};
use locframe::linalg::{decay_fit, singular_values, DecayFit};
use locframe::solver::{finite_section_run, Method, ProjectionSchedule, ScheduleSpec, Selection, SolveOptions, TestOperator};
use locframe::{CMat, Error, Exponent, FrameSpec, IndexSet, Result, Weight, WeightFamily};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest ambient dimension the page may request.
pub const MAX_DIM: usize = 256;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidParameter(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string(), "code": e.code() }).to_string(),
    }
}

fn window(name: &str, decay: f64) -> Result<WindowSpec> {
    Ok(match name {
        "gaussian" => WindowSpec::Gaussian,
        "centered_gaussian" => WindowSpec::CenteredGaussian,
        "polynomial" => WindowSpec::Polynomial { decay },
        other => return Err(Error::InvalidParameter(format!("unknown window '{other}'"))),
    })
}

fn fit_json(fit: &DecayFit) -> Value {
    json!({
        "exponent": fit.fitted_exponent,
        "residual": fit.residual,
        "shells": fit.shell_maxima,
        "exponential_like": fit.exponential_like,
    })
}

/// Bounds, windows and Gram decay of a Gabor system and its canonical dual.
pub fn gabor_report(n: usize, a: usize, b: usize, window_name: &str, decay: f64) -> Result<Value> {
    check_dim(n)?;
    let f = FrameSpec::gabor(n, a, b, window(window_name, decay)?).build()?;
    let bounds = f.frame_bounds()?;
    let d = f.canonical_dual()?;
    let ix = f.index_set();
    let primal = decay_fit(&gram(&f, &f)?, ix, ix)?;
    let dual = decay_fit(&gram(&d, &d)?, ix, ix)?;
    // column 0 is the window itself
    let g: Vec<f64> = f.vectors().column(0).iter().map(|z| z.re).collect();
    let gd: Vec<f64> = d.vectors().column(0).iter().map(|z| z.re).collect();
    Ok(json!({
        "id": f.id(),
        "K": f.len(),
        "redundancy": f.redundancy(),
        "A": bounds.lower,
        "B": bounds.upper,
        "window": g,
        "dual_window": gd,
        "primal_fit": fit_json(&primal),
        "dual_fit": fit_json(&dual),
    }))
}

/// Per-level errors, residuals and inverse norms of the projection method
/// for `I - theta T` on the standard basis of `C^n`.
pub fn finite_section_report(n: usize, theta: f64, exponent: f64, method: &str, selection: &str, seed: u64) -> Result<Value> {
    check_dim(n)?;
    let op = TestOperator::IdentityMinusKernel { theta, exponent }.build(n)?;
    let frame = FrameSpec::Onb { n }.build()?;
    let y = random_cvec(n, &mut seeded(seed));
    let spec = ScheduleSpec {
        selection: selection.parse::<Selection>()?,
        ..ScheduleSpec::default()
    };
    let schedule = ProjectionSchedule::build(&frame, &spec, Some(&y))?;
    let opts = SolveOptions {
        method: method.parse::<Method>()?,
        ..SolveOptions::default()
    };
    let (_, rep) = finite_section_run(&op, &y, &schedule, &opts)?;
    let levels: Vec<Value> = rep
        .levels
        .iter()
        .map(|l| {
            json!({
                "dim": l.dim,
                "residual": l.relative_residual,
                "error": l.error,
                "inverse_norm": l.inverse_norm,
                "iterations": l.iterations,
                "singular": l.singular,
                "failed": l.failed(),
            })
        })
        .collect();
    Ok(json!({
        "levels": levels,
        "identity_gap": rep.identity_gap,
        "inverse_norm_sup": rep.inverse_norm_sup,
        "monitor_slope": rep.monitor_slope,
        "converged": rep.converged,
        "warnings": rep.warnings,
    }))
}

/// Certified and probed norms of a random matrix with `(1+|k-l|)^{-s}` decay,
/// weighted by `(1+|k|)^t` on both sides.
pub fn schur_report(n: usize, s: f64, t: f64, seed: u64) -> Result<Value> {
    check_dim(n)?;
    let r = random_cmat(n, n, &mut seeded(seed));
    let m = CMat::from_fn(n, n, |k, l| r[(k, l)] * (1.0 + k.abs_diff(l) as f64).powf(-s));
    let w = Weight::on(&WeightFamily::Polynomial { t }, &IndexSet::centered_line(n))?;
    let cases = [BoundCase::InfInf, BoundCase::OneInf, BoundCase::OneP { p: Exponent::Two }, BoundCase::TwoTwo, BoundCase::InfOne];
    let mut rows = Vec::new();
    for case in cases {
        let c = schur_certificate(&m, &w, &w, case)?;
        rows.push(json!({
            "case": case.name(),
            "certified": c.certified_bound,
            "measured": c.measure(&m, 32, seed)?,
            "surrogate": c.surrogate,
        }));
    }
    let wv = w.values();
    let weighted = CMat::from_fn(n, n, |k, l| m[(k, l)] * (wv[k] / wv[l]));
    let abs: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|l| m[(k, l)].norm()).collect()).collect();
    Ok(json!({
        "cases": rows,
        "svd_norm": singular_values(&weighted).first().cloned().unwrap_or(0.0),
        "abs": abs,
    }))
}

#[wasm_bindgen]
pub fn gabor_explorer(n: usize, a: usize, b: usize, window: &str, decay: f64) -> String {
    respond(gabor_report(n, a, b, window, decay))
}

#[wasm_bindgen]
pub fn finite_section_curve(n: usize, theta: f64, exponent: f64, method: &str, selection: &str, seed: u32) -> String {
    respond(finite_section_report(n, theta, exponent, method, selection, seed as u64))
}

#[wasm_bindgen]
pub fn schur_explorer(n: usize, s: f64, t: f64, seed: u32) -> String {
    respond(schur_report(n, s, t, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn gabor_export() {
        let v = parse(gabor_explorer(32, 4, 4, "gaussian", 0.0));
        assert_eq!(v["K"], 64);
        let lib = FrameSpec::gabor(32, 4, 4, WindowSpec::Gaussian).build().unwrap().frame_bounds().unwrap();
        assert_eq!(v["A"].as_f64().unwrap(), lib.lower);
        assert_eq!(v["window"].as_array().unwrap().len(), 32);
        assert!(v["primal_fit"]["exponent"].as_f64().unwrap() > 3.0);
    }

    #[test]
    fn errors_are_json() {
        let v = parse(gabor_explorer(16, 8, 4, "gaussian", 0.0));
        assert_eq!(v["code"], "not_a_frame");
        assert_eq!(parse(gabor_explorer(16, 4, 4, "boxcar", 0.0))["code"], "invalid_parameter");
        assert_eq!(parse(schur_explorer(MAX_DIM + 1, 2.0, 0.0, 1))["code"], "invalid_parameter");
        assert_eq!(parse(finite_section_curve(32, 0.5, 3.0, "gmres", "centered", 0))["code"], "invalid_parameter");
    }

    #[test]
    fn finite_section_export() {
        let v = parse(finite_section_curve(64, 0.5, 3.0, "cg", "centered", 0));
        assert_eq!(v["converged"], true);
        let levels = v["levels"].as_array().unwrap();
        assert_eq!(levels.last().unwrap()["dim"], 64);
        assert!(v["inverse_norm_sup"].as_f64().unwrap() <= 2.0 + 1e-12);
        let bad = parse(finite_section_curve(32, 1.2, 3.0, "cg", "centered", 0));
        assert_eq!(bad["converged"], false);
    }

    #[test]
    fn schur_export() {
        let v = parse(schur_explorer(16, 2.0, 0.5, 3));
        for row in v["cases"].as_array().unwrap() {
            assert!(row["measured"].as_f64().unwrap() <= row["certified"].as_f64().unwrap() * (1.0 + 1e-8));
        }
        let two = v["cases"].as_array().unwrap().iter().find(|r| r["case"] == "two_two").unwrap();
        assert!(v["svd_norm"].as_f64().unwrap() <= two["certified"].as_f64().unwrap() * (1.0 + 1e-12));
        assert_eq!(v["abs"].as_array().unwrap().len(), 16);
    }
}
