use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::{PairKind, RunConfig};
use super::{EXIT_DIVERGED, EXIT_OK};
use crate::container;
use crate::error::{Error, Result};
use crate::frames::{gram, Frame, FrameSpec};
use crate::galerkin::{
    bounded_equiv_check, compose_rule_check, galerkin_matrix, galerkin_pseudoinverse, kappa_factorization_probe,
    roundtrip_check, schur_certificate, BoundCertificate, LinearOperator, SpacePair,
};
use crate::linalg::{Exponent, SpaceFamily, Weight};
use crate::localization::{dual_localization_check, equivalence_constants, localization_report};
use crate::solver::{finite_section_run, frame_galerkin_solve, ProjectionSchedule, TestOperator};
use crate::CMat;

/// Files written by one command, reported on stdout.
struct Out {
    dir: PathBuf,
    files: Vec<String>,
}

impl Out {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.text(name, &text)
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        fs::write(self.dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn container(&mut self, base: &str) {
        self.files.push(format!("{base}.bin"));
        self.files.push(format!("{base}.json"));
    }

    fn base(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn finish(self, command: &str, extra: serde_json::Value) {
        println!("{}", json!({ "command": command, "outputs": self.files, "result": extra }));
    }
}

pub(super) fn report_error(dir: &Path, e: &Error, code: i32) -> i32 {
    let body = json!({ "code": e.code(), "message": e.to_string(), "exit": code });
    if fs::create_dir_all(dir).is_ok() {
        let _ = fs::write(dir.join("error.json"), format!("{}\n", serde_json::to_string_pretty(&body).unwrap_or_default()));
    }
    eprintln!("{body}");
    code
}

fn load_frame(cfg: &RunConfig, default: FrameSpec) -> Result<Frame> {
    match (&cfg.frame_file, &cfg.frame) {
        (Some(path), _) => container::load_frame(path),
        (None, Some(spec)) => spec.build(),
        (None, None) => default.build(),
    }
}

fn operator(cfg: &RunConfig, default: TestOperator, n: usize) -> Result<(TestOperator, LinearOperator)> {
    let spec = cfg.operator.clone().unwrap_or(default);
    let op = spec.build(n)?;
    Ok((spec, op))
}

pub(super) fn frame_build(cfg: &RunConfig) -> Result<i32> {
    let frame = load_frame(cfg, FrameSpec::Onb { n: 8 })?;
    let bounds = frame.frame_bounds()?;
    let mut out = Out::new(&cfg.out_dir)?;
    container::save_frame(&out.base("frame"), &frame)?;
    out.container("frame");
    let summary = json!({
        "id": frame.id(),
        "n": frame.dim(),
        "K": frame.len(),
        "A": bounds.lower,
        "B": bounds.upper,
        "tight": bounds.is_tight(),
        "redundancy": frame.redundancy(),
    });
    out.json("frame_summary.json", &summary)?;
    out.finish("frame build", summary);
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EquivalenceRow {
    space: SpaceFamily,
    lower: f64,
    upper: f64,
    exact: bool,
}

pub(super) fn frame_diag(cfg: &RunConfig) -> Result<i32> {
    let frame = load_frame(cfg, FrameSpec::Onb { n: 8 })?;
    let mut out = Out::new(&cfg.out_dir)?;
    let primal = localization_report(&frame, &frame, &cfg.algebra)?;
    let dual = dual_localization_check(&frame, &cfg.algebra)?;
    let mut grid = Vec::new();
    for space in cfg.space_grid() {
        let c = equivalence_constants(&frame, &space.on(frame.index_set())?)?;
        grid.push(EquivalenceRow {
            space,
            lower: c.lower,
            upper: c.upper,
            exact: c.exact,
        });
    }
    out.json("localization.json", &primal)?;
    out.json("dual_localization.json", &dual)?;
    out.json("equivalence.json", &grid)?;
    out.text("shells.csv", &primal.shells_csv())?;
    let member = primal.member;
    out.finish("frame diag", json!({ "id": frame.id(), "member": member, "fitted_exponent": primal.fitted_exponent() }));
    Ok(EXIT_OK)
}

fn galerkin_pair(cfg: &RunConfig) -> Result<(Frame, Frame)> {
    let phi = load_frame(cfg, FrameSpec::Onb { n: 8 })?;
    let right = match cfg.pair {
        PairKind::Primal => phi.clone(),
        PairKind::Dual => phi.canonical_dual()?,
    };
    Ok((phi, right))
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(super) fn galerkin_assemble(cfg: &RunConfig) -> Result<i32> {
    let (phi, right) = galerkin_pair(cfg)?;
    let (spec, o) = operator(cfg, TestOperator::Identity, phi.dim())?;
    let m = galerkin_matrix(&o, &phi, &right)?;
    let mut out = Out::new(&cfg.out_dir)?;
    container::save_matrix(&out.base("galerkin"), &m)?;
    out.container("galerkin");
    let roundtrip = roundtrip_check(&o, &phi, &right)?;
    let composition = compose_rule_check(&o, &o, &phi, &right, &phi)?;
    let identity = spec == TestOperator::Identity;
    let gram_residual = if identity { Some(max_abs(&(&m.entries - gram(&phi, &right)?))) } else { None };
    let idempotency = (identity && cfg.pair == PairKind::Dual).then(|| max_abs(&(&m.entries * &m.entries - &m.entries)));
    let report = json!({
        "left": m.left_frame,
        "right": m.right_frame,
        "rows": m.entries.nrows(),
        "cols": m.entries.ncols(),
        "operator": spec,
        "operator_warning": spec.warning(),
        "roundtrip": roundtrip,
        "composition_residual": composition,
        "gram_residual": gram_residual,
        "idempotency_residual": idempotency,
    });
    out.json("galerkin_assemble.json", &report)?;
    out.finish("galerkin assemble", json!({ "roundtrip": roundtrip.max(), "composition": composition }));
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CertifiedRow {
    certificate: BoundCertificate,
    measured: f64,
    holds: bool,
}

fn first_space(cfg: &RunConfig) -> SpaceFamily {
    cfg.spaces.first().cloned().unwrap_or_else(|| SpaceFamily::unweighted(Exponent::Two))
}

pub(super) fn galerkin_certify(cfg: &RunConfig) -> Result<i32> {
    let (phi, right) = galerkin_pair(cfg)?;
    let (spec, o) = operator(cfg, TestOperator::Identity, phi.dim())?;
    let m = galerkin_matrix(&o, &phi, &right)?.entries;
    let family = first_space(cfg).weight;
    let w1 = Weight::on(&family, right.index_set())?;
    let w2 = Weight::on(&family, phi.index_set())?;
    let mut rows = Vec::new();
    for case in cfg.case_list() {
        let certificate = schur_certificate(&m, &w1, &w2, case)?;
        let measured = certificate.measure(&m, cfg.probes, cfg.seed)?;
        let holds = measured <= certificate.certified_bound * (1.0 + 1e-8);
        rows.push(CertifiedRow {
            certificate,
            measured,
            holds,
        });
    }
    let mut out = Out::new(&cfg.out_dir)?;
    out.json("certificates.json", &json!({ "operator": spec, "left": phi.id(), "right": right.id(), "certificates": rows }))?;
    let all = rows.iter().all(|r| r.holds);
    out.finish("galerkin certify", json!({ "cases": rows.len(), "all_hold": all }));
    Ok(EXIT_OK)
}

pub(super) fn galerkin_probe(cfg: &RunConfig) -> Result<i32> {
    let (phi, right) = galerkin_pair(cfg)?;
    let (spec, o) = operator(cfg, TestOperator::Identity, phi.dim())?;
    let pinv = if cfg.pseudo_inverse {
        let r = galerkin_pseudoinverse(&o, &phi, &right)?;
        Some(json!({
            "projection_residual": r.projection_residual,
            "svd_agreement": r.svd_agreement,
            "operator_condition": r.operator_condition,
        }))
    } else {
        None
    };
    let kappa = kappa_factorization_probe(&o, &phi, &right)?;
    let equiv = bounded_equiv_check(&o, &phi, &right, &SpacePair::same(first_space(cfg)), cfg.probes, cfg.seed)?;
    let mut out = Out::new(&cfg.out_dir)?;
    out.json(
        "probe.json",
        &json!({
            "operator": spec,
            "left": phi.id(),
            "right": right.id(),
            "kappa": kappa,
            "bounded_equivalence": equiv,
            "pseudo_inverse": pinv,
        }),
    )?;
    out.finish("galerkin probe", json!({ "kappa_ratio": kappa.ratio, "consistent": equiv.consistent }));
    Ok(EXIT_OK)
}

pub(super) fn solve(cfg: &RunConfig, galerkin: bool) -> Result<i32> {
    let frame = load_frame(cfg, FrameSpec::Onb { n: 64 })?;
    let n = frame.dim();
    let (spec, o) = operator(cfg, TestOperator::IdentityMinusKernel { theta: 0.5, exponent: 3.0 }, n)?;
    let y = cfg.rhs.build(n, cfg.seed)?;
    let mut out = Out::new(&cfg.out_dir)?;
    let (x, report, consistency) = if galerkin {
        let sol = frame_galerkin_solve(&o, &y, &frame, &cfg.solve)?;
        (sol.f, sol.report, Some(sol.consistency))
    } else {
        let schedule = ProjectionSchedule::build(&frame, &cfg.schedule, Some(&y))?;
        let (x, report) = finite_section_run(&o, &y, &schedule, &cfg.solve)?;
        (x, report, None)
    };
    container::save_vector(&out.base("solution"), &x, "solution")?;
    out.container("solution");
    out.json(
        "solve_report.json",
        &json!({
            "operator": spec,
            "operator_warning": spec.warning(),
            "report": report,
            "residual_consistency": consistency,
        }),
    )?;
    out.text("levels.csv", &report.to_csv()?)?;
    let command = if galerkin { "solve fg" } else { "solve fs" };
    out.finish(
        command,
        json!({ "converged": report.converged, "final_relative_residual": report.final_relative_residual }),
    );
    Ok(if report.converged { EXIT_OK } else { EXIT_DIVERGED })
}
