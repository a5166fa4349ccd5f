//! `locframe` command-line driver.
//!
//! Every run is described by a [`RunConfig`]; flags override fields read
//! from `--config`. Exit codes: 0 success, 2 input or contract error,
//! 3 numerical divergence. Errors are also written to `<out>/error.json`.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_algebra, parse_frame, parse_operator, parse_space, PairKind, RhsSpec, RunConfig};

use crate::error::{Error, Result};
use crate::solver::{Method, Selection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "locframe", version, about = "Localized frames, Galerkin matrices and finite-section solvers")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Frame construction and diagnostics.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Galerkin matrices of operators.
    #[command(subcommand)]
    Galerkin(GalerkinCmd),
    /// Operator equations.
    #[command(subcommand)]
    Solve(SolveCmd),
}

#[derive(Debug, Subcommand)]
enum FrameCmd {
    /// Build a frame, write its container and a bounds summary.
    Build(FrameArgs),
    /// Localization, dual localization and norm-equivalence reports.
    Diag(FrameArgs),
}

#[derive(Debug, Subcommand)]
enum GalerkinCmd {
    /// Assemble the matrix and check the representation identities.
    Assemble(GalerkinArgs),
    /// Schur-type boundedness certificates with probed norms.
    Certify(GalerkinArgs),
    /// Condition-number factorization, bounded-equivalence and pseudo-inverse.
    Probe(GalerkinArgs),
}

#[derive(Debug, Subcommand)]
enum SolveCmd {
    /// Finite-section (projection) method.
    Fs(SolveArgs),
    /// Frame-Galerkin coefficient system.
    Fg(SolveArgs),
}

#[derive(Debug, Args)]
struct FrameArgs {
    /// `kind(key=value,...)` or JSON, e.g. `gabor(n=16,a=4,b=4)`.
    #[arg(long)]
    frame: Option<String>,
    /// Base path of a frame container (without extension).
    #[arg(long)]
    frame_file: Option<PathBuf>,
    /// `jaffard:<s>` or `schur:<s>`.
    #[arg(long)]
    algebra: Option<String>,
    /// `p:t`, repeatable.
    #[arg(long = "space")]
    spaces: Vec<String>,
}

#[derive(Debug, Args)]
struct GalerkinArgs {
    #[command(flatten)]
    frame: FrameArgs,
    /// `kind(key=value,...)`, e.g. `identity_minus_kernel(theta=0.5,exponent=3)`.
    #[arg(long)]
    operator: Option<String>,
    #[arg(long, value_parser = ["primal", "dual"])]
    pair: Option<String>,
    /// Bound case, repeatable: inf_inf, one_inf, one_p[:p], two_two, inf_one, inf_zero.
    #[arg(long = "case")]
    cases: Vec<String>,
    /// Also compute the Galerkin pseudo-inverse.
    #[arg(long)]
    pinv: bool,
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    frame: FrameArgs,
    #[arg(long)]
    operator: Option<String>,
    #[arg(long, value_parser = ["cg", "richardson", "direct"])]
    method: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_parser = ["centered", "greedy"])]
    schedule: Option<String>,
    /// Keep only the last `levels` schedule sizes.
    #[arg(long)]
    levels: Option<usize>,
    /// `random`, `ones`, or JSON.
    #[arg(long)]
    rhs: Option<String>,
}

fn apply_frame_args(cfg: &mut RunConfig, a: &FrameArgs) -> Result<()> {
    if let Some(f) = &a.frame {
        cfg.frame = Some(parse_frame(f)?);
        cfg.frame_file = None;
    }
    if let Some(f) = &a.frame_file {
        cfg.frame_file = Some(f.clone());
    }
    if let Some(s) = &a.algebra {
        cfg.algebra = parse_algebra(s)?;
    }
    if !a.spaces.is_empty() {
        cfg.spaces = a.spaces.iter().map(|s| parse_space(s)).collect::<Result<_>>()?;
    }
    Ok(())
}

fn apply_galerkin_args(cfg: &mut RunConfig, a: &GalerkinArgs) -> Result<()> {
    apply_frame_args(cfg, &a.frame)?;
    if let Some(o) = &a.operator {
        cfg.operator = Some(parse_operator(o)?);
    }
    if let Some(p) = &a.pair {
        cfg.pair = if p == "dual" { PairKind::Dual } else { PairKind::Primal };
    }
    if !a.cases.is_empty() {
        cfg.cases = a.cases.iter().map(|c| c.parse()).collect::<Result<_>>()?;
    }
    cfg.pseudo_inverse |= a.pinv;
    if let Some(p) = a.probes {
        cfg.probes = p;
    }
    Ok(())
}

fn apply_solve_args(cfg: &mut RunConfig, a: &SolveArgs) -> Result<()> {
    apply_frame_args(cfg, &a.frame)?;
    if let Some(o) = &a.operator {
        cfg.operator = Some(parse_operator(o)?);
    }
    if let Some(m) = &a.method {
        cfg.solve.method = m.parse::<Method>()?;
    }
    if let Some(t) = a.tol {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {t}")));
        }
        cfg.solve.tol = t;
    }
    if let Some(s) = &a.schedule {
        cfg.schedule.selection = s.parse::<Selection>()?;
    }
    if let Some(l) = a.levels {
        cfg.schedule.levels = Some(l);
    }
    if let Some(r) = &a.rhs {
        cfg.rhs = serde_json::from_value(config::parse_tagged(r, "kind")?)
            .map_err(|e| Error::InvalidParameter(format!("rhs '{r}': {e}")))?;
    }
    Ok(())
}

fn configure(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    let name = match &cli.command {
        Command::Frame(FrameCmd::Build(a)) => {
            apply_frame_args(&mut cfg, a)?;
            "frame build"
        }
        Command::Frame(FrameCmd::Diag(a)) => {
            apply_frame_args(&mut cfg, a)?;
            "frame diag"
        }
        Command::Galerkin(g) => {
            let (name, a) = match g {
                GalerkinCmd::Assemble(a) => ("galerkin assemble", a),
                GalerkinCmd::Certify(a) => ("galerkin certify", a),
                GalerkinCmd::Probe(a) => ("galerkin probe", a),
            };
            apply_galerkin_args(&mut cfg, a)?;
            name
        }
        Command::Solve(s) => {
            let (name, a) = match s {
                SolveCmd::Fs(a) => ("solve fs", a),
                SolveCmd::Fg(a) => ("solve fg", a),
            };
            apply_solve_args(&mut cfg, a)?;
            name
        }
    };
    cfg.command = Some(name.to_string());
    Ok(cfg)
}

#[cfg(feature = "parallel")]
fn set_threads(n: Option<usize>) {
    if let Some(n) = n {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_: Option<usize>) {}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Diverged(_) => EXIT_DIVERGED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let out_dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let cfg = match configure(&cli) {
        Ok(c) => c,
        Err(e) => return commands::report_error(&out_dir, &e, EXIT_INPUT),
    };
    set_threads(cfg.threads);
    let result = match cfg.command.as_deref() {
        Some("frame build") => commands::frame_build(&cfg),
        Some("frame diag") => commands::frame_diag(&cfg),
        Some("galerkin assemble") => commands::galerkin_assemble(&cfg),
        Some("galerkin certify") => commands::galerkin_certify(&cfg),
        Some("galerkin probe") => commands::galerkin_probe(&cfg),
        Some("solve fs") => commands::solve(&cfg, false),
        Some("solve fg") => commands::solve(&cfg, true),
        _ => unreachable!("configure names every command"),
    };
    match result {
        Ok(code) => code,
        Err(e) => commands::report_error(&cfg.out_dir, &e, exit_code(&e)),
    }
}
