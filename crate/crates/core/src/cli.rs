//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::codec::{self, fmt17};
use crate::error::Error;
use crate::fenchel::{self, DualityOptions};
use crate::linalg::{Matrix, Vector};
use crate::problem::ProblemSpec;
use crate::solution_sets::{self, SetDesc};
use crate::splitting::{self, FactorKind, FactorRequest, IterOptions, RunSummary, DEFAULT_ITER_TOL, DEFAULT_MAX_ITER};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_PSD: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "pdsplit", version, about = "Primal-dual splitting solver and verification suite")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_ITER_TOL)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args, Clone)]
pub struct SpecArgs {
    /// JSON problem specification.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FactorChoice {
    Principal,
    Cholesky,
    ScaledIsometry,
    DouglasRachford,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run Chambolle-Pock on a problem spec.
    Solve {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run the bundled verification battery.
    Verify {
        /// Run a single check.
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the preconditioner factor of a spec.
    Factor {
        #[command(flatten)]
        spec: SpecArgs,
        /// Factor kind; the general factor uses the principal square root.
        #[arg(long, value_enum, default_value_t = FactorChoice::Principal)]
        kind: FactorChoice,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a LASSO problem given as CSV files and recover its solution set.
    Lasso {
        #[arg(long = "L-file")]
        l_file: PathBuf,
        #[arg(long = "b-file")]
        b_file: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solution sets of a two-set feasibility problem.
    Feasibility {
        /// JSON with fields "U", "V" (set descriptions) and "L".
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn malformed(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display()))
}

fn io_fail(e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_FAIL, e.to_string())
}

fn lib_fail(e: Error) -> Failure {
    let code = match e {
        Error::NotPsd { .. } | Error::NotSymmetric { .. } => EXIT_PSD,
        Error::StepSize { .. } | Error::DimensionMismatch { .. } | Error::InvalidParameter(_) => EXIT_MALFORMED,
        _ => EXIT_FAIL,
    };
    Failure::new(code, e.to_string())
}

fn check_tol(c: &Common) -> std::result::Result<(), Failure> {
    if !(c.tol > 0.0) {
        return Err(Failure::new(EXIT_MALFORMED, format!("--tol must be positive, got {}", c.tol)));
    }
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| malformed(path, e))?;
    // serde_json reports line and column of the offending field
    serde_json::from_str(&text).map_err(|e| malformed(path, e))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> std::result::Result<(), Failure> {
    fs::create_dir_all(dir).map_err(io_fail)?;
    let mut text = serde_json::to_string_pretty(value).map_err(io_fail)?;
    text.push('\n');
    fs::write(dir.join(name), text).map_err(io_fail)
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    #[serde(flatten)]
    run: RunSummary,
    sigma: f64,
    tau: f64,
    duality_gap: Option<f64>,
}

fn iter_options(c: &Common) -> IterOptions {
    IterOptions {
        max_iter: c.max_iter,
        tol: c.tol,
        keep_iterates: true,
    }
}

fn cmd_solve(spec: &SpecArgs, common: &Common) -> CmdResult {
    check_tol(common)?;
    let problem: ProblemSpec = read_json(&spec.spec)?;
    let t = problem.to_triple(spec.sigma, spec.tau).map_err(|e| malformed(&spec.spec, e))?;
    let (x0, y0) = problem.start(&t).map_err(|e| malformed(&spec.spec, e))?;
    let trace = splitting::solve(&t, &x0, &y0, &iter_options(common)).map_err(lib_fail)?;
    let run = RunSummary::from_trace(&t, &trace).map_err(lib_fail)?;
    let duality_gap = fenchel::duality_gap(&t, &run.x, &run.y);
    fs::create_dir_all(&common.out).map_err(io_fail)?;
    trace.write_csv(&common.out.join("trace.csv"), true).map_err(io_fail)?;
    let converged = run.converged;
    write_json(
        &common.out,
        "summary.json",
        &SolveSummary {
            run,
            sigma: t.sigma,
            tau: t.tau,
            duality_gap,
        },
    )?;
    log::info!("solve: {} iterations, converged = {converged}", trace.iterations);
    Ok(if converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

fn cmd_verify(only: Option<&str>, common: &Common) -> CmdResult {
    let reports = match only {
        Some(name) => match verify::run_check(name, common.seed) {
            Some(r) => vec![r],
            None => {
                let names: Vec<&str> = verify::CHECKS.iter().map(|c| c.0).collect();
                return Err(Failure::new(EXIT_MALFORMED, format!("unknown check {name:?}; available: {}", names.join(", "))));
            }
        },
        None => verify::run_all(common.seed),
    };
    let passed = reports.iter().all(|r| r.passed);
    let doc = json!({ "seed": common.seed, "passed": passed, "checks": reports });
    write_json(&common.out, "verify.json", &doc)?;
    for r in &reports {
        println!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.name);
        if !r.passed {
            println!("  {}", r.detail);
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_factor(spec: &SpecArgs, kind: FactorChoice, common: &Common) -> CmdResult {
    let problem: ProblemSpec = read_json(&spec.spec)?;
    let t = problem.to_triple(spec.sigma, spec.tau).map_err(|e| match e {
        Error::StepSize { .. } => Failure::new(EXIT_PSD, format!("preconditioner is not PSD: {e}")),
        other => malformed(&spec.spec, other),
    })?;
    let request = match kind {
        FactorChoice::Principal => FactorRequest::Principal,
        FactorChoice::Cholesky => FactorRequest::Cholesky,
        FactorChoice::ScaledIsometry => FactorRequest::ScaledIsometry,
        FactorChoice::DouglasRachford => FactorRequest::DouglasRachford,
    };
    let f = splitting::build_factor(&t, request).map_err(lib_fail)?;
    let cert = f.certificate(&t);
    fs::create_dir_all(&common.out).map_err(io_fail)?;
    codec::write_matrix_csv(&common.out.join("C.csv"), &f.c).map_err(io_fail)?;
    let has_r = if let FactorKind::General { r } = &f.kind {
        codec::write_matrix_csv(&common.out.join("R.csv"), r).map_err(io_fail)?;
        true
    } else {
        false
    };
    write_json(
        &common.out,
        "factor.json",
        &json!({
            "kind": format!("{kind:?}"),
            "z_dim": f.z_dim(),
            "has_r_block": has_r,
            "certificate": cert,
            "certificate_formatted": fmt17(cert),
        }),
    )?;
    Ok(EXIT_OK)
}

fn read_vector_csv(path: &Path) -> std::result::Result<Vector, Failure> {
    let rows = codec::read_csv_rows(path).map_err(|e| malformed(path, e))?;
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let column = rows.iter().all(|r| r.len() == 1);
    if flat.is_empty() || !(column || rows.len() == 1) {
        return Err(malformed(path, "expected a single row or a single column"));
    }
    Ok(Vector::from_vec(flat))
}

fn read_matrix_csv(path: &Path) -> std::result::Result<Matrix, Failure> {
    let rows = codec::read_csv_rows(path).map_err(|e| malformed(path, e))?;
    codec::from_rows(&rows).map_err(|e| malformed(path, e))
}

fn cmd_lasso(l_file: &Path, b_file: &Path, lambda: f64, common: &Common) -> CmdResult {
    check_tol(common)?;
    let l = read_matrix_csv(l_file)?;
    let b = read_vector_csv(b_file)?;
    let inst = fenchel::lasso_instance(&l, &b, lambda).map_err(|e| Failure::new(EXIT_MALFORMED, e.to_string()))?;
    let opts = DualityOptions {
        iter: iter_options(common),
        tol: 1e-7,
        seed: common.seed,
        ..DualityOptions::default()
    };
    let trace = splitting::solve(&inst.triple, &Vector::zeros(l.ncols()), &Vector::zeros(l.nrows()), &opts.iter)
        .map_err(lib_fail)?;
    let verdict = fenchel::total_duality_check(&inst.f, &inst.g, &l, inst.triple.sigma, inst.triple.tau, &opts)
        .map_err(lib_fail)?;
    let (_, k) = trace.split_last();
    let z = fenchel::lasso_solution_set(&l, &b, lambda, &k).map_err(|e| e.to_string());
    fs::create_dir_all(&common.out).map_err(io_fail)?;
    trace.write_csv(&common.out.join("trace.csv"), true).map_err(io_fail)?;
    let (z_json, z_err) = match &z {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.clone())),
    };
    write_json(
        &common.out,
        "summary.json",
        &json!({
            "lambda": lambda,
            "duality": verdict,
            "solution_set": z_json,
            "solution_set_error": z_err,
        }),
    )?;
    Ok(if trace.converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeasibilitySpec {
    #[serde(rename = "U")]
    u: SetDesc,
    #[serde(rename = "V")]
    v: SetDesc,
    #[serde(rename = "L", with = "codec::matrix")]
    l: Matrix,
}

fn cmd_feasibility(spec: &Path, common: &Common) -> CmdResult {
    let fs_spec: FeasibilitySpec = read_json(spec)?;
    let doc = match solution_sets::feasibility_sets(&fs_spec.u, &fs_spec.v, &fs_spec.l) {
        Ok(sets) => json!({ "feasible": true, "Z": sets.z, "K": sets.k }),
        Err(Error::Infeasible { certificate }) => json!({
            "feasible": false,
            "certificate": certificate.map(|c| c.iter().copied().collect::<Vec<f64>>()),
        }),
        Err(e @ (Error::DimensionMismatch { .. } | Error::InvalidParameter(_))) => return Err(malformed(spec, e)),
        Err(e) => return Err(lib_fail(e)),
    };
    write_json(&common.out, "feasibility.json", &doc)?;
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve { spec, common } => cmd_solve(spec, common),
        Command::Verify { only, common } => cmd_verify(only.as_deref(), common),
        Command::Factor { spec, kind, common } => cmd_factor(spec, *kind, common),
        Command::Lasso {
            l_file,
            b_file,
            lambda,
            common,
        } => cmd_lasso(l_file, b_file, *lambda, common),
        Command::Feasibility { spec, common } => cmd_feasibility(spec, common),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Logging controlled by `PDSPLIT_LOG`.
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("PDSPLIT_LOG", "error");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}
