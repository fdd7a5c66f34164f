//! `hameig` command line: `check`, `solve`, `scan` and `list-catalog`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 a hypothesis fails, 3 no convergence or
//! no certified eigenpair, 4 usage error.

pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::catalog::{self, DEFAULT_TERMS};
use crate::error::{Error, Result};
use crate::problem::config::ProblemConfig;
use crate::problem::expr::Expr;
use crate::problem::{run_hypothesis_checks, BoundData, CheckStatus, HypothesisReport, ProblemSpec, SamplingPlan};
use crate::quadrature::{GridFunction, QuadConfig};
use crate::solver::{
    boundary_scan, cone_verify, default_lambda_grid, estimate_lipschitz, fixed_point_solve, vertex_on, ScanOptions,
    ScanResult, SolverOptions,
};
use output::{out_path, svg_norm_curve, svg_solution, write_json, write_solution_csv, Emit};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hameig", version, about = "Eigenpairs of delay boundary value problems with discontinuous nonlinearities")]
struct Cli {
    /// Worker threads for the λ scan (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Catalog name or path to a TOML problem file.
    #[arg(long, default_value = "example-delay-phi")]
    problem: String,
    /// Truncation depth of φ for catalog problems.
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    depth: usize,
    /// Majorant M_ρ(t) as an expression in t (may use rho).
    #[arg(long)]
    majorant: Option<String>,
    /// Minorant δ_ρ(t) as an expression in t (may use rho).
    #[arg(long)]
    minorant: Option<String>,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output directory; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma separated subset of csv,json,svg.
    #[arg(long, default_value = "csv,json,svg")]
    emit: String,
}

#[derive(Args, Debug)]
struct NumArgs {
    /// Grid nodes on [0, 1].
    #[arg(long, default_value_t = 257)]
    grid_n: usize,
    /// Fixed-point residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the hypotheses and report δ̄ and λ̄.
    Check {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// λ̄ (default 1.125 ρ/δ̄).
        #[arg(long)]
        lambda_bar: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve u = y + λTu at a single λ.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[command(flatten)]
        num: NumArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Scan n(λ) and locate λ* with ‖u* − y‖ = ρ for each ρ.
    Scan {
        #[command(flatten)]
        problem: ProblemArgs,
        /// One radius or a comma separated list.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        rho: Vec<f64>,
        /// Upper end of the λ grid (default λ̄).
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 64)]
        lambda_points: usize,
        /// Accepted |n(λ*) − ρ|.
        #[arg(long, default_value_t = 1e-9)]
        scan_tol: f64,
        /// Scan even when a hypothesis check fails.
        #[arg(long)]
        no_check: bool,
        #[command(flatten)]
        num: NumArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// List the built-in problems.
    ListCatalog {
        #[arg(long)]
        json: bool,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
        Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
        Error::Domain { .. }
        | Error::InvalidArgument(_)
        | Error::Parse { .. }
        | Error::Config(_)
        | Error::UnknownProblem(_) => EXIT_USAGE,
        Error::Integration { .. } => EXIT_NONCONVERGENCE,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_IO,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Check {
            problem,
            rho,
            lambda_bar,
            out,
        } => cmd_check(&problem, rho, lambda_bar, &out),
        Command::Solve {
            problem,
            lambda,
            rho,
            num,
            out,
        } => cmd_solve(&problem, lambda, rho, &num, &out),
        Command::Scan {
            problem,
            rho,
            lambda_max,
            lambda_points,
            scan_tol,
            no_check,
            num,
            out,
        } => cmd_scan(&problem, &rho, lambda_max, lambda_points, scan_tol, no_check, &num, &out),
        Command::ListCatalog { json } => {
            let entries = catalog::entries();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries)?);
            } else {
                for e in entries {
                    println!("{:<18} {}", e.name, e.summary);
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn emit_of(out: &OutArgs) -> Result<Emit> {
    Emit::parse(&out.emit).map_err(Error::InvalidArgument)
}

fn bound_fn(src: &str, rho: f64) -> Result<crate::kernel::ScalarFn> {
    Ok(Expr::parse(src, &["t"], &[("rho", rho)])?.into_scalar())
}

/// Catalog entry or TOML file, with `--majorant`/`--minorant` applied.
fn resolve(args: &ProblemArgs, rho: f64) -> Result<(ProblemSpec, Option<BoundData>)> {
    let (spec, mut bounds) = if catalog::NAMES.contains(&args.problem.as_str()) {
        let (s, b) = catalog::lookup(&args.problem, rho, args.depth)?;
        (s, Some(b))
    } else if Path::new(&args.problem).is_file() {
        ProblemConfig::load(Path::new(&args.problem))?.build(rho)?
    } else {
        return Err(Error::UnknownProblem(args.problem.clone()));
    };
    if args.majorant.is_some() || args.minorant.is_some() {
        let (m, d, ml, dl) = match (&args.majorant, &args.minorant, &bounds) {
            (Some(m), Some(d), _) => (bound_fn(m, rho)?, bound_fn(d, rho)?, format!("M_ρ(t)={m}"), format!("δ_ρ(t)={d}")),
            (Some(m), None, Some(b)) => (bound_fn(m, rho)?, b.minorant.clone(), format!("M_ρ(t)={m}"), b.minorant_label.clone()),
            (None, Some(d), Some(b)) => (b.majorant.clone(), bound_fn(d, rho)?, b.majorant_label.clone(), format!("δ_ρ(t)={d}")),
            _ => return Err(Error::InvalidArgument("both --majorant and --minorant are needed for this problem".into())),
        };
        bounds = Some(BoundData::new(rho, m, d)?.with_labels(ml, dl));
    }
    Ok((spec, bounds))
}

fn require_bounds(bounds: Option<BoundData>) -> Result<BoundData> {
    bounds.ok_or_else(|| Error::InvalidArgument("the problem has no majorant/minorant; pass --majorant and --minorant".into()))
}

fn check_report(spec: &ProblemSpec, bounds: &BoundData, lambda_bar: Option<f64>) -> Result<HypothesisReport> {
    let plan = SamplingPlan::for_problem(spec, bounds.rho)?;
    run_hypothesis_checks(spec, bounds, &QuadConfig::default(), &plan, lambda_bar)
}

fn tag(status: CheckStatus) -> &'static str {
    match status {
        CheckStatus::Pass => "PASS",
        CheckStatus::Fail => "FAIL",
        CheckStatus::NotCheckable => "N/A ",
        CheckStatus::Assumed => "ASSM",
    }
}

fn print_report(r: &HypothesisReport) {
    println!("problem {}  ρ = {}", r.problem, r.rho);
    println!("majorant: {}", r.majorant);
    println!("minorant: {}", r.minorant);
    for item in &r.items {
        print!("[{}] {:<13} {}", tag(item.status), item.id, item.detail);
        if let (CheckStatus::Fail, Some(w)) = (item.status, &item.witness) {
            print!("  (witness t = {}, u = {:?}, v = {:?}, λ = {:?}: {} vs {})", w.t, w.u, w.v, w.lambda, w.lhs, w.rhs);
        }
        println!();
    }
    for c in r.condition_d.iter().filter(|c| c.status == CheckStatus::Fail) {
        println!("       D fails for {}", c.curve);
    }
    for a in r.admissibility.iter().filter(|a| a.status == CheckStatus::Fail) {
        println!("       not admissible: {} at λ = {}", a.curve, a.lambda);
    }
    println!("delta_bar = {:.12} (argmax t = {:.6})", r.delta_bar, r.delta_bar_argmax);
    if let Some(l) = r.lambda_bar {
        println!("lambda_bar = {l:.12}");
    }
    for n in &r.notes {
        println!("note: {n}");
    }
    println!("{}", if r.all_pass { "all checkable hypotheses hold" } else { "hypothesis failure" });
}

fn cmd_check(args: &ProblemArgs, rho: f64, lambda_bar: Option<f64>, out: &OutArgs) -> Result<i32> {
    let emit = emit_of(out)?;
    let (spec, bounds) = resolve(args, rho)?;
    let bounds = require_bounds(bounds)?;
    let report = check_report(&spec, &bounds, lambda_bar)?;
    print_report(&report);
    if let (Some(dir), true) = (&out.out, emit.json) {
        write_json(&out_path(dir, &format!("check_rho{rho}.json"))?, &report)?;
    }
    Ok(if report.all_pass { EXIT_OK } else { EXIT_HYPOTHESIS })
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    problem: &'a str,
    lambda: f64,
    norm: f64,
    residual: f64,
    iterations: usize,
    damping: f64,
    sliding_mode: bool,
    relaxed_residual: Option<f64>,
    cone: crate::solver::ConeCertificate,
}

fn solver_options(spec: &ProblemSpec, rho: f64, num: &NumArgs) -> Result<SolverOptions> {
    let state_max = rho + spec.vertex()?.history_norm();
    Ok(SolverOptions {
        tol: num.tol,
        lipschitz: Some(estimate_lipschitz(spec, state_max, 33)),
        ..SolverOptions::default()
    })
}

fn cmd_solve(args: &ProblemArgs, lambda: f64, rho: f64, num: &NumArgs, out: &OutArgs) -> Result<i32> {
    let emit = emit_of(out)?;
    let (spec, _) = resolve(args, rho)?;
    let nodes = GridFunction::uniform_nodes(spec.r, num.grid_n)?;
    let y = vertex_on(&spec, &nodes)?;
    let opts = solver_options(&spec, rho, num)?;
    let sol = fixed_point_solve(&spec, &spec.kernel(), lambda, &y, &opts)?;
    let cone = cone_verify(&sol.u, &y, 1e-8)?;
    let summary = SolveSummary {
        problem: &spec.name,
        lambda,
        norm: sol.norm(&y),
        residual: sol.residual,
        iterations: sol.iterations,
        damping: sol.damping,
        sliding_mode: sol.sliding_mode,
        relaxed_residual: sol.relaxed_residual,
        cone,
    };
    println!(
        "λ = {lambda}  ‖u − y‖ = {:.12}  residual = {:.3e}  iterations = {}{}",
        summary.norm,
        summary.residual,
        summary.iterations,
        if sol.sliding_mode { "  (sliding-mode solution)" } else { "" }
    );
    println!("cone: pinned {} nonneg {} harnack {} (margin {:.3e})", cone.history_pinned, cone.nonneg, cone.harnack, cone.harnack_margin);
    if let Some(dir) = &out.out {
        if emit.csv {
            write_solution_csv(&out_path(dir, "solution.csv")?, &sol.u, &y)?;
        }
        if emit.json {
            write_json(&out_path(dir, "solve.json")?, &summary)?;
        }
        if emit.svg {
            let title = format!("{} at λ = {lambda}", spec.name);
            std::fs::write(out_path(dir, "solution.svg")?, svg_solution(&sol.u, &y, &title))?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PairSummary {
    lambda_star: f64,
    residual: f64,
    norm_gap: f64,
    sliding_mode: bool,
    method: crate::solver::PairMethod,
    cone: crate::solver::ConeCertificate,
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    problem: &'a str,
    rho: f64,
    lambda_bar: f64,
    grid_n: usize,
    samples: &'a [crate::solver::ScanSample],
    pairs: Vec<PairSummary>,
    diagnostics: &'a [String],
}

fn print_scan(r: &ScanResult) {
    println!("ρ = {}  λ̄ = {:.12}", r.rho, r.lambda_bar);
    let converged = r.samples.iter().filter(|s| s.norm.is_some()).count();
    println!("  {converged}/{} λ samples converged", r.samples.len());
    for d in &r.diagnostics {
        println!("  {d}");
    }
    for p in &r.pairs {
        println!(
            "  λ* = {:.12}  residual = {:.3e}  |‖u* − y‖ − ρ| = {:.3e}  cone {}  [{:?}]{}",
            p.lambda_star,
            p.residual,
            p.norm_gap,
            if p.cone_cert.passed() { "ok" } else { "FAILED" },
            p.method,
            if p.sliding_mode { "  sliding-mode solution" } else { "" }
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    args: &ProblemArgs,
    rhos: &[f64],
    lambda_max: Option<f64>,
    lambda_points: usize,
    scan_tol: f64,
    no_check: bool,
    num: &NumArgs,
    out: &OutArgs,
) -> Result<i32> {
    let emit = emit_of(out)?;
    if rhos.is_empty() || lambda_points == 0 {
        return Err(Error::InvalidArgument("need at least one ρ and one λ point".into()));
    }
    let mut all_found = true;
    for &rho in rhos {
        let (spec, bounds) = resolve(args, rho)?;
        let lambda_bar = match (&bounds, lambda_max) {
            (Some(b), lm) => {
                let report = check_report(&spec, b, lm)?;
                if !report.all_pass && !no_check {
                    print_report(&report);
                    return Err(Error::Hypothesis(format!("hypotheses fail for ρ = {rho}; rerun with --no-check to scan anyway")));
                }
                report
                    .lambda_bar
                    .ok_or_else(|| Error::Hypothesis("δ̄ = 0, no λ̄ available".into()))?
            }
            (None, Some(lm)) => lm,
            (None, None) => return Err(Error::InvalidArgument("no bounds: pass --lambda-max or --majorant/--minorant".into())),
        };
        let opts = ScanOptions {
            solver: solver_options(&spec, rho, num)?,
            grid_n: num.grid_n,
            scan_tol,
            ..ScanOptions::default()
        };
        let result = boundary_scan(&spec, rho, lambda_bar, &default_lambda_grid(lambda_bar, lambda_points), &opts)?;
        print_scan(&result);
        all_found &= !result.pairs.is_empty();
        if let Some(dir) = &out.out {
            write_scan(dir, emit, &spec, &result, num.grid_n)?;
        }
    }
    Ok(if all_found { EXIT_OK } else { EXIT_NONCONVERGENCE })
}

fn write_scan(dir: &Path, emit: Emit, spec: &ProblemSpec, r: &ScanResult, grid_n: usize) -> Result<()> {
    let rho = r.rho;
    let y = match r.pairs.first() {
        Some(p) => vertex_on(spec, p.u_star.nodes())?,
        None => vertex_on(spec, &GridFunction::uniform_nodes(spec.r, grid_n)?)?,
    };
    if emit.json {
        let summary = ScanSummary {
            problem: &r.problem,
            rho,
            lambda_bar: r.lambda_bar,
            grid_n,
            samples: &r.samples,
            pairs: r
                .pairs
                .iter()
                .map(|p| PairSummary {
                    lambda_star: p.lambda_star,
                    residual: p.residual,
                    norm_gap: p.norm_gap,
                    sliding_mode: p.sliding_mode,
                    method: p.method,
                    cone: p.cone_cert,
                })
                .collect(),
            diagnostics: &r.diagnostics,
        };
        write_json(&out_path(dir, &format!("scan_rho{rho}.json"))?, &summary)?;
    }
    if emit.svg {
        let title = format!("{}: n(λ), ρ = {rho}", r.problem);
        std::fs::write(out_path(dir, &format!("scan_rho{rho}.svg"))?, svg_norm_curve(&r.samples, rho, &r.pairs, &title))?;
    }
    for (k, p) in r.pairs.iter().enumerate() {
        if emit.csv {
            write_solution_csv(&out_path(dir, &format!("eigen_rho{rho}_{k}.csv"))?, &p.u_star, &y)?;
        }
        if emit.svg {
            let title = format!("u* at λ* = {:.9}, ρ = {rho}", p.lambda_star);
            std::fs::write(out_path(dir, &format!("eigen_rho{rho}_{k}.svg"))?, svg_solution(&p.u_star, &y, &title))?;
        }
    }
    Ok(())
}

/// Convenience for tests and bindings: catalog problem with its bounds.
pub fn catalog_problem(name: &str, rho: f64) -> Result<(ProblemSpec, BoundData)> {
    catalog::lookup(name, rho, DEFAULT_TERMS)
}

