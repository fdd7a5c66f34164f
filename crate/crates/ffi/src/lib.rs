//! C ABI over `hameig`.
//!
//! Every call returns a [`HameigStatus`]; on failure the message is available from
//! [`hameig_last_error`] on the same thread. Handles are opaque and released with
//! the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hameig::catalog;
use hameig::error::Error;
use hameig::problem::config::ProblemConfig;
use hameig::problem::{run_hypothesis_checks, BoundData, ProblemSpec, SamplingPlan};
use hameig::quadrature::{GridFunction, QuadConfig};
use hameig::solver::{
    boundary_scan, default_lambda_grid, estimate_lipschitz, fixed_point_solve, vertex_on, EigenPair, FixedPointSolution,
    ScanOptions, ScanResult, SolverOptions,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HameigStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Parse = 4,
    UnknownProblem = 5,
    Hypothesis = 6,
    NonConvergence = 7,
    Io = 8,
    Panic = 9,
}

/// A problem with its bounds for one radius `ρ`.
pub struct HameigProblem {
    spec: ProblemSpec,
    bounds: Option<BoundData>,
    rho: f64,
}

/// Solution of `u = y + λTu` at one `λ`.
pub struct HameigSolution {
    sol: FixedPointSolution,
    y: GridFunction,
}

/// Certified eigenpairs of a `λ` scan.
pub struct HameigScan {
    result: ScanResult,
}

/// Summary of one eigenpair.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HameigPair {
    pub lambda_star: f64,
    pub residual: f64,
    pub norm_gap: f64,
    pub cone_ok: bool,
    pub sliding_mode: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HameigStatus {
    match e {
        Error::Domain { .. } => HameigStatus::Domain,
        Error::InvalidArgument(_) | Error::Config(_) => HameigStatus::InvalidArgument,
        Error::Parse { .. } => HameigStatus::Parse,
        Error::UnknownProblem(_) => HameigStatus::UnknownProblem,
        Error::Hypothesis(_) => HameigStatus::Hypothesis,
        Error::NonConvergence(_) | Error::Integration { .. } => HameigStatus::NonConvergence,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => HameigStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HameigError>) -> HameigStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HameigStatus::Ok
        }
        Ok(Err(HameigError::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HameigStatus::NullPointer
        }
        Ok(Err(HameigError::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            HameigStatus::Panic
        }
    }
}

enum HameigError {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for HameigError {
    fn from(e: Error) -> Self {
        HameigError::Lib(e)
    }
}

fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, HameigError> {
    // SAFETY: callers pass pointers obtained from this library or valid for reads
    unsafe { p.as_ref() }.ok_or(HameigError::Null(what))
}

fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, HameigError> {
    // SAFETY: callers pass pointers valid for writes
    unsafe { p.as_mut() }.ok_or(HameigError::Null(what))
}

fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, HameigError> {
    if p.is_null() {
        return Err(HameigError::Null(what));
    }
    // SAFETY: non-null, NUL-terminated by contract
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Error::InvalidArgument(format!("{what} is not UTF-8")).into())
}

/// Message of the last failed call on this thread (empty after a success). The
/// pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn hameig_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `G(t, s)` on `[0, 1]²`.
#[no_mangle]
pub extern "C" fn hameig_green_eval(t: f64, s: f64, value: *mut f64) -> HameigStatus {
    guard(|| {
        *out(value, "value")? = hameig::kernel::green_eval(t, s)?;
        Ok(())
    })
}

/// `φ_N(x) = Σ_{n <= N, q_n < x} 2^-n`.
#[no_mangle]
pub extern "C" fn hameig_phi_eval(x: f64, depth: usize, value: *mut f64) -> HameigStatus {
    guard(|| {
        *out(value, "value")? = catalog::phi_eval(x, depth)?;
        Ok(())
    })
}

fn emit_problem(p: HameigProblem, problem: *mut *mut HameigProblem) -> Result<(), HameigError> {
    *out(problem, "problem")? = Box::into_raw(Box::new(p));
    Ok(())
}

/// Catalog problem `name` for radius `rho`; `depth` truncates `φ`.
#[no_mangle]
pub extern "C" fn hameig_problem_from_catalog(
    name: *const c_char,
    rho: f64,
    depth: usize,
    problem: *mut *mut HameigProblem,
) -> HameigStatus {
    guard(|| {
        let (spec, bounds) = catalog::lookup(string(name, "name")?, rho, depth)?;
        emit_problem(
            HameigProblem {
                spec,
                bounds: Some(bounds),
                rho,
            },
            problem,
        )
    })
}

/// Problem from the text of a TOML problem file.
#[no_mangle]
pub extern "C" fn hameig_problem_from_toml(text: *const c_char, rho: f64, problem: *mut *mut HameigProblem) -> HameigStatus {
    guard(|| {
        let (spec, bounds) = ProblemConfig::from_toml(string(text, "text")?)?.build(rho)?;
        emit_problem(HameigProblem { spec, bounds, rho }, problem)
    })
}

/// Releases a problem; null is ignored.
#[no_mangle]
pub extern "C" fn hameig_problem_free(problem: *mut HameigProblem) {
    if !problem.is_null() {
        // SAFETY: created by Box::into_raw in this library
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Runs the hypothesis checks. `lambda_bar <= 0` selects the default `λ̄`.
#[no_mangle]
pub extern "C" fn hameig_problem_check(
    problem: *const HameigProblem,
    lambda_bar: f64,
    all_pass: *mut bool,
    delta_bar: *mut f64,
    lambda_bar_out: *mut f64,
) -> HameigStatus {
    guard(|| {
        let p = nonnull(problem, "problem")?;
        let bounds = p
            .bounds
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("problem has no majorant/minorant".into()))?;
        let plan = SamplingPlan::for_problem(&p.spec, p.rho)?;
        let lb = (lambda_bar > 0.0).then_some(lambda_bar);
        let report = run_hypothesis_checks(&p.spec, bounds, &QuadConfig::default(), &plan, lb)?;
        *out(all_pass, "all_pass")? = report.all_pass;
        *out(delta_bar, "delta_bar")? = report.delta_bar;
        *out(lambda_bar_out, "lambda_bar_out")? = report.lambda_bar.unwrap_or(f64::NAN);
        Ok(())
    })
}

fn solver_options(p: &HameigProblem, tol: f64) -> Result<SolverOptions, HameigError> {
    let state_max = p.rho + p.spec.vertex()?.history_norm();
    Ok(SolverOptions {
        tol,
        lipschitz: Some(estimate_lipschitz(&p.spec, state_max, 33)),
        ..SolverOptions::default()
    })
}

/// Solves `u = y + λTu` from `y` on `grid_n` nodes of `[0, 1]`.
#[no_mangle]
pub extern "C" fn hameig_solve(
    problem: *const HameigProblem,
    lambda: f64,
    grid_n: usize,
    tol: f64,
    solution: *mut *mut HameigSolution,
) -> HameigStatus {
    guard(|| {
        let p = nonnull(problem, "problem")?;
        let slot = out(solution, "solution")?;
        let nodes = GridFunction::uniform_nodes(p.spec.r, grid_n)?;
        let y = vertex_on(&p.spec, &nodes)?;
        let sol = fixed_point_solve(&p.spec, &p.spec.kernel(), lambda, &y, &solver_options(p, tol)?)?;
        *slot = Box::into_raw(Box::new(HameigSolution { sol, y }));
        Ok(())
    })
}

/// Number of grid nodes, history included.
#[no_mangle]
pub extern "C" fn hameig_solution_len(solution: *const HameigSolution) -> usize {
    // SAFETY: pointer from hameig_solve or null
    unsafe { solution.as_ref() }.map_or(0, |s| s.sol.u.len())
}

/// Copies nodes and values into arrays of length `len` (see `hameig_solution_len`).
#[no_mangle]
pub extern "C" fn hameig_solution_copy(solution: *const HameigSolution, t: *mut f64, u: *mut f64, len: usize) -> HameigStatus {
    guard(|| {
        let s = nonnull(solution, "solution")?;
        let n = s.sol.u.len();
        if len < n {
            return Err(Error::InvalidArgument(format!("buffers hold {len} values, {n} needed")).into());
        }
        if t.is_null() || u.is_null() {
            return Err(HameigError::Null("t/u"));
        }
        // SAFETY: both buffers are valid for `len >= n` writes
        unsafe {
            ptr::copy_nonoverlapping(s.sol.u.nodes().as_ptr(), t, n);
            ptr::copy_nonoverlapping(s.sol.u.values().as_ptr(), u, n);
        }
        Ok(())
    })
}

/// `‖u - y‖`, residual and iteration count of a solution.
#[no_mangle]
pub extern "C" fn hameig_solution_info(
    solution: *const HameigSolution,
    norm: *mut f64,
    residual: *mut f64,
    iterations: *mut usize,
) -> HameigStatus {
    guard(|| {
        let s = nonnull(solution, "solution")?;
        *out(norm, "norm")? = s.sol.norm(&s.y);
        *out(residual, "residual")? = s.sol.residual;
        *out(iterations, "iterations")? = s.sol.iterations;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn hameig_solution_free(solution: *mut HameigSolution) {
    if !solution.is_null() {
        // SAFETY: created by Box::into_raw in this library
        drop(unsafe { Box::from_raw(solution) });
    }
}

/// Scans `λ ∈ {λ̄ k / lambda_points}` and locates `λ*` with `‖u* - y‖ = ρ`.
/// `lambda_bar <= 0` uses the default from the hypothesis report.
#[no_mangle]
pub extern "C" fn hameig_scan(
    problem: *const HameigProblem,
    lambda_bar: f64,
    lambda_points: usize,
    grid_n: usize,
    scan: *mut *mut HameigScan,
) -> HameigStatus {
    guard(|| {
        let p = nonnull(problem, "problem")?;
        let slot = out(scan, "scan")?;
        let lb = if lambda_bar > 0.0 {
            lambda_bar
        } else {
            let bounds = p
                .bounds
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("lambda_bar needed: problem has no bounds".into()))?;
            let plan = SamplingPlan::for_problem(&p.spec, p.rho)?;
            run_hypothesis_checks(&p.spec, bounds, &QuadConfig::default(), &plan, None)?
                .lambda_bar
                .ok_or_else(|| Error::Hypothesis("no lambda_bar".into()))?
        };
        if lambda_points == 0 {
            return Err(Error::InvalidArgument("lambda_points must be positive".into()).into());
        }
        let opts = ScanOptions {
            solver: solver_options(p, 1e-10)?,
            grid_n,
            ..ScanOptions::default()
        };
        let result = boundary_scan(&p.spec, p.rho, lb, &default_lambda_grid(lb, lambda_points), &opts)?;
        *slot = Box::into_raw(Box::new(HameigScan { result }));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn hameig_scan_pair_count(scan: *const HameigScan) -> usize {
    // SAFETY: pointer from hameig_scan or null
    unsafe { scan.as_ref() }.map_or(0, |s| s.result.pairs.len())
}

#[no_mangle]
pub extern "C" fn hameig_scan_pair(scan: *const HameigScan, index: usize, pair: *mut HameigPair) -> HameigStatus {
    guard(|| {
        let s = nonnull(scan, "scan")?;
        let p: &EigenPair = s
            .result
            .pairs
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("pair index {index} out of range")))?;
        *out(pair, "pair")? = HameigPair {
            lambda_star: p.lambda_star,
            residual: p.residual,
            norm_gap: p.norm_gap,
            cone_ok: p.cone_cert.passed(),
            sliding_mode: p.sliding_mode,
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn hameig_scan_free(scan: *mut HameigScan) {
    if !scan.is_null() {
        // SAFETY: created by Box::into_raw in this library
        drop(unsafe { Box::from_raw(scan) });
    }
}
