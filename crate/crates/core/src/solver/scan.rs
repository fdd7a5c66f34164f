//! Continuation of `n(λ) = ‖u_λ - y‖` over a λ grid and location of `n(λ*) = ρ`.

use rayon::prelude::*;
use serde::Serialize;

use super::cone::{cone_verify, ConeCertificate};
use super::fixed_point::{estimate_lipschitz, fixed_point_solve, vertex_on, FixedPointSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::kernel::GreenKernel;
use crate::problem::ProblemSpec;
use crate::quadrature::{hammerstein_apply, GridFunction};

#[derive(Debug, Clone, Serialize)]
pub struct ScanOptions {
    pub solver: SolverOptions,
    /// Nodes on `[0, 1]`.
    pub grid_n: usize,
    /// Accepted `|n(λ*) - ρ|`.
    pub scan_tol: f64,
    pub max_bisections: usize,
    /// Slack in the cone test.
    pub cone_tol: f64,
    /// Try the fixed-radius iteration when the continuation stops short of `ρ`.
    pub fold_fallback: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            grid_n: 257,
            scan_tol: 1e-9,
            max_bisections: 200,
            cone_tol: 1e-8,
            fold_fallback: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMethod {
    /// Bisection on a sign change of `n(λ) - ρ` between converged solves.
    Bisection,
    /// Fixed-radius iteration `u = y + ρ Tu/‖Tu‖`, `λ = ρ/‖Tu‖`.
    FixedRadius,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    pub lambda_star: f64,
    pub u_star: GridFunction,
    /// `‖u* - y - λ* T u*‖` on `[0, 1]`.
    pub residual: f64,
    /// `|‖u* - y‖ - ρ|`.
    pub norm_gap: f64,
    pub cone_cert: ConeCertificate,
    pub sliding_mode: bool,
    pub method: PairMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSample {
    pub lambda: f64,
    pub norm: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub sliding_mode: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub problem: String,
    pub rho: f64,
    pub lambda_bar: f64,
    pub samples: Vec<ScanSample>,
    pub pairs: Vec<EigenPair>,
    pub diagnostics: Vec<String>,
}

/// `λ̄ k / points` for `k = 1..=points`.
pub fn default_lambda_grid(lambda_bar: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|k| lambda_bar * k as f64 / points as f64).collect()
}

struct Ctx<'a> {
    spec: &'a ProblemSpec,
    kernel: GreenKernel,
    y: GridFunction,
    rho: f64,
    lambda_bar: f64,
    opts: &'a ScanOptions,
}

impl Ctx<'_> {
    fn solve(&self, lambda: f64, start: &GridFunction) -> Result<FixedPointSolution> {
        fixed_point_solve(self.spec, &self.kernel, lambda, start, &self.opts.solver)
    }

    /// Solve from `start`, then from `y` if that fails.
    fn solve_any(&self, lambda: f64, start: &GridFunction) -> Result<FixedPointSolution> {
        match self.solve(lambda, start) {
            Ok(s) => Ok(s),
            Err(Error::NonConvergence(_)) if start != &self.y => self.solve(lambda, &self.y),
            Err(e) => Err(e),
        }
    }

    fn gap(&self, sol: &FixedPointSolution) -> f64 {
        sol.norm(&self.y) - self.rho
    }

    fn certify(&self, sol: FixedPointSolution, method: PairMethod, diagnostics: &mut Vec<String>) -> Result<Option<EigenPair>> {
        let cone_cert = cone_verify(&sol.u, &self.y, self.opts.cone_tol)?;
        let norm_gap = self.gap(&sol).abs();
        let lambda = sol.lambda;
        let mut problems = Vec::new();
        if !(lambda > 0.0 && lambda < self.lambda_bar) {
            problems.push(format!("λ* outside (0, λ̄ = {})", self.lambda_bar));
        }
        if norm_gap > self.opts.scan_tol {
            problems.push(format!("norm gap {norm_gap:.3e}"));
        }
        if !cone_cert.passed() {
            problems.push(format!("cone test failed {cone_cert:?}"));
        }
        if !sol.sliding_mode && sol.residual > self.opts.solver.tol {
            problems.push(format!("residual {:.3e}", sol.residual));
        }
        if problems.is_empty() {
            Ok(Some(EigenPair {
                lambda_star: lambda,
                u_star: sol.u,
                residual: sol.residual,
                norm_gap,
                cone_cert,
                sliding_mode: sol.sliding_mode,
                method,
            }))
        } else {
            diagnostics.push(format!("candidate λ = {lambda} rejected: {}", problems.join("; ")));
            Ok(None)
        }
    }

    /// Bisection on `[a, b]` where `n - ρ` changes sign; `sa` is the solution at `a`.
    fn bisect(&self, mut a: f64, mut b: f64, sa: &FixedPointSolution, diagnostics: &mut Vec<String>) -> Result<Option<FixedPointSolution>> {
        let mut warm = sa.u.clone();
        let below_at_a = self.gap(sa) < 0.0;
        for _ in 0..self.opts.max_bisections {
            let mid = 0.5 * (a + b);
            if !(mid > a && mid < b) {
                break;
            }
            let sol = match self.solve_any(mid, &warm) {
                Ok(s) => s,
                Err(Error::NonConvergence(nc)) => {
                    diagnostics.push(format!("bisection in [{a}, {b}] stopped: {nc}"));
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let g = self.gap(&sol);
            if g.abs() <= self.opts.scan_tol {
                return Ok(Some(sol));
            }
            if (g < 0.0) == below_at_a {
                a = mid;
                warm = sol.u;
            } else {
                b = mid;
            }
        }
        diagnostics.push(format!("bisection in [{a}, {b}] exhausted without |n - ρ| <= {}", self.opts.scan_tol));
        Ok(None)
    }

    /// Pushes from the last converged point `a` (`n < ρ`) towards the failing point `b`
    /// and returns a converged solution beyond `ρ` if the continuation reaches one.
    fn creep(&self, mut a: f64, mut b: f64, sa: &FixedPointSolution) -> Result<(FixedPointSolution, Option<FixedPointSolution>)> {
        let mut last = sa.clone();
        for _ in 0..48 {
            let mid = 0.5 * (a + b);
            match self.solve(mid, &last.u) {
                Ok(sol) => {
                    if self.gap(&sol) >= 0.0 {
                        return Ok((last, Some(sol)));
                    }
                    a = mid;
                    last = sol;
                }
                Err(Error::NonConvergence(_)) => b = mid,
                Err(e) => return Err(e),
            }
            if b - a <= 1e-12 * b {
                break;
            }
        }
        Ok((last, None))
    }
}

/// Fixed-radius iteration: `u ← (1 - θ)u + θ(y + ρ Tu/‖Tu‖)`, returning `λ = ρ/‖Tu‖`.
pub fn fixed_radius_solve(
    spec: &ProblemSpec,
    rho: f64,
    start: &GridFunction,
    opts: &SolverOptions,
) -> Result<FixedPointSolution> {
    opts.validate()?;
    let kernel = spec.kernel();
    let y = vertex_on(spec, start.nodes())?;
    let z = y.zero_index();
    let theta = opts.damping.unwrap_or(0.5);
    let mut u = start.clone();
    let project = |u: &GridFunction| -> Result<(f64, GridFunction)> {
        let tu = hammerstein_apply(u, spec, &kernel, &opts.quad)?;
        let m = tu.sup_norm_positive();
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(format!("‖Tu‖ = {m} cannot be normalised")));
        }
        let lambda = rho / m;
        let p = GridFunction::new(
            y.nodes().to_vec(),
            y.values().iter().zip(tu.values()).map(|(a, b)| a + lambda * b).collect(),
        )?;
        Ok((lambda, p))
    };
    // start on the sphere ‖u - y‖ = ρ
    let w = u.sup_distance_positive(&y);
    if w > 0.0 {
        let s = rho / w;
        u = GridFunction::new(
            y.nodes().to_vec(),
            y.values().iter().zip(u.values()).map(|(a, b)| a + s * (b - a)).collect(),
        )?;
    } else {
        u = project(&y)?.1;
    }
    let mut best = f64::INFINITY;
    for iter in 0..opts.max_iter {
        let (_, p) = project(&u)?;
        let step = p.sup_distance_positive(&u);
        best = best.min(step);
        if step <= opts.tol {
            // p sits exactly on the sphere; re-evaluate λ and the residual there
            let (lambda, q) = project(&p)?;
            return Ok(FixedPointSolution {
                lambda,
                residual: q.sup_distance_positive(&p),
                u: p,
                iterations: iter + 1,
                damping: theta,
                sliding_mode: false,
                relaxed_residual: None,
                chatter_nodes: Vec::new(),
            });
        }
        let vals: Vec<f64> = u.values().iter().zip(p.values()).map(|(a, b)| a + theta * (b - a)).collect();
        u.values_mut()[z..].copy_from_slice(&vals[z..]);
    }
    Err(Error::NonConvergence(Box::new(super::NonConvergence {
        lambda: f64::NAN,
        kind: super::FailureKind::MaxIterations,
        iterations: opts.max_iter,
        residual: best,
        chatter_nodes: Vec::new(),
        last: Some(u),
    })))
}

/// Evaluates `n(λ)` on `lambdas` (in parallel) and returns every certified `λ*` with
/// `n(λ*) = ρ` found by bisection, plus fixed-radius pairs where the continuation folds.
pub fn boundary_scan(spec: &ProblemSpec, rho: f64, lambda_bar: f64, lambdas: &[f64], opts: &ScanOptions) -> Result<ScanResult> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain {
            what: "rho",
            value: rho,
            domain: "(0, inf)",
        });
    }
    if lambdas.is_empty() || lambdas.windows(2).any(|w| !(w[0] < w[1])) || !(lambdas[0] > 0.0) {
        return Err(Error::InvalidArgument("λ grid must be positive and strictly increasing".into()));
    }
    if !(lambda_bar > 0.0) || lambdas[lambdas.len() - 1] > lambda_bar {
        return Err(Error::InvalidArgument(format!("λ grid must lie in (0, λ̄ = {lambda_bar}]")));
    }
    let nodes = GridFunction::uniform_nodes(spec.r, opts.grid_n)?;
    let mut tuned;
    let mut opts = opts;
    if opts.solver.damping.is_none() && opts.solver.lipschitz.is_none() {
        let state_max = rho + spec.vertex()?.history_norm();
        tuned = opts.clone();
        tuned.solver.lipschitz = Some(estimate_lipschitz(spec, state_max, 33));
        opts = &tuned;
    }
    let ctx = Ctx {
        spec,
        kernel: spec.kernel(),
        y: vertex_on(spec, &nodes)?,
        rho,
        lambda_bar,
        opts,
    };

    let solved: Vec<Result<FixedPointSolution>> = lambdas.par_iter().map(|&l| ctx.solve(l, &ctx.y)).collect();
    let mut samples = Vec::with_capacity(lambdas.len());
    let mut sols: Vec<Option<FixedPointSolution>> = Vec::with_capacity(lambdas.len());
    for (&lambda, r) in lambdas.iter().zip(solved) {
        match r {
            Ok(sol) => {
                samples.push(ScanSample {
                    lambda,
                    norm: Some(sol.norm(&ctx.y)),
                    residual: sol.residual,
                    iterations: sol.iterations,
                    sliding_mode: sol.sliding_mode,
                    failure: None,
                });
                sols.push(Some(sol));
            }
            Err(Error::NonConvergence(nc)) => {
                samples.push(ScanSample {
                    lambda,
                    norm: None,
                    residual: nc.residual,
                    iterations: nc.iterations,
                    sliding_mode: false,
                    failure: Some(nc.to_string()),
                });
                sols.push(None);
            }
            Err(e) => return Err(e),
        }
    }

    let mut diagnostics = Vec::new();
    let mut found: Vec<(FixedPointSolution, PairMethod)> = Vec::new();
    for k in 0..lambdas.len() {
        let Some(sk) = &sols[k] else { continue };
        let gk = ctx.gap(sk);
        if gk.abs() <= opts.scan_tol {
            found.push((sk.clone(), PairMethod::Bisection));
            continue;
        }
        let Some(next) = sols.get(k + 1) else { continue };
        match next {
            Some(sn) => {
                let gn = ctx.gap(sn);
                if gn.abs() > opts.scan_tol && (gk < 0.0) != (gn < 0.0) {
                    if let Some(sol) = ctx.bisect(lambdas[k], lambdas[k + 1], sk, &mut diagnostics)? {
                        found.push((sol, PairMethod::Bisection));
                    }
                }
            }
            None if gk < 0.0 => {
                diagnostics.push(format!(
                    "continuation fails between λ = {} (n = {:.9}) and λ = {}",
                    lambdas[k],
                    gk + rho,
                    lambdas[k + 1]
                ));
                let (edge, beyond) = ctx.creep(lambdas[k], lambdas[k + 1], sk)?;
                if let Some(sb) = beyond {
                    if ctx.gap(&sb).abs() <= opts.scan_tol {
                        found.push((sb, PairMethod::Bisection));
                    } else if let Some(sol) = ctx.bisect(edge.lambda, sb.lambda, &edge, &mut diagnostics)? {
                        found.push((sol, PairMethod::Bisection));
                    }
                    continue;
                }
                diagnostics.push(format!(
                    "continuation folds near λ = {:.12} with n = {:.9} < ρ",
                    edge.lambda,
                    ctx.gap(&edge) + rho
                ));
                if opts.fold_fallback {
                    match fixed_radius_solve(spec, rho, &edge.u, &opts.solver) {
                        Ok(sol) => found.push((sol, PairMethod::FixedRadius)),
                        Err(Error::NonConvergence(nc)) => diagnostics.push(format!("fixed-radius iteration failed: {nc}")),
                        Err(e) => return Err(e),
                    }
                }
            }
            None => {}
        }
    }

    let mut pairs: Vec<EigenPair> = Vec::new();
    for (sol, method) in found {
        if pairs.iter().any(|p| (p.lambda_star - sol.lambda).abs() <= 1e-8 * sol.lambda) {
            continue;
        }
        if let Some(pair) = ctx.certify(sol, method, &mut diagnostics)? {
            pairs.push(pair);
        }
    }
    pairs.sort_by(|a, b| a.lambda_star.total_cmp(&b.lambda_star));
    if pairs.is_empty() {
        diagnostics.push(format!("no certified λ* with n(λ*) = {rho} on the grid"));
    }
    Ok(ScanResult {
        problem: spec.name.clone(),
        rho,
        lambda_bar,
        samples,
        pairs,
        diagnostics,
    })
}
