//! Damped Picard iteration for `u = y + λ T u`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::envelope::{f_envelope, sliding_selection, ValueInterval};
use crate::error::{Error, Result};
use crate::kernel::GreenKernel;
use crate::problem::{midpoints, ProblemSpec};
use crate::quadrature::hammerstein::apply_with;
use crate::quadrature::{hammerstein_apply, GridFunction, QuadConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Sup-norm residual `‖u - y - λTu‖` accepted as converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Fixed damping `θ`; when absent `θ = 1` if `λ L / 8 < 1` and `1/2` otherwise.
    pub damping: Option<f64>,
    /// Lipschitz bound of `f` in the state, used only to choose the damping.
    pub lipschitz: Option<f64>,
    /// Rounds of sliding selection at chattering nodes before giving up.
    pub chatter_rounds: usize,
    /// Iterations without the residual halving that count as stagnation.
    pub stall_window: usize,
    /// Iteration is abandoned once `‖u - y‖` exceeds this.
    pub divergence_norm: f64,
    pub quad: QuadConfig,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 4000,
            damping: None,
            lipschitz: None,
            chatter_rounds: 5,
            stall_window: 60,
            divergence_norm: 1e6,
            quad: QuadConfig::default(),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(theta) = self.damping {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::Domain {
                    what: "damping",
                    value: theta,
                    domain: "(0, 1]",
                });
            }
        }
        if self.max_iter == 0 || self.stall_window == 0 {
            return Err(Error::InvalidArgument("max_iter and stall_window must be positive".into()));
        }
        self.quad.validate()
    }

    fn theta(&self, lambda: f64) -> f64 {
        match (self.damping, self.lipschitz) {
            (Some(theta), _) => theta,
            (None, Some(l)) if lambda * l / 8.0 < 1.0 => 1.0,
            _ => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    MaxIterations,
    Diverged,
    NonFinite,
    Stagnated,
}

/// Report of an iteration that did not reach the tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct NonConvergence {
    pub lambda: f64,
    pub kind: FailureKind,
    pub iterations: usize,
    /// Smallest residual reached.
    pub residual: f64,
    /// Grid points where the correction kept changing sign.
    pub chatter_nodes: Vec<f64>,
    #[serde(skip)]
    pub last: Option<GridFunction>,
}

impl fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "λ = {}: {:?} after {} iterations, best residual {:.3e}",
            self.lambda, self.kind, self.iterations, self.residual
        )?;
        if !self.chatter_nodes.is_empty() {
            write!(f, ", chattering at {} nodes", self.chatter_nodes.len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointSolution {
    pub lambda: f64,
    pub u: GridFunction,
    pub residual: f64,
    pub iterations: usize,
    pub damping: f64,
    /// Accepted only through the envelope-relaxed residual.
    pub sliding_mode: bool,
    pub relaxed_residual: Option<f64>,
    pub chatter_nodes: Vec<f64>,
}

impl FixedPointSolution {
    /// `‖u - y‖` on `[0, 1]`.
    pub fn norm(&self, y: &GridFunction) -> f64 {
        self.u.sup_distance_positive(y)
    }
}

/// Vertex function sampled on `nodes`.
pub fn vertex_on(spec: &ProblemSpec, nodes: &[f64]) -> Result<GridFunction> {
    let vertex = spec.vertex()?;
    GridFunction::from_fn(nodes.to_vec(), |t| vertex.value(t))
}

/// Sampled `sup |∂f/∂u| + |∂f/∂v|` over `[0, 1] x [0, state_max]²` by difference quotients.
pub fn estimate_lipschitz(spec: &ProblemSpec, state_max: f64, samples: usize) -> f64 {
    let n = samples.max(2);
    let h = state_max / (n - 1) as f64;
    if !(h > 0.0) {
        return 0.0;
    }
    let mut l: f64 = 0.0;
    for t in midpoints(0.0, 1.0, n) {
        for i in 0..n {
            for j in 0..n {
                let (u, v) = (i as f64 * h, j as f64 * h);
                let f0 = spec.f_at(t, u, v);
                let du = (spec.f_at(t, u + h, v) - f0).abs() / h;
                let dv = (spec.f_at(t, u, v + h) - f0).abs() / h;
                l = l.max(du + dv);
            }
        }
    }
    l
}

fn pin_history(u: &mut GridFunction, y: &GridFunction) {
    let z = u.zero_index();
    u.values_mut()[..=z].copy_from_slice(&y.values()[..=z]);
}

fn fail(lambda: f64, kind: FailureKind, iterations: usize, residual: f64, chatter: Vec<f64>, last: &GridFunction) -> Error {
    Error::NonConvergence(Box::new(NonConvergence {
        lambda,
        kind,
        iterations,
        residual,
        chatter_nodes: chatter,
        last: Some(last.clone()),
    }))
}

/// `sup_i dist(u_i - y_i, λ [T_lo u, T_hi u]_i)` with `f` replaced by its `ε`-envelope.
pub fn relaxed_residual(
    spec: &ProblemSpec,
    kernel: &GreenKernel,
    lambda: f64,
    u: &GridFunction,
    y: &GridFunction,
    eps: f64,
    quad: &QuadConfig,
) -> Result<f64> {
    let lo = apply_with(u, spec, kernel, quad, |s, a, b| {
        f_envelope(spec, s, a.max(0.0), b.max(0.0), eps).map_or(f64::NAN, |e| e.lo)
    })?
    .tu;
    let hi = apply_with(u, spec, kernel, quad, |s, a, b| {
        f_envelope(spec, s, a.max(0.0), b.max(0.0), eps).map_or(f64::NAN, |e| e.hi)
    })?
    .tu;
    let z = u.zero_index();
    let mut worst: f64 = 0.0;
    for i in z..u.len() {
        let w = u.values()[i] - y.values()[i];
        let (a, b) = (lambda * lo.values()[i], lambda * hi.values()[i]);
        worst = worst.max((a - w).max(w - b).max(0.0));
    }
    Ok(worst)
}

/// Solves `u = y + λTu` from `u0`; the history part of `u0` is replaced by `ω`.
pub fn fixed_point_solve(
    spec: &ProblemSpec,
    kernel: &GreenKernel,
    lambda: f64,
    u0: &GridFunction,
    opts: &SolverOptions,
) -> Result<FixedPointSolution> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain {
            what: "lambda",
            value: lambda,
            domain: "[0, inf)",
        });
    }
    opts.validate()?;
    let y = vertex_on(spec, u0.nodes())?;
    let mut u = u0.clone();
    pin_history(&mut u, &y);
    let z = u.zero_index();
    let n = u.len();
    let mut theta = opts.theta(lambda);

    let mut prev_d: Option<Vec<f64>> = None;
    let mut prev_p: Option<Vec<f64>> = None;
    let mut prev_u: Option<Vec<f64>> = None;
    // per-window sign changes of the correction and range of each nodal value
    let mut flips = vec![0u32; n];
    let mut lo_u = u.values().to_vec();
    let mut hi_u = u.values().to_vec();
    let mut best = f64::INFINITY;
    let mut best_at_window = f64::INFINITY;
    let mut window_start = 0;
    let mut rounds = 0;
    let mut chatter: Vec<usize> = Vec::new();
    let mut d = vec![0.0; n];
    let mut p = vec![0.0; n];
    let nodes_t = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| u0.nodes()[i]).collect() };

    for iter in 0..opts.max_iter {
        let tu = match hammerstein_apply(&u, spec, kernel, &opts.quad) {
            Ok(tu) => tu,
            Err(Error::Integration { .. }) => {
                return Err(fail(lambda, FailureKind::NonFinite, iter, best, Vec::new(), &u));
            }
            Err(e) => return Err(e),
        };
        let mut res: f64 = 0.0;
        for i in z..n {
            p[i] = y.values()[i] + lambda * tu.values()[i];
            d[i] = p[i] - u.values()[i];
            res = res.max(d[i].abs());
        }
        if !res.is_finite() {
            return Err(fail(lambda, FailureKind::NonFinite, iter, best, Vec::new(), &u));
        }
        best = best.min(res);
        if res <= opts.tol {
            return Ok(FixedPointSolution {
                lambda,
                u,
                residual: res,
                iterations: iter,
                damping: theta,
                sliding_mode: false,
                relaxed_residual: None,
                chatter_nodes: nodes_t(&chatter),
            });
        }
        if u.sup_distance_positive(&y) > opts.divergence_norm {
            return Err(fail(lambda, FailureKind::Diverged, iter, best, Vec::new(), &u));
        }

        for i in z..n {
            let v = u.values()[i];
            lo_u[i] = lo_u[i].min(v);
            hi_u[i] = hi_u[i].max(v);
            if prev_d.as_ref().is_some_and(|pd| d[i] * pd[i] < 0.0 && d[i].abs() > opts.tol) {
                flips[i] += 1;
            }
        }
        // period two: u_{k+1} = u_{k-1} while the residual stays large
        let period_two = prev_u
            .as_ref()
            .is_some_and(|pu| (z..n).all(|i| (u.values()[i] + theta * d[i] - pu[i]).abs() < opts.tol));
        let window_done = iter >= window_start + opts.stall_window;
        let stalled = window_done && best > 0.5 * best_at_window;
        let reset_window = |flips: &mut Vec<u32>, lo_u: &mut Vec<f64>, hi_u: &mut Vec<f64>, u: &GridFunction| {
            flips.iter_mut().for_each(|f| *f = 0);
            lo_u.copy_from_slice(u.values());
            hi_u.copy_from_slice(u.values());
        };
        if window_done && !stalled {
            window_start = iter;
            best_at_window = best;
            reset_window(&mut flips, &mut lo_u, &mut hi_u, &u);
        }
        if period_two || stalled {
            let nodes: Vec<usize> = (z..n).filter(|&i| flips[i] >= 2).collect();
            if nodes.is_empty() {
                return Err(fail(lambda, FailureKind::Stagnated, iter, best, Vec::new(), &u));
            }
            if rounds < opts.chatter_rounds {
                rounds += 1;
                if let Some(pp) = &prev_p {
                    for &i in &nodes {
                        let hull = ValueInterval {
                            lo: p[i].min(pp[i]),
                            hi: p[i].max(pp[i]),
                        };
                        u.values_mut()[i] = sliding_selection(hull, 0.5 * (lo_u[i] + hi_u[i]));
                    }
                }
                theta *= 0.5;
                chatter = nodes;
                window_start = iter;
                best_at_window = f64::INFINITY;
                best = f64::INFINITY;
                reset_window(&mut flips, &mut lo_u, &mut hi_u, &u);
                prev_d = None;
                prev_p = None;
                prev_u = None;
                continue;
            }
            let eps = nodes.iter().map(|&i| hi_u[i] - lo_u[i]).fold(opts.tol, f64::max);
            let relaxed = relaxed_residual(spec, kernel, lambda, &u, &y, eps, &opts.quad)?;
            if relaxed <= opts.tol {
                return Ok(FixedPointSolution {
                    lambda,
                    u,
                    residual: res,
                    iterations: iter,
                    damping: theta,
                    sliding_mode: true,
                    relaxed_residual: Some(relaxed),
                    chatter_nodes: nodes_t(&nodes),
                });
            }
            return Err(fail(lambda, FailureKind::Stagnated, iter, best, nodes_t(&nodes), &u));
        }

        prev_u = Some(u.values().to_vec());
        prev_p = Some(p.clone());
        prev_d = Some(d.clone());
        let vals = u.values_mut();
        for i in z..n {
            vals[i] += theta * d[i];
        }
    }
    Err(fail(lambda, FailureKind::MaxIterations, opts.max_iter, best, nodes_t(&chatter), &u))
}

/// `n(λ) = ‖u_λ - y‖` for the solution continued from `y`.
pub fn norm_response(spec: &ProblemSpec, lambda: f64, nodes: &[f64], opts: &SolverOptions) -> Result<(f64, FixedPointSolution)> {
    let y = vertex_on(spec, nodes)?;
    let sol = fixed_point_solve(spec, &spec.kernel(), lambda, &y, opts)?;
    Ok((sol.norm(&y), sol))
}
