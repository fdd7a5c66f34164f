//! `Tu(t) = ∫₀¹ k(t, s) f(s, u(s), u(σ(s))) ds` on the grid of `u`.
//!
//! For `t >= 0`, `G(t, s) = (1 - t) s` when `s < t` and `t (1 - s)` otherwise, so with
//! `A(t) = ∫₀ᵗ s F` and `B(t) = ∫ₜ¹ (1 - s) F` we get `Tu(t) = (1 - t) A(t) + t B(t)`.
//! Both moments are accumulated interval by interval, each interval split wherever
//! the integrand can jump or kink.

use super::{pieces, Ends, GridFunction, QuadConfig};
use crate::error::{Error, Result};
use crate::kernel::GreenKernel;
use crate::problem::{DiscontinuityCurve, ProblemSpec};

/// Result of one operator application with breakpoint diagnostics.
#[derive(Debug, Clone)]
pub struct HammersteinEval {
    pub tu: GridFunction,
    /// Curve crossings located inside grid intervals.
    pub crossings: usize,
    /// Crossings whose bisection bracket did not shrink below the tolerance.
    pub refinement_warnings: usize,
}

/// Applies `T` to `u`; the result lives on `u`'s nodes and vanishes on `[-r, 0]`.
pub fn hammerstein_apply(u: &GridFunction, spec: &ProblemSpec, kernel: &GreenKernel, cfg: &QuadConfig) -> Result<GridFunction> {
    hammerstein_apply_detailed(u, spec, kernel, cfg).map(|e| e.tu)
}

pub fn hammerstein_apply_detailed(
    u: &GridFunction,
    spec: &ProblemSpec,
    kernel: &GreenKernel,
    cfg: &QuadConfig,
) -> Result<HammersteinEval> {
    apply_with(u, spec, kernel, cfg, |s, us, vs| spec.f_at(s, us, vs))
}

/// Same as [`hammerstein_apply_detailed`] with an arbitrary integrand `F(s, u(s), u(σ(s)))`.
pub(crate) fn apply_with<F>(u: &GridFunction, spec: &ProblemSpec, kernel: &GreenKernel, cfg: &QuadConfig, mut integrand: F) -> Result<HammersteinEval>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    cfg.validate()?;
    if u.r() + 1e-12 < kernel.r() {
        return Err(Error::InvalidArgument(format!(
            "grid covers [-{}, 1] but the kernel needs [-{}, 1]",
            u.r(),
            kernel.r()
        )));
    }
    let pos = u.positive_nodes();
    let m = pos.len() - 1;
    let mut first = vec![0.0; m];
    let mut second = vec![0.0; m];
    let mut bps: Vec<f64> = Vec::new();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut crossings = 0;
    let mut refinement_warnings = 0;
    let ends = Ends::Inward {
        rel: 1e-9,
        abs: 2.0 * cfg.crossing_tol,
    };
    let deviated = |s: f64| u.eval(spec.sigma.eval(s).clamp(-u.r(), 1.0));
    let singularities: Vec<_> = cfg.singularities.iter().chain(&spec.singularities).copied().collect();

    for i in 0..m {
        let (lo, hi) = (pos[i], pos[i + 1]);
        bps.clear();
        spec.sigma.preimages_in(u.nodes(), lo, hi, cfg.crossing_tol, &mut bps);
        for c in spec.gamma_curves.iter() {
            add_crossings(c, lo, hi, |s| u.eval(s), cfg.crossing_tol, &mut bps, &mut crossings, &mut refinement_warnings);
        }
        for c in spec.big_gamma_curves.iter() {
            add_crossings(c, lo, hi, deviated, cfg.crossing_tol, &mut bps, &mut crossings, &mut refinement_warnings);
        }
        bps.sort_by(f64::total_cmp);

        pts.clear();
        for piece in pieces(lo, hi, &bps, &singularities, (0.0, 1.0)) {
            piece.points(cfg.panels, cfg.rule, ends, &mut pts);
        }
        let (mut p, mut q) = (0.0, 0.0);
        for &(s, w) in &pts {
            let val = integrand(s, u.eval(s), deviated(s));
            if !val.is_finite() {
                return Err(Error::Integration { location: s });
            }
            p += w * s * val;
            q += w * (1.0 - s) * val;
        }
        first[i] = p;
        second[i] = q;
    }

    let mut values = vec![0.0; u.len()];
    let z = u.zero_index();
    let mut tail: f64 = second.iter().sum();
    let mut head = 0.0;
    for (j, &t) in pos.iter().enumerate() {
        values[z + j] = (1.0 - t) * head + t * tail;
        if j < m {
            head += first[j];
            tail -= second[j];
        }
    }
    // G(0, s) = G(1, s) = 0
    values[z] = 0.0;
    *values.last_mut().unwrap() = 0.0;
    Ok(HammersteinEval {
        tu: GridFunction::new(u.nodes().to_vec(), values)?,
        crossings,
        refinement_warnings,
    })
}

/// Adds curve endpoints and sign changes of `state(s) - γ(s)` on `[lo, hi] ∩ [a, b]`.
#[allow(clippy::too_many_arguments)]
fn add_crossings<S: Fn(f64) -> f64>(
    curve: &DiscontinuityCurve,
    lo: f64,
    hi: f64,
    state: S,
    tol: f64,
    bps: &mut Vec<f64>,
    crossings: &mut usize,
    warnings: &mut usize,
) {
    let a = lo.max(curve.a);
    let b = hi.min(curve.b);
    if a >= b {
        return;
    }
    if a > lo {
        bps.push(a);
    }
    if b < hi {
        bps.push(b);
    }
    const PROBES: usize = 4;
    let diff = |s: f64| state(s) - (curve.value)(s);
    let mut prev_s = a;
    let mut prev = diff(a);
    for k in 1..=PROBES {
        let s = if k == PROBES { b } else { a + (b - a) * k as f64 / PROBES as f64 };
        let d = diff(s);
        if (prev < 0.0 && d > 0.0) || (prev > 0.0 && d < 0.0) {
            let root = super::bisect_root(diff, prev_s, s, tol);
            if !root.is_finite() {
                *warnings += 1;
            } else {
                bps.push(root);
                *crossings += 1;
            }
        } else if d == 0.0 && k < PROBES {
            bps.push(s);
        }
        prev_s = s;
        prev = d;
    }
}
