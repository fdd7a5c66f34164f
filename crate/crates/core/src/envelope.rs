//! Set-valued relaxation of `f` near its jump curves.
//!
//! `f_envelope` brackets `f` over the box `[u - ε, u + ε] x [v - ε, v + ε]` by sampling
//! each axis at the centre, at offsets `±base·2^k <= ε`, at the box edge `0` when the
//! box meets it, and just on both sides of every curve passing through the box. The
//! offset ladder does not depend on `ε`, so growing `ε` only adds samples.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::GreenKernel;
use crate::problem::{compute_delta_bar, BoundData, DiscontinuityCurve, ProblemSpec};
use crate::quadrature::QuadConfig;

/// Smallest ladder offset; also the one-sided offset used at curves.
pub const LADDER_BASE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ValueInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn include(&mut self, x: f64) {
        self.lo = self.lo.min(x);
        self.hi = self.hi.max(x);
    }
}

fn axis_samples(t: f64, x: f64, eps: f64, curves: &[DiscontinuityCurve], out: &mut Vec<f64>) {
    out.clear();
    let (lo, hi) = ((x - eps).max(0.0), x + eps);
    out.push(x);
    let mut d = LADDER_BASE;
    while d <= eps {
        out.push(x + d);
        if x - d >= 0.0 {
            out.push(x - d);
        }
        d *= 2.0;
    }
    if x - eps < 0.0 {
        out.push(0.0);
    }
    for c in curves.iter().filter(|c| c.contains(t)) {
        let g = (c.value)(t);
        for y in [g - LADDER_BASE, g, g + LADDER_BASE] {
            if y >= lo && y <= hi {
                out.push(y);
            }
        }
    }
}

/// Bracket of `f(t, ·, ·)` over the `ε`-box around `(u, v)` clipped to the
/// non-negative quadrant. `ε = 0` gives the single value `f(t, u, v)`.
pub fn f_envelope(spec: &ProblemSpec, t: f64, u: f64, v: f64, eps: f64) -> Result<ValueInterval> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
            domain: "[0, inf)",
        });
    }
    if !(u >= 0.0 && v >= 0.0) {
        return Err(Error::InvalidArgument(format!("state ({u}, {v}) must be non-negative")));
    }
    let mut us = Vec::new();
    let mut vs = Vec::new();
    axis_samples(t, u, eps, &spec.gamma_curves, &mut us);
    axis_samples(t, v, eps, &spec.big_gamma_curves, &mut vs);
    let mut out = ValueInterval::point(spec.f_at(t, u, v));
    for &a in &us {
        for &b in &vs {
            out.include(spec.f_at(t, a, b));
        }
    }
    Ok(out)
}

/// `δ̄ = sup_{[1/4, 3/4]} ∫ G(t, s) δ_ρ(s) ds`, a lower bound for `‖u - y‖` on the
/// boundary of the `ρ`-ball once `λ > ρ/δ̄`; identical to the hypothesis report value.
pub fn boundary_norm_lower_bound(bounds: &BoundData, kernel: &GreenKernel, quad: &QuadConfig) -> Result<f64> {
    Ok(compute_delta_bar(bounds, kernel, quad)?.value)
}

/// Element of `interval` closest to `target`.
pub fn sliding_selection(interval: ValueInterval, target: f64) -> f64 {
    target.clamp(interval.lo, interval.hi)
}
