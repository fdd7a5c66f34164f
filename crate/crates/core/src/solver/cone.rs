//! Membership of a computed solution in the cone around the vertex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeCertificate {
    /// `u = ω` on `[-r, 0]`.
    pub history_pinned: bool,
    /// `u >= y` on `[0, 1]`.
    pub nonneg: bool,
    /// `min_{[1/4, 3/4]} (u - y) >= ‖u - y‖ / 4`.
    pub harnack: bool,
    pub history_error: f64,
    pub min_excess: f64,
    /// `min_{[1/4, 3/4]} (u - y) - ‖u - y‖ / 4`.
    pub harnack_margin: f64,
}

impl ConeCertificate {
    pub fn passed(&self) -> bool {
        self.history_pinned && self.nonneg && self.harnack
    }
}

/// Checks `u ∈ K_y` on the grid with absolute slack `tol`. `y` must share `u`'s nodes.
pub fn cone_verify(u: &GridFunction, y: &GridFunction, tol: f64) -> Result<ConeCertificate> {
    if u.nodes() != y.nodes() {
        return Err(Error::InvalidArgument("u and y must share their grid".into()));
    }
    let z = u.zero_index();
    let history_error = (0..=z)
        .map(|i| (u.values()[i] - y.values()[i]).abs())
        .fold(0.0, f64::max);
    let w = |t: f64| u.eval(t) - y.eval(t);
    let mut min_excess = f64::INFINITY;
    let mut norm: f64 = 0.0;
    let mut band_min = w(0.25).min(w(0.75));
    for (&t, (&a, &b)) in u.nodes().iter().zip(u.values().iter().zip(y.values())).skip(z) {
        let d = a - b;
        min_excess = min_excess.min(d);
        norm = norm.max(d.abs());
        if (0.25..=0.75).contains(&t) {
            band_min = band_min.min(d);
        }
    }
    let harnack_margin = band_min - 0.25 * norm;
    Ok(ConeCertificate {
        history_pinned: history_error <= tol,
        nonneg: min_excess >= -tol,
        harnack: harnack_margin >= -tol,
        history_error,
        min_excess,
        harnack_margin,
    })
}
