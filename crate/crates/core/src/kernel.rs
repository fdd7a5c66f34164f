//! Dirichlet Green's function, its zero extension to the history interval,
//! and the vertex of the affine cone.

use std::sync::Arc;

use crate::error::{check_range, Result};

/// Shared scalar evaluator `t -> value`.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Green's function of `-u'' = h`, `u(0) = u(1) = 0`.
#[inline]
pub fn green(t: f64, s: f64) -> f64 {
    if t <= s {
        t * (1.0 - s)
    } else {
        (1.0 - t) * s
    }
}

/// Checked form of [`green`].
pub fn green_eval(t: f64, s: f64) -> Result<f64> {
    check_range("t", t, 0.0, 1.0, "[0, 1]")?;
    check_range("s", s, 0.0, 1.0, "[0, 1]")?;
    Ok(green(t, s))
}

/// `Φ(s) = s(1 - s)`, the upper bound of `G(·, s)`.
#[inline]
pub fn phi_bound(s: f64) -> f64 {
    s * (1.0 - s)
}

pub fn phi_upper(s: f64) -> Result<f64> {
    check_range("s", s, 0.0, 1.0, "[0, 1]")?;
    Ok(phi_bound(s))
}

/// The kernel `k(t, s)` on `[-r, 1] x [0, 1]`: `G(t, s)` for `t >= 0` and zero on the history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKernel {
    r: f64,
}

impl GreenKernel {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(crate::Error::Domain {
                what: "r",
                value: r,
                domain: "[0, inf)",
            });
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Unchecked evaluation for inner loops.
    #[inline]
    pub fn k(&self, t: f64, s: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            green(t, s)
        }
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        check_range("t", t, -self.r, 1.0, "[-r, 1]")?;
        check_range("s", s, 0.0, 1.0, "[0, 1]")?;
        Ok(self.k(t, s))
    }
}

/// Number of samples kept for plotting and for `‖ω‖` on `[-r, 0]`.
pub const HISTORY_SAMPLES: usize = 1024;

/// The vertex `y`: the history `ω` on `[-r, 0]` glued to `(1 - t) ω(0)` on `(0, 1]`.
#[derive(Clone)]
pub struct VertexFunction {
    omega: ScalarFn,
    omega0: f64,
    r: f64,
    samples: Vec<(f64, f64)>,
}

impl std::fmt::Debug for VertexFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VertexFunction")
            .field("r", &self.r)
            .field("omega0", &self.omega0)
            .finish_non_exhaustive()
    }
}

impl VertexFunction {
    /// Builds the vertex, rejecting histories that are negative or non-finite at a sample.
    pub fn new(omega: ScalarFn, r: f64) -> Result<Self> {
        GreenKernel::new(r)?;
        let omega0 = omega(0.0);
        let n = if r > 0.0 { HISTORY_SAMPLES } else { 1 };
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let t = if n == 1 { 0.0 } else { -r + r * i as f64 / (n - 1) as f64 };
            let w = if i + 1 == n { omega0 } else { omega(t) };
            if !(w >= 0.0 && w.is_finite()) {
                return Err(crate::Error::InvalidArgument(format!(
                    "history must be finite and non-negative, got omega({t}) = {w}"
                )));
            }
            samples.push((t, w));
        }
        Ok(Self {
            omega,
            omega0,
            r,
            samples,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.omega0
        } else {
            (self.omega)(t)
        }
    }

    /// `y(t)` without domain checks.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            self.omega(t)
        } else {
            (1.0 - t) * self.omega0
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_range("t", t, -self.r, 1.0, "[-r, 1]")?;
        Ok(self.value(t))
    }

    /// Dense samples of the history, ending at `(0, ω(0))`.
    pub fn history_samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// `‖ω‖_{[-r,0]}` estimated from the dense samples.
    pub fn history_norm(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, &(_, w)| m.max(w.abs()))
    }
}
