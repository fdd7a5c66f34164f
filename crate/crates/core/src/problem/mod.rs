//! Boundary value problem data and the computable hypothesis checks.

mod checks;
pub mod config;
pub mod expr;

pub use checks::{
    abstract_lambda_threshold, check_admissible_curve, check_condition_d, check_majorant, check_minorant,
    compute_delta_bar, lambda_bar_threshold, lambda_samples, run_hypothesis_checks, AdmissibilityMode,
    AdmissibilityResult, CheckItem, CheckStatus, ConditionDResult, DeltaBar, HypothesisReport, SamplingPlan,
    Witness,
};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{GreenKernel, ScalarFn, VertexFunction};
use crate::quadrature::Singularity;

/// `f(t, u, v)` with `u` the state and `v` the deviated state `u(σ(t))`.
pub type Nonlinearity = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// The deviated argument `σ : [0, 1] -> [-r, 1]`.
#[derive(Clone)]
pub enum Deviation {
    /// `σ(t) = slope * t + offset`.
    Affine { slope: f64, offset: f64 },
    /// Arbitrary continuous map; `unit_slope` records `σ' ≡ ±1` when known.
    General { map: ScalarFn, unit_slope: Option<f64> },
}

impl fmt::Debug for Deviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deviation::Affine { slope, offset } => write!(f, "Affine({slope} t + {offset})"),
            Deviation::General { unit_slope, .. } => write!(f, "General(unit_slope = {unit_slope:?})"),
        }
    }
}

impl Deviation {
    pub fn identity() -> Self {
        Deviation::Affine { slope: 1.0, offset: 0.0 }
    }

    /// `σ(t) = t - r`.
    pub fn delay(r: f64) -> Self {
        Deviation::Affine { slope: 1.0, offset: -r }
    }

    /// `σ(t) = 1 - r - t`.
    pub fn reflection(r: f64) -> Self {
        Deviation::Affine {
            slope: -1.0,
            offset: 1.0 - r,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Deviation::Affine { slope, offset } => slope * t + offset,
            Deviation::General { map, .. } => map(t),
        }
    }

    /// `Some(±1)` when `σ' ≡ ±1`.
    pub fn unit_slope(&self) -> Option<f64> {
        match self {
            Deviation::Affine { slope, .. } if slope.abs() == 1.0 => Some(*slope),
            Deviation::Affine { .. } => None,
            Deviation::General { unit_slope, .. } => *unit_slope,
        }
    }

    /// Points of `[lo, hi]` mapped onto one of the sorted `targets`; used to place
    /// quadrature breakpoints where `u ∘ σ` has kinks.
    pub(crate) fn preimages_in(&self, targets: &[f64], lo: f64, hi: f64, tol: f64, out: &mut Vec<f64>) {
        let (s_lo, s_hi) = (self.eval(lo), self.eval(hi));
        let (min, max) = (s_lo.min(s_hi), s_lo.max(s_hi));
        let start = targets.partition_point(|&x| x <= min);
        let end = targets.partition_point(|&x| x < max);
        for &x in &targets[start..end] {
            let t = match self {
                Deviation::Affine { slope, offset } => (x - offset) / slope,
                Deviation::General { .. } => crate::quadrature::bisect_root(|t| self.eval(t) - x, lo, hi, tol),
            };
            if t > lo && t < hi {
                out.push(t);
            }
        }
    }
}

/// A curve along which `f` may jump in one of its state arguments.
#[derive(Clone)]
pub struct DiscontinuityCurve {
    pub a: f64,
    pub b: f64,
    pub value: ScalarFn,
    pub second_derivative: ScalarFn,
    /// Half-width of the state band around the curve in the transversality test.
    pub epsilon: f64,
    /// Caller-supplied `ψ`; defaults are chosen by the checker when absent.
    pub psi: Option<ScalarFn>,
    pub label: String,
}

impl fmt::Debug for DiscontinuityCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscontinuityCurve")
            .field("label", &self.label)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

impl DiscontinuityCurve {
    pub fn new(a: f64, b: f64, value: ScalarFn, second_derivative: ScalarFn) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::InvalidArgument(format!("curve interval [{a}, {b}] must satisfy 0 <= a < b <= 1")));
        }
        Ok(Self {
            a,
            b,
            value,
            second_derivative,
            epsilon: 1e-2,
            psi: None,
            label: String::new(),
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_psi(mut self, psi: ScalarFn) -> Self {
        self.psi = Some(psi);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }

    /// Checks `γ >= 0`, `ε > 0` and `ψ > 0` on `samples` midpoints of `[a, b]`.
    pub fn validate(&self, samples: usize) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("curve `{}`: epsilon must be positive", self.label)));
        }
        for t in midpoints(self.a, self.b, samples) {
            let g = (self.value)(t);
            if !(g >= 0.0) {
                return Err(Error::InvalidArgument(format!("curve `{}` is negative at t = {t}: {g}", self.label)));
            }
            if let Some(psi) = &self.psi {
                if !(psi(t) > 0.0) {
                    return Err(Error::InvalidArgument(format!("curve `{}`: psi must be positive at t = {t}", self.label)));
                }
            }
        }
        Ok(())
    }
}

/// Midpoints of `n` equal cells of `[a, b]`.
pub(crate) fn midpoints(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (b - a) / n as f64;
    (0..n).map(move |i| a + (i as f64 + 0.5) * h)
}

/// Full problem data for `-u'' = λ f(t, u, u(σ(t)))`, `u = ω` on `[-r, 0]`, `u(1) = 0`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub f: Nonlinearity,
    pub sigma: Deviation,
    pub omega: ScalarFn,
    pub r: f64,
    /// Jumps in the second argument of `f`.
    pub gamma_curves: Vec<DiscontinuityCurve>,
    /// Jumps in the third argument of `f`.
    pub big_gamma_curves: Vec<DiscontinuityCurve>,
    /// Integrable singularities of `s -> f(s, ·, ·)` at the ends of `[0, 1]`.
    pub singularities: Vec<Singularity>,
    /// Free-form provenance notes copied into reports.
    pub notes: Vec<String>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("sigma", &self.sigma)
            .field("r", &self.r)
            .field("gamma_curves", &self.gamma_curves.len())
            .field("big_gamma_curves", &self.big_gamma_curves.len())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(name: impl Into<String>, f: Nonlinearity, sigma: Deviation, omega: ScalarFn, r: f64) -> Result<Self> {
        GreenKernel::new(r)?;
        Ok(Self {
            name: name.into(),
            f,
            sigma,
            omega,
            r,
            gamma_curves: Vec::new(),
            big_gamma_curves: Vec::new(),
            singularities: Vec::new(),
            notes: Vec::new(),
        })
    }

    /// `f` on its domain; negative states are clamped to zero.
    #[inline]
    pub fn f_at(&self, t: f64, u: f64, v: f64) -> f64 {
        (self.f)(t, u.max(0.0), v.max(0.0))
    }

    pub fn kernel(&self) -> GreenKernel {
        GreenKernel::new(self.r).expect("r validated at construction")
    }

    pub fn vertex(&self) -> Result<VertexFunction> {
        VertexFunction::new(self.omega.clone(), self.r)
    }

    /// Checks the sampled invariants: `σ([0, 1]) ⊂ [-r, 1]`, `ω >= 0`, curves well formed.
    pub fn validate(&self, samples: usize) -> Result<()> {
        let tol = 1e-12;
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            let s = self.sigma.eval(t);
            if !(s >= -self.r - tol && s <= 1.0 + tol) {
                return Err(Error::InvalidArgument(format!("sigma({t}) = {s} leaves [-r, 1]")));
            }
        }
        self.vertex()?;
        for c in self.gamma_curves.iter().chain(&self.big_gamma_curves) {
            c.validate(samples)?;
        }
        Ok(())
    }
}

/// Majorant `M_ρ`, minorant `δ_ρ` and the radius `ρ` they were built for.
#[derive(Clone)]
pub struct BoundData {
    pub rho: f64,
    pub majorant: ScalarFn,
    pub minorant: ScalarFn,
    pub majorant_label: String,
    pub minorant_label: String,
    /// Integrable singularities of the minorant on `[1/4, 3/4]`, if any.
    pub minorant_singularities: Vec<Singularity>,
}

impl fmt::Debug for BoundData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundData")
            .field("rho", &self.rho)
            .field("majorant", &self.majorant_label)
            .field("minorant", &self.minorant_label)
            .finish_non_exhaustive()
    }
}

impl BoundData {
    pub fn new(rho: f64, majorant: ScalarFn, minorant: ScalarFn) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain {
                what: "rho",
                value: rho,
                domain: "(0, inf)",
            });
        }
        Ok(Self {
            rho,
            majorant,
            minorant,
            majorant_label: "M_ρ(t)".into(),
            minorant_label: "δ_ρ(t)".into(),
            minorant_singularities: Vec::new(),
        })
    }

    pub fn with_labels(mut self, majorant: impl Into<String>, minorant: impl Into<String>) -> Self {
        self.majorant_label = majorant.into();
        self.minorant_label = minorant.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_slopes() {
        assert_eq!(Deviation::delay(0.5).unit_slope(), Some(1.0));
        assert_eq!(Deviation::reflection(0.2).unit_slope(), Some(-1.0));
        assert_eq!(Deviation::Affine { slope: 0.5, offset: 0.0 }.unit_slope(), None);
        assert_eq!(Deviation::reflection(0.2).eval(0.3), 0.5);
    }

    #[test]
    fn preimages_of_nodes() {
        let mut out = Vec::new();
        Deviation::reflection(0.0).preimages_in(&[0.1, 0.25, 0.5, 0.8], 0.2, 0.6, 1e-12, &mut out);
        assert_eq!(out.len(), 1);
        assert!((out[0] - 0.5).abs() < 1e-15);
        let general = Deviation::General {
            map: Arc::new(|t: f64| t * t),
            unit_slope: None,
        };
        let mut out = Vec::new();
        general.preimages_in(&[0.25], 0.0, 1.0, 1e-14, &mut out);
        assert!((out[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn curve_validation() {
        let c = DiscontinuityCurve::new(0.0, 1.0, Arc::new(|t| t * t), Arc::new(|_| 2.0)).unwrap();
        assert!(c.validate(64).is_ok());
        let neg = DiscontinuityCurve::new(0.0, 1.0, Arc::new(|t| t - 0.5), Arc::new(|_| 0.0)).unwrap();
        assert!(neg.validate(64).is_err());
        assert!(DiscontinuityCurve::new(0.5, 0.5, Arc::new(|_| 0.0), Arc::new(|_| 0.0)).is_err());
        let bad_psi = c.clone().with_psi(Arc::new(|_| 0.0));
        assert!(bad_psi.validate(8).is_err());
    }

    #[test]
    fn sigma_range_is_checked() {
        let f: Nonlinearity = Arc::new(|_, _, _| 1.0);
        let p = ProblemSpec::new("bad", f, Deviation::delay(0.5), Arc::new(|_| 1.0), 0.25).unwrap();
        assert!(p.validate(16).is_err());
    }
}
