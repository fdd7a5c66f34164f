//! TOML problem files.
//!
//! ```text
//! file     = { pair | table } ;
//! pair     = key "=" value ;
//! key      = "schema" | "name" | "kind" | "r" | "sigma_slope" | "sigma_offset"
//!          | "omega" | "f" | "g" | "h" | "h_jumps" | "majorant" | "minorant"
//!          | "singular_at_zero" ;
//! table    = ( "[[gamma]]" | "[[Gamma]]" ) { curve_pair } ;
//! curve_pair = ( "value" | "second_derivative" | "psi" | "label" ) "=" string
//!          | ( "a" | "b" | "epsilon" ) "=" number ;
//! ```
//!
//! `schema` must be `"hameig-problem/1"`. `kind` is `"general"` (default, needs `f`
//! in `t, u, v`) or `"gh-split"` (needs `g` in `t, v` and `h` in `u`; each entry of
//! `h_jumps` adds a constant `γ` curve). `omega`, `majorant`, `minorant` and curve
//! expressions use the variable `t`. Every expression may use the constant `rho`.
//! A missing `second_derivative` is replaced by a central difference.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::{BoundData, Deviation, DiscontinuityCurve, ProblemSpec};
use crate::error::{Error, Result};
use crate::kernel::ScalarFn;
use crate::quadrature::Singularity;

pub const SCHEMA: &str = "hameig-problem/1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    #[default]
    General,
    GhSplit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub value: String,
    pub second_derivative: Option<String>,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    pub epsilon: Option<f64>,
    pub psi: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub kind: ProblemKind,
    pub r: f64,
    #[serde(default = "one")]
    pub sigma_slope: f64,
    #[serde(default)]
    pub sigma_offset: f64,
    pub omega: String,
    pub f: Option<String>,
    pub g: Option<String>,
    pub h: Option<String>,
    #[serde(default)]
    pub h_jumps: Vec<f64>,
    pub majorant: Option<String>,
    pub minorant: Option<String>,
    /// Exponent `α ∈ (-1, 0)` of an integrable `t^α` singularity of `f` at `t = 0`.
    pub singular_at_zero: Option<f64>,
    #[serde(default)]
    pub gamma: Vec<CurveConfig>,
    #[serde(default, rename = "Gamma")]
    pub big_gamma: Vec<CurveConfig>,
}

fn one() -> f64 {
    1.0
}

fn scalar(src: &str, rho: f64, what: &str) -> Result<ScalarFn> {
    Expr::parse(src, &["t"], &[("rho", rho)])
        .map(Expr::into_scalar)
        .map_err(|e| Error::Config(format!("{what}: {e}")))
}

/// Central second difference kept inside `[a, b]`.
fn second_difference(value: ScalarFn, a: f64, b: f64) -> ScalarFn {
    let h = 1e-4 * (b - a);
    Arc::new(move |t: f64| {
        let c = t.clamp(a + h, b - h);
        (value(c + h) - 2.0 * value(c) + value(c - h)) / (h * h)
    })
}

fn build_curve(cfg: &CurveConfig, rho: f64, default_label: String) -> Result<DiscontinuityCurve> {
    let value = scalar(&cfg.value, rho, "curve value")?;
    let second = match &cfg.second_derivative {
        Some(src) => scalar(src, rho, "curve second_derivative")?,
        None => second_difference(value.clone(), cfg.a, cfg.b),
    };
    let mut curve = DiscontinuityCurve::new(cfg.a, cfg.b, value, second)?
        .with_label(cfg.label.clone().unwrap_or(default_label));
    if let Some(eps) = cfg.epsilon {
        curve = curve.with_epsilon(eps);
    }
    if let Some(psi) = &cfg.psi {
        curve = curve.with_psi(scalar(psi, rho, "curve psi")?);
    }
    Ok(curve)
}

impl ProblemConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ProblemConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(Error::Config(format!("schema `{}` is not `{SCHEMA}`", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Builds the problem for radius `rho`. Bounds are `None` unless both the
    /// majorant and the minorant are present.
    pub fn build(&self, rho: f64) -> Result<(ProblemSpec, Option<BoundData>)> {
        let consts = [("rho", rho)];
        let f = match self.kind {
            ProblemKind::General => {
                let src = self.f.as_deref().ok_or_else(|| Error::Config("`f` is required".into()))?;
                Expr::parse(src, &["t", "u", "v"], &consts)
                    .map_err(|e| Error::Config(format!("f: {e}")))?
                    .into_ternary()
            }
            ProblemKind::GhSplit => {
                let g = self.g.as_deref().ok_or_else(|| Error::Config("`g` is required for gh-split".into()))?;
                let h = self.h.as_deref().ok_or_else(|| Error::Config("`h` is required for gh-split".into()))?;
                let g = Expr::parse(g, &["t", "v"], &consts).map_err(|e| Error::Config(format!("g: {e}")))?;
                let h = Expr::parse(h, &["u"], &consts).map_err(|e| Error::Config(format!("h: {e}")))?;
                Arc::new(move |t: f64, u: f64, v: f64| g.eval(&[t, v]) + h.eval(&[u]))
            }
        };
        if self.kind == ProblemKind::General && (self.g.is_some() || self.h.is_some() || !self.h_jumps.is_empty()) {
            return Err(Error::Config("`g`, `h` and `h_jumps` need kind = \"gh-split\"".into()));
        }
        let sigma = Deviation::Affine {
            slope: self.sigma_slope,
            offset: self.sigma_offset,
        };
        let omega = scalar(&self.omega, rho, "omega")?;
        let mut spec = ProblemSpec::new(self.name.clone(), f, sigma, omega, self.r)?;
        for (i, c) in self.gamma.iter().enumerate() {
            spec.gamma_curves.push(build_curve(c, rho, format!("gamma_{}: {}", i + 1, c.value))?);
        }
        for &jump in &self.h_jumps {
            let curve = DiscontinuityCurve::new(0.0, 1.0, Arc::new(move |_| jump), Arc::new(|_| 0.0))?
                .with_label(format!("h jump at u = {jump}"));
            spec.gamma_curves.push(curve);
        }
        for (i, c) in self.big_gamma.iter().enumerate() {
            spec.big_gamma_curves.push(build_curve(c, rho, format!("Gamma_{}: {}", i + 1, c.value))?);
        }
        if let Some(alpha) = self.singular_at_zero {
            if !(alpha > -1.0 && alpha < 0.0) {
                return Err(Error::Config(format!("singular_at_zero = {alpha} must lie in (-1, 0)")));
            }
            spec.singularities.push(Singularity { at: 0.0, exponent: alpha });
        }
        spec.validate(256).map_err(|e| Error::Config(e.to_string()))?;

        let bounds = match (&self.majorant, &self.minorant) {
            (Some(m), Some(d)) => Some(
                BoundData::new(rho, scalar(m, rho, "majorant")?, scalar(d, rho, "minorant")?)?
                    .with_labels(format!("M_ρ(t)={m}"), format!("δ_ρ(t)={d}")),
            ),
            _ => None,
        };
        Ok((spec, bounds))
    }
}
