//! Breakpoint- and singularity-aware composite quadrature, the piecewise
//! linear state representation, and the Hammerstein operator built on them.

mod grid;
pub(crate) mod hammerstein;

pub use grid::GridFunction;
pub use hammerstein::{hammerstein_apply, HammersteinEval};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Composite rule applied on each breakpoint-delimited piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    #[default]
    Simpson,
    Gauss7,
}

/// Integrable power singularity `|s - at|^exponent` at an endpoint, `-1 < exponent < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub at: f64,
    pub exponent: f64,
}

impl Singularity {
    /// Power of the substitution `s = at ± τ^m` that cancels the singularity.
    fn power(&self) -> f64 {
        1.0 / (1.0 + self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Panels per piece; for [`integrate`] this is the starting count before halving.
    pub panels: usize,
    pub rule: Rule,
    pub singularities: Vec<Singularity>,
    /// Absolute tolerance for the panel-halving error estimate.
    pub tol: f64,
    /// Bisection tolerance (in `s`) when locating curve crossings.
    pub crossing_tol: f64,
    /// Cap on the number of panel doublings per piece in [`integrate`].
    pub max_doublings: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            panels: 4,
            rule: Rule::Simpson,
            singularities: Vec::new(),
            tol: 1e-10,
            crossing_tol: 1e-12,
            max_doublings: 14,
        }
    }
}

impl QuadConfig {
    pub fn with_singularities(mut self, singularities: Vec<Singularity>) -> Self {
        self.singularities = singularities;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 4 {
            return Err(Error::InvalidArgument(format!("panels must be >= 4, got {}", self.panels)));
        }
        if !(self.tol > 0.0) || !(self.crossing_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive".into()));
        }
        for sing in &self.singularities {
            if !(sing.exponent > -1.0 && sing.exponent < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "singularity exponent must lie in (-1, 0), got {}",
                    sing.exponent
                )));
            }
        }
        Ok(())
    }
}

/// Quadrature result with its panel-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// 7-point Gauss-Legendre nodes and weights on [-1, 1].
const GAUSS7: [(f64, f64); 7] = [
    (0.0, 0.417_959_183_673_469_4),
    (0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (-0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (-0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
    (-0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
];

/// How piece endpoints are sampled by the Simpson rule.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Ends {
    /// Exact endpoints, except a substituted singular end which is moved inward slightly.
    Exact,
    /// Both endpoints moved inward by `max(rel * width, abs)` in `s` (one-sided limits).
    Inward { rel: f64, abs: f64 },
}

/// A piece `[lo, hi]` in the original variable with an optional substitution.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub substitution: Option<Singularity>,
}

impl Piece {
    /// Integration variable for `s`.
    #[inline]
    fn to_var(&self, s: f64) -> f64 {
        match self.substitution {
            None => s,
            Some(sing) => (s - sing.at).abs().powf(1.0 / sing.power()),
        }
    }

    /// `(s, ds/dτ)` at the integration variable `x`.
    #[inline]
    fn map(&self, x: f64) -> (f64, f64) {
        match self.substitution {
            None => (x, 1.0),
            Some(sing) => {
                let m = sing.power();
                let jac = m * x.powf(m - 1.0);
                let offset = x.powf(m);
                if self.lo >= sing.at {
                    (sing.at + offset, jac)
                } else {
                    (sing.at - offset, jac)
                }
            }
        }
    }

    /// Appends the quadrature points `(s, weight)` of `panels` composite panels of `rule`.
    pub(crate) fn points(&self, panels: usize, rule: Rule, ends: Ends, out: &mut Vec<(f64, f64)>) {
        let width_s = self.hi - self.lo;
        if !(width_s > 0.0) {
            return;
        }
        if let Ends::Inward { abs, .. } = ends {
            if width_s <= 8.0 * abs {
                out.push((0.5 * (self.lo + self.hi), width_s));
                return;
            }
        }
        let (x_lo, x_hi) = {
            let (a, b) = (self.to_var(self.lo), self.to_var(self.hi));
            (a.min(b), b.max(a))
        };
        let h = (x_hi - x_lo) / panels as f64;
        let mut push = |x: f64, w: f64| {
            let (s, jac) = self.map(x);
            out.push((s, w * jac));
        };
        match rule {
            Rule::Simpson => {
                let cap = width_s / (8.0 * panels as f64);
                let d_s = match ends {
                    Ends::Exact => 1e-9 * cap,
                    Ends::Inward { rel, abs } => (rel * width_s).max(abs).min(cap),
                };
                let (mut left, mut right) = (x_lo, x_hi);
                match ends {
                    Ends::Inward { .. } => {
                        let (a, b) = (self.to_var(self.lo + d_s), self.to_var(self.hi - d_s));
                        left = a.min(b);
                        right = a.max(b);
                    }
                    Ends::Exact => {
                        if let Some(sing) = self.substitution {
                            if self.lo == sing.at {
                                left = self.to_var(self.lo + d_s);
                            } else if self.hi == sing.at {
                                left = self.to_var(self.hi - d_s);
                            }
                        }
                    }
                }
                let w = h / 6.0;
                push(left, w);
                push(right, w);
                for i in 0..panels {
                    let x0 = x_lo + i as f64 * h;
                    push(x0 + 0.5 * h, 4.0 * w);
                    if i > 0 {
                        push(x0, 2.0 * w);
                    }
                }
            }
            Rule::Gauss7 => {
                for i in 0..panels {
                    let mid = x_lo + (i as f64 + 0.5) * h;
                    for &(x, w) in &GAUSS7 {
                        push(mid + 0.5 * h * x, 0.5 * h * w);
                    }
                }
            }
        }
    }

    /// Applies the rule to `g`; the first non-finite sample location is the error.
    pub(crate) fn apply<G: FnMut(f64) -> f64>(
        &self,
        g: &mut G,
        panels: usize,
        rule: Rule,
        ends: Ends,
    ) -> std::result::Result<f64, f64> {
        let mut pts = Vec::with_capacity(evaluations_per(rule, panels));
        self.points(panels, rule, ends, &mut pts);
        let mut sum = 0.0;
        for (s, w) in pts {
            let v = g(s);
            if !v.is_finite() {
                return Err(s);
            }
            sum += w * v;
        }
        Ok(sum)
    }
}

pub(crate) fn evaluations_per(rule: Rule, panels: usize) -> usize {
    match rule {
        Rule::Simpson => 2 * panels + 1,
        Rule::Gauss7 => 7 * panels,
    }
}

/// Splits `[a, b]` at `breakpoints`. A piece gets the substitution of the flagged
/// singularity nearest to it when that singularity lies within half of `domain`.
pub(crate) fn pieces(
    a: f64,
    b: f64,
    breakpoints: &[f64],
    singularities: &[Singularity],
    domain: (f64, f64),
) -> Vec<Piece> {
    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2 + singularities.len());
    cuts.push(a);
    cuts.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.extend(singularities.iter().map(|s| s.at).filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let half = 0.5 * (domain.1 - domain.0);
    cuts.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let substitution = singularities
                .iter()
                .filter(|s| s.at >= domain.0 && s.at <= domain.1)
                .min_by(|x, y| (mid - x.at).abs().total_cmp(&(mid - y.at).abs()))
                .filter(|s| (mid - s.at).abs() <= half)
                .copied();
            Piece {
                lo: w[0],
                hi: w[1],
                substitution,
            }
        })
        .collect()
}

/// Integrates `g` over `[a, b]`, splitting at `breakpoints` and doubling panels on
/// each piece until the halving estimate meets its share of `cfg.tol`.
pub fn integrate<G: FnMut(f64) -> f64>(mut g: G, a: f64, b: f64, breakpoints: &[f64], cfg: &QuadConfig) -> Result<Integral> {
    cfg.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("integration range must satisfy a < b, got [{a}, {b}]")));
    }
    if breakpoints.windows(2).any(|w| w[0] > w[1]) || breakpoints.iter().any(|&x| x < a || x > b) {
        return Err(Error::InvalidArgument("breakpoints must be sorted and lie within [a, b]".into()));
    }
    let mut total = Integral {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    let order_factor = match cfg.rule {
        Rule::Simpson => 15.0,
        Rule::Gauss7 => 1.0,
    };
    for piece in pieces(a, b, breakpoints, &cfg.singularities, (a, b)) {
        let share = cfg.tol * (piece.hi - piece.lo) / (b - a);
        let mut n = cfg.panels;
        let mut coarse = piece
            .apply(&mut g, n, cfg.rule, Ends::Exact)
            .map_err(|location| Error::Integration { location })?;
        total.evaluations += evaluations_per(cfg.rule, n);
        let mut doublings = 0;
        loop {
            n *= 2;
            let fine = piece
                .apply(&mut g, n, cfg.rule, Ends::Exact)
                .map_err(|location| Error::Integration { location })?;
            total.evaluations += evaluations_per(cfg.rule, n);
            doublings += 1;
            let err = (fine - coarse).abs() / order_factor;
            if err <= share || doublings >= cfg.max_doublings {
                total.value += fine;
                total.error += err;
                break;
            }
            coarse = fine;
        }
    }
    Ok(total)
}

/// Locates a sign change of `h` on `[lo, hi]` (`h(lo)` and `h(hi)` of opposite sign)
/// by bisection; returns the bracket midpoint once the bracket is below `tol`.
pub(crate) fn bisect_root<H: FnMut(f64) -> f64>(mut h: H, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut h_lo = h(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h(mid);
        if h_mid == 0.0 {
            return mid;
        }
        if (h_mid > 0.0) == (h_lo > 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
