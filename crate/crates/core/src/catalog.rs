//! Built-in problems, including the delay problem with the rationals-indexed jump
//! function `φ(x) = Σ_{q_n < x} 2^{-n}`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::ScalarFn;
use crate::problem::{BoundData, Deviation, DiscontinuityCurve, Nonlinearity, ProblemSpec};
use crate::quadrature::Singularity;

/// Truncation depth used when none is given; `2^-40` is far below solver tolerances.
pub const DEFAULT_TERMS: usize = 40;

/// `q_1 = 0`, `q_{2k} = c_k`, `q_{2k+1} = -c_k`, with `c_k` the Calkin-Wilf sequence
/// `1, 1/2, 2, 1/3, 3/2, 2/3, 3, 1/4, ...`.
#[derive(Debug, Clone)]
pub struct RationalEnumeration {
    /// `(numerator, denominator)` of `q_1..q_N`.
    terms: Vec<(i64, i64)>,
    /// `q_n` sorted ascending with the running sum of their weights `2^-n`.
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl RationalEnumeration {
    pub fn new(depth: usize) -> Result<Self> {
        if depth == 0 || depth > 1000 {
            return Err(Error::InvalidArgument(format!("truncation depth must be in 1..=1000, got {depth}")));
        }
        let mut terms = Vec::with_capacity(depth);
        terms.push((0, 1));
        let (mut a, mut b) = (1i64, 1i64);
        while terms.len() < depth {
            terms.push((a, b));
            if terms.len() < depth {
                terms.push((-a, b));
            }
            // next Calkin-Wilf term: 1 / (2 floor(x) - x + 1)
            let fl = a / b;
            let (na, nb) = (b, 2 * fl * b - a + b);
            a = na;
            b = nb;
        }
        let mut weighted: Vec<(f64, f64)> = terms
            .iter()
            .enumerate()
            .map(|(i, &(p, q))| (p as f64 / q as f64, 0.5f64.powi(i as i32 + 1)))
            .collect();
        weighted.sort_by(|x, y| x.0.total_cmp(&y.0));
        let sorted = weighted.iter().map(|w| w.0).collect();
        let mut prefix = Vec::with_capacity(weighted.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for (_, w) in &weighted {
            acc += w;
            prefix.push(acc);
        }
        Ok(Self { terms, sorted, prefix })
    }

    pub fn depth(&self) -> usize {
        self.terms.len()
    }

    /// `q_n` for `1 <= n <= depth`.
    pub fn q(&self, n: usize) -> f64 {
        let (p, q) = self.terms[n - 1];
        p as f64 / q as f64
    }

    pub fn q_ratio(&self, n: usize) -> (i64, i64) {
        self.terms[n - 1]
    }

    /// `φ_N(x) = Σ_{n <= N, q_n < x} 2^-n`.
    #[inline]
    pub fn phi(&self, x: f64) -> f64 {
        self.prefix[self.sorted.partition_point(|&q| q < x)]
    }

    pub fn describe(&self) -> String {
        format!(
            "rational enumeration: q_1 = 0, q_2k = c_k, q_2k+1 = -c_k (c_k Calkin-Wilf), truncated at N = {}",
            self.depth()
        )
    }
}

pub fn phi_eval(x: f64, depth: usize) -> Result<f64> {
    Ok(RationalEnumeration::new(depth)?.phi(x))
}

/// Catalog entry names.
pub const NAMES: [&str; 4] = ["example-delay-phi", "eigendir", "gh-split", "const-f"];

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
}

pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "example-delay-phi",
            summary: "-u'' = λ((2 - φ(u - t²))/√t + φ(u(t - 1/2) - t²) u³), u = √(1 + 2t) on [-1/2, 0], u(1) = 0",
        },
        CatalogEntry {
            name: "eigendir",
            summary: "u'' = λ f̃(u), u(0) = u(1) = 0 with f̃ ≡ 1 (solved for -u)",
        },
        CatalogEntry {
            name: "gh-split",
            summary: "-u'' = λ(g(t, u(t - 1/4)) + h(u)), g = 1 + t v, h(u) = [u >= 1/2] + u, u = 1 + t on [-1/4, 0]",
        },
        CatalogEntry {
            name: "const-f",
            summary: "-u'' = λ, u(0) = u(1) = 0; n(λ) = λ/8",
        },
    ]
}

/// Looks up a catalog problem for radius `rho`; `depth` truncates `φ`.
pub fn lookup(name: &str, rho: f64, depth: usize) -> Result<(ProblemSpec, BoundData)> {
    match name {
        "example-delay-phi" => example_problem(rho, depth),
        "eigendir" => eigendir(rho),
        "gh-split" => gh_split(rho),
        "const-f" => const_f(rho),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// The delay problem with the `φ` nonlinearity and its bounds for radius `rho`.
pub fn example_problem(rho: f64, depth: usize) -> Result<(ProblemSpec, BoundData)> {
    let enumeration = Arc::new(RationalEnumeration::new(depth)?);
    let phi = enumeration.clone();
    let f: Nonlinearity = Arc::new(move |t: f64, u: f64, v: f64| {
        let tt = t * t;
        (2.0 - phi.phi(u - tt)) / t.sqrt() + phi.phi(v - tt) * u * u * u
    });
    let omega: ScalarFn = Arc::new(|t: f64| (1.0 + 2.0 * t).max(0.0).sqrt());
    let mut spec = ProblemSpec::new("example-delay-phi", f, Deviation::delay(0.5), omega, 0.5)?;
    for n in 1..=enumeration.depth() {
        let q = enumeration.q(n);
        // t² + q_n is a jump location of f only where it is non-negative
        let a = (-q).max(0.0).sqrt();
        if a >= 1.0 {
            continue;
        }
        let (p, d) = enumeration.q_ratio(n);
        let curve = |label: String| -> Result<DiscontinuityCurve> {
            Ok(
                DiscontinuityCurve::new(a, 1.0, Arc::new(move |t: f64| (t * t + q).max(0.0)), Arc::new(|_| 2.0))?
                    .with_label(label),
            )
        };
        spec.gamma_curves.push(curve(format!("gamma_{n}: t^2 + {p}/{d}"))?);
        spec.big_gamma_curves.push(curve(format!("Gamma_{n}: t^2 + {p}/{d}"))?);
    }
    spec.singularities.push(Singularity { at: 0.0, exponent: -0.5 });
    spec.notes.push(enumeration.describe());

    let bounds = BoundData::new(
        rho,
        Arc::new(move |t: f64| 2.0 / t.sqrt() + (rho + 1.0).powi(3)),
        Arc::new(|t: f64| 1.0 / t.sqrt()),
    )?
    .with_labels(format!("M_ρ(t)=2/√t+{}", fmt_num((rho + 1.0).powi(3))), "δ_ρ(t)=δ(t)=1/√t");
    spec.notes.push("majorant M_ρ(t)=2/√t+(ρ+1)³ since 0 <= φ <= 1 and u, v <= ρ + 1".into());
    Ok((spec, bounds))
}

fn unit_bounds(rho: f64) -> Result<BoundData> {
    Ok(BoundData::new(rho, Arc::new(|_| 1.0), Arc::new(|_| 1.0))?.with_labels("M_ρ(t)=1", "δ_ρ(t)=1"))
}

fn const_f(rho: f64) -> Result<(ProblemSpec, BoundData)> {
    let spec = ProblemSpec::new("const-f", Arc::new(|_, _, _| 1.0), Deviation::identity(), Arc::new(|_| 0.0), 0.0)?;
    Ok((spec, unit_bounds(rho)?))
}

fn eigendir(rho: f64) -> Result<(ProblemSpec, BoundData)> {
    let mut spec = ProblemSpec::new("eigendir", Arc::new(|_, _, _| 1.0), Deviation::identity(), Arc::new(|_| 0.0), 0.0)?;
    spec.notes
        .push("u'' = λ f̃(u), u(0) = u(1) = 0 is solved in the form -w'' = λ f̃, w = -u; r = 0, σ = identity".into());
    Ok((spec, unit_bounds(rho)?))
}

fn gh_split(rho: f64) -> Result<(ProblemSpec, BoundData)> {
    let g = |t: f64, v: f64| 1.0 + t * v;
    let h = |u: f64| if u >= 0.5 { 1.0 } else { 0.0 } + u;
    let mut spec = ProblemSpec::new(
        "gh-split",
        Arc::new(move |t, u, v| g(t, v) + h(u)),
        Deviation::delay(0.25),
        Arc::new(|t| 1.0 + t),
        0.25,
    )?;
    spec.gamma_curves.push(
        DiscontinuityCurve::new(0.0, 1.0, Arc::new(|_| 0.5), Arc::new(|_| 0.0))?.with_label("h jump at u = 1/2"),
    );
    let state = rho + 1.0;
    let bounds = BoundData::new(rho, Arc::new(move |t| 2.0 + (1.0 + t) * state), Arc::new(|_| 1.0))?.with_labels(
        format!("M_ρ(t)=2+(1+t)(ρ+1)=2+(1+t)·{}", fmt_num(state)),
        "δ_ρ(t)=δ(t)=1",
    );
    Ok((spec, bounds))
}
