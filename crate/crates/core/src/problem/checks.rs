//! Sampled verification of the existence hypotheses and the λ̄ thresholds.
//!
//! "For a.a. t" statements are checked on finite grids with strict inequalities at
//! every sample; results are labelled as sampled, never as proved.

use serde::Serialize;

use super::{midpoints, BoundData, DiscontinuityCurve, ProblemSpec};
use crate::error::{Error, Result};
use crate::kernel::{GreenKernel, ScalarFn};
use crate::quadrature::{integrate, QuadConfig};

/// Grid densities for the sampled checks.
#[derive(Debug, Clone, Serialize)]
pub struct SamplingPlan {
    /// Largest state value probed, `ρ + ‖ω‖_{[-r,0]}`.
    pub state_max: f64,
    /// Samples per curve interval or per unit `t` range.
    pub t_points: usize,
    /// Samples per state axis on `[0, state_max]`.
    pub state_points: usize,
    /// Samples across the band `[γ - ε, γ + ε]`.
    pub band_points: usize,
    /// Extra probe at `tail_factor * state_max` for the unbounded `z` range.
    pub tail_factor: f64,
    /// Relative slack in the majorant and minorant comparisons.
    pub rel_tol: f64,
    /// `|Γ - ω∘σ|` at or below this counts as zero in the history separation test.
    pub zero_tol: f64,
}

impl SamplingPlan {
    pub fn new(state_max: f64) -> Self {
        Self {
            state_max,
            t_points: 512,
            state_points: 17,
            band_points: 5,
            tail_factor: 10.0,
            rel_tol: 1e-12,
            zero_tol: 1e-12,
        }
    }

    /// Plan for `ρ` and the problem's history norm.
    pub fn for_problem(spec: &ProblemSpec, rho: f64) -> Result<Self> {
        Ok(Self::new(rho + spec.vertex()?.history_norm()))
    }

    fn states(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.state_points.max(2);
        (0..n).map(move |i| self.state_max * i as f64 / (n - 1) as f64)
    }

    fn z_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.states().chain(std::iter::once(self.tail_factor * self.state_max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotCheckable,
    /// Not verified numerically; recorded as an assumption.
    Assumed,
}

/// A sample at which a check failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub lambda: Option<f64>,
    /// The two sides of the violated inequality.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub id: String,
    pub status: CheckStatus,
    pub detail: String,
    pub witness: Option<Witness>,
}

impl CheckItem {
    fn new(id: &str, status: CheckStatus, detail: impl Into<String>, witness: Option<Witness>) -> Self {
        Self {
            id: id.into(),
            status,
            detail: detail.into(),
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

fn box_scan(
    spec: &ProblemSpec,
    plan: &SamplingPlan,
    ts: impl Iterator<Item = f64>,
    mut ok: impl FnMut(f64, f64) -> bool,
    bound: &ScalarFn,
) -> (CheckStatus, Option<Witness>) {
    for t in ts {
        let b = bound(t);
        for u in plan.states() {
            for v in plan.states() {
                let fv = spec.f_at(t, u, v);
                if !ok(fv, b) {
                    let witness = Witness {
                        t,
                        u: Some(u),
                        v: Some(v),
                        lambda: None,
                        lhs: fv,
                        rhs: b,
                    };
                    return (CheckStatus::Fail, Some(witness));
                }
            }
        }
    }
    (CheckStatus::Pass, None)
}

/// `f(t, u, v) <= M_ρ(t)` on the sampled box `[0, 1] x [0, ρ + ‖ω‖]²`.
pub fn check_majorant(spec: &ProblemSpec, bounds: &BoundData, plan: &SamplingPlan) -> (CheckStatus, Option<Witness>) {
    let tol = plan.rel_tol;
    box_scan(
        spec,
        plan,
        midpoints(0.0, 1.0, plan.t_points),
        |fv, m| fv <= m + tol * m.abs().max(1.0),
        &bounds.majorant,
    )
}

/// `f(t, u, v) >= δ_ρ(t)` on the sampled box restricted to `t ∈ [1/4, 3/4]`.
pub fn check_minorant(spec: &ProblemSpec, bounds: &BoundData, plan: &SamplingPlan) -> (CheckStatus, Option<Witness>) {
    let tol = plan.rel_tol;
    box_scan(
        spec,
        plan,
        midpoints(0.25, 0.75, plan.t_points),
        |fv, d| fv >= d - tol * d.abs().max(1.0),
        &bounds.minorant,
    )
}

fn check_nonnegative(spec: &ProblemSpec, plan: &SamplingPlan) -> (CheckStatus, Option<Witness>) {
    let zero: ScalarFn = std::sync::Arc::new(|_| 0.0);
    box_scan(spec, plan, midpoints(0.0, 1.0, plan.t_points), |fv, z| fv >= z, &zero)
}

/// `δ̄` together with where the supremum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBar {
    pub value: f64,
    pub argmax: f64,
    /// Quadrature error estimate at the maximiser.
    pub error: f64,
}

const DELTA_BAR_GRID: usize = 257;

pub(crate) fn delta_bar_value(bounds: &BoundData, kernel: &GreenKernel, quad: &QuadConfig) -> Result<DeltaBar> {
    let cfg = QuadConfig {
        singularities: bounds.minorant_singularities.clone(),
        ..quad.clone()
    };
    let row = |t: f64| -> Result<(f64, f64)> {
        let bps = [t];
        let bp: &[f64] = if t > 0.25 && t < 0.75 { &bps } else { &[] };
        let r = integrate(|s| kernel.k(t, s) * (bounds.minorant)(s), 0.25, 0.75, bp, &cfg)?;
        Ok((r.value, r.error))
    };
    let mut best = (f64::NEG_INFINITY, 0.25, 0.0);
    let mut best_i = 0;
    for i in 0..DELTA_BAR_GRID {
        let t = 0.25 + 0.5 * i as f64 / (DELTA_BAR_GRID - 1) as f64;
        let (v, e) = row(t)?;
        if v > best.0 {
            best = (v, t, e);
            best_i = i;
        }
    }
    // golden-section refinement inside the neighbouring cells; t ↦ ∫ k δ is concave for δ >= 0
    let h = 0.5 / (DELTA_BAR_GRID - 1) as f64;
    let (mut a, mut b) = (
        (0.25 + (best_i as f64 - 1.0) * h).max(0.25),
        (0.25 + (best_i as f64 + 1.0) * h).min(0.75),
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = row(c)?;
    let mut fd = row(d)?;
    while b - a > 1e-10 {
        if fc.0 > fd.0 {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = row(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = row(d)?;
        }
    }
    for (t, (v, e)) in [(c, fc), (d, fd)] {
        if v > best.0 {
            best = (v, t, e);
        }
    }
    Ok(DeltaBar {
        value: best.0,
        argmax: best.1,
        error: best.2,
    })
}

/// `δ̄ = sup_{t ∈ [1/4,3/4]} ∫_{1/4}^{3/4} k(t, s) δ_ρ(s) ds`; a non-positive value
/// is a hypothesis failure.
pub fn compute_delta_bar(bounds: &BoundData, kernel: &GreenKernel, quad: &QuadConfig) -> Result<DeltaBar> {
    let db = delta_bar_value(bounds, kernel, quad)?;
    if db.value > 0.0 {
        Ok(db)
    } else {
        Err(Error::Hypothesis(format!("delta_bar = {} is not positive", db.value)))
    }
}

/// `ρ / δ̄`; every admissible `λ̄` must exceed it.
pub fn lambda_bar_threshold(rho: f64, delta_bar: f64) -> Result<f64> {
    if delta_bar > 0.0 {
        Ok(rho / delta_bar)
    } else {
        Err(Error::Hypothesis(format!("delta_bar = {delta_bar} must be positive")))
    }
}

/// `c · sup_{∂D} ‖x‖ / inf ‖v‖` over the envelope on the boundary.
pub fn abstract_lambda_threshold(c: f64, sup_boundary_norm: f64, inf_envelope_norm: f64) -> Result<f64> {
    if inf_envelope_norm > 0.0 {
        Ok(c * sup_boundary_norm / inf_envelope_norm)
    } else {
        Err(Error::Hypothesis(format!(
            "envelope norm lower bound {inf_envelope_norm} must be positive"
        )))
    }
}

/// The λ values `λ̄ k / 16`, `k = 1..=16`, at which admissibility is sampled.
pub fn lambda_samples(lambda_bar: f64) -> Vec<f64> {
    (1..=16).map(|k| lambda_bar * k as f64 / 16.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMode {
    /// `γ'' > 0`; holds for every λ with `ψ = γ''/2` because `f >= 0`.
    ConvexityShortcut,
    /// `-γ'' + ψ < λ f`.
    Ad1,
    /// `-γ'' - ψ > λ f`.
    Ad2,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityResult {
    pub curve: String,
    pub status: CheckStatus,
    pub mode: Option<AdmissibilityMode>,
    /// Which `ψ` was used.
    pub psi: String,
    pub lambda: f64,
    pub witness: Option<Witness>,
}

enum PsiChoice<'a> {
    Curve(&'a ScalarFn),
    ScaledMinorant(&'a ScalarFn, f64),
}

impl PsiChoice<'_> {
    fn eval(&self, t: f64) -> f64 {
        match self {
            PsiChoice::Curve(p) => p(t),
            PsiChoice::ScaledMinorant(d, lambda) => lambda * d(t),
        }
    }

    fn describe(&self) -> String {
        match self {
            PsiChoice::Curve(_) => "caller-supplied".into(),
            PsiChoice::ScaledMinorant(_, lambda) => format!("λ·δ_ρ with λ = {lambda}"),
        }
    }
}

/// Transversality of `curve` at the sample times `ts`, where `f` is evaluated at
/// `(first_arg(t), y, z)` with `y` in the ε-band and `z ∈ [0, ∞)` (sampled).
fn transversality(
    curve: &DiscontinuityCurve,
    ts: &[f64],
    first_arg: impl Fn(f64) -> f64,
    spec: &ProblemSpec,
    bounds: Option<&BoundData>,
    lambda: f64,
    plan: &SamplingPlan,
) -> AdmissibilityResult {
    let mut result = AdmissibilityResult {
        curve: curve.label.clone(),
        status: CheckStatus::Pass,
        mode: None,
        psi: String::new(),
        lambda,
        witness: None,
    };
    if ts.is_empty() {
        result.psi = "none (empty sample set)".into();
        result.status = CheckStatus::NotCheckable;
        return result;
    }
    if ts.iter().all(|&t| (curve.second_derivative)(t) > 0.0) {
        result.mode = Some(AdmissibilityMode::ConvexityShortcut);
        result.psi = "γ''/2".into();
        return result;
    }
    let psi = match (&curve.psi, bounds) {
        (Some(p), _) => PsiChoice::Curve(p),
        (None, Some(b)) => PsiChoice::ScaledMinorant(&b.minorant, lambda),
        (None, None) => {
            result.status = CheckStatus::NotCheckable;
            result.psi = "none available".into();
            return result;
        }
    };
    result.psi = psi.describe();

    let band = plan.band_points.max(2);
    let scan = |ad1: bool| -> Option<Witness> {
        for &t in ts {
            let g = (curve.value)(t);
            let g2 = (curve.second_derivative)(t);
            let p = psi.eval(t);
            let s = first_arg(t);
            for i in 0..band {
                let y = g - curve.epsilon + 2.0 * curve.epsilon * i as f64 / (band - 1) as f64;
                for z in plan.z_values() {
                    let rhs = lambda * spec.f_at(s, y, z);
                    let (lhs, holds) = if ad1 { (-g2 + p, -g2 + p < rhs) } else { (-g2 - p, -g2 - p > rhs) };
                    if !holds {
                        return Some(Witness {
                            t,
                            u: Some(y),
                            v: Some(z),
                            lambda: Some(lambda),
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
        None
    };
    match scan(true) {
        None => result.mode = Some(AdmissibilityMode::Ad1),
        Some(w1) => match scan(false) {
            None => result.mode = Some(AdmissibilityMode::Ad2),
            Some(_) => {
                result.status = CheckStatus::Fail;
                result.witness = Some(w1);
            }
        },
    }
    result
}

/// λ-admissibility of a jump curve in the second argument of `f`.
pub fn check_admissible_curve(
    curve: &DiscontinuityCurve,
    spec: &ProblemSpec,
    bounds: Option<&BoundData>,
    lambda: f64,
    plan: &SamplingPlan,
) -> AdmissibilityResult {
    let ts: Vec<f64> = midpoints(curve.a, curve.b, plan.t_points).collect();
    transversality(curve, &ts, |t| t, spec, bounds, lambda, plan)
}

/// Deviated-curve condition `D` for one `Γ_j`.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionDResult {
    pub curve: String,
    pub status: CheckStatus,
    /// (a): `Γ_j ≠ ω∘σ` off isolated points where `σ(t) <= 0`.
    pub history_separation: CheckStatus,
    pub separation_witness: Option<Witness>,
    /// (b): transversality where `σ(t) >= 0`.
    pub transversality: AdmissibilityResult,
}

/// Condition `D` for every `Γ_j` of `spec`; not checkable unless `σ' ≡ ±1`.
pub fn check_condition_d(
    spec: &ProblemSpec,
    bounds: Option<&BoundData>,
    lambda: f64,
    plan: &SamplingPlan,
) -> Result<Vec<ConditionDResult>, CheckStatus> {
    if spec.sigma.unit_slope().is_none() {
        return Err(CheckStatus::NotCheckable);
    }
    Ok(spec
        .big_gamma_curves
        .iter()
        .map(|curve| {
            let ts: Vec<f64> = midpoints(curve.a, curve.b, plan.t_points).collect();
            let mut separation = CheckStatus::Pass;
            let mut separation_witness = None;
            let mut prev_zero = false;
            for &t in &ts {
                let s = spec.sigma.eval(t);
                if s > 0.0 {
                    prev_zero = false;
                    continue;
                }
                let g = (curve.value)(t);
                let w = (spec.omega)(s);
                let zero = (g - w).abs() <= plan.zero_tol * g.abs().max(1.0);
                if zero && prev_zero {
                    separation = CheckStatus::Fail;
                    separation_witness = Some(Witness {
                        t,
                        u: None,
                        v: Some(w),
                        lambda: None,
                        lhs: g,
                        rhs: w,
                    });
                    break;
                }
                prev_zero = zero;
            }
            let forward: Vec<f64> = ts.iter().copied().filter(|&t| spec.sigma.eval(t) >= 0.0).collect();
            let mut trans = if forward.is_empty() {
                AdmissibilityResult {
                    curve: curve.label.clone(),
                    status: CheckStatus::Pass,
                    mode: None,
                    psi: "vacuous: σ < 0 on the whole interval".into(),
                    lambda,
                    witness: None,
                }
            } else {
                transversality(curve, &forward, |t| spec.sigma.eval(t), spec, bounds, lambda, plan)
            };
            trans.curve = curve.label.clone();
            let status = match (separation, trans.status) {
                (CheckStatus::Fail, _) | (_, CheckStatus::Fail) => CheckStatus::Fail,
                (_, CheckStatus::NotCheckable) => CheckStatus::NotCheckable,
                _ => CheckStatus::Pass,
            };
            ConditionDResult {
                curve: curve.label.clone(),
                status,
                history_separation: separation,
                separation_witness,
                transversality: trans,
            }
        })
        .collect())
}

/// Everything `check` reports.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub problem: String,
    pub rho: f64,
    pub history_norm: f64,
    pub state_max: f64,
    pub majorant: String,
    pub minorant: String,
    pub delta_bar: f64,
    pub delta_bar_argmax: f64,
    pub lambda_bar_threshold: Option<f64>,
    pub lambda_bar: Option<f64>,
    pub items: Vec<CheckItem>,
    pub admissibility: Vec<AdmissibilityResult>,
    pub condition_d: Vec<ConditionDResult>,
    pub notes: Vec<String>,
    pub all_pass: bool,
}

/// Default `λ̄` as a multiple of the threshold `ρ/δ̄`.
pub const DEFAULT_LAMBDA_BAR_FACTOR: f64 = 1.125;

/// Runs every checker and assembles the report. `lambda_bar` defaults to
/// `DEFAULT_LAMBDA_BAR_FACTOR · ρ/δ̄`.
pub fn run_hypothesis_checks(
    spec: &ProblemSpec,
    bounds: &BoundData,
    quad: &QuadConfig,
    plan: &SamplingPlan,
    lambda_bar: Option<f64>,
) -> Result<HypothesisReport> {
    let vertex = spec.vertex()?;
    let kernel = spec.kernel();
    let mut items = Vec::new();
    let mut notes = spec.notes.clone();
    notes.push(format!(
        "inequalities sampled on {} t-points and {}x{} state points over [0, {}], not proved",
        plan.t_points, plan.state_points, plan.state_points, plan.state_max
    ));

    items.push(CheckItem::new(
        "H1",
        CheckStatus::Assumed,
        "measurability of t -> f(t, u(t), v(t)) is assumed",
        None,
    ));
    let (st, w) = check_nonnegative(spec, plan);
    items.push(CheckItem::new("f>=0", st, "f is non-negative on the sampled box", w));
    let (st, w) = check_majorant(spec, bounds, plan);
    items.push(CheckItem::new("H2", st, format!("f <= {}", bounds.majorant_label), w));
    let (st, w) = check_minorant(spec, bounds, plan);
    items.push(CheckItem::new("H3", st, format!("f >= {} on [1/4, 3/4]", bounds.minorant_label), w));

    let db = delta_bar_value(bounds, &kernel, quad)?;
    let threshold = lambda_bar_threshold(bounds.rho, db.value).ok();
    items.push(CheckItem::new(
        "H3:delta_bar",
        if db.value > 0.0 { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("delta_bar = {:.12} at t = {:.6}", db.value, db.argmax),
        None,
    ));

    let lambda_bar = match (lambda_bar, threshold) {
        (Some(l), _) => Some(l),
        (None, Some(th)) => Some(DEFAULT_LAMBDA_BAR_FACTOR * th),
        (None, None) => None,
    };
    if let (Some(l), Some(th)) = (lambda_bar, threshold) {
        items.push(CheckItem::new(
            "H4:lambda_bar",
            if l > th { CheckStatus::Pass } else { CheckStatus::Fail },
            format!("lambda_bar = {l} vs rho/delta_bar = {th}"),
            None,
        ));
    }

    let mut admissibility = Vec::new();
    let mut condition_d = Vec::new();
    match lambda_bar {
        None => {
            items.push(CheckItem::new("H4", CheckStatus::NotCheckable, "no lambda_bar without delta_bar > 0", None));
        }
        Some(lb) => {
            let lambdas = lambda_samples(lb);
            let mut h4 = CheckStatus::Pass;
            let mut h4_witness = None;
            let mut lambda_sampled = false;
            for curve in &spec.gamma_curves {
                let mut last = None;
                for &lambda in &lambdas {
                    let r = check_admissible_curve(curve, spec, Some(bounds), lambda, plan);
                    let shortcut = r.mode == Some(AdmissibilityMode::ConvexityShortcut);
                    let failed = r.status != CheckStatus::Pass;
                    if failed && h4 == CheckStatus::Pass {
                        h4 = r.status;
                        h4_witness = r.witness.clone();
                    }
                    last = Some(r);
                    if shortcut || failed {
                        break;
                    }
                    lambda_sampled = true;
                }
                admissibility.extend(last);
            }
            if lambda_sampled {
                notes.push("curve transversality verified at lambda_bar*k/16, k = 1..16 only".into());
            }
            items.push(CheckItem::new(
                "H4",
                h4,
                format!("{} discontinuity curves in the state argument", spec.gamma_curves.len()),
                h4_witness,
            ));

            if !spec.big_gamma_curves.is_empty() {
                let mut d_status = CheckStatus::Pass;
                let mut d_witness = None;
                let mut detail = format!("{} curves in the deviated argument", spec.big_gamma_curves.len());
                'outer: for &lambda in &lambdas {
                    match check_condition_d(spec, Some(bounds), lambda, plan) {
                        Err(st) => {
                            d_status = st;
                            detail = "sigma lacks a unit-slope flag".into();
                            break;
                        }
                        Ok(results) => {
                            let all_shortcut = results.iter().all(|r| {
                                r.transversality.mode == Some(AdmissibilityMode::ConvexityShortcut) || r.transversality.mode.is_none()
                            });
                            let bad = results.iter().find(|r| r.status != CheckStatus::Pass).cloned();
                            condition_d = results;
                            if let Some(r) = bad {
                                d_status = r.status;
                                d_witness = r.separation_witness.or(r.transversality.witness);
                                break 'outer;
                            }
                            if all_shortcut {
                                break;
                            }
                        }
                    }
                }
                items.push(CheckItem::new("D", d_status, detail, d_witness));
            }
        }
    }

    let all_pass = items
        .iter()
        .all(|i| matches!(i.status, CheckStatus::Pass | CheckStatus::Assumed | CheckStatus::NotCheckable));
    Ok(HypothesisReport {
        problem: spec.name.clone(),
        rho: bounds.rho,
        history_norm: vertex.history_norm(),
        state_max: plan.state_max,
        majorant: bounds.majorant_label.clone(),
        minorant: bounds.minorant_label.clone(),
        delta_bar: db.value,
        delta_bar_argmax: db.argmax,
        lambda_bar_threshold: threshold,
        lambda_bar,
        items,
        admissibility,
        condition_d,
        notes,
        all_pass,
    })
}
