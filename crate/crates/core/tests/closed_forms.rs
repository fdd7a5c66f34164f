use std::sync::Arc;

use hameig::problem::{Deviation, ProblemSpec};
use hameig::quadrature::{hammerstein_apply, GridFunction, QuadConfig};

// Antiderivatives of s(1/2 - s) and (1 - s)(1/2 - s).
fn a(s: f64) -> f64 {
    s * s / 4.0 - s.powi(3) / 3.0
}

fn b(s: f64) -> f64 {
    s / 2.0 - 0.75 * s * s + s.powi(3) / 3.0
}

/// ∫_0^{1/2} G(t, s) (1/2 - s) ds.
fn delayed_history(t: f64) -> f64 {
    if t <= 0.5 {
        (1.0 - t) * a(t) + t * (b(0.5) - b(t))
    } else {
        (1.0 - t) * a(0.5)
    }
}

#[test]
fn delayed_argument_sees_only_the_history() {
    let r = 0.5;
    let spec = ProblemSpec::new("delay-v", Arc::new(|_, _, v| v), Deviation::delay(r), Arc::new(|t| -t), r).unwrap();
    let nodes = GridFunction::uniform_nodes(r, 257).unwrap();
    let u = GridFunction::from_fn(nodes, |t| if t < 0.0 { -t } else { 0.0 }).unwrap();
    let tu = hammerstein_apply(&u, &spec, &spec.kernel(), &QuadConfig::default()).unwrap();
    for (&t, &v) in tu.nodes().iter().zip(tu.values()) {
        if t >= 0.0 {
            assert!((v - delayed_history(t)).abs() < 1e-12, "t = {t}: {v} vs {}", delayed_history(t));
        } else {
            assert_eq!(v, 0.0);
        }
    }
}

#[test]
fn identity_argument_with_linear_state() {
    // f = u, u(t) = t: Tu(t) = ∫ G(t, s) s ds = t(1 - t²)/6
    let spec = ProblemSpec::new("lin", Arc::new(|_, u, _| u), Deviation::identity(), Arc::new(|_| 0.0), 0.0).unwrap();
    let nodes = GridFunction::uniform_nodes(0.0, 129).unwrap();
    let u = GridFunction::from_fn(nodes, |t| t).unwrap();
    let tu = hammerstein_apply(&u, &spec, &spec.kernel(), &QuadConfig::default()).unwrap();
    for (&t, &v) in tu.nodes().iter().zip(tu.values()) {
        assert!((v - t * (1.0 - t * t) / 6.0).abs() < 1e-13);
    }
}
