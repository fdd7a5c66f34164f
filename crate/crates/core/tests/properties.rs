use std::sync::Arc;

use proptest::prelude::*;

use hameig::catalog::{self, example_problem, RationalEnumeration};
use hameig::envelope::{f_envelope, sliding_selection, ValueInterval};
use hameig::kernel::{green, phi_bound};
use hameig::problem::expr::Expr;
use hameig::problem::{Deviation, ProblemSpec};
use hameig::quadrature::{hammerstein_apply, GridFunction, QuadConfig};
use hameig::solver::vertex_on;

proptest! {
    #[test]
    fn green_symmetric_and_bounded(t in 0.0..=1.0f64, s in 0.0..=1.0f64) {
        let g = green(t, s);
        prop_assert_eq!(g, green(s, t));
        prop_assert!(g >= 0.0);
        prop_assert!(g <= phi_bound(s) + 1e-15);
        if (0.25..=0.75).contains(&t) {
            prop_assert!(g >= 0.25 * phi_bound(s) - 1e-15);
        }
    }

    #[test]
    fn phi_monotone_and_bounded(x in -20.0..20.0f64, dx in 0.0..5.0f64) {
        let e = RationalEnumeration::new(40).unwrap();
        let (p, q) = (e.phi(x), e.phi(x + dx));
        prop_assert!(p <= q);
        prop_assert!((0.0..=1.0).contains(&p));
        let e41 = RationalEnumeration::new(41).unwrap();
        prop_assert!((e41.phi(x) - p).abs() <= 0.5f64.powi(40));
    }

    #[test]
    fn envelope_contains_and_nests(
        t in 0.001..=1.0f64, u in 0.0..3.0f64, v in 0.0..3.0f64,
        e1 in 0.0..0.3f64, de in 0.0..0.3f64,
    ) {
        let (spec, _) = catalog::lookup("gh-split", 1.0, 40).unwrap();
        let a = f_envelope(&spec, t, u, v, e1).unwrap();
        let b = f_envelope(&spec, t, u, v, e1 + de).unwrap();
        prop_assert!(a.contains(spec.f_at(t, u, v)));
        prop_assert!(b.lo <= a.lo && a.hi <= b.hi);
    }

    #[test]
    fn sliding_selection_stays_inside(lo in -5.0..5.0f64, w in 0.0..5.0f64, target in -20.0..20.0f64) {
        let iv = ValueInterval::new(lo, lo + w).unwrap();
        let x = sliding_selection(iv, target);
        prop_assert!(iv.contains(x));
        if iv.contains(target) {
            prop_assert_eq!(x, target);
        }
    }

    #[test]
    fn interpolation_between_neighbours(vals in prop::collection::vec(-10.0..10.0f64, 17), t in -0.25..=1.0f64) {
        let nodes = GridFunction::uniform_nodes(0.25, 17).unwrap();
        let n = nodes.len();
        let g = GridFunction::new(nodes, vals.iter().cycle().take(n).copied().collect()).unwrap();
        let i = g.interval_of(t);
        let (a, b) = (g.values()[i], g.values()[i + 1]);
        let x = g.eval(t);
        prop_assert!(x >= a.min(b) - 1e-12 && x <= a.max(b) + 1e-12);
    }

    #[test]
    fn quadratic_expressions(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, t in -2.0..2.0f64) {
        let e = Expr::parse(&format!("({a})*t^2 + ({b})*t + ({c})"), &["t"], &[]).unwrap();
        let want = a * t * t + b * t + c;
        prop_assert!((e.eval(&[t]) - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn operator_nonnegative_with_boundary_zeros(amp in 0.0..2.0f64, freq in 0.5..6.0f64) {
        let (spec, _) = example_problem(1.0, 40).unwrap();
        let nodes = GridFunction::uniform_nodes(0.5, 65).unwrap();
        let y = vertex_on(&spec, &nodes).unwrap();
        let u = y.map_values(|t, v| if t > 0.0 { v + amp * (freq * t).sin().abs() * t * (1.0 - t) } else { v });
        let tu = hammerstein_apply(&u, &spec, &spec.kernel(), &QuadConfig::default()).unwrap();
        prop_assert!(tu.values().iter().all(|&v| v >= 0.0));
        prop_assert!(tu.values()[tu.len() - 1].abs() < 1e-14);
        prop_assert_eq!(tu.values()[tu.zero_index()], 0.0);
    }

    #[test]
    fn operator_scales_linearly_in_constant_f(c in 0.0..10.0f64) {
        let spec = ProblemSpec::new("c", Arc::new(move |_, _, _| c), Deviation::identity(), Arc::new(|_| 0.0), 0.0).unwrap();
        let nodes = GridFunction::uniform_nodes(0.0, 33).unwrap();
        let u = GridFunction::from_fn(nodes, |_| 0.0).unwrap();
        let tu = hammerstein_apply(&u, &spec, &spec.kernel(), &QuadConfig::default()).unwrap();
        for (&t, &v) in tu.nodes().iter().zip(tu.values()) {
            prop_assert!((v - c * t * (1.0 - t) / 2.0).abs() <= 1e-13 * (1.0 + c));
        }
    }
}
