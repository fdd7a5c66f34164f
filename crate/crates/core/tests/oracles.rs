mod common;

use common::*;
use hameig::catalog::{example_problem, RationalEnumeration};
use hameig::problem::compute_delta_bar;
use hameig::quadrature::{hammerstein_apply, GridFunction, QuadConfig};
use hameig::solver::{fixed_point_solve, fixed_radius_solve, vertex_on, SolverOptions};

#[test]
fn enumeration_matches_diatomic_sequence() {
    let ours = RationalEnumeration::new(200).unwrap();
    for (n, q) in rationals(200).into_iter().enumerate() {
        assert_eq!(ours.q(n + 1), q, "q_{}", n + 1);
    }
    let ours = RationalEnumeration::new(40).unwrap();
    let phi = Phi::new(40);
    for k in 0..2000 {
        let x = -3.0 + 6.0 * k as f64 / 1999.0;
        assert_eq!(ours.phi(x), phi.eval(x), "φ({x})");
    }
}

#[test]
fn delta_bar_sqrt_minorant() {
    let (x, oracle) = golden_max(delta_integral_sqrt, 0.25, 0.75, 1e-12);
    let (spec, bounds) = example_problem(1.0, 40).unwrap();
    let db = compute_delta_bar(&bounds, &spec.kernel(), &QuadConfig::default()).unwrap();
    println!("delta_bar oracle {oracle:.15} at {x:.9}, library {:.15}", db.value);
    assert!((db.value - oracle).abs() < 1e-8);
    assert!((db.argmax - x).abs() < 1e-4);
}

#[test]
fn example_operator_at_vertex() {
    let (spec, _) = example_problem(1.0, 40).unwrap();
    let nodes = GridFunction::uniform_nodes(0.5, 257).unwrap();
    let y = vertex_on(&spec, &nodes).unwrap();
    let tu = hammerstein_apply(&y, &spec, &spec.kernel(), &QuadConfig::default()).unwrap();
    let ny = Nystrom::new(4_000_000);
    let yv = ny.vertex();
    let oracle = ny.apply_at(&yv, &[0.5, 0.25, 0.875]);
    println!("Tu(1/2): library {:.12}, oracle {:.12}", tu.eval(0.5), oracle[0]);
    assert!((tu.eval(0.5) - oracle[0]).abs() < 1e-6);
    assert!((tu.eval(0.25) - oracle[1]).abs() < 1e-6);
    assert!((tu.eval(0.875) - oracle[2]).abs() < 1e-6);
}

#[test]
fn example_fixed_point_small_lambda() {
    let (spec, _) = example_problem(1.0, 40).unwrap();
    let nodes = GridFunction::uniform_nodes(0.5, 257).unwrap();
    let y = vertex_on(&spec, &nodes).unwrap();
    let opts = SolverOptions::default();
    let sol = fixed_point_solve(&spec, &spec.kernel(), 0.1, &y, &opts).unwrap();
    assert!(sol.residual < 1e-8);

    let ny = Nystrom::new(1 << 20);
    let u = ny.solve(0.1, 1e-13);
    let ts = sol.u.positive_nodes().to_vec();
    let oracle: Vec<f64> = ny.apply_at(&u, &ts).iter().zip(&ts).map(|(tu, &t)| vertex(t) + 0.1 * tu).collect();
    let d = sup_diff(sol.u.positive_values(), &oracle);
    println!("λ = 0.1: sup distance to oracle {d:.3e}");
    assert!(d < 1e-6);
}

#[test]
fn example_fixed_radius_point() {
    let (spec, _) = example_problem(1.0, 40).unwrap();
    let solve = |n: usize| {
        let nodes = GridFunction::uniform_nodes(0.5, n).unwrap();
        let y = vertex_on(&spec, &nodes).unwrap();
        fixed_radius_solve(&spec, 1.0, &y, &SolverOptions::default()).unwrap().lambda
    };
    let (coarse, mid, fine) = (solve(257), solve(513), solve(1025));
    let (oracle, _) = Nystrom::new(1 << 18).fixed_radius(1.0, 1e-12);
    // second order in the mesh width: errors shrink by about 4 per halving
    let ratio = (coarse - mid) / (mid - fine);
    let extrapolated = (4.0 * fine - mid) / 3.0;
    println!("λ*: {coarse:.12} {mid:.12} {fine:.12}, ratio {ratio:.3}, extrapolated {extrapolated:.12}, oracle {oracle:.12}");
    assert!(ratio > 3.0 && ratio < 6.0, "{ratio}");
    assert!((extrapolated - oracle).abs() < 2e-6);
    assert!((coarse - oracle).abs() < 1e-4);
}
