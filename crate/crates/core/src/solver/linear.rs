//! Power iteration for the linear operator `u ↦ ∫₀¹ G(·, s) u(s) ds`.

use std::sync::Arc;

use crate::error::Result;
use crate::problem::{Deviation, ProblemSpec};
use crate::quadrature::{hammerstein_apply, GridFunction, QuadConfig};

/// Largest eigenvalue of the Green operator on an `n`-node grid (exact value `1/π²`),
/// with the normalised eigenvector.
pub fn green_power_iteration(n: usize, tol: f64, max_iter: usize) -> Result<(f64, GridFunction)> {
    let spec = ProblemSpec::new("linear", Arc::new(|_, u, _| u), Deviation::identity(), Arc::new(|_| 0.0), 0.0)?;
    let kernel = spec.kernel();
    let quad = QuadConfig::default();
    let mut u = GridFunction::from_fn(GridFunction::uniform_nodes(0.0, n)?, |t| t * (1.0 - t))?;
    let mut mu = 0.0;
    for _ in 0..max_iter {
        let tu = hammerstein_apply(&u, &spec, &kernel, &quad)?;
        let m = tu.sup_norm_positive();
        let next = tu.map_values(|_, v| v / m);
        let done = next.sup_distance_positive(&u) <= tol && (m - mu).abs() <= tol * m;
        u = next;
        mu = m;
        if done {
            break;
        }
    }
    Ok((mu, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_eigenvalue() {
        let (mu, u) = green_power_iteration(257, 1e-13, 500).unwrap();
        let exact = 1.0 / std::f64::consts::PI.powi(2);
        assert!((mu - exact).abs() < 2e-5 * exact, "{mu} vs {exact}");
        // second order in the mesh width
        let (fine, _) = green_power_iteration(513, 1e-13, 500).unwrap();
        let ratio = (mu - exact).abs() / (fine - exact).abs();
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
        // eigenvector ∝ sin(πt)
        assert!((u.eval(0.25) - (std::f64::consts::PI / 4.0).sin()).abs() < 1e-4);
    }
}
