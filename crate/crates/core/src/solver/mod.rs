//! Fixed-point solves, cone certification and the search for `n(λ*) = ρ`.

mod cone;
mod fixed_point;
mod linear;
mod scan;

pub use cone::{cone_verify, ConeCertificate};
pub use fixed_point::{
    estimate_lipschitz, fixed_point_solve, norm_response, relaxed_residual, vertex_on, FailureKind, FixedPointSolution,
    NonConvergence, SolverOptions,
};
pub use linear::green_power_iteration;
pub use scan::{
    boundary_scan, default_lambda_grid, fixed_radius_solve, EigenPair, PairMethod, ScanOptions, ScanResult, ScanSample,
};
