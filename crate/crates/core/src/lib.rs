//! Eigenpairs `(λ, u)` of `u = y + λ T u`, where `T` is the Hammerstein operator of
//! `-u''(t) = λ f(t, u(t), u(σ(t)))`, `u = ω` on `[-r, 0]`, `u(1) = 0`, and `f` may jump
//! across curves in its state arguments.

pub mod catalog;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod kernel;
pub mod problem;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
