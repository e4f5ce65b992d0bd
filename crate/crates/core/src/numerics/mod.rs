//! Shared numeric kernel: dense tensors, tape-based reverse-mode
//! differentiation, a fixed-step RK4 integrator, seeded splittable RNG
//! streams, and small statistics helpers.

pub mod autodiff;
pub mod ode;
pub mod rng;
pub mod stats;
pub mod tensor;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },
    #[error("non-finite value produced by node {node} ({op})")]
    NonFinite { node: usize, op: &'static str },
    #[error("backward pass requires a scalar output node, got {len} elements")]
    NonScalarOutput { len: usize },
    #[error("non-positive step size dt = {dt}")]
    NonPositiveStep { dt: f64 },
    #[error("non-finite derivative during integration")]
    NonFiniteDerivative,
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
}
