//! Locomotion-controller learning for tree-structured modular robots.
//!
//! The crate wires three controller/learner pairings over a common
//! evaluation budget: oscillator-network controllers and feed-forward
//! policies trained by reversible differential evolution, and a Gaussian
//! actor-critic trained by proximal policy optimization. Robots are
//! rooted trees of core/brick/hinge modules; fitness is average speed
//! over a fixed-horizon episode in a deterministic reduced-order
//! environment (or any external simulator speaking the line protocol in
//! [`env::protocol`]).
//!
//! The numeric kernel is generic over the scalar type via [`Scalar`];
//! the shipped tooling instantiates everything at `f64` through the
//! aliases below.

pub mod controller;
pub mod env;
pub mod harness;
pub mod learner;
pub mod morphology;
pub mod numerics;
pub mod scalar;

pub use scalar::Scalar;

/// Scalar type used by the shipped binaries and the harness.
pub type Real = f64;

pub type Tensor = numerics::tensor::Tensor<Real>;
pub type Tape = numerics::autodiff::Tape<Real>;
pub type Genome = controller::Genome<Real>;
pub type CpgNetwork = controller::cpg::CpgNetwork<Real>;
pub type CpgState = controller::cpg::CpgState<Real>;
pub type AnnParams = controller::nn::AnnParams<Real>;
pub type ActorCriticParams = controller::nn::ActorCriticParams<Real>;
pub type RevdeConfig = learner::revde::RevdeConfig<Real>;
