#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Simulation of discrete-time quantum walks and their use as a search
//! procedure for the output-layer weights of a small XOR perceptron.
//!
//! The numerical modules are generic over a [`Scalar`] (`f32` or `f64`).
//! Concrete `f64` aliases are exported below for the common case.

pub mod error;
pub mod lackadaisical;
pub mod mlp;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod search_space;
pub mod trainer;
pub mod walk_core;

pub use error::{Error, Result};
pub use lackadaisical::{BasisClass, GraphParams};
pub use scalar::Scalar;
pub use search_space::VertexLabel;

pub type ComplexAmplitude = walk_core::ComplexAmplitude<f64>;
pub type ComplexMatrix = walk_core::ComplexMatrix<f64>;
pub type StateVector1D = walk_core::StateVector1D<f64>;
pub type StateVector2D = walk_core::StateVector2D<f64>;
pub type Distribution1D = walk_core::Distribution1D<f64>;
pub type Distribution2D = walk_core::Distribution2D<f64>;

pub type ReducedState = lackadaisical::ReducedState<f64>;
pub type EdgeState = lackadaisical::EdgeState<f64>;
pub type TrajectoryRow = lackadaisical::TrajectoryRow<f64>;

pub type MlpWeights = mlp::MlpWeights<f64>;
pub type FixedWeights = mlp::FixedWeights<f64>;
pub type Interval = mlp::Interval<f64>;
pub type TrainReport = mlp::TrainReport<f64>;

pub type Window = search_space::Window<f64>;
pub type MarkedSet = search_space::MarkedSet;
pub type SolutionCount = search_space::SolutionCount<f64>;

pub type WheelOutcome = sampling::WheelOutcome<f64>;

/// Single-precision variants, mainly useful for checking how far results
/// drift when the simulation is run in `f32`.
pub mod f32 {
    use super::*;

    pub type ComplexAmplitude = walk_core::ComplexAmplitude<f32>;
    pub type ComplexMatrix = walk_core::ComplexMatrix<f32>;
    pub type StateVector1D = walk_core::StateVector1D<f32>;
    pub type StateVector2D = walk_core::StateVector2D<f32>;
    pub type ReducedState = lackadaisical::ReducedState<f32>;
    pub type EdgeState = lackadaisical::EdgeState<f32>;
    pub type MlpWeights = mlp::MlpWeights<f32>;
    pub type FixedWeights = mlp::FixedWeights<f32>;
    pub type Window = search_space::Window<f32>;
}
