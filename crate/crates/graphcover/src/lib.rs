//! Graph pseudo-metrics aligned with message-passing networks, Weisfeiler-Leman
//! refinement, covering numbers of graph families and robustness-based
//! generalization bounds.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! `f64`, which every experiment uses.

pub mod bounds;
pub mod covering;
pub mod families;
pub mod graph;
pub mod metrics;
pub mod mpnn;
pub mod scalar;
pub mod solvers;
pub mod tu;
pub mod unrolling;
pub mod wl;

pub use scalar::Scalar;

pub type Graph = graph::LabeledGraph<f64>;
pub type Graph32 = graph::LabeledGraph<f32>;
pub type Collection = graph::GraphCollection<f64>;
pub type Tree = unrolling::RootedTree<f64>;
pub type Distances = metrics::DistanceMatrix<f64>;
pub type Model = mpnn::MpnnModel<f64>;
