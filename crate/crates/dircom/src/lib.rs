//! Detection of asymmetric directional communities in directed networks.
//!
//! A directional community pairs a source node set `S` with a terminal node
//! set `T` such that most edges run from `S` into `T`. This crate extracts
//! such pairs one at a time with regularized rank-one SVDs of the
//! degree-normalized graph Laplacian `Q = D_r^{-1/2} W D_c^{-1/2}`, sweeps a
//! sparsity grid while tracking directional conductance, and harvests
//! communities sequentially by zeroing each found `(S, T)` submatrix of `Q`.
//!
//! The core numerics are generic over the scalar type via [`scalar::Real`];
//! concrete `f64` aliases are exported at the crate root.

pub mod benchgen;
pub mod cli;
pub mod dcomp;
pub mod extract;
pub mod graph;
pub mod harvest;
pub mod measures;
pub mod rsvd;
pub mod scalar;

pub use scalar::Real;

/// Double-precision graph, the default for all CLI work.
pub type Graph64 = graph::DirectedGraph<f64>;
/// Double-precision community.
pub type Community64 = measures::Community<f64>;
/// Double-precision sparse vector.
pub type SparseVec64 = rsvd::SparseVec<f64>;
