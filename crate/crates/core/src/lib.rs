//! Effective Hamiltonians of capacitively coupled flux qubits and resonators
//! via exact Schrieffer-Wolff reduction.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytics;
pub mod circuit_model;
pub mod couplings;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod scalar;
pub mod spectra;
pub mod swt;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type FluxQubitSpec = circuit_model::FluxQubitSpec<f64>;
pub type FluxQubitSpecF32 = circuit_model::FluxQubitSpec<f32>;
pub type ResonatorSpec = circuit_model::ResonatorSpec<f64>;
pub type ResonatorSpecF32 = circuit_model::ResonatorSpec<f32>;
pub type CapacitanceNetwork = circuit_model::CapacitanceNetwork<f64>;
pub type CapacitanceNetworkF32 = circuit_model::CapacitanceNetwork<f32>;
pub type CMat = scalar::CMat<f64>;
pub type CMatF32 = scalar::CMat<f32>;
