//! Weyl quantization of the commutative resolvent algebra on the cylinder
//! `T*Tⁿ ≅ Tⁿ × Rⁿ`, at desk scale.

pub mod classical_dynamics;
pub mod error;
pub mod lattice;
pub mod operators;
pub mod quadrature;
pub mod quantizer;
pub mod quantum_dynamics;
pub mod symbols;

pub use error::{Error, Result};
