//! Toolkit for unimodular phase vectors against complex row systems.
//!
//! The crate revolves around one question: how small can `max_i |<x, a_i>|`
//! get when every coordinate of `x` lies on the unit circle? Around it sit
//! certified operator-norm brackets, complex Hadamard matrices with flat
//! Fourier images, covering diagnostics for toric bodies over the order-3
//! grid on the 2-torus, and Banach-Mazur distance certificates.
//!
//! Everything is deterministic: randomized searches take explicit seeds and
//! parallel reductions resolve ties by index.

pub mod bm;
pub mod certify;
pub mod complex;
pub mod config;
pub mod discrepancy;
pub mod error;
pub mod hadamard;
pub mod io;
pub mod opnorm;
pub mod sample;
pub mod torus;

pub use complex::{ComplexMatrix, ComplexVector, PhaseVector, TorusPoint, C64};
pub use error::{Error, Result};
