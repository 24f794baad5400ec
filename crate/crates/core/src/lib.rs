//! Numerical loop-space path integrals on flat tori.
//!
//! Two constructions of the supersymmetric path integral are implemented side
//! by side. The operator side pairs bar chains of equivariant forms with the
//! Chern character cochain of a finite Dirac model. The stochastic side
//! integrates the top-degree functional against Wiener measure on loops.

// index loops mirror the matrix formulas; `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bar;
pub mod bismut;
pub mod cache;
pub mod chern;
pub mod clifford;
pub mod config;
pub mod error;
pub mod forms;
pub mod iterated;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod report;
pub mod textfmt;
pub mod topdegree;
pub mod wiener;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
