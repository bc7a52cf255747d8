//! Analytic solution of the half-space temperature-jump problem for the
//! model transport equation of a massless Bose gas.
//!
//! The crate is `no_std` (it needs `alloc`). Transcendental functions come
//! from `libm` through [`num_traits::Float`], so results do not depend on the
//! host C library.
//!
//! Module map:
//!
//! * [`special_fn`] – Einstein function, frequency moments, the truncated
//!   moment ξ_α and physical scaling.
//! * [`quadrature`] – Gauss–Legendre rules, adaptive integration, principal
//!   values and weighted Gauss rules.
//! * [`dispersion`] – the Case function, the frequency-averaged dispersion
//!   function and its boundary values, the argument table θ_α and the index.
//! * [`rh_solver`] – the factorization `X(z)`, the jump coefficient `V₁(α)`
//!   and the continuous-spectrum coefficient `n(η)`.
//! * [`field`] – evaluation of the expanded solution φ(x, μ).
//! * [`saddle`] – saddle-point approximation of the jump coefficient.
//! * [`dom_oracle`] – discrete-ordinates solver used as an independent check.
#![no_std]
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dispersion;
pub mod dom_oracle;
mod error;
pub mod field;
pub mod interp;
mod par;
pub mod quadrature;
pub mod rh_solver;
pub mod saddle;
pub mod special_fn;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use dispersion::{DispersionSample, DispersionTable, GridSpec};
pub use dom_oracle::{DomConfig, DomGrid, DomResult};
pub use field::MilneSolution;
pub use rh_solver::{FactorizationData, SpectrumCoefficient, V1Estimate};
pub use saddle::SaddleSummary;
pub use special_fn::{AlphaModel, PhysicalScales};
