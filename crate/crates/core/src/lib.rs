//! Homotopy analysis transform method (HAM with a Laplace-transform auxiliary
//! operator) for autonomous ODE systems with quadratic right-hand sides.
//!
//! The pieces, bottom-up:
//!
//! - [`series`]: sparse polynomials in the convergence-control parameter `ħ`
//!   and time `t`;
//! - [`laplace`]: transform-domain images of those polynomials;
//! - [`model`]: quadratic ODE systems, the HIV / CD8⁺ T-cell preset and the
//!   JSON model-config format;
//! - [`engine`]: the order-by-order deformation recurrence and partial sums;
//! - [`diagnostics`]: ħ-curves, plateau detection, residuals, optimal `ħ`,
//!   and a Dormand–Prince reference solver;
//! - [`export`]: JSON and CSV artifacts;
//! - [`cli`]: the `hatm` command line.
//!
//! ```
//! use hatm::{engine, model};
//!
//! let sys = model::hiv_cd8_default();
//! let series = engine::solve(&sys, 5).unwrap();
//! let t_sum = series.partial_sum(0);
//! assert!((t_sum.coeff(1, 1) - 0.12).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod engine;
mod error;
pub mod export;
pub mod laplace;
pub mod model;
pub mod series;

pub use engine::{solve, DeformationSeries};
pub use error::{Error, Result, MAX_ORDER};
pub use model::QuadraticOdeSystem;
pub use series::{BiPoly, Monomial};
