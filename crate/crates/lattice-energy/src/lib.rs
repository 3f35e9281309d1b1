// `!(x > 0.0)` guards intentionally reject NaN; the suggested rewrite loses that.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Gaussian energies of periodic point configurations.
//!
//! This crate evaluates the pair energy
//! `E(Gamma) = lim (1/#points) sum exp(-alpha |gamma - gamma'|^2)` of
//! periodic sets `Gamma = union_j (Lambda + x_j)` through several
//! independent routes (direct lattice sums, Poisson-summed dual series,
//! tensor factorization, and a cubic-AGM identity for the honeycomb),
//! provides the special functions behind them (Jacobi theta-3 in series and
//! triple-product form, Montgomery's Q), optimizes shift parameters on the
//! torus, and re-verifies the known optimality statements numerically with
//! certified truncation budgets.
//!
//! Every truncated sum carries an explicit tail bound; the verification
//! suite ([`verify::run_all`]) accepts a margin only when it exceeds the
//! consumed error budget.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `lattice-energy` binary for the command-line front end.

pub mod cli;
pub mod configs;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod optimize;
pub mod special;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{GaussianPotential, Lattice, PeriodicConfig};
