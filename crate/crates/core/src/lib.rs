//! Multi-product monopoly pricing when the seller also chooses what the buyer
//! learns about their values.
//!
//! The crate is `no_std` (it needs `alloc`). Everything operates on finite-support
//! value distributions for a unit-demand, risk-neutral buyer:
//!
//! - [`model`]: distributions, information structures, posteriors, mechanisms,
//!   buyer best response, IC/IR audits, revenue and welfare.
//! - [`disclosure`]: horizontal and coarse horizontal disclosure, and the
//!   pooling program behind the largest uniform price that still sells with
//!   probability one.
//! - [`approx`]: the constructive pricing mechanisms (uniform, two-price,
//!   best-of-three for two products, full-surplus pricing) and the
//!   distributional condition checkers.
//! - [`oracle`]: a dense simplex solver, max flow, the optimal-menu LP for
//!   fixed posteriors, and brute-force bounds on the optimal revenue.
//! - [`instances`]: named instances and seeded random generators.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod approx;
pub mod disclosure;
mod error;
pub mod instances;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{
    InformationStructure, Mechanism, PricingMechanism, SignalLabel, SignalStats, TieBreak,
    ValueDistribution,
};

/// Default comparison tolerance for audits and posterior feasibility checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance scaled to the magnitude of the numbers being compared.
pub(crate) fn scaled_tol(tol: f64, scale: f64) -> f64 {
    tol * scale.abs().max(1.0)
}
