//! Numerical checks of the decay-rate machinery: the potential function,
//! amortized decay rates, grid maximization against the claimed bounds, and
//! measured truncation error curves.

pub mod curve;
pub mod grid;
pub mod kappa;
pub mod potential;
pub mod suite;

pub use curve::{amo_envelope, cnf_envelope, empirical_decay_curve, empirical_decay_curve_amo, DecayCurve, DecayPoint};
pub use grid::{grid_max, grid_max_brute, GridResult, MIN_REFINE_PASSES, MIN_RESOLUTION};
pub use kappa::{eval_kappa, DomainError, Family, KappaSpec};
pub use potential::{big_phi, phi, phi_inv, phi_inv_derivative};
pub use suite::{render_table, verify_all_bounds, BoundReport, SuiteConfig, SuiteReport};
