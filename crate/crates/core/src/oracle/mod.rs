//! Independent ground truth for the analytic chain.
//!
//! * [`quadrature_rates`] integrates the closed-form correlation function
//!   directly, with no sideband expansion.
//! * [`exact_evolution`] solves the Schrödinger equation of the full
//!   lab-frame Hamiltonian (qubit, discretized Lorentzian cavity, phonon
//!   mode) in the one-excitation sector, without any polaron transform.
//! * [`verify_polaron_transform`] checks the Lang-Firsov operator identities
//!   on truncated Fock matrices.

mod bath;
mod compare;
mod exact;
mod polaron;
mod quadrature;

pub use bath::{discretize_bath, BathDiscretization, OracleConfig};
pub use compare::{compare_oracle, ComparisonReport, ScalingDiagnostic};
pub use exact::{exact_evolution, ExactSample};
pub use polaron::{polaron_convergence, verify_polaron_transform, PolaronCheck};
pub use quadrature::{quadrature_rates, quadrature_rates_with};
