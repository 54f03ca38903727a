//! Reduced qubit dynamics of the Jaynes–Cummings–Holstein model: a qubit
//! coupled to a Lorentzian cavity bath and to a single phonon mode.
//!
//! The analytic chain runs
//! [`model`] → [`rates`] → [`dynamics`] → [`nonmarkov`], with [`sweep`]
//! producing figure-style grids from it and [`oracle`] providing
//! independent brute-force checks. All frequencies and rates are in units
//! of the cavity coupling `γ₀`, times in units of `1/γ₀`.
//!
//! The analytic modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar type for the common cases. The oracle and
//! sweep layers work in `f64` only.

// `!(x > 0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod model;
pub mod nonmarkov;
pub mod numerics;
pub mod oracle;
pub mod rates;
pub mod scalar;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Params = model::ModelParams<f64>;
pub type Params32 = model::ModelParams<f32>;
pub type Truncation = rates::TruncationSpec<f64>;
pub type Truncation32 = rates::TruncationSpec<f32>;
pub type Evaluator = rates::RateEvaluator<f64>;
pub type Evaluator32 = rates::RateEvaluator<f32>;
pub type Amplitudes = dynamics::InitialAmplitudes<f64>;
pub type Amplitudes32 = dynamics::InitialAmplitudes<f32>;
pub type State = dynamics::QubitState<f64>;
pub type State32 = dynamics::QubitState<f32>;
pub type Scan = nonmarkov::ScanSpec<f64>;
pub type Scan32 = nonmarkov::ScanSpec<f32>;
pub type Backflow = nonmarkov::BackflowReport<f64>;
pub type Backflow32 = nonmarkov::BackflowReport<f32>;
