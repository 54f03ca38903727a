//! Physical parameters, the Lorentzian cavity spectral density and the
//! anti-adiabaticity diagnostic.
//!
//! All frequencies and inverse times are in units of `gamma0` unless a
//! caller overrides it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Threshold on `epsilon` below which the polaron-frame second-order
/// treatment is flagged as anti-adiabatic.
pub const DEFAULT_EPSILON_THRESHOLD: f64 = 0.1;

/// Parameters of the qubit + Lorentzian cavity + single phonon mode model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    /// Effective qubit-cavity coupling. Sets the unit of inverse time.
    pub gamma0: T,
    /// Cavity spectral width.
    pub lambda: T,
    /// Cavity detuning.
    pub delta: T,
    /// Phonon frequency.
    pub omega_ph: T,
    /// Dimensionless qubit-phonon coupling.
    pub g_p: T,
    /// Qubit splitting. Only places the spectral density on the absolute
    /// frequency axis; rates live in the rotating frame and never see it.
    pub omega0: T,
}

impl<T: Real> Default for ModelParams<T> {
    fn default() -> Self {
        Self {
            gamma0: T::one(),
            lambda: T::one(),
            delta: T::zero(),
            omega_ph: T::lit(10.0),
            g_p: T::zero(),
            omega0: T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport<T> {
    pub epsilon: T,
    pub anti_adiabatic: bool,
}

/// Names of the parameters that may be swept or overridden by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Gamma0,
    Lambda,
    Delta,
    OmegaPh,
    GP,
    Omega0,
}

impl ParamName {
    pub const ALL: [ParamName; 6] = [
        ParamName::Gamma0,
        ParamName::Lambda,
        ParamName::Delta,
        ParamName::OmegaPh,
        ParamName::GP,
        ParamName::Omega0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Gamma0 => "gamma0",
            ParamName::Lambda => "lambda",
            ParamName::Delta => "delta",
            ParamName::OmegaPh => "omega_ph",
            ParamName::GP => "g_p",
            ParamName::Omega0 => "omega0",
        }
    }

    /// Accepts both `omega_ph` and the flag spelling `omega-ph`.
    pub fn parse(name: &str) -> Result<Self> {
        let norm = name.trim().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown parameter `{name}`")))
    }
}

impl std::fmt::Display for ParamName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl<T: Real> ModelParams<T> {
    pub fn get(&self, name: ParamName) -> T {
        match name {
            ParamName::Gamma0 => self.gamma0,
            ParamName::Lambda => self.lambda,
            ParamName::Delta => self.delta,
            ParamName::OmegaPh => self.omega_ph,
            ParamName::GP => self.g_p,
            ParamName::Omega0 => self.omega0,
        }
    }

    pub fn with(mut self, name: ParamName, value: T) -> Self {
        match name {
            ParamName::Gamma0 => self.gamma0 = value,
            ParamName::Lambda => self.lambda = value,
            ParamName::Delta => self.delta = value,
            ParamName::OmegaPh => self.omega_ph = value,
            ParamName::GP => self.g_p = value,
            ParamName::Omega0 => self.omega0 = value,
        }
        self
    }

    /// Returns the parameters unchanged if every invariant holds, otherwise
    /// an error naming the first offending field.
    pub fn validate(self) -> Result<Self> {
        self.check(false)
    }

    /// As [`validate`](Self::validate) but admits `gamma0 == 0`, the
    /// decoupled-cavity limit used by the brute-force oracle.
    pub fn validate_allow_decoupled(self) -> Result<Self> {
        self.check(true)
    }

    fn check(self, allow_zero_gamma0: bool) -> Result<Self> {
        for name in ParamName::ALL {
            if !self.get(name).is_finite() {
                return Err(Error::InvalidParam {
                    field: name.as_str(),
                    requirement: "finite",
                });
            }
        }
        if allow_zero_gamma0 {
            if self.gamma0 < T::zero() {
                return Err(Error::InvalidParam {
                    field: "gamma0",
                    requirement: "non-negative",
                });
            }
        } else if !(self.gamma0 > T::zero()) {
            return Err(Error::InvalidParam {
                field: "gamma0",
                requirement: "positive",
            });
        }
        if !(self.lambda > T::zero()) {
            return Err(Error::InvalidParam {
                field: "lambda",
                requirement: "positive",
            });
        }
        if !(self.omega_ph > T::zero()) {
            return Err(Error::InvalidParam {
                field: "omega_ph",
                requirement: "positive",
            });
        }
        if self.g_p < T::zero() {
            return Err(Error::InvalidParam {
                field: "g_p",
                requirement: "non-negative",
            });
        }
        Ok(self)
    }

    /// Lorentzian cavity spectral density, peaked at `omega0 - delta` with
    /// height `gamma0 / 2π` and half width `lambda`.
    pub fn spectral_density(&self, omega: T) -> T {
        let x = omega - self.omega0 + self.delta;
        let l2 = self.lambda * self.lambda;
        self.gamma0 / (T::lit(2.0) * T::PI()) * l2 / (x * x + l2)
    }

    /// Renormalized adiabaticity `gamma0 e^{-2 g_p^2} / omega_ph`, flagged
    /// against [`DEFAULT_EPSILON_THRESHOLD`].
    pub fn adiabaticity(&self) -> ValidityReport<T> {
        self.adiabaticity_with_threshold(T::lit(DEFAULT_EPSILON_THRESHOLD))
    }

    pub fn adiabaticity_with_threshold(&self, threshold: T) -> ValidityReport<T> {
        let epsilon = self.gamma0 * (-T::lit(2.0) * self.g_p * self.g_p).exp() / self.omega_ph;
        ValidityReport {
            epsilon,
            anti_adiabatic: epsilon < threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type P = ModelParams<f64>;

    fn base() -> P {
        P::default()
    }

    #[test]
    fn defaults_are_accepted() {
        let p = P {
            omega_ph: 10.0,
            ..base()
        };
        assert_eq!(p.validate().unwrap(), p);
    }

    #[test]
    fn zero_lambda_names_the_field() {
        let err = P { lambda: 0.0, ..base() }.validate().unwrap_err();
        assert_eq!(err.to_string(), "lambda must be positive");
    }

    #[test]
    fn non_finite_and_negative_fields_rejected() {
        assert!(P { gamma0: f64::NAN, ..base() }.validate().is_err());
        assert!(P { omega_ph: -1.0, ..base() }.validate().is_err());
        assert!(P { g_p: -0.1, ..base() }.validate().is_err());
        assert!(P { delta: f64::INFINITY, ..base() }.validate().is_err());
        let err = P { gamma0: 0.0, ..base() }.validate().unwrap_err();
        assert!(err.to_string().contains("gamma0"));
        assert!(P { gamma0: 0.0, ..base() }.validate_allow_decoupled().is_ok());
    }

    #[test]
    fn strong_phonon_coupling_point_is_accepted() {
        let p = P {
            gamma0: 1.0,
            lambda: 0.5,
            delta: 10.0,
            omega_ph: 10.0,
            g_p: 2.0,
            omega0: 0.0,
        };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn spectral_density_peak_and_half_width() {
        let p = base();
        assert!((p.spectral_density(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((p.spectral_density(1.0) - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let shifted = P {
            omega0: 3.0,
            delta: 1.0,
            ..base()
        };
        // peak sits at omega0 - delta
        assert!((shifted.spectral_density(2.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn spectral_density_normalization() {
        // Substituting x = λ tan φ turns the integral into a constant
        // integrand; check the direct window sum instead.
        let p = base();
        let half_width = 1.0e3 * p.lambda;
        let n = 2_000_000;
        let h = 2.0 * half_width / n as f64;
        let sum: f64 = (0..n)
            .map(|k| p.spectral_density(-half_width + (k as f64 + 0.5) * h) * h)
            .sum();
        let tails = p.gamma0 * p.lambda / PI * (p.lambda / half_width).atan();
        assert!(((sum + tails) - 0.5).abs() / 0.5 < 1e-6);
        // the window alone is within the 1e-3 relative captured-weight margin
        assert!((sum - 0.5).abs() / 0.5 < 1e-3);
    }

    #[test]
    fn adiabaticity_examples() {
        let r = P { omega_ph: 10.0, ..base() }.adiabaticity();
        assert!((r.epsilon - 0.1).abs() < 1e-15);
        assert!(!r.anti_adiabatic);
        let r = P {
            omega_ph: 10.0,
            g_p: 2.0,
            ..base()
        }
        .adiabaticity();
        assert!((r.epsilon - (-8.0f64).exp() / 10.0).abs() < 1e-18);
        assert!((r.epsilon - 3.3546e-5).abs() < 1e-9);
        assert!(r.anti_adiabatic);
        let r = P { omega_ph: 1.0, ..base() }.adiabaticity();
        assert_eq!(r.epsilon, 1.0);
        assert!(!r.anti_adiabatic);
    }

    #[test]
    fn param_names_parse_both_spellings() {
        assert_eq!(ParamName::parse("omega-ph").unwrap(), ParamName::OmegaPh);
        assert_eq!(ParamName::parse("g_p").unwrap(), ParamName::GP);
        assert!(ParamName::parse("kappa").is_err());
    }

    proptest! {
        #[test]
        fn spectral_density_symmetric(x in -50.0f64..50.0, delta in -10.0f64..10.0, lambda in 0.01f64..5.0) {
            let p = P { delta, lambda, omega0: 1.3, ..base() };
            let c = p.omega0 - p.delta;
            let l = p.spectral_density(c + x);
            let r = p.spectral_density(c - x);
            prop_assert!((l - r).abs() <= 1e-12 * l);
            prop_assert!(l > 0.0);
        }

        #[test]
        fn adiabaticity_monotone(g in 0.0f64..3.0, dg in 0.001f64..1.0, om in 0.1f64..50.0, dom in 0.01f64..10.0, g0 in 0.01f64..5.0, dg0 in 0.01f64..5.0) {
            let p = P { gamma0: g0, omega_ph: om, g_p: g, ..base() };
            let e = p.adiabaticity().epsilon;
            let more_phonon = P { g_p: g + dg, ..p };
            let faster_phonon = P { omega_ph: om + dom, ..p };
            let stronger_cavity = P { gamma0: g0 + dg0, ..p };
            prop_assert!(more_phonon.adiabaticity().epsilon <= e);
            prop_assert!(faster_phonon.adiabaticity().epsilon < e);
            prop_assert!(stronger_cavity.adiabaticity().epsilon > e);
        }
    }
}
