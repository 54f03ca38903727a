use crate::error::Result;
use crate::model::ModelParams;
use crate::numerics::{integrate_complex, QuadratureSpec};
use crate::rates::{check_time, correlation_function};
use crate::scalar::Real;

const DEFAULT_MAX_PANELS: usize = 2_000_000;

/// `(Γ(t), S(t))` as real and imaginary parts of `∫₀ᵗ C(s) ds`, integrated
/// adaptively from the closed-form correlation function.
pub fn quadrature_rates<T: Real>(p: &ModelParams<T>, t: T, tol: T) -> Result<(T, T)> {
    quadrature_rates_with(p, t, tol, DEFAULT_MAX_PANELS)
}

pub fn quadrature_rates_with<T: Real>(p: &ModelParams<T>, t: T, tol: T, max_panels: usize) -> Result<(T, T)> {
    let p = p.validate_allow_decoupled()?;
    check_time(t)?;
    // fastest instantaneous frequency of the integrand
    let fastest = p.omega_ph * T::lit(4.0) * p.g_p * p.g_p + p.delta.abs() + p.lambda;
    let spec = QuadratureSpec {
        abs_tol: tol,
        max_panel_width: T::PI() / (T::lit(4.0) * fastest),
        max_panels,
    };
    let v = integrate_complex(|s| correlation_function(&p, s), T::zero(), t, &spec)?;
    Ok((v.re, v.im))
}
