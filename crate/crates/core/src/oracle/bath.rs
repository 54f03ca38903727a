use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Truncations for the brute-force simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Number of discrete cavity modes.
    pub modes: usize,
    /// Phonon Fock cutoff; `None` uses `max(24, fock_cutoff_rule(g_p))`.
    pub n_ph_max: Option<usize>,
    /// Integrator step; `None` uses `0.05 / ‖H‖`.
    pub dt: Option<f64>,
    /// Half width of the mode window around the Lorentzian center; `None`
    /// uses `25 λ`.
    pub window_halfwidth: Option<f64>,
    /// Tolerance for norm drift and Fock-edge population.
    pub integrator_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            modes: 300,
            n_ph_max: None,
            dt: None,
            window_halfwidth: None,
            integrator_tol: 1e-8,
        }
    }
}

/// Smallest phonon cutoff covering the displaced vacuum, mean `4g_p²`, out
/// to six standard deviations plus a margin of four levels.
pub fn fock_cutoff_rule(g_p: f64) -> usize {
    let mean = 4.0 * g_p * g_p;
    (mean + 6.0 * mean.sqrt() + 4.0).ceil() as usize
}

impl OracleConfig {
    pub fn resolved_n_ph_max(&self, g_p: f64) -> Result<usize> {
        let rule = fock_cutoff_rule(g_p);
        match self.n_ph_max {
            None => Ok(rule.max(24)),
            Some(n) if n >= rule => Ok(n),
            Some(_) => Err(Error::InvalidParam {
                field: "n_ph_max",
                requirement: "at least ceil(4 g_p^2 + 6 sqrt(4 g_p^2) + 4)",
            }),
        }
    }

    pub fn resolved_window(&self, lambda: f64) -> f64 {
        self.window_halfwidth.unwrap_or(25.0 * lambda)
    }
}

/// Discrete cavity modes standing in for the Lorentzian continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathDiscretization {
    /// `δ_k = ω₀ - ω_k`, centered on `Δ`.
    pub mode_detunings: Vec<f64>,
    /// `g_k = √(J(ω_k) dω)`
    pub couplings: Vec<f64>,
    pub window_halfwidth: f64,
    pub modes: usize,
}

impl BathDiscretization {
    /// `Σ g_k²`
    pub fn captured_weight(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }

    /// `Σ g_k² e^{iδ_k s}`, the discrete counterpart of `½γ₀λ e^{-(λ-iΔ)s}`.
    pub fn kernel(&self, s: f64) -> num_complex::Complex64 {
        self.couplings
            .iter()
            .zip(&self.mode_detunings)
            .map(|(g, d)| num_complex::Complex64::from_polar(g * g, d * s))
            .sum()
    }
}

/// Midpoint discretization of the spectral density on `M` equal bins
/// spanning `[-W, W]` around the Lorentzian center.
pub fn discretize_bath(p: &ModelParams<f64>, cfg: &OracleConfig) -> Result<BathDiscretization> {
    let p = p.validate_allow_decoupled()?;
    let window = cfg.resolved_window(p.lambda);
    if cfg.modes < 10 {
        return Err(Error::InvalidParam {
            field: "modes",
            requirement: "at least 10",
        });
    }
    if !(window >= 5.0 * p.lambda) {
        return Err(Error::InvalidParam {
            field: "window_halfwidth",
            requirement: "at least 5 lambda",
        });
    }
    let m = cfg.modes;
    let d_omega = 2.0 * window / m as f64;
    let mut mode_detunings = Vec::with_capacity(m);
    let mut couplings = Vec::with_capacity(m);
    for k in 0..m {
        let offset = -window + (k as f64 + 0.5) * d_omega;
        let detuning = p.delta + offset;
        // ω_k = ω₀ - δ_k
        let omega = p.omega0 - detuning;
        mode_detunings.push(detuning);
        couplings.push((p.spectral_density(omega) * d_omega).sqrt());
    }
    Ok(BathDiscretization {
        mode_detunings,
        couplings,
        window_halfwidth: window,
        modes: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    type P = ModelParams<f64>;

    #[test]
    fn captured_weight_matches_window_integral() {
        let b = discretize_bath(&P::default(), &OracleConfig::default()).unwrap();
        let expected = 0.5 * (2.0 / PI) * 25f64.atan();
        assert!((expected - 0.48728).abs() < 1e-5);
        assert!((b.captured_weight() - expected).abs() < 1e-5);
        assert_eq!(b.couplings.len(), 300);
    }

    #[test]
    fn captured_weight_within_band_for_wide_windows() {
        for (lambda, delta) in [(0.5, 0.0), (1.0, 3.0), (2.0, -1.0)] {
            for factor in [20.0, 25.0, 60.0] {
                let p = P { lambda, delta, ..P::default() };
                let cfg = OracleConfig {
                    window_halfwidth: Some(factor * lambda),
                    modes: 600,
                    ..OracleConfig::default()
                };
                let w = discretize_bath(&p, &cfg).unwrap().captured_weight() / (0.5 * lambda);
                assert!((0.9..=1.0).contains(&w), "{w}");
            }
        }
    }

    #[test]
    fn detunings_symmetric_about_delta() {
        let p = P { delta: 1.7, ..P::default() };
        let b = discretize_bath(&p, &OracleConfig::default()).unwrap();
        let m = b.modes;
        for k in 0..m / 2 {
            let lo = b.mode_detunings[k] - p.delta;
            let hi = b.mode_detunings[m - 1 - k] - p.delta;
            assert!((lo + hi).abs() < 1e-12);
            assert!((b.couplings[k] - b.couplings[m - 1 - k]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_coarse_configs() {
        let cfg = OracleConfig {
            modes: 1,
            ..OracleConfig::default()
        };
        assert!(discretize_bath(&P::default(), &cfg).is_err());
        let cfg = OracleConfig {
            window_halfwidth: Some(2.0),
            ..OracleConfig::default()
        };
        assert!(discretize_bath(&P::default(), &cfg).is_err());
    }

    #[test]
    fn kernel_converges_to_window_limited_continuum() {
        // The midpoint sum converges quickly in M to the window-truncated
        // Fourier integral; the remaining gap to ½γ₀λe^{-λs} is the weight
        // outside the window.
        let p = P::default();
        let s = 1.0_f64;
        let exact = Complex64::new(0.5 * (-s).exp(), 0.0);
        let missing = 0.5 * (1.0 - (2.0 / PI) * 25f64.atan());
        let mut errs = Vec::new();
        for m in [150, 300, 600] {
            let cfg = OracleConfig {
                modes: m,
                ..OracleConfig::default()
            };
            let err = (discretize_bath(&p, &cfg).unwrap().kernel(s) - exact).norm();
            assert!(err <= missing);
            errs.push(err);
        }
        assert!(errs[2] <= errs[1] && errs[1] <= errs[0] * 1.0001);
        // widening the window shrinks the gap
        let wide = OracleConfig {
            modes: 2400,
            window_halfwidth: Some(200.0),
            ..OracleConfig::default()
        };
        let err_wide = (discretize_bath(&p, &wide).unwrap().kernel(s) - exact).norm();
        assert!(err_wide < errs[2]);
    }

    #[test]
    fn kernel_tracks_lorentzian_inside_decay_window() {
        let p = P { lambda: 1.0, delta: 1.0, ..P::default() };
        let b = discretize_bath(&p, &OracleConfig::default()).unwrap();
        let missing = 0.5 * (1.0 - (2.0 / PI) * 25f64.atan());
        for k in 0..=50 {
            let s = 5.0 * k as f64 / 50.0;
            let exact = Complex64::new(-p.lambda, p.delta).scale(s).exp() * 0.5;
            assert!((b.kernel(s) - exact).norm() <= missing + 1e-6, "s={s}");
        }
    }

    #[test]
    fn cutoff_rule() {
        assert_eq!(fock_cutoff_rule(0.0), 4);
        assert_eq!(fock_cutoff_rule(2.0), 44);
        let cfg = OracleConfig {
            n_ph_max: Some(20),
            ..OracleConfig::default()
        };
        assert!(cfg.resolved_n_ph_max(2.0).is_err());
        assert_eq!(OracleConfig::default().resolved_n_ph_max(0.5).unwrap(), 24);
        assert_eq!(OracleConfig::default().resolved_n_ph_max(2.0).unwrap(), 44);
    }
}
