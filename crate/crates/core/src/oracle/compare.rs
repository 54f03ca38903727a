use serde::{Deserialize, Serialize};

use crate::dynamics::{coherence_l1, InitialAmplitudes};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rates::{RateEvaluator, TruncationSpec};

use super::bath::OracleConfig;
use super::exact::exact_evolution;

/// `γ` values below this are too small for a meaningful relative deviation.
const GAMMA_FLOOR: f64 = 1e-12;

/// Master-equation prediction against the exact simulation on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub params: ModelParams<f64>,
    pub times: Vec<f64>,
    pub coherence_master: Vec<f64>,
    pub coherence_exact: Vec<f64>,
    /// `|C_master - C_exact|` per time.
    pub coherence_deviation: Vec<f64>,
    pub max_coherence_deviation: f64,
    /// `max_t |γ_exact / γ_master - 1|` with `γ = -ln(C / 2|ab|)`.
    pub max_gamma_rel_deviation: f64,
    /// Present whenever `γ₀ > 0`.
    pub scaling: Option<ScalingDiagnostic>,
}

/// Repeats the comparison at `γ₀/2`. Second-order accuracy makes the
/// deviation shrink faster than the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingDiagnostic {
    pub gamma0_halved: f64,
    pub max_gamma_rel_deviation_halved: f64,
    /// Full-coupling deviation over half-coupling deviation.
    pub ratio: f64,
}

struct Deviations {
    master: Vec<f64>,
    exact: Vec<f64>,
    gamma_rel: f64,
}

fn deviations(
    p: &ModelParams<f64>,
    cfg: &OracleConfig,
    init: &InitialAmplitudes<f64>,
    t_grid: &[f64],
) -> Result<Deviations> {
    let eval = RateEvaluator::new(p, &TruncationSpec::default())?;
    let c0 = init.initial_coherence();
    let exact: Vec<f64> = exact_evolution(p, cfg, init, t_grid)?
        .iter()
        .map(|s| coherence_l1(&s.rho))
        .collect();
    let mut master = Vec::with_capacity(t_grid.len());
    let mut gamma_rel = 0f64;
    for (&t, &ce) in t_grid.iter().zip(&exact) {
        let (gamma, _) = eval.integrals(t);
        master.push(c0 * (-gamma).exp());
        if gamma.abs() > GAMMA_FLOOR {
            let gamma_exact = -(ce / c0).ln();
            gamma_rel = gamma_rel.max((gamma_exact / gamma - 1.0).abs());
        }
    }
    Ok(Deviations {
        master,
        exact,
        gamma_rel,
    })
}

/// Runs the master equation and [`exact_evolution`](super::exact_evolution)
/// on the same grid, then repeats both at half the cavity coupling.
pub fn compare_oracle(
    p: &ModelParams<f64>,
    cfg: &OracleConfig,
    init: &InitialAmplitudes<f64>,
    t_grid: &[f64],
) -> Result<ComparisonReport> {
    let p = p.validate_allow_decoupled()?;
    if init.initial_coherence() == 0.0 {
        return Err(Error::InvalidInput(
            "initial state has no coherence to compare (ab = 0)".into(),
        ));
    }
    let full = deviations(&p, cfg, init, t_grid)?;
    let scaling = if p.gamma0 > 0.0 {
        let half = ModelParams {
            gamma0: p.gamma0 / 2.0,
            ..p
        };
        let d = deviations(&half, cfg, init, t_grid)?;
        Some(ScalingDiagnostic {
            gamma0_halved: half.gamma0,
            max_gamma_rel_deviation_halved: d.gamma_rel,
            ratio: full.gamma_rel / d.gamma_rel,
        })
    } else {
        None
    };
    let coherence_deviation: Vec<f64> = full
        .master
        .iter()
        .zip(&full.exact)
        .map(|(m, e)| (m - e).abs())
        .collect();
    Ok(ComparisonReport {
        params: p,
        times: t_grid.to_vec(),
        max_coherence_deviation: coherence_deviation.iter().fold(0.0, |m, &d| m.max(d)),
        coherence_master: full.master,
        coherence_exact: full.exact,
        coherence_deviation,
        max_gamma_rel_deviation: full.gamma_rel,
        scaling,
    })
}
