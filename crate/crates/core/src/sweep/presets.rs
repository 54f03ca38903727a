use crate::error::{Error, Result};
use crate::model::{ModelParams, ParamName};

use super::spec::{Axis, SweepMode, SweepSpec};

pub const PRESETS: [&str; 3] = ["fig1", "fig2", "fig3"];

/// Phonon frequency used by every preset, in units of `γ₀`.
const PRESET_OMEGA: f64 = 10.0;
const PRESET_HORIZON: f64 = 50.0;
const GRID_POINTS: usize = 60;

fn base() -> ModelParams<f64> {
    ModelParams {
        omega_ph: PRESET_OMEGA,
        ..ModelParams::default()
    }
}

/// Named figure reproductions. Each preset expands to one spec per value of
/// the parameter that distinguishes the figure panels.
///
/// * `fig1`: `C_l1(t)` over `λ ∈ {0.1, 0.3, 0.5, 1, 10}` × `Δ ∈ {0, 1, 10}`,
///   one spec per `g_p ∈ {0, 2}`, `t ∈ [0, 50]`.
/// * `fig2`: `N` over `Δ ∈ [0, 10]` × `λ ∈ (0.02, 2]` on 60 × 60, one spec
///   per `g_p ∈ {0, 2}`.
/// * `fig3`: `N` over `λ ∈ (0.02, 2]` × `g_p ∈ [0, 3]` on 60 × 60, one spec
///   per `Δ ∈ {0, 1, 10}`.
pub fn preset(name: &str) -> Result<Vec<SweepSpec>> {
    let specs = match name {
        "fig1" => [0.0, 2.0]
            .into_iter()
            .map(|g_p| {
                let mut s = SweepSpec::new(
                    &format!("fig1-gp{g_p}"),
                    SweepMode::CoherenceVsTime,
                    Axis::list(ParamName::Lambda, &[0.1, 0.3, 0.5, 1.0, 10.0]),
                    Some(Axis::list(ParamName::Delta, &[0.0, 1.0, 10.0])),
                    ModelParams { g_p, ..base() },
                );
                s.time_horizon = PRESET_HORIZON;
                s.t_samples = 5001;
                s
            })
            .collect(),
        "fig2" => [0.0, 2.0]
            .into_iter()
            .map(|g_p| {
                let mut s = SweepSpec::new(
                    &format!("fig2-gp{g_p}"),
                    SweepMode::NmGrid,
                    Axis::linspace(ParamName::Delta, 0.0, 10.0, GRID_POINTS),
                    Some(Axis::half_open(ParamName::Lambda, 0.02, 2.0, GRID_POINTS)),
                    ModelParams { g_p, ..base() },
                );
                s.time_horizon = PRESET_HORIZON;
                s
            })
            .collect(),
        "fig3" => [0.0, 1.0, 10.0]
            .into_iter()
            .map(|delta| {
                let mut s = SweepSpec::new(
                    &format!("fig3-delta{delta}"),
                    SweepMode::NmGrid,
                    Axis::half_open(ParamName::Lambda, 0.02, 2.0, GRID_POINTS),
                    Some(Axis::linspace(ParamName::GP, 0.0, 3.0, GRID_POINTS)),
                    ModelParams { delta, ..base() },
                );
                s.time_horizon = PRESET_HORIZON;
                s
            })
            .collect(),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for name in PRESETS {
            for spec in preset(name).unwrap() {
                spec.validate().unwrap();
                assert!(spec.name.starts_with(name));
            }
        }
        assert!(preset("fig4").is_err());
    }

    #[test]
    fn grid_shapes() {
        let fig2 = preset("fig2").unwrap();
        assert_eq!(fig2.len(), 2);
        assert_eq!(fig2[0].cell_count(), 3600);
        let lam = &fig2[0].axis2.as_ref().unwrap().values;
        assert!(lam[0] > 0.02 && (lam[59] - 2.0).abs() < 1e-15);
        assert_eq!(preset("fig3").unwrap().len(), 3);
        assert_eq!(preset("fig1").unwrap()[1].fixed.g_p, 2.0);
    }
}
