use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::InitialAmplitudes;
use crate::error::{Error, Result};
use crate::model::{ModelParams, ParamName};
use crate::nonmarkov::ScanSpec;
use crate::rates::TruncationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// `C_l1(t)` on a uniform time grid for every axis value.
    CoherenceVsTime,
    /// The backflow measure `N` on a two-parameter grid.
    NmGrid,
}

/// One swept parameter and its strictly increasing values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: ParamName,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn list(param: ParamName, values: &[f64]) -> Self {
        Self {
            param,
            values: values.to_vec(),
        }
    }

    /// `count` points spanning `[min, max]`.
    pub fn linspace(param: ParamName, min: f64, max: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![min],
            _ => (0..count)
                .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        Self { param, values }
    }

    /// `count` points spanning `(min, max]`, for ranges whose lower end is
    /// excluded.
    pub fn half_open(param: ParamName, min: f64, max: f64, count: usize) -> Self {
        let values = (1..=count)
            .map(|i| min + (max - min) * i as f64 / count as f64)
            .collect();
        Self { param, values }
    }

    fn validate(&self, min_count: usize) -> Result<()> {
        if matches!(self.param, ParamName::Omega0) {
            return Err(Error::InvalidInput(
                "sweep axes must be one of gamma0, lambda, delta, omega_ph, g_p".into(),
            ));
        }
        if self.values.len() < min_count {
            return Err(Error::InvalidInput(format!(
                "axis `{}` needs at least {min_count} value(s), got {}",
                self.param,
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("axis `{}` has non-finite values", self.param)));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "axis `{}` values must be strictly increasing",
                self.param
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Label used as the output file stem.
    pub name: String,
    pub mode: SweepMode,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    /// Values of every parameter not on an axis.
    pub fixed: ModelParams<f64>,
    /// End of the time grid, and the horizon of the backflow scan.
    pub time_horizon: f64,
    /// Points of the uniform time grid over `[0, time_horizon]`.
    pub t_samples: usize,
    pub init: InitialAmplitudes<f64>,
    pub trunc: TruncationSpec<f64>,
    pub scan: ScanSpec<f64>,
}

impl SweepSpec {
    pub fn new(name: &str, mode: SweepMode, axis1: Axis, axis2: Option<Axis>, fixed: ModelParams<f64>) -> Self {
        Self {
            name: name.to_string(),
            mode,
            axis1,
            axis2,
            fixed,
            time_horizon: 50.0,
            t_samples: 1001,
            init: InitialAmplitudes::equatorial(),
            trunc: TruncationSpec::default(),
            scan: ScanSpec::default(),
        }
    }

    pub fn axes(&self) -> Vec<&Axis> {
        std::iter::once(&self.axis1).chain(self.axis2.as_ref()).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.axes().iter().map(|a| a.values.len()).product()
    }

    /// Parameters of cell `index`, row-major over `(axis1, axis2)`.
    pub fn cell_params(&self, index: usize) -> ModelParams<f64> {
        let n2 = self.axis2.as_ref().map_or(1, |a| a.values.len());
        let mut p = self.fixed.with(self.axis1.param, self.axis1.values[index / n2]);
        if let Some(a2) = &self.axis2 {
            p = p.with(a2.param, a2.values[index % n2]);
        }
        p
    }

    /// Uniform time grid of `t_samples` points over `[0, time_horizon]`.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.t_samples;
        (0..n)
            .map(|i| self.time_horizon * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::InvalidInput("sweep name must be a non-empty file stem".into()));
        }
        let min_count = match self.mode {
            SweepMode::CoherenceVsTime => 1,
            SweepMode::NmGrid => 2,
        };
        self.axis1.validate(min_count)?;
        match (&self.axis2, self.mode) {
            (None, SweepMode::NmGrid) => {
                return Err(Error::InvalidInput("nm_grid sweeps need two axes".into()));
            }
            (Some(a2), _) => {
                a2.validate(min_count)?;
                if a2.param == self.axis1.param {
                    return Err(Error::InvalidInput("the two sweep axes must differ".into()));
                }
            }
            (None, _) => {}
        }
        if !(self.time_horizon > 0.0) || !self.time_horizon.is_finite() {
            return Err(Error::InvalidParam {
                field: "time_horizon",
                requirement: "positive and finite",
            });
        }
        if self.t_samples < 2 {
            return Err(Error::InvalidParam {
                field: "t_samples",
                requirement: "at least 2",
            });
        }
        self.trunc.validate()?;
        InitialAmplitudes::new(self.init.a, self.init.b)?;
        // the fixed parameters must be admissible once the axes are applied
        self.cell_params(0).validate_allow_decoupled()?;
        Ok(())
    }

    /// Hex prefix of the SHA-256 of the canonical JSON encoding; identical
    /// specs share it, so it names output files reproducibly.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("sweep spec serializes");
        Sha256::digest(&json)
            .iter()
            .take(6)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
