use rayon::prelude::*;

use crate::dynamics::{coherence_l1, density_from_factors, DecoherenceFactors};
use crate::error::{Error, Result};
use crate::nonmarkov::nonmarkovianity;
use crate::rates::RateEvaluator;

use super::grid::{CellFlag, GridAxes, GridAxis, GridResult};
use super::spec::{SweepMode, SweepSpec};

fn axes_of(spec: &SweepSpec, time: Option<Vec<f64>>, column: &str) -> GridAxes {
    GridAxes {
        grid: spec
            .axes()
            .into_iter()
            .map(|a| GridAxis {
                name: a.param.to_string(),
                values: a.values.clone(),
            })
            .collect(),
        time,
        columns: vec![column.to_string()],
    }
}

fn echo(spec: &SweepSpec) -> serde_json::Value {
    serde_json::to_value(spec).expect("sweep spec serializes")
}

/// Cells run in parallel on the current rayon pool and are collected in
/// cell order, so the result does not depend on scheduling.
fn run_cells<F>(spec: &SweepSpec, width: usize, cell: F) -> (Vec<Vec<Option<f64>>>, Vec<CellFlag>)
where
    F: Fn(usize) -> Result<(Vec<f64>, CellFlag)> + Sync,
{
    (0..spec.cell_count())
        .into_par_iter()
        .map(|i| match cell(i) {
            Ok((values, flag)) => (values.into_iter().map(Some).collect(), flag),
            Err(e) => {
                let p = spec.cell_params(i);
                log::warn!("cell {i} ({:?}) failed: {e}", p);
                (vec![None; width], CellFlag::error(e.to_string()))
            }
        })
        .unzip()
}

/// `C_l1(t)` on the spec's time grid for every cell.
pub fn run_coherence_series(spec: &SweepSpec) -> Result<GridResult> {
    spec.validate()?;
    if spec.mode != SweepMode::CoherenceVsTime {
        return Err(Error::InvalidInput("run_coherence_series needs mode coherence_vs_time".into()));
    }
    let times = spec.time_grid();
    let (values, flags) = run_cells(spec, times.len(), |i| {
        let p = spec.cell_params(i);
        let eval = RateEvaluator::new(&p, &spec.trunc)?;
        let series = times
            .iter()
            .map(|&t| {
                let (gamma, phi) = eval.integrals(t);
                let state = density_from_factors(&spec.init, &DecoherenceFactors::from_integrals(t, gamma, phi))?;
                Ok(coherence_l1(&state))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((series, CellFlag::ok()))
    });
    GridResult::new(echo(spec), axes_of(spec, Some(times), "C_l1"), values, flags)
}

/// The backflow measure `N` over `[0, time_horizon]` for every cell.
pub fn run_nm_grid(spec: &SweepSpec) -> Result<GridResult> {
    spec.validate()?;
    if spec.mode != SweepMode::NmGrid {
        return Err(Error::InvalidInput("run_nm_grid needs mode nm_grid".into()));
    }
    let (values, flags) = run_cells(spec, 1, |i| {
        let p = spec.cell_params(i);
        let report = nonmarkovianity(&p, &spec.init, spec.time_horizon, &spec.trunc, &spec.scan)?;
        let mut notes = report.warnings.clone();
        if !report.converged {
            notes.push(format!(
                "backflow beyond the horizon bounded by {:e}, above tail_tol {:e}",
                report.tail_bound, spec.scan.tail_tol
            ));
        }
        let flag = if notes.is_empty() {
            CellFlag::ok()
        } else {
            CellFlag::warning(notes.join("; "))
        };
        Ok((vec![report.n], flag))
    });
    GridResult::new(echo(spec), axes_of(spec, None, "N"), values, flags)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<GridResult> {
    match spec.mode {
        SweepMode::CoherenceVsTime => run_coherence_series(spec),
        SweepMode::NmGrid => run_nm_grid(spec),
    }
}

/// [`run_sweep`] on a dedicated pool of `jobs` threads; `None` uses the
/// global pool (one thread per available core).
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: Option<usize>) -> Result<GridResult> {
    match jobs {
        None => run_sweep(spec),
        Some(0) => Err(Error::InvalidParam {
            field: "jobs",
            requirement: "at least 1",
        }),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start {n} worker threads: {e}")))?
            .install(|| run_sweep(spec)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, ParamName};
    use crate::sweep::grid::FlagStatus;
    use crate::sweep::spec::Axis;

    #[test]
    fn closed_form_column() {
        let mut spec = SweepSpec::new(
            "c",
            SweepMode::CoherenceVsTime,
            Axis::list(ParamName::Lambda, &[1.0]),
            None,
            ModelParams::default(),
        );
        spec.time_horizon = 2.0;
        spec.t_samples = 3;
        let r = run_coherence_series(&spec).unwrap();
        let gamma = |t: f64| 0.5 * (t - (1.0 - (-t).exp()));
        let expected = [1.0, (-gamma(1.0)).exp(), (-gamma(2.0)).exp()];
        for (v, e) in r.values[0].iter().zip(expected) {
            assert!((v.unwrap() - e).abs() < 1e-14);
        }
        assert_eq!(r.axes.time, Some(vec![0.0, 1.0, 2.0]));
    }

    #[test]
    fn markovian_grid_is_zero() {
        let spec = SweepSpec::new(
            "z",
            SweepMode::NmGrid,
            Axis::list(ParamName::Lambda, &[0.5, 1.0]),
            Some(Axis::list(ParamName::Gamma0, &[0.5, 1.0])),
            ModelParams::default(),
        );
        let r = run_nm_grid(&spec).unwrap();
        assert_eq!(r.values, vec![vec![Some(0.0)]; 4]);
        assert!(r.flags.iter().all(|f| f.status == FlagStatus::Ok));
    }

    #[test]
    fn failing_cells_are_flagged_not_fatal() {
        let spec = SweepSpec::new(
            "f",
            SweepMode::CoherenceVsTime,
            Axis::list(ParamName::Lambda, &[1.0, 2.0]),
            Some(Axis::list(ParamName::GP, &[0.0, 40.0])),
            ModelParams::default(),
        );
        let r = run_coherence_series(&spec).unwrap();
        assert_eq!(r.failed_cells(), 2);
        assert_eq!(r.flags[1].status, FlagStatus::Error);
        assert!(r.values[1].iter().all(Option::is_none));
        assert!(r.values[0].iter().all(Option::is_some));
    }

    #[test]
    fn mode_mismatch_and_empty_axis_are_rejected() {
        let mut spec = SweepSpec::new(
            "m",
            SweepMode::CoherenceVsTime,
            Axis::list(ParamName::Lambda, &[1.0]),
            None,
            ModelParams::default(),
        );
        assert!(run_nm_grid(&spec).is_err());
        spec.axis1.values.clear();
        assert!(run_coherence_series(&spec).is_err());
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let spec = SweepSpec::new(
            "p",
            SweepMode::NmGrid,
            Axis::linspace(ParamName::Delta, 0.0, 10.0, 3),
            Some(Axis::list(ParamName::Lambda, &[0.1, 0.5])),
            ModelParams::default(),
        );
        let a = run_sweep_with_jobs(&spec, Some(1)).unwrap();
        let b = run_sweep_with_jobs(&spec, Some(3)).unwrap();
        assert_eq!(a, b);
        assert!(run_sweep_with_jobs(&spec, Some(0)).is_err());
    }
}
