use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use jch_core::dynamics::{coherence_l1, density_from_factors, DecoherenceFactors, InitialAmplitudes};
use jch_core::model::ParamName;
use jch_core::nonmarkov::{default_horizon, nonmarkovianity};
use jch_core::oracle::{compare_oracle, exact_evolution, polaron_convergence, quadrature_rates, OracleConfig};
use jch_core::sweep::{
    file_name, preset, run_sweep_with_jobs, serialize_result, write_result, Axis, CellFlag, GridAxes, GridAxis,
    GridResult, OutputFormat, SweepMode, SweepSpec,
};
use jch_core::{Amplitudes, Error, Evaluator, Params, Result, Scan, Truncation};

use crate::args::{AmplitudeArgs, Cli, Command, FormatArg, ModeArg, OracleKind, PresetArg, SweepArgs, TimeGridArgs};
use crate::config::FileConfig;

const DEFAULT_T_MAX: f64 = 10.0;
const DEFAULT_T_SAMPLES: usize = 201;

/// Flags layered over the settings file layered over defaults.
struct Context {
    file: FileConfig,
    params: Params,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    jobs: Option<usize>,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let file = FileConfig::discover(cli.output.config.as_deref())?;
        let m = &cli.model;
        let base = file.params();
        let params = Params {
            gamma0: m.gamma0.unwrap_or(base.gamma0),
            lambda: m.lambda.unwrap_or(base.lambda),
            delta: m.delta.unwrap_or(base.delta),
            omega_ph: m.omega_ph.unwrap_or(base.omega_ph),
            g_p: m.g_p.unwrap_or(base.g_p),
            omega0: m.omega0.unwrap_or(base.omega0),
        };
        let format = match (cli.output.format, &file.format) {
            (Some(f), _) => Some(match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Svg => OutputFormat::Svg,
            }),
            (None, Some(s)) => Some(s.parse()?),
            (None, None) => None,
        };
        Ok(Self {
            params,
            out: cli.output.out.clone(),
            format,
            jobs: cli.output.jobs.or(file.jobs),
            file,
        })
    }

    fn format_for(&self, path: Option<&Path>) -> OutputFormat {
        self.format
            .or_else(|| path.and_then(OutputFormat::from_path))
            .unwrap_or(OutputFormat::Csv)
    }

    fn time_grid(&self, args: &TimeGridArgs) -> Result<Vec<f64>> {
        let t_max = args.t_max.or(self.file.t_max).unwrap_or(DEFAULT_T_MAX);
        let n = args.t_samples.or(self.file.t_samples).unwrap_or(DEFAULT_T_SAMPLES);
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParam {
                field: "t_max",
                requirement: "positive and finite",
            });
        }
        if n < 2 {
            return Err(Error::InvalidParam {
                field: "t_samples",
                requirement: "at least 2",
            });
        }
        Ok((0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect())
    }

    /// Writes to `--out`, or stdout without it.
    fn emit(&self, res: &GridResult) -> Result<()> {
        let format = self.format_for(self.out.as_deref());
        match &self.out {
            Some(path) => write_result(res, format, path),
            None => {
                let bytes = serialize_result(res, format)?;
                std::io::stdout().write_all(&bytes).map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                })
            }
        }
    }
}

fn amplitudes(args: &AmplitudeArgs) -> Result<Amplitudes> {
    let complement = |x: f64| (1.0 - x * x).max(0.0).sqrt();
    match (args.a, args.b) {
        (None, None) => Ok(InitialAmplitudes::equatorial()),
        (Some(a), None) => InitialAmplitudes::real(a, complement(a)),
        (None, Some(b)) => InitialAmplitudes::real(complement(b), b),
        (Some(a), Some(b)) => InitialAmplitudes::real(a, b),
    }
}

fn table(
    params: serde_json::Value,
    grid: Vec<GridAxis>,
    time: Option<Vec<f64>>,
    columns: &[&str],
    values: Vec<Vec<Option<f64>>>,
    flags: Vec<CellFlag>,
) -> Result<GridResult> {
    let axes = GridAxes {
        grid,
        time,
        columns: columns.iter().map(|c| c.to_string()).collect(),
    };
    GridResult::new(params, axes, values, flags)
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(cli: &Cli) -> Result<()> {
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Rates { time } => rates(&ctx, time),
        Command::Coherence { time, init } => coherence(&ctx, time, init),
        Command::Nonmarkov {
            horizon,
            intervals,
            init,
        } => nonmarkov(&ctx, *horizon, *intervals, init),
        Command::Sweep(args) => sweep(&ctx, cli, args),
        Command::Oracle { kind } => oracle(&ctx, kind),
    }
}

fn rates(ctx: &Context, time: &TimeGridArgs) -> Result<()> {
    let trunc = Truncation::default();
    let eval = Evaluator::new(&ctx.params, &trunc)?;
    let times = ctx.time_grid(time)?;
    let row = times
        .iter()
        .flat_map(|&t| {
            let s = eval.sample(t);
            [s.decay_rate, s.lamb_shift, s.gamma_cum, s.phi_cum].map(Some)
        })
        .collect();
    let params = json!({"command": "rates", "model": to_value(&ctx.params), "truncation": to_value(&trunc)});
    let res = table(params, vec![], Some(times), &["Gamma", "S", "gamma", "Phi"], vec![row], vec![CellFlag::ok()])?;
    ctx.emit(&res)
}

fn coherence(ctx: &Context, time: &TimeGridArgs, init: &AmplitudeArgs) -> Result<()> {
    let trunc = Truncation::default();
    let eval = Evaluator::new(&ctx.params, &trunc)?;
    let init = amplitudes(init)?;
    let times = ctx.time_grid(time)?;
    let mut row = Vec::with_capacity(4 * times.len());
    for &t in &times {
        let (gamma, phi) = eval.integrals(t);
        let state = density_from_factors(&init, &DecoherenceFactors::from_integrals(t, gamma, phi))?;
        let off = state.coherence();
        row.extend([coherence_l1(&state), state.population(0), off.re, off.im].map(Some));
    }
    let params = json!({
        "command": "coherence",
        "model": to_value(&ctx.params),
        "init": to_value(&init),
        "truncation": to_value(&trunc),
    });
    let res = table(
        params,
        vec![],
        Some(times),
        &["C_l1", "rho00", "rho01_re", "rho01_im"],
        vec![row],
        vec![CellFlag::ok()],
    )?;
    ctx.emit(&res)
}

fn nonmarkov(ctx: &Context, horizon: Option<f64>, intervals: bool, init: &AmplitudeArgs) -> Result<()> {
    let p = ctx.params.validate_allow_decoupled()?;
    let init = amplitudes(init)?;
    let horizon = horizon.or(ctx.file.horizon).unwrap_or_else(|| default_horizon(&p));
    let trunc = Truncation::default();
    let scan = Scan::default();
    let report = nonmarkovianity(&p, &init, horizon, &trunc, &scan)?;
    let mut notes = report.warnings.clone();
    if !report.converged {
        notes.push(format!("tail bound {:e} exceeds {:e}", report.tail_bound, scan.tail_tol));
    }
    let flag = || {
        if notes.is_empty() {
            CellFlag::ok()
        } else {
            CellFlag::warning(notes.join("; "))
        }
    };
    for n in &notes {
        eprintln!("warning: {n}");
    }
    let params = json!({
        "command": "nonmarkov",
        "model": to_value(&p),
        "init": to_value(&init),
        "horizon": horizon,
        "truncation": to_value(&trunc),
        "scan": to_value(&scan),
    });
    let res = if intervals {
        let mut gains = report.contributions.iter();
        let values: Vec<Vec<Option<f64>>> = report
            .intervals
            .iter()
            .map(|iv| {
                let gain = if iv.negative { *gains.next().unwrap_or(&0.0) } else { 0.0 };
                vec![Some(iv.t_start), Some(iv.t_end), Some(f64::from(u8::from(iv.negative))), Some(gain)]
            })
            .collect();
        let n = values.len();
        table(
            params,
            vec![GridAxis {
                name: "interval".into(),
                values: (0..n).map(|i| i as f64).collect(),
            }],
            None,
            &["t_start", "t_end", "negative", "backflow"],
            values,
            (0..n).map(|_| flag()).collect(),
        )?
    } else {
        let negative = report.intervals.iter().filter(|iv| iv.negative).count();
        table(
            params,
            vec![],
            None,
            &["N", "tail_bound", "converged", "negative_intervals"],
            vec![vec![
                Some(report.n),
                Some(report.tail_bound),
                Some(f64::from(u8::from(report.converged))),
                Some(negative as f64),
            ]],
            vec![flag()],
        )?
    };
    ctx.emit(&res)
}

/// `name=v1,v2,...` or `name:min:max:count`
fn parse_axis(text: &str) -> Result<Axis> {
    let bad = || Error::InvalidInput(format!("axis `{text}`: expected name=v1,v2,... or name:min:max:count"));
    if let Some((name, list)) = text.split_once('=') {
        let values = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Axis::list(ParamName::parse(name)?, &values));
    }
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let min: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[2].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[3].trim().parse().map_err(|_| bad())?;
    Ok(Axis::linspace(ParamName::parse(parts[0])?, min, max, count))
}

/// Applies explicitly given model parameters to a preset's fixed values.
/// Specs that become identical are merged; a spec whose distinguishing
/// parameter was overridden falls back to the bare preset name.
fn override_presets(cli: &Cli, ctx: &Context, name: &str, specs: Vec<SweepSpec>) -> Vec<SweepSpec> {
    let m = &cli.model;
    let f = &ctx.file;
    let given = [
        (ParamName::Gamma0, m.gamma0.or(f.gamma0)),
        (ParamName::Lambda, m.lambda.or(f.lambda)),
        (ParamName::Delta, m.delta.or(f.delta)),
        (ParamName::OmegaPh, m.omega_ph.or(f.omega_ph)),
        (ParamName::GP, m.g_p.or(f.g_p)),
        (ParamName::Omega0, m.omega0.or(f.omega0)),
    ];
    let mut out: Vec<SweepSpec> = Vec::new();
    for mut spec in specs {
        let mut renamed = false;
        for (param, value) in given {
            let Some(v) = value else { continue };
            if spec.axes().iter().any(|a| a.param == param) {
                eprintln!("warning: --{} ignored by {}: it is a sweep axis", param.as_str().replace('_', "-"), spec.name);
                continue;
            }
            if spec.fixed.get(param) != v {
                spec.fixed = spec.fixed.with(param, v);
                renamed = true;
            }
        }
        if renamed {
            spec.name = name.to_string();
        }
        let duplicate = out.iter().any(|o| SweepSpec { name: o.name.clone(), ..spec.clone() } == *o);
        if !duplicate {
            out.push(spec);
        }
    }
    out
}

fn sweep(ctx: &Context, cli: &Cli, args: &SweepArgs) -> Result<()> {
    let mut specs = match (args.preset, &args.axis1) {
        (Some(p), _) => {
            let name = match p {
                PresetArg::Fig1 => "fig1",
                PresetArg::Fig2 => "fig2",
                PresetArg::Fig3 => "fig3",
            };
            override_presets(cli, ctx, name, preset(name)?)
        }
        (None, Some(a1)) => {
            let axis2 = args.axis2.as_deref().map(parse_axis).transpose()?;
            let mode = match args.mode {
                Some(ModeArg::CoherenceVsTime) => SweepMode::CoherenceVsTime,
                Some(ModeArg::NmGrid) => SweepMode::NmGrid,
                None if axis2.is_some() => SweepMode::NmGrid,
                None => SweepMode::CoherenceVsTime,
            };
            vec![SweepSpec::new(&args.name, mode, parse_axis(a1)?, axis2, ctx.params)]
        }
        (None, None) => return Err(Error::InvalidInput("sweep needs --preset or --axis1".into())),
    };
    for spec in &mut specs {
        if let Some(t) = args.t_max.or(ctx.file.t_max) {
            spec.time_horizon = t;
        }
        if let Some(n) = args.t_samples.or(ctx.file.t_samples) {
            spec.t_samples = n;
        }
        spec.validate()?;
    }

    let single = specs.len() == 1;
    for spec in &specs {
        let res = run_sweep_with_jobs(spec, ctx.jobs)?;
        let failed = res.failed_cells();
        let flagged = res.flagged_cells();
        if flagged > 0 {
            eprintln!(
                "{}: {failed} of {} cells failed, {} carry warnings",
                spec.name,
                res.cell_count(),
                flagged - failed
            );
        }
        let path = match (&ctx.out, single) {
            (Some(p), true) => Some(p.clone()),
            (None, true) => None,
            (dir, false) => {
                let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
                    path: dir.display().to_string(),
                    message: e.to_string(),
                })?;
                let format = ctx.format_for(None);
                Some(dir.join(file_name(&spec.name, &spec.digest(), format)))
            }
        };
        match path {
            Some(path) => {
                let format = if single { ctx.format_for(Some(&path)) } else { ctx.format_for(None) };
                write_result(&res, format, &path)?;
                eprintln!("wrote {}", path.display());
            }
            None => ctx.emit(&res)?,
        }
    }
    Ok(())
}

fn oracle(ctx: &Context, kind: &OracleKind) -> Result<()> {
    match kind {
        OracleKind::Quadrature { time, tol, common } => {
            let times = ctx.time_grid(time)?;
            let mut row = Vec::new();
            let eval = if common.compare {
                Some(Evaluator::new(&ctx.params, &Truncation::default())?)
            } else {
                None
            };
            let mut worst = 0f64;
            for &t in &times {
                let (g, s) = quadrature_rates(&ctx.params, t, *tol)?;
                row.extend([Some(g), Some(s)]);
                if let Some(e) = &eval {
                    let (gs, ss) = e.rates(t);
                    let dev = (g - gs).abs().max((s - ss).abs());
                    worst = worst.max(dev);
                    row.extend([Some(gs), Some(ss), Some(dev)]);
                }
            }
            let columns: &[&str] = if common.compare {
                &["Gamma", "S", "Gamma_series", "S_series", "abs_dev"]
            } else {
                &["Gamma", "S"]
            };
            if common.compare {
                eprintln!("max |quadrature - series| = {worst:e}");
            }
            let params = json!({"command": "oracle quadrature", "model": to_value(&ctx.params), "tol": tol});
            let res = table(params, vec![], Some(times), columns, vec![row], vec![CellFlag::ok()])?;
            ctx.emit(&res)
        }
        OracleKind::Exact {
            time,
            init,
            modes,
            n_ph_max,
            window,
            dt,
            common,
        } => {
            let times = ctx.time_grid(time)?;
            let init = amplitudes(init)?;
            let cfg = OracleConfig {
                modes: *modes,
                n_ph_max: *n_ph_max,
                dt: *dt,
                window_halfwidth: *window,
                ..OracleConfig::default()
            };
            let mut params = json!({
                "command": "oracle exact",
                "model": to_value(&ctx.params),
                "init": to_value(&init),
                "oracle": to_value(&cfg),
            });
            let res = if common.compare {
                let report = compare_oracle(&ctx.params, &cfg, &init, &times)?;
                eprintln!(
                    "max |C_master - C_exact| = {:e}, max relative gamma deviation = {:e}",
                    report.max_coherence_deviation, report.max_gamma_rel_deviation
                );
                if let Some(s) = &report.scaling {
                    eprintln!("deviation ratio at gamma0/2 = {}", s.ratio);
                }
                params["comparison"] = json!({
                    "max_coherence_deviation": report.max_coherence_deviation,
                    "max_gamma_rel_deviation": report.max_gamma_rel_deviation,
                    "scaling": to_value(&report.scaling),
                });
                let row = (0..times.len())
                    .flat_map(|i| {
                        [report.coherence_master[i], report.coherence_exact[i], report.coherence_deviation[i]].map(Some)
                    })
                    .collect();
                table(params, vec![], Some(times), &["C_master", "C_exact", "abs_dev"], vec![row], vec![CellFlag::ok()])?
            } else {
                let samples = exact_evolution(&ctx.params, &cfg, &init, &times)?;
                let row = samples
                    .iter()
                    .flat_map(|s| {
                        let off = s.rho.coherence();
                        [s.rho.population(0), off.re, off.im, coherence_l1(&s.rho)].map(Some)
                    })
                    .collect();
                table(
                    params,
                    vec![],
                    Some(times),
                    &["rho00", "rho01_re", "rho01_im", "C_l1"],
                    vec![row],
                    vec![CellFlag::ok()],
                )?
            };
            ctx.emit(&res)
        }
        OracleKind::Polaron { n_ph_max, common } => {
            let n = *n_ph_max;
            let cutoffs: Vec<usize> = if common.compare {
                let mut c: Vec<usize> = (1..=4).map(|k| (n * k / 4).max(2)).collect();
                c.dedup();
                c
            } else {
                vec![n]
            };
            let checks = polaron_convergence(ctx.params.g_p, &cutoffs)?;
            let values = checks
                .iter()
                .map(|c| vec![Some(c.raising), Some(c.displaced_oscillator), Some(c.sigma_z)])
                .collect();
            let params = json!({"command": "oracle polaron", "g_p": ctx.params.g_p});
            let res = table(
                params,
                vec![GridAxis {
                    name: "n_ph_max".into(),
                    values: cutoffs.iter().map(|&c| c as f64).collect(),
                }],
                None,
                &["raising", "displaced_oscillator", "sigma_z"],
                values,
                vec![CellFlag::ok(); cutoffs.len()],
            )?;
            ctx.emit(&res)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_syntax() {
        let a = parse_axis("lambda=0.1, 0.5,1").unwrap();
        assert_eq!(a.param, ParamName::Lambda);
        assert_eq!(a.values, vec![0.1, 0.5, 1.0]);
        let b = parse_axis("omega-ph:0:10:3").unwrap();
        assert_eq!(b.param, ParamName::OmegaPh);
        assert_eq!(b.values, vec![0.0, 5.0, 10.0]);
        assert!(parse_axis("lambda:0:1").is_err());
        assert!(parse_axis("nope=1").is_err());
    }

    #[test]
    fn single_amplitude_is_completed() {
        let args = AmplitudeArgs { a: Some(0.6), b: None };
        let init = amplitudes(&args).unwrap();
        assert!((init.b.re - 0.8).abs() < 1e-15);
        assert!(amplitudes(&AmplitudeArgs { a: Some(1.0), b: Some(1.0) }).is_err());
    }
}
