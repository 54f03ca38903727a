//! Coherence-backflow non-Markovianity.
//!
//! `C_l1(t) = 2|ab| e^{-γ(t)}`, so `Ċ_l1 = -Γ C_l1` is positive exactly
//! where `Γ < 0`. The measure is therefore a sum over the negative-rate
//! intervals of `2|ab| (e^{-γ(t_end)} - e^{-γ(t_start)})`; the intervals
//! come from a dense sign scan of `Γ` refined by bisection.

use serde::{Deserialize, Serialize};

use crate::dynamics::{trace_distance_direct, DecoherenceFactors, InitialAmplitudes};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::{bisect, KahanSum};
use crate::rates::{RateEvaluator, TruncationSpec};
use crate::scalar::Real;

/// Horizon in units of `1/γ₀` used when none is given.
pub const DEFAULT_HORIZON_GAMMA0: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec<T> {
    /// Scan step; `None` picks `min(0.05/λ, π/(8(|Δ| + ΩL + λ)), T/1000)`.
    pub step: Option<T>,
    /// Root bracket width; `None` picks `1e-10 T`.
    pub root_tol: Option<T>,
    /// Convergence threshold on the bound for backflow beyond the horizon.
    pub tail_tol: T,
}

impl<T: Real> Default for ScanSpec<T> {
    fn default() -> Self {
        Self {
            step: None,
            root_tol: None,
            tail_tol: T::lit(1e-6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignInterval<T> {
    pub t_start: T,
    pub t_end: T,
    pub negative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignScan<T> {
    pub intervals: Vec<SignInterval<T>>,
    pub step: T,
    pub root_tol: T,
    pub warnings: Vec<String>,
}

impl<T: Real> SignScan<T> {
    pub fn negative(&self) -> impl Iterator<Item = &SignInterval<T>> {
        self.intervals.iter().filter(|iv| iv.negative)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackflowReport<T> {
    /// The measure `N`.
    pub n: T,
    pub intervals: Vec<SignInterval<T>>,
    /// One entry per negative interval, in order.
    pub contributions: Vec<T>,
    pub horizon: T,
    /// Upper bound on backflow after the horizon.
    pub tail_bound: T,
    /// `tail_bound < tail_tol`
    pub converged: bool,
    pub warnings: Vec<String>,
}

pub fn default_horizon<T: Real>(p: &ModelParams<T>) -> T {
    T::lit(DEFAULT_HORIZON_GAMMA0) / p.gamma0
}

fn resolve_scan<T: Real>(eval: &RateEvaluator<T>, horizon: T, scan: &ScanSpec<T>) -> Result<(T, T, Vec<String>)> {
    let p = eval.params();
    let fastest = eval.fastest_frequency() + p.lambda;
    let step = match scan.step {
        Some(h) => h,
        None => (T::lit(0.05) / p.lambda)
            .min(T::PI() / (T::lit(8.0) * fastest))
            .min(horizon / T::lit(1000.0)),
    };
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::InvalidParam {
            field: "scan step",
            requirement: "positive and finite",
        });
    }
    let root_tol = scan.root_tol.unwrap_or(T::lit(1e-10) * horizon);
    if !(root_tol > T::zero()) {
        return Err(Error::InvalidParam {
            field: "root_tol",
            requirement: "positive",
        });
    }
    let mut warnings = Vec::new();
    // four samples per period of the fastest sideband
    if step * fastest > T::FRAC_PI_2() {
        let msg = format!(
            "scan step {step} may hide sign changes: fastest sideband frequency {fastest} needs step <= {}",
            T::FRAC_PI_2() / fastest
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok((step, root_tol, warnings))
}

/// Sign scan of `Γ` on `[0, horizon]` using a prepared evaluator.
pub fn sign_intervals_with<T: Real>(eval: &RateEvaluator<T>, horizon: T, scan: &ScanSpec<T>) -> Result<SignScan<T>> {
    if !(horizon > T::zero()) || !horizon.is_finite() {
        return Err(Error::InvalidParam {
            field: "horizon",
            requirement: "positive and finite",
        });
    }
    let (step, root_tol, warnings) = resolve_scan(eval, horizon, scan)?;
    let n = (horizon / step).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let grid = |i: usize| horizon * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();

    let mut intervals: Vec<SignInterval<T>> = Vec::new();
    let mut start = T::zero();
    // sign of the open interval; zero until Γ first leaves zero
    let mut sign = T::zero();
    let mut last_t = T::zero();
    let mut last_v = T::zero();
    for i in 1..=n {
        let t = grid(i);
        let v = eval.decay_rate(t);
        if v == T::zero() {
            continue;
        }
        let s = v.signum();
        if sign == T::zero() {
            sign = s;
        } else if s != sign {
            let root = bisect(|x| eval.decay_rate(x), last_t, t, last_v, v, root_tol)?;
            if root > start {
                intervals.push(SignInterval {
                    t_start: start,
                    t_end: root,
                    negative: sign < T::zero(),
                });
                start = root;
            } else if let Some(prev) = intervals.pop() {
                // empty open interval: fold back into the previous one
                start = prev.t_start;
            }
            sign = s;
        }
        last_t = t;
        last_v = v;
    }
    intervals.push(SignInterval {
        t_start: start,
        t_end: horizon,
        negative: sign < T::zero(),
    });
    Ok(SignScan {
        intervals,
        step,
        root_tol,
        warnings,
    })
}

pub fn gamma_sign_intervals<T: Real>(
    p: &ModelParams<T>,
    horizon: T,
    trunc: &TruncationSpec<T>,
    scan: &ScanSpec<T>,
) -> Result<SignScan<T>> {
    sign_intervals_with(&RateEvaluator::new(p, trunc)?, horizon, scan)
}

/// Backflow measure from a prepared evaluator.
pub fn nonmarkovianity_with<T: Real>(
    eval: &RateEvaluator<T>,
    init: &InitialAmplitudes<T>,
    horizon: T,
    scan: &ScanSpec<T>,
) -> Result<BackflowReport<T>> {
    let signs = sign_intervals_with(eval, horizon, scan)?;
    let c0 = init.initial_coherence();
    let coherence = |t: T| c0 * (-eval.integrals(t).0).exp();

    let mut total = KahanSum::new();
    let mut contributions = Vec::new();
    for iv in signs.negative() {
        let gain = (coherence(iv.t_end) - coherence(iv.t_start)).max(T::zero());
        total.add(gain);
        contributions.push(gain);
    }

    let lam = eval.params().lambda;
    let excess = eval.envelope_amplitude() * (-lam * horizon).exp() / lam;
    let tail_bound = coherence(horizon) * excess.exp() * excess;
    Ok(BackflowReport {
        n: total.total(),
        intervals: signs.intervals,
        contributions,
        horizon,
        converged: tail_bound < scan.tail_tol,
        tail_bound,
        warnings: signs.warnings,
    })
}

pub fn nonmarkovianity<T: Real>(
    p: &ModelParams<T>,
    init: &InitialAmplitudes<T>,
    horizon: T,
    trunc: &TruncationSpec<T>,
    scan: &ScanSpec<T>,
) -> Result<BackflowReport<T>> {
    nonmarkovianity_with(&RateEvaluator::new(p, trunc)?, init, horizon, scan)
}

/// Total increase of the equatorial-pair trace distance over the negative
/// intervals, each endpoint evaluated as `½‖ρ₁ - ρ₂‖₁`.
pub fn trace_distance_backflow<T: Real>(eval: &RateEvaluator<T>, signs: &SignScan<T>) -> Result<T> {
    let distance = |t: T| -> Result<T> {
        let (gamma, phi) = eval.integrals(t);
        trace_distance_direct(&DecoherenceFactors::from_integrals(t, gamma, phi))
    };
    let mut total = KahanSum::new();
    for iv in signs.negative() {
        total.add(distance(iv.t_end)? - distance(iv.t_start)?);
    }
    Ok(total.total())
}
