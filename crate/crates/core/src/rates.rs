//! Phonon-dressed decay rate `Γ(t)`, Lamb shift `S(t)` and their time
//! integrals `γ(t)`, `Φ(t)`.
//!
//! The bath correlation function factorizes into the Lorentzian cavity
//! kernel `½γ₀λ e^{-(λ-iΔ)s}` times the vacuum phonon correlator
//! `exp(4g_p² e^{iΩs})`. Expanding the latter in powers of `4g_p²` gives a
//! Poisson-weighted sum of sidebands at `θ_l = Δ + Ωl`; every sideband
//! contributes `(1 - e^{-z_l t}) / z_l` to `Γ + iS`, with `z_l = λ - iθ_l`,
//! and `t/z_l - (1 - e^{-z_l t}) / z_l²` to `γ + iΦ`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::KahanSum;
use crate::scalar::Real;

/// Beyond `λt` of this size `e^{-λt}` is below one ulp of the Markov terms
/// and the damped oscillations are dropped.
const FLUSH_DAMPING: f64 = 36.0;

/// `|z t|` below which the sideband antiderivatives use their Taylor series.
const SERIES_SWITCH: f64 = 0.5;
const SERIES_TERMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec<T> {
    /// Bound on the Poisson tail weight of the dropped sidebands.
    pub rel_tol: T,
    pub max_terms: usize,
}

impl<T: Real> Default for TruncationSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-12),
            max_terms: 512,
        }
    }
}

impl<T: Real> TruncationSpec<T> {
    pub fn validate(self) -> Result<Self> {
        if !(self.rel_tol > T::zero() && self.rel_tol < T::one()) {
            return Err(Error::InvalidParam {
                field: "rel_tol",
                requirement: "in (0, 1)",
            });
        }
        if self.max_terms < 1 {
            return Err(Error::InvalidParam {
                field: "max_terms",
                requirement: "at least 1",
            });
        }
        Ok(self)
    }
}

/// `Γ`, `S` and their running integrals at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSample<T> {
    pub t: T,
    pub decay_rate: T,
    pub lamb_shift: T,
    /// `γ(t) = ∫₀ᵗ Γ`
    pub gamma_cum: T,
    /// `Φ(t) = ∫₀ᵗ S`
    pub phi_cum: T,
}

/// Natural logs of the Poisson(`mean`) pmf for `l = 0..=upto`.
fn poisson_log_pmf(mean: f64, upto: usize) -> Vec<f64> {
    let ln_mean = mean.ln();
    let mut out = Vec::with_capacity(upto + 1);
    let mut ln_p = -mean;
    out.push(ln_p);
    for l in 1..=upto {
        ln_p += ln_mean - (l as f64).ln();
        out.push(ln_p);
    }
    out
}

/// Smallest sideband index `L` whose Poisson(`4g_p²`) tail `Σ_{l>L}` is
/// below `trunc.rel_tol`. Fails with [`Error::SidebandCap`] when that index
/// exceeds `trunc.max_terms`.
pub fn sideband_count<T: Real>(g_p: T, trunc: &TruncationSpec<T>) -> Result<usize> {
    let trunc = trunc.validate()?;
    if !(g_p >= T::zero()) || !g_p.is_finite() {
        return Err(Error::InvalidParam {
            field: "g_p",
            requirement: "finite and non-negative",
        });
    }
    let g = g_p.to_f64_lossy();
    let mean = 4.0 * g * g;
    if mean == 0.0 {
        return Ok(0);
    }
    let rel_tol = trunc.rel_tol.to_f64_lossy();
    // extend well past the cap so the tail at the cap itself is measurable
    let mut upto = trunc.max_terms.max(1);
    let ln_floor = (rel_tol * 1e-6).ln();
    let ln_pmf = loop {
        let ln_pmf = poisson_log_pmf(mean, upto);
        let last = *ln_pmf.last().unwrap();
        if (upto as f64) > mean && last < ln_floor {
            break ln_pmf;
        }
        upto = upto * 2 + 16;
    };
    // tail[l] = Σ_{k > l} p_k, summed smallest first
    let mut tail = vec![0.0; ln_pmf.len()];
    let mut acc = KahanSum::<f64>::new();
    for l in (0..ln_pmf.len() - 1).rev() {
        acc.add(ln_pmf[l + 1].exp());
        tail[l] = acc.total();
    }
    for (l, &t) in tail.iter().enumerate().take(trunc.max_terms + 1) {
        if t < rel_tol {
            return Ok(l);
        }
    }
    Err(Error::SidebandCap {
        max_terms: trunc.max_terms,
        tail: tail[trunc.max_terms],
        rel_tol,
    })
}

/// Bath correlation function `C(s)`, evaluated in closed form without the
/// sideband expansion.
pub fn correlation_function<T: Real>(p: &ModelParams<T>, s: T) -> Complex<T> {
    let four_g2 = T::lit(4.0) * p.g_p * p.g_p;
    let phonon = Complex::from_polar(four_g2, p.omega_ph * s);
    let exponent = phonon - Complex::new(four_g2, T::zero()) - Complex::new(p.lambda, -p.delta) * s;
    exponent.exp() * (p.gamma0 * p.lambda / T::lit(2.0))
}

/// `(1 - e^{-w}) / w`
fn phi1<T: Real>(w: Complex<T>) -> Complex<T> {
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = term;
    for k in 1..SERIES_TERMS {
        term = -term * w / T::from_usize(k + 1).unwrap();
        sum = sum + term;
    }
    sum
}

/// `(e^{-w} - 1 + w) / w²`
fn phi2<T: Real>(w: Complex<T>) -> Complex<T> {
    let mut term = Complex::new(T::lit(0.5), T::zero());
    let mut sum = term;
    for k in 1..SERIES_TERMS {
        term = -term * w / T::from_usize(k + 2).unwrap();
        sum = sum + term;
    }
    sum
}

/// Precomputed sideband weights and frequencies for one parameter set.
///
/// Building the evaluator fixes the truncation; every later call is a
/// plain loop over `L + 1` sidebands.
#[derive(Debug, Clone)]
pub struct RateEvaluator<T> {
    params: ModelParams<T>,
    prefactor: T,
    weights: Vec<T>,
    thetas: Vec<T>,
    inv_z: Vec<Complex<T>>,
}

impl<T: Real> RateEvaluator<T> {
    pub fn new(params: &ModelParams<T>, trunc: &TruncationSpec<T>) -> Result<Self> {
        let params = params.validate_allow_decoupled()?;
        let count = sideband_count(params.g_p, trunc)?;
        let g = params.g_p.to_f64_lossy();
        let mean = 4.0 * g * g;
        let weights: Vec<T> = if mean == 0.0 {
            vec![T::one()]
        } else {
            poisson_log_pmf(mean, count)
                .into_iter()
                .map(|lp| T::lit(lp.exp()))
                .collect()
        };
        let thetas: Vec<T> = (0..=count)
            .map(|l| params.delta + params.omega_ph * T::from_usize(l).unwrap())
            .collect();
        let inv_z = thetas.iter().map(|&th| Complex::new(params.lambda, -th).inv()).collect();
        Ok(Self {
            prefactor: params.gamma0 * params.lambda / T::lit(2.0),
            params,
            weights,
            thetas,
            inv_z,
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    /// Number of sidebands beyond the zero-phonon line, `L`.
    pub fn sideband_terms(&self) -> usize {
        self.weights.len() - 1
    }

    /// Largest sideband frequency `max_l |Δ + Ωl|`.
    pub fn fastest_frequency(&self) -> T {
        self.thetas.iter().fold(T::zero(), |m, th| m.max(th.abs()))
    }

    /// `(Γ(∞), S(∞))`
    pub fn markov_limit(&self) -> (T, T) {
        let lam = self.params.lambda;
        let mut g = KahanSum::new();
        let mut s = KahanSum::new();
        for (&w, &th) in self.weights.iter().zip(&self.thetas) {
            let den = lam * lam + th * th;
            g.add(w * lam / den);
            s.add(w * th / den);
        }
        (self.prefactor * g.total(), self.prefactor * s.total())
    }

    /// `A` with `|Γ(t) - Γ(∞)|, |S(t) - S(∞)| <= A e^{-λt}`.
    pub fn envelope_amplitude(&self) -> T {
        let lam = self.params.lambda;
        let sum: T = self
            .weights
            .iter()
            .zip(&self.thetas)
            .map(|(&w, &th)| w * (lam + th.abs()) / (lam * lam + th * th))
            .sum();
        self.prefactor * sum
    }

    /// Uniform bound on `|Γ(t)|` and `|S(t)|`.
    pub fn rate_bound(&self) -> T {
        let lam = self.params.lambda;
        let two = T::lit(2.0);
        let sum: T = self
            .weights
            .iter()
            .zip(&self.thetas)
            .map(|(&w, &th)| w * (lam + two * th.abs()) / (lam * lam + th * th))
            .sum();
        self.prefactor * sum
    }

    /// Walks the sidebands at time `t`, handing each weight and
    /// [`Sideband`] to `visit`.
    #[inline]
    fn for_each_sideband<F>(&self, t: T, mut visit: F)
    where
        F: FnMut(T, Sideband<T>),
    {
        let lam = self.params.lambda;
        let damping = lam * t;
        let flushed = damping > T::lit(FLUSH_DAMPING);
        let envelope = if flushed { T::zero() } else { (-damping).exp() };
        let mut phase = Complex::from_polar(envelope, self.params.delta * t);
        let step = Complex::from_polar(T::one(), self.params.omega_ph * t);
        for ((&w, &th), &inv_z) in self.weights.iter().zip(&self.thetas).zip(&self.inv_z) {
            let z = Complex::new(lam, -th);
            visit(
                w,
                Sideband {
                    z,
                    inv_z,
                    decay: if flushed { None } else { Some(phase) },
                },
            );
            if !flushed {
                phase = phase * step;
            }
        }
    }

    /// `(Γ(t), S(t))`
    pub fn rates(&self, t: T) -> (T, T) {
        let mut g = KahanSum::new();
        let mut s = KahanSum::new();
        self.for_each_sideband(t, |w, sb| {
            let v = sb.rate_term(t);
            g.add(w * v.re);
            s.add(w * v.im);
        });
        (self.prefactor * g.total(), self.prefactor * s.total())
    }

    /// `Γ(t)` alone; the hot path of the sign scan.
    pub fn decay_rate(&self, t: T) -> T {
        let mut g = KahanSum::new();
        self.for_each_sideband(t, |w, sb| g.add(w * sb.rate_term(t).re));
        self.prefactor * g.total()
    }

    /// `(γ(t), Φ(t))`
    pub fn integrals(&self, t: T) -> (T, T) {
        let mut g = KahanSum::new();
        let mut p = KahanSum::new();
        self.for_each_sideband(t, |w, sb| {
            let v = sb.integral_term(t);
            g.add(w * v.re);
            p.add(w * v.im);
        });
        (self.prefactor * g.total(), self.prefactor * p.total())
    }

    pub fn sample(&self, t: T) -> RateSample<T> {
        let mut acc = [KahanSum::new(); 4];
        self.for_each_sideband(t, |w, sb| {
            let r = sb.rate_term(t);
            let i = sb.integral_term(t);
            acc[0].add(w * r.re);
            acc[1].add(w * r.im);
            acc[2].add(w * i.re);
            acc[3].add(w * i.im);
        });
        RateSample {
            t,
            decay_rate: self.prefactor * acc[0].total(),
            lamb_shift: self.prefactor * acc[1].total(),
            gamma_cum: self.prefactor * acc[2].total(),
            phi_cum: self.prefactor * acc[3].total(),
        }
    }
}

/// One sideband at a fixed time: `z = λ - iθ`, its inverse and the damped
/// phase `e^{-zt}` (`None` once flushed).
#[derive(Debug, Clone, Copy)]
struct Sideband<T> {
    z: Complex<T>,
    inv_z: Complex<T>,
    decay: Option<Complex<T>>,
}

impl<T: Real> Sideband<T> {
    /// `(1 - e^{-zt}) / z`
    #[inline]
    fn rate_term(&self, t: T) -> Complex<T> {
        match self.decay {
            Some(e) => {
                let w = self.z * t;
                if w.norm_sqr() < T::lit(SERIES_SWITCH * SERIES_SWITCH) {
                    phi1(w) * t
                } else {
                    (Complex::new(T::one(), T::zero()) - e) * self.inv_z
                }
            }
            None => self.inv_z,
        }
    }

    /// `t/z - (1 - e^{-zt}) / z²`
    #[inline]
    fn integral_term(&self, t: T) -> Complex<T> {
        let zi = self.inv_z;
        match self.decay {
            Some(e) => {
                let w = self.z * t;
                if w.norm_sqr() < T::lit(SERIES_SWITCH * SERIES_SWITCH) {
                    phi2(w) * (t * t)
                } else {
                    zi * t - (Complex::new(T::one(), T::zero()) - e) * zi * zi
                }
            }
            None => zi * t - zi * zi,
        }
    }
}

/// `Γ(t)` from the truncated sideband series.
pub fn decay_rate<T: Real>(p: &ModelParams<T>, t: T, trunc: &TruncationSpec<T>) -> Result<T> {
    check_time(t)?;
    Ok(RateEvaluator::new(p, trunc)?.decay_rate(t))
}

/// `S(t)` from the truncated sideband series.
pub fn lamb_shift<T: Real>(p: &ModelParams<T>, t: T, trunc: &TruncationSpec<T>) -> Result<T> {
    check_time(t)?;
    Ok(RateEvaluator::new(p, trunc)?.rates(t).1)
}

/// `Γ`, `S`, `γ`, `Φ` on an ascending, non-negative time grid. The
/// integrals use the exact per-sideband antiderivatives.
pub fn cumulative_rates<T: Real>(
    p: &ModelParams<T>,
    t_grid: &[T],
    trunc: &TruncationSpec<T>,
) -> Result<Vec<RateSample<T>>> {
    check_grid(t_grid)?;
    let eval = RateEvaluator::new(p, trunc)?;
    Ok(t_grid.iter().map(|&t| eval.sample(t)).collect())
}

pub(crate) fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

pub(crate) fn check_grid<T: Real>(t_grid: &[T]) -> Result<()> {
    for &t in t_grid {
        check_time(t)?;
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("time grid must be ascending".into()));
    }
    Ok(())
}
