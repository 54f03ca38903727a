//! Reduced qubit state, the amplitude-damping Kraus channel, l1 coherence
//! and the trace distance of the optimal equatorial pair.
//!
//! Index 0 of every 2×2 matrix is the level whose population decays as
//! `|a|² e^{-2γ(t)}`, matching the printed matrix form of the channel. The
//! off-diagonal element `ρ₀₁` starts at `a* b` and picks up
//! `G₁ = e^{-γ + iΦ}`; the Lamb-shift renormalization of the qubit
//! Hamiltonian is absorbed into the sign of `Φ = +∫S`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rates::{check_time, RateEvaluator, TruncationSpec};
use crate::scalar::Real;

/// Tolerance for Hermiticity, unit trace and positivity of output states.
pub const STATE_TOL: f64 = 1e-12;

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T>(pub [[Complex<T>; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn zeros() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        Self::diag(Complex::new(T::one(), T::zero()), Complex::new(T::one(), T::zero()))
    }

    pub fn diag(d0: Complex<T>, d1: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[d0, z], [z, d1]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex<T> {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> (T, T) {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = (self.0[0][1] + self.0[1][0].conj()) / T::lit(2.0);
        let two = T::lit(2.0);
        let mean = (a + d) / two;
        let radius = (((a - d) / two).powi(2) + b.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    /// Trace norm of a Hermitian matrix, `Σ |eigenvalue|`.
    pub fn hermitian_trace_norm(&self) -> T {
        let (lo, hi) = self.hermitian_eigenvalues();
        lo.abs() + hi.abs()
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Mat2<T>;

    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = out.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Mat2<T>;

    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = out.0[i][j] - rhs.0[i][j];
            }
        }
        out
    }
}

/// Pure initial qubit state `a|0⟩ + b|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialAmplitudes<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
}

impl<T: Real> InitialAmplitudes<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !norm.is_finite() || (norm - T::one()).abs() > T::lit(1e-12) {
            return Err(Error::InvalidInput(format!(
                "initial amplitudes must satisfy |a|^2 + |b|^2 = 1, got {norm}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn real(a: T, b: T) -> Result<Self> {
        Self::new(Complex::new(a, T::zero()), Complex::new(b, T::zero()))
    }

    /// `a = b = 1/√2`, the default probe state.
    pub fn equatorial() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self {
            a: Complex::new(h, T::zero()),
            b: Complex::new(h, T::zero()),
        }
    }

    /// `2|ab|`, the l1 coherence at `t = 0`.
    pub fn initial_coherence(&self) -> T {
        T::lit(2.0) * (self.a * self.b).norm()
    }

    /// Density matrix at `t = 0` in the channel's convention:
    /// `[[|a|², a*b], [ab*, |b|²]]`.
    pub fn density(&self) -> QubitState<T> {
        let off = self.a.conj() * self.b;
        QubitState {
            rho: Mat2([
                [Complex::new(self.a.norm_sqr(), T::zero()), off],
                [off.conj(), Complex::new(self.b.norm_sqr(), T::zero())],
            ]),
        }
    }
}

impl<T: Real> Default for InitialAmplitudes<T> {
    fn default() -> Self {
        Self::equatorial()
    }
}

/// `G₀ = e^{-2γ}` and `G₁ = e^{-γ + iΦ}` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceFactors<T> {
    pub t: T,
    pub g0: T,
    pub g1: Complex<T>,
}

impl<T: Real> DecoherenceFactors<T> {
    pub fn from_integrals(t: T, gamma_cum: T, phi_cum: T) -> Self {
        Self {
            t,
            g0: (-T::lit(2.0) * gamma_cum).exp(),
            g1: Complex::from_polar((-gamma_cum).exp(), phi_cum),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState<T> {
    pub rho: Mat2<T>,
}

impl<T: Real> QubitState<T> {
    /// Checks Hermiticity, unit trace and positivity to [`STATE_TOL`]. No
    /// eigenvalue clipping: a violation is a bug upstream.
    pub fn validate(self) -> Result<Self> {
        let tol = T::lit(STATE_TOL);
        let herm = (self.rho - self.rho.adjoint()).max_abs();
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm})")));
        }
        let tr = self.rho.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let (lo, _) = self.rho.hermitian_eigenvalues();
        if lo < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo}")));
        }
        Ok(self)
    }

    pub fn population(&self, level: usize) -> T {
        self.rho.get(level, level).re
    }

    pub fn coherence(&self) -> Complex<T> {
        self.rho.get(0, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrausPair<T> {
    pub k0: Mat2<T>,
    pub k1: Mat2<T>,
}

impl<T: Real> KrausPair<T> {
    /// `K₀ = diag(G₁, 1)`; `K₁` carries `√(1 - G₀)` from level 0 to level 1,
    /// which is the placement that makes the pair complete and reproduces
    /// [`evolve_density`].
    pub fn from_factors(f: &DecoherenceFactors<T>) -> Result<Self> {
        let loss = T::one() - f.g0;
        if loss < -T::lit(STATE_TOL) {
            return Err(Error::InvalidState(format!("G0 = {} exceeds 1", f.g0)));
        }
        let z = Complex::new(T::zero(), T::zero());
        let k0 = Mat2::diag(f.g1, Complex::new(T::one(), T::zero()));
        let k1 = Mat2([[z, z], [Complex::new(loss.max(T::zero()).sqrt(), T::zero()), z]]);
        Ok(Self { k0, k1 })
    }

    /// `Σᵢ Kᵢ ρ Kᵢ†`
    pub fn apply(&self, state: &QubitState<T>) -> QubitState<T> {
        QubitState {
            rho: self.k0 * state.rho * self.k0.adjoint() + self.k1 * state.rho * self.k1.adjoint(),
        }
    }

    /// Largest entry of `K₀†K₀ + K₁†K₁ - I`.
    pub fn completeness_error(&self) -> T {
        (self.k0.adjoint() * self.k0 + self.k1.adjoint() * self.k1 - Mat2::identity()).max_abs()
    }
}

pub fn decoherence_factors<T: Real>(
    p: &ModelParams<T>,
    t: T,
    trunc: &TruncationSpec<T>,
) -> Result<DecoherenceFactors<T>> {
    check_time(t)?;
    let (gamma, phi) = RateEvaluator::new(p, trunc)?.integrals(t);
    Ok(DecoherenceFactors::from_integrals(t, gamma, phi))
}

/// Closed-form channel output `[[|a|²G₀, a*b G₁], [ab* G₁*, 1 - |a|²G₀]]`.
pub fn density_from_factors<T: Real>(
    init: &InitialAmplitudes<T>,
    f: &DecoherenceFactors<T>,
) -> Result<QubitState<T>> {
    let p0 = init.a.norm_sqr() * f.g0;
    let off = init.a.conj() * init.b * f.g1;
    QubitState {
        rho: Mat2([
            [Complex::new(p0, T::zero()), off],
            [off.conj(), Complex::new(T::one() - p0, T::zero())],
        ]),
    }
    .validate()
}

pub fn evolve_density<T: Real>(
    init: &InitialAmplitudes<T>,
    p: &ModelParams<T>,
    t: T,
    trunc: &TruncationSpec<T>,
) -> Result<QubitState<T>> {
    density_from_factors(init, &decoherence_factors(p, t, trunc)?)
}

pub fn kraus_pair<T: Real>(p: &ModelParams<T>, t: T, trunc: &TruncationSpec<T>) -> Result<KrausPair<T>> {
    KrausPair::from_factors(&decoherence_factors(p, t, trunc)?)
}

/// `Σ_{i≠j} |ρᵢⱼ|`
pub fn coherence_l1<T: Real>(state: &QubitState<T>) -> T {
    state.rho.get(0, 1).norm() + state.rho.get(1, 0).norm()
}

/// Trace distance of the antipodal equatorial pair `(|0⟩ ± |1⟩)/√2`,
/// `D(0) e^{-γ(t)}` with `D(0) = 1`.
pub fn trace_distance_pair<T: Real>(p: &ModelParams<T>, t: T, trunc: &TruncationSpec<T>) -> Result<T> {
    Ok(decoherence_factors(p, t, trunc)?.g1.norm())
}

/// Same quantity as [`trace_distance_pair`], computed as `½‖ρ₁ - ρ₂‖₁`
/// from the two evolved states.
pub fn trace_distance_direct<T: Real>(f: &DecoherenceFactors<T>) -> Result<T> {
    let h = T::FRAC_1_SQRT_2();
    let plus = InitialAmplitudes::real(h, h)?;
    let minus = InitialAmplitudes::real(h, -h)?;
    let r1 = density_from_factors(&plus, f)?;
    let r2 = density_from_factors(&minus, f)?;
    Ok((r1.rho - r2.rho).hermitian_trace_norm() / T::lit(2.0))
}
