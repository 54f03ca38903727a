use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{InitialAmplitudes, Mat2, QubitState};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rates::check_grid;

use super::bath::{discretize_bath, BathDiscretization, OracleConfig};

/// Largest admissible `dt · ‖H‖`.
const MAX_STEP_NORM: f64 = 0.1;
/// `dt · ‖H‖` used when the step is chosen automatically.
const AUTO_STEP_NORM: f64 = 0.05;

/// Reduced qubit state of the full simulation at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactSample {
    pub t: f64,
    pub rho: QubitState<f64>,
    /// `|‖ψ(t)‖² - 1|`
    pub norm_drift: f64,
    /// Population of the highest retained phonon level.
    pub top_fock_population: f64,
}

/// Rotating-frame Hamiltonian restricted to the excitation sectors.
///
/// The frame rotates at `ω₀` for the qubit and every cavity mode, so
/// `|e, vac, n⟩` has energy `Ωn`, `|g, 1_k, n⟩` has `-δ_k + Ωn` and
/// `|g, vac, n⟩` has `Ωn`. The phonon displacement term
/// `g_pΩσ_z(ν + ν†)` enters with `+` in the excited and `-` in the ground
/// states.
struct SectorHamiltonian {
    omega: f64,
    phonon_coupling: f64,
    levels: usize,
    bath: BathDiscretization,
    /// `√n` for `n = 0..=n_ph_max`
    sqrt_n: Vec<f64>,
}

/// Amplitudes of the one-excitation sector (`e`, indexed by phonon level,
/// and `c`, indexed by `k * levels + n`) and the zero-excitation sector
/// (`g`).
#[derive(Clone)]
struct SectorState {
    e: Vec<Complex64>,
    c: Vec<Complex64>,
    g: Vec<Complex64>,
}

impl SectorState {
    fn zeros(levels: usize, modes: usize) -> Self {
        Self {
            e: vec![Complex64::default(); levels],
            c: vec![Complex64::default(); levels * modes],
            g: vec![Complex64::default(); levels],
        }
    }

    fn axpy_from(&mut self, base: &SectorState, h: f64, k: &SectorState) {
        for (dst, src) in [(&mut self.e, (&base.e, &k.e)), (&mut self.c, (&base.c, &k.c)), (&mut self.g, (&base.g, &k.g))] {
            for ((d, b), kk) in dst.iter_mut().zip(src.0).zip(src.1) {
                *d = b + kk * h;
            }
        }
    }

    fn norm_sqr(&self) -> f64 {
        self.e.iter().chain(&self.c).chain(&self.g).map(|z| z.norm_sqr()).sum()
    }

    fn top_level_population(&self, levels: usize) -> f64 {
        let top = levels - 1;
        let bath: f64 = self.c.iter().skip(top).step_by(levels).map(|z| z.norm_sqr()).sum();
        self.e[top].norm_sqr() + self.g[top].norm_sqr() + bath
    }

    /// Partial trace over cavity and phonon, in the channel convention
    /// (`ρ₀₀` is the excited population, `ρ₀₁ = Σₙ eₙ* gₙ`).
    fn reduced(&self) -> QubitState<f64> {
        let p0: f64 = self.e.iter().map(|z| z.norm_sqr()).sum();
        let p1: f64 = self.c.iter().chain(&self.g).map(|z| z.norm_sqr()).sum();
        let off: Complex64 = self.e.iter().zip(&self.g).map(|(e, g)| e.conj() * g).sum();
        QubitState {
            rho: Mat2([[Complex64::new(p0, 0.0), off], [off.conj(), Complex64::new(p1, 0.0)]]),
        }
    }
}

impl SectorHamiltonian {
    fn new(p: &ModelParams<f64>, bath: BathDiscretization, n_ph_max: usize) -> Self {
        Self {
            omega: p.omega_ph,
            phonon_coupling: p.g_p * p.omega_ph,
            levels: n_ph_max + 1,
            bath,
            sqrt_n: (0..=n_ph_max).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    /// Upper bound on the spectral norm: diagonal, phonon hopping and the
    /// star coupling `√(Σg_k²)` bounded separately.
    fn norm_bound(&self) -> f64 {
        let top = (self.levels - 1) as f64 * self.omega;
        let max_detuning = self.bath.mode_detunings.iter().fold(0f64, |m, d| m.max(d.abs()));
        let hopping = 2.0 * self.phonon_coupling.abs() * self.sqrt_n[self.levels - 1];
        top + max_detuning + hopping + self.bath.captured_weight().sqrt()
    }

    /// `out = -i H ψ` for one phonon ladder with diagonal offset `shift`
    /// and displacement amplitude `hop`, accumulating into `out`.
    fn ladder(&self, psi: &[Complex64], shift: f64, hop: f64, out: &mut [Complex64]) {
        let n_max = self.levels - 1;
        for n in 0..self.levels {
            let mut h = psi[n] * (shift + self.omega * n as f64);
            if n > 0 {
                h += psi[n - 1] * (hop * self.sqrt_n[n]);
            }
            if n < n_max {
                h += psi[n + 1] * (hop * self.sqrt_n[n + 1]);
            }
            out[n] = Complex64::new(h.im, -h.re);
        }
    }

    fn apply(&self, psi: &SectorState, out: &mut SectorState) {
        let l = self.levels;
        let hop = self.phonon_coupling;
        self.ladder(&psi.e, 0.0, hop, &mut out.e);
        self.ladder(&psi.g, 0.0, -hop, &mut out.g);
        for (k, (&gk, &dk)) in self.bath.couplings.iter().zip(&self.bath.mode_detunings).enumerate() {
            let block = k * l..(k + 1) * l;
            self.ladder(&psi.c[block.clone()], -dk, -hop, &mut out.c[block.clone()]);
            for n in 0..l {
                // -i g_k e_n into the photon amplitude, -i g_k c_{k,n} into e_n
                let ce = psi.e[n] * gk;
                out.c[k * l + n] += Complex64::new(ce.im, -ce.re);
                let ec = psi.c[k * l + n] * gk;
                out.e[n] += Complex64::new(ec.im, -ec.re);
            }
        }
    }
}

struct Rk4 {
    k1: SectorState,
    k2: SectorState,
    k3: SectorState,
    k4: SectorState,
    tmp: SectorState,
}

impl Rk4 {
    fn new(levels: usize, modes: usize) -> Self {
        let z = SectorState::zeros(levels, modes);
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    fn step(&mut self, h: &SectorHamiltonian, psi: &mut SectorState, dt: f64) {
        h.apply(psi, &mut self.k1);
        self.tmp.axpy_from(psi, 0.5 * dt, &self.k1);
        h.apply(&self.tmp, &mut self.k2);
        self.tmp.axpy_from(psi, 0.5 * dt, &self.k2);
        h.apply(&self.tmp, &mut self.k3);
        self.tmp.axpy_from(psi, dt, &self.k3);
        h.apply(&self.tmp, &mut self.k4);
        let w = dt / 6.0;
        for (dst, (a, b, c, d)) in [
            (&mut psi.e, (&self.k1.e, &self.k2.e, &self.k3.e, &self.k4.e)),
            (&mut psi.c, (&self.k1.c, &self.k2.c, &self.k3.c, &self.k4.c)),
            (&mut psi.g, (&self.k1.g, &self.k2.g, &self.k3.g, &self.k4.g)),
        ] {
            for i in 0..dst.len() {
                dst[i] += (a[i] + (b[i] + c[i]) * 2.0 + d[i]) * w;
            }
        }
    }
}

/// Schrödinger evolution of qubit ⊗ discretized cavity ⊗ phonon from
/// `(a|e⟩ + b|g⟩) ⊗ |vac⟩ ⊗ |0⟩`, reduced to the qubit on `t_grid`.
///
/// Uses fixed-step RK4 with `dt · ‖H‖ < 0.1`; each grid interval is split
/// into equal steps no longer than `dt`.
pub fn exact_evolution(
    p: &ModelParams<f64>,
    cfg: &OracleConfig,
    init: &InitialAmplitudes<f64>,
    t_grid: &[f64],
) -> Result<Vec<ExactSample>> {
    let p = p.validate_allow_decoupled()?;
    check_grid(t_grid)?;
    if !(cfg.integrator_tol > 0.0) {
        return Err(Error::InvalidParam {
            field: "integrator_tol",
            requirement: "positive",
        });
    }
    let n_ph_max = cfg.resolved_n_ph_max(p.g_p)?;
    let bath = discretize_bath(&p, cfg)?;
    let modes = bath.modes;
    let h = SectorHamiltonian::new(&p, bath, n_ph_max);
    let norm = h.norm_bound();
    let dt_max = match cfg.dt {
        None => AUTO_STEP_NORM / norm,
        Some(dt) if dt > 0.0 && dt * norm < MAX_STEP_NORM => dt,
        Some(_) => {
            return Err(Error::InvalidParam {
                field: "dt",
                requirement: "positive with dt * ||H|| < 0.1",
            })
        }
    };

    let levels = n_ph_max + 1;
    let mut psi = SectorState::zeros(levels, modes);
    psi.e[0] = init.a;
    psi.g[0] = init.b;
    let mut rk = Rk4::new(levels, modes);
    let tol = cfg.integrator_tol;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let span = t - now;
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for i in 0..steps {
                rk.step(&h, &mut psi, dt);
                let top = psi.top_level_population(levels);
                if top > tol {
                    return Err(Error::FockLeakage {
                        population: top,
                        t: now + (i + 1) as f64 * dt,
                    });
                }
            }
            now = t;
        }
        let drift = (psi.norm_sqr() - 1.0).abs();
        if drift > tol {
            return Err(Error::NormDrift { drift, t });
        }
        out.push(ExactSample {
            t,
            rho: psi.reduced(),
            norm_drift: drift,
            top_fock_population: psi.top_level_population(levels),
        });
    }
    Ok(out)
}
