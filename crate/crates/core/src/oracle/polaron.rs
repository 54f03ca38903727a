use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deviations of the three Lang-Firsov identities at one Fock cutoff,
/// measured in operator norm on the lowest half of the phonon levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolaronCheck {
    pub g_p: f64,
    pub n_ph_max: usize,
    /// `e^S σ⁺ e^{-S} = σ⁺ e^{-2g_p(ν - ν†)}`
    pub raising: f64,
    /// `e^S (Ων†ν + g_pΩσ_z(ν + ν†)) e^{-S} = Ων†ν - g_p²Ω`
    pub displaced_oscillator: f64,
    /// `e^S σ_z e^{-S} = σ_z`
    pub sigma_z: f64,
}

impl PolaronCheck {
    pub fn max_deviation(&self) -> f64 {
        self.raising.max(self.displaced_oscillator).max(self.sigma_z)
    }
}

/// Deviations below this are treated as exponentiation round-off when
/// checking that the error falls with the cutoff.
const ROUND_OFF_FLOOR: f64 = 1e-12;

/// Qubit ⊗ phonon operators on `2(N+1)` states, index `q·(N+1) + n` with
/// `q = 0` the `σ_z = +1` level. Energies are in units of `Ω`.
struct Operators {
    levels: usize,
    number: DMatrix<f64>,
    annihilate: DMatrix<f64>,
    sigma_z: DMatrix<f64>,
    sigma_plus: DMatrix<f64>,
}

impl Operators {
    fn new(n_ph_max: usize) -> Self {
        let levels = n_ph_max + 1;
        let ladder = DMatrix::from_fn(levels, levels, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 });
        let number = DMatrix::from_fn(levels, levels, |i, j| if i == j { i as f64 } else { 0.0 });
        let eye = DMatrix::<f64>::identity(levels, levels);
        let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let sp = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let qubit_eye = DMatrix::<f64>::identity(2, 2);
        Self {
            levels,
            number: qubit_eye.kronecker(&number),
            annihilate: qubit_eye.kronecker(&ladder),
            sigma_z: sz.kronecker(&eye),
            sigma_plus: sp.kronecker(&eye),
        }
    }

    /// Largest singular value restricted to phonon levels `n < levels/2`
    /// in both qubit sectors.
    fn lower_block_norm(&self, m: &DMatrix<f64>) -> f64 {
        let keep: Vec<usize> = (0..2)
            .flat_map(|q| (0..self.levels / 2).map(move |n| q * self.levels + n))
            .collect();
        let block = m.select_rows(&keep).select_columns(&keep);
        block.singular_values().max()
    }
}

/// Builds `S = -g_p σ_z (ν - ν†)` on the truncated space, exponentiates it
/// numerically and returns the deviations of the three identities.
pub fn verify_polaron_transform(g_p: f64, n_ph_max: usize) -> Result<PolaronCheck> {
    if !g_p.is_finite() || g_p < 0.0 {
        return Err(Error::InvalidParam {
            field: "g_p",
            requirement: "finite and non-negative",
        });
    }
    if n_ph_max < 2 {
        return Err(Error::InvalidParam {
            field: "n_ph_max",
            requirement: "at least 2",
        });
    }
    let ops = Operators::new(n_ph_max);
    let nu = &ops.annihilate;
    let nu_dag = nu.transpose();
    let antisym = nu - &nu_dag;
    let generator = -g_p * (&ops.sigma_z * &antisym);
    let u = generator.clone().exp();
    let u_inv = (-generator).exp();
    let conj = |m: &DMatrix<f64>| &u * m * &u_inv;

    let raising_rhs = &ops.sigma_plus * (-2.0 * g_p * &antisym).exp();
    let raising = ops.lower_block_norm(&(conj(&ops.sigma_plus) - raising_rhs));

    let hamiltonian = &ops.number + g_p * (&ops.sigma_z * (nu + &nu_dag));
    let shifted = &ops.number - DMatrix::identity(2 * ops.levels, 2 * ops.levels) * (g_p * g_p);
    let displaced_oscillator = ops.lower_block_norm(&(conj(&hamiltonian) - shifted));

    let sigma_z = ops.lower_block_norm(&(conj(&ops.sigma_z) - &ops.sigma_z));

    Ok(PolaronCheck {
        g_p,
        n_ph_max,
        raising,
        displaced_oscillator,
        sigma_z,
    })
}

/// Runs [`verify_polaron_transform`] on increasing cutoffs and fails if the
/// deviation does not fall with the cutoff before reaching round-off.
pub fn polaron_convergence(g_p: f64, cutoffs: &[usize]) -> Result<Vec<PolaronCheck>> {
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("cutoffs must be strictly increasing".into()));
    }
    let checks = cutoffs
        .iter()
        .map(|&n| verify_polaron_transform(g_p, n))
        .collect::<Result<Vec<_>>>()?;
    for w in checks.windows(2) {
        let (prev, next) = (w[0].max_deviation(), w[1].max_deviation());
        if prev > ROUND_OFF_FLOOR && next > prev {
            return Err(Error::TruncationDominated(format!(
                "deviation rose from {prev:e} at n_ph_max={} to {next:e} at n_ph_max={}",
                w[0].n_ph_max, w[1].n_ph_max
            )));
        }
    }
    Ok(checks)
}
