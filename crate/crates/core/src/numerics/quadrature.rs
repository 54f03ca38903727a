//! Adaptive 7/15-point Gauss-Kronrod quadrature for complex-valued
//! integrands on a finite interval.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::kahan::KahanSumComplex;
use crate::scalar::Real;

// QUADPACK qk15 abscissae and weights, kept at their published precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec<T> {
    /// Target absolute error for the whole interval.
    pub abs_tol: T,
    /// Upper bound on any panel width; set from the fastest oscillation.
    pub max_panel_width: T,
    /// Total number of Kronrod panels the refinement may evaluate.
    pub max_panels: usize,
}

fn kronrod_panel<T, F>(f: &F, a: T, b: T) -> (Complex<T>, T)
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    let half = (b - a) / T::lit(2.0);
    let center = a + half;
    let f_center = f(center);
    let mut kronrod = f_center * T::lit(WGK[7]);
    let mut gauss = f_center * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

/// Integrates `f` over `[a, b]`, starting from uniform panels no wider than
/// `spec.max_panel_width` and bisecting any panel whose Kronrod-Gauss
/// difference exceeds its share of `spec.abs_tol`.
pub fn integrate_complex<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    if !(b > a) {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let length = b - a;
    let initial = (length / spec.max_panel_width).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    if initial > spec.max_panels {
        return Err(Error::QuadratureBudget {
            upper: b.to_f64_lossy(),
            panels: spec.max_panels,
            estimate: f64::INFINITY,
        });
    }
    let width = length / T::from_usize(initial).unwrap();
    let mut total = KahanSumComplex::new();
    let mut used = 0usize;
    let mut worst = T::zero();
    let mut stack: Vec<(T, T, usize)> = Vec::new();
    for i in (0..initial).rev() {
        let lo = a + width * T::from_usize(i).unwrap();
        let hi = if i + 1 == initial {
            b
        } else {
            a + width * T::from_usize(i + 1).unwrap()
        };
        stack.push((lo, hi, 0));
    }
    while let Some((lo, hi, depth)) = stack.pop() {
        used += 1;
        if used > spec.max_panels {
            return Err(Error::QuadratureBudget {
                upper: b.to_f64_lossy(),
                panels: spec.max_panels,
                estimate: worst.to_f64_lossy(),
            });
        }
        let (value, err) = kronrod_panel(&f, lo, hi);
        let share = spec.abs_tol * (hi - lo) / length;
        if err <= share || depth >= 40 {
            worst = worst.max(err);
            total.add(value);
        } else {
            let mid = lo + (hi - lo) / T::lit(2.0);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total.total())
}
