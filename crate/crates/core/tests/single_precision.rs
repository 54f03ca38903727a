//! The analytic chain instantiated at `f32` tracks the `f64` results to
//! single-precision accuracy.

use jch_core::dynamics::{coherence_l1, evolve_density};
use jch_core::nonmarkov::{nonmarkovianity, ScanSpec};
use jch_core::rates::{decay_rate, lamb_shift};
use jch_core::{Amplitudes, Amplitudes32, Params, Params32, Truncation, Truncation32};

fn pair(lambda: f64, delta: f64, g_p: f64) -> (Params, Params32) {
    let p = Params {
        lambda,
        delta,
        g_p,
        ..Params::default()
    };
    let p32 = Params32 {
        gamma0: p.gamma0 as f32,
        lambda: p.lambda as f32,
        delta: p.delta as f32,
        omega_ph: p.omega_ph as f32,
        g_p: p.g_p as f32,
        omega0: p.omega0 as f32,
    };
    (p, p32)
}

fn truncation32() -> Truncation32 {
    Truncation32 {
        rel_tol: 1e-6,
        ..Truncation32::default()
    }
}

#[test]
fn rates_agree_with_double_precision() {
    for &(lambda, delta, g_p) in &[(1.0, 0.0, 0.0), (0.1, 1.0, 1.0), (10.0, 10.0, 2.0)] {
        let (p, p32) = pair(lambda, delta, g_p);
        for &t in &[0.5, 3.0, 17.0] {
            let g = decay_rate(&p, t, &Truncation::default()).unwrap();
            let g32 = decay_rate(&p32, t as f32, &truncation32()).unwrap();
            let s = lamb_shift(&p, t, &Truncation::default()).unwrap();
            let s32 = lamb_shift(&p32, t as f32, &truncation32()).unwrap();
            let scale = 1.0 + g.abs() + s.abs();
            assert!((g32 as f64 - g).abs() < 1e-4 * scale, "Γ at λ={lambda} Δ={delta} g={g_p} t={t}");
            assert!((s32 as f64 - s).abs() < 1e-4 * scale, "S at λ={lambda} Δ={delta} g={g_p} t={t}");
        }
    }
}

#[test]
fn coherence_agrees_with_double_precision() {
    let (p, p32) = pair(0.3, 1.0, 1.0);
    let init = Amplitudes::real(0.6, 0.8).unwrap();
    let init32 = Amplitudes32::real(0.6, 0.8).unwrap();
    for &t in &[0.0, 1.0, 5.0, 20.0] {
        let c = coherence_l1(&evolve_density(&init, &p, t, &Truncation::default()).unwrap());
        let c32 = coherence_l1(&evolve_density(&init32, &p32, t as f32, &truncation32()).unwrap());
        assert!((c32 as f64 - c).abs() < 1e-4, "t={t}: {c32} vs {c}");
    }
}

#[test]
fn backflow_agrees_with_double_precision() {
    let (p, p32) = pair(0.1, 1.0, 0.0);
    let n = nonmarkovianity(
        &p,
        &Amplitudes::equatorial(),
        50.0,
        &Truncation::default(),
        &ScanSpec::default(),
    )
    .unwrap();
    let n32 = nonmarkovianity(
        &p32,
        &Amplitudes32::equatorial(),
        50.0,
        &truncation32(),
        &ScanSpec::default(),
    )
    .unwrap();
    assert!(n.n > 0.01);
    assert_eq!(n.intervals.len(), n32.intervals.len());
    assert!((n32.n as f64 - n.n).abs() < 1e-3 * n.n, "{} vs {}", n32.n, n.n);
}
