use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use qborel::dilog::*;
use qborel::Error;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn p(b: f64) -> BParam {
    BParam::new(b).unwrap()
}

#[test]
fn reflection_at_half_q() {
    let b = p(0.8);
    let h = b.Q() / 2.0;
    let g = big_g(&b, C64::new(h, 0.0)).unwrap();
    assert!((g * g - (I * PI * h * (h - b.Q())).exp()).norm() < 1e-8);
}

#[test]
fn s_reflection_on_random_strip_points() {
    let b = p(0.7);
    let q = b.Q();
    for k in 0..20 {
        let z = C64::new(
            0.1 + (q - 0.2) * (k as f64 / 19.0),
            ((k * 7) % 11) as f64 / 5.0 - 1.0,
        );
        let r = sb(&b, z).unwrap() * sb(&b, q - z).unwrap();
        assert!((r - 1.0).norm() < 1e-8, "{z}");
    }
}

#[test]
fn unimodular_on_positive_axis() {
    let b = p(0.75);
    for k in 0..50 {
        let x = 10f64.powf(-3.0 + 6.0 * k as f64 / 49.0);
        assert!((gb(&b, x).unwrap().norm() - 1.0).abs() < 1e-8, "{x}");
    }
}

#[test]
fn conjugation_identity() {
    let b = p(0.6);
    for z in [C64::new(0.2, 0.7), C64::new(-0.8, -0.3), C64::new(2.9, 1.1)] {
        let r = big_g(&b, z).unwrap().conj() * big_g(&b, b.Q() - z.conj()).unwrap();
        assert!((r - 1.0).norm() < 1e-8, "{z}");
    }
}

#[test]
fn g_self_duality() {
    let b = p(0.75);
    for x in [0.01, 0.5, 2.0, 40.0] {
        let d = gb(&b, x).unwrap() - gb(&b.dual(), x.powf(1.0 / (0.75 * 0.75))).unwrap();
        assert!(d.norm() < 1e-8);
    }
}

#[test]
fn tau_beta_examples() {
    let b = p(0.8);
    let q = b.Q();
    assert!(check_tau_beta(&b, C64::new(q / 3.0, 0.0), C64::new(q / 3.0, 0.0)).unwrap() < 1e-6);
    assert!(check_tau_beta(&b, C64::new(q / 2.0, 0.0), C64::new(q / 4.0, 0.0)).unwrap() < 1e-6);
    let edge = check_tau_beta(&b, C64::new(q / 2.0, 0.0), C64::new(q / 2.0, 0.0));
    assert!(matches!(edge, Err(Error::ConvergenceViolation(_))));
}

#[test]
fn fourier_examples() {
    let b = p(0.7);
    for x in [1.0, 10.0] {
        let r = check_fourier_gb(&b, x).unwrap();
        assert!(r.gb < 1e-6 && r.gb_star < 1e-6, "{x}: {r:?}");
    }
    assert!(check_fourier_gb(&b, -1.0).is_err());
}

#[test]
fn g_times_conjugate_is_one() {
    let b = p(0.9);
    for x in [0.3, 3.0] {
        assert!((gb(&b, x).unwrap() * gb_star(&b, x).unwrap() - 1.0).norm() < 1e-12);
    }
}
