use std::f64::consts::{PI, TAU};

use mirrorkit_core::check::all_passed;
use mirrorkit_core::theta::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn tau(re: f64, im: f64) -> UpperHalfParam {
    UpperHalfParam::new(c(re, im)).unwrap()
}

const CHARS: [Characteristic; 4] =
    [Characteristic::ZERO, Characteristic::HALF_ZERO, Characteristic::ZERO_HALF, Characteristic::HALF_HALF];

/// Oracle: shifting the summation index in the defining series.
#[test]
fn quasi_periodicity() {
    let t = TruncationPolicy::default();
    for tu in [tau(0.2, 1.5), tau(-0.4, 0.6), tau(0.0, 1.0)] {
        for ch in CHARS {
            for zeta in [c(0.1, 0.05), c(-0.33, 0.2), c(0.7, -0.1)] {
                let lhs = theta(ch, zeta + tu.tau(), tu, t).value;
                let factor = (c(0.0, -PI) * tu.tau() - c(0.0, 2.0 * PI) * (zeta + ch.b)).exp();
                let rhs = factor * theta(ch, zeta, tu, t).value;
                assert!(relative_residual(lhs, rhs) < 1e-10);
                let shifted = theta(ch, zeta + 1.0, tu, t).value;
                let phase = c(0.0, 2.0 * PI * ch.a).exp();
                assert!(relative_residual(shifted, phase * theta(ch, zeta, tu, t).value) < 1e-12);
            }
        }
    }
}

#[test]
fn eta_nonvanishing() {
    let t = TruncationPolicy::default();
    for k in 0..40 {
        let tu = tau(-1.0 + 0.05 * k as f64, 0.5 + 0.07 * k as f64);
        assert!(eta(tu, t).value.norm() > 1e-3);
    }
}

/// Oracle: the product and the theta series summed by hand with more
/// terms than the library uses.
#[test]
fn jacobi_triple_product_over_the_strip() {
    let t = TruncationPolicy::default();
    let q = c(0.0, -(-PI).exp());
    let lo = q.norm().sqrt();
    for a in 0..12 {
        for m in 0..=10 {
            let r = lo.powf(1.0 - 2.0 * m as f64 / 10.0);
            let x = Complex::from_polar(r, 0.5 * a as f64);
            let mut prod = c(1.0, 0.0);
            for i in 1..=80 {
                let p = q.powi(2 * i - 1);
                prod *= (c(1.0, 0.0) + p / x) * (c(1.0, 0.0) + p * x);
            }
            assert!(relative_residual(prod, triple_product_sum(x, q, t)) < 1e-9);
        }
    }
}

#[test]
fn eta_prefactor_matches_product() {
    let g = TyurinGluingData::standard();
    let t = TruncationPolicy::default();
    let tu = tau(0.2, 1.5);
    assert!((g.tau().tau() - tu.tau()).norm() < 1e-15);
    assert!(relative_residual(eta_prefactor(tu, t), triple_product_prefactor(tu.nome(), t)) < 1e-12);
}

#[test]
fn pairing_identity_holds_for_small_j() {
    let g = TyurinGluingData::standard();
    for j in -5..=5 {
        for k in [1, 2] {
            for z in [c(0.4, 0.3), c(-0.2, 0.9), c(0.01, -0.05)] {
                let (l, r) = pairing_identity(j, k, z, &g);
                assert!((l - r).norm() <= 1e-10 * l.norm().max(r.norm()), "j={j} k={k}");
            }
        }
    }
}

#[test]
fn odd_and_even_products_exchange() {
    let g = TyurinGluingData::new(c(0.1, 0.9), c(0.1, 0.9)).unwrap();
    let t = TruncationPolicy::default();
    let half = (c(0.0, PI) * g.tau().tau()).exp();
    for k in 0..16 {
        let z = Complex::from_polar(1.0, 2.0 * PI * k as f64 / 16.0);
        let w1 = glued_product(z, Parity::Odd, &g, t).unwrap().value;
        let w2_moved = glued_product(half * z, Parity::Even, &g, t).unwrap().value;
        assert!(relative_residual(w2_moved, w1) < 1e-10);
    }
}

#[test]
fn elliptic_suite_on_100_points() {
    let g = TyurinGluingData::standard();
    let t = TruncationPolicy::default();
    let r1 = g.q1().norm();
    let zs: Vec<Complex> = (0..100)
        .map(|k| {
            let s = (k as f64 + 0.5) / 100.0;
            Complex::from_polar(r1.powf(1.0 - s), 2.0 * PI * (0.618_033_988_7 * k as f64).fract())
        })
        .collect();
    let mut checks = elliptic_suite(&g, t, &zs).unwrap();
    checks.push(pairing_check(&g, &zs, 5));
    for ch in &checks {
        assert!(ch.passed, "{ch:?}");
    }
}

#[test]
fn abelian_suite_small_polarizations() {
    let t = TruncationPolicy::default();
    let zetas = [c(0.13, 0.05), c(-0.4, 0.02), c(0.27, 0.1)];
    for k in 1..=2 {
        for l in 1..=2 {
            let checks = abelian_suite(k, l, tau(0.2, 1.5), None, t, &zetas).unwrap();
            assert!(all_passed(&checks), "{checks:?}");
        }
    }
}

#[test]
fn polyannulus_tropicalizes_to_the_square() {
    for a in 1..10 {
        for b in 1..10 {
            let x = [a as f64 / 10.0, b as f64 / 10.0];
            let z = semiflat_coord(&x, &[1.0, 4.0]);
            let y = tropicalize(&z).unwrap();
            assert!(y.iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }
}

proptest! {
    #[test]
    fn superpotential_is_symmetric(r in 0.05f64..3.0, th in 0.0f64..TAU) {
        let q = c(0.04, 0.01);
        let z = Complex::from_polar(r, th);
        let a = superpotential(z, q).unwrap();
        let b = superpotential(q / z, q).unwrap();
        prop_assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn tropicalize_inverts_semiflat(x0 in -2.0f64..2.0, x1 in -2.0f64..2.0, t0 in 0.0f64..TAU, t1 in 0.0f64..TAU) {
        let z = semiflat_coord(&[x0, x1], &[t0, t1]);
        let y = tropicalize(&z).unwrap();
        prop_assert!((y[0] - x0).abs() < 1e-12 && (y[1] - x1).abs() < 1e-12);
    }
}
