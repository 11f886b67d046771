use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use paultrap::geometry::{ion_from_catalog, IonSpecies};
use paultrap::heating::*;
use paultrap::units::{ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE};

#[test]
fn worked_point_constant_by_constant() {
    let yb = ion_from_catalog("Yb171").unwrap();
    let w = TAU * 1e6;
    let s = 1e-11;
    let oracle = {
        let e = 1.602_176_634e-19_f64;
        let m = 171.0 * 1.660_539_066_60e-27;
        let hbar = 1.054_571_817e-34;
        e * e * s / (4.0 * m * hbar * w)
    };
    let est = heating_rate_for(&yb, w, TAU * 20e6, |_| Ok(s), false).unwrap();
    assert!((est.ndot / oracle - 1.0).abs() < 1e-12);
    assert!((est.ndot - 341.0).abs() < 1.0);
    assert_eq!(est.secular_term, est.ndot);
    assert!(est.sideband_combination.contains("mean"));
}

#[test]
fn rate_scales_inversely_with_mass() {
    let a = IonSpecies::new("a", 40.0 * ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE).unwrap();
    let b = IonSpecies::new("b", 80.0 * ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE).unwrap();
    let f = |ion: &IonSpecies| heating_rate_for(ion, TAU * 2e6, TAU * 30e6, |_| Ok(3e-12), true).unwrap().ndot;
    assert!((f(&a) / f(&b) - 2.0).abs() < 1e-12);
}

#[test]
fn cross_term_structure() {
    let ion = ion_from_catalog("Ca40").unwrap();
    let noise = NoiseModel::new(1e-12, TAU * 1e6, 1e-4).unwrap();
    let w = TAU * 1e6;
    let mut last = f64::INFINITY;
    for omega_rf in [TAU * 10e6, TAU * 30e6, TAU * 100e6, TAU * 1e9] {
        let est = heating_rate(&ion, w, omega_rf, &noise, 1e-4, 0.0, true).unwrap();
        let s_w = noise.noise_at(w, 1e-4, 0.0).unwrap();
        let side = 0.5 * (noise.noise_at(omega_rf - w, 1e-4, 0.0).unwrap() + noise.noise_at(omega_rf + w, 1e-4, 0.0).unwrap());
        let bound = w * w / (2.0 * omega_rf * omega_rf) * est.secular_term * side / s_w;
        assert!(est.cross_term <= bound * (1.0 + 1e-12));
        assert!(est.cross_term < last);
        assert!((est.ndot - est.secular_term - est.cross_term).abs() <= 1e-15 * est.ndot);
        last = est.cross_term;
    }
    assert!(last / heating_rate(&ion, w, TAU * 1e9, &noise, 1e-4, 0.0, true).unwrap().secular_term < 1e-6);
}

#[test]
fn temperature_law_plateau_and_doubling() {
    let law = TemperatureLaw::cryogenic();
    assert_eq!(law.value(46.0), 2.0 * law.value(0.0));
    assert_eq!(law.value(0.0), 42e-15);
    assert!((law.value(1e-3) / 42e-15 - 1.0).abs() < 1e-15);
    let mut prev = 0.0;
    for i in 0..400 {
        let v = law.value(i as f64);
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn measured_exponent_recovered_from_noisy_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|i| {
            let d = 30e-6 * (10f64).powf(i as f64 / 19.0);
            (d, 1e-20 * d.powf(-3.5) * (1.0 + noise.sample(&mut rng)))
        })
        .collect();
    let fit = fit_power_law(&pts).unwrap();
    assert!((fit.exponent + 3.5).abs() < 0.15, "{}", fit.exponent);
    assert_eq!(fit.n_points, 20);
    let exact: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64 * 1e-5, 7e-30 * (i as f64 * 1e-5).powi(-4))).collect();
    let f = fit_power_law(&exact).unwrap();
    assert!((f.exponent + 4.0).abs() < 1e-9);
    assert!(f.residual < 1e-9);
    assert!((f.prefactor / 7e-30 - 1.0).abs() < 1e-8);
}

proptest! {
    #[test]
    fn noise_is_multiplicative(w in 1e5f64..1e8, d in 1e-5f64..1e-3, t in 0.0f64..400.0, beta in -5.0f64..-2.0) {
        let base = NoiseModel::from_temperature_law(TemperatureLaw::cryogenic(), TAU * 1e6, 1e-4).unwrap().with_distance_exponent(beta);
        let mut other = base;
        other.s0 *= 3.7;
        let r1 = base.noise_at(w, d, t).unwrap() / base.s0;
        let r2 = other.noise_at(w, d, t).unwrap() / other.s0;
        prop_assert!((r1 / r2 - 1.0).abs() < 1e-14);
        let half = base.noise_at(w, 0.5 * d, t).unwrap() / base.noise_at(w, d, t).unwrap();
        prop_assert!((half / 2f64.powf(-beta) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_flat_under_inverse_frequency(w in 1e5f64..1e8, k in 1.5f64..10.0) {
        let m = NoiseModel::new(2e-12, TAU * 1e6, 1e-4).unwrap();
        let a = scaled_noise_product(w, m.noise_at(w, 1e-4, 0.0).unwrap()).unwrap();
        let b = scaled_noise_product(k * w, m.noise_at(k * w, 1e-4, 0.0).unwrap()).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-13);
    }

    #[test]
    fn fit_is_scale_equivariant(c in 0.1f64..10.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let pts: Vec<(f64, f64)> = (1..=8).map(|i| {
            let d = i as f64 * 1e-5;
            (d, d.powf(-3.0) * (1.0 + noise.sample(&mut rng)))
        }).collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(d, y)| (c * d, y)).collect();
        let a = fit_power_law(&pts).unwrap();
        let b = fit_power_law(&scaled).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
        prop_assert!((a.residual - b.residual).abs() < 1e-9);
        prop_assert!((b.prefactor / (a.prefactor * c.powf(-a.exponent)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn temperature_law_monotone(t1 in 0.0f64..500.0, dt in 0.0f64..100.0) {
        let law = TemperatureLaw::cryogenic();
        prop_assert!(law.value(t1 + dt) >= law.value(t1));
        prop_assert!(law.value(t1) >= law.plateau);
    }
}
