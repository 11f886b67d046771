//! Secular frequency from sampled motion, and micromotion amplitudes.

use std::f64::consts::{PI, TAU};

use num_complex::Complex;
use rustfft::FftPlanner;

use super::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Minimum number of secular periods the record must span.
pub const MIN_SECULAR_PERIODS: f64 = 32.0;

const ZERO_PAD: usize = 4;

fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (TAU * i as f64 / (n - 1) as f64).cos()).collect()
}

/// Dominant spectral peak below `omega_rf / 2` of a uniformly sampled
/// signal, rad/s.
///
/// Mean removal and a Hann window, a zero-padded FFT for the coarse peak,
/// parabolic interpolation on the log magnitude, then golden-section
/// maximisation of the windowed DTFT within one padded bin to pin it down.
pub fn secular_from_series(signal: &[f64], dt: f64, omega_rf: f64) -> Result<f64> {
    let n = signal.len();
    if n < 16 {
        return Err(Error::InsufficientData(format!("{n} samples are too few for a spectrum")));
    }
    if !(dt > 0.0 && dt.is_finite() && omega_rf > 0.0) {
        return Err(Error::Validation("sample interval and drive frequency must be positive".into()));
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let w = hann(n);
    let xs: Vec<f64> = signal.iter().zip(&w).map(|(s, w)| (s - mean) * w).collect();

    let m = (n * ZERO_PAD).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = xs.iter().map(|&x| Complex::new(x, 0.0)).collect();
    buf.resize(m, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let df = TAU / (m as f64 * dt);
    let limit = (0.5 * omega_rf).min(PI / dt);
    let top = ((limit / df).floor() as usize).min(m / 2);
    // skip the window's DC lobe
    let first = 2 * ZERO_PAD;
    if top <= first + 1 {
        return Err(Error::Analysis("no spectral content below half the drive frequency".into()));
    }
    let mag: Vec<f64> = buf[..=m / 2].iter().map(|c| c.norm()).collect();
    let global = mag[first..].iter().fold(0.0f64, |a, &b| a.max(b));
    let (k, &peak) = mag[first..top]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i + first, v))
        .unwrap();
    if !(peak > 0.0) || k <= first || peak < 1e-3 * global {
        return Err(Error::Analysis("no spectral peak below half the drive frequency".into()));
    }

    let (l, c, r) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
    let den = l - 2.0 * c + r;
    let offset = if den < 0.0 { (0.5 * (l - r) / den).clamp(-0.5, 0.5) } else { 0.0 };

    let dtft = |om: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for (i, x) in xs.iter().enumerate() {
            let (s, c) = (om * i as f64 * dt).sin_cos();
            re += x * c;
            im -= x * s;
        }
        re.hypot(im)
    };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let center = (k as f64 + offset) * df;
    let (mut a, mut b) = (center - df, center + df);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (dtft(x1), dtft(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = dtft(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = dtft(x1);
        }
        if b - a < 1e-9 * center {
            break;
        }
    }
    let omega = 0.5 * (a + b);

    let span = dt * (n - 1) as f64;
    if span * omega < MIN_SECULAR_PERIODS * TAU {
        return Err(Error::InsufficientData(format!(
            "record spans {:.1} secular periods, need {MIN_SECULAR_PERIODS}",
            span * omega / TAU
        )));
    }
    Ok(omega)
}

/// Secular frequency of one coordinate (`axis` 0, 1, 2) of a bounded
/// trajectory, rad/s.
pub fn secular_from_trajectory(traj: &Trajectory, axis: usize, omega_rf: f64) -> Result<f64> {
    if traj.diverged {
        return Err(Error::Analysis("trajectory diverged".into()));
    }
    secular_from_series(&traj.component(axis), traj.sample_interval(), omega_rf)
}

/// Micromotion amplitude `|q| / 2 * x`, m. Use the secular amplitude for
/// intrinsic micromotion or the stray-field displacement from the nil for
/// excess micromotion.
pub fn micromotion_amplitude(q: f64, displacement: f64) -> Result<f64> {
    if !(q.abs() < 1.0) {
        return Err(Error::Validation(format!("micromotion estimate needs |q| < 1, got {q}")));
    }
    Ok(0.5 * q.abs() * displacement.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_secular_plus_micromotion() {
        let w = TAU * 1e6;
        let om = TAU * 30e6;
        let q = 0.2;
        let dt = TAU / om / 60.0;
        let n = (40.0 * TAU / w / dt) as usize;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                1e-6 * (w * t).cos() * (1.0 + 0.5 * q * (om * t).cos())
            })
            .collect();
        let got = secular_from_series(&x, dt, om).unwrap();
        assert!((got / w - 1.0).abs() < 1e-3, "{}", got / w);
    }

    #[test]
    fn too_short_or_too_fast() {
        let om = TAU * 30e6;
        let dt = 1e-9;
        let short: Vec<f64> = (0..10_000).map(|i| (TAU * 1e6 * i as f64 * dt).sin()).collect();
        assert!(matches!(secular_from_series(&short, dt, om), Err(Error::InsufficientData(_))));
        // only content above half the drive
        let fast: Vec<f64> = (0..100_000).map(|i| (0.9 * om * i as f64 * 1e-10).sin()).collect();
        assert!(matches!(secular_from_series(&fast, 1e-10, om), Err(Error::Analysis(_))));
        let flat = vec![1.0; 4096];
        assert!(matches!(secular_from_series(&flat, dt, om), Err(Error::Analysis(_))));
    }

    #[test]
    fn micromotion_formula() {
        assert!((micromotion_amplitude(0.2, 1e-6).unwrap() - 1e-7).abs() < 1e-22);
        assert_eq!(micromotion_amplitude(0.3, 0.0).unwrap(), 0.0);
        assert!(micromotion_amplitude(1.0, 1e-6).is_err());
    }
}
