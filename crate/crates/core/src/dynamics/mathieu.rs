//! Floquet stability of the Mathieu equation `u'' + (a - 2q cos 2 zeta) u = 0`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_f64;

/// Distance of `|tr M|` from 2 below which a point counts as marginal.
pub const STABILITY_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    /// `|tr M|` within [`STABILITY_MARGIN`] of 2 (e.g. `a = q = 0`).
    Marginal,
}

impl Verdict {
    /// CSV encoding: stable 1, unstable 0, marginal -1.
    pub fn code(self) -> i8 {
        match self {
            Verdict::Stable => 1,
            Verdict::Unstable => 0,
            Verdict::Marginal => -1,
        }
    }

    pub fn is_stable(self) -> bool {
        self == Verdict::Stable
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub verdict: Verdict,
    pub trace: f64,
    pub det: f64,
    /// Fundamental matrix after one period, row-major.
    pub matrix: [[f64; 2]; 2],
}

fn steps_for(a: f64, q: f64) -> usize {
    1000 * (a.abs() + 2.0 * q.abs()).sqrt().ceil().max(1.0) as usize
}

/// Monodromy matrix over `zeta in [0, pi]` by classical RK4.
pub fn mathieu_stable(a: f64, q: f64) -> Result<Monodromy> {
    if !(a.is_finite() && q.is_finite()) {
        return Err(Error::Validation(format!("Mathieu parameters must be finite, got a={a}, q={q}")));
    }
    let n = steps_for(a, q);
    let h = std::f64::consts::PI / n as f64;
    let k = |z: f64| a - 2.0 * q * (2.0 * z).cos();
    // columns: solutions with (u, u') = (1, 0) and (0, 1)
    let mut s = [[1.0, 0.0], [0.0, 1.0]];
    for i in 0..n {
        let z = i as f64 * h;
        let (k0, k1, k2) = (k(z), k(z + 0.5 * h), k(z + h));
        for col in &mut s {
            let [u, v] = *col;
            let (du1, dv1) = (v, -k0 * u);
            let (du2, dv2) = (v + 0.5 * h * dv1, -k1 * (u + 0.5 * h * du1));
            let (du3, dv3) = (v + 0.5 * h * dv2, -k1 * (u + 0.5 * h * du2));
            let (du4, dv4) = (v + h * dv3, -k2 * (u + h * du3));
            col[0] = u + h / 6.0 * (du1 + 2.0 * du2 + 2.0 * du3 + du4);
            col[1] = v + h / 6.0 * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4);
        }
    }
    let matrix = [[s[0][0], s[1][0]], [s[0][1], s[1][1]]];
    let trace = matrix[0][0] + matrix[1][1];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let verdict = if (trace.abs() - 2.0).abs() <= STABILITY_MARGIN {
        Verdict::Marginal
    } else if trace.abs() < 2.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(Monodromy { verdict, trace, det, matrix })
}

/// Long-time check by leapfrog integration: both fundamental solutions stay
/// below `1e6` over `periods` periods of `pi`. Stops early once one escapes.
pub fn mathieu_bounded(a: f64, q: f64, periods: usize, steps_per_period: usize) -> bool {
    let m = steps_per_period.max(8);
    let h = std::f64::consts::PI / m as f64;
    let k: Vec<f64> = (0..m).map(|j| a - 2.0 * q * (2.0 * j as f64 * h).cos()).collect();
    let limit = 1e6;
    let (mut u, mut v) = ([1.0f64, 0.0], [0.0f64, 1.0]);
    for _ in 0..periods {
        for j in 0..m {
            let (k0, k1) = (k[j], k[(j + 1) % m]);
            for c in 0..2 {
                let vh = v[c] - 0.5 * h * k0 * u[c];
                u[c] += h * vh;
                v[c] = vh - 0.5 * h * k1 * u[c];
            }
        }
        if u.iter().chain(&v).any(|x| !(x.abs() < limit)) {
            return false;
        }
    }
    true
}

/// First stability boundary in `q` at fixed `a`, by bisection between a
/// stable `q_lo` and an unstable `q_hi`.
pub fn stability_boundary(a: f64, q_lo: f64, q_hi: f64, tol: f64) -> Result<f64> {
    if !mathieu_stable(a, q_lo)?.verdict.is_stable() || mathieu_stable(a, q_hi)?.verdict != Verdict::Unstable {
        return Err(Error::Search(format!("q = {q_lo} must be stable and q = {q_hi} unstable at a = {a}")));
    }
    let (mut lo, mut hi) = (q_lo, q_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mathieu_stable(a, mid)?.verdict.is_stable() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapCell {
    pub a: f64,
    pub q: f64,
    /// Verdict at `(a, q)`.
    pub x: Verdict,
    /// Verdict at `(-a, -q)`.
    pub y: Verdict,
    /// Overlap: stable when both are; unstable when either is.
    pub overlap: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityMap {
    pub a_values: Vec<f64>,
    pub q_values: Vec<f64>,
    /// Row-major: `a` outer, `q` inner.
    pub cells: Vec<MapCell>,
}

impl StabilityMap {
    pub fn cell(&self, ia: usize, iq: usize) -> &MapCell {
        &self.cells[ia * self.q_values.len() + iq]
    }

    /// `a,q,stable_x,stable_y,stable_overlap` with verdicts as 1 / 0 / -1.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "a,q,stable_x,stable_y,stable_overlap")?;
        for c in &self.cells {
            writeln!(w, "{},{},{},{},{}", fmt_f64(c.a), fmt_f64(c.q), c.x.code(), c.y.code(), c.overlap.code())?;
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

/// Stability verdicts on an `n_a x n_q` grid spanning the closed ranges.
pub fn stability_map(a_range: (f64, f64), q_range: (f64, f64), n_a: usize, n_q: usize) -> Result<StabilityMap> {
    if n_a < 2 || n_q < 2 {
        return Err(Error::Validation(format!("stability map needs at least 2x2 cells, got {n_a}x{n_q}")));
    }
    for v in [a_range.0, a_range.1, q_range.0, q_range.1] {
        if !v.is_finite() {
            return Err(Error::Validation("stability map ranges must be finite".into()));
        }
    }
    let a_values = linspace(a_range.0, a_range.1, n_a);
    let q_values = linspace(q_range.0, q_range.1, n_q);
    let pairs: Vec<(f64, f64)> = a_values.iter().flat_map(|&a| q_values.iter().map(move |&q| (a, q))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(a, q)| -> Result<MapCell> {
            let x = mathieu_stable(a, q)?.verdict;
            let y = mathieu_stable(-a, -q)?.verdict;
            let overlap = match (x, y) {
                (Verdict::Stable, Verdict::Stable) => Verdict::Stable,
                (Verdict::Unstable, _) | (_, Verdict::Unstable) => Verdict::Unstable,
                _ => Verdict::Marginal,
            };
            Ok(MapCell { a, q, x, y, overlap })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityMap { a_values, q_values, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert_eq!(mathieu_stable(0.0, 0.5).unwrap().verdict, Verdict::Stable);
        assert_eq!(mathieu_stable(0.0, 0.95).unwrap().verdict, Verdict::Unstable);
        let z = mathieu_stable(0.0, 0.0).unwrap();
        assert_eq!(z.verdict, Verdict::Marginal);
        assert!((z.trace - 2.0).abs() < 1e-12);
        assert!(mathieu_bounded(0.0, 0.5, 10_000, 64));
        assert!(!mathieu_bounded(0.0, 0.95, 10_000, 64));
    }

    #[test]
    fn q_zero_is_harmonic_oscillator() {
        // trace of the rotation by sqrt(a) pi
        for a in [0.1, 0.5, 2.0] {
            let m = mathieu_stable(a, 0.0).unwrap();
            let want = 2.0 * (a.sqrt() * std::f64::consts::PI).cos();
            assert!((m.trace - want).abs() < 1e-10, "{a}: {} {want}", m.trace);
        }
        // a < 0: hyperbolic growth
        let m = mathieu_stable(-0.1, 0.0).unwrap();
        assert!((m.trace - 2.0 * (0.1f64.sqrt() * std::f64::consts::PI).cosh()).abs() < 1e-10);
        assert_eq!(m.verdict, Verdict::Unstable);
    }

    #[test]
    fn boundary_at_a_zero() {
        let q = stability_boundary(0.0, 0.5, 0.95, 1e-6).unwrap();
        // first boundary of the a = 0 line, a_1(q)... crossing zero
        assert!((q - 0.908).abs() < 0.002, "{q}");
        assert!(stability_boundary(0.0, 0.95, 1.0, 1e-6).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(mathieu_stable(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn map_layout_and_csv() {
        let map = stability_map((-0.1, 0.1), (0.0, 1.0), 3, 5).unwrap();
        assert_eq!(map.cells.len(), 15);
        assert_eq!(map.cell(1, 2).a, 0.0);
        assert_eq!(map.cell(1, 2).q, 0.5);
        let mut out = Vec::new();
        map.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("a,q,stable_x,stable_y,stable_overlap"));
        assert_eq!(text.lines().count(), 16);
        // a = 0, q = 0 is marginal on both axes
        assert!(text.contains("\n0,0,-1,-1,-1\n"));
        assert!(stability_map((0.0, 1.0), (0.0, 1.0), 1, 4).is_err());
    }
}
