//! Potential of a unit-voltage rectangle embedded in a grounded plane.
//!
//! The potential at `p` is the solid angle subtended by the rectangle divided
//! by `2 pi`. Each corner `(x_i, y_j)` contributes `atan(X Y / (z R))` with
//! `X = x_i - x`, `Y = y_j - y`, `R = |(X, Y, z)|`, signed `(-1)^(i+j)`.
//! Derivatives are closed form; `zz` follows from harmonicity.

use nalgebra::{Matrix3, Vector3};

use super::ScalarField;
use crate::error::{Error, Result};
use crate::geometry::Rect;

/// Unit-drive basis function of a single planar rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RectBasis {
    pub rect: Rect,
}

impl RectBasis {
    pub fn new(rect: Rect) -> Self {
        Self { rect }
    }

    fn corners(&self, p: &Vector3<f64>) -> Result<[(f64, f64, f64); 4]> {
        if !(p.z > 0.0) {
            return Err(Error::Domain(format!("planar potential requires z > 0, got z = {}", p.z)));
        }
        let r = &self.rect;
        let (x1, x2) = (r.x1 - p.x, r.x2 - p.x);
        let (y1, y2) = (r.y1 - p.y, r.y2 - p.y);
        Ok([(x2, y2, 1.0), (x1, y1, 1.0), (x1, y2, -1.0), (x2, y1, -1.0)])
    }
}

/// Dimensionless potential of a unit-voltage rectangle at `p` (z > 0).
pub fn rect_electrode_potential(rect: &Rect, p: &Vector3<f64>) -> Result<f64> {
    RectBasis::new(*rect).potential(p)
}

const INV_TWO_PI: f64 = 0.5 * std::f64::consts::FRAC_1_PI;

fn corner_value(x: f64, y: f64, z: f64) -> f64 {
    match (x.is_finite(), y.is_finite()) {
        (true, true) => {
            let r = (x * x + y * y + z * z).sqrt();
            (x * y / (z * r)).atan()
        }
        (false, true) => x.signum() * (y / z).atan(),
        (true, false) => y.signum() * (x / z).atan(),
        (false, false) => x.signum() * y.signum() * std::f64::consts::FRAC_PI_2,
    }
}

/// (dG/dX, dG/dY, dG/dz) of one corner term.
fn corner_gradient(x: f64, y: f64, z: f64) -> [f64; 3] {
    match (x.is_finite(), y.is_finite()) {
        (true, true) => {
            let a = x * x + z * z;
            let b = y * y + z * z;
            let r2 = a + y * y;
            let r = r2.sqrt();
            [y * z / (a * r), x * z / (b * r), -x * y * (r2 + z * z) / (a * b * r)]
        }
        (false, true) => {
            let b = y * y + z * z;
            [0.0, x.signum() * z / b, -x.signum() * y / b]
        }
        (true, false) => {
            let a = x * x + z * z;
            [y.signum() * z / a, 0.0, -y.signum() * x / a]
        }
        (false, false) => [0.0; 3],
    }
}

/// (XX, XY, Xz, YY, Yz) second derivatives of one corner term.
fn corner_hessian(x: f64, y: f64, z: f64) -> [f64; 5] {
    match (x.is_finite(), y.is_finite()) {
        (true, true) => {
            let a = x * x + z * z;
            let b = y * y + z * z;
            let r2 = a + y * y;
            let r3 = r2 * r2.sqrt();
            let z2 = z * z;
            [
                -x * y * z * (2.0 * r2 + a) / (a * a * r3),
                z / r3,
                y * (a * r2 - z2 * (2.0 * r2 + a)) / (a * a * r3),
                -x * y * z * (2.0 * r2 + b) / (b * b * r3),
                x * (b * r2 - z2 * (2.0 * r2 + b)) / (b * b * r3),
            ]
        }
        (false, true) => {
            let b = y * y + z * z;
            let s = x.signum();
            [0.0, 0.0, 0.0, -2.0 * s * z * y / (b * b), s * (y * y - z * z) / (b * b)]
        }
        (true, false) => {
            let a = x * x + z * z;
            let s = y.signum();
            [-2.0 * s * z * x / (a * a), 0.0, s * (x * x - z * z) / (a * a), 0.0, 0.0]
        }
        (false, false) => [0.0; 5],
    }
}

impl ScalarField for RectBasis {
    fn potential(&self, p: &Vector3<f64>) -> Result<f64> {
        let sum: f64 = self.corners(p)?.iter().map(|&(x, y, s)| s * corner_value(x, y, p.z)).sum();
        // exact value lies in [0, 1]; clamp rounding noise
        Ok((sum * INV_TWO_PI).clamp(0.0, 1.0))
    }

    fn gradient(&self, p: &Vector3<f64>) -> Result<Vector3<f64>> {
        let mut g = Vector3::zeros();
        for (x, y, s) in self.corners(p)? {
            let [gx, gy, gz] = corner_gradient(x, y, p.z);
            // d/dx = -d/dX, d/dy = -d/dY
            g += s * Vector3::new(-gx, -gy, gz);
        }
        Ok(g * INV_TWO_PI)
    }

    fn hessian(&self, p: &Vector3<f64>) -> Result<Matrix3<f64>> {
        let (mut xx, mut xy, mut xz, mut yy, mut yz) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (x, y, s) in self.corners(p)? {
            let [gxx, gxy, gxz, gyy, gyz] = corner_hessian(x, y, p.z);
            xx += s * gxx;
            xy += s * gxy;
            xz -= s * gxz;
            yy += s * gyy;
            yz -= s * gyz;
        }
        let zz = -xx - yy;
        Ok(Matrix3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz) * INV_TWO_PI)
    }

    fn length_scale(&self) -> f64 {
        let w = self.rect.width().min(self.rect.height());
        if w.is_finite() {
            w
        } else {
            1.0
        }
    }
}

impl RectBasis {
    /// Unclamped solid-angle sum, used to check the bound `0 <= b <= 1`.
    pub fn raw_potential(&self, p: &Vector3<f64>) -> Result<f64> {
        let sum: f64 = self.corners(p)?.iter().map(|&(x, y, s)| s * corner_value(x, y, p.z)).sum();
        Ok(sum * INV_TWO_PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    /// Solid angle of a square of side 2L seen from height z above its center.
    fn square_oracle(l: f64, z: f64) -> f64 {
        (2.0 / std::f64::consts::PI) * (l * l / (z * (2.0 * l * l + z * z).sqrt())).atan()
    }

    #[test]
    fn square_at_height_half_side_is_one_third() {
        let l = 1.3e-4;
        let b = RectBasis::new(Rect::new(-l, l, -l, l));
        let phi = b.potential(&v(0.0, 0.0, l)).unwrap();
        assert!((phi - 1.0 / 3.0).abs() < 1e-15, "{phi}");
        for z in [1e-3 * l, 0.3 * l, 2.0 * l, 50.0 * l] {
            let phi = b.potential(&v(0.0, 0.0, z)).unwrap();
            assert!((phi - square_oracle(l, z)).abs() < 1e-14);
        }
    }

    #[test]
    fn approaches_one_over_interior_and_zero_outside() {
        let b = RectBasis::new(Rect::new(0.0, 2.0, 0.0, 1.0));
        assert!((b.potential(&v(0.7, 0.4, 1e-9)).unwrap() - 1.0).abs() < 1e-8);
        assert!(b.potential(&v(3.0, 0.4, 1e-9)).unwrap() < 1e-8);
        // on an edge the limit is 1/2
        assert!((b.potential(&v(2.0, 0.5, 1e-10)).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn half_plane_from_infinite_bounds() {
        let b = RectBasis::new(Rect::new(0.0, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY));
        // half plane seen from (x, z): angle (pi/2 + atan(x/z)) / pi
        for (x, z) in [(0.0f64, 1.0f64), (1.0, 1.0), (-2.0, 0.5)] {
            let want = 0.5 + (x / z).atan() / std::f64::consts::PI;
            assert!((b.potential(&v(x, 0.3, z)).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_points_on_or_below_plane() {
        let b = RectBasis::new(Rect::new(0.0, 1.0, 0.0, 1.0));
        assert!(matches!(b.potential(&v(0.5, 0.5, 0.0)), Err(Error::Domain(_))));
        assert!(b.gradient(&v(0.5, 0.5, -1.0)).is_err());
        assert!(b.hessian(&v(0.5, 0.5, f64::NAN)).is_err());
    }

    fn fd_gradient(b: &RectBasis, p: Vector3<f64>, h: f64) -> Vector3<f64> {
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = h;
            g[i] = (b.raw_potential(&(p + e)).unwrap() - b.raw_potential(&(p - e)).unwrap()) / (2.0 * h);
        }
        g
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let rects = [
            Rect::new(-1.0, 2.0, -0.5, 0.7),
            Rect::new(0.0, f64::INFINITY, -1.0, 1.0),
            Rect::new(f64::NEG_INFINITY, 0.5, 0.0, f64::INFINITY),
        ];
        let points = [v(0.3, 0.1, 0.4), v(-2.0, 1.5, 0.9), v(1.9, -0.4, 0.05), v(0.0, 0.0, 3.0)];
        for rect in rects {
            let b = RectBasis::new(rect);
            for p in points {
                let g = b.gradient(&p).unwrap();
                let g_fd = fd_gradient(&b, p, 1e-6);
                assert!((g - g_fd).norm() <= 1e-8 * g.norm().max(1e-3), "{rect:?} {p:?}: {g:?} vs {g_fd:?}");

                let h = b.hessian(&p).unwrap();
                let step = 1e-5;
                for i in 0..3 {
                    let mut e = Vector3::zeros();
                    e[i] = step;
                    let col = (b.gradient(&(p + e)).unwrap() - b.gradient(&(p - e)).unwrap()) / (2.0 * step);
                    for j in 0..3 {
                        assert!(
                            (h[(j, i)] - col[j]).abs() <= 1e-6 * h.norm().max(1e-3),
                            "{rect:?} {p:?} H[{j},{i}] {} vs {}",
                            h[(j, i)],
                            col[j]
                        );
                    }
                }
                assert!(h.trace().abs() < 1e-12 * h.norm().max(1.0));
            }
        }
    }

    #[test]
    fn far_field_is_dipole_like() {
        // for z >> size the solid angle is A z / R^3; oracle: midpoint quadrature
        let rect = Rect::new(-1e-6, 1e-6, -0.5e-6, 0.5e-6);
        let b = RectBasis::new(rect);
        let p = v(3e-5, -2e-5, 4e-5);
        let n = 200;
        let (dx, dy) = (rect.width() / n as f64, rect.height() / n as f64);
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = rect.x1 + (i as f64 + 0.5) * dx - p.x;
                let y = rect.y1 + (j as f64 + 0.5) * dy - p.y;
                let r2 = x * x + y * y + p.z * p.z;
                quad += p.z / (r2 * r2.sqrt()) * dx * dy;
            }
        }
        quad /= std::f64::consts::TAU;
        let dipole = rect.area() * p.z / (std::f64::consts::TAU * p.norm().powi(3));
        let phi = b.potential(&p).unwrap();
        assert!((phi - quad).abs() < 1e-8 * quad, "{phi} vs {quad}");
        assert!((phi - dipole).abs() < 0.01 * dipole);
    }
}
