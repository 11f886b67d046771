//! Central finite differences of a field's potential.

use nalgebra::{Matrix3, Vector3};

use super::{Point, ScalarField};
use crate::error::{Error, Result};

/// Default difference step relative to the field's length scale.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-6;

/// Steps below this (m) are rejected.
pub const MIN_DIFF_STEP: f64 = 1e-12;

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h >= MIN_DIFF_STEP) {
        return Err(Error::Configuration(format!(
            "difference step {h:e} m is below the {MIN_DIFF_STEP:e} m floor"
        )));
    }
    Ok(())
}

fn unit(i: usize, h: f64) -> Vector3<f64> {
    let mut e = Vector3::zeros();
    e[i] = h;
    e
}

/// Gradient of the potential by central differences with step `h`.
pub fn field_gradient(field: &dyn ScalarField, p: &Point, h: f64) -> Result<Vector3<f64>> {
    check_step(h)?;
    let mut g = Vector3::zeros();
    for i in 0..3 {
        let e = unit(i, h);
        g[i] = (field.potential(&(p + e))? - field.potential(&(p - e))?) / (2.0 * h);
    }
    Ok(g)
}

/// Hessian of the potential by central second differences with step `h`,
/// symmetrized. Second differences lose `eps / h^2` to rounding, so `h` should
/// be around `1e-4` of the length scale rather than the gradient step.
pub fn hessian(field: &dyn ScalarField, p: &Point, h: f64) -> Result<Matrix3<f64>> {
    check_step(h)?;
    let f0 = field.potential(p)?;
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        let ei = unit(i, h);
        m[(i, i)] = (field.potential(&(p + ei))? - 2.0 * f0 + field.potential(&(p - ei))?) / (h * h);
        for j in (i + 1)..3 {
            let ej = unit(j, h);
            let v = (field.potential(&(p + ei + ej))? - field.potential(&(p + ei - ej))?
                - field.potential(&(p - ei + ej))?
                + field.potential(&(p - ei - ej))?)
                / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(0.5 * (m + m.transpose()))
}
