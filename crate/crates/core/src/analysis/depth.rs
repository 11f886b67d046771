//! Trap depth: the lowest pseudopotential barrier between the nil and the
//! outside, found by a vertical line scan and refined to the saddle.

use nalgebra::{Matrix2, Vector2, Vector3};

use super::{radial_plane, Energy, Point, TrapModel};
use crate::error::{Error, Result};
use crate::geometry::Geometry;

const SCAN_SAMPLES: usize = 1200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Depth {
    pub energy: Energy,
    pub escape_point: Point,
    /// True when the line maximum was refined to a stationary point.
    pub refined: bool,
}

/// `psi(saddle) - psi(nil)`.
///
/// Planar and two-layer layouts scan the vertical line through the nil
/// (both directions for two-layer stacks); hyperbolic traps have no saddle and
/// escape at the electrode surface, `r0` from the axis.
pub fn trap_depth(model: &TrapModel, nil: &Point) -> Result<Depth> {
    let psi0 = model.pseudopotential(nil)?;
    if model.pseudo_prefactor() == 0.0 {
        return Ok(Depth { energy: Energy::from_joules(0.0), escape_point: *nil, refined: false });
    }
    match model.layout().geometry {
        Geometry::Hyperbolic { r0 } => {
            let mut best: Option<(f64, Point)> = None;
            for dir in [Vector3::x(), Vector3::y()] {
                let p = nil + r0 * dir;
                let v = model.pseudopotential(&p)?;
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, p));
                }
            }
            let (v, p) = best.unwrap();
            Ok(Depth { energy: Energy::from_joules(v - psi0), escape_point: p, refined: false })
        }
        Geometry::Planar { .. } => {
            let top = nil.z + 10.0 * nil.z.max(model.length_scale());
            let line = scan(model, nil, top)?;
            let s = refine_saddle(model, nil, line)?;
            Ok(depth_from(psi0, s))
        }
        Geometry::TwoLayer { w, d } => {
            let mut best: Option<(f64, Point, bool)> = None;
            for sign in [1.0, -1.0] {
                // the scan stops where the grid ends
                let limit = sign * (0.5 * d + 10.0 * w.max(d));
                let line = match scan(model, nil, limit) {
                    Ok(l) => l,
                    Err(Error::UnboundedRegion) => continue,
                    Err(e) => return Err(e),
                };
                let s = refine_saddle(model, nil, line)?;
                if best.is_none_or(|(b, ..)| s.0 < b) {
                    best = Some(s);
                }
            }
            let s = best.ok_or(Error::UnboundedRegion)?;
            Ok(depth_from(psi0, s))
        }
    }
}

fn depth_from(psi0: f64, (v, p, refined): (f64, Point, bool)) -> Depth {
    Depth { energy: Energy::from_joules((v - psi0).max(0.0)), escape_point: p, refined }
}

/// Sample psi on the vertical line from the nil to `z_end` and return the
/// first local maximum, refined by golden section, as `(psi, point)`.
fn scan(model: &TrapModel, nil: &Point, z_end: f64) -> Result<(f64, Point)> {
    let at = |z: f64| Point::new(nil.x, nil.y, z);
    let dz = (z_end - nil.z) / SCAN_SAMPLES as f64;
    let mut vals = Vec::with_capacity(SCAN_SAMPLES + 1);
    for i in 0..=SCAN_SAMPLES {
        match model.pseudopotential(&at(nil.z + i as f64 * dz)) {
            Ok(v) => vals.push(v),
            // leaving the field domain ends the scan
            Err(Error::Domain(_)) => break,
            Err(e) => return Err(e),
        }
    }
    let k = (1..vals.len().saturating_sub(1)).find(|&i| vals[i] >= vals[i - 1] && vals[i] > vals[i + 1]);
    let Some(k) = k else { return Err(Error::UnboundedRegion) };
    let (mut a, mut b) = (nil.z + (k - 1) as f64 * dz, nil.z + (k + 1) as f64 * dz);
    let psi = |z: f64| model.pseudopotential(&at(z));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (psi(c)?, psi(d)?);
    while (b - a).abs() > 1e-10 * nil.z.abs().max(model.length_scale()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = psi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = psi(d)?;
        }
    }
    let z = 0.5 * (a + b);
    Ok((psi(z)?, at(z)))
}

/// Newton iteration on `grad psi = 0` in the radial plane, starting from the
/// line maximum. Falls back to the line maximum when Newton wanders off.
fn refine_saddle(model: &TrapModel, nil: &Point, (v0, p0): (f64, Point)) -> Result<(f64, Point, bool)> {
    let (i, j) = radial_plane(model.layout().axial_axis());
    let reach = 0.5 * (p0 - nil).norm();
    let mut p = p0;
    for _ in 0..30 {
        let (g, h) = match (model.pseudo_gradient(&p), model.pseudo_hessian(&p)) {
            (Ok(g), Ok(h)) => (g, h),
            _ => break,
        };
        let g2 = Vector2::new(g[i], g[j]);
        let h2 = Matrix2::new(h[(i, i)], h[(i, j)], h[(j, i)], h[(j, j)]);
        let Some(step) = h2.lu().solve(&(-g2)) else { break };
        p[i] += step[0];
        p[j] += step[1];
        if (p - p0).norm() > reach {
            break;
        }
        if step.norm() <= 1e-12 * model.length_scale() {
            if let Ok(v) = model.pseudopotential(&p) {
                // a saddle reached from the line maximum lies no higher than it
                if v <= v0 * (1.0 + 1e-9) {
                    return Ok((v, p, true));
                }
            }
            break;
        }
    }
    Ok((v0, p0, false))
}
