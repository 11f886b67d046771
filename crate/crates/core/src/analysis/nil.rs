//! rf nil search: lattice sampling of `|grad phi_rf|^2`, then
//! Levenberg-Marquardt refinement from every promising lattice point.

use nalgebra::{Matrix3, Vector3};

use super::{Point, SearchBox, TrapModel};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::Geometry;

const RADIAL_SAMPLES: usize = 31;
const AXIAL_SAMPLES: usize = 9;
const MAX_CANDIDATES: usize = 8;
/// Refined points with `|grad phi|^2` below this fraction of the median
/// sample are true zeros of the rf field.
const ZERO_FIELD: f64 = 1e-16;

/// Point in `region` minimizing the rf field magnitude.
///
/// Errors with [`Error::Search`] when no interior minimum exists and with
/// [`Error::Ambiguous`] when the region holds more than one.
pub fn find_rf_nil(model: &TrapModel, region: &SearchBox) -> Result<Point> {
    let inv = model.invariant_axis();
    let ext = region.extent();
    let axial = model.layout().axial_axis();
    let dims: [usize; 3] = std::array::from_fn(|a| match a {
        _ if Some(a) == inv || ext[a] <= 0.0 => 1,
        _ if a == axial => AXIAL_SAMPLES,
        _ => RADIAL_SAMPLES,
    });
    // planar height spans decades: sample it geometrically
    let planar = matches!(model.layout().geometry, Geometry::Planar { .. });
    let log_z = planar && region.min.z > 0.0 && region.max.z > 10.0 * region.min.z;
    let coord = |a: usize, c: f64| {
        if dims[a] == 1 {
            region.center()[a]
        } else if a == 2 && log_z {
            region.min.z * (region.max.z / region.min.z).powf(c / (dims[a] - 1) as f64)
        } else {
            region.min[a] + ext[a] * c / (dims[a] - 1) as f64
        }
    };
    let at = |c: [f64; 3]| Point::new(coord(0, c[0]), coord(1, c[1]), coord(2, c[2]));
    let node = |c: [usize; 3]| at(c.map(|v| v as f64));
    let idx = |c: [usize; 3]| (c[0] * dims[1] + c[1]) * dims[2] + c[2];
    let unravel = |i: usize| [i / (dims[1] * dims[2]), (i / dims[2]) % dims[1], i % dims[2]];
    let n = dims.iter().product();
    let mut f = vec![f64::INFINITY; n];
    let mut g = vec![None; n];
    for (i, (fi, gi)) in f.iter_mut().zip(g.iter_mut()).enumerate() {
        let p = node(unravel(i));
        if let (Ok(v), Ok(grad)) = (model.rf_field_sq(&p), model.rf_field().gradient(&p)) {
            if v.is_finite() {
                *fi = v;
                *gi = Some(grad);
            }
        }
    }

    // discrete local minima (26-neighbourhood)
    let mut minima = Vec::new();
    for i in 0..n {
        let c = unravel(i);
        if !f[i].is_finite() {
            continue;
        }
        let lower = neighbours(c, dims).any(|nb| f[idx(nb)] < f[i]);
        if !lower {
            minima.push((f[i], node(c)));
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));
    minima.truncate(MAX_CANDIDATES);
    let mut candidates: Vec<Point> = minima.into_iter().map(|(_, p)| p).collect();

    // a narrow nil valley can fall between lattice points: also start from the
    // lowest samples and from radial-plane cells where both radial field
    // components change sign
    let mut order: Vec<usize> = (0..n).filter(|&i| f[i].is_finite()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
    candidates.extend(order.iter().take(MAX_CANDIDATES).map(|&i| node(unravel(i))));
    let (ra, rb) = super::radial_plane(axial);
    let mut brackets = Vec::new();
    if dims[ra] > 1 && dims[rb] > 1 {
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let c = unravel(i);
            if c[ra] + 1 >= dims[ra] || c[rb] + 1 >= dims[rb] {
                continue;
            }
            let corners = [(0, 0), (1, 0), (0, 1), (1, 1)].map(|(da, db)| {
                let mut k = c;
                k[ra] += da;
                k[rb] += db;
                g[idx(k)]
            });
            if corners.iter().any(|v| v.is_none()) {
                continue;
            }
            let changes = |comp: usize| {
                let (lo, hi) = corners.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v[comp]), hi.max(v[comp]))
                });
                lo <= 0.0 && hi >= 0.0
            };
            if changes(ra) && changes(rb) {
                let mut mid = c.map(|v| v as f64);
                mid[ra] += 0.5;
                mid[rb] += 0.5;
                brackets.push((f[i], at(mid)));
            }
        }
    }
    brackets.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.extend(brackets.into_iter().take(2 * MAX_CANDIDATES).map(|(_, p)| p));

    let median = order.get(order.len() / 2).map_or(0.0, |&i| f[i]);
    let scale = model.length_scale();
    let slack = 1e-6 * ext.norm();
    let mut found: Vec<(f64, Point)> = Vec::new();
    for p0 in candidates {
        let Some(p) = refine(model, p0, region, scale) else { continue };
        if !region.contains(&p, slack) {
            continue;
        }
        if !found.iter().any(|(_, q)| (q - p).norm() <= 1e-6 * scale) {
            found.push((model.rf_field_sq(&p).unwrap_or(f64::INFINITY), p));
        }
    }
    // true field zeros outrank minima of a non-vanishing field
    if found.iter().any(|(v, _)| *v <= ZERO_FIELD * median) {
        found.retain(|(v, _)| *v <= ZERO_FIELD * median);
    }
    let found: Vec<Point> = found.into_iter().map(|(_, p)| p).collect();
    match found.len() {
        0 => Err(Error::Search("no interior minimum of the rf field in the search region".into())),
        1 => Ok(found[0]),
        _ => Err(Error::Ambiguous(found)),
    }
}

fn neighbours(c: [usize; 3], dims: [usize; 3]) -> impl Iterator<Item = [usize; 3]> {
    (0..27).filter(|&k| k != 13).filter_map(move |k| {
        let d = [k / 9, (k / 3) % 3, k % 3];
        let mut out = [0; 3];
        for a in 0..3 {
            let v = c[a] as i64 + d[a] as i64 - 1;
            if v < 0 || v >= dims[a] as i64 {
                return None;
            }
            out[a] = v as usize;
        }
        Some(out)
    })
}

/// Levenberg-Marquardt on the residual `grad phi_rf`. Returns `None` unless
/// the iteration converges.
fn refine(model: &TrapModel, p0: Point, region: &SearchBox, scale: f64) -> Option<Point> {
    let inv = model.invariant_axis();
    let far = 2.0 * region.extent().norm() + scale;
    let mut p = p0;
    let (mut f, mut jtr, mut jtj) = model.rf_normal_equations(&p).ok()?;
    let mut mu = 1e-3;
    for _ in 0..300 {
        if f == 0.0 {
            return Some(p);
        }
        let mut a = jtj;
        let mut g = jtr;
        for k in 0..3 {
            a[(k, k)] *= 1.0 + mu;
            if Some(k) == inv {
                for m in 0..3 {
                    a[(k, m)] = 0.0;
                    a[(m, k)] = 0.0;
                }
                a[(k, k)] = 1.0;
                g[k] = 0.0;
            }
        }
        let a = a + Matrix3::identity() * (1e-300_f64).max(f64::EPSILON * jtj.norm() * 1e-6);
        let step: Vector3<f64> = a.lu().solve(&(-g))?;
        let q = p + step;
        if (q - region.center()).norm() > far {
            return None;
        }
        match model.rf_normal_equations(&q) {
            Ok((fq, jq, hq)) if fq < f => {
                p = q;
                f = fq;
                jtr = jq;
                jtj = hq;
                mu = (mu / 4.0).max(1e-12);
                if step.norm() <= 1e-13 * scale {
                    return Some(p);
                }
            }
            _ => {
                mu *= 8.0;
                if mu > 1e10 {
                    // no further decrease possible: stationary to rounding
                    return Some(p);
                }
            }
        }
    }
    None
}
