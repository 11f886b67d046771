//! Grid bases of the two-layer trap.
//!
//! Cross-section in `x`/`z`, invariant along `y`. Each layer is a pair of
//! semi-infinite thin plates at `z = +-d/2` with a slot `|x| < w/2`. Outer
//! faces of the box take the asymptotic potential: linear between the layers
//! (parallel-plate limit) and the split-plane angle law above and below.

use std::f64::consts::PI;
use std::sync::Arc;

use super::ModelOptions;
use crate::error::{Error, Result};
use crate::fields::{solve_laplace_grid, GridField, GridProblem, GridSpec, Point, PotentialField, SorOptions};
use crate::geometry::{Geometry, TrapLayout};

/// Plate voltages `[top-left, top-right, bottom-left, bottom-right]`.
type Plates = [f64; 4];

const RF: Plates = [1.0, 0.0, 0.0, 1.0];
const DC_TOP: Plates = [0.0, 1.0, 0.0, 0.0];
const DC_BOTTOM: Plates = [0.0, 0.0, 1.0, 0.0];

/// Solve the unit bases a two-layer layout needs: the combined rf plates
/// (id `rf`) and every dc plate that carries a non-zero voltage.
pub fn two_layer_basis(layout: &TrapLayout, opts: &ModelOptions) -> Result<PotentialField> {
    let Geometry::TwoLayer { w, d } = layout.geometry else {
        return Err(Error::Configuration("not a two-layer layout".into()));
    };
    let mut out = PotentialField::new();
    out.insert("rf", Arc::new(solve_plates(w, d, RF, opts)?));
    for (id, plates) in [("dc_top", DC_TOP), ("dc_bottom", DC_BOTTOM)] {
        if layout.dc_voltages.get(id).is_some_and(|v| *v != 0.0) {
            out.insert(id, Arc::new(solve_plates(w, d, plates, opts)?));
        }
    }
    Ok(out)
}

fn asymptotic(d: f64, v: Plates, p: &Point) -> f64 {
    let [tl, tr, bl, br] = v;
    if p.z >= 0.5 * d {
        tr + (tl - tr) * (p.z - 0.5 * d).atan2(p.x) / PI
    } else if p.z <= -0.5 * d {
        br + (bl - br) * (-(p.z + 0.5 * d)).atan2(p.x) / PI
    } else {
        let t = (p.z + 0.5 * d) / d;
        if p.x < 0.0 {
            bl + (tl - bl) * t
        } else {
            br + (tr - br) * t
        }
    }
}

/// Grid potential for plate voltages `v`.
pub(crate) fn solve_plates(w: f64, d: f64, v: Plates, opts: &ModelOptions) -> Result<GridField> {
    let feature = w.min(d);
    let n = opts.cells_per_feature.max(2) as f64;
    // d/2 must be a whole number of cells so the plates sit on grid lines
    let m = ((0.5 * d) / (feature / n)).ceil().max(1.0);
    let h = 0.5 * d / m;
    let pad = opts.padding * w.max(d);
    let nx = ((0.5 * w + pad) / h).ceil();
    let nz = ((0.5 * d + pad) / h).ceil();
    let spec = GridSpec::from_bounds([-nx * h, 0.0, -nz * h], [nx * h, 0.0, nz * h], h)?;
    let mut problem = GridProblem::new(spec);
    let [tl, tr, bl, br] = v;
    let tol = 1e-9 * h;
    problem.fix_where(|p| {
        let on = |zp: f64| (p.z - zp).abs() <= tol;
        let (left, right) = (p.x <= -0.5 * w + tol, p.x >= 0.5 * w - tol);
        match (on(0.5 * d), on(-0.5 * d), left, right) {
            (true, _, true, _) => Some(tl),
            (true, _, _, true) => Some(tr),
            (_, true, true, _) => Some(bl),
            (_, true, _, true) => Some(br),
            _ => None,
        }
    });
    for axis in [0, 2] {
        for side in 0..2 {
            problem.dirichlet_face(axis, side, |p| asymptotic(d, v, p));
        }
    }
    let guess: Vec<f64> = (0..spec.len()).map(|i| asymptotic(d, v, &spec.position(i))).collect();
    problem.initial_guess(&guess)?;
    let sor = SorOptions { omega: SorOptions::optimal_omega(&spec), ..opts.sor };
    Ok(solve_laplace_grid(&problem, &sor)?.with_feature_scale(feature))
}
