//! rf rail width optimization of a five-wire trap for maximum depth.

use serde::{Deserialize, Serialize};

use super::{find_rf_nil, trap_depth, TrapModel};
use crate::error::{Error, Result};
use crate::geometry::{FiveWire, IonSpecies, RfDrive, TrapLayout};

const SWEEPS: usize = 2;
const REL_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthBounds {
    pub lo: f64,
    pub hi: f64,
}

impl WidthBounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.lo <= self.hi) {
            return Err(Error::Validation(format!(
                "{name} bounds must satisfy 0 < lo <= hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveWireOptimum {
    pub rf_width_left: f64,
    pub rf_width_right: f64,
    pub depth_ev: f64,
    pub evaluations: usize,
    /// Some coordinate ended on its bound.
    pub at_boundary: bool,
    pub warnings: Vec<String>,
}

/// Depth of the rf pseudopotential of `dims`, eV.
pub fn five_wire_depth(dims: &FiveWire, drive: &RfDrive, ion: &IonSpecies) -> Result<f64> {
    let layout = TrapLayout::new(crate::geometry::Geometry::Planar { electrodes: dims.electrodes()? }, drive.clone());
    let model = TrapModel::new(&layout, ion)?;
    let nil = find_rf_nil(&model, &model.search_box())?;
    Ok(trap_depth(&model, &nil)?.energy.ev)
}

/// Coordinate-wise golden-section search over the two rf widths of
/// `template` (its rf widths are ignored), maximizing the rf trap depth.
/// Two sweeps, left then right, to a relative width tolerance of 1e-3.
pub fn optimize_five_wire(
    template: &FiveWire,
    left: WidthBounds,
    right: WidthBounds,
    drive: &RfDrive,
    ion: &IonSpecies,
) -> Result<FiveWireOptimum> {
    left.check("left rf width")?;
    right.check("right rf width")?;
    let mut evaluations = 0;
    let mut last_err = None;
    let mut objective = |wl: f64, wr: f64| -> f64 {
        evaluations += 1;
        let dims = FiveWire { rf_width_left: wl, rf_width_right: wr, ..*template };
        match five_wire_depth(&dims, drive, ion) {
            Ok(d) => d,
            Err(e) => {
                last_err = Some(e);
                f64::NEG_INFINITY
            }
        }
    };
    let mut wl = 0.5 * (left.lo + left.hi);
    let mut wr = 0.5 * (right.lo + right.hi);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..SWEEPS {
        let (x, _) = golden_max(left, |x| objective(x, wr));
        wl = x;
        let (x, v) = golden_max(right, |x| objective(wl, x));
        wr = x;
        best = v;
    }
    if !best.is_finite() {
        return Err(last_err.unwrap_or_else(|| Error::Search("depth objective undefined".into())));
    }
    let on_bound = |x: f64, b: WidthBounds| b.hi > b.lo && (x - b.lo).min(b.hi - x) <= 2.0 * REL_TOL * x;
    let at_boundary = on_bound(wl, left) || on_bound(wr, right);
    let mut warnings = Vec::new();
    if at_boundary {
        warnings.push("optimum lies on a width bound; widen the bounds".to_string());
    }
    Ok(FiveWireOptimum { rf_width_left: wl, rf_width_right: wr, depth_ev: best, evaluations, at_boundary, warnings })
}

/// Maximize `f` on the bounds; returns the best evaluated point.
fn golden_max(b: WidthBounds, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    if b.hi <= b.lo {
        return (b.lo, f(b.lo));
    }
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut z) = (b.lo, b.hi);
    let mut c = z - r * (z - a);
    let mut d = a + r * (z - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while z - a > REL_TOL * 0.5 * (a + z) {
        if fc >= fd {
            z = d;
            d = c;
            fd = fc;
            c = z - r * (z - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (z - a);
            fd = f(d);
        }
    }
    // the interval ends are candidates too (optimum on a bound)
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [a, z] {
        if x == b.lo || x == b.hi {
            let v = f(x);
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    best
}
