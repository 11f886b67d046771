//! Ion species, rf drive description and declarative electrode layouts.
//!
//! Coordinate convention for planar (surface) traps: electrodes lie in the
//! `z = 0` plane, ions are trapped at `z > 0` and the axial (weakly confined)
//! direction is `y`. Hyperbolic traps follow the textbook convention with the
//! quadrupole in `x`/`y` and the axis along `z`. Two-layer traps are modelled
//! as a cross-section in `x`/`z`, translation invariant along `y`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE, TWO_PI};

/// Catalog of supported species: (name, mass number). Nominal masses only.
const CATALOG: [(&str, u32); 7] = [
    ("Yb171", 171),
    ("Ca43", 43),
    ("Ca40", 40),
    ("Be9", 9),
    ("Cd111", 111),
    ("Mg25", 25),
    ("Sr88", 88),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IonSpecies {
    pub name: String,
    #[serde(rename = "mass_kg")]
    pub mass: f64,
    #[serde(rename = "charge_c")]
    pub charge: f64,
}

impl IonSpecies {
    pub fn new(name: impl Into<String>, mass: f64, charge: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Validation(format!("ion mass must be positive, got {mass}")));
        }
        if !charge.is_finite() || charge == 0.0 {
            return Err(Error::Validation("ion charge must be non-zero".into()));
        }
        Ok(Self { name: name.into(), mass, charge })
    }

    /// Singly charged ion of nominal mass `mass_number` u.
    pub fn singly_charged(name: impl Into<String>, mass_number: u32) -> Result<Self> {
        Self::new(name, mass_number as f64 * ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE)
    }

    pub fn mass_in_u(&self) -> f64 {
        self.mass / ATOMIC_MASS_UNIT
    }
}

/// Look up a singly charged species by name, e.g. `"Ca40"`.
pub fn ion_from_catalog(name: &str) -> Result<IonSpecies> {
    CATALOG
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(n, a)| IonSpecies::singly_charged(n, a))
        .unwrap_or_else(|| {
            Err(Error::Catalog {
                name: name.to_string(),
                known: CATALOG.iter().map(|(n, _)| *n).collect(),
            })
        })
}

pub fn catalog_names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(n, _)| *n)
}

/// rf drive. Electrodes with the rf role see `U0 - V0 cos(Omega t + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfDrive {
    #[serde(rename = "V0_volts")]
    pub amplitude: f64,
    #[serde(rename = "omega_rad_s")]
    pub omega: f64,
    #[serde(rename = "U0_volts", default)]
    pub offset: f64,
    /// Per-electrode phase, rad. Missing electrodes have phase 0.
    #[serde(rename = "phases_rad", default, skip_serializing_if = "BTreeMap::is_empty")]
    pub phases: BTreeMap<String, f64>,
}

impl RfDrive {
    pub fn new(amplitude: f64, omega: f64) -> Self {
        Self { amplitude, omega, offset: 0.0, phases: BTreeMap::new() }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn phase(&self, id: &str) -> f64 {
        self.phases.get(id).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::Validation(format!("drive frequency must be positive, got {}", self.omega)));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::Validation(format!("rf amplitude must be >= 0, got {}", self.amplitude)));
        }
        if !self.offset.is_finite() {
            return Err(Error::Validation("rf offset must be finite".into()));
        }
        Ok(())
    }
}

impl Default for RfDrive {
    /// 0 V at 2 pi x 20 MHz.
    fn default() -> Self {
        Self::new(0.0, TWO_PI * 20e6)
    }
}

/// Axis-aligned rectangle `[x1, x2] x [y1, y2]` in the `z = 0` plane.
///
/// Infinite bounds are accepted by the potential evaluation (useful for
/// tiling the whole plane) but not by layout validation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl Rect {
    pub const fn new(x1: f64, x2: f64, y1: f64, y2: f64) -> Self {
        Self { x1, x2, y1, y2 }
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))
    }

    pub fn is_well_formed(&self) -> bool {
        [self.x1, self.x2, self.y1, self.y2].iter().all(|v| v.is_finite())
            && self.x1 < self.x2
            && self.y1 < self.y2
    }

    /// True when the intersection has positive area. Shared edges do not count.
    pub fn overlaps(&self, other: &Rect) -> bool {
        let dx = self.x2.min(other.x2) - self.x1.max(other.x1);
        let dy = self.y2.min(other.y2) - self.y1.max(other.y1);
        dx > 0.0 && dy > 0.0
    }

    /// Area of the intersection with another rectangle.
    pub fn intersection_area(&self, other: &Rect) -> f64 {
        let dx = self.x2.min(other.x2) - self.x1.max(other.x1);
        let dy = self.y2.min(other.y2) - self.y1.max(other.y1);
        if dx > 0.0 && dy > 0.0 {
            dx * dy
        } else {
            0.0
        }
    }

    /// Euclidean distance from a point in 3-space to the rectangle.
    pub fn distance_to(&self, x: f64, y: f64, z: f64) -> f64 {
        let dx = (self.x1 - x).max(0.0).max(x - self.x2);
        let dy = (self.y1 - y).max(0.0).max(y - self.y2);
        (dx * dx + dy * dy + z * z).sqrt()
    }

    pub fn mirrored_x(&self, about: f64) -> Rect {
        Rect::new(2.0 * about - self.x2, 2.0 * about - self.x1, self.y1, self.y2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectrodeRole {
    Rf,
    Dc,
    Ground,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarElectrode {
    pub id: String,
    pub rect: Rect,
    pub role: ElectrodeRole,
}

impl PlanarElectrode {
    pub fn new(id: impl Into<String>, rect: Rect, role: ElectrodeRole) -> Self {
        Self { id: id.into(), rect, role }
    }
}

/// Electrode ids of the two-layer geometry. The rf electrodes are diagonally
/// opposite: `rf_top` is the left plate of the upper layer, `rf_bottom` the
/// right plate of the lower layer.
pub const TWO_LAYER_IDS: [(&str, ElectrodeRole); 4] = [
    ("rf_top", ElectrodeRole::Rf),
    ("dc_top", ElectrodeRole::Dc),
    ("dc_bottom", ElectrodeRole::Dc),
    ("rf_bottom", ElectrodeRole::Rf),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Ideal hyperbolic quadrupole with ion-electrode distance `r0`.
    Hyperbolic {
        #[serde(rename = "r0_m")]
        r0: f64,
    },
    /// Gapless surface trap: rectangles in the `z = 0` plane, the rest of the
    /// plane grounded.
    Planar { electrodes: Vec<PlanarElectrode> },
    /// Two layers of semi-infinite thin plates at `z = +-d/2`, separated
    /// horizontally by a slot of width `w`.
    TwoLayer {
        #[serde(rename = "w_m")]
        w: f64,
        #[serde(rename = "d_m")]
        d: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapLayout {
    #[serde(flatten)]
    pub geometry: Geometry,
    pub drive: RfDrive,
    #[serde(default)]
    pub dc_voltages: BTreeMap<String, f64>,
}

impl TrapLayout {
    pub fn new(geometry: Geometry, drive: RfDrive) -> Self {
        Self { geometry, drive, dc_voltages: BTreeMap::new() }
    }

    pub fn hyperbolic(r0: f64, drive: RfDrive) -> Self {
        Self::new(Geometry::Hyperbolic { r0 }, drive)
    }

    pub fn two_layer(w: f64, d: f64, drive: RfDrive) -> Self {
        Self::new(Geometry::TwoLayer { w, d }, drive)
    }

    pub fn with_drive(mut self, drive: RfDrive) -> Self {
        self.drive = drive;
        self
    }

    pub fn with_dc(mut self, id: impl Into<String>, volts: f64) -> Self {
        self.dc_voltages.insert(id.into(), volts);
        self
    }

    /// `(id, role)` of every electrode of the layout.
    pub fn electrodes(&self) -> Vec<(String, ElectrodeRole)> {
        match &self.geometry {
            Geometry::Hyperbolic { .. } => vec![("rf".to_string(), ElectrodeRole::Rf)],
            Geometry::Planar { electrodes } => {
                electrodes.iter().map(|e| (e.id.clone(), e.role)).collect()
            }
            Geometry::TwoLayer { .. } => {
                TWO_LAYER_IDS.iter().map(|&(id, r)| (id.to_string(), r)).collect()
            }
        }
    }

    pub fn rf_ids(&self) -> Vec<String> {
        self.electrodes()
            .into_iter()
            .filter(|(_, r)| *r == ElectrodeRole::Rf)
            .map(|(id, _)| id)
            .collect()
    }

    pub fn planar_electrodes(&self) -> Option<&[PlanarElectrode]> {
        match &self.geometry {
            Geometry::Planar { electrodes } => Some(electrodes),
            _ => None,
        }
    }

    /// Index of the weakly confined (axial) coordinate.
    pub fn axial_axis(&self) -> usize {
        match self.geometry {
            Geometry::Hyperbolic { .. } => 2,
            _ => 1,
        }
    }

    /// Smallest feature size: r0, the narrowest electrode dimension, or min(w, d).
    pub fn characteristic_length(&self) -> f64 {
        match &self.geometry {
            Geometry::Hyperbolic { r0 } => *r0,
            Geometry::Planar { electrodes } => electrodes
                .iter()
                .map(|e| e.rect.width().min(e.rect.height()))
                .fold(f64::INFINITY, f64::min),
            Geometry::TwoLayer { w, d } => w.min(*d),
        }
    }

    /// Planar layouts whose electrode set is not invariant under the mirror
    /// `x -> 2 x_c - x` about the center of the electrode extent. Such layouts
    /// generally have rotated principal axes.
    pub fn is_asymmetric(&self) -> bool {
        let Geometry::Planar { electrodes } = &self.geometry else {
            return false;
        };
        if electrodes.is_empty() {
            return false;
        }
        let x_min = electrodes.iter().map(|e| e.rect.x1).fold(f64::INFINITY, f64::min);
        let x_max = electrodes.iter().map(|e| e.rect.x2).fold(f64::NEG_INFINITY, f64::max);
        let xc = 0.5 * (x_min + x_max);
        let tol = 1e-9 * (x_max - x_min).abs().max(f64::MIN_POSITIVE);
        let close = |a: &Rect, b: &Rect| {
            (a.x1 - b.x1).abs() <= tol
                && (a.x2 - b.x2).abs() <= tol
                && (a.y1 - b.y1).abs() <= tol
                && (a.y2 - b.y2).abs() <= tol
        };
        !electrodes.iter().all(|e| {
            let m = e.rect.mirrored_x(xc);
            electrodes.iter().any(|o| o.role == e.role && close(&m, &o.rect))
        })
    }
}

/// Dimensions of a five-wire surface trap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveWire {
    #[serde(rename = "center_width_m")]
    pub center_width: f64,
    #[serde(rename = "rf_width_left_m")]
    pub rf_width_left: f64,
    #[serde(rename = "rf_width_right_m")]
    pub rf_width_right: f64,
    #[serde(rename = "outer_width_m")]
    pub outer_width: f64,
    #[serde(rename = "length_m")]
    pub length: f64,
}

impl FiveWire {
    pub fn symmetric(center_width: f64, rf_width: f64, outer_width: f64, length: f64) -> Self {
        Self { center_width, rf_width_left: rf_width, rf_width_right: rf_width, outer_width, length }
    }

    /// Electrodes in order along `x`: outer dc, rf, center dc, rf, outer dc.
    /// The center rail is centered on `x = 0`, the rails span `y = +-length/2`.
    pub fn electrodes(&self) -> Result<Vec<PlanarElectrode>> {
        let dims = [
            ("center_width", self.center_width),
            ("rf_width_left", self.rf_width_left),
            ("rf_width_right", self.rf_width_right),
            ("outer_width", self.outer_width),
            ("length", self.length),
        ];
        for (name, v) in dims {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("five-wire {name} must be positive, got {v}")));
            }
        }
        let half = 0.5 * self.center_width;
        let (y1, y2) = (-0.5 * self.length, 0.5 * self.length);
        let rf_l = -half - self.rf_width_left;
        let rf_r = half + self.rf_width_right;
        let rail = |id: &str, x1, x2, role| PlanarElectrode::new(id, Rect::new(x1, x2, y1, y2), role);
        Ok(vec![
            rail("dc_outer_left", rf_l - self.outer_width, rf_l, ElectrodeRole::Dc),
            rail("rf_left", rf_l, -half, ElectrodeRole::Rf),
            rail("dc_center", -half, half, ElectrodeRole::Dc),
            rail("rf_right", half, rf_r, ElectrodeRole::Rf),
            rail("dc_outer_right", rf_r, rf_r + self.outer_width, ElectrodeRole::Dc),
        ])
    }
}

/// Gapless five-wire layout with the default (0 V) drive; attach a drive with
/// [`TrapLayout::with_drive`].
pub fn make_five_wire(
    center_width: f64,
    rf_width_left: f64,
    rf_width_right: f64,
    outer_width: f64,
    length: f64,
) -> Result<TrapLayout> {
    let dims = FiveWire { center_width, rf_width_left, rf_width_right, outer_width, length };
    Ok(TrapLayout::new(Geometry::Planar { electrodes: dims.electrodes()? }, RfDrive::default()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    NonPositiveDimension { name: &'static str, value: f64 },
    MalformedRect,
    DuplicateId,
    Overlap { other: String },
    DanglingDcReference,
    DcOnNonDcElectrode,
    NoRfElectrode,
    InvalidDrive(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// Electrode id (or `layout`/`drive` for global rules).
    pub subject: String,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::NonPositiveDimension { name, value } => {
                write!(f, "{}: {name} must be positive (got {value})", self.subject)
            }
            Rule::MalformedRect => write!(f, "electrode `{}`: requires finite x1 < x2 and y1 < y2", self.subject),
            Rule::DuplicateId => write!(f, "electrode `{}`: duplicate id", self.subject),
            Rule::Overlap { other } => write!(f, "electrodes `{}` and `{other}` overlap", self.subject),
            Rule::DanglingDcReference => write!(f, "dc voltage references unknown electrode `{}`", self.subject),
            Rule::DcOnNonDcElectrode => {
                write!(f, "dc voltage assigned to electrode `{}`, which is not a dc electrode", self.subject)
            }
            Rule::NoRfElectrode => write!(f, "{}: no rf electrode", self.subject),
            Rule::InvalidDrive(msg) => write!(f, "{}: {msg}", self.subject),
        }
    }
}

/// Check every layout invariant. Returns an empty list iff the layout is valid.
pub fn validate_layout(layout: &TrapLayout) -> Vec<Violation> {
    let mut out = Vec::new();
    let global = |rule| Violation { subject: "layout".into(), rule };
    if let Err(Error::Validation(msg)) = layout.drive.validate() {
        out.push(Violation { subject: "drive".into(), rule: Rule::InvalidDrive(msg) });
    }
    match &layout.geometry {
        Geometry::Hyperbolic { r0 } => {
            if !(r0.is_finite() && *r0 > 0.0) {
                out.push(global(Rule::NonPositiveDimension { name: "r0", value: *r0 }));
            }
        }
        Geometry::TwoLayer { w, d } => {
            for (name, v) in [("w", *w), ("d", *d)] {
                if !(v.is_finite() && v > 0.0) {
                    out.push(global(Rule::NonPositiveDimension { name, value: v }));
                }
            }
        }
        Geometry::Planar { electrodes } => {
            let mut seen = BTreeSet::new();
            for e in electrodes {
                if !seen.insert(e.id.as_str()) {
                    out.push(Violation { subject: e.id.clone(), rule: Rule::DuplicateId });
                }
                if !e.rect.is_well_formed() {
                    out.push(Violation { subject: e.id.clone(), rule: Rule::MalformedRect });
                }
            }
            for (i, a) in electrodes.iter().enumerate() {
                for b in &electrodes[i + 1..] {
                    if a.rect.is_well_formed() && b.rect.is_well_formed() && a.rect.overlaps(&b.rect) {
                        out.push(Violation { subject: a.id.clone(), rule: Rule::Overlap { other: b.id.clone() } });
                    }
                }
            }
            if !electrodes.iter().any(|e| e.role == ElectrodeRole::Rf) {
                out.push(global(Rule::NoRfElectrode));
            }
        }
    }
    let electrodes = layout.electrodes();
    for id in layout.dc_voltages.keys() {
        match electrodes.iter().find(|(e, _)| e == id) {
            None => out.push(Violation { subject: id.clone(), rule: Rule::DanglingDcReference }),
            Some((_, ElectrodeRole::Dc)) => {}
            Some(_) => out.push(Violation { subject: id.clone(), rule: Rule::DcOnNonDcElectrode }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const UM: f64 = 1e-6;

    #[test]
    fn five_wire_order_and_widths() {
        let l = make_five_wire(100.0 * UM, 50.0 * UM, 50.0 * UM, 200.0 * UM, 2e-3).unwrap();
        let es = l.planar_electrodes().unwrap();
        assert_eq!(es.len(), 5);
        let ids: Vec<_> = es.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["dc_outer_left", "rf_left", "dc_center", "rf_right", "dc_outer_right"]);
        let widths: Vec<_> = es.iter().map(|e| e.rect.width()).collect();
        for (w, want) in widths.iter().zip([200.0, 50.0, 100.0, 50.0, 200.0]) {
            assert!((w - want * UM).abs() < 1e-18);
        }
        // gapless: each rail starts where the previous ended
        for pair in es.windows(2) {
            assert_eq!(pair[0].rect.x2, pair[1].rect.x1);
        }
        assert!(es.iter().all(|e| e.rect.height() == 2e-3));
        // rf rails mirror each other about x = 0
        assert_eq!(es[1].rect.mirrored_x(0.0), es[3].rect);
        assert!(!l.is_asymmetric());
        assert!(validate_layout(&l).is_empty());
    }

    #[test]
    fn unequal_rf_widths_flagged_asymmetric() {
        let l = make_five_wire(100.0 * UM, 50.0 * UM, 100.0 * UM, 200.0 * UM, 2e-3).unwrap();
        assert!(l.is_asymmetric());
    }

    #[test]
    fn degenerate_five_wire_rejected() {
        assert!(matches!(
            make_five_wire(0.0, 50.0 * UM, 50.0 * UM, 200.0 * UM, 2e-3),
            Err(Error::Validation(_))
        ));
        assert!(make_five_wire(1.0, 1.0, -1.0, 1.0, 1.0).is_err());
        assert!(make_five_wire(1.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn overlap_violation_names_both_ids() {
        let es = vec![
            PlanarElectrode::new("a", Rect::new(0.0, 2.0, 0.0, 1.0), ElectrodeRole::Rf),
            PlanarElectrode::new("b", Rect::new(1.0, 3.0, 0.5, 2.0), ElectrodeRole::Dc),
            PlanarElectrode::new("c", Rect::new(3.0, 4.0, 0.0, 1.0), ElectrodeRole::Dc),
        ];
        let l = TrapLayout::new(Geometry::Planar { electrodes: es }, RfDrive::default());
        let v = validate_layout(&l);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].subject, "a");
        assert_eq!(v[0].rule, Rule::Overlap { other: "b".into() });
        let msg = v[0].to_string();
        assert!(msg.contains("`a`") && msg.contains("`b`"));
    }

    #[test]
    fn dangling_dc_reference() {
        let l = make_five_wire(1.0, 1.0, 1.0, 1.0, 1.0).unwrap().with_dc("nope", 3.0);
        let v = validate_layout(&l);
        assert_eq!(v, vec![Violation { subject: "nope".into(), rule: Rule::DanglingDcReference }]);
    }

    #[test]
    fn dc_on_rf_electrode_and_bad_drive() {
        let l = make_five_wire(1.0, 1.0, 1.0, 1.0, 1.0)
            .unwrap()
            .with_dc("rf_left", 1.0)
            .with_drive(RfDrive::new(10.0, -1.0));
        let v = validate_layout(&l);
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(v.iter().any(|v| v.rule == Rule::DcOnNonDcElectrode));
        assert!(v.iter().any(|v| matches!(v.rule, Rule::InvalidDrive(_))));
    }

    #[test]
    fn hyperbolic_and_two_layer_dimensions() {
        assert!(validate_layout(&TrapLayout::hyperbolic(1e-3, RfDrive::default())).is_empty());
        assert_eq!(validate_layout(&TrapLayout::hyperbolic(0.0, RfDrive::default())).len(), 1);
        assert_eq!(validate_layout(&TrapLayout::two_layer(-1.0, 0.0, RfDrive::default())).len(), 2);
        let l = TrapLayout::two_layer(1e-4, 1e-4, RfDrive::default()).with_dc("dc_top", 1.0);
        assert!(validate_layout(&l).is_empty());
    }

    #[test]
    fn catalog_species() {
        let ca = ion_from_catalog("Ca40").unwrap();
        assert_eq!(ca.mass, 40.0 * ATOMIC_MASS_UNIT);
        assert_eq!(ca.charge, ELEMENTARY_CHARGE);
        assert_eq!(ion_from_catalog("Yb171").unwrap().mass, 171.0 * ATOMIC_MASS_UNIT);
        for name in catalog_names() {
            let ion = ion_from_catalog(name).unwrap();
            let a = ion.mass_in_u();
            assert!((a - a.round()).abs() < 1e-9, "{name}: {a}");
        }
        match ion_from_catalog("Xx99") {
            Err(Error::Catalog { name, known }) => {
                assert_eq!(name, "Xx99");
                assert!(known.contains(&"Sr88"));
            }
            other => panic!("expected catalog error, got {other:?}"),
        }
    }

    #[test]
    fn rect_distance() {
        let r = Rect::new(0.0, 1.0, 0.0, 1.0);
        assert_eq!(r.distance_to(0.5, 0.5, 2.0), 2.0);
        assert!((r.distance_to(2.0, 0.5, 0.0) - 1.0).abs() < 1e-15);
        assert!((r.distance_to(2.0, 2.0, 1.0) - 3f64.sqrt()).abs() < 1e-15);
    }
}
