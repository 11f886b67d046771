//! Pseudopotential analysis: rf nil, secular frequencies and principal axes,
//! trap depth, Mathieu parameters, geometric efficiency, width optimization
//! and stray-field compensation.

use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    PotentialField, QuadrupoleBasis, RectBasis, ScalarField, SorOptions, Superposition,
};
use crate::geometry::{validate_layout, Geometry, IonSpecies, TrapLayout};
use crate::units::{joules_to_ev, rad_per_s_to_hz};

mod compensate;
mod depth;
mod nil;
mod optimize;
mod two_layer;

pub use compensate::{compensate_stray_field, Compensation};
pub use depth::{trap_depth, Depth};
pub use nil::find_rf_nil;
pub use optimize::{five_wire_depth, optimize_five_wire, FiveWireOptimum, WidthBounds};
pub use two_layer::two_layer_basis;

pub type Point = Vector3<f64>;

/// Above this, the pseudopotential approximation is questionable.
pub const Q_EFFECTIVE_WARN: f64 = 0.3;

/// Axis-aligned search region. An axis with `min == max` is held fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBox {
    pub min: Point,
    pub max: Point,
}

impl SearchBox {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn center(&self) -> Point {
        0.5 * (self.min + self.max)
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn contains(&self, p: &Point, slack: f64) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] - slack && p[a] <= self.max[a] + slack)
    }
}

/// Grid settings for layouts that need a numerical field solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelOptions {
    /// Grid nodes across the smaller of the slot width and the layer gap.
    pub cells_per_feature: usize,
    /// Padding around the electrode region, in units of the larger feature.
    pub padding: f64,
    pub sor: SorOptions,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self { cells_per_feature: 8, padding: 2.0, sor: SorOptions::default() }
    }
}

/// Energy in joules and electron volts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub joules: f64,
    pub ev: f64,
}

impl Energy {
    pub fn from_joules(joules: f64) -> Self {
        Self { joules, ev: joules_to_ev(joules) }
    }
}

/// A layout with its ion, ready for evaluation: unit-drive basis functions,
/// the rf combination (in-phase and quadrature parts) and the static
/// potential in volts.
#[derive(Clone, Debug)]
pub struct TrapModel {
    layout: TrapLayout,
    ion: IonSpecies,
    basis: PotentialField,
    rf_cos: Superposition,
    rf_sin: Superposition,
    dc: Superposition,
    search: SearchBox,
    invariant: Option<usize>,
}

impl TrapModel {
    pub fn new(layout: &TrapLayout, ion: &IonSpecies) -> Result<Self> {
        Self::with_options(layout, ion, &ModelOptions::default())
    }

    pub fn with_options(layout: &TrapLayout, ion: &IonSpecies, opts: &ModelOptions) -> Result<Self> {
        let violations = validate_layout(layout);
        if !violations.is_empty() {
            return Err(Error::Layout(violations));
        }
        let mut basis = PotentialField::new();
        match &layout.geometry {
            Geometry::Hyperbolic { r0 } => basis.insert("rf", Arc::new(QuadrupoleBasis { r0: *r0 })),
            Geometry::Planar { electrodes } => {
                for e in electrodes {
                    basis.insert(e.id.clone(), Arc::new(RectBasis::new(e.rect)));
                }
            }
            Geometry::TwoLayer { .. } => basis = two_layer::two_layer_basis(layout, opts)?,
        }
        Self::from_basis(layout, ion, basis)
    }

    /// Build from precomputed basis functions (e.g. grid solutions). Every rf
    /// electrode and every electrode with a dc voltage needs a basis entry;
    /// two-layer bases hold the combined rf electrodes under the id `rf`.
    pub fn from_basis(layout: &TrapLayout, ion: &IonSpecies, basis: PotentialField) -> Result<Self> {
        layout.drive.validate()?;
        let drive = &layout.drive;
        let mut rf_cos = Superposition::new();
        let mut rf_sin = Superposition::new();
        let mut dc = Superposition::new();
        let mut rf_terms: Vec<(String, f64)> = Vec::new();
        if let Geometry::TwoLayer { .. } = layout.geometry {
            let ids = layout.rf_ids();
            let phase = drive.phase(&ids[0]);
            if ids.iter().any(|id| drive.phase(id) != phase) {
                return Err(Error::Configuration(
                    "two-layer traps drive both rf electrodes with a single phase".into(),
                ));
            }
            rf_terms.push(("rf".into(), phase));
        } else {
            rf_terms.extend(layout.rf_ids().into_iter().map(|id| {
                let ph = drive.phase(&id);
                (id, ph)
            }));
        }
        for (id, phase) in &rf_terms {
            let b = basis.get(id)?.clone();
            rf_cos.push(phase.cos(), b.clone());
            if phase.sin() != 0.0 {
                rf_sin.push(phase.sin(), b.clone());
            }
            if drive.offset != 0.0 {
                dc.push(drive.offset, b);
            }
        }
        for (id, v) in &layout.dc_voltages {
            if *v != 0.0 {
                dc.push(*v, basis.get(id)?.clone());
            }
        }
        let invariant = {
            let rf_axis = rf_cos.invariant_axis();
            let ok = |s: &Superposition| s.is_empty() || s.invariant_axis() == rf_axis;
            if ok(&rf_sin) && ok(&dc) {
                rf_axis
            } else {
                None
            }
        };
        let search = default_search_box(layout);
        Ok(Self { layout: layout.clone(), ion: ion.clone(), basis, rf_cos, rf_sin, dc, search, invariant })
    }

    pub fn layout(&self) -> &TrapLayout {
        &self.layout
    }

    pub fn ion(&self) -> &IonSpecies {
        &self.ion
    }

    pub fn basis(&self) -> &PotentialField {
        &self.basis
    }

    /// Region searched for the rf nil.
    pub fn search_box(&self) -> SearchBox {
        self.search
    }

    /// Coordinate along which the whole model is translation invariant.
    pub fn invariant_axis(&self) -> Option<usize> {
        self.invariant
    }

    pub fn length_scale(&self) -> f64 {
        self.layout.characteristic_length()
    }

    /// `Q^2 V0^2 / (4 m Omega^2)`, J per (V/m)^2 of unit-drive field.
    pub fn pseudo_prefactor(&self) -> f64 {
        let d = &self.layout.drive;
        let q = self.ion.charge;
        q * q * d.amplitude * d.amplitude / (4.0 * self.ion.mass * d.omega * d.omega)
    }

    fn diff_step(&self) -> f64 {
        [&self.rf_cos, &self.rf_sin, &self.dc]
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.diff_step())
            .fold(0.0, f64::max)
    }

    /// Squared unit-drive rf field, time averaged over phases: `|g_c|^2 + |g_s|^2`.
    pub fn rf_field_sq(&self, p: &Point) -> Result<f64> {
        let mut s = self.rf_cos.gradient(p)?.norm_squared();
        if !self.rf_sin.is_empty() {
            s += self.rf_sin.gradient(p)?.norm_squared();
        }
        Ok(s)
    }

    /// Residual and Jacobian-square quantities for the nil search:
    /// returns `(|g|^2, J^T r, J^T J)` with `r = (g_c, g_s)`, `J = (H_c, H_s)`.
    fn rf_normal_equations(&self, p: &Point) -> Result<(f64, Vector3<f64>, Matrix3<f64>)> {
        let g = self.rf_cos.gradient(p)?;
        let h = self.rf_cos.hessian(p)?;
        let mut f = g.norm_squared();
        let mut jtr = h * g;
        let mut jtj = h * h;
        if !self.rf_sin.is_empty() {
            let gs = self.rf_sin.gradient(p)?;
            let hs = self.rf_sin.hessian(p)?;
            f += gs.norm_squared();
            jtr += hs * gs;
            jtj += hs * hs;
        }
        Ok((f, jtr, jtj))
    }

    /// Pseudopotential energy, J.
    pub fn pseudopotential(&self, p: &Point) -> Result<f64> {
        Ok(self.pseudo_prefactor() * self.rf_field_sq(p)?)
    }

    /// Gradient of the pseudopotential, `2 c (H_c g_c + H_s g_s)`, J/m.
    pub fn pseudo_gradient(&self, p: &Point) -> Result<Vector3<f64>> {
        let (_, jtr, _) = self.rf_normal_equations(p)?;
        Ok(2.0 * self.pseudo_prefactor() * jtr)
    }

    /// Hessian of the pseudopotential by central differences of its gradient.
    pub fn pseudo_hessian(&self, p: &Point) -> Result<Matrix3<f64>> {
        Ok(self.pseudo_prefactor() * self.field_sq_hessian(p)?)
    }

    /// Hessian of `|g_c|^2 + |g_s|^2`.
    fn field_sq_hessian(&self, p: &Point) -> Result<Matrix3<f64>> {
        let h = self.diff_step();
        let mut m = Matrix3::zeros();
        for i in 0..3 {
            if Some(i) == self.invariant {
                continue;
            }
            let mut e = Vector3::zeros();
            e[i] = h;
            let (_, a, _) = self.rf_normal_equations(&(p + e))?;
            let (_, b, _) = self.rf_normal_equations(&(p - e))?;
            m.set_column(i, &((a - b) / h));
        }
        Ok(self.mask_invariant(0.5 * (m + m.transpose())))
    }

    fn mask_invariant(&self, mut m: Matrix3<f64>) -> Matrix3<f64> {
        if let Some(a) = self.invariant {
            for k in 0..3 {
                m[(a, k)] = 0.0;
                m[(k, a)] = 0.0;
            }
        }
        m
    }

    /// Static potential (dc electrodes plus the rf offset), volts.
    pub fn static_potential(&self, p: &Point) -> Result<f64> {
        self.dc.potential(p)
    }

    pub fn static_hessian(&self, p: &Point) -> Result<Matrix3<f64>> {
        Ok(self.mask_invariant(self.dc.hessian(p)?))
    }

    /// Unit-drive rf Hessian (in-phase part), V/m^2 per volt.
    pub fn rf_hessian(&self, p: &Point) -> Result<Matrix3<f64>> {
        Ok(self.mask_invariant(self.rf_cos.hessian(p)?))
    }

    /// Unit-drive rf (in-phase) and static fields as fields of their own.
    pub fn rf_field(&self) -> &Superposition {
        &self.rf_cos
    }

    /// Gradient of the instantaneous electrode potential at time `t`, V/m:
    /// static part plus `-V0 (cos(Omega t) g_c - sin(Omega t) g_s)`.
    pub fn potential_gradient_at(&self, p: &Point, t: f64) -> Result<Vector3<f64>> {
        let d = &self.layout.drive;
        let (s, c) = (d.omega * t).sin_cos();
        let mut g = Vector3::zeros();
        if !self.dc.is_empty() {
            g += self.dc.gradient(p)?;
        }
        if d.amplitude != 0.0 {
            g -= d.amplitude * c * self.rf_cos.gradient(p)?;
            if !self.rf_sin.is_empty() {
                g += d.amplitude * s * self.rf_sin.gradient(p)?;
            }
        }
        Ok(g)
    }

    pub fn static_field(&self) -> &Superposition {
        &self.dc
    }

    /// `psi + Q Phi_dc`, J.
    pub fn effective_potential(&self, p: &Point) -> Result<f64> {
        let dc = if self.dc.is_empty() { 0.0 } else { self.dc.potential(p)? };
        Ok(self.pseudopotential(p)? + self.ion.charge * dc)
    }

    pub fn effective_hessian(&self, p: &Point) -> Result<Matrix3<f64>> {
        let mut h = self.pseudo_hessian(p)?;
        if !self.dc.is_empty() {
            h += self.ion.charge * self.static_hessian(p)?;
        }
        Ok(h)
    }

    /// Distance from `p` to the nearest electrode surface. For gapless planar
    /// traps the whole `z = 0` plane is conducting, so this is the height.
    pub fn nearest_electrode_distance(&self, p: &Point) -> f64 {
        match self.layout.geometry {
            Geometry::Hyperbolic { r0 } => (r0 - p.x.hypot(p.y)).max(0.0),
            Geometry::Planar { .. } => p.z,
            Geometry::TwoLayer { w, d } => {
                let mut best = f64::INFINITY;
                for zp in [0.5 * d, -0.5 * d] {
                    for sx in [1.0, -1.0] {
                        let dx = (0.5 * w - sx * p.x).max(0.0);
                        best = best.min(dx.hypot(p.z - zp));
                    }
                }
                best
            }
        }
    }
}

fn default_search_box(layout: &TrapLayout) -> SearchBox {
    match &layout.geometry {
        Geometry::Hyperbolic { r0 } => {
            SearchBox::new(Point::new(-0.5 * r0, -0.5 * r0, 0.0), Point::new(0.5 * r0, 0.5 * r0, 0.0))
        }
        Geometry::TwoLayer { w, d } => {
            SearchBox::new(Point::new(-0.45 * w, 0.0, -0.45 * d), Point::new(0.45 * w, 0.0, 0.45 * d))
        }
        Geometry::Planar { electrodes } => {
            let rf: Vec<_> = electrodes.iter().filter(|e| layout.rf_ids().contains(&e.id)).collect();
            let ry1 = rf.iter().map(|e| e.rect.y1).fold(f64::INFINITY, f64::min);
            let ry2 = rf.iter().map(|e| e.rect.y2).fold(f64::NEG_INFINITY, f64::max);
            let rx1 = rf.iter().map(|e| e.rect.x1).fold(f64::INFINITY, f64::min);
            let rx2 = rf.iter().map(|e| e.rect.x2).fold(f64::NEG_INFINITY, f64::max);
            let span = rx2 - rx1;
            let yc = 0.5 * (ry1 + ry2);
            let hy = 0.25 * (ry2 - ry1);
            // the nil sits over the rf rails, between their outer edges
            let floor = 0.01 * span.min(layout.characteristic_length());
            SearchBox::new(Point::new(rx1, yc - hy, floor), Point::new(rx2, yc + hy, span))
        }
    }
}

/// Pseudopotential at `p`.
pub fn pseudopotential(model: &TrapModel, p: &Point) -> Result<Energy> {
    Ok(Energy::from_joules(model.pseudopotential(p)?))
}

/// Normal modes of the effective potential at the nil.
#[derive(Clone, Debug, PartialEq)]
pub struct SecularModes {
    /// Angular frequencies, ascending, rad/s.
    pub omega: [f64; 3],
    /// Hessian eigenvalues (J/m^2) matching `omega`.
    pub curvature: [f64; 3],
    /// Unit eigenvectors as columns, same order.
    pub axes: Matrix3<f64>,
    /// Rotation of the radial pair out of the layout axes, rad, in [-pi/4, pi/4].
    pub theta: f64,
}

/// Secular frequencies and principal axes at `nil`.
pub fn secular_frequencies(model: &TrapModel, nil: &Point) -> Result<SecularModes> {
    modes_of(model, &model.effective_hessian(nil)?)
}

fn modes_of(model: &TrapModel, h: &Matrix3<f64>) -> Result<SecularModes> {
    let mut pairs: Vec<(f64, Vector3<f64>)> = match model.invariant {
        Some(a) => {
            let (i, j) = match a {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let sub = Matrix2::new(h[(i, i)], h[(i, j)], h[(j, i)], h[(j, j)]);
            let eig = SymmetricEigen::new(sub);
            let mut out: Vec<(f64, Vector3<f64>)> = (0..2)
                .map(|c| {
                    let mut v = Vector3::zeros();
                    v[i] = eig.eigenvectors[(0, c)];
                    v[j] = eig.eigenvectors[(1, c)];
                    (eig.eigenvalues[c], v)
                })
                .collect();
            let mut e = Vector3::zeros();
            e[a] = 1.0;
            out.push((0.0, e));
            out
        }
        None => {
            let eig = SymmetricEigen::new(*h);
            (0..3).map(|c| (eig.eigenvalues[c], eig.eigenvectors.column(c).into_owned())).collect()
        }
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = pairs.iter().map(|(l, _)| l.abs()).fold(0.0, f64::max);
    for (l, v) in &pairs {
        if *l < -1e-9 * scale {
            return Err(Error::Unstable { direction: *v, eigenvalue: *l });
        }
    }
    let m = model.ion.mass;
    let mut omega = [0.0; 3];
    let mut curvature = [0.0; 3];
    let mut axes = Matrix3::zeros();
    for (k, (l, v)) in pairs.iter().enumerate() {
        let l = l.max(0.0);
        curvature[k] = l;
        omega[k] = (l / m).sqrt();
        // deterministic sign: largest component positive
        let big = (0..3).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
        let v = if v[big] < 0.0 { -v } else { *v };
        axes.set_column(k, &v);
    }
    let theta = radial_rotation(model.layout.axial_axis(), &axes);
    Ok(SecularModes { omega, curvature, axes, theta })
}

/// The two layout axes spanning the radial plane, as `(a, b)` with `theta`
/// measured from `a` towards `b`.
pub fn radial_plane(axial: usize) -> (usize, usize) {
    match axial {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn radial_indices(axial: usize, axes: &Matrix3<f64>) -> [usize; 2] {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| axes[(axial, i)].abs().total_cmp(&axes[(axial, j)].abs()));
    [idx[0], idx[1]]
}

fn radial_rotation(axial: usize, axes: &Matrix3<f64>) -> f64 {
    let (a, b) = radial_plane(axial);
    let [i, j] = radial_indices(axial, axes);
    let k = if axes[(a, i)].abs() >= axes[(a, j)].abs() { i } else { j };
    let (va, vb) = (axes[(a, k)], axes[(b, k)]);
    if va == 0.0 {
        return std::f64::consts::FRAC_PI_4;
    }
    (vb / va).atan()
}

/// Mathieu parameters of an ideal hyperbolic trap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MathieuParams {
    pub a_x: f64,
    pub q_x: f64,
    pub a_y: f64,
    pub q_y: f64,
}

/// `a_x = 4 Q U0 / (m r0^2 Omega^2)`, `q_x = 2 Q V0 / (m r0^2 Omega^2)`,
/// `a_y = -a_x`, `q_y = -q_x`.
pub fn stability_params(layout: &TrapLayout, ion: &IonSpecies) -> Result<MathieuParams> {
    let Geometry::Hyperbolic { r0 } = layout.geometry else {
        return Err(Error::Configuration("Mathieu parameters are defined for hyperbolic layouts".into()));
    };
    if !(r0 > 0.0) {
        return Err(Error::Validation(format!("r0 must be positive, got {r0}")));
    }
    let d = &layout.drive;
    let k = ion.charge / (ion.mass * r0 * r0 * d.omega * d.omega);
    let (a_x, q_x) = (4.0 * k * d.offset, 2.0 * k * d.amplitude);
    Ok(MathieuParams { a_x, q_x, a_y: -a_x, q_y: -q_x })
}

/// Radial secular frequency of an ideal hyperbolic trap with the model's
/// drive and ion at ion-electrode distance `r0`: `Q V0 / (sqrt 2 m Omega r0^2)`.
pub fn hyperbolic_radial_omega(ion: &IonSpecies, amplitude: f64, omega: f64, r0: f64) -> f64 {
    ion.charge.abs() * amplitude / (std::f64::consts::SQRT_2 * ion.mass * omega * r0 * r0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub eta: f64,
    /// Reference ion-electrode distance (nearest electrode surface), m.
    pub r0_prime: f64,
    /// Mean radial frequency of the rf pseudopotential alone, rad/s.
    pub omega_radial: f64,
    pub omega_hyperbolic: f64,
}

/// Geometric efficiency factor: mean radial pseudopotential frequency over
/// that of a hyperbolic trap with `r0 = r0'` at the same drive.
/// Independent of `V0`; evaluated at unit amplitude when `V0 = 0`.
pub fn geometric_efficiency(model: &TrapModel, nil: &Point) -> Result<Efficiency> {
    let drive = &model.layout.drive;
    let amplitude = if drive.amplitude > 0.0 { drive.amplitude } else { 1.0 };
    let (q, m) = (model.ion.charge, model.ion.mass);
    let c = q * q * amplitude * amplitude / (4.0 * m * drive.omega * drive.omega);
    let modes = modes_of(model, &(c * model.field_sq_hessian(nil)?))?;
    let [i, j] = radial_indices(model.layout.axial_axis(), &modes.axes);
    let omega_radial = 0.5 * (modes.omega[i] + modes.omega[j]);
    let r0_prime = model.nearest_electrode_distance(nil);
    if !(r0_prime > 0.0) {
        return Err(Error::Analysis("nil lies on an electrode surface".into()));
    }
    let omega_hyperbolic = hyperbolic_radial_omega(&model.ion, amplitude, drive.omega, r0_prime);
    Ok(Efficiency { eta: omega_radial / omega_hyperbolic, r0_prime, omega_radial, omega_hyperbolic })
}

/// Summary of a trap at its rf nil. Frequencies in rad/s and Hz, energies in
/// J and eV, lengths in m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapMetrics {
    pub rf_nil_m: [f64; 3],
    pub depth_j: f64,
    pub depth_ev: f64,
    pub escape_point_m: [f64; 3],
    pub secular_frequencies_rad_s: [f64; 3],
    pub secular_frequencies_hz: [f64; 3],
    /// Principal axes, one unit vector per secular frequency.
    pub principal_axes: [[f64; 3]; 3],
    pub theta_rad: f64,
    /// Local Mathieu parameters along each principal axis.
    pub a: [f64; 3],
    pub q: [f64; 3],
    /// `2 sqrt 2 omega_max / Omega`.
    pub q_effective: f64,
    pub eta: f64,
    pub r0_prime_m: f64,
    pub eta_convention: String,
    pub warnings: Vec<String>,
}

/// Run the full analysis: nil, modes, depth, Mathieu parameters and η.
pub fn analyze(model: &TrapModel) -> Result<TrapMetrics> {
    let nil = find_rf_nil(model, &model.search_box())?;
    analyze_at(model, &nil)
}

pub fn analyze_at(model: &TrapModel, nil: &Point) -> Result<TrapMetrics> {
    let mut warnings = Vec::new();
    let modes = secular_frequencies(model, nil)?;
    let depth = trap_depth(model, nil)?;
    let eff = geometric_efficiency(model, nil)?;
    let drive = &model.layout.drive;
    let (m, charge, big_omega) = (model.ion.mass, model.ion.charge, drive.omega);
    let h_rf = model.rf_hessian(nil)?;
    let h_dc = model.static_hessian(nil)?;
    let mut a = [0.0; 3];
    let mut q = [0.0; 3];
    let mut axes = [[0.0; 3]; 3];
    for k in 0..3 {
        let u = modes.axes.column(k).into_owned();
        a[k] = 4.0 * charge * (u.transpose() * h_dc * u)[0] / (m * big_omega * big_omega);
        q[k] = 2.0 * charge * drive.amplitude * (u.transpose() * h_rf * u)[0] / (m * big_omega * big_omega);
        axes[k] = [u.x, u.y, u.z];
    }
    let q_effective = 2.0 * std::f64::consts::SQRT_2 * modes.omega[2] / big_omega;
    if drive.amplitude == 0.0 {
        warnings.push("rf amplitude is zero: no pseudopotential, trap depth is 0".to_string());
    }
    if q_effective > Q_EFFECTIVE_WARN {
        warnings.push(format!(
            "q_effective = {q_effective:.3} exceeds {Q_EFFECTIVE_WARN}: pseudopotential approximation is poor"
        ));
    }
    for (k, qk) in q.iter().enumerate() {
        if qk.abs() / 2.0 >= 1.0 {
            warnings.push(format!("|q| / 2 >= 1 along principal axis {k}"));
        }
    }
    for (k, w) in modes.omega.iter().enumerate() {
        if *w == 0.0 {
            warnings.push(format!("no confinement along principal axis {k}"));
        }
    }
    let freq_hz = modes.omega.map(rad_per_s_to_hz);
    Ok(TrapMetrics {
        rf_nil_m: [nil.x, nil.y, nil.z],
        depth_j: depth.energy.joules,
        depth_ev: depth.energy.ev,
        escape_point_m: [depth.escape_point.x, depth.escape_point.y, depth.escape_point.z],
        secular_frequencies_rad_s: modes.omega,
        secular_frequencies_hz: freq_hz,
        principal_axes: axes,
        theta_rad: modes.theta,
        a,
        q,
        q_effective,
        eta: eff.eta,
        r0_prime_m: eff.r0_prime,
        eta_convention: "r0' = distance from nil to nearest electrode surface; radial mean of rf-only frequencies"
            .to_string(),
        warnings,
    })
}
