//! Lumped rf loss model of the trap electrodes (series resistance, electrode
//! capacitance with a lossy dielectric) and breakdown scaling estimates.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitModel {
    #[serde(rename = "resistance_ohm")]
    pub resistance: f64,
    #[serde(rename = "capacitance_f")]
    pub capacitance: f64,
    pub tan_delta: f64,
    #[serde(rename = "omega_rad_s")]
    pub omega: f64,
    /// Electrode inductance, H. Usually negligible (~1e-10 H).
    #[serde(rename = "inductance_h", default)]
    pub inductance: f64,
}

impl CircuitModel {
    pub fn new(resistance: f64, capacitance: f64, tan_delta: f64, omega: f64) -> Result<Self> {
        let m = Self { resistance, capacitance, tan_delta, omega, inductance: 0.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn with_inductance(mut self, inductance: f64) -> Result<Self> {
        self.inductance = inductance;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite();
        if !(ok(self.resistance) && self.resistance >= 0.0) {
            return Err(Error::Validation(format!("resistance must be >= 0, got {}", self.resistance)));
        }
        if !(ok(self.capacitance) && self.capacitance > 0.0) {
            return Err(Error::Validation(format!("capacitance must be positive, got {}", self.capacitance)));
        }
        if !(ok(self.tan_delta) && self.tan_delta >= 0.0) {
            return Err(Error::Validation(format!("loss tangent must be >= 0, got {}", self.tan_delta)));
        }
        if !(ok(self.omega) && self.omega > 0.0) {
            return Err(Error::Validation(format!("drive frequency must be positive, got {}", self.omega)));
        }
        if !(ok(self.inductance) && self.inductance >= 0.0) {
            return Err(Error::Validation(format!("inductance must be >= 0, got {}", self.inductance)));
        }
        Ok(())
    }

    pub fn conductance(&self) -> f64 {
        conductance(self.capacitance, self.tan_delta, self.omega)
    }

    /// `Omega C R`.
    pub fn omega_cr(&self) -> f64 {
        self.omega * self.capacitance * self.resistance
    }
}

/// Dielectric conductance `G = omega C tan(delta)`, S.
pub fn conductance(capacitance: f64, tan_delta: f64, omega: f64) -> f64 {
    omega * capacitance * tan_delta
}

/// `Z = R + j omega L + (G - j omega C) / (G^2 + omega^2 C^2)`, ohms.
pub fn impedance(model: &CircuitModel) -> Result<Complex64> {
    impedance_parts(model.resistance, model.inductance, model.conductance(), model.capacitance, model.omega)
}

/// Same as [`impedance`] with the dielectric conductance given directly.
pub fn impedance_parts(resistance: f64, inductance: f64, conductance: f64, capacitance: f64, omega: f64) -> Result<Complex64> {
    let den = conductance * conductance + omega * omega * capacitance * capacitance;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateCircuit);
    }
    Ok(Complex64::new(resistance + conductance / den, omega * inductance - omega * capacitance / den))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    /// `V0^2 Omega^2 C^2 R (1 + tan^2)^2 / (2 (1 + Omega^2 C^2 R^2 (1 + tan^2)^2))`, W.
    pub full_w: f64,
    /// Small-loss limit `V0^2 Omega^2 C^2 R / 2`, W.
    pub simplified_w: f64,
    /// `(full - simplified) / simplified`; 0 when both vanish.
    pub relative_gap: f64,
    /// Bound on `|relative_gap|`: `(1 + tan^2)^2 (1 + (Omega C R)^2) - 1`.
    pub gap_bound: f64,
    /// `Re(Z) V0^2 / (2 |Z|^2)` from the full complex impedance, W. Unlike
    /// the closed form it includes the dielectric loss `G`.
    pub circuit_w: f64,
}

/// Power dissipated by an rf amplitude `v0` across the circuit.
pub fn power_dissipated(v0: f64, model: &CircuitModel) -> Result<PowerEstimate> {
    model.validate()?;
    if !v0.is_finite() {
        return Err(Error::Validation("rf amplitude must be finite".into()));
    }
    let (om, c, r) = (model.omega, model.capacitance, model.resistance);
    let t2 = model.tan_delta * model.tan_delta;
    let k = (1.0 + t2) * (1.0 + t2);
    let x = om * c * r;
    let simplified_w = 0.5 * v0 * v0 * om * om * c * c * r;
    let full_w = simplified_w * k / (1.0 + x * x * k);
    let relative_gap = if simplified_w > 0.0 { full_w / simplified_w - 1.0 } else { 0.0 };
    let z = impedance(model)?;
    let circuit_w = 0.5 * v0 * v0 * z.re / z.norm_sqr();
    Ok(PowerEstimate { full_w, simplified_w, relative_gap, gap_bound: k * (1.0 + x * x) - 1.0, circuit_w })
}

/// Default surface-to-bulk breakdown field ratio.
pub const SURFACE_TO_BULK: f64 = 1.0 / 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakdownSpec {
    /// Bulk dielectric strength at the reference thickness, V/m.
    #[serde(rename = "e_ref_v_per_m")]
    pub e_ref: f64,
    #[serde(rename = "d_ref_m")]
    pub d_ref: f64,
    /// `E_c ~ d^-n`, n in [0, 1.5].
    pub bulk_exponent: f64,
    /// `V_b ~ d^alpha`, alpha in (0, 1].
    pub flashover_exponent: f64,
    #[serde(default = "default_surface_ratio")]
    pub surface_ratio: f64,
}

fn default_surface_ratio() -> f64 {
    SURFACE_TO_BULK
}

impl BreakdownSpec {
    /// Typical exponents: n = 0.5 (lower end of the reported 0.5..1), alpha = 0.5.
    pub fn new(e_ref: f64, d_ref: f64) -> Result<Self> {
        let s = Self { e_ref, d_ref, bulk_exponent: 0.5, flashover_exponent: 0.5, surface_ratio: SURFACE_TO_BULK };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_ref.is_finite() && self.e_ref > 0.0) {
            return Err(Error::Validation(format!("reference field must be positive, got {}", self.e_ref)));
        }
        if !(self.d_ref.is_finite() && self.d_ref > 0.0) {
            return Err(Error::Validation(format!("reference thickness must be positive, got {}", self.d_ref)));
        }
        if !(0.0..=1.5).contains(&self.bulk_exponent) {
            return Err(Error::Validation(format!("bulk exponent must lie in [0, 1.5], got {}", self.bulk_exponent)));
        }
        if !(self.flashover_exponent > 0.0 && self.flashover_exponent <= 1.0) {
            return Err(Error::Validation(format!(
                "flashover exponent must lie in (0, 1], got {}",
                self.flashover_exponent
            )));
        }
        if !(self.surface_ratio.is_finite() && self.surface_ratio > 0.0) {
            return Err(Error::Validation(format!("surface ratio must be positive, got {}", self.surface_ratio)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakdownMode {
    /// Through the dielectric of thickness `d`.
    Bulk,
    /// Flashover across an insulator surface of length `d`.
    Surface,
}

/// Breakdown voltage, V. Bulk: `d E_ref (d / d_ref)^-n`. Surface:
/// `ratio E_ref d_ref (d / d_ref)^alpha`.
pub fn breakdown_voltage(spec: &BreakdownSpec, d: f64, mode: BreakdownMode) -> Result<f64> {
    spec.validate()?;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Validation(format!("thickness must be positive, got {d}")));
    }
    let s = d / spec.d_ref;
    Ok(match mode {
        BreakdownMode::Bulk => d * spec.e_ref * s.powf(-spec.bulk_exponent),
        BreakdownMode::Surface => spec.surface_ratio * spec.e_ref * spec.d_ref * s.powf(spec.flashover_exponent),
    })
}

/// Dielectric preset: loss tangent, optional breakdown parameters and where
/// the numbers come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub tan_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<BreakdownSpec>,
    pub source: String,
}

const BUILTIN_MATERIALS: &str = include_str!("../data/materials.json");

/// The built-in presets (loss tangents near 1 MHz). None carries breakdown
/// parameters: those depend on process and must be measured.
pub fn builtin_materials() -> BTreeMap<String, Material> {
    serde_json::from_str(BUILTIN_MATERIALS).expect("built-in material table is valid JSON")
}

/// Presets from a JSON file mapping name to material.
pub fn load_materials(path: impl AsRef<Path>) -> Result<BTreeMap<String, Material>> {
    let map: BTreeMap<String, Material> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    for (name, m) in &map {
        if !(m.tan_delta.is_finite() && m.tan_delta >= 0.0) {
            return Err(Error::Validation(format!("material `{name}`: loss tangent must be >= 0")));
        }
        if let Some(b) = &m.breakdown {
            b.validate()?;
        }
    }
    Ok(map)
}

pub fn material(name: &str) -> Result<Material> {
    let all = builtin_materials();
    all.get(name).cloned().ok_or_else(|| Error::Lookup(format!("unknown material `{name}`; known: {:?}", all.keys().collect::<Vec<_>>())))
}
