//! Trap configuration files: ion, drive, layout and analysis settings as
//! JSON, plus dotted-path parameter overrides for scans.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{ModelOptions, TrapModel};
use crate::error::{Error, Result};
use crate::fields::SorOptions;
use crate::geometry::{ion_from_catalog, validate_layout, FiveWire, Geometry, IonSpecies, PlanarElectrode, RfDrive, TrapLayout};

/// A catalog name such as `"Ca40"` or an explicit species.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IonConfig {
    Catalog(String),
    Custom(IonSpecies),
}

impl IonConfig {
    pub fn resolve(&self) -> Result<IonSpecies> {
        match self {
            IonConfig::Catalog(name) => ion_from_catalog(name),
            IonConfig::Custom(ion) => IonSpecies::new(ion.name.clone(), ion.mass, ion.charge),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayoutShape {
    Hyperbolic {
        r0_m: f64,
    },
    Planar {
        electrodes: Vec<PlanarElectrode>,
    },
    TwoLayer {
        w_m: f64,
        d_m: f64,
    },
    /// Gapless five-wire surface trap built by [`crate::geometry::make_five_wire`].
    FiveWire(FiveWire),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig {
    #[serde(flatten)]
    pub shape: LayoutShape,
    #[serde(default)]
    pub dc_voltages: BTreeMap<String, f64>,
}

/// Settings for layouts solved on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub cells_per_feature: usize,
    pub padding: f64,
    pub sor_tol: f64,
    pub sor_max_iters: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let m = ModelOptions::default();
        Self { cells_per_feature: m.cells_per_feature, padding: m.padding, sor_tol: m.sor.tol, sor_max_iters: m.sor.max_iters }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    pub ion: IonConfig,
    pub drive: RfDrive,
    pub layout: LayoutConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

/// Two-layer shorthand accepted by [`TrapConfig::with_value`]: sets
/// `w = value * d`.
pub const ASPECT_RATIO_PATH: &str = "layout.aspect_ratio";

impl TrapConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn ion(&self) -> Result<IonSpecies> {
        self.ion.resolve()
    }

    /// Build and validate the layout.
    pub fn layout(&self) -> Result<TrapLayout> {
        let geometry = match &self.layout.shape {
            LayoutShape::Hyperbolic { r0_m } => Geometry::Hyperbolic { r0: *r0_m },
            LayoutShape::Planar { electrodes } => Geometry::Planar { electrodes: electrodes.clone() },
            LayoutShape::TwoLayer { w_m, d_m } => Geometry::TwoLayer { w: *w_m, d: *d_m },
            LayoutShape::FiveWire(dims) => Geometry::Planar { electrodes: dims.electrodes()? },
        };
        let layout = TrapLayout { geometry, drive: self.drive.clone(), dc_voltages: self.layout.dc_voltages.clone() };
        let violations = validate_layout(&layout);
        if !violations.is_empty() {
            return Err(Error::Layout(violations));
        }
        Ok(layout)
    }

    pub fn model_options(&self) -> ModelOptions {
        let sor = ModelOptions::default().sor;
        ModelOptions {
            cells_per_feature: self.analysis.cells_per_feature,
            padding: self.analysis.padding,
            sor: SorOptions { tol: self.analysis.sor_tol, max_iters: self.analysis.sor_max_iters, ..sor },
        }
    }

    pub fn model(&self) -> Result<TrapModel> {
        TrapModel::with_options(&self.layout()?, &self.ion()?, &self.model_options())
    }

    /// Copy with the number at a dotted path (e.g. `drive.V0_volts`,
    /// `layout.rf_width_left_m`, `layout.electrodes.0.rect.x2`,
    /// `layout.dc_voltages.dc_center`) replaced by `value`. Entries of
    /// `dc_voltages` and `phases_rad` may be created; every other segment
    /// must already exist.
    pub fn with_value(&self, path: &str, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Configuration(format!("scan value for `{path}` must be finite")));
        }
        let mut root = serde_json::to_value(self)?;
        if path == ASPECT_RATIO_PATH {
            let layout = &mut root["layout"];
            if layout["kind"] != "two_layer" {
                return Err(Error::Configuration(format!("`{path}` applies to two-layer layouts only")));
            }
            let d = layout["d_m"].as_f64().unwrap_or(f64::NAN);
            layout["w_m"] = number(value * d, path)?;
        } else {
            *resolve(&mut root, path)? = number(value, path)?;
        }
        serde_json::from_value(root).map_err(|e| Error::Configuration(format!("`{path}` = {value}: {e}")))
    }

    /// Fails with a configuration error unless `path` names a number (or the
    /// aspect-ratio shorthand on a two-layer layout).
    pub fn check_path(&self, path: &str) -> Result<()> {
        let mut root = serde_json::to_value(self)?;
        if path == ASPECT_RATIO_PATH {
            if root["layout"]["kind"] != "two_layer" {
                return Err(Error::Configuration(format!("`{path}` applies to two-layer layouts only")));
            }
            return Ok(());
        }
        resolve(&mut root, path).map(|_| ())
    }
}

fn number(v: f64, path: &str) -> Result<Value> {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .ok_or_else(|| Error::Configuration(format!("`{path}`: value {v} is not representable")))
}

fn resolve<'a>(root: &'a mut Value, path: &str) -> Result<&'a mut Value> {
    let unresolved = || Error::Configuration(format!("config path `{path}` does not resolve to a number"));
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(unresolved());
    }
    let mut cur = root;
    let mut parent = "";
    for seg in segments {
        cur = match cur {
            Value::Object(map) => {
                if !map.contains_key(seg) && matches!(parent, "dc_voltages" | "phases_rad") {
                    map.insert(seg.to_string(), Value::Null);
                }
                map.get_mut(seg).ok_or_else(unresolved)?
            }
            Value::Array(items) => {
                let i: usize = seg.parse().map_err(|_| unresolved())?;
                items.get_mut(i).ok_or_else(unresolved)?
            }
            _ => return Err(unresolved()),
        };
        parent = seg;
    }
    if cur.is_number() || cur.is_null() {
        Ok(cur)
    } else {
        Err(unresolved())
    }
}
