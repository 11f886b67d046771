//! Motional heating from electric-field noise: noise scaling models, the
//! heating rate with its micromotion sideband term, and power-law fits to
//! measurements.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::IonSpecies;
use crate::units::HBAR;

/// Distance exponent of the patch-potential model.
pub const MODEL_DISTANCE_EXPONENT: f64 = -4.0;
/// Distance exponent of the measured heating-rate scaling.
pub const MEASURED_DISTANCE_EXPONENT: f64 = -3.5;

/// `S(T) = A (1 + (T / T_s)^p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureLaw {
    #[serde(rename = "plateau_v2_m2_hz")]
    pub plateau: f64,
    #[serde(rename = "t_scale_k")]
    pub t_scale: f64,
    pub exponent: f64,
}

impl TemperatureLaw {
    /// `42 (1 + (T / 46 K)^4.1) x 1e-15 V^2/m^2/Hz`.
    pub fn cryogenic() -> Self {
        Self { plateau: 42e-15, t_scale: 46.0, exponent: 4.1 }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.plateau * self.shape(t)
    }

    fn shape(&self, t: f64) -> f64 {
        1.0 + (t / self.t_scale).powf(self.exponent)
    }

    fn validate(&self) -> Result<()> {
        if !(self.plateau > 0.0 && self.t_scale > 0.0 && self.exponent > 0.0)
            || !(self.plateau.is_finite() && self.t_scale.is_finite() && self.exponent.is_finite())
        {
            return Err(Error::Validation("temperature law needs positive plateau, scale and exponent".into()));
        }
        Ok(())
    }
}

/// `S_E(omega, d, T) = S0 (omega/omega0)^f (d/d0)^beta tau(T) / tau(T0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(rename = "s0_v2_m2_hz")]
    pub s0: f64,
    #[serde(rename = "omega0_rad_s")]
    pub omega0: f64,
    #[serde(rename = "d0_m")]
    pub d0: f64,
    #[serde(rename = "t0_k", default)]
    pub t0: f64,
    #[serde(default = "default_frequency_exponent")]
    pub frequency_exponent: f64,
    #[serde(default = "default_distance_exponent")]
    pub distance_exponent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<TemperatureLaw>,
}

fn default_frequency_exponent() -> f64 {
    -1.0
}

fn default_distance_exponent() -> f64 {
    MODEL_DISTANCE_EXPONENT
}

impl NoiseModel {
    /// `1/omega`, `1/d^4`, no temperature dependence.
    pub fn new(s0: f64, omega0: f64, d0: f64) -> Result<Self> {
        let m = Self {
            s0,
            omega0,
            d0,
            t0: 0.0,
            frequency_exponent: -1.0,
            distance_exponent: MODEL_DISTANCE_EXPONENT,
            temperature: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Reference level from a temperature law: `S0 = A` at `T0 = 0`.
    pub fn from_temperature_law(law: TemperatureLaw, omega0: f64, d0: f64) -> Result<Self> {
        law.validate()?;
        let mut m = Self::new(law.plateau, omega0, d0)?;
        m.temperature = Some(law);
        Ok(m)
    }

    pub fn with_distance_exponent(mut self, beta: f64) -> Self {
        self.distance_exponent = beta;
        self
    }

    pub fn with_frequency_exponent(mut self, f: f64) -> Self {
        self.frequency_exponent = f;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("S0", self.s0), ("omega0", self.omega0), ("d0", self.d0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("noise model {name} must be positive, got {v}")));
            }
        }
        if !(self.t0.is_finite() && self.t0 >= 0.0) {
            return Err(Error::Validation(format!("reference temperature must be >= 0, got {}", self.t0)));
        }
        if !(self.frequency_exponent.is_finite() && self.distance_exponent.is_finite()) {
            return Err(Error::Validation("noise exponents must be finite".into()));
        }
        if let Some(law) = &self.temperature {
            law.validate()?;
        }
        Ok(())
    }

    /// Spectral density at `(omega, d, T)`, V^2/m^2/Hz.
    pub fn noise_at(&self, omega: f64, d: f64, t: f64) -> Result<f64> {
        if !(omega > 0.0 && d > 0.0 && t.is_finite()) || !(omega.is_finite() && d.is_finite()) {
            return Err(Error::Domain(format!("noise needs omega > 0 and d > 0, got omega={omega}, d={d}")));
        }
        let tf = match &self.temperature {
            Some(law) => {
                if t < 0.0 {
                    return Err(Error::Domain(format!("temperature must be >= 0, got {t}")));
                }
                law.shape(t) / law.shape(self.t0)
            }
            None => 1.0,
        };
        Ok(self.s0 * (omega / self.omega0).powf(self.frequency_exponent) * (d / self.d0).powf(self.distance_exponent) * tf)
    }
}

/// Wrapper so [`noise_at`] reads like the other free functions.
pub fn noise_at(noise: &NoiseModel, omega: f64, d: f64, t: f64) -> Result<f64> {
    noise.noise_at(omega, d, t)
}

/// Sideband combination used for the micromotion term.
pub const SIDEBAND_COMBINATION: &str = "arithmetic mean of S_E(Omega - omega) and S_E(Omega + omega)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatingEstimate {
    /// Total rate, quanta/s.
    pub ndot: f64,
    pub secular_term: f64,
    pub cross_term: f64,
    pub sideband_combination: String,
}

/// Heating rate `q^2 / (4 m hbar w) (S(w) + w^2 / (2 Omega^2) S(Omega +- w))`
/// for an arbitrary spectrum `s_e(omega)`, V^2/m^2/Hz.
pub fn heating_rate_for(
    ion: &IonSpecies,
    omega_m: f64,
    omega_rf: f64,
    s_e: impl Fn(f64) -> Result<f64>,
    include_cross: bool,
) -> Result<HeatingEstimate> {
    if !(omega_m > 0.0 && omega_m.is_finite()) {
        return Err(Error::Domain(format!("secular frequency must be positive, got {omega_m}")));
    }
    if !(omega_m < omega_rf) || !omega_rf.is_finite() {
        return Err(Error::Domain(format!("secular frequency {omega_m} must lie below the drive {omega_rf}")));
    }
    let k = ion.charge * ion.charge / (4.0 * ion.mass * HBAR * omega_m);
    let s = s_e(omega_m)?;
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("noise density must be >= 0, got {s}")));
    }
    let secular_term = k * s;
    let cross_term = if include_cross {
        let side = 0.5 * (s_e(omega_rf - omega_m)? + s_e(omega_rf + omega_m)?);
        k * omega_m * omega_m / (2.0 * omega_rf * omega_rf) * side
    } else {
        0.0
    };
    Ok(HeatingEstimate {
        ndot: secular_term + cross_term,
        secular_term,
        cross_term,
        sideband_combination: SIDEBAND_COMBINATION.to_string(),
    })
}

/// Heating rate from a noise model evaluated at ion height `d` and
/// electrode temperature `t`.
pub fn heating_rate(
    ion: &IonSpecies,
    omega_m: f64,
    omega_rf: f64,
    noise: &NoiseModel,
    d: f64,
    t: f64,
    include_cross: bool,
) -> Result<HeatingEstimate> {
    noise.validate()?;
    heating_rate_for(ion, omega_m, omega_rf, |w| noise.noise_at(w, d, t), include_cross)
}

/// `omega S_E`, V^2/m^2 (omega in rad/s). Flat under a `1/omega` spectrum.
pub fn scaled_noise_product(omega: f64, s_e: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("frequency must be positive, got {omega}")));
    }
    Ok(omega * s_e)
}

/// `y = prefactor d^exponent`, fitted in log-log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// RMS residual of `ln y`.
    pub residual: f64,
    pub n_points: usize,
}

/// Least-squares line through `(ln d, ln y)`. Needs three points, at least
/// two of them at distinct `d`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!("power-law fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(d, y)| !(*d > 0.0 && *y > 0.0 && d.is_finite() && y.is_finite())) {
        return Err(Error::Domain(format!("power-law fit needs positive values, got ({}, {})", p.0, p.1)));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 1e-24 * n) {
        return Err(Error::InsufficientData("power-law fit needs at least two distinct distances".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(PowerLawFit { exponent: slope, prefactor: intercept.exp(), residual: (ss / n).sqrt(), n_points: points.len() })
}

/// One row of a noise measurement file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseMeasurement {
    pub d_m: f64,
    pub omega_rad_s: f64,
    #[serde(rename = "S_E_V2m2Hz")]
    pub s_e: f64,
    #[serde(rename = "T_K", default)]
    pub t_k: Option<f64>,
}

/// Parse `d_m,omega_rad_s,S_E_V2m2Hz[,T_K]` with a header row.
pub fn read_measurements(reader: impl Read) -> Result<Vec<NoiseMeasurement>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let want = ["d_m", "omega_rad_s", "S_E_V2m2Hz"];
    let ok = headers.len() >= 3 && headers.iter().take(3).eq(want) && (headers.len() == 3 || (headers.len() == 4 && &headers[3] == "T_K"));
    if !ok {
        return Err(Error::Validation(format!("measurement header must be d_m,omega_rad_s,S_E_V2m2Hz[,T_K], got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let m: NoiseMeasurement = row.map_err(csv_error)?;
        if !(m.d_m > 0.0 && m.omega_rad_s > 0.0 && m.s_e > 0.0) {
            return Err(Error::Validation(format!("measurement values must be positive: {m:?}")));
        }
        out.push(m);
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Validation(format!("measurement file: {e}"))
}

/// Distance scaling of `omega S_E` across measurements, which removes the
/// `1/omega` frequency dependence.
pub fn fit_measurements(rows: &[NoiseMeasurement]) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|m| Ok((m.d_m, scaled_noise_product(m.omega_rad_s, m.s_e)?))).collect::<Result<_>>()?;
    fit_power_law(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ion_from_catalog;
    use std::f64::consts::TAU;

    #[test]
    fn temperature_law_points() {
        let law = TemperatureLaw::cryogenic();
        assert_eq!(law.value(46.0), 84e-15);
        let m = NoiseModel::from_temperature_law(law, TAU * 1e6, 1e-4).unwrap();
        assert_eq!(m.noise_at(TAU * 1e6, 1e-4, 46.0).unwrap(), 84e-15);
        let seven = m.noise_at(TAU * 1e6, 1e-4, 7.0).unwrap();
        assert!((seven / 1e-15 - 42.019).abs() < 0.005, "{seven}");
        assert!((m.noise_at(TAU * 1e6, 1e-4, 0.0).unwrap() - 42e-15).abs() < 1e-30);
    }

    #[test]
    fn distance_and_frequency_scaling() {
        let m = NoiseModel::new(1e-11, TAU * 1e6, 1e-4).unwrap();
        let s = m.noise_at(TAU * 1e6, 1e-4, 300.0).unwrap();
        assert_eq!(s, 1e-11);
        assert!((m.noise_at(TAU * 1e6, 5e-5, 300.0).unwrap() / s - 16.0).abs() < 1e-12);
        let a = scaled_noise_product(TAU * 1e6, m.noise_at(TAU * 1e6, 1e-4, 0.0).unwrap()).unwrap();
        let b = scaled_noise_product(TAU * 3e6, m.noise_at(TAU * 3e6, 1e-4, 0.0).unwrap()).unwrap();
        assert!((a / b - 1.0).abs() < 1e-15);
        assert!(scaled_noise_product(0.0, 1e-11).is_err());
        assert!(m.noise_at(0.0, 1e-4, 0.0).is_err());
    }

    #[test]
    fn heating_worked_point() {
        let yb = ion_from_catalog("Yb171").unwrap();
        let w = TAU * 1e6;
        let est = heating_rate_for(&yb, w, TAU * 30e6, |_| Ok(1e-11), false).unwrap();
        assert!((est.ndot - 341.0).abs() < 1.0, "{}", est.ndot);
        assert_eq!(est.cross_term, 0.0);
        let zero = heating_rate_for(&yb, w, TAU * 30e6, |_| Ok(0.0), true).unwrap();
        assert_eq!(zero.ndot, 0.0);
        assert!(matches!(heating_rate_for(&yb, w, w, |_| Ok(1e-11), false), Err(Error::Domain(_))));
    }

    #[test]
    fn power_law_edge_cases() {
        let f = fit_power_law(&[(1e-4, 2.0), (2e-4, 0.125), (4e-4, 0.0078125)]).unwrap();
        assert!((f.exponent + 4.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!(matches!(fit_power_law(&[(1.0, 1.0), (2.0, 1.0)]), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_power_law(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_power_law(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn measurement_csv() {
        let text = "d_m,omega_rad_s,S_E_V2m2Hz,T_K\n1e-4,6.283e6,1e-11,300\n2e-4,6.283e6,6.25e-13,\n4e-4,6.283e6,3.90625e-14,4\n";
        let rows = read_measurements(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].t_k, Some(300.0));
        assert_eq!(rows[1].t_k, None);
        let fit = fit_measurements(&rows).unwrap();
        assert!((fit.exponent + 4.0).abs() < 1e-12);
        assert!(matches!(fit_measurements(&rows[..2]), Err(Error::InsufficientData(_))));
        let three = "d_m,omega_rad_s,S_E_V2m2Hz\n1e-4,1e6,1e-11\n";
        assert_eq!(read_measurements(three.as_bytes()).unwrap().len(), 1);
        assert!(read_measurements("d,w,s\n1,2,3\n".as_bytes()).is_err());
        assert!(read_measurements("d_m,omega_rad_s,S_E_V2m2Hz\n1e-4,x,1\n".as_bytes()).is_err());
        assert!(read_measurements("d_m,omega_rad_s,S_E_V2m2Hz\n-1e-4,1,1\n".as_bytes()).is_err());
    }
}
