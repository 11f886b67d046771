//! Physical constants and unit conversions. Everything inside the crate is SI.

/// Elementary charge, C (exact, 2019 SI).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Unified atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Reduced Planck constant, J s (exact, 2019 SI).
pub const HBAR: f64 = 1.054_571_817e-34;

pub const TWO_PI: f64 = std::f64::consts::TAU;

#[inline]
pub fn joules_to_ev(energy: f64) -> f64 {
    energy / ELEMENTARY_CHARGE
}

#[inline]
pub fn ev_to_joules(energy: f64) -> f64 {
    energy * ELEMENTARY_CHARGE
}

#[inline]
pub fn rad_per_s_to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}

#[inline]
pub fn hz_to_rad_per_s(f: f64) -> f64 {
    f * TWO_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ev_round_trip() {
        assert_eq!(joules_to_ev(ELEMENTARY_CHARGE), 1.0);
        let e = 3.7;
        assert!((joules_to_ev(ev_to_joules(e)) - e).abs() < 1e-15);
    }

    #[test]
    fn angular_frequency() {
        assert!((hz_to_rad_per_s(1.0e6) - 6.283_185_307_179_586e6).abs() < 1e-6);
        assert!((rad_per_s_to_hz(TWO_PI * 40e6) - 40e6).abs() < 1e-6);
    }
}
