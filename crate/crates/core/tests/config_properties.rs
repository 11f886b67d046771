use std::collections::BTreeMap;

use proptest::prelude::*;

use paultrap::config::*;
use paultrap::geometry::{FiveWire, RfDrive};

fn five_wire_config(dims: FiveWire, v0: f64, omega: f64, dc: f64) -> TrapConfig {
    let mut dc_voltages = BTreeMap::new();
    dc_voltages.insert("dc_center".to_string(), dc);
    TrapConfig {
        ion: IonConfig::Catalog("Ca40".into()),
        drive: RfDrive::new(v0, omega),
        layout: LayoutConfig { shape: LayoutShape::FiveWire(dims), dc_voltages },
        analysis: AnalysisConfig::default(),
    }
}

proptest! {
    #[test]
    fn config_round_trips_exactly(
        c in 1e-6f64..1e-3, l in 1e-6f64..1e-3, r in 1e-6f64..1e-3, o in 1e-6f64..1e-3, len in 1e-4f64..1e-1,
        v0 in 0.0f64..1000.0, omega in 1e6f64..1e9, dc in -10.0f64..10.0,
    ) {
        let cfg = five_wire_config(FiveWire { center_width: c, rf_width_left: l, rf_width_right: r, outer_width: o, length: len }, v0, omega, dc);
        let text = cfg.to_json().unwrap();
        let back = TrapConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json().unwrap(), text);
        prop_assert!(back.layout().is_ok());
    }

    #[test]
    fn override_sets_exactly_one_value(v in 1.0f64..500.0) {
        let cfg = five_wire_config(FiveWire::symmetric(1e-4, 5e-5, 2e-4, 2e-3), 100.0, 1e8, -1.0);
        let out = cfg.with_value("drive.V0_volts", v).unwrap();
        prop_assert_eq!(out.drive.amplitude, v);
        let mut reset = out.clone();
        reset.drive.amplitude = 100.0;
        prop_assert_eq!(reset, cfg);
    }
}

#[test]
fn every_layout_kind_round_trips() {
    for text in [
        r#"{"ion":"Be9","drive":{"V0_volts":50,"omega_rad_s":2e8,"U0_volts":1.5},"layout":{"kind":"hyperbolic","r0_m":5e-4}}"#,
        r#"{"ion":"Sr88","drive":{"V0_volts":50,"omega_rad_s":2e8,"phases_rad":{"rf_top":0.1}},"layout":{"kind":"two_layer","w_m":1e-4,"d_m":1e-4},"analysis":{"cells_per_feature":6}}"#,
        r#"{"ion":{"name":"X","mass_kg":1e-25,"charge_c":1.602176634e-19},"drive":{"V0_volts":50,"omega_rad_s":2e8},"layout":{"kind":"planar","electrodes":[{"id":"rf","rect":{"x1":-1e-4,"x2":1e-4,"y1":-1e-3,"y2":1e-3},"role":"rf"}]}}"#,
    ] {
        let cfg = TrapConfig::from_json(text).unwrap();
        let back = TrapConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
