use paultrap::geometry::{catalog_names, ion_from_catalog, make_five_wire, validate_layout, RfDrive, TrapLayout};
use paultrap::units::ATOMIC_MASS_UNIT;
use proptest::prelude::*;

#[test]
fn catalog_masses_are_whole_mass_numbers() {
    for name in catalog_names() {
        let ion = ion_from_catalog(name).unwrap();
        let a = ion.mass / ATOMIC_MASS_UNIT;
        let digits: f64 = name.trim_start_matches(char::is_alphabetic).parse().unwrap();
        assert_eq!(a.round(), digits, "{name}");
        assert!((a - a.round()).abs() < 1e-9, "{name}: {a}");
    }
}

fn width() -> impl Strategy<Value = f64> {
    (1e-7f64..1e-2).prop_map(|w| w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn five_wire_is_always_valid(c in width(), l in width(), r in width(), o in width(), len in width()) {
        let layout = make_five_wire(c, l, r, o, len).unwrap();
        prop_assert!(validate_layout(&layout).is_empty(), "{:?}", validate_layout(&layout));
        prop_assert_eq!(layout.is_asymmetric(), l != r);
    }

    #[test]
    fn layout_json_round_trips(
        c in width(), l in width(), r in width(), o in width(), len in width(),
        v0 in 0.0f64..1000.0, om in 1e5f64..1e9, u0 in -50.0f64..50.0, dc in -20.0f64..20.0,
    ) {
        let drive = RfDrive::new(v0, om).with_offset(u0);
        let layout = make_five_wire(c, l, r, o, len).unwrap().with_drive(drive).with_dc("dc_center", dc);
        let text = serde_json::to_string(&layout).unwrap();
        let back: TrapLayout = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &layout);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn two_layer_and_hyperbolic_round_trip(w in width(), d in width(), r0 in width()) {
        for layout in [TrapLayout::two_layer(w, d, RfDrive::default()), TrapLayout::hyperbolic(r0, RfDrive::default())] {
            let back: TrapLayout = serde_json::from_str(&serde_json::to_string(&layout).unwrap()).unwrap();
            prop_assert_eq!(back, layout);
        }
    }
}
