use pbwforge_cli::document::{build_instance, canonical_document, parse_instance, to_json};
use pbwforge_core::fixtures::fixture;
use pbwforge_core::params::DeformationPresentation;
use pbwforge_core::random::seeded_instance;
use proptest::prelude::*;

fn same_presentation(a: &DeformationPresentation, b: &DeformationPresentation) -> bool {
    a.field == b.field
        && a.group.generators() == b.group.generators()
        && a.group.order() == b.group.order()
        && a.quadratic == b.quadratic
        && a.params == b.params
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_serialize_parse_is_identity(seed in any::<u64>()) {
        let d = seeded_instance(seed).unwrap();
        let doc = canonical_document(&d);
        let text = to_json(&doc);
        let reparsed = parse_instance(&text).unwrap();
        prop_assert_eq!(&reparsed, &doc);
        let rebuilt = build_instance(&reparsed).unwrap();
        prop_assert!(same_presentation(&rebuilt, &d), "{}", text);
        prop_assert_eq!(to_json(&canonical_document(&rebuilt)), text);
    }
}

#[test]
fn fixtures_round_trip() {
    for p in [3, 5, 7, 11] {
        for name in ["example-6-1", "example-6-2"] {
            let d = fixture(name, Some(p)).unwrap();
            let text = to_json(&canonical_document(&d));
            let back = build_instance(&parse_instance(&text).unwrap()).unwrap();
            assert!(same_presentation(&back, &d), "{name} p={p}");
        }
    }
    for name in ["symmetric-trivial", "quantum-plane-trivial", "nonmodular-untwist-demo"] {
        let d = fixture(name, None).unwrap();
        let text = to_json(&canonical_document(&d));
        let back = build_instance(&parse_instance(&text).unwrap()).unwrap();
        assert!(same_presentation(&back, &d), "{name}");
    }
}
