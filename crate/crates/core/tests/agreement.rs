//! The explicit conditions and the overlap oracle must return the same
//! verdict on every instance.

use pbwforge_core::random::agreement_sweep;
use pbwforge_core::scalars::FieldSpec;

#[test]
fn deciders_agree_on_random_instances() {
    let mut seed = 11;
    for field in [FieldSpec::Prime(3), FieldSpec::Prime(5), FieldSpec::Rational] {
        for dim in [2, 3] {
            for order in [1, 2, 3, 4, 6] {
                seed += 1;
                let stats = agreement_sweep(seed, field, dim, order, 24).unwrap();
                assert!(stats.disagreements.is_empty(), "{field} dim {dim} |G| {order}: {:?}", stats.disagreements);
                assert!(stats.pbw > 0 && stats.pbw < stats.instances, "{field} dim {dim} |G| {order}: {stats:?}");
            }
        }
    }
}
