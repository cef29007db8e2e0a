//! In the polynomial form of the degree-0 triple condition, the term
//! `sum_a kappa^C(x1 + a.x1, kappa^L_a(x2, x3)) a` enters with a plus sign on
//! the right-hand side. On instances where that term is nonzero, the opposite
//! sign would reject algebras the overlap oracle proves PBW.

use pbwforge_core::diamond::diamond_check;
use pbwforge_core::group::GroupAlgebraElement;
use pbwforge_core::params::DeformationPresentation;
use pbwforge_core::pbwcheck::check_bg_poly;
use pbwforge_core::random::{as_poly, random_instance, AlgebraKind, InstanceSpec, ParamMode};
use pbwforge_core::scalars::{unit_vector, FieldSpec};
use pbwforge_core::sparse::Sparse;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cross_term(d: &DeformationPresentation) -> GroupAlgebraElement {
    let kp = d.poly_params().unwrap();
    let g = &d.group;
    let e = |i| unit_vector(d.field, 3, i);
    let mut total = Sparse::new();
    for [x1, x2, x3] in [[0, 1, 2], [1, 2, 0], [2, 0, 1]] {
        let k23 = kp.kappa_l_basis(x2, x3);
        for a in 0..g.order() {
            let first: Vec<_> = e(x1).iter().zip(g.act(a, &e(x1))).map(|(x, y)| x + &y).collect();
            let inner = kp.kappa_c_vec(&first, &g.vkg_component(&k23, a));
            total.add_assign(&g.ga_mul(&inner, &g.ga_basis(a)));
        }
    }
    total
}

#[test]
fn cross_term_sign_is_plus() {
    let mut witnesses = 0;
    for (seed, field) in [(1, FieldSpec::Prime(5)), (2, FieldSpec::Rational), (3, FieldSpec::Prime(7))] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for order in [2, 3, 4, 6] {
            for _ in 0..6 {
                let spec = InstanceSpec { field, dim: 3, group_order: order, algebra: AlgebraKind::Symmetric, mode: ParamMode::Solved };
                let Some(d) = random_instance(&mut rng, &spec).unwrap() else { continue };
                let d = as_poly(&d).unwrap();
                if d.lambda_is_zero() || cross_term(&d).is_zero() {
                    continue;
                }
                assert!(diamond_check(&d).unwrap().pbw);
                assert!(check_bg_poly(&d).unwrap().condition("5").unwrap().passed());
                witnesses += 1;
            }
        }
    }
    eprintln!("witnesses: {witnesses}");
    assert!(witnesses > 0);
}
