use pbwforge_core::diamond::{brute_force_filtered_dim, cumulative_graded_dims, diamond_check};
use pbwforge_core::pbwcheck::check_bg_poly;
use pbwforge_core::random::{as_poly, random_instance, AlgebraKind, InstanceSpec, ParamMode};
use pbwforge_core::scalars::FieldSpec;
use pbwforge_core::untwist::{untwist, untwisted_presentation, verify_untwist};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_nonmodular_instances_untwist() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let configs = [
        (FieldSpec::Rational, 2, 2),
        (FieldSpec::Rational, 2, 3),
        (FieldSpec::Rational, 3, 2),
        (FieldSpec::Prime(5), 2, 4),
        (FieldSpec::Prime(5), 2, 6),
        (FieldSpec::Prime(3), 3, 2),
    ];
    let mut twisted = 0;
    for (field, dim, order) in configs {
        for _ in 0..4 {
            let spec = InstanceSpec { field, dim, group_order: order, algebra: AlgebraKind::Symmetric, mode: ParamMode::Solved };
            let d = as_poly(&random_instance(&mut rng, &spec).unwrap().unwrap()).unwrap();
            let u = untwist(&d).unwrap();
            verify_untwist(&d, &u).unwrap();
            let target = untwisted_presentation(&d, &u).unwrap();
            assert!(check_bg_poly(&target).unwrap().pbw);
            assert!(diamond_check(&target).unwrap().pbw);
            if !d.lambda_is_zero() {
                twisted += 1;
            }
            if dim == 2 && order == 2 {
                let pbw = cumulative_graded_dims(&d.quadratic, &d.group, 3);
                assert_eq!(brute_force_filtered_dim(&d, 3, 4).unwrap(), pbw);
                assert_eq!(brute_force_filtered_dim(&target, 3, 4).unwrap(), pbw);
            }
        }
    }
    assert!(twisted > 0);
}

#[test]
fn invariant_kappa_is_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (field, order) in [(FieldSpec::Rational, 2), (FieldSpec::Rational, 6), (FieldSpec::Prime(5), 4)] {
        for _ in 0..4 {
            let spec = InstanceSpec { field, dim: 3, group_order: order, algebra: AlgebraKind::Symmetric, mode: ParamMode::SolvedLambdaZero };
            let d = as_poly(&random_instance(&mut rng, &spec).unwrap().unwrap()).unwrap();
            let u = untwist(&d).unwrap();
            assert!(u.gamma.iter().all(|g| g.is_zero()));
            assert_eq!(u.kappa_prime, d.poly_params().unwrap().normalized());
        }
    }
}
