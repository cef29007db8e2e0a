//! Randomized algebraic laws: reduction is idempotent, multiplication in the
//! smash product and in the filtered algebras is associative, and kG is a
//! unital associative algebra. The `S(V) # G` product is also compared with an
//! independent commutative-polynomial model.

use std::collections::BTreeMap;

use pbwforge_core::fixtures::{nonmodular_demo, quantum_plane_trivial, translated_shear};
use pbwforge_core::group::GroupAlgebraElement;
use pbwforge_core::params::DeformationPresentation;
use pbwforge_core::quadratic::{free_from_smash, FreeElement, Letter, Rewriter, SmashElement, Word};
use pbwforge_core::random::{random_group, random_scalar};
use pbwforge_core::scalars::{FieldSpec, Scalar};
use pbwforge_core::sparse::Sparse;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instances() -> Vec<DeformationPresentation> {
    vec![
        translated_shear(3).unwrap(),
        nonmodular_demo().unwrap(),
        quantum_plane_trivial().unwrap(),
    ]
}

fn random_word(rng: &mut ChaCha8Rng, d: &DeformationPresentation, max: usize) -> Word {
    let len = rng.gen_range(0..=max);
    let letters: Vec<Letter> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.4) {
                Letter::G(rng.gen_range(0..d.group.order()))
            } else {
                Letter::V(rng.gen_range(0..d.dim()))
            }
        })
        .collect();
    Word::from_letters(&d.group, &letters)
}

fn random_free(rng: &mut ChaCha8Rng, d: &DeformationPresentation, max: usize) -> FreeElement {
    let mut x = Sparse::new();
    for _ in 0..rng.gen_range(1..=3) {
        x.add_term(random_word(rng, d, max), random_scalar(rng, d.field));
    }
    x
}

fn filtered(d: &DeformationPresentation) -> Rewriter<'_> {
    Rewriter::new(&d.quadratic, &d.group, d.lower_terms().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_is_idempotent(seed in any::<u64>(), which in 0usize..3, homogeneous in any::<bool>()) {
        let d = &instances()[which];
        let rw = if homogeneous { Rewriter::homogeneous(&d.quadratic, &d.group) } else { filtered(d) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_free(&mut rng, d, 5);
        let once = rw.normal_form(&x).unwrap();
        let twice = rw.normal_form(&free_from_smash(&once)).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn multiplication_is_associative(seed in any::<u64>(), which in 0usize..3, homogeneous in any::<bool>()) {
        let d = &instances()[which];
        let rw = if homogeneous { Rewriter::homogeneous(&d.quadratic, &d.group) } else { filtered(d) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, b, c]: [SmashElement; 3] =
            std::array::from_fn(|_| rw.normal_form(&random_free(&mut rng, d, 3)).unwrap());
        let left = rw.mul(&rw.mul(&a, &b).unwrap(), &c).unwrap();
        let right = rw.mul(&a, &rw.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn group_algebra_laws(seed in any::<u64>(), order in prop::sample::select(vec![1usize, 2, 3, 4, 6])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = [FieldSpec::Prime(3), FieldSpec::Prime(5), FieldSpec::Rational][rng.gen_range(0..3)];
        let g = random_group(&mut rng, field, 2, order, true).unwrap();
        let elem = |rng: &mut ChaCha8Rng| -> GroupAlgebraElement {
            (0..g.order()).map(|h| (h, random_scalar(rng, field))).collect()
        };
        let (a, b, c) = (elem(&mut rng), elem(&mut rng), elem(&mut rng));
        prop_assert_eq!(g.ga_mul(&g.ga_mul(&a, &b), &c), g.ga_mul(&a, &g.ga_mul(&b, &c)));
        prop_assert_eq!(g.ga_mul(&g.ga_one(), &a), a.clone());
        prop_assert_eq!(g.ga_mul(&a, &g.ga_one()), a);
    }

    #[test]
    fn smash_product_matches_polynomial_model(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = translated_shear(3).unwrap();
        let rw = Rewriter::homogeneous(&d.quadratic, &d.group);
        let (x, g) = (random_monomial(&mut rng, &d), rng.gen_range(0..d.group.order()));
        let (y, h) = (random_monomial(&mut rng, &d), rng.gen_range(0..d.group.order()));
        let a = Sparse::monomial((x.clone(), g), d.field.one());
        let b = Sparse::monomial((y.clone(), h), d.field.one());
        let got = rw.mul(&a, &b).unwrap();
        // (x g)(y h) = x * g(y) gh, with g acting on each variable of y
        let mut poly = monomial_poly(&d, &x);
        for &v in &y {
            poly = poly_mul(&poly, &linear_poly(&d.group.act_basis(g, v)));
        }
        let gh = d.group.mult(g, h);
        let expected: SmashElement = poly.into_iter().map(|(m, c)| ((m, gh), c)).collect();
        prop_assert_eq!(got, expected);
    }
}

fn random_monomial(rng: &mut ChaCha8Rng, d: &DeformationPresentation) -> Vec<usize> {
    let mut m: Vec<usize> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..d.dim())).collect();
    m.sort();
    m
}

/// Commutative polynomials keyed by sorted variable lists.
type Poly = BTreeMap<Vec<usize>, Scalar>;

fn monomial_poly(d: &DeformationPresentation, m: &[usize]) -> Poly {
    BTreeMap::from([(m.to_vec(), d.field.one())])
}

fn linear_poly(v: &[Scalar]) -> Poly {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (vec![i], c.clone())).collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out: Poly = BTreeMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            m.extend(mb);
            m.sort();
            let e = out.entry(m).or_insert_with(|| ca.field().zero());
            *e += &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}
