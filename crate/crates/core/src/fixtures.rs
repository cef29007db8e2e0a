//! Bundled instances.

use thiserror::Error;

use crate::group::{close_group, GroupData, GroupError, GroupAlgebraElement, DEFAULT_GROUP_CAP};
use crate::params::{DeformationPresentation, ParamError, Parameters, PolyParameterSet};
use crate::quadratic::QuadraticPresentation;
use crate::scalars::{FieldError, FieldSpec, Matrix};
use crate::sparse::Sparse;

pub const FIXTURE_NAMES: &[&str] = &[
    "example-6-1",
    "example-6-2",
    "symmetric-trivial",
    "quantum-plane-trivial",
    "nonmodular-untwist-demo",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("fixture `{name}` does not take a prime")]
    NoPrime { name: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// `prime` applies to the two shear fixtures (default 3).
pub fn fixture(name: &str, prime: Option<u64>) -> Result<DeformationPresentation, FixtureError> {
    let p = prime.unwrap_or(3);
    let takes_prime = matches!(name, "example-6-1" | "example-6-2");
    if prime.is_some() && !takes_prime {
        return Err(FixtureError::NoPrime { name: name.into() });
    }
    match name {
        "example-6-1" => translated_shear(p),
        "example-6-2" => shear_plane(p),
        "symmetric-trivial" => symmetric_trivial(),
        "quantum-plane-trivial" => quantum_plane_trivial(),
        "nonmodular-untwist-demo" => nonmodular_demo(),
        other => Err(FixtureError::Unknown(other.into())),
    }
}

fn powers(group: &GroupData) -> Vec<usize> {
    let g = group.generator_index(0);
    let mut out = vec![group.identity()];
    while out.len() < group.order() {
        out.push(group.mult(*out.last().unwrap(), g));
    }
    out
}

fn mono(field: FieldSpec, g: usize, c: i64) -> GroupAlgebraElement {
    let mut x = Sparse::new();
    x.add_term(g, field.from_i64(c));
    x
}

/// `V = k^3` over `F_p`, `G = <g>` with `g v_3 = v_1 + v_3`,
/// `lambda(g^i, v_3) = i g^(i-1)`, `kappa^C(v_1, v_3) = g`, `kappa^L(v_1, v_3) = v_2`.
/// Basis indices are 0-based in code.
pub fn translated_shear(p: u64) -> Result<DeformationPresentation, FixtureError> {
    let field = FieldSpec::prime(p)?;
    let g = Matrix::from_i64_rows(field, &[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]);
    let group = close_group(field, 3, &[g], DEFAULT_GROUP_CAP)?;
    let pw = powers(&group);
    let mut params = PolyParameterSet::zero(group.order(), 3);
    for (i, &gi) in pw.iter().enumerate().skip(1) {
        params.lambda[gi][2] = mono(field, pw[i - 1], i as i64);
    }
    params.set_kappa_c(0, 2, mono(field, pw[1], 1));
    params.set_kappa_l(0, 2, group.vkg_from_vector(&crate::scalars::unit_vector(field, 3, 1), 0));
    let quad = QuadraticPresentation::symmetric(field, 3);
    Ok(DeformationPresentation::new(group, quad, Parameters::Poly(params))?)
}

/// `lambda(g^i, w)` for the shear plane: zero for `i < 2`, `C(i, 2) g^i` otherwise.
pub fn shear_plane_lambda_w(i: u64) -> u64 {
    if i < 2 {
        0
    } else {
        i * (i - 1) / 2
    }
}

/// `V = k^2 = <v, w>` over `F_p`, `G = <g>` with `g w = v + w`,
/// `lambda(g^i, v) = i g^i`, `lambda(g^i, w) = C(i, 2) g^i`, `kappa = 0`.
pub fn shear_plane(p: u64) -> Result<DeformationPresentation, FixtureError> {
    let field = FieldSpec::prime(p)?;
    let g = Matrix::from_i64_rows(field, &[&[1, 1], &[0, 1]]);
    let group = close_group(field, 2, &[g], DEFAULT_GROUP_CAP)?;
    let pw = powers(&group);
    let mut params = PolyParameterSet::zero(group.order(), 2);
    for (i, &gi) in pw.iter().enumerate().skip(1) {
        params.lambda[gi][0] = mono(field, gi, i as i64);
        let c = shear_plane_lambda_w(i as u64);
        if c % p != 0 {
            params.lambda[gi][1] = mono(field, gi, c as i64);
        }
    }
    let quad = QuadraticPresentation::symmetric(field, 2);
    Ok(DeformationPresentation::new(group, quad, Parameters::Poly(params))?)
}

pub fn symmetric_trivial() -> Result<DeformationPresentation, FixtureError> {
    let field = FieldSpec::prime(5)?;
    let group = GroupData::trivial(field, 3);
    let quad = QuadraticPresentation::symmetric(field, 3);
    Ok(DeformationPresentation::new(
        group,
        quad,
        Parameters::Poly(PolyParameterSet::zero(1, 3)),
    )?)
}

/// `v_1 v_0 = 2 v_0 v_1` over `Q`, trivial group and parameters.
pub fn quantum_plane_trivial() -> Result<DeformationPresentation, FixtureError> {
    let field = FieldSpec::rational();
    let group = GroupData::trivial(field, 2);
    let q = vec![vec![field.zero(), field.from_i64(2)], vec![field.zero(), field.zero()]];
    let quad = QuadraticPresentation::skew_polynomial(field, 2, &q);
    let params = crate::params::ParameterSet::zero(1, 2, quad.r_dim());
    Ok(DeformationPresentation::new(group, quad, Parameters::General(params))?)
}

/// `G = {1, -I}` on `Q^2`, `lambda(g, v_0) = g`, `lambda(g, v_1) = 2g`,
/// `kappa^C(v_0, v_1) = 1`.
pub fn nonmodular_demo() -> Result<DeformationPresentation, FixtureError> {
    let field = FieldSpec::rational();
    let g = Matrix::from_i64_rows(field, &[&[-1, 0], &[0, -1]]);
    let group = close_group(field, 2, &[g], DEFAULT_GROUP_CAP)?;
    let gi = group.generator_index(0);
    let mut params = PolyParameterSet::zero(2, 2);
    params.lambda[gi][0] = mono(field, gi, 1);
    params.lambda[gi][1] = mono(field, gi, 2);
    params.set_kappa_c(0, 1, mono(field, 0, 1));
    let quad = QuadraticPresentation::symmetric(field, 2);
    Ok(DeformationPresentation::new(group, quad, Parameters::Poly(params))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diamond::diamond_check;
    use crate::pbwcheck::{check_bg_general, check_bg_poly};

    #[test]
    fn all_fixtures_build() {
        for name in FIXTURE_NAMES {
            fixture(name, None).unwrap();
        }
        assert!(matches!(fixture("nope", None), Err(FixtureError::Unknown(_))));
        assert!(matches!(
            fixture("symmetric-trivial", Some(5)),
            Err(FixtureError::NoPrime { .. })
        ));
    }

    #[test]
    fn shear_fixtures_are_pbw() {
        for p in [3, 5, 7] {
            for d in [translated_shear(p).unwrap(), shear_plane(p).unwrap()] {
                let poly = check_bg_poly(&d).unwrap();
                assert!(poly.pbw, "{poly:?}");
                assert!(check_bg_general(&d).unwrap().pbw);
                let dia = diamond_check(&d).unwrap();
                assert!(dia.pbw, "{:?}", dia.failures);
            }
        }
    }

    #[test]
    fn demo_is_pbw() {
        let d = nonmodular_demo().unwrap();
        assert!(check_bg_poly(&d).unwrap().pbw);
        assert!(diamond_check(&d).unwrap().pbw);
    }

    fn poly_mut(d: &DeformationPresentation, f: impl FnOnce(&mut PolyParameterSet)) -> DeformationPresentation {
        let mut p = d.poly_params().unwrap();
        f(&mut p);
        DeformationPresentation::new(d.group.clone(), d.quadratic.clone(), Parameters::Poly(p)).unwrap()
    }

    #[test]
    fn perturbed_shear_plane_fails_condition_one() {
        let d = shear_plane(3).unwrap();
        let g = d.group.generator_index(0);
        let bad = poly_mut(&d, |p| p.lambda[g][1] = mono(d.field, g, 1));
        let rep = check_bg_poly(&bad).unwrap();
        assert!(!rep.pbw);
        assert!(!rep.condition("1").unwrap().passed());
        let dia = diamond_check(&bad).unwrap();
        assert!(!dia.pbw);
        assert!(dia.failures_by_condition().contains_key("1"));
    }

    /// `lambda(g^i, v_3) = i g^i` still satisfies the cocycle recurrence, so it
    /// stays PBW; doubling `lambda(g, v_3)` alone breaks the recurrence.
    #[test]
    fn shifted_lambda_versus_broken_cocycle() {
        use crate::diamond::{brute_force_filtered_dim, cumulative_graded_dims};
        for p in [3, 5] {
            let d = translated_shear(p).unwrap();
            let pw = powers(&d.group);
            let shifted = poly_mut(&d, |par| {
                for (i, &gi) in pw.iter().enumerate().skip(1) {
                    par.lambda[gi][2] = mono(d.field, gi, i as i64);
                }
            });
            assert!(diamond_check(&shifted).unwrap().pbw);
            assert!(check_bg_poly(&shifted).unwrap().pbw);
            assert!(check_bg_general(&shifted).unwrap().pbw);
            let pbw_dims = cumulative_graded_dims(&d.quadratic, &d.group, 2);
            if p == 3 {
                assert_eq!(brute_force_filtered_dim(&shifted, 2, 3).unwrap(), pbw_dims);
            }

            let broken = poly_mut(&d, |par| par.lambda[pw[1]][2] = mono(d.field, pw[0], 2));
            let dia = diamond_check(&broken).unwrap();
            assert!(!dia.pbw);
            assert!(dia.failures_by_condition().contains_key("1"));
            let rep = check_bg_poly(&broken).unwrap();
            assert!(!rep.condition("1").unwrap().passed());
            assert!(!check_bg_general(&broken).unwrap().pbw);
            if p == 3 {
                let bf = brute_force_filtered_dim(&broken, 2, 3).unwrap();
                assert!(bf.iter().zip(&pbw_dims).any(|(a, b)| a < b));
            }
        }
    }
}
