//! Nonmodular untwisting: when `char k` does not divide `|G|`, a deformation
//! `H_{lambda,kappa}` of `S(V) # G` is isomorphic to some `H_{0,kappa'}` via
//! `f: v -> v + gamma(v), g -> g`. In the modular case a degree argument shows
//! no such isomorphism exists for suitable `lambda`; [`modular_counterexample_probe`]
//! carries out that argument on a given instance.

use thiserror::Error;

use crate::diamond::{build_rewrite_system, diamond_check, DiamondError, DiamondReport};
use crate::group::{GroupAlgebraElement, VkGElement};
use crate::params::{
    lambda_extended_basis, lambda_on_vector, DeformationPresentation, ParamError, Parameters,
    PolyParameterSet,
};
use crate::pbwcheck::{check_bg_poly, CheckError, CheckReport};
use crate::quadratic::{
    format_smash, free_from_ga, free_from_vector, free_mul, smash_to_ga, FreeElement, RewriteError, Rewriter,
    SmashElement, Word,
};
use crate::scalars::{kernel_basis, unit_vector, Matrix, Scalar, Vector};
use crate::sparse::Sparse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UntwistError {
    #[error("characteristic {characteristic} divides the group order {order}; the averaging map does not exist")]
    ModularObstruction { characteristic: u64, order: usize },
    #[error("untwisting needs S = S(V)")]
    NotSymmetricAlgebra,
    #[error("the input deformation is not PBW")]
    InputNotPbw,
    #[error("relation {relation} is not mapped to zero: image {image}")]
    RelationNotInKernel { relation: String, image: String },
    #[error("the untwisted algebra fails the PBW {decider} check")]
    TargetNotPbw { decider: String },
    #[error("characteristic does not divide the group order; the setting is not modular")]
    NotModular,
    #[error("the probe's degree argument needs an abelian group")]
    GroupNotAbelian,
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Diamond(#[from] DiamondError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UntwistResult {
    /// `gamma[i] = gamma(v_i (x) 1)`.
    pub gamma: Vec<GroupAlgebraElement>,
    /// Parameters of `H_{0,kappa'}` (lambda identically zero).
    pub kappa_prime: PolyParameterSet,
}

impl UntwistResult {
    /// `f(v_i) = v_i + gamma(v_i)`.
    pub fn image_of_basis(&self, field: crate::scalars::FieldSpec, dim: usize, i: usize) -> FreeElement {
        let mut out = free_from_vector(&unit_vector(field, dim, i));
        out.add_assign(&free_from_ga(&self.gamma[i]));
        out
    }
}

fn require_nonmodular(d: &DeformationPresentation) -> Result<Scalar, UntwistError> {
    let order = d.group.order();
    d.field
        .inverse_of_count(order)
        .ok_or(UntwistError::ModularObstruction {
            characteristic: d.field.characteristic(),
            order,
        })
}

/// `gamma(v) = (1/|G|) sum_{a,b} lambda_{ab}(b, b^-1.v) a`, on basis vectors.
pub fn compute_gamma(d: &DeformationPresentation) -> Result<Vec<GroupAlgebraElement>, UntwistError> {
    if !d.quadratic.is_symmetric_algebra() {
        return Err(UntwistError::NotSymmetricAlgebra);
    }
    let inv = require_nonmodular(d)?;
    let group = &d.group;
    let lambda = d.lambda();
    let n = d.dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = unit_vector(d.field, n, i);
        let mut gamma: GroupAlgebraElement = Sparse::new();
        for b in 0..group.order() {
            let bv = group.act(group.inverse(b), &v);
            let lam = lambda_on_vector(lambda, b, &bv);
            for a in 0..group.order() {
                if let Some(c) = lam.coeff(&group.mult(a, b)) {
                    gamma.add_term(a, c * &inv);
                }
            }
        }
        out.push(gamma);
    }
    Ok(out)
}

fn gamma_of_vector(gamma: &[GroupAlgebraElement], v: &[Scalar]) -> GroupAlgebraElement {
    let mut out = Sparse::new();
    for (i, c) in v.iter().enumerate() {
        out.add_scaled(&gamma[i], c);
    }
    out
}

/// `gamma` extended right kG-linearly to V (x) kG.
fn gamma_of_vkg(
    d: &DeformationPresentation,
    gamma: &[GroupAlgebraElement],
    x: &VkGElement,
) -> GroupAlgebraElement {
    let mut out = Sparse::new();
    for (&(i, h), c) in x {
        out.add_scaled(&d.group.ga_mul(&gamma[i], &d.group.ga_basis(h)), c);
    }
    out
}

/// `kappa'^L(u, v) = (1/|G|) sum_g (g.kappa^L)(u, v)` and
/// `kappa'^C(u, v) = [gamma(u), gamma(v)] + lambda(gamma(u), v) - lambda(gamma(v), u)
///   + kappa^C(u, v) - gamma(kappa'^L(u, v))`.
pub fn compute_kappa_prime(
    d: &DeformationPresentation,
    gamma: &[GroupAlgebraElement],
) -> Result<PolyParameterSet, UntwistError> {
    let inv = require_nonmodular(d)?;
    let kp = d.poly_params()?;
    let group = &d.group;
    let n = d.dim();
    let mut out = PolyParameterSet::zero(group.order(), n);
    for i in 0..n {
        for j in i + 1..n {
            let (u, v) = (unit_vector(d.field, n, i), unit_vector(d.field, n, j));
            let mut avg: VkGElement = Sparse::new();
            for g in 0..group.order() {
                let gi = group.inverse(g);
                let inner = kp.kappa_l_vec(&group.act(gi, &u), &group.act(gi, &v));
                avg.add_scaled(&group.conj_vkg(g, &inner), &inv);
            }
            let (gu, gv) = (&gamma[i], &gamma[j]);
            let mut c = &group.ga_mul(gu, gv) - &group.ga_mul(gv, gu);
            c.add_assign(&lambda_extended_basis(&kp.lambda, gu, j));
            c.sub_assign(&lambda_extended_basis(&kp.lambda, gv, i));
            c.add_assign(&kp.kappa_c_basis(i, j));
            c.sub_assign(&gamma_of_vkg(d, gamma, &avg));
            if !c.is_zero() {
                out.kappa_c.insert((i, j), c);
            }
            if !avg.is_zero() {
                out.kappa_l.insert((i, j), avg);
            }
        }
    }
    Ok(out)
}

pub fn untwist(d: &DeformationPresentation) -> Result<UntwistResult, UntwistError> {
    let gamma = compute_gamma(d)?;
    let kappa_prime = compute_kappa_prime(d, &gamma)?;
    Ok(UntwistResult { gamma, kappa_prime })
}

/// The deformation `H_{0,kappa'}` on the same group and algebra.
pub fn untwisted_presentation(
    d: &DeformationPresentation,
    u: &UntwistResult,
) -> Result<DeformationPresentation, UntwistError> {
    Ok(DeformationPresentation::new(
        d.group.clone(),
        d.quadratic.clone(),
        Parameters::Poly(u.kappa_prime.clone()),
    )?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UntwistVerification {
    pub relations_checked: usize,
    pub target_poly: CheckReport,
    pub target_diamond: DiamondReport,
}

/// Maps every defining relation of `H_{0,kappa'}` through `f` and reduces it
/// in `H_{lambda,kappa}`; all images must vanish. Then checks that
/// `H_{0,kappa'}` passes both deciders.
pub fn verify_untwist(
    d: &DeformationPresentation,
    u: &UntwistResult,
) -> Result<UntwistVerification, UntwistError> {
    if !diamond_check(d)?.pbw {
        return Err(UntwistError::InputNotPbw);
    }
    let frs = build_rewrite_system(d)?;
    let rw = &frs.rewriter;
    let group = &d.group;
    let field = d.field;
    let n = d.dim();
    let f_vec = |v: &[Scalar]| -> FreeElement {
        let mut x = free_from_vector(v);
        x.add_assign(&free_from_ga(&gamma_of_vector(&u.gamma, v)));
        x
    };
    let f_vkg = |x: &VkGElement| -> FreeElement {
        let mut out = Sparse::new();
        for (&(i, h), c) in x {
            let img = free_mul(
                group,
                &f_vec(&unit_vector(field, n, i)),
                &Sparse::monomial(Word::group(h), field.one()),
            );
            out.add_scaled(&img, c);
        }
        out
    };
    let mut checked = 0;
    let fail = |relation: String, image: &SmashElement| UntwistError::RelationNotInKernel {
        relation,
        image: format_smash(image, group),
    };
    for g in 1..group.order() {
        let gw: FreeElement = Sparse::monomial(Word::group(g), field.one());
        for i in 0..n {
            let v = unit_vector(field, n, i);
            // f(g v - g.v g)
            let mut x = free_mul(group, &gw, &f_vec(&v));
            x.sub_assign(&free_mul(group, &f_vec(&group.act(g, &v)), &gw));
            let image = rw.normal_form(&x)?;
            checked += 1;
            if !image.is_zero() {
                return Err(fail(format!("{}*v{i} - {}.v{i}*{}", group.name(g), group.name(g), group.name(g)), &image));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let fu = f_vec(&unit_vector(field, n, i));
            let fv = f_vec(&unit_vector(field, n, j));
            // f(u v - v u - kappa'(u, v))
            let mut x = &free_mul(group, &fu, &fv) - &free_mul(group, &fv, &fu);
            x.sub_assign(&f_vkg(&u.kappa_prime.kappa_l_basis(i, j)));
            x.sub_assign(&free_from_ga(&u.kappa_prime.kappa_c_basis(i, j)));
            let image = rw.normal_form(&x)?;
            checked += 1;
            if !image.is_zero() {
                return Err(fail(format!("v{i}*v{j} - v{j}*v{i} - kappa'(v{i}, v{j})"), &image));
            }
        }
    }
    let target = untwisted_presentation(d, u)?;
    let target_poly = check_bg_poly(&target)?;
    if !target_poly.pbw {
        return Err(UntwistError::TargetNotPbw {
            decider: "condition".into(),
        });
    }
    let target_diamond = diamond_check(&target)?;
    if !target_diamond.pbw {
        return Err(UntwistError::TargetNotPbw {
            decider: "overlap".into(),
        });
    }
    Ok(UntwistVerification {
        relations_checked: checked,
        target_poly,
        target_diamond,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    /// Group element `g` and fixed vector `v` with `g.v = v`, `lambda(g, v) != 0`.
    pub witness: Option<(usize, Vector)>,
    pub lambda_value: GroupAlgebraElement,
    /// Number of products `k e - e k` (k in G, e a basis element of
    /// kG + V (x) kG) whose degree-0 part was computed.
    pub commutators_checked: usize,
    /// All those degree-0 parts vanish.
    pub degree_zero_vanishes: bool,
    pub certified: bool,
}

/// Degree argument against an isomorphism `H_{lambda,0} -> H_{0,kappa'}` that
/// preserves the filtration. For `g.v = v`, the relation
/// `g v - v g - lambda(g, v)` maps to `f(g) f(v) - f(v) f(g) - f(lambda(g, v))`.
/// With `f(kG) = kG` and `f(v)` of filtered degree 1, the degree-0 part of the
/// commutator vanishes (checked on a basis), forcing `f(lambda(g, v)) = 0`,
/// which contradicts injectivity since `lambda(g, v) != 0`.
pub fn modular_counterexample_probe(d: &DeformationPresentation) -> Result<ProbeReport, UntwistError> {
    if !d.quadratic.is_symmetric_algebra() {
        return Err(UntwistError::NotSymmetricAlgebra);
    }
    if d.field.inverse_of_count(d.group.order()).is_some() {
        return Err(UntwistError::NotModular);
    }
    let group = &d.group;
    if !group.is_abelian() {
        return Err(UntwistError::GroupNotAbelian);
    }
    let field = d.field;
    let n = d.dim();
    let lambda = d.lambda();
    let mut witness = None;
    let mut lambda_value = Sparse::new();
    'search: for g in 1..group.order() {
        let mut m = group.element(g).clone();
        for i in 0..n {
            let x = m.get(i, i) - &field.one();
            m.set(i, i, x);
        }
        for v in kernel_basis(&m) {
            let lam = lambda_on_vector(lambda, g, &v);
            if !lam.is_zero() {
                witness = Some((g, v));
                lambda_value = lam;
                break 'search;
            }
        }
    }
    // In H_{0,kappa'} products of group elements with kG + V (x) kG never
    // involve two V-letters, so the homogeneous system of S # G computes them.
    let rw = Rewriter::homogeneous(&d.quadratic, group);
    let mut checked = 0;
    let mut vanishes = true;
    let one = field.one();
    for k in 0..group.order() {
        let kw: FreeElement = Sparse::monomial(Word::group(k), one.clone());
        let mut basis: Vec<FreeElement> = (0..group.order())
            .map(|h| Sparse::monomial(Word::group(h), one.clone()))
            .collect();
        for i in 0..n {
            for h in 0..group.order() {
                basis.push(Sparse::monomial(Word::normal(vec![i], h), one.clone()));
            }
        }
        for e in &basis {
            let x = &free_mul(group, &kw, e) - &free_mul(group, e, &kw);
            let nf = rw.normal_form(&x)?;
            checked += 1;
            if !smash_to_ga(&nf).is_zero() {
                vanishes = false;
            }
        }
    }
    Ok(ProbeReport {
        certified: witness.is_some() && vanishes,
        witness,
        lambda_value,
        commutators_checked: checked,
        degree_zero_vanishes: vanishes,
    })
}

/// Matrix of `g - 1`; exposed for tests of the fixed-space search.
pub fn fixed_space(d: &DeformationPresentation, g: usize) -> Vec<Vector> {
    let mut m: Matrix = d.group.element(g).clone();
    for i in 0..d.dim() {
        let x = m.get(i, i) - &d.field.one();
        m.set(i, i, x);
    }
    kernel_basis(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diamond::{brute_force_filtered_dim, cumulative_graded_dims};
    use crate::fixtures::{nonmodular_demo, shear_plane, symmetric_trivial};

    #[test]
    fn demo_untwists() {
        let d = nonmodular_demo().unwrap();
        let u = untwist(&d).unwrap();
        assert!(u.gamma.iter().any(|g| !g.is_zero()));
        assert!(u.kappa_prime.lambda_is_zero());
        let v = verify_untwist(&d, &u).unwrap();
        assert!(v.relations_checked > 0);
        let t = untwisted_presentation(&d, &u).unwrap();
        let pbw = cumulative_graded_dims(&t.quadratic, &t.group, 3);
        assert_eq!(brute_force_filtered_dim(&t, 3, 4).unwrap(), pbw);
        assert_eq!(brute_force_filtered_dim(&d, 3, 4).unwrap(), pbw);
    }

    #[test]
    fn trivial_input_untwists_to_itself() {
        let d = symmetric_trivial().unwrap();
        let u = untwist(&d).unwrap();
        assert!(u.gamma.iter().all(|g| g.is_zero()));
        assert_eq!(u.kappa_prime, d.poly_params().unwrap().normalized());
    }

    #[test]
    fn modular_shear_plane() {
        for p in [3, 5] {
            let d = shear_plane(p).unwrap();
            assert!(matches!(untwist(&d), Err(UntwistError::ModularObstruction { .. })));
            let r = modular_counterexample_probe(&d).unwrap();
            assert!(r.certified, "{r:?}");
            assert_eq!(r.witness.as_ref().unwrap().0, d.group.generator_index(0));
        }
        assert!(matches!(
            modular_counterexample_probe(&nonmodular_demo().unwrap()),
            Err(UntwistError::NotModular)
        ));
    }
}
