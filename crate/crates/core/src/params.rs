//! Deformation parameters: `alpha: R -> V (x) kG`, `beta: R -> kG`,
//! `lambda: kG (x) V -> kG` in general, or `(kappa^C, kappa^L, lambda)` when
//! `S = S(V)`, plus conversion between the two encodings.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::group::{GroupAlgebraElement, GroupData, VkGElement};
use crate::quadratic::{LowerTerms, QuadraticPresentation};
use crate::scalars::{FieldSpec, Scalar};
use crate::sparse::Sparse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("lambda(1, v{0}) must be zero")]
    LambdaOnIdentity(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("vector is not in the relation space R")]
    NotInR,
    #[error("relations are not of the form v_j (x) v_i - v_i (x) v_j; polynomial parameters need S = S(V)")]
    WrongRelationShape,
    #[error("pair ({0}, {1}) must satisfy i < j < dim")]
    BadPair(usize, usize),
}

/// `lambda[g][i] = lambda(g, v_i)`.
pub type LambdaTable = Vec<Vec<GroupAlgebraElement>>;

/// General parameters, `alpha`/`beta` indexed by relation-basis position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSet {
    pub alpha: Vec<VkGElement>,
    pub beta: Vec<GroupAlgebraElement>,
    pub lambda: LambdaTable,
}

fn check_lambda(lambda: &LambdaTable, group: &GroupData, dim: usize) -> Result<(), ParamError> {
    if lambda.len() != group.order() || lambda.iter().any(|row| row.len() != dim) {
        return Err(ParamError::Shape(format!(
            "lambda must be a {} x {dim} table",
            group.order()
        )));
    }
    for (i, x) in lambda[0].iter().enumerate() {
        if !x.is_zero() {
            return Err(ParamError::LambdaOnIdentity(i));
        }
    }
    for row in lambda {
        for x in row {
            if x.keys().any(|&h| h >= group.order()) {
                return Err(ParamError::Shape("lambda value has a bad group index".into()));
            }
        }
    }
    Ok(())
}

fn check_vkg(x: &VkGElement, group: &GroupData, dim: usize, what: &str) -> Result<(), ParamError> {
    if x.keys().any(|&(i, h)| i >= dim || h >= group.order()) {
        return Err(ParamError::Shape(format!("{what} has an index out of range")));
    }
    Ok(())
}

fn check_ga(x: &GroupAlgebraElement, group: &GroupData, what: &str) -> Result<(), ParamError> {
    if x.keys().any(|&h| h >= group.order()) {
        return Err(ParamError::Shape(format!("{what} has a bad group index")));
    }
    Ok(())
}

pub fn zero_lambda(group_order: usize, dim: usize) -> LambdaTable {
    vec![vec![Sparse::new(); dim]; group_order]
}

impl ParameterSet {
    pub fn zero(group_order: usize, dim: usize, r_dim: usize) -> Self {
        ParameterSet {
            alpha: vec![Sparse::new(); r_dim],
            beta: vec![Sparse::new(); r_dim],
            lambda: zero_lambda(group_order, dim),
        }
    }

    pub fn validate(&self, group: &GroupData, pres: &QuadraticPresentation) -> Result<(), ParamError> {
        let m = pres.r_dim();
        if self.alpha.len() != m || self.beta.len() != m {
            return Err(ParamError::Shape(format!(
                "alpha and beta need {m} entries, one per relation"
            )));
        }
        for a in &self.alpha {
            check_vkg(a, group, pres.dim(), "alpha")?;
        }
        for b in &self.beta {
            check_ga(b, group, "beta")?;
        }
        check_lambda(&self.lambda, group, pres.dim())
    }

    pub fn lambda_is_zero(&self) -> bool {
        self.lambda.iter().flatten().all(Sparse::is_zero)
    }

    /// Transports parameters onto the rewrite rules: rule `k` gets
    /// `alpha(lead - tail)` and `beta(lead - tail)`.
    pub fn lower_terms(&self, pres: &QuadraticPresentation) -> LowerTerms {
        let mut lower = LowerTerms::zero(self.lambda.len(), pres.dim(), pres.rules().len());
        lower.lambda = self.lambda.clone();
        for (k, rule) in pres.rules().iter().enumerate() {
            for (rho, c) in rule.relation_coords.iter().enumerate() {
                lower.rule_alpha[k].add_scaled(&self.alpha[rho], c);
                lower.rule_beta[k].add_scaled(&self.beta[rho], c);
            }
        }
        lower
    }
}

/// `alpha(r)` for `r` in R, by linearity over the relation basis.
pub fn alpha_on_r_element(
    p: &ParameterSet,
    pres: &QuadraticPresentation,
    r: &[Scalar],
) -> Result<VkGElement, ParamError> {
    let coords = pres.r_coordinates(r).ok_or(ParamError::NotInR)?;
    let mut out = Sparse::new();
    for (c, a) in coords.iter().zip(&p.alpha) {
        out.add_scaled(a, c);
    }
    Ok(out)
}

pub fn beta_on_r_element(
    p: &ParameterSet,
    pres: &QuadraticPresentation,
    r: &[Scalar],
) -> Result<GroupAlgebraElement, ParamError> {
    let coords = pres.r_coordinates(r).ok_or(ParamError::NotInR)?;
    let mut out = Sparse::new();
    for (c, b) in coords.iter().zip(&p.beta) {
        out.add_scaled(b, c);
    }
    Ok(out)
}

/// `lambda(g, v)` for a coordinate vector `v`.
pub fn lambda_on_vector(lambda: &LambdaTable, g: usize, v: &[Scalar]) -> GroupAlgebraElement {
    let mut out = Sparse::new();
    for (i, c) in v.iter().enumerate() {
        out.add_scaled(&lambda[g][i], c);
    }
    out
}

/// `lambda(x, v)` extended bilinearly to `x` in kG.
pub fn lambda_extended(lambda: &LambdaTable, x: &GroupAlgebraElement, v: &[Scalar]) -> GroupAlgebraElement {
    let mut out = Sparse::new();
    for (&g, c) in x {
        out.add_scaled(&lambda_on_vector(lambda, g, v), c);
    }
    out
}

/// `lambda(x, v_i)` for a basis vector.
pub fn lambda_extended_basis(lambda: &LambdaTable, x: &GroupAlgebraElement, i: usize) -> GroupAlgebraElement {
    let mut out = Sparse::new();
    for (&g, c) in x {
        out.add_scaled(&lambda[g][i], c);
    }
    out
}

/// Polynomial-case parameters. `kappa_*` store only pairs `(i, j)` with `i < j`;
/// the rest follows by antisymmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyParameterSet {
    pub kappa_c: BTreeMap<(usize, usize), GroupAlgebraElement>,
    pub kappa_l: BTreeMap<(usize, usize), VkGElement>,
    pub lambda: LambdaTable,
}

impl PolyParameterSet {
    pub fn zero(group_order: usize, dim: usize) -> Self {
        PolyParameterSet {
            kappa_c: BTreeMap::new(),
            kappa_l: BTreeMap::new(),
            lambda: zero_lambda(group_order, dim),
        }
    }

    pub fn validate(&self, group: &GroupData, dim: usize) -> Result<(), ParamError> {
        for (&(i, j), x) in &self.kappa_c {
            if i >= j || j >= dim {
                return Err(ParamError::BadPair(i, j));
            }
            check_ga(x, group, "kappa_c")?;
        }
        for (&(i, j), x) in &self.kappa_l {
            if i >= j || j >= dim {
                return Err(ParamError::BadPair(i, j));
            }
            check_vkg(x, group, dim, "kappa_l")?;
        }
        check_lambda(&self.lambda, group, dim)
    }

    /// Drops zero entries so that equal parameter sets compare equal.
    pub fn normalized(mut self) -> Self {
        self.kappa_c.retain(|_, x| !x.is_zero());
        self.kappa_l.retain(|_, x| !x.is_zero());
        self
    }

    pub fn set_kappa_c(&mut self, i: usize, j: usize, x: GroupAlgebraElement) {
        if i < j {
            self.kappa_c.insert((i, j), x);
        } else if i > j {
            self.kappa_c.insert((j, i), -&x);
        }
    }

    pub fn set_kappa_l(&mut self, i: usize, j: usize, x: VkGElement) {
        if i < j {
            self.kappa_l.insert((i, j), x);
        } else if i > j {
            self.kappa_l.insert((j, i), -&x);
        }
    }

    /// `kappa^C(v_i, v_j)`.
    pub fn kappa_c_basis(&self, i: usize, j: usize) -> GroupAlgebraElement {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.kappa_c.get(&(i, j)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => -&self.kappa_c.get(&(j, i)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Equal => Sparse::new(),
        }
    }

    /// `kappa^L(v_i, v_j)`.
    pub fn kappa_l_basis(&self, i: usize, j: usize) -> VkGElement {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.kappa_l.get(&(i, j)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => -&self.kappa_l.get(&(j, i)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Equal => Sparse::new(),
        }
    }

    pub fn kappa_c_vec(&self, u: &[Scalar], v: &[Scalar]) -> GroupAlgebraElement {
        let mut out = Sparse::new();
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if !b.is_zero() && i != j {
                    out.add_scaled(&self.kappa_c_basis(i, j), &(a * b));
                }
            }
        }
        out
    }

    pub fn kappa_l_vec(&self, u: &[Scalar], v: &[Scalar]) -> VkGElement {
        let mut out = Sparse::new();
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if !b.is_zero() && i != j {
                    out.add_scaled(&self.kappa_l_basis(i, j), &(a * b));
                }
            }
        }
        out
    }

    pub fn lambda_is_zero(&self) -> bool {
        self.lambda.iter().flatten().all(Sparse::is_zero)
    }
}

/// Expresses an antisymmetric tensor `r` as `sum_{a<b} r_ba (v_b (x) v_a - v_a (x) v_b)`.
fn antisymmetric_pairs(dim: usize, r: &[Scalar]) -> Result<Vec<(usize, usize, Scalar)>, ParamError> {
    let mut out = Vec::new();
    for a in 0..dim {
        if !r[a * dim + a].is_zero() {
            return Err(ParamError::WrongRelationShape);
        }
        for b in a + 1..dim {
            if !(&r[a * dim + b] + &r[b * dim + a]).is_zero() {
                return Err(ParamError::WrongRelationShape);
            }
            if !r[b * dim + a].is_zero() {
                out.push((a, b, r[b * dim + a].clone()));
            }
        }
    }
    Ok(out)
}

/// `alpha(v_j (x) v_i - v_i (x) v_j) = kappa^L(v_j, v_i)` and likewise for `beta`,
/// extended linearly to whatever antisymmetric basis the presentation uses.
pub fn poly_to_general(p: &PolyParameterSet, pres: &QuadraticPresentation) -> Result<ParameterSet, ParamError> {
    if !pres.is_symmetric_algebra() {
        return Err(ParamError::WrongRelationShape);
    }
    let n = pres.dim();
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for r in pres.r_basis() {
        let mut a = Sparse::new();
        let mut b = Sparse::new();
        for (i, j, c) in antisymmetric_pairs(n, r)? {
            a.add_scaled(&p.kappa_l_basis(j, i), &c);
            b.add_scaled(&p.kappa_c_basis(j, i), &c);
        }
        alpha.push(a);
        beta.push(b);
    }
    Ok(ParameterSet {
        alpha,
        beta,
        lambda: p.lambda.clone(),
    })
}

/// Inverse of [`poly_to_general`].
pub fn general_to_poly(p: &ParameterSet, pres: &QuadraticPresentation) -> Result<PolyParameterSet, ParamError> {
    if !pres.is_symmetric_algebra() {
        return Err(ParamError::WrongRelationShape);
    }
    let n = pres.dim();
    let field = pres.field();
    let mut out = PolyParameterSet {
        kappa_c: BTreeMap::new(),
        kappa_l: BTreeMap::new(),
        lambda: p.lambda.clone(),
    };
    for i in 0..n {
        for j in i + 1..n {
            // kappa(v_i, v_j) = -kappa(v_j, v_i) = -alpha(v_j (x) v_i - v_i (x) v_j)
            let mut r = vec![field.zero(); n * n];
            r[j * n + i] = field.one();
            r[i * n + j] = -field.one();
            let a = alpha_on_r_element(p, pres, &r)?;
            let b = beta_on_r_element(p, pres, &r)?;
            if !a.is_zero() {
                out.kappa_l.insert((i, j), -&a);
            }
            if !b.is_zero() {
                out.kappa_c.insert((i, j), -&b);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parameters {
    General(ParameterSet),
    Poly(PolyParameterSet),
}

/// Field, group, quadratic algebra and parameters of one filtered algebra.
#[derive(Debug, Clone)]
pub struct DeformationPresentation {
    pub field: FieldSpec,
    pub group: GroupData,
    pub quadratic: QuadraticPresentation,
    pub params: Parameters,
}

impl DeformationPresentation {
    pub fn new(
        group: GroupData,
        quadratic: QuadraticPresentation,
        params: Parameters,
    ) -> Result<Self, ParamError> {
        let field = quadratic.field();
        if group.field() != field || group.dim() != quadratic.dim() {
            return Err(ParamError::Shape(
                "group and algebra disagree on field or dimension".into(),
            ));
        }
        match &params {
            Parameters::General(p) => p.validate(&group, &quadratic)?,
            Parameters::Poly(p) => {
                if !quadratic.is_symmetric_algebra() {
                    return Err(ParamError::WrongRelationShape);
                }
                p.validate(&group, quadratic.dim())?
            }
        }
        Ok(DeformationPresentation {
            field,
            group,
            quadratic,
            params,
        })
    }

    pub fn dim(&self) -> usize {
        self.quadratic.dim()
    }

    /// Parameters in the general encoding (converting polynomial ones).
    pub fn general_params(&self) -> Result<ParameterSet, ParamError> {
        match &self.params {
            Parameters::General(p) => Ok(p.clone()),
            Parameters::Poly(p) => poly_to_general(p, &self.quadratic),
        }
    }

    /// Parameters in the polynomial encoding, when S = S(V).
    pub fn poly_params(&self) -> Result<PolyParameterSet, ParamError> {
        match &self.params {
            Parameters::Poly(p) => Ok(p.clone()),
            Parameters::General(p) => general_to_poly(p, &self.quadratic),
        }
    }

    pub fn lambda(&self) -> &LambdaTable {
        match &self.params {
            Parameters::General(p) => &p.lambda,
            Parameters::Poly(p) => &p.lambda,
        }
    }

    pub fn lambda_is_zero(&self) -> bool {
        self.lambda().iter().flatten().all(Sparse::is_zero)
    }

    pub fn lower_terms(&self) -> Result<LowerTerms, ParamError> {
        Ok(self.general_params()?.lower_terms(&self.quadratic))
    }

    /// Same algebra and group with all parameters zero.
    pub fn homogeneous(&self) -> Self {
        DeformationPresentation {
            field: self.field,
            group: self.group.clone(),
            quadratic: self.quadratic.clone(),
            params: Parameters::General(ParameterSet::zero(
                self.group.order(),
                self.dim(),
                self.quadratic.r_dim(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::close_group;
    use crate::scalars::Matrix;

    fn example_6_1(p: u64) -> (GroupData, QuadraticPresentation, PolyParameterSet) {
        let f = FieldSpec::prime(p).unwrap();
        let g = close_group(
            f,
            3,
            &[Matrix::from_i64_rows(f, &[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]])],
            64,
        )
        .unwrap();
        let pres = QuadraticPresentation::symmetric(f, 3);
        let mut pp = PolyParameterSet::zero(g.order(), 3);
        for i in 1..g.order() {
            let gi = g.parse_word(&format!("g0^{i}")).unwrap();
            let gim1 = g.parse_word(&format!("g0^{}", i - 1)).unwrap();
            pp.lambda[gi][2] = Sparse::monomial(gim1, f.from_i64(i as i64));
        }
        pp.kappa_c.insert((0, 2), g.ga_basis(1));
        pp.kappa_l.insert((0, 2), Sparse::monomial((1, 0), f.one()));
        (g, pres, pp)
    }

    #[test]
    fn example_translation_signs() {
        let (g, pres, pp) = example_6_1(5);
        let gen = poly_to_general(&pp, &pres).unwrap();
        // relation index of v3 (x) v1 - v1 (x) v3 is the pair (0, 2)
        let k = crate::quadratic::symmetric_pair_index(3, 0, 2);
        let f = pres.field();
        assert_eq!(gen.beta[k], Sparse::monomial(1, -f.one()));
        assert_eq!(gen.alpha[k], Sparse::monomial((1, 0), -f.one()));
        let back = general_to_poly(&gen, &pres).unwrap();
        assert_eq!(back, pp);
        DeformationPresentation::new(g, pres, Parameters::Poly(pp)).unwrap();
    }

    #[test]
    fn alpha_linearity() {
        let f = FieldSpec::Rational;
        let pres = QuadraticPresentation::symmetric(f, 3);
        let mut p = ParameterSet::zero(1, 3, 3);
        p.alpha[0] = Sparse::monomial((0, 0), f.one());
        p.alpha[1] = Sparse::monomial((2, 0), f.from_i64(3));
        assert!(alpha_on_r_element(&p, &pres, &vec![f.zero(); 9]).unwrap().is_zero());
        assert_eq!(alpha_on_r_element(&p, &pres, &pres.r_basis()[0]).unwrap(), p.alpha[0]);
        let r: Vec<Scalar> = pres.r_basis()[0]
            .iter()
            .zip(&pres.r_basis()[1])
            .map(|(a, b)| &(a * &f.from_i64(2)) - b)
            .collect();
        let expected = &p.alpha[0].scale(&f.from_i64(2)) - &p.alpha[1];
        assert_eq!(alpha_on_r_element(&p, &pres, &r).unwrap(), expected);
        let mut not_r = vec![f.zero(); 9];
        not_r[0] = f.one();
        assert_eq!(alpha_on_r_element(&p, &pres, &not_r), Err(ParamError::NotInR));
    }

    #[test]
    fn lambda_extension() {
        let (g, _, pp) = example_6_1(3);
        let f = g.field();
        let v3 = vec![f.zero(), f.zero(), f.one()];
        assert!(lambda_extended(&pp.lambda, &Sparse::new(), &v3).is_zero());
        assert!(lambda_extended(&pp.lambda, &g.ga_one(), &v3).is_zero());
        let sum = &g.ga_basis(1) + &g.ga_basis(2);
        assert_eq!(
            lambda_extended(&pp.lambda, &sum, &v3),
            &pp.lambda[1][2] + &pp.lambda[2][2]
        );
    }

    #[test]
    fn identity_lambda_rejected() {
        let (g, pres, mut pp) = example_6_1(3);
        pp.lambda[0][0] = g.ga_one();
        assert_eq!(
            DeformationPresentation::new(g, pres, Parameters::Poly(pp)).unwrap_err(),
            ParamError::LambdaOnIdentity(0)
        );
    }
}
