//! Seeded random instances for the decider-agreement and untwisting harnesses.
//!
//! Parameters come in several flavours: all zero, sparse random, solved so
//! that every explicit condition holds, and single-coordinate mutations of a
//! solved set. Solving uses the fact that, with `lambda` fixed, conditions 3
//! and 6 are affine in `alpha`, and with `alpha` fixed as well, conditions 2, 4
//! and 5 are affine in `beta`; each system is linearized by evaluating the
//! residuals at zero and at unit vectors.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{close_group, GroupData, DEFAULT_GROUP_CAP};
use crate::params::{
    general_to_poly, zero_lambda, DeformationPresentation, ParamError, LambdaTable, ParameterSet, Parameters,
};
use thiserror::Error;

use crate::diamond::{diamond_check, DiamondError};
use crate::pbwcheck::{
    check_bg_general, check_bg_invariant, check_bg_poly, CheckError, ResidualEvaluator,
};
use crate::quadratic::{symmetric_relations, QuadraticPresentation, SmashElement, SmashKey};
use crate::scalars::{solve_affine_sparse, zero_vector, FieldSpec, Matrix, Scalar, Vector};
use crate::sparse::Sparse;

/// Uniform over `F_p`; small integers and halves over `Q`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec) -> Scalar {
    match field {
        FieldSpec::Prime(p) => field.from_i64(rng.gen_range(0..p as i64)),
        FieldSpec::Rational => {
            let n = field.from_i64(rng.gen_range(-3..=3));
            if rng.gen_bool(0.2) {
                n * field.from_i64(2).inv().unwrap()
            } else {
                n
            }
        }
    }
}

pub fn random_nonzero_scalar<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Random invertible matrix: uniform over `F_p`, a product of elementary
/// integer operations over `Q` (keeps entries small).
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec, n: usize) -> Matrix {
    match field {
        FieldSpec::Prime(_) => loop {
            let rows = (0..n)
                .map(|_| (0..n).map(|_| random_scalar(rng, field)).collect())
                .collect();
            let m = Matrix::from_rows(field, n, rows);
            if m.inverse().is_some() {
                return m;
            }
        },
        FieldSpec::Rational => {
            let mut m = Matrix::identity(field, n);
            if n < 2 {
                return m;
            }
            for _ in 0..n + 1 {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                let c = field.from_i64(if rng.gen_bool(0.5) { 1 } else { -1 });
                for col in 0..n {
                    let x = m.get(i, col) + &(&c * m.get(j, col));
                    m.set(i, col, x);
                }
            }
            m
        }
    }
}

fn pad(field: FieldSpec, m: &[&[i64]], dim: usize, extra: i64) -> Matrix {
    let mut out = Matrix::identity(field, dim);
    for (r, row) in m.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            out.set(r, c, field.from_i64(x));
        }
    }
    for k in m.len()..dim {
        out.set(k, k, field.from_i64(extra));
    }
    out
}

const ROT3: &[&[i64]] = &[&[0, -1], &[1, -1]];
const NEG_ROT3: &[&[i64]] = &[&[0, 1], &[-1, 1]];
const SWAP: &[&[i64]] = &[&[0, 1], &[1, 0]];
const NEG: &[&[i64]] = &[&[-1, 0], &[0, -1]];
const REFLECT: &[&[i64]] = &[&[1, 0], &[0, -1]];
const REFLECT2: &[&[i64]] = &[&[-1, 0], &[0, 1]];
const ROT4: &[&[i64]] = &[&[0, -1], &[1, 0]];
const SHEAR: &[&[i64]] = &[&[1, 1], &[0, 1]];

/// Generator lists (as 2x2 blocks) that may produce a group of the given order.
fn candidate_blocks(field: FieldSpec, order: usize) -> Vec<Vec<&'static [&'static [i64]]>> {
    let char3 = field.characteristic() == 3;
    match order {
        1 => vec![vec![]],
        2 => vec![vec![NEG], vec![REFLECT], vec![SWAP]],
        3 if char3 => vec![vec![ROT3], vec![SHEAR]],
        3 => vec![vec![ROT3]],
        4 => vec![vec![ROT4], vec![REFLECT, REFLECT2], vec![NEG, SWAP]],
        6 if char3 => vec![vec![ROT3, SWAP], vec![NEG_ROT3], vec![SHEAR, NEG]],
        6 => vec![vec![ROT3, SWAP], vec![NEG_ROT3]],
        _ => vec![],
    }
}

/// A matrix group of exactly `order` elements acting on `k^dim` (`dim >= 2`),
/// optionally conjugated by a random invertible matrix.
pub fn random_group<R: Rng + ?Sized>(
    rng: &mut R,
    field: FieldSpec,
    dim: usize,
    order: usize,
    conjugate: bool,
) -> Option<GroupData> {
    let mut candidates = candidate_blocks(field, order);
    candidates.shuffle(rng);
    for blocks in candidates {
        for extra in [1, -1] {
            let gens: Vec<Matrix> = blocks.iter().map(|b| pad(field, b, dim, extra)).collect();
            let gens = if conjugate {
                let p = random_invertible(rng, field, dim);
                let pi = p.inverse().expect("invertible");
                gens.iter().map(|g| p.mul(g).mul(&pi)).collect()
            } else {
                gens
            };
            if let Ok(g) = close_group(field, dim, &gens, DEFAULT_GROUP_CAP) {
                if g.order() == order {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// Diagonal sign groups of order 1, 2 or 4.
pub fn random_diagonal_group<R: Rng + ?Sized>(
    rng: &mut R,
    field: FieldSpec,
    dim: usize,
    order: usize,
) -> Option<GroupData> {
    let sign = |rng: &mut R| -> Matrix {
        loop {
            let mut m = Matrix::identity(field, dim);
            for k in 0..dim {
                if rng.gen_bool(0.5) {
                    m.set(k, k, field.from_i64(-1));
                }
            }
            if m != Matrix::identity(field, dim) {
                return m;
            }
        }
    };
    for _ in 0..32 {
        let gens: Vec<Matrix> = (0..order.trailing_zeros()).map(|_| sign(rng)).collect();
        if let Ok(g) = close_group(field, dim, &gens, DEFAULT_GROUP_CAP) {
            if g.order() == order {
                return Some(g);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    /// `S(V)` with the standard relation basis.
    Symmetric,
    /// `S(V)` with a random basis of R and a random letter order.
    SymmetricMixed,
    /// Exterior algebra: R is the symmetric tensors, stable under every group.
    Exterior,
    /// Random `q`, diagonal sign group (orders 1, 2, 4 only).
    SkewDiagonal,
}

fn random_order<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    order
}

pub fn random_presentation<R: Rng + ?Sized>(
    rng: &mut R,
    field: FieldSpec,
    dim: usize,
    kind: AlgebraKind,
) -> QuadraticPresentation {
    let q_rels = |rng: &mut R, fixed: Option<Scalar>| {
        let mut rels = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let q = fixed.clone().unwrap_or_else(|| random_nonzero_scalar(rng, field));
                let mut r = zero_vector(field, dim * dim);
                r[j * dim + i] = field.one();
                r[i * dim + j] = -q;
                rels.push(r);
            }
        }
        rels
    };
    let (rels, order) = match kind {
        AlgebraKind::Symmetric => (symmetric_relations(field, dim), None),
        AlgebraKind::SymmetricMixed => {
            let base = symmetric_relations(field, dim);
            let m = base.len();
            let t = random_invertible(rng, field, m);
            let rels = (0..m)
                .map(|a| {
                    let mut r = zero_vector(field, dim * dim);
                    for (b, rel) in base.iter().enumerate() {
                        crate::scalars::add_scaled(&mut r, t.get(a, b), rel);
                    }
                    r
                })
                .collect();
            (rels, Some(random_order(rng, dim)))
        }
        AlgebraKind::Exterior => {
            let mut rels = q_rels(rng, Some(-field.one()));
            for i in 0..dim {
                let mut r = zero_vector(field, dim * dim);
                r[i * dim + i] = field.one();
                rels.push(r);
            }
            (rels, Some(random_order(rng, dim)))
        }
        AlgebraKind::SkewDiagonal => (q_rels(rng, None), None),
    };
    QuadraticPresentation::new(field, dim, rels, order, None)
        .expect("random presentation is a valid PBW algebra")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamMode {
    Zero,
    /// Each coordinate nonzero with small probability.
    Sparse,
    /// `lambda` solves condition 1; `alpha`, `beta` sparse.
    Cocycle,
    /// Every explicit condition holds.
    Solved,
    /// A solved set with one coordinate changed.
    Mutated,
    /// `lambda = 0`, `alpha` and `beta` solved.
    SolvedLambdaZero,
    /// `lambda = 0`, a solved set with one `alpha`/`beta` coordinate changed.
    MutatedLambdaZero,
    /// `lambda = 0`, `alpha` and `beta` sparse.
    SparseLambdaZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSpec {
    pub field: FieldSpec,
    pub dim: usize,
    pub group_order: usize,
    pub algebra: AlgebraKind,
    pub mode: ParamMode,
}

/// Coordinates of a parameter set. `lambda` on the identity is excluded.
#[derive(Debug, Clone, Copy)]
struct Layout {
    field: FieldSpec,
    order: usize,
    dim: usize,
    r_dim: usize,
}

impl Layout {
    fn new(group: &GroupData, pres: &QuadraticPresentation) -> Self {
        Layout {
            field: group.field(),
            order: group.order(),
            dim: pres.dim(),
            r_dim: pres.r_dim(),
        }
    }

    fn lambda_len(&self) -> usize {
        (self.order - 1) * self.dim * self.order
    }

    fn alpha_len(&self) -> usize {
        self.r_dim * self.dim * self.order
    }

    fn beta_len(&self) -> usize {
        self.r_dim * self.order
    }

    fn lambda_from(&self, x: &[Scalar]) -> LambdaTable {
        let mut t = zero_lambda(self.order, self.dim);
        let mut k = 0;
        for g in 1..self.order {
            for i in 0..self.dim {
                for h in 0..self.order {
                    t[g][i].add_term(h, x[k].clone());
                    k += 1;
                }
            }
        }
        t
    }

    fn alpha_from(&self, x: &[Scalar]) -> Vec<crate::group::VkGElement> {
        let mut k = 0;
        (0..self.r_dim)
            .map(|_| {
                let mut a = Sparse::new();
                for i in 0..self.dim {
                    for h in 0..self.order {
                        a.add_term((i, h), x[k].clone());
                        k += 1;
                    }
                }
                a
            })
            .collect()
    }

    fn beta_from(&self, x: &[Scalar]) -> Vec<crate::group::GroupAlgebraElement> {
        let mut k = 0;
        (0..self.r_dim)
            .map(|_| {
                let mut b = Sparse::new();
                for h in 0..self.order {
                    b.add_term(h, x[k].clone());
                    k += 1;
                }
                b
            })
            .collect()
    }
}

fn sparse_vector<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec, len: usize, density: f64) -> Vector {
    (0..len)
        .map(|_| {
            if rng.gen_bool(density) {
                random_nonzero_scalar(rng, field)
            } else {
                field.zero()
            }
        })
        .collect()
}

fn build(
    group: &GroupData,
    pres: &QuadraticPresentation,
    p: ParameterSet,
) -> DeformationPresentation {
    DeformationPresentation::new(group.clone(), pres.clone(), Parameters::General(p))
        .expect("generated parameters have the right shape")
}

/// Solves `residuals(x) = 0` for an affine residual map in `len` unknowns and
/// returns a random solution, or `None` when the system is inconsistent.
fn solve_affine_residuals<R: Rng + ?Sized>(
    rng: &mut R,
    field: FieldSpec,
    len: usize,
    mut eval: impl FnMut(&[Scalar]) -> Result<Vec<SmashElement>, CheckError>,
) -> Result<Option<Vector>, CheckError> {
    let mut keys: HashMap<(usize, SmashKey), usize> = HashMap::new();
    let mut flatten = |res: Vec<SmashElement>| -> Vec<(usize, Scalar)> {
        let mut out = Vec::new();
        for (pos, r) in res.into_iter().enumerate() {
            for (key, c) in r.into_terms() {
                let next = keys.len();
                let row = *keys.entry((pos, key)).or_insert(next);
                out.push((row, c));
            }
        }
        out
    };
    let zero = zero_vector(field, len);
    let base = flatten(eval(&zero)?);
    let mut columns = Vec::with_capacity(len);
    for k in 0..len {
        let mut x = zero.clone();
        x[k] = field.one();
        columns.push(flatten(eval(&x)?));
    }
    let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); keys.len()];
    let mut b = zero_vector(field, keys.len());
    for (r, c) in &base {
        b[*r] = -c;
    }
    for (k, col) in columns.into_iter().enumerate() {
        for (r, c) in col {
            rows[r].push((k, c));
        }
        // subtract the constant part
        for (r, c) in &base {
            rows[*r].push((k, -c));
        }
    }
    Ok(solve_affine_sparse(field, len, &rows, &b)
        .map(|sol| random_combination(rng, field, sol.particular, &sol.kernel)))
}

/// `x + sum c_i k_i`, using either every kernel vector or a sparse selection.
fn random_combination<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec, mut x: Vector, kernel: &[Vector]) -> Vector {
    let density = if rng.gen_bool(0.5) { 1.0 } else { 0.3 };
    for k in kernel {
        if rng.gen_bool(density) {
            let c = random_scalar(rng, field);
            crate::scalars::add_scaled(&mut x, &c, k);
        }
    }
    x
}

/// A random solution of condition 1 (`lambda` a twisted cocycle).
pub fn random_cocycle<R: Rng + ?Sized>(
    rng: &mut R,
    group: &GroupData,
    pres: &QuadraticPresentation,
) -> Result<LambdaTable, CheckError> {
    let lay = Layout::new(group, pres);
    let ev = ResidualEvaluator::new(group, pres);
    let r_dim = lay.r_dim;
    let x = solve_affine_residuals(rng, group.field(), lay.lambda_len(), |x| {
        let p = ParameterSet {
            lambda: lay.lambda_from(x),
            ..ParameterSet::zero(lay.order, lay.dim, r_dim)
        };
        ev.residuals(&p, &["1"])
    })?
    .expect("condition 1 is homogeneous");
    Ok(lay.lambda_from(&x))
}

/// Extends `lambda` to a full parameter set satisfying every explicit
/// condition, if one exists.
pub fn solve_alpha_beta<R: Rng + ?Sized>(
    rng: &mut R,
    group: &GroupData,
    pres: &QuadraticPresentation,
    lambda: &LambdaTable,
) -> Result<Option<ParameterSet>, CheckError> {
    let lay = Layout::new(group, pres);
    let ev = ResidualEvaluator::new(group, pres);
    let field = group.field();
    // condition 4 is quadratic in alpha, so a random alpha may not extend
    for attempt in 0..5 {
        let ax = if attempt == 4 && lambda.iter().flatten().all(Sparse::is_zero) {
            zero_vector(field, lay.alpha_len())
        } else {
            let sol = solve_affine_residuals(rng, field, lay.alpha_len(), |x| {
                let p = ParameterSet {
                    alpha: lay.alpha_from(x),
                    beta: lay.beta_from(&zero_vector(field, lay.beta_len())),
                    lambda: lambda.clone(),
                };
                ev.residuals(&p, &["3", "6"])
            })?;
            match sol {
                Some(x) => x,
                None => return Ok(None),
            }
        };
        let alpha = lay.alpha_from(&ax);
        let bx = solve_affine_residuals(rng, field, lay.beta_len(), |x| {
            let p = ParameterSet {
                alpha: alpha.clone(),
                beta: lay.beta_from(x),
                lambda: lambda.clone(),
            };
            ev.residuals(&p, &["2", "4", "5"])
        })?;
        if let Some(bx) = bx {
            return Ok(Some(ParameterSet {
                alpha,
                beta: lay.beta_from(&bx),
                lambda: lambda.clone(),
            }));
        }
    }
    Ok(None)
}

/// A parameter set satisfying every explicit condition. Tries a random
/// cocycle first and falls back to `lambda = 0`, which always extends.
pub fn random_pbw_parameters<R: Rng + ?Sized>(
    rng: &mut R,
    group: &GroupData,
    pres: &QuadraticPresentation,
) -> Result<ParameterSet, CheckError> {
    for _ in 0..3 {
        let lambda = random_cocycle(rng, group, pres)?;
        if let Some(p) = solve_alpha_beta(rng, group, pres, &lambda)? {
            return Ok(p);
        }
    }
    let lambda = zero_lambda(group.order(), pres.dim());
    Ok(solve_alpha_beta(rng, group, pres, &lambda)?.expect("zero parameters always extend"))
}

fn encode(lay: &Layout, p: &ParameterSet) -> Vector {
    let field = lay.field;
    let mut out = Vec::new();
    for g in 1..lay.order {
        for i in 0..lay.dim {
            for h in 0..lay.order {
                out.push(p.lambda[g][i].coeff(&h).cloned().unwrap_or_else(|| field.zero()));
            }
        }
    }
    for a in &p.alpha {
        for i in 0..lay.dim {
            for h in 0..lay.order {
                out.push(a.coeff(&(i, h)).cloned().unwrap_or_else(|| field.zero()));
            }
        }
    }
    for b in &p.beta {
        for h in 0..lay.order {
            out.push(b.coeff(&h).cloned().unwrap_or_else(|| field.zero()));
        }
    }
    out
}

fn decode(lay: &Layout, x: &[Scalar]) -> ParameterSet {
    let (l, a) = (lay.lambda_len(), lay.alpha_len());
    ParameterSet {
        lambda: lay.lambda_from(&x[..l]),
        alpha: lay.alpha_from(&x[l..l + a]),
        beta: lay.beta_from(&x[l + a..]),
    }
}

/// Adds a random nonzero scalar to one coordinate (among `lambda` too unless
/// `keep_lambda`).
pub fn mutate<R: Rng + ?Sized>(
    rng: &mut R,
    group: &GroupData,
    pres: &QuadraticPresentation,
    p: &ParameterSet,
    keep_lambda: bool,
) -> ParameterSet {
    let lay = Layout::new(group, pres);
    let field = group.field();
    let total = lay.lambda_len() + lay.alpha_len() + lay.beta_len();
    let mut x = encode(&lay, p);
    let start = if keep_lambda { lay.lambda_len() } else { 0 };
    if start == total {
        return p.clone();
    }
    let k = rng.gen_range(start..total);
    x[k] = &x[k] + &random_nonzero_scalar(rng, field);
    decode(&lay, &x)
}

fn random_parameters<R: Rng + ?Sized>(
    rng: &mut R,
    group: &GroupData,
    pres: &QuadraticPresentation,
    mode: ParamMode,
) -> Result<ParameterSet, CheckError> {
    let lay = Layout::new(group, pres);
    let field = group.field();
    let density = rng.gen_range(0.05..0.3);
    let sparse_ab = |rng: &mut R, lambda: LambdaTable| ParameterSet {
        alpha: lay.alpha_from(&sparse_vector(rng, field, lay.alpha_len(), density)),
        beta: lay.beta_from(&sparse_vector(rng, field, lay.beta_len(), density)),
        lambda,
    };
    let zero_l = zero_lambda(lay.order, lay.dim);
    Ok(match mode {
        ParamMode::Zero => ParameterSet::zero(lay.order, lay.dim, lay.r_dim),
        ParamMode::Sparse => {
            let lambda = lay.lambda_from(&sparse_vector(rng, field, lay.lambda_len(), density));
            sparse_ab(rng, lambda)
        }
        ParamMode::Cocycle => {
            let lambda = random_cocycle(rng, group, pres)?;
            sparse_ab(rng, lambda)
        }
        ParamMode::Solved => random_pbw_parameters(rng, group, pres)?,
        ParamMode::Mutated => {
            let p = random_pbw_parameters(rng, group, pres)?;
            mutate(rng, group, pres, &p, false)
        }
        ParamMode::SolvedLambdaZero => {
            solve_alpha_beta(rng, group, pres, &zero_l)?.expect("zero parameters always extend")
        }
        ParamMode::MutatedLambdaZero => {
            let p = solve_alpha_beta(rng, group, pres, &zero_l)?.expect("zero parameters always extend");
            mutate(rng, group, pres, &p, true)
        }
        ParamMode::SparseLambdaZero => sparse_ab(rng, zero_l),
    })
}

/// A random instance, or `None` when no group of the requested order is
/// available for this field, dimension and algebra.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &InstanceSpec,
) -> Result<Option<DeformationPresentation>, CheckError> {
    let group = match spec.algebra {
        AlgebraKind::SkewDiagonal => random_diagonal_group(rng, spec.field, spec.dim, spec.group_order),
        _ => {
            let conjugate = rng.gen_bool(0.6);
            random_group(rng, spec.field, spec.dim, spec.group_order, conjugate)
        }
    };
    let Some(group) = group else {
        return Ok(None);
    };
    let pres = random_presentation(rng, spec.field, spec.dim, spec.algebra);
    let p = random_parameters(rng, &group, &pres, spec.mode)?;
    Ok(Some(build(&group, &pres, p)))
}

/// One random instance determined by `seed` alone: field, dimension, group
/// order, algebra kind and parameter mode are all drawn from the seed.
pub fn seeded_instance(seed: u64) -> Result<DeformationPresentation, CheckError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields = [FieldSpec::Prime(3), FieldSpec::Prime(5), FieldSpec::Rational];
    loop {
        let spec = InstanceSpec {
            field: *fields.choose(&mut rng).unwrap(),
            dim: rng.gen_range(2..=3),
            group_order: *[1, 2, 3, 4, 6].choose(&mut rng).unwrap(),
            algebra: *ALGEBRA_KINDS.choose(&mut rng).unwrap(),
            mode: *PARAM_MODES.choose(&mut rng).unwrap(),
        };
        if let Some(d) = random_instance(&mut rng, &spec)? {
            return Ok(d);
        }
    }
}

/// Re-expresses general parameters on `S(V)` in `(kappa, lambda)` form.
pub fn as_poly(d: &DeformationPresentation) -> Result<DeformationPresentation, CheckError> {
    let p = general_to_poly(&d.general_params()?, &d.quadratic)?;
    Ok(DeformationPresentation::new(
        d.group.clone(),
        d.quadratic.clone(),
        Parameters::Poly(p),
    )?)
}

/// Verdicts of every decider that applies to an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdicts {
    pub general: bool,
    /// Only for `S(V)`.
    pub poly: Option<bool>,
    /// Only for `lambda = 0`.
    pub invariant: Option<bool>,
    pub diamond: bool,
}

impl Verdicts {
    pub fn agree(&self) -> bool {
        let g = self.general;
        self.diamond == g && self.poly.is_none_or(|p| p == g) && self.invariant.is_none_or(|i| i == g)
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Diamond(#[from] DiamondError),
}

impl From<ParamError> for HarnessError {
    fn from(e: ParamError) -> Self {
        HarnessError::Check(e.into())
    }
}

pub fn all_verdicts(d: &DeformationPresentation) -> Result<Verdicts, HarnessError> {
    let general = check_bg_general(d)?.pbw;
    let poly = if d.quadratic.is_symmetric_algebra() {
        Some(check_bg_poly(&as_poly(d)?)?.pbw)
    } else {
        None
    };
    let invariant = if d.lambda_is_zero() {
        Some(check_bg_invariant(d)?.pbw)
    } else {
        None
    };
    Ok(Verdicts {
        general,
        poly,
        invariant,
        diamond: diamond_check(d)?.pbw,
    })
}

pub const PARAM_MODES: [ParamMode; 8] = [
    ParamMode::Zero,
    ParamMode::Sparse,
    ParamMode::Cocycle,
    ParamMode::Solved,
    ParamMode::Mutated,
    ParamMode::SolvedLambdaZero,
    ParamMode::MutatedLambdaZero,
    ParamMode::SparseLambdaZero,
];

pub const ALGEBRA_KINDS: [AlgebraKind; 4] = [
    AlgebraKind::Symmetric,
    AlgebraKind::SymmetricMixed,
    AlgebraKind::Exterior,
    AlgebraKind::SkewDiagonal,
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub instances: usize,
    pub pbw: usize,
    pub pbw_nonzero_lambda: usize,
    pub disagreements: Vec<String>,
}

/// Runs `count` instances of one configuration, cycling through algebra kinds
/// and parameter modes, and records every decider disagreement.
pub fn agreement_sweep(
    seed: u64,
    field: FieldSpec,
    dim: usize,
    group_order: usize,
    count: usize,
) -> Result<SweepStats, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SweepStats::default();
    let mut k = 0usize;
    while stats.instances < count {
        let spec = InstanceSpec {
            field,
            dim,
            group_order,
            algebra: ALGEBRA_KINDS[k % ALGEBRA_KINDS.len()],
            mode: PARAM_MODES[(k / ALGEBRA_KINDS.len()) % PARAM_MODES.len()],
        };
        k += 1;
        let Some(d) = random_instance(&mut rng, &spec)? else {
            continue;
        };
        let v = all_verdicts(&d)?;
        stats.instances += 1;
        if v.general {
            stats.pbw += 1;
            if !d.lambda_is_zero() {
                stats.pbw_nonzero_lambda += 1;
            }
        }
        if !v.agree() {
            stats.disagreements.push(format!("{spec:?}: {v:?}"));
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_of_every_order_exist() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for field in [FieldSpec::Prime(3), FieldSpec::Prime(5), FieldSpec::Rational] {
            for dim in [2, 3] {
                for order in [1, 2, 3, 4, 6] {
                    let g = random_group(&mut rng, field, dim, order, true);
                    assert_eq!(g.map(|g| g.order()), Some(order), "{field} dim {dim}");
                }
            }
        }
    }

    #[test]
    fn solved_parameters_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut nonzero_lambda = 0;
        for field in [FieldSpec::Prime(3), FieldSpec::Rational] {
            for order in [2, 3] {
                for algebra in [AlgebraKind::Symmetric, AlgebraKind::Exterior] {
                    let spec = InstanceSpec {
                        field,
                        dim: 2,
                        group_order: order,
                        algebra,
                        mode: ParamMode::Solved,
                    };
                    let d = random_instance(&mut rng, &spec).unwrap().unwrap();
                    assert!(check_bg_general(&d).unwrap().pbw);
                    if !d.lambda_is_zero() {
                        nonzero_lambda += 1;
                    }
                }
            }
        }
        assert!(nonzero_lambda > 0);
    }
}
