//! Exact scalars over a prime field F_p (p odd) or the rationals, and the
//! small dense linear-algebra kernel everything else is built on.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("modulus {0} is too large (must be below 2^31)")]
    ModulusTooLarge(u64),
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("denominator {den} is not invertible in characteristic {modulus}")]
    NonInvertibleDenominator { den: String, modulus: u32 },
}

/// The base field: F_p for an odd prime p, or Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u32),
    Rational,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::CharacteristicTwo);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 31 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        Ok(FieldSpec::Prime(p as u32))
    }

    pub fn rational() -> Self {
        FieldSpec::Rational
    }

    /// 0 for Q.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime(p) => *p as u64,
            FieldSpec::Rational => 0,
        }
    }

    /// True when `n` is zero in this field (i.e. the characteristic divides `n`).
    pub fn divides_order(&self, n: usize) -> bool {
        match self {
            FieldSpec::Prime(p) => n as u64 % *p as u64 == 0,
            FieldSpec::Rational => n == 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod {
                value: n.rem_euclid(p as i64) as u32,
                modulus: p,
            },
            FieldSpec::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => {
                let r = ((n % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                Scalar::Mod {
                    value: r.to_u32().expect("reduced value fits"),
                    modulus: p,
                }
            }
            FieldSpec::Rational => Scalar::Rat(BigRational::from_integer(n.clone())),
        }
    }

    /// Parses `"n"` or `"n/d"`. Over F_p the denominator must be a unit.
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar, FieldError> {
        let bad = || FieldError::BadScalar(text.to_string());
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (
                a.trim().parse::<BigInt>().map_err(|_| bad())?,
                b.trim().parse::<BigInt>().map_err(|_| bad())?,
            ),
            None => (t.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(bad());
        }
        match *self {
            FieldSpec::Prime(p) => {
                let d = self.from_bigint(&den);
                let inv = d.inv().ok_or(FieldError::NonInvertibleDenominator {
                    den: den.to_string(),
                    modulus: p,
                })?;
                Ok(self.from_bigint(&num) * inv)
            }
            FieldSpec::Rational => Ok(Scalar::Rat(BigRational::new(num, den))),
        }
    }

    /// The image of the integer `n` inverted, if it is a unit.
    pub fn inverse_of_count(&self, n: usize) -> Option<Scalar> {
        self.from_i64(n as i64).inv()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "F_{p}"),
            FieldSpec::Rational => write!(f, "Q"),
        }
    }
}

/// A field element in canonical form. Mixing elements of different fields in
/// one operation is a programming error and panics.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Mod { value: u32, modulus: u32 },
    Rat(BigRational),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Mod { modulus, .. } => FieldSpec::Prime(*modulus),
            Scalar::Rat(_) => FieldSpec::Rational,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Mod { value, modulus } => {
                let p = *modulus as u64;
                // Fermat: a^(p-2)
                let mut base = *value as u64;
                let mut exp = p - 2;
                let mut acc = 1u64;
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = acc * base % p;
                    }
                    base = base * base % p;
                    exp >>= 1;
                }
                Some(Scalar::Mod {
                    value: acc as u32,
                    modulus: *modulus,
                })
            }
            Scalar::Rat(r) => Some(Scalar::Rat(r.recip())),
        }
    }

    /// Canonical text form: `v` for F_p, `n` or `n/d` for Q.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Integer value for F_p elements (used by serializers).
    pub fn as_mod_value(&self) -> Option<u32> {
        match self {
            Scalar::Mod { value, .. } => Some(*value),
            Scalar::Rat(_) => None,
        }
    }

    fn check_same(&self, other: &Scalar) {
        match (self, other) {
            (Scalar::Mod { modulus: a, .. }, Scalar::Mod { modulus: b, .. }) if a == b => {}
            (Scalar::Rat(_), Scalar::Rat(_)) => {}
            _ => panic!("scalar field mismatch: {self:?} vs {other:?}"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: ((*a as u64 + *b as u64) % *modulus as u64) as u32,
                modulus: *modulus,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: ((*a as u64 + *modulus as u64 - *b as u64) % *modulus as u64) as u32,
                modulus: *modulus,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.check_same(rhs);
        match (self, rhs) {
            (Scalar::Mod { value: a, modulus }, Scalar::Mod { value: b, .. }) => Scalar::Mod {
                value: ((*a as u64 * *b as u64) % *modulus as u64) as u32,
                modulus: *modulus,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: (*modulus - *value) % *modulus,
                modulus: *modulus,
            },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

// ---------------------------------------------------------------------------
// Vectors and matrices
// ---------------------------------------------------------------------------

pub type Vector = Vec<Scalar>;

pub fn zero_vector(field: FieldSpec, len: usize) -> Vector {
    vec![field.zero(); len]
}

pub fn unit_vector(field: FieldSpec, len: usize, i: usize) -> Vector {
    let mut v = zero_vector(field, len);
    v[i] = field.one();
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn add_scaled(acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    debug_assert_eq!(acc.len(), v.len());
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += c * b;
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Builds a matrix from rows. All rows must have length `cols`.
    pub fn from_rows(field: FieldSpec, cols: usize, rows: Vec<Vector>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix {
            field,
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_i64_rows(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            field,
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
                .collect(),
        )
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug: Vec<Vector> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend(unit_vector(self.field, n, r));
                row
            })
            .collect();
        let pivots = rref_in_place(&mut aug, 2 * n);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Matrix::from_rows(
            self.field,
            n,
            aug.into_iter().map(|r| r[n..].to_vec()).collect(),
        ))
    }
}

/// Reduced row echelon form in place over the first `cols` columns. Zero rows
/// are dropped; returns the pivot column of each surviving row.
pub fn rref_in_place(rows: &mut Vec<Vector>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let inv = rows[next][c].inv().expect("nonzero pivot");
        for x in rows[next].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[next].clone();
        for r in 0..rows.len() {
            if r != next && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                let neg = -&f;
                add_scaled(&mut rows[r], &neg, &pivot_row);
            }
        }
        pivots.push(c);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    pivots
}

/// Row rank by exact Gaussian elimination.
pub fn rank(m: &Matrix) -> usize {
    let mut rows = m.row_vectors();
    rref_in_place(&mut rows, m.cols()).len()
}

/// Basis of the right null space `{ w : M w = 0 }`; its size is `cols - rank`.
pub fn kernel_basis(m: &Matrix) -> Vec<Vector> {
    let field = m.field();
    let mut rows = m.row_vectors();
    let pivots = rref_in_place(&mut rows, m.cols());
    let pivot_set: Vec<bool> = {
        let mut s = vec![false; m.cols()];
        for &p in &pivots {
            s[p] = true;
        }
        s
    };
    let mut basis = Vec::new();
    for free in (0..m.cols()).filter(|&c| !pivot_set[c]) {
        let mut w = zero_vector(field, m.cols());
        w[free] = field.one();
        for (row, &p) in rows.iter().zip(&pivots) {
            if !row[free].is_zero() {
                w[p] = -&row[free];
            }
        }
        basis.push(w);
    }
    basis
}

/// True when `v` lies in the span of `set`.
pub fn in_span(field: FieldSpec, v: &[Scalar], set: &[Vector]) -> bool {
    if is_zero_vector(v) {
        return true;
    }
    SpanSolver::new(field, v.len(), set).contains(v)
}

/// Echelon form of a list of vectors that remembers how each echelon row was
/// built, so membership queries also return coordinates in the original list.
#[derive(Debug, Clone)]
pub struct SpanSolver {
    field: FieldSpec,
    len: usize,
    generators: usize,
    // (pivot column, echelon row, combination of generators)
    rows: Vec<(usize, Vector, Vector)>,
}

impl SpanSolver {
    pub fn new(field: FieldSpec, len: usize, generators: &[Vector]) -> Self {
        let mut solver = SpanSolver {
            field,
            len,
            generators: generators.len(),
            rows: Vec::new(),
        };
        for (i, g) in generators.iter().enumerate() {
            assert_eq!(g.len(), len, "generator length mismatch");
            let mut v = g.clone();
            let mut combo = unit_vector(field, generators.len(), i);
            solver.eliminate(&mut v, &mut combo);
            if let Some(p) = v.iter().position(|x| !x.is_zero()) {
                let inv = v[p].inv().expect("nonzero");
                for x in v.iter_mut() {
                    *x = &*x * &inv;
                }
                for x in combo.iter_mut() {
                    *x = &*x * &inv;
                }
                solver.rows.push((p, v, combo));
            }
        }
        solver
    }

    fn eliminate(&self, v: &mut Vector, combo: &mut Vector) {
        for (p, row, rc) in &self.rows {
            if !v[*p].is_zero() {
                let f = -&v[*p];
                add_scaled(v, &f, row);
                add_scaled(combo, &f, rc);
            }
        }
    }

    /// Dimension of the span.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_independent(&self) -> bool {
        self.rows.len() == self.generators
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Some coefficients `c` with `sum c_i g_i = v`, if `v` is in the span.
    /// Unique when the generators are independent.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let mut w = v.to_vec();
        let mut combo = zero_vector(self.field, self.generators);
        self.eliminate(&mut w, &mut combo);
        if is_zero_vector(&w) {
            Some(combo.into_iter().map(|c| -c).collect())
        } else {
            None
        }
    }
}

/// Basis of the intersection of two subspaces given by spanning sets.
/// Solves `sum a_i x_i = sum b_j y_j` and maps the solutions back.
pub fn intersect_spans(field: FieldSpec, len: usize, xs: &[Vector], ys: &[Vector]) -> Vec<Vector> {
    let n = xs.len() + ys.len();
    if n == 0 {
        return Vec::new();
    }
    // columns: x_1..x_a, -y_1..-y_b ; rows: coordinates
    let mut m = Matrix::zeros(field, len, n);
    for (j, x) in xs.iter().enumerate() {
        for (i, e) in x.iter().enumerate() {
            m.set(i, j, e.clone());
        }
    }
    for (j, y) in ys.iter().enumerate() {
        for (i, e) in y.iter().enumerate() {
            m.set(i, xs.len() + j, -e);
        }
    }
    let mut out: Vec<Vector> = kernel_basis(&m)
        .into_iter()
        .map(|k| {
            let mut v = zero_vector(field, len);
            for (a, x) in k.iter().zip(xs) {
                add_scaled(&mut v, a, x);
            }
            v
        })
        .collect();
    rref_in_place(&mut out, len);
    out
}

/// Solution set `{ x : A x = b }` as particular solution plus kernel basis.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub particular: Vector,
    pub kernel: Vec<Vector>,
}

pub fn solve_affine(a: &Matrix, b: &[Scalar]) -> Option<AffineSolution> {
    let field = a.field();
    assert_eq!(a.rows(), b.len());
    let cols = a.cols();
    let mut rows: Vec<Vector> = (0..a.rows())
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.push(b[r].clone());
            row
        })
        .collect();
    let pivots = rref_in_place(&mut rows, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut particular = zero_vector(field, cols);
    for (row, &p) in rows.iter().zip(&pivots) {
        particular[p] = row[cols].clone();
    }
    Some(AffineSolution {
        particular,
        kernel: kernel_basis(a),
    })
}

/// `solve_affine` for a system given as sparse rows `(column, coefficient)`.
/// Rows are eliminated one at a time against the echelon built so far.
pub fn solve_affine_sparse(
    field: FieldSpec,
    cols: usize,
    rows: &[Vec<(usize, Scalar)>],
    rhs: &[Scalar],
) -> Option<AffineSolution> {
    use std::collections::BTreeMap;
    assert_eq!(rows.len(), rhs.len());
    // pivot column -> (row with leading coefficient 1, right-hand side)
    let mut echelon: BTreeMap<usize, (BTreeMap<usize, Scalar>, Scalar)> = BTreeMap::new();
    for (row, b) in rows.iter().zip(rhs) {
        let mut r: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (c, x) in row {
            let e = r.entry(*c).or_insert_with(|| field.zero());
            *e += x;
        }
        r.retain(|_, x| !x.is_zero());
        let mut b = b.clone();
        let mut from = 0;
        loop {
            let Some((&c, x)) = r.range(from..).next() else {
                if !b.is_zero() {
                    return None;
                }
                break;
            };
            let x = x.clone();
            match echelon.get(&c) {
                Some((prow, pb)) => {
                    for (k, y) in prow {
                        let e = r.entry(*k).or_insert_with(|| field.zero());
                        *e -= &(&x * y);
                        if e.is_zero() {
                            r.remove(k);
                        }
                    }
                    b -= &(&x * pb);
                    from = c + 1;
                }
                None => {
                    let inv = x.inv().expect("nonzero");
                    for y in r.values_mut() {
                        *y *= &inv;
                    }
                    b *= &inv;
                    echelon.insert(c, (r, b));
                    break;
                }
            }
        }
    }
    // back substitution into reduced form, highest pivot first
    let pivots: Vec<usize> = echelon.keys().rev().copied().collect();
    for &p in &pivots {
        let (mut row, mut b) = echelon.remove(&p).expect("pivot row");
        let others: Vec<usize> = row.keys().copied().filter(|&k| k != p && echelon.contains_key(&k)).collect();
        for k in others {
            let x = row.remove(&k).expect("entry");
            let (krow, kb) = &echelon[&k];
            for (j, y) in krow {
                if *j == k {
                    continue;
                }
                let e = row.entry(*j).or_insert_with(|| field.zero());
                *e -= &(&x * y);
                if e.is_zero() {
                    row.remove(j);
                }
            }
            b -= &(&x * kb);
        }
        echelon.insert(p, (row, b));
    }
    let mut particular = zero_vector(field, cols);
    for (&p, (_, b)) in &echelon {
        particular[p] = b.clone();
    }
    let mut kernel = Vec::new();
    for f in (0..cols).filter(|c| !echelon.contains_key(c)) {
        let mut v = zero_vector(field, cols);
        v[f] = field.one();
        for (&p, (row, _)) in &echelon {
            if let Some(x) = row.get(&f) {
                v[p] = -x;
            }
        }
        kernel.push(v);
    }
    Some(AffineSolution { particular, kernel })
}

/// Converts an exact integer-valued rational to i64 when it fits.
pub fn rational_to_i64(r: &BigRational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    #[test]
    fn field_construction() {
        assert_eq!(FieldSpec::prime(2), Err(FieldError::CharacteristicTwo));
        assert_eq!(FieldSpec::prime(9), Err(FieldError::NotPrime(9)));
        assert_eq!(FieldSpec::prime(1), Err(FieldError::NotPrime(1)));
        assert!(FieldSpec::prime(7).is_ok());
    }

    #[test]
    fn parse_scalars() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.parse_scalar("1/2").unwrap(), f5.from_i64(3));
        assert_eq!(f5.parse_scalar("-1").unwrap(), f5.from_i64(4));
        assert!(f5.parse_scalar("1/5").is_err());
        assert_eq!(q().parse_scalar("2/4").unwrap().to_string(), "1/2");
        assert_eq!(q().parse_scalar(" -6/3 ").unwrap().to_string(), "-2");
        assert!(q().parse_scalar("x").is_err());
    }

    #[test]
    fn inverses() {
        let f7 = FieldSpec::prime(7).unwrap();
        for i in 1..7 {
            let a = f7.from_i64(i);
            assert!((&a * &a.inv().unwrap()).is_one());
        }
        assert!(f7.zero().inv().is_none());
    }

    #[test]
    fn rank_examples() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(rank(&Matrix::identity(f5, 3)), 3);
        assert_eq!(rank(&Matrix::zeros(f5, 2, 4)), 0);
        assert_eq!(rank(&Matrix::from_i64_rows(q(), &[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        assert!(kernel_basis(&Matrix::identity(f3, 4)).is_empty());
        assert_eq!(kernel_basis(&Matrix::zeros(f3, 1, 3)).len(), 3);
        let m = Matrix::from_i64_rows(f3, &[&[1, 1, 0]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for w in &k {
            assert!(is_zero_vector(&m.mul_vec(w)));
        }
    }

    #[test]
    fn span_examples() {
        let one = q().one();
        let zero = q().zero();
        let s = vec![vec![one.clone(), zero.clone()]];
        assert!(in_span(q(), &[zero.clone(), zero.clone()], &s));
        assert!(in_span(q(), &s[0], &s));
        assert!(!in_span(q(), &[one.clone(), one.clone()], &s));
        assert!(in_span(q(), &[zero.clone(), zero.clone()], &[]));
    }

    #[test]
    fn coordinates_are_exact() {
        let f = q();
        let gens = vec![
            vec![f.from_i64(1), f.from_i64(2), f.from_i64(0)],
            vec![f.from_i64(0), f.from_i64(1), f.from_i64(1)],
        ];
        let solver = SpanSolver::new(f, 3, &gens);
        let v = vec![f.from_i64(2), f.from_i64(1), f.from_i64(-3)];
        let c = solver.coordinates(&v).unwrap();
        assert_eq!(c, vec![f.from_i64(2), f.from_i64(-3)]);
    }

    #[test]
    fn inverse_matrix() {
        let f = q();
        let m = Matrix::from_i64_rows(f, &[&[1, 1], &[0, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(f, 2));
        assert!(Matrix::from_i64_rows(f, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn affine_solve() {
        let f = FieldSpec::prime(5).unwrap();
        let a = Matrix::from_i64_rows(f, &[&[1, 1, 0], &[0, 1, 1]]);
        let b = vec![f.from_i64(1), f.from_i64(2)];
        let sol = solve_affine(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&sol.particular), b);
        assert_eq!(sol.kernel.len(), 1);
        let inconsistent = Matrix::from_i64_rows(f, &[&[1, 1], &[1, 1]]);
        assert!(solve_affine(&inconsistent, &[f.from_i64(0), f.from_i64(1)]).is_none());
    }

    #[test]
    fn intersection_of_planes() {
        let f = q();
        let e = |i| unit_vector(f, 3, i);
        let xs = vec![e(0), e(1)];
        let ys = vec![e(1), e(2)];
        let i = intersect_spans(f, 3, &xs, &ys);
        assert_eq!(i, vec![e(1)]);
    }

    #[test]
    fn sparse_affine_matches_dense() {
        let f = FieldSpec::Prime(5);
        let a = Matrix::from_i64_rows(f, &[&[1, 2, 0, 1], &[2, 4, 1, 0], &[0, 0, 1, 3]]);
        let b: Vector = [1, 3, 1].iter().map(|&x| f.from_i64(x)).collect();
        let sparse_rows: Vec<Vec<(usize, Scalar)>> = (0..3)
            .map(|r| (0..4).filter(|&c| !a.get(r, c).is_zero()).map(|c| (c, a.get(r, c).clone())).collect())
            .collect();
        let dense = solve_affine(&a, &b).unwrap();
        let sparse = solve_affine_sparse(f, 4, &sparse_rows, &b).unwrap();
        assert_eq!(a.mul_vec(&sparse.particular), b);
        assert_eq!(sparse.kernel.len(), dense.kernel.len());
        for k in &sparse.kernel {
            assert!(is_zero_vector(&a.mul_vec(k)));
        }
        // inconsistent: x0 = 1 and x0 = 2
        let rows = vec![vec![(0, f.one())], vec![(0, f.one())]];
        assert!(solve_affine_sparse(f, 1, &rows, &[f.one(), f.from_i64(2)]).is_none());
    }
}
