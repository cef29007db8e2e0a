//! Finite matrix groups: closure from generators, multiplication and inverse
//! tables, the linear action on V, and the group algebra kG.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::scalars::{FieldSpec, Matrix, Scalar, Vector};
use crate::sparse::Sparse;

pub const DEFAULT_GROUP_CAP: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generated group exceeds the order cap {cap}")]
    NotClosedWithinCap { cap: usize },
    #[error("generator {index} is not invertible")]
    SingularGenerator { index: usize },
    #[error("generator {index} is not a {dim}x{dim} matrix over {field}")]
    ShapeMismatch {
        index: usize,
        dim: usize,
        field: FieldSpec,
    },
    #[error("cannot parse group element {0:?}")]
    BadWord(String),
}

/// `sum_g c_g g` in kG, keyed by element index.
pub type GroupAlgebraElement = Sparse<usize>;

/// `sum c_{i,g} v_i (x) g` in V (x) kG, keyed by `(basis index, element index)`.
pub type VkGElement = Sparse<(usize, usize)>;

/// A finite subgroup of GL(V) with full tables. Element 0 is the identity.
#[derive(Debug, Clone)]
pub struct GroupData {
    field: FieldSpec,
    dim: usize,
    generators: Vec<Matrix>,
    elements: Vec<Matrix>,
    names: Vec<String>,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    // right multiplication by each generator
    right_gen: Vec<Vec<usize>>,
}

/// Closes `generators` under multiplication. The trivial group results from an
/// empty generator list.
pub fn close_group(
    field: FieldSpec,
    dim: usize,
    generators: &[Matrix],
    cap: usize,
) -> Result<GroupData, GroupError> {
    for (index, g) in generators.iter().enumerate() {
        if g.rows() != dim || g.cols() != dim || g.field() != field {
            return Err(GroupError::ShapeMismatch { index, dim, field });
        }
        if g.inverse().is_none() {
            return Err(GroupError::SingularGenerator { index });
        }
    }
    let mut elements = vec![Matrix::identity(field, dim)];
    let mut index_of: HashMap<Matrix, usize> = HashMap::new();
    index_of.insert(elements[0].clone(), 0);
    // (parent, generator) for each non-identity element
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut right_gen: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::with_capacity(generators.len());
        for (k, s) in generators.iter().enumerate() {
            let prod = elements[i].mul(s);
            let j = match index_of.get(&prod) {
                Some(&j) => j,
                None => {
                    if elements.len() >= cap {
                        return Err(GroupError::NotClosedWithinCap { cap });
                    }
                    let j = elements.len();
                    index_of.insert(prod.clone(), j);
                    elements.push(prod);
                    parent.push(Some((i, k)));
                    right_gen.push(Vec::new());
                    queue.push_back(j);
                    j
                }
            };
            row.push(j);
        }
        right_gen[i] = row;
    }
    let n = elements.len();
    // mult(i, j) = right-multiply i along the BFS word of j; BFS order means
    // parents come first.
    let mut mult = vec![usize::MAX; n * n];
    for i in 0..n {
        mult[i * n] = i;
        for j in 1..n {
            let (p, k) = parent[j].expect("non-identity has a parent");
            let ip = mult[i * n + p];
            mult[i * n + j] = right_gen[ip][k];
        }
    }
    let mut inverse = vec![usize::MAX; n];
    for i in 0..n {
        inverse[i] = (0..n)
            .find(|&j| mult[i * n + j] == 0)
            .expect("finite group element has an inverse");
    }
    let names = (0..n).map(|j| word_name(&parent, j)).collect();
    Ok(GroupData {
        field,
        dim,
        generators: generators.to_vec(),
        elements,
        names,
        mult,
        inverse,
        right_gen,
    })
}

fn word_name(parent: &[Option<(usize, usize)>], j: usize) -> String {
    let mut gens = Vec::new();
    let mut cur = j;
    while let Some((p, k)) = parent[cur] {
        gens.push(k);
        cur = p;
    }
    if gens.is_empty() {
        return "e".to_string();
    }
    gens.reverse();
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < gens.len() {
        let mut e = 1;
        while i + e < gens.len() && gens[i + e] == gens[i] {
            e += 1;
        }
        parts.push(if e == 1 {
            format!("g{}", gens[i])
        } else {
            format!("g{}^{}", gens[i], e)
        });
        i += e;
    }
    parts.join("*")
}

impl GroupData {
    pub fn trivial(field: FieldSpec, dim: usize) -> Self {
        close_group(field, dim, &[], 1).expect("trivial group closes")
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Dimension of V.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn element(&self, g: usize) -> &Matrix {
        &self.elements[g]
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    /// Shortest generator word for `g`, e.g. `e`, `g0`, `g0^2*g1`.
    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn mult(&self, g: usize, h: usize) -> usize {
        self.mult[g * self.order() + h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mult(self.mult(g, h), self.inverse(g))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|g| (0..n).all(|h| self.mult(g, h) == self.mult(h, g)))
    }

    /// Index of generator `k` in the element list.
    pub fn generator_index(&self, k: usize) -> usize {
        self.right_gen[0][k]
    }

    /// Parses a word such as `e`, `g1`, `g0^2*g1^-1` into an element index.
    pub fn parse_word(&self, word: &str) -> Result<usize, GroupError> {
        let bad = || GroupError::BadWord(word.to_string());
        let w = word.trim();
        if w == "e" || w == "1" {
            return Ok(0);
        }
        let mut acc = 0usize;
        for part in w.split('*') {
            let part = part.trim();
            let rest = part.strip_prefix('g').ok_or_else(bad)?;
            let (idx, exp) = match rest.split_once('^') {
                Some((a, b)) => (
                    a.parse::<usize>().map_err(|_| bad())?,
                    b.parse::<i64>().map_err(|_| bad())?,
                ),
                None => (rest.parse::<usize>().map_err(|_| bad())?, 1),
            };
            if idx >= self.generators.len() {
                return Err(bad());
            }
            let mut s = self.generator_index(idx);
            if exp < 0 {
                s = self.inverse(s);
            }
            for _ in 0..exp.unsigned_abs() {
                acc = self.mult(acc, s);
            }
        }
        Ok(acc)
    }

    /// `rho(g) v`.
    pub fn act(&self, g: usize, v: &[Scalar]) -> Vector {
        self.elements[g].mul_vec(v)
    }

    /// `rho(g) e_i`, i.e. column `i` of the matrix of `g`.
    pub fn act_basis(&self, g: usize, i: usize) -> Vector {
        self.elements[g].column(i)
    }

    pub fn ga_basis(&self, g: usize) -> GroupAlgebraElement {
        Sparse::monomial(g, self.field.one())
    }

    pub fn ga_one(&self) -> GroupAlgebraElement {
        self.ga_basis(0)
    }

    /// Convolution product in kG.
    pub fn ga_mul(&self, a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> GroupAlgebraElement {
        let mut out = Sparse::new();
        for (&g, x) in a {
            for (&h, y) in b {
                out.add_term(self.mult(g, h), x * y);
            }
        }
        out
    }

    /// `a * (v (x) k)` is not defined in V (x) kG; this is the right action
    /// `(v (x) k) * b`.
    pub fn vkg_mul_ga(&self, x: &VkGElement, b: &GroupAlgebraElement) -> VkGElement {
        let mut out = Sparse::new();
        for (&(i, k), c) in x {
            for (&h, d) in b {
                out.add_term((i, self.mult(k, h)), c * d);
            }
        }
        out
    }

    /// Twist map: `sigma(g (x) v) = g.v (x) g`.
    pub fn sigma(&self, g: usize, v: &[Scalar]) -> VkGElement {
        self.act(g, v)
            .into_iter()
            .enumerate()
            .map(|(i, c)| ((i, g), c))
            .collect()
    }

    /// Conjugation action on V (x) kG: `g.(v (x) h) = g.v (x) g h g^-1`.
    pub fn conj_vkg(&self, g: usize, x: &VkGElement) -> VkGElement {
        let mut out = Sparse::new();
        for (&(i, h), c) in x {
            let gh = self.conjugate(g, h);
            for (j, a) in self.act_basis(g, i).into_iter().enumerate() {
                if !a.is_zero() {
                    out.add_term((j, gh), c * &a);
                }
            }
        }
        out
    }

    /// Conjugation action on kG.
    pub fn conj_ga(&self, g: usize, x: &GroupAlgebraElement) -> GroupAlgebraElement {
        x.map_keys(|&h| self.conjugate(g, h))
    }

    /// Coefficient vector `(c_1..c_n)` of `v (x) h` components in `x`.
    pub fn vkg_component(&self, x: &VkGElement, h: usize) -> Vector {
        let mut v = vec![self.field.zero(); self.dim];
        for (&(i, k), c) in x {
            if k == h {
                v[i] = c.clone();
            }
        }
        v
    }

    /// The element `v (x) h` for a coordinate vector `v`.
    pub fn vkg_from_vector(&self, v: &[Scalar], h: usize) -> VkGElement {
        v.iter()
            .enumerate()
            .map(|(i, c)| ((i, h), c.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldSpec {
        FieldSpec::prime(3).unwrap()
    }

    #[test]
    fn trivial_group() {
        let g = close_group(f3(), 2, &[Matrix::identity(f3(), 2)], 16).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.name(0), "e");
    }

    #[test]
    fn shear_has_order_p() {
        let s = Matrix::from_i64_rows(f3(), &[&[1, 1], &[0, 1]]);
        let g = close_group(f3(), 2, &[s], 16).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.name(2), "g0^2");
        assert_eq!(g.parse_word("g0^2").unwrap(), 2);
        assert_eq!(g.parse_word("g0^-1").unwrap(), 2);
        assert_eq!(g.parse_word("g0^3").unwrap(), 0);
    }

    #[test]
    fn swap_over_q() {
        let q = FieldSpec::Rational;
        let s = Matrix::from_i64_rows(q, &[&[0, 1], &[1, 0]]);
        let g = close_group(q, 2, &[s], 16).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inverse(1), 1);
    }

    #[test]
    fn errors() {
        let q = FieldSpec::Rational;
        let two = Matrix::from_i64_rows(q, &[&[2]]);
        assert_eq!(
            close_group(q, 1, &[two], 64).unwrap_err(),
            GroupError::NotClosedWithinCap { cap: 64 }
        );
        let sing = Matrix::from_i64_rows(q, &[&[1, 1], &[1, 1]]);
        assert_eq!(
            close_group(q, 2, &[sing], 64).unwrap_err(),
            GroupError::SingularGenerator { index: 0 }
        );
    }

    #[test]
    fn action_of_example_shear() {
        let s = Matrix::from_i64_rows(f3(), &[&[1, 1], &[0, 1]]);
        let g = close_group(f3(), 2, &[s], 16).unwrap();
        let w = vec![f3().zero(), f3().one()];
        assert_eq!(g.act(1, &w), vec![f3().one(), f3().one()]);
        let sig = g.sigma(1, &w);
        assert_eq!(sig.len(), 2);
        assert_eq!(sig.coeff(&(0, 1)), Some(&f3().one()));
    }

    #[test]
    fn ga_mul_examples() {
        let s = Matrix::from_i64_rows(f3(), &[&[1, 1], &[0, 1]]);
        let g = close_group(f3(), 2, &[s], 16).unwrap();
        let x = &g.ga_basis(1) + &g.ga_basis(2);
        assert_eq!(g.ga_mul(&g.ga_one(), &x), x);
        assert_eq!(g.ga_mul(&g.ga_basis(1), &g.ga_basis(2)), g.ga_one());
        let prod = g.ga_mul(&x, &g.ga_basis(1));
        assert_eq!(prod, &g.ga_basis(2) + &g.ga_basis(0));
    }
}
