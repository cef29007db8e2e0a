//! Quadratic algebras `S = T(V)/(R)` with a quadratic rewriting system, the
//! smash product `S # G`, and the filtered rewriting engine shared by the
//! condition checkers and the overlap oracle.
//!
//! Elements of `T_{kG}(kG (x) V (x) kG)` are stored as [`Word`]s: `n` V-letters
//! interleaved with `n + 1` group slots, `s_0 v_1 s_1 ... v_n s_n`. Adjacent
//! group letters are multiplied on construction, so the group rule `g h -> gh`
//! is built into the representation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::group::{GroupAlgebraElement, GroupData, VkGElement};
use crate::scalars::{
    intersect_spans, rref_in_place, zero_vector, FieldSpec, Scalar, SpanSolver, Vector,
};
use crate::sparse::Sparse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("relation {index} has length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("relation vectors are linearly dependent")]
    DependentRelations,
    #[error("monomial order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("rewrite rule {index}: {reason}")]
    BadRule { index: usize, reason: String },
    #[error("rewrite rules do not span the relation space")]
    RulesDoNotSpanR,
    #[error("relation space is not stable under group element {group}: image of relation {relation} leaves R")]
    NotGStable { group: String, relation: usize },
    #[error("overlap {word} does not resolve: residual {residual}")]
    NotConfluent { word: String, residual: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rewriting exceeded depth {0}; the rule system does not terminate")]
    NonTermination(usize),
}

/// A rewrite rule `lead -> tail` on degree-2 monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lead: (usize, usize),
    /// Coefficients on `V (x) V`, index `a * dim + b`.
    pub tail: Vector,
    /// `lead - tail` in coordinates of the relation basis.
    pub relation_coords: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticPresentation {
    field: FieldSpec,
    dim: usize,
    r_basis: Vec<Vector>,
    order: Vec<usize>,
    letter_rank: Vec<usize>,
    rules: Vec<Rule>,
    lead_table: Vec<Option<usize>>,
}

impl QuadraticPresentation {
    /// Builds a presentation, deriving rules by row reduction when `rules`
    /// is `None`. `order` lists the basis from smallest to largest letter.
    pub fn new(
        field: FieldSpec,
        dim: usize,
        r_basis: Vec<Vector>,
        order: Option<Vec<usize>>,
        rules: Option<Vec<((usize, usize), Vector)>>,
    ) -> Result<Self, PresentationError> {
        let n2 = dim * dim;
        for (index, r) in r_basis.iter().enumerate() {
            if r.len() != n2 {
                return Err(PresentationError::DimensionMismatch {
                    index,
                    expected: n2,
                    found: r.len(),
                });
            }
        }
        let order = order.unwrap_or_else(|| (0..dim).collect());
        let mut letter_rank = vec![usize::MAX; dim];
        if order.len() != dim {
            return Err(PresentationError::BadOrder(dim));
        }
        for (k, &i) in order.iter().enumerate() {
            if i >= dim || letter_rank[i] != usize::MAX {
                return Err(PresentationError::BadOrder(dim));
            }
            letter_rank[i] = k;
        }
        let solver = SpanSolver::new(field, n2, &r_basis);
        if !solver.is_independent() {
            return Err(PresentationError::DependentRelations);
        }
        let mut p = QuadraticPresentation {
            field,
            dim,
            r_basis,
            order,
            letter_rank,
            rules: Vec::new(),
            lead_table: vec![None; n2],
        };
        let raw = match rules {
            None => p.derive_rules(),
            Some(given) => p.check_rules(given)?,
        };
        let mut rules = Vec::with_capacity(raw.len());
        for (index, (lead, tail)) in raw.into_iter().enumerate() {
            let mut rel: Vector = tail.iter().map(|c| -c).collect();
            rel[lead.0 * dim + lead.1] += field.one();
            let coords = solver
                .coordinates(&rel)
                .ok_or(PresentationError::BadRule {
                    index,
                    reason: "relation lead - tail is not in R".into(),
                })?;
            rules.push(Rule {
                lead,
                tail,
                relation_coords: coords,
            });
        }
        for (i, r) in rules.iter().enumerate() {
            p.lead_table[r.lead.0 * dim + r.lead.1] = Some(i);
        }
        p.rules = rules;
        Ok(p)
    }

    /// `S(V)`: relations `v_j (x) v_i - v_i (x) v_j` for `i < j`, rules `v_j v_i -> v_i v_j`.
    pub fn symmetric(field: FieldSpec, dim: usize) -> Self {
        Self::new(field, dim, symmetric_relations(field, dim), None, None)
            .expect("symmetric algebra presentation is valid")
    }

    /// Skew polynomial ring: `v_j v_i = q_ij v_i v_j` for `i < j`, with `q` given
    /// on the strict upper triangle (`q[i][j]`, nonzero).
    pub fn skew_polynomial(field: FieldSpec, dim: usize, q: &[Vec<Scalar>]) -> Self {
        let mut rels = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let mut r = zero_vector(field, dim * dim);
                r[j * dim + i] = field.one();
                r[i * dim + j] = -&q[i][j];
                rels.push(r);
            }
        }
        Self::new(field, dim, rels, None, None).expect("skew polynomial presentation is valid")
    }

    fn monomial_key(&self, a: usize, b: usize) -> (usize, usize) {
        (self.letter_rank[a], self.letter_rank[b])
    }

    fn derive_rules(&self) -> Vec<((usize, usize), Vector)> {
        let n = self.dim;
        let mut monos: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        monos.sort_by_key(|&(a, b)| std::cmp::Reverse(self.monomial_key(a, b)));
        let mut rows: Vec<Vector> = self
            .r_basis
            .iter()
            .map(|r| monos.iter().map(|&(a, b)| r[a * n + b].clone()).collect())
            .collect();
        let pivots = rref_in_place(&mut rows, monos.len());
        rows.iter()
            .zip(pivots)
            .map(|(row, p)| {
                let lead = monos[p];
                let mut tail = zero_vector(self.field, n * n);
                for (c, &(a, b)) in monos.iter().enumerate() {
                    if c != p && !row[c].is_zero() {
                        tail[a * n + b] = -&row[c];
                    }
                }
                (lead, tail)
            })
            .collect()
    }

    fn check_rules(
        &self,
        given: Vec<((usize, usize), Vector)>,
    ) -> Result<Vec<((usize, usize), Vector)>, PresentationError> {
        let n = self.dim;
        if given.len() != self.r_basis.len() {
            return Err(PresentationError::RulesDoNotSpanR);
        }
        let leads: Vec<(usize, usize)> = given.iter().map(|(l, _)| *l).collect();
        for (index, (lead, tail)) in given.iter().enumerate() {
            let bad = |reason: &str| PresentationError::BadRule {
                index,
                reason: reason.to_string(),
            };
            if lead.0 >= n || lead.1 >= n {
                return Err(bad("lead index out of range"));
            }
            if tail.len() != n * n {
                return Err(bad("tail has wrong length"));
            }
            if leads.iter().filter(|l| *l == lead).count() > 1 {
                return Err(bad("duplicate leading monomial"));
            }
            for a in 0..n {
                for b in 0..n {
                    if tail[a * n + b].is_zero() {
                        continue;
                    }
                    if leads.contains(&(a, b)) {
                        return Err(bad("tail is not reduced"));
                    }
                    if self.monomial_key(a, b) >= self.monomial_key(lead.0, lead.1) {
                        return Err(bad("tail monomial is not below the lead in the order"));
                    }
                }
            }
        }
        Ok(given)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_basis(&self) -> &[Vector] {
        &self.r_basis
    }

    pub fn r_dim(&self) -> usize {
        self.r_basis.len()
    }

    /// Basis indices from smallest to largest letter.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_for_lead(&self, a: usize, b: usize) -> Option<usize> {
        self.lead_table[a * self.dim + b]
    }

    pub fn is_lead(&self, a: usize, b: usize) -> bool {
        self.lead_table[a * self.dim + b].is_some()
    }

    /// Coordinates of `r` in the relation basis, if `r` lies in R.
    pub fn r_coordinates(&self, r: &[Scalar]) -> Option<Vector> {
        SpanSolver::new(self.field, self.dim * self.dim, &self.r_basis).coordinates(r)
    }

    /// True when R is exactly the span of `v_i (x) v_j - v_j (x) v_i`, i.e. S = S(V).
    pub fn is_symmetric_algebra(&self) -> bool {
        let n = self.dim;
        if self.r_basis.len() != n * n.saturating_sub(1) / 2 {
            return false;
        }
        self.r_basis.iter().all(|r| {
            (0..n).all(|a| {
                r[a * n + a].is_zero()
                    && (0..n).all(|b| (&r[a * n + b] + &r[b * n + a]).is_zero())
            })
        })
    }

    /// Number of normal (reduced) words of each length `0..=d`.
    pub fn normal_word_counts(&self, d: usize) -> Vec<u128> {
        let n = self.dim;
        let mut out = vec![1u128];
        if d == 0 {
            return out;
        }
        let mut ending: Vec<u128> = vec![1; n];
        out.push(n as u128);
        for _ in 2..=d {
            let next: Vec<u128> = (0..n)
                .map(|b| {
                    (0..n)
                        .filter(|&a| !self.is_lead(a, b))
                        .map(|a| ending[a])
                        .sum()
                })
                .collect();
            out.push(next.iter().sum());
            ending = next;
        }
        out
    }

    /// All normal words of length `len`, in lexicographic index order.
    pub fn normal_words(&self, len: usize) -> Vec<Vec<usize>> {
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &words {
                for b in 0..self.dim {
                    if w.last().is_some_and(|&a| self.is_lead(a, b)) {
                        continue;
                    }
                    let mut x = w.clone();
                    x.push(b);
                    next.push(x);
                }
            }
            words = next;
        }
        words
    }

    /// Applies `g (x) g` to a tensor in `V (x) V`.
    pub fn act_tensor2(&self, group: &GroupData, g: usize, t: &[Scalar]) -> Vector {
        let n = self.dim;
        let m = group.element(g);
        let mut out = zero_vector(self.field, n * n);
        for a in 0..n {
            for b in 0..n {
                let c = &t[a * n + b];
                if c.is_zero() {
                    continue;
                }
                for x in 0..n {
                    let ma = m.get(x, a);
                    if ma.is_zero() {
                        continue;
                    }
                    for y in 0..n {
                        let mb = m.get(y, b);
                        if !mb.is_zero() {
                            out[x * n + y] += &(c * ma) * mb;
                        }
                    }
                }
            }
        }
        out
    }

    /// Spanning set of `V (x) R` in `V^{(x)3}`, generator `(i, rho)` at `i * dim R + rho`.
    pub fn v_tensor_r(&self) -> Vec<Vector> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for r in &self.r_basis {
                let mut x = zero_vector(self.field, n * n * n);
                for (ab, c) in r.iter().enumerate() {
                    x[i * n * n + ab] = c.clone();
                }
                out.push(x);
            }
        }
        out
    }

    /// Spanning set of `R (x) V`, generator `(rho, k)` at `rho * dim + k`.
    pub fn r_tensor_v(&self) -> Vec<Vector> {
        let n = self.dim;
        let mut out = Vec::new();
        for r in &self.r_basis {
            for k in 0..n {
                let mut x = zero_vector(self.field, n * n * n);
                for (ab, c) in r.iter().enumerate() {
                    x[ab * n + k] = c.clone();
                }
                out.push(x);
            }
        }
        out
    }
}

/// `{ v_j (x) v_i - v_i (x) v_j : i < j }` in lexicographic `(i, j)` order.
pub fn symmetric_relations(field: FieldSpec, dim: usize) -> Vec<Vector> {
    let mut rels = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            let mut r = zero_vector(field, dim * dim);
            r[j * dim + i] = field.one();
            r[i * dim + j] = -field.one();
            rels.push(r);
        }
    }
    rels
}

/// Index of the relation `v_j (x) v_i - v_i (x) v_j` (i < j) in [`symmetric_relations`].
pub fn symmetric_pair_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    (0..i).map(|a| dim - 1 - a).sum::<usize>() + (j - i - 1)
}

/// Summary of a successful validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationSummary {
    pub group_checks: usize,
    pub overlaps: usize,
}

/// Checks G-stability of R and confluence of all degree-3 overlaps of the
/// homogeneous rules.
pub fn validate_presentation(
    p: &QuadraticPresentation,
    group: &GroupData,
) -> Result<ValidationSummary, PresentationError> {
    let n2 = p.dim * p.dim;
    let solver = SpanSolver::new(p.field, n2, &p.r_basis);
    let mut group_checks = 0;
    for g in 0..group.order() {
        for (ri, r) in p.r_basis.iter().enumerate() {
            group_checks += 1;
            if !solver.contains(&p.act_tensor2(group, g, r)) {
                return Err(PresentationError::NotGStable {
                    group: group.name(g).to_string(),
                    relation: ri,
                });
            }
        }
    }
    let rw = Rewriter::homogeneous(p, group);
    let mut overlaps = 0;
    for r1 in &p.rules {
        for r2 in &p.rules {
            if r1.lead.1 != r2.lead.0 {
                continue;
            }
            overlaps += 1;
            let (a, b, c) = (r1.lead.0, r1.lead.1, r2.lead.1);
            let left = free_mul(
                group,
                &rw.rule_rhs(rule_index(p, r1)),
                &FreeElement::monomial(Word::letter(c), p.field.one()),
            );
            let right = free_mul(
                group,
                &FreeElement::monomial(Word::letter(a), p.field.one()),
                &rw.rule_rhs(rule_index(p, r2)),
            );
            let residual = rw
                .normal_form(&(&left - &right))
                .map_err(|e| PresentationError::NotConfluent {
                    word: format!("v{a}*v{b}*v{c}"),
                    residual: e.to_string(),
                })?;
            if !residual.is_zero() {
                return Err(PresentationError::NotConfluent {
                    word: format!("v{a}*v{b}*v{c}"),
                    residual: format_smash(&residual, group),
                });
            }
        }
    }
    Ok(ValidationSummary {
        group_checks,
        overlaps,
    })
}

fn rule_index(p: &QuadraticPresentation, r: &Rule) -> usize {
    p.rule_for_lead(r.lead.0, r.lead.1).expect("rule is registered")
}

/// `(V (x) R) ∩ (R (x) V)` inside `V^{(x)3}`, index `a*n^2 + b*n + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionSpace {
    pub basis: Vec<Vector>,
}

impl IntersectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn intersection_vr_rv(p: &QuadraticPresentation) -> IntersectionSpace {
    let n3 = p.dim * p.dim * p.dim;
    IntersectionSpace {
        basis: intersect_spans(p.field, n3, &p.v_tensor_r(), &p.r_tensor_v()),
    }
}

/// Coefficients `c[rho][k]` with `x = sum c R_rho (x) v_k`.
pub fn r_tensor_v_coords(p: &QuadraticPresentation, x: &[Scalar]) -> Option<Vec<Vector>> {
    let n = p.dim;
    let flat = SpanSolver::new(p.field, n * n * n, &p.r_tensor_v()).coordinates(x)?;
    Some(flat.chunks(n).map(|c| c.to_vec()).collect())
}

/// Coefficients `d[i][rho]` with `x = sum d v_i (x) R_rho`.
pub fn v_tensor_r_coords(p: &QuadraticPresentation, x: &[Scalar]) -> Option<Vec<Vector>> {
    let m = p.r_dim().max(1);
    let flat = SpanSolver::new(p.field, p.dim.pow(3), &p.v_tensor_r()).coordinates(x)?;
    if p.r_dim() == 0 {
        return Some(vec![Vec::new(); p.dim]);
    }
    Some(flat.chunks(m).map(|c| c.to_vec()).collect())
}

/// Dimensions of the degree-j components of `S # G` for `j = 0..=d`.
pub fn graded_dims(p: &QuadraticPresentation, group: &GroupData, d: usize) -> Vec<u128> {
    p.normal_word_counts(d)
        .into_iter()
        .map(|c| c * group.order() as u128)
        .collect()
}

// ---------------------------------------------------------------------------
// Words and free elements
// ---------------------------------------------------------------------------

/// `s_0 v_{l_1} s_1 ... v_{l_n} s_n` with group slots `s_i` (0 = identity).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<usize>,
    pub slots: Vec<usize>,
}

/// One generator of the free product, used to build words conveniently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    G(usize),
    V(usize),
}

impl Word {
    pub fn empty() -> Self {
        Word {
            letters: Vec::new(),
            slots: vec![0],
        }
    }

    pub fn group(g: usize) -> Self {
        Word {
            letters: Vec::new(),
            slots: vec![g],
        }
    }

    pub fn letter(v: usize) -> Self {
        Word {
            letters: vec![v],
            slots: vec![0, 0],
        }
    }

    /// A normal-form word `v_{l_1} ... v_{l_n} g`.
    pub fn normal(letters: Vec<usize>, g: usize) -> Self {
        let mut slots = vec![0; letters.len() + 1];
        slots[letters.len()] = g;
        Word { letters, slots }
    }

    pub fn from_letters(group: &GroupData, letters: &[Letter]) -> Self {
        letters.iter().fold(Word::empty(), |acc, l| {
            let w = match *l {
                Letter::G(g) => Word::group(g),
                Letter::V(v) => Word::letter(v),
            };
            acc.concat(group, &w)
        })
    }

    pub fn concat(&self, group: &GroupData, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        let mut slots = self.slots[..self.slots.len() - 1].to_vec();
        slots.push(group.mult(*self.slots.last().unwrap(), other.slots[0]));
        slots.extend_from_slice(&other.slots[1..]);
        Word { letters, slots }
    }

    pub fn v_len(&self) -> usize {
        self.letters.len()
    }

    /// V-letters plus non-identity group slots.
    pub fn total_len(&self) -> usize {
        self.letters.len() + self.slots.iter().filter(|&&s| s != 0).count()
    }

    pub fn is_normal_shape(&self) -> bool {
        self.slots[..self.letters.len()].iter().all(|&s| s == 0)
    }
}

pub type FreeElement = Sparse<Word>;

/// Normal-form key: reduced V-word followed by one group element.
pub type SmashKey = (Vec<usize>, usize);

/// Element of `S # G` (or of a filtered algebra with a confluent system) in
/// normal form `sum c * w * g`.
pub type SmashElement = Sparse<SmashKey>;

pub fn free_mul(group: &GroupData, a: &FreeElement, b: &FreeElement) -> FreeElement {
    let mut out = Sparse::new();
    for (x, c) in a {
        for (y, d) in b {
            out.add_term(x.concat(group, y), c * d);
        }
    }
    out
}

pub fn free_from_word(field: FieldSpec, w: Word) -> FreeElement {
    Sparse::monomial(w, field.one())
}

pub fn free_from_ga(x: &GroupAlgebraElement) -> FreeElement {
    x.map_keys(|&g| Word::group(g))
}

pub fn free_from_vkg(x: &VkGElement) -> FreeElement {
    x.map_keys(|&(i, g)| Word::normal(vec![i], g))
}

pub fn free_from_smash(x: &SmashElement) -> FreeElement {
    x.map_keys(|(w, g)| Word::normal(w.clone(), *g))
}

/// `sum_{a,b} t_{ab} v_a v_b h`.
pub fn free_from_tensor2(dim: usize, t: &[Scalar], h: usize) -> FreeElement {
    t.iter()
        .enumerate()
        .map(|(ab, c)| (Word::normal(vec![ab / dim, ab % dim], h), c.clone()))
        .collect()
}

/// `sum_{a,b,c} t_{abc} v_a v_b v_c`.
pub fn free_from_tensor3(dim: usize, t: &[Scalar]) -> FreeElement {
    t.iter()
        .enumerate()
        .map(|(i, c)| {
            let w = vec![i / (dim * dim), (i / dim) % dim, i % dim];
            (Word::normal(w, 0), c.clone())
        })
        .collect()
}

/// `sum_i v_i c_i`.
pub fn free_from_vector(v: &[Scalar]) -> FreeElement {
    v.iter()
        .enumerate()
        .map(|(i, c)| (Word::letter(i), c.clone()))
        .collect()
}

/// Largest word length present (0 for the zero element).
pub fn smash_degree(x: &SmashElement) -> usize {
    x.keys().map(|(w, _)| w.len()).max().unwrap_or(0)
}

/// Terms of word length exactly `deg`.
pub fn smash_component(x: &SmashElement, deg: usize) -> SmashElement {
    x.filter(|(w, _)| w.len() == deg)
}

/// Degree-0 part as a group algebra element.
pub fn smash_to_ga(x: &SmashElement) -> GroupAlgebraElement {
    let mut out = Sparse::new();
    for ((w, g), c) in x {
        if w.is_empty() {
            out.add_term(*g, c.clone());
        }
    }
    out
}

/// Degree-1 part as an element of V (x) kG.
pub fn smash_to_vkg(x: &SmashElement) -> VkGElement {
    let mut out = Sparse::new();
    for ((w, g), c) in x {
        if w.len() == 1 {
            out.add_term((w[0], *g), c.clone());
        }
    }
    out
}

pub fn format_word(group: &GroupData, w: &Word) -> String {
    let mut parts = Vec::new();
    for (i, &l) in w.letters.iter().enumerate() {
        if w.slots[i] != 0 {
            parts.push(group.name(w.slots[i]).to_string());
        }
        parts.push(format!("v{l}"));
    }
    let last = *w.slots.last().unwrap();
    if last != 0 || parts.is_empty() {
        parts.push(group.name(last).to_string());
    }
    parts.join("*")
}

/// Canonical text form `c*v0*v1*g0 + ...` used in witnesses.
pub fn format_smash(x: &SmashElement, group: &GroupData) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, ((w, g), c)) in x.iter().enumerate() {
        if i > 0 {
            s.push_str(" + ");
        }
        let word = format_word(group, &Word::normal(w.clone(), *g));
        let _ = write!(s, "{c}*{word}");
    }
    s
}

// ---------------------------------------------------------------------------
// Rewriting
// ---------------------------------------------------------------------------

/// Lower-order terms of a filtered rewrite system: `g v -> g.v g + lambda(g,v)`
/// and `lead -> tail + alpha(r) + beta(r)` per rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerTerms {
    /// Indexed `[g][v]`.
    pub lambda: Vec<Vec<GroupAlgebraElement>>,
    pub rule_alpha: Vec<VkGElement>,
    pub rule_beta: Vec<GroupAlgebraElement>,
}

impl LowerTerms {
    pub fn zero(group_order: usize, dim: usize, rules: usize) -> Self {
        LowerTerms {
            lambda: vec![vec![Sparse::new(); dim]; group_order],
            rule_alpha: vec![Sparse::new(); rules],
            rule_beta: vec![Sparse::new(); rules],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.iter().flatten().all(Sparse::is_zero)
            && self.rule_alpha.iter().all(Sparse::is_zero)
            && self.rule_beta.iter().all(Sparse::is_zero)
    }
}

pub const DEFAULT_DEPTH_LIMIT: usize = 4096;

/// Leftmost-first normal-form engine with memoization.
pub struct Rewriter<'a> {
    pres: &'a QuadraticPresentation,
    group: &'a GroupData,
    lower: LowerTerms,
    depth_limit: usize,
    memo: RefCell<HashMap<Word, SmashElement>>,
}

impl<'a> Rewriter<'a> {
    pub fn new(pres: &'a QuadraticPresentation, group: &'a GroupData, lower: LowerTerms) -> Self {
        assert_eq!(lower.lambda.len(), group.order());
        assert_eq!(lower.rule_alpha.len(), pres.rules().len());
        Rewriter {
            pres,
            group,
            lower,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// The system of `S # G` itself.
    pub fn homogeneous(pres: &'a QuadraticPresentation, group: &'a GroupData) -> Self {
        let lower = LowerTerms::zero(group.order(), pres.dim(), pres.rules().len());
        Self::new(pres, group, lower)
    }

    pub fn with_depth_limit(mut self, limit: usize) -> Self {
        self.depth_limit = limit;
        self
    }

    pub fn presentation(&self) -> &QuadraticPresentation {
        self.pres
    }

    pub fn group(&self) -> &GroupData {
        self.group
    }

    pub fn lower(&self) -> &LowerTerms {
        &self.lower
    }

    fn field(&self) -> FieldSpec {
        self.pres.field()
    }

    /// Right side of `g v_i -> g.v_i g + lambda(g, v_i)`.
    pub fn straighten_rhs(&self, g: usize, i: usize) -> FreeElement {
        let mut out = free_from_vkg(&self.group.sigma(g, &unit(self.field(), self.pres.dim(), i)));
        out.add_assign(&free_from_ga(&self.lower.lambda[g][i]));
        out
    }

    /// Right side of rule `k`: `tail + alpha + beta`.
    pub fn rule_rhs(&self, k: usize) -> FreeElement {
        let rule = &self.pres.rules()[k];
        let mut out = free_from_tensor2(self.pres.dim(), &rule.tail, 0);
        out.add_assign(&free_from_vkg(&self.lower.rule_alpha[k]));
        out.add_assign(&free_from_ga(&self.lower.rule_beta[k]));
        out
    }

    /// One rewrite at the leftmost redex, or `None` if the word is normal.
    pub fn one_step(&self, w: &Word) -> Option<FreeElement> {
        let n = w.letters.len();
        for k in 0..n {
            if w.slots[k] != 0 {
                let prefix = Word {
                    letters: w.letters[..k].to_vec(),
                    slots: {
                        let mut s = w.slots[..k].to_vec();
                        s.push(0);
                        s
                    },
                };
                let suffix = Word {
                    letters: w.letters[k + 1..].to_vec(),
                    slots: w.slots[k + 1..].to_vec(),
                };
                let mid = self.straighten_rhs(w.slots[k], w.letters[k]);
                return Some(self.sandwich(&prefix, &mid, &suffix));
            }
            if k + 1 < n && w.slots[k + 1] == 0 {
                if let Some(r) = self.pres.rule_for_lead(w.letters[k], w.letters[k + 1]) {
                    let prefix = Word {
                        letters: w.letters[..k].to_vec(),
                        slots: w.slots[..=k].to_vec(),
                    };
                    let suffix = Word {
                        letters: w.letters[k + 2..].to_vec(),
                        slots: w.slots[k + 2..].to_vec(),
                    };
                    return Some(self.sandwich(&prefix, &self.rule_rhs(r), &suffix));
                }
            }
        }
        None
    }

    fn sandwich(&self, prefix: &Word, mid: &FreeElement, suffix: &Word) -> FreeElement {
        let mut out = Sparse::new();
        for (m, c) in mid {
            out.add_term(prefix.concat(self.group, m).concat(self.group, suffix), c.clone());
        }
        out
    }

    pub fn normal_form(&self, x: &FreeElement) -> Result<SmashElement, RewriteError> {
        let mut out = Sparse::new();
        for (w, c) in x {
            let nf = self.nf_word(w, 0)?;
            out.add_scaled(&nf, c);
        }
        Ok(out)
    }

    pub fn nf_word(&self, w: &Word, depth: usize) -> Result<SmashElement, RewriteError> {
        if let Some(hit) = self.memo.borrow().get(w) {
            return Ok(hit.clone());
        }
        if depth > self.depth_limit {
            return Err(RewriteError::NonTermination(self.depth_limit));
        }
        let result = match self.one_step(w) {
            None => Sparse::monomial(
                (w.letters.clone(), *w.slots.last().unwrap()),
                self.field().one(),
            ),
            Some(next) => {
                let mut acc = Sparse::new();
                for (t, c) in &next {
                    let nf = self.nf_word(t, depth + 1)?;
                    acc.add_scaled(&nf, c);
                }
                acc
            }
        };
        self.memo.borrow_mut().insert(w.clone(), result.clone());
        Ok(result)
    }

    /// Product of two normal forms, reduced.
    pub fn mul(&self, a: &SmashElement, b: &SmashElement) -> Result<SmashElement, RewriteError> {
        self.normal_form(&free_mul(self.group, &free_from_smash(a), &free_from_smash(b)))
    }

    pub fn reduce_letters(&self, letters: &[Letter]) -> Result<SmashElement, RewriteError> {
        self.nf_word(&Word::from_letters(self.group, letters), 0)
    }
}

fn unit(field: FieldSpec, n: usize, i: usize) -> Vector {
    crate::scalars::unit_vector(field, n, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::close_group;
    use crate::scalars::Matrix;

    fn sym(field: FieldSpec, n: usize) -> (QuadraticPresentation, GroupData) {
        (
            QuadraticPresentation::symmetric(field, n),
            GroupData::trivial(field, n),
        )
    }

    #[test]
    fn symmetric_rules_sort() {
        let (p, g) = sym(FieldSpec::Rational, 3);
        assert_eq!(p.rules().len(), 3);
        assert!(p.is_lead(2, 1));
        let rw = Rewriter::homogeneous(&p, &g);
        let nf = rw
            .reduce_letters(&[Letter::V(1), Letter::V(0), Letter::V(0)])
            .unwrap();
        assert_eq!(nf, Sparse::monomial((vec![0, 0, 1], 0), FieldSpec::Rational.one()));
        assert!(p.is_symmetric_algebra());
    }

    #[test]
    fn pair_index_matches_relation_list() {
        let f = FieldSpec::Rational;
        let rels = symmetric_relations(f, 4);
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(rels[symmetric_pair_index(4, i, j)][j * 4 + i].is_one());
            }
        }
    }

    #[test]
    fn shear_conjugation() {
        let f = FieldSpec::prime(3).unwrap();
        let s = Matrix::from_i64_rows(f, &[&[1, 1], &[0, 1]]);
        let g = close_group(f, 2, &[s], 8).unwrap();
        let p = QuadraticPresentation::symmetric(f, 2);
        validate_presentation(&p, &g).unwrap();
        let rw = Rewriter::homogeneous(&p, &g);
        let nf = rw
            .reduce_letters(&[Letter::G(1), Letter::V(1), Letter::G(2)])
            .unwrap();
        let expected: SmashElement = [((vec![0], 0), f.one()), ((vec![1], 0), f.one())]
            .into_iter()
            .collect();
        assert_eq!(nf, expected);
    }

    #[test]
    fn graded_dimension_counts() {
        let f = FieldSpec::prime(5).unwrap();
        let s = Matrix::from_i64_rows(f, &[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]);
        let g = close_group(f, 3, &[s], 16).unwrap();
        let p = QuadraticPresentation::symmetric(f, 3);
        assert_eq!(graded_dims(&p, &g, 3), vec![5, 15, 30, 50]);
        assert_eq!(graded_dims(&p, &g, 0), vec![5]);
        let q = QuadraticPresentation::skew_polynomial(
            f,
            2,
            &[vec![f.zero(), f.from_i64(2)], vec![f.zero(), f.zero()]],
        );
        assert_eq!(graded_dims(&q, &GroupData::trivial(f, 2), 3), vec![1, 2, 3, 4]);
    }

    #[test]
    fn quantum_plane_validates() {
        let f = FieldSpec::Rational;
        let q = QuadraticPresentation::skew_polynomial(
            f,
            2,
            &[vec![f.zero(), f.from_i64(3)], vec![f.zero(), f.zero()]],
        );
        let s = validate_presentation(&q, &GroupData::trivial(f, 2)).unwrap();
        assert_eq!(s.overlaps, 0);
    }

    #[test]
    fn intersection_dimensions() {
        let f = FieldSpec::Rational;
        assert_eq!(intersection_vr_rv(&QuadraticPresentation::symmetric(f, 2)).dim(), 0);
        assert_eq!(intersection_vr_rv(&QuadraticPresentation::symmetric(f, 3)).dim(), 1);
        let free = QuadraticPresentation::new(f, 2, vec![], None, None).unwrap();
        assert_eq!(intersection_vr_rv(&free).dim(), 0);
    }

    #[test]
    fn non_confluent_rules_are_rejected() {
        // v1 v1 -> v0 v0: the overlap v1 v1 v1 ends in v0 v0 v1 versus v1 v0 v0
        let f = FieldSpec::Rational;
        let mut r = zero_vector(f, 4);
        r[3] = f.one();
        r[0] = -f.one();
        let p = QuadraticPresentation::new(f, 2, vec![r], None, None).unwrap();
        let err = validate_presentation(&p, &GroupData::trivial(f, 2)).unwrap_err();
        assert!(matches!(err, PresentationError::NotConfluent { .. }));
    }

    #[test]
    fn user_rules_checked() {
        let f = FieldSpec::Rational;
        let rels = symmetric_relations(f, 2);
        let mut tail = zero_vector(f, 4);
        tail[1] = f.one();
        let p = QuadraticPresentation::new(f, 2, rels.clone(), None, Some(vec![((1, 0), tail.clone())]))
            .unwrap();
        assert_eq!(p.rules()[0].relation_coords, vec![f.one()]);
        // wrong orientation: lead below its tail
        let mut t2 = zero_vector(f, 4);
        t2[2] = f.one();
        assert!(QuadraticPresentation::new(f, 2, rels, None, Some(vec![((0, 1), t2)])).is_err());
    }
}
