//! Overlap resolution for the filtered rewriting system of `H`, and a capped
//! brute-force computation of filtered dimensions.
//!
//! The system consists of the group rule `g h -> gh` (built into [`Word`]),
//! straightening `g v -> g.v g + lambda(g, v)`, and one rule
//! `lead -> tail + alpha(r) + beta(r)` per quadratic rewrite rule. It
//! terminates, so it is confluent exactly when every overlap ambiguity
//! resolves, which is exactly when the normal words form a basis of `H`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::group::GroupData;
use crate::params::{DeformationPresentation, ParamError};
use crate::quadratic::{
    format_word, free_from_ga, free_from_vkg, free_mul, graded_dims, smash_component,
    smash_degree, FreeElement, Letter, QuadraticPresentation, RewriteError, Rewriter,
    SmashElement, Word,
};
use crate::scalars::{unit_vector, FieldSpec, Scalar};
use crate::sparse::Sparse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiamondError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("group multiplication table is not associative at ({0}, {1}, {2})")]
    GroupTableNotAssociative(String, String, String),
    #[error("instance too large for brute force: about {estimate} generators (limit {limit})")]
    InstanceTooLarge { estimate: usize, limit: usize },
}

/// The filtered system of one deformation, ready for reduction.
pub struct FilteredRewriteSystem<'a> {
    pub deformation: &'a DeformationPresentation,
    pub rewriter: Rewriter<'a>,
}

pub fn build_rewrite_system(
    d: &DeformationPresentation,
) -> Result<FilteredRewriteSystem<'_>, DiamondError> {
    let lower = d.lower_terms()?;
    Ok(FilteredRewriteSystem {
        deformation: d,
        rewriter: Rewriter::new(&d.quadratic, &d.group, lower),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OverlapKind {
    /// `g h k`
    GroupTriple,
    /// `g h v`
    GroupGroupLetter,
    /// `g` followed by a leading monomial
    GroupLead,
    /// two leading monomials sharing a letter
    LeadLead,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapResult {
    pub kind: OverlapKind,
    pub word: String,
    /// First path minus second path, in normal form.
    pub residual: SmashElement,
}

impl OverlapResult {
    /// Condition ids matching the nonzero homogeneous parts of the residual.
    pub fn conditions(&self) -> Vec<&'static str> {
        let degs: Vec<usize> = (0..=smash_degree(&self.residual))
            .filter(|&k| !smash_component(&self.residual, k).is_zero())
            .collect();
        let name = |k: usize| -> &'static str {
            match (self.kind, k) {
                (OverlapKind::GroupGroupLetter, _) => "1",
                (OverlapKind::GroupLead, 1) => "3",
                (OverlapKind::GroupLead, _) => "2",
                (OverlapKind::LeadLead, 2) => "6",
                (OverlapKind::LeadLead, 1) => "4",
                (OverlapKind::LeadLead, _) => "5",
                (OverlapKind::GroupTriple, _) => "group",
            }
        };
        let mut out: Vec<&'static str> = degs.into_iter().map(name).collect();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondReport {
    pub pbw: bool,
    /// Number of ambiguities examined, by kind.
    pub checked: BTreeMap<OverlapKind, usize>,
    /// Every ambiguity that failed to resolve.
    pub failures: Vec<OverlapResult>,
}

impl DiamondReport {
    /// Failure counts per condition id.
    pub fn failures_by_condition(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for f in &self.failures {
            for c in f.conditions() {
                *out.entry(c).or_insert(0) += 1;
            }
        }
        out
    }
}

fn check_group_associativity(group: &GroupData) -> Result<usize, DiamondError> {
    // Associativity with the third argument a generator implies it for all
    // third arguments, by induction on word length.
    let n = group.order();
    let mut count = 0;
    for k in 0..group.generators().len() {
        let s = group.generator_index(k);
        for g in 0..n {
            for h in 0..n {
                count += 1;
                if group.mult(group.mult(g, h), s) != group.mult(g, group.mult(h, s)) {
                    return Err(DiamondError::GroupTableNotAssociative(
                        group.name(g).into(),
                        group.name(h).into(),
                        group.name(s).into(),
                    ));
                }
            }
        }
    }
    Ok(count)
}

/// Reduces both sides of every ambiguity and collects the residuals.
pub fn resolve_overlaps(frs: &FilteredRewriteSystem) -> Result<DiamondReport, DiamondError> {
    let d = frs.deformation;
    let rw = &frs.rewriter;
    let group = &d.group;
    let pres = &d.quadratic;
    let field = d.field;
    let n = pres.dim();
    let one = |w: Word| -> FreeElement { Sparse::monomial(w, field.one()) };
    let mut checked = BTreeMap::new();
    let mut failures = Vec::new();

    checked.insert(OverlapKind::GroupTriple, check_group_associativity(group)?);

    let mut count = 0;
    for g in 1..group.order() {
        for h in 1..group.order() {
            for i in 0..n {
                count += 1;
                // (g h) v  versus  g (h v)
                let a = one(Word::from_letters(group, &[Letter::G(group.mult(g, h)), Letter::V(i)]));
                let b = free_mul(group, &one(Word::group(g)), &rw.straighten_rhs(h, i));
                let residual = rw.normal_form(&(&b - &a))?;
                if !residual.is_zero() {
                    failures.push(OverlapResult {
                        kind: OverlapKind::GroupGroupLetter,
                        word: format!("{}*{}*v{i}", group.name(g), group.name(h)),
                        residual,
                    });
                }
            }
        }
    }
    checked.insert(OverlapKind::GroupGroupLetter, count);

    let mut count = 0;
    for g in 1..group.order() {
        for (k, rule) in pres.rules().iter().enumerate() {
            count += 1;
            let (a, b) = rule.lead;
            // g (v_a v_b)  versus  (g v_a) v_b
            let left = free_mul(group, &one(Word::group(g)), &rw.rule_rhs(k));
            let right = free_mul(group, &rw.straighten_rhs(g, a), &one(Word::letter(b)));
            let residual = rw.normal_form(&(&left - &right))?;
            if !residual.is_zero() {
                failures.push(OverlapResult {
                    kind: OverlapKind::GroupLead,
                    word: format!("{}*v{a}*v{b}", group.name(g)),
                    residual,
                });
            }
        }
    }
    checked.insert(OverlapKind::GroupLead, count);

    let mut count = 0;
    for (k1, r1) in pres.rules().iter().enumerate() {
        for (k2, r2) in pres.rules().iter().enumerate() {
            if r1.lead.1 != r2.lead.0 {
                continue;
            }
            count += 1;
            let (a, b, c) = (r1.lead.0, r1.lead.1, r2.lead.1);
            // (v_a v_b) v_c  versus  v_a (v_b v_c)
            let left = free_mul(group, &rw.rule_rhs(k1), &one(Word::letter(c)));
            let right = free_mul(group, &one(Word::letter(a)), &rw.rule_rhs(k2));
            let residual = rw.normal_form(&(&left - &right))?;
            if !residual.is_zero() {
                failures.push(OverlapResult {
                    kind: OverlapKind::LeadLead,
                    word: format!("v{a}*v{b}*v{c}"),
                    residual,
                });
            }
        }
    }
    checked.insert(OverlapKind::LeadLead, count);

    Ok(DiamondReport {
        pbw: failures.is_empty(),
        checked,
        failures,
    })
}

/// Builds the system and resolves all overlaps.
pub fn diamond_check(d: &DeformationPresentation) -> Result<DiamondReport, DiamondError> {
    resolve_overlaps(&build_rewrite_system(d)?)
}

// ---------------------------------------------------------------------------
// Brute-force filtered dimensions
// ---------------------------------------------------------------------------

pub const BRUTE_FORCE_LIMIT: usize = 400_000;

/// Defining relations of `H` as elements of `T_{kG}(kG (x) V (x) kG)`:
/// `g v - g.v g - lambda(g, v)` for `g != 1`, and `r - alpha(r) - beta(r)`.
pub fn defining_relations(d: &DeformationPresentation) -> Result<Vec<FreeElement>, DiamondError> {
    let p = d.general_params()?;
    let group = &d.group;
    let n = d.dim();
    let field = d.field;
    let mut out = Vec::new();
    for g in 1..group.order() {
        for i in 0..n {
            let mut x: FreeElement = Sparse::monomial(
                Word::from_letters(group, &[Letter::G(g), Letter::V(i)]),
                field.one(),
            );
            x.sub_assign(&free_from_vkg(&group.sigma(g, &unit_vector(field, n, i))));
            x.sub_assign(&free_from_ga(&p.lambda[g][i]));
            out.push(x);
        }
    }
    for (rho, r) in d.quadratic.r_basis().iter().enumerate() {
        let mut x = crate::quadratic::free_from_tensor2(n, r, 0);
        x.sub_assign(&free_from_vkg(&p.alpha[rho]));
        x.sub_assign(&free_from_ga(&p.beta[rho]));
        out.push(x);
    }
    Ok(out)
}

/// All words with exactly `len` V-letters and arbitrary group slots.
fn words_of_v_len(group_order: usize, dim: usize, len: usize) -> Vec<Word> {
    let mut letter_seqs: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        letter_seqs = letter_seqs
            .into_iter()
            .flat_map(|s| (0..dim).map(move |i| [s.as_slice(), &[i]].concat()))
            .collect();
    }
    let mut slot_seqs: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..=len {
        slot_seqs = slot_seqs
            .into_iter()
            .flat_map(|s| (0..group_order).map(move |g| [s.as_slice(), &[g]].concat()))
            .collect();
    }
    let mut out = Vec::with_capacity(letter_seqs.len() * slot_seqs.len());
    for l in &letter_seqs {
        for s in &slot_seqs {
            out.push(Word {
                letters: l.clone(),
                slots: s.clone(),
            });
        }
    }
    out
}

fn count_words(group_order: usize, dim: usize, len: usize) -> usize {
    group_order
        .saturating_pow(len as u32 + 1)
        .saturating_mul(dim.saturating_pow(len as u32))
}

/// Echelon basis keyed by leading word, with higher V-length leading.
struct FilteredEchelon {
    field: FieldSpec,
    pivots: HashMap<Word, Sparse<(usize, Word)>>,
}

impl FilteredEchelon {
    fn insert(&mut self, x: &FreeElement) {
        let mut row: Sparse<(usize, Word)> = x.map_keys(|w| (w.v_len(), w.clone()));
        loop {
            let Some(((_, lead), c)) = row.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
                return;
            };
            match self.pivots.get(&lead) {
                Some(p) => {
                    let f = -&c;
                    row.add_scaled(p, &f);
                }
                None => {
                    let inv = c.inv().expect("nonzero lead");
                    let row = row.scale(&inv);
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }
}

/// Upper bounds on `dim F^j(H)` for `j = 0..=d` from the ideal generators
/// `a p b` with at most `v_cap` V-letters in total; group letters are free
/// since the group is finite. A value below the cumulative dimension of
/// `S # G` proves the PBW property fails.
pub fn brute_force_filtered_dim(
    dfm: &DeformationPresentation,
    d: usize,
    v_cap: usize,
) -> Result<Vec<u128>, DiamondError> {
    let group = &dfm.group;
    let n = dfm.dim();
    let order = group.order();
    let rels = defining_relations(dfm)?;
    let rel_len: Vec<usize> = rels.iter().map(|p| p.keys().map(Word::v_len).max().unwrap_or(0)).collect();
    let shortest = rel_len.iter().copied().min().unwrap_or(0);
    let side = v_cap.saturating_sub(shortest);
    let counts: Vec<usize> = (0..=side).map(|l| count_words(order, n, l)).collect();
    let mut estimate = 0usize;
    for &len in &rel_len {
        let room = v_cap.saturating_sub(len);
        for l1 in 0..=room {
            for l2 in 0..=room - l1 {
                estimate = estimate.saturating_add(counts[l1].saturating_mul(counts[l2]));
            }
        }
    }
    if estimate > BRUTE_FORCE_LIMIT {
        return Err(DiamondError::InstanceTooLarge {
            estimate,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let words: Vec<Vec<Word>> = (0..=side).map(|l| words_of_v_len(order, n, l)).collect();
    let mut ech = FilteredEchelon {
        field: dfm.field,
        pivots: HashMap::new(),
    };
    for (p, &len) in rels.iter().zip(&rel_len) {
        let room = v_cap.saturating_sub(len);
        if len > v_cap {
            continue;
        }
        for l1 in 0..=room {
            for a in &words[l1] {
                let ap = free_mul(group, &Sparse::monomial(a.clone(), ech.field.one()), p);
                for b in words[..=room - l1].iter().flatten() {
                    ech.insert(&free_mul(group, &ap, &Sparse::monomial(b.clone(), ech.field.one())));
                }
            }
        }
    }
    let mut ideal_by_len = vec![0u128; d + 1];
    for ((vlen, _), _) in ech.pivots.values().map(|r| r.iter().next_back().unwrap()) {
        if *vlen <= d {
            ideal_by_len[*vlen] += 1;
        }
    }
    let mut out = Vec::with_capacity(d + 1);
    let mut ambient = 0u128;
    let mut ideal = 0u128;
    for j in 0..=d {
        ambient += (order as u128).pow(j as u32 + 1) * (n as u128).pow(j as u32);
        ideal += ideal_by_len[j];
        out.push(ambient - ideal);
    }
    Ok(out)
}

/// `sum_{i<=j} dim (S # G)_i` for `j = 0..=d`.
pub fn cumulative_graded_dims(p: &QuadraticPresentation, group: &GroupData, d: usize) -> Vec<u128> {
    let mut acc = 0;
    graded_dims(p, group, d)
        .into_iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

/// Normal form of a product in `H` (valid when the system is confluent).
pub fn reduce_in_h(
    frs: &FilteredRewriteSystem,
    x: &FreeElement,
) -> Result<SmashElement, DiamondError> {
    Ok(frs.rewriter.normal_form(x)?)
}

/// Readable rendering of a free element.
pub fn format_free(group: &GroupData, x: &FreeElement) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.iter()
        .map(|(w, c): (&Word, &Scalar)| format!("{c}*{}", format_word(group, w)))
        .collect::<Vec<_>>()
        .join(" + ")
}
