//! JSON instance documents: parsing, validation into a
//! [`DeformationPresentation`], and canonical serialization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use pbwforge_core::group::{close_group, GroupAlgebraElement, GroupData, VkGElement, DEFAULT_GROUP_CAP};
use pbwforge_core::params::{DeformationPresentation, LambdaTable, ParameterSet, Parameters, PolyParameterSet};
use pbwforge_core::quadratic::{symmetric_relations, validate_presentation, QuadraticPresentation};
use pbwforge_core::scalars::{zero_vector, FieldSpec, Matrix, Scalar, Vector};
use pbwforge_core::sparse::Sparse;

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// An integer, or a string holding an integer or a fraction `"n/d"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Int(i64),
    Text(String),
}

pub type Coefficients = BTreeMap<String, ScalarDoc>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub format_version: u32,
    pub field: FieldDoc,
    pub group: GroupDoc,
    pub algebra: AlgebraDoc,
    #[serde(default)]
    pub parameters: ParametersDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    /// `"prime"` or `"rational"`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    /// Generator matrices, row-major, acting on column vectors.
    #[serde(default)]
    pub generators: Vec<Vec<Vec<ScalarDoc>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationsDoc {
    /// Only `"symmetric"`.
    Shorthand(String),
    /// Each relation maps monomials `"v1*v0"` to coefficients.
    List(Vec<Coefficients>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    pub lead: String,
    #[serde(default)]
    pub tail: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub dim: usize,
    pub relations: RelationsDoc,
    /// Letter ranking, lowest first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<RuleDoc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaDoc {
    pub group: String,
    pub vector: usize,
    pub value: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub pair: [usize; 2],
    pub value: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationValueDoc {
    pub relation: usize,
    pub value: Coefficients,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametersDoc {
    /// `"poly"` or `"general"`; inferred when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambda: Vec<LambdaDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kappa_c: Vec<PairDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kappa_l: Vec<PairDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<RelationValueDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<RelationValueDoc>,
}

pub fn parse_instance(text: &str) -> Result<InstanceDocument, CliError> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.format_version != FORMAT_VERSION {
        return Err(invalid(
            "format_version",
            format!("unsupported version {}, expected {FORMAT_VERSION}", doc.format_version),
        ));
    }
    Ok(doc)
}

pub fn to_json(doc: &InstanceDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

fn invalid(path: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Validation {
        path: path.into(),
        message: message.to_string(),
    }
}

fn scalar(field: FieldSpec, s: &ScalarDoc, path: &str) -> Result<Scalar, CliError> {
    match s {
        ScalarDoc::Int(n) => Ok(field.from_i64(*n)),
        ScalarDoc::Text(t) => field.parse_scalar(t).map_err(|e| invalid(path, e)),
    }
}

pub(crate) fn scalar_doc(s: &Scalar) -> ScalarDoc {
    let text = s.to_text();
    match text.parse::<i64>() {
        Ok(n) => ScalarDoc::Int(n),
        Err(_) => ScalarDoc::Text(text),
    }
}

/// Parses `"v3"` into 3.
fn parse_letter(s: &str, dim: usize) -> Option<usize> {
    let i: usize = s.trim().strip_prefix('v')?.parse().ok()?;
    (i < dim).then_some(i)
}

fn parse_monomial(key: &str, dim: usize, path: &str) -> Result<(usize, usize), CliError> {
    let bad = || invalid(path, format!("`{key}` is not a monomial v_a*v_b with indices below {dim}"));
    let (a, b) = key.split_once('*').ok_or_else(bad)?;
    Ok((parse_letter(a, dim).ok_or_else(bad)?, parse_letter(b, dim).ok_or_else(bad)?))
}

fn tensor2(field: FieldSpec, dim: usize, c: &Coefficients, path: &str) -> Result<Vector, CliError> {
    let mut v = zero_vector(field, dim * dim);
    for (k, x) in c {
        let (a, b) = parse_monomial(k, dim, path)?;
        v[a * dim + b] += &scalar(field, x, &format!("{path}.{k}"))?;
    }
    Ok(v)
}

fn tensor2_doc(dim: usize, v: &[Scalar]) -> Coefficients {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (format!("v{}*v{}", k / dim, k % dim), scalar_doc(c)))
        .collect()
}

fn group_element(group: &GroupData, word: &str, path: &str) -> Result<usize, CliError> {
    group.parse_word(word).map_err(|e| invalid(path, e))
}

fn ga(field: FieldSpec, group: &GroupData, c: &Coefficients, path: &str) -> Result<GroupAlgebraElement, CliError> {
    let mut x = Sparse::new();
    for (k, s) in c {
        let p = format!("{path}.{k}");
        x.add_term(group_element(group, k, &p)?, scalar(field, s, &p)?);
    }
    Ok(x)
}

pub(crate) fn ga_doc(group: &GroupData, x: &GroupAlgebraElement) -> Coefficients {
    x.iter().map(|(&g, c)| (group.name(g).to_string(), scalar_doc(c))).collect()
}

/// Keys `"v1"` (tensor the identity) or `"v1*g0^2"`.
fn vkg(field: FieldSpec, group: &GroupData, dim: usize, c: &Coefficients, path: &str) -> Result<VkGElement, CliError> {
    let mut x = Sparse::new();
    for (k, s) in c {
        let p = format!("{path}.{k}");
        let (v, g) = match k.split_once('*') {
            Some((v, g)) => (v, group_element(group, g, &p)?),
            None => (k.as_str(), group.identity()),
        };
        let i = parse_letter(v, dim).ok_or_else(|| invalid(&p, format!("`{k}` is not v_i or v_i*<group word>")))?;
        x.add_term((i, g), scalar(field, s, &p)?);
    }
    Ok(x)
}

fn vkg_doc(group: &GroupData, x: &VkGElement) -> Coefficients {
    x.iter()
        .map(|(&(i, g), c)| {
            let key = if g == group.identity() {
                format!("v{i}")
            } else {
                format!("v{i}*{}", group.name(g))
            };
            (key, scalar_doc(c))
        })
        .collect()
}

fn build_field(doc: &FieldDoc) -> Result<FieldSpec, CliError> {
    match (doc.kind.as_str(), doc.modulus) {
        ("prime", Some(p)) => FieldSpec::prime(p).map_err(|e| invalid("field.modulus", e)),
        ("prime", None) => Err(invalid("field.modulus", "a prime field needs a modulus")),
        ("rational", None) => Ok(FieldSpec::rational()),
        ("rational", Some(_)) => Err(invalid("field.modulus", "the rational field takes no modulus")),
        (other, _) => Err(invalid("field.kind", format!("unknown field kind `{other}`, expected prime or rational"))),
    }
}

fn build_group(field: FieldSpec, dim: usize, doc: &GroupDoc) -> Result<GroupData, CliError> {
    let mut gens = Vec::new();
    for (k, m) in doc.generators.iter().enumerate() {
        let path = format!("group.generators[{k}]");
        if m.len() != dim || m.iter().any(|row| row.len() != dim) {
            return Err(invalid(&path, format!("expected a {dim} x {dim} matrix")));
        }
        let mut rows = Vec::new();
        for (r, row) in m.iter().enumerate() {
            let row: Result<Vector, CliError> = row
                .iter()
                .enumerate()
                .map(|(c, x)| scalar(field, x, &format!("{path}[{r}][{c}]")))
                .collect();
            rows.push(row?);
        }
        gens.push(Matrix::from_rows(field, dim, rows));
    }
    close_group(field, dim, &gens, doc.cap.unwrap_or(DEFAULT_GROUP_CAP)).map_err(|e| invalid("group", e))
}

fn build_algebra(field: FieldSpec, doc: &AlgebraDoc) -> Result<QuadraticPresentation, CliError> {
    let n = doc.dim;
    if n == 0 {
        return Err(invalid("algebra.dim", "dimension must be positive"));
    }
    let rels = match &doc.relations {
        RelationsDoc::Shorthand(s) if s == "symmetric" => symmetric_relations(field, n),
        RelationsDoc::Shorthand(s) => {
            return Err(invalid("algebra.relations", format!("unknown shorthand `{s}`, expected symmetric")))
        }
        RelationsDoc::List(list) => list
            .iter()
            .enumerate()
            .map(|(k, c)| tensor2(field, n, c, &format!("algebra.relations[{k}]")))
            .collect::<Result<_, _>>()?,
    };
    let rules = match &doc.rules {
        None => None,
        Some(rules) => Some(
            rules
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let path = format!("algebra.rules[{k}]");
                    let lead = parse_monomial(&r.lead, n, &format!("{path}.lead"))?;
                    Ok((lead, tensor2(field, n, &r.tail, &format!("{path}.tail"))?))
                })
                .collect::<Result<Vec<_>, CliError>>()?,
        ),
    };
    if let Some(order) = &doc.order {
        let mut sorted = order.clone();
        sorted.sort();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(invalid("algebra.order", format!("expected a permutation of 0..{n}")));
        }
    }
    QuadraticPresentation::new(field, n, rels, doc.order.clone(), rules).map_err(|e| invalid("algebra", e))
}

fn build_lambda(field: FieldSpec, group: &GroupData, dim: usize, docs: &[LambdaDoc]) -> Result<LambdaTable, CliError> {
    let mut t = pbwforge_core::params::zero_lambda(group.order(), dim);
    let mut seen = std::collections::BTreeSet::new();
    for (k, e) in docs.iter().enumerate() {
        let path = format!("parameters.lambda[{k}]");
        let g = group_element(group, &e.group, &format!("{path}.group"))?;
        if e.vector >= dim {
            return Err(invalid(format!("{path}.vector"), format!("index must be below {dim}")));
        }
        if !seen.insert((g, e.vector)) {
            return Err(invalid(&path, "duplicate entry"));
        }
        t[g][e.vector] = ga(field, group, &e.value, &format!("{path}.value"))?;
    }
    Ok(t)
}

fn check_pair(pair: [usize; 2], dim: usize, path: &str) -> Result<(usize, usize), CliError> {
    let [i, j] = pair;
    if i >= dim || j >= dim || i == j {
        return Err(invalid(path, format!("need two distinct indices below {dim}")));
    }
    Ok((i, j))
}

fn build_params(
    field: FieldSpec,
    group: &GroupData,
    quad: &QuadraticPresentation,
    doc: &ParametersDoc,
) -> Result<Parameters, CliError> {
    let n = quad.dim();
    let has_kappa = !doc.kappa_c.is_empty() || !doc.kappa_l.is_empty();
    let has_ab = !doc.alpha.is_empty() || !doc.beta.is_empty();
    let kind = match doc.kind.as_deref() {
        Some(k @ ("poly" | "general")) => k,
        Some(other) => {
            return Err(invalid("parameters.kind", format!("unknown kind `{other}`, expected poly or general")))
        }
        None if has_ab => "general",
        None if has_kappa || quad.is_symmetric_algebra() => "poly",
        None => "general",
    };
    let lambda = build_lambda(field, group, n, &doc.lambda)?;
    if kind == "poly" {
        if has_ab {
            return Err(invalid("parameters", "alpha/beta belong to general parameters"));
        }
        let mut p = PolyParameterSet::zero(group.order(), n);
        p.lambda = lambda;
        let mut seen = std::collections::BTreeSet::new();
        for (k, e) in doc.kappa_c.iter().enumerate() {
            let path = format!("parameters.kappa_c[{k}]");
            let (i, j) = check_pair(e.pair, n, &format!("{path}.pair"))?;
            if !seen.insert(("c", i.min(j), i.max(j))) {
                return Err(invalid(&path, "duplicate pair"));
            }
            p.set_kappa_c(i, j, ga(field, group, &e.value, &format!("{path}.value"))?);
        }
        for (k, e) in doc.kappa_l.iter().enumerate() {
            let path = format!("parameters.kappa_l[{k}]");
            let (i, j) = check_pair(e.pair, n, &format!("{path}.pair"))?;
            if !seen.insert(("l", i.min(j), i.max(j))) {
                return Err(invalid(&path, "duplicate pair"));
            }
            p.set_kappa_l(i, j, vkg(field, group, n, &e.value, &format!("{path}.value"))?);
        }
        return Ok(Parameters::Poly(p.normalized()));
    }
    if has_kappa {
        return Err(invalid("parameters", "kappa_c/kappa_l belong to poly parameters"));
    }
    let m = quad.r_dim();
    let mut p = ParameterSet::zero(group.order(), n, m);
    p.lambda = lambda;
    let mut seen = std::collections::BTreeSet::new();
    for (which, list) in [("alpha", &doc.alpha), ("beta", &doc.beta)] {
        for (k, e) in list.iter().enumerate() {
            let path = format!("parameters.{which}[{k}]");
            if e.relation >= m {
                return Err(invalid(format!("{path}.relation"), format!("index must be below {m}")));
            }
            if !seen.insert((which, e.relation)) {
                return Err(invalid(&path, "duplicate relation"));
            }
            let vp = format!("{path}.value");
            if which == "alpha" {
                p.alpha[e.relation] = vkg(field, group, n, &e.value, &vp)?;
            } else {
                p.beta[e.relation] = ga(field, group, &e.value, &vp)?;
            }
        }
    }
    Ok(Parameters::General(p))
}

/// Validates a document into a presentation: field, group closure, relation
/// space G-stability and confluence, then parameter shapes.
pub fn build_instance(doc: &InstanceDocument) -> Result<DeformationPresentation, CliError> {
    let field = build_field(&doc.field)?;
    let quad = build_algebra(field, &doc.algebra)?;
    let group = build_group(field, doc.algebra.dim, &doc.group)?;
    validate_presentation(&quad, &group).map_err(|e| invalid("algebra", e))?;
    let params = build_params(field, &group, &quad, &doc.parameters)?;
    DeformationPresentation::new(group, quad, params).map_err(|e| invalid("parameters", e))
}

pub fn parse_and_build(text: &str) -> Result<(InstanceDocument, DeformationPresentation), CliError> {
    let doc = parse_instance(text)?;
    let d = build_instance(&doc)?;
    Ok((doc, d))
}

fn lambda_docs(group: &GroupData, t: &LambdaTable) -> Vec<LambdaDoc> {
    let mut out = Vec::new();
    for (g, row) in t.iter().enumerate() {
        for (i, x) in row.iter().enumerate() {
            if !x.is_zero() {
                out.push(LambdaDoc {
                    group: group.name(g).to_string(),
                    vector: i,
                    value: ga_doc(group, x),
                });
            }
        }
    }
    out
}

pub fn poly_parameters_doc(group: &GroupData, p: &PolyParameterSet) -> ParametersDoc {
    ParametersDoc {
        kind: Some("poly".into()),
        lambda: lambda_docs(group, &p.lambda),
        kappa_c: p
            .kappa_c
            .iter()
            .filter(|(_, x)| !x.is_zero())
            .map(|(&(i, j), x)| PairDoc { pair: [i, j], value: ga_doc(group, x) })
            .collect(),
        kappa_l: p
            .kappa_l
            .iter()
            .filter(|(_, x)| !x.is_zero())
            .map(|(&(i, j), x)| PairDoc { pair: [i, j], value: vkg_doc(group, x) })
            .collect(),
        ..ParametersDoc::default()
    }
}

fn general_parameters_doc(group: &GroupData, p: &ParameterSet) -> ParametersDoc {
    let rel = |k: usize, value: Coefficients| RelationValueDoc { relation: k, value };
    ParametersDoc {
        kind: Some("general".into()),
        lambda: lambda_docs(group, &p.lambda),
        alpha: p
            .alpha
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| rel(k, vkg_doc(group, x)))
            .collect(),
        beta: p
            .beta
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| rel(k, ga_doc(group, x)))
            .collect(),
        ..ParametersDoc::default()
    }
}

/// Canonical document for a presentation. Rules are written out only when
/// they differ from the ones derived from the relations and order.
pub fn canonical_document(d: &DeformationPresentation) -> InstanceDocument {
    let field = d.field;
    let q = &d.quadratic;
    let n = q.dim();
    let identity_order = q.order().iter().copied().eq(0..n);
    let derived = QuadraticPresentation::new(field, n, q.r_basis().to_vec(), Some(q.order().to_vec()), None).ok();
    let rules_derived = derived.is_some_and(|p| p.rules() == q.rules());
    let symmetric = q.r_basis() == symmetric_relations(field, n).as_slice();
    let relations = if symmetric && identity_order && rules_derived {
        RelationsDoc::Shorthand("symmetric".into())
    } else {
        RelationsDoc::List(q.r_basis().iter().map(|r| tensor2_doc(n, r)).collect())
    };
    let rules = (!rules_derived).then(|| {
        q.rules()
            .iter()
            .map(|r| RuleDoc {
                lead: format!("v{}*v{}", r.lead.0, r.lead.1),
                tail: tensor2_doc(n, &r.tail),
            })
            .collect()
    });
    let parameters = match &d.params {
        Parameters::Poly(p) => poly_parameters_doc(&d.group, p),
        Parameters::General(p) => general_parameters_doc(&d.group, p),
    };
    let (kind, modulus) = match field {
        FieldSpec::Prime(p) => ("prime", Some(u64::from(p))),
        FieldSpec::Rational => ("rational", None),
    };
    InstanceDocument {
        format_version: FORMAT_VERSION,
        field: FieldDoc { kind: kind.into(), modulus },
        group: GroupDoc {
            generators: d
                .group
                .generators()
                .iter()
                .map(|m| (0..n).map(|r| m.row(r).iter().map(scalar_doc).collect()).collect())
                .collect(),
            cap: None,
        },
        algebra: AlgebraDoc {
            dim: n,
            relations,
            order: (!identity_order).then(|| q.order().to_vec()),
            rules,
        },
        parameters,
    }
}
