//! JSON and text renderings of decider results.

use serde_json::{json, Value};

use pbwforge_core::diamond::{DiamondReport, OverlapKind};
use pbwforge_core::group::GroupData;
use pbwforge_core::params::DeformationPresentation;
use pbwforge_core::pbwcheck::{CheckReport, Status};
use pbwforge_core::quadratic::format_smash;
use pbwforge_core::untwist::{ProbeReport, UntwistResult, UntwistVerification};

use crate::document::{canonical_document, ga_doc, poly_parameters_doc, scalar_doc};

/// Failed overlaps listed in a report; the total is always given.
const MAX_LISTED_FAILURES: usize = 32;

pub fn instance_json(d: &DeformationPresentation) -> Value {
    serde_json::to_value(canonical_document(d)).expect("documents serialize")
}

/// Counts as JSON numbers when they fit, strings otherwise.
pub fn u128s(xs: &[u128]) -> Value {
    Value::Array(
        xs.iter()
            .map(|&x| u64::try_from(x).map(|x| json!(x)).unwrap_or_else(|_| json!(x.to_string())))
            .collect(),
    )
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "skipped",
    }
}

fn kind_name(k: OverlapKind) -> &'static str {
    match k {
        OverlapKind::GroupTriple => "group-triple",
        OverlapKind::GroupGroupLetter => "group-group-letter",
        OverlapKind::GroupLead => "group-lead",
        OverlapKind::LeadLead => "lead-lead",
    }
}

pub fn check_json(rep: &CheckReport, group: &GroupData) -> Value {
    let conditions: Vec<Value> = rep
        .conditions
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "status": status(c.status),
                "checked": c.checked,
                "failures": c.failures,
                "witness": c.witness.as_ref().map(|w| json!({
                    "input": w.input,
                    "residual": format_smash(&w.residual, group),
                })),
                "note": c.note,
            })
        })
        .collect();
    json!({"method": rep.method, "pbw": rep.pbw, "conditions": conditions})
}

pub fn check_lines(rep: &CheckReport) -> Vec<String> {
    let mut out = vec![format!(
        "conditions ({}): {}",
        rep.method,
        if rep.pbw { "PBW" } else { "not PBW" }
    )];
    for c in &rep.conditions {
        let mut line = format!("  {:<16} {:<7} {} inputs", c.id, status(c.status), c.checked);
        if let Some(w) = &c.witness {
            line.push_str(&format!(", {} failing, first at {}", c.failures, w.input));
        }
        out.push(line);
    }
    out
}

pub fn diamond_json(rep: &DiamondReport, group: &GroupData) -> Value {
    let checked: serde_json::Map<String, Value> = rep
        .checked
        .iter()
        .map(|(k, n)| (kind_name(*k).to_string(), json!(n)))
        .collect();
    let failures: Vec<Value> = rep
        .failures
        .iter()
        .take(MAX_LISTED_FAILURES)
        .map(|f| {
            json!({
                "kind": kind_name(f.kind),
                "word": f.word,
                "conditions": f.conditions(),
                "residual": format_smash(&f.residual, group),
            })
        })
        .collect();
    json!({
        "pbw": rep.pbw,
        "checked": checked,
        "failure_count": rep.failures.len(),
        "failures_by_condition": rep.failures_by_condition(),
        "failures": failures,
    })
}

pub fn diamond_lines(rep: &DiamondReport) -> Vec<String> {
    let total: usize = rep.checked.values().sum();
    let mut out = vec![format!(
        "overlaps: {} resolved of {}: {}",
        total - rep.failures.len(),
        total,
        if rep.pbw { "PBW" } else { "not PBW" }
    )];
    if let Some(f) = rep.failures.first() {
        out.push(format!(
            "  first failure at {} ({}), conditions {:?}",
            f.word,
            kind_name(f.kind),
            f.conditions()
        ));
    }
    out
}

pub fn untwist_json(d: &DeformationPresentation, u: &UntwistResult, v: &UntwistVerification) -> Value {
    let gamma: Vec<Value> = u
        .gamma
        .iter()
        .enumerate()
        .map(|(i, g)| json!({"vector": i, "value": ga_doc(&d.group, g)}))
        .collect();
    json!({
        "gamma": gamma,
        "kappa_prime": poly_parameters_doc(&d.group, &u.kappa_prime),
        "relations_checked": v.relations_checked,
        "target_poly_pbw": v.target_poly.pbw,
        "target_diamond_pbw": v.target_diamond.pbw,
    })
}

pub fn probe_json(d: &DeformationPresentation, p: &ProbeReport) -> Value {
    json!({
        "witness": p.witness.as_ref().map(|(g, v)| json!({
            "group": d.group.name(*g),
            "vector": v.iter().map(scalar_doc).collect::<Vec<_>>(),
        })),
        "lambda_value": ga_doc(&d.group, &p.lambda_value),
        "commutators_checked": p.commutators_checked,
        "degree_zero_vanishes": p.degree_zero_vanishes,
        "certified": p.certified,
    })
}
