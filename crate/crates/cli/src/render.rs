//! Plain-text and JSON renderings of germs and reports.

use std::fmt::Write as _;

use legendre_core::integral_maps::{IntegralMap, IsotropicMap};
use legendre_core::ring::{Cap, VarKind, Vars};
use legendre_core::stability::{
    CaEvidence, Classification, ClassificationReport, ConditionReport, StabilityReport, R0,
};
use serde_json::{json, Map, Value};

fn var_names(vars: &Vars, kind: VarKind) -> Vec<String> {
    vars.iter()
        .filter(|v| v.kind == kind)
        .map(|v| v.name.clone())
        .collect()
}

pub fn germ_json(f: &IntegralMap, name: Option<&str>) -> Value {
    let mut comps = Map::new();
    for (i, c) in f.components().iter().enumerate() {
        comps.insert(f.germ().component_name(i), Value::String(c.to_string()));
    }
    json!({
        "name": name,
        "n": f.n(),
        "cap": f.cap(),
        "source": var_names(f.source(), VarKind::Source),
        "params": var_names(f.source(), VarKind::Param),
        "corank": f.corank(),
        "components": comps,
    })
}

pub fn isotropic_json(g: &IsotropicMap, name: Option<&str>) -> Value {
    let mut comps = Map::new();
    for (i, c) in g.p().iter().enumerate() {
        comps.insert(format!("p{}", i + 1), Value::String(c.to_string()));
    }
    for (i, c) in g.q().iter().enumerate() {
        comps.insert(format!("q{}", i + 1), Value::String(c.to_string()));
    }
    json!({
        "name": name,
        "n": g.n(),
        "source": var_names(g.source(), VarKind::Source),
        "params": var_names(g.source(), VarKind::Param),
        "components": comps,
        "generating_function": g.generating_function().to_string(),
    })
}

fn verdict_word<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn header(label: &str, order: u32, cap: Cap, r0: Option<R0>) -> String {
    let mut s = format!("germ        {label}\norder       {order}\ncap         {cap}\n");
    if let Some(R0::Found(v)) = r0 {
        writeln!(s, "r0          {v}").unwrap();
    }
    s
}

pub fn stability(rep: &StabilityReport) -> String {
    let mut s = String::new();
    let levels: Vec<String> = rep
        .slice_levels
        .iter()
        .map(|l| format!("{}: {}", l.level, l.dim))
        .collect();
    writeln!(s, "[{}]", verdict_word(&rep.check)).unwrap();
    writeln!(
        s,
        "  slice       {} (level {}: {}; {})",
        rep.slice_dim,
        rep.order,
        rep.slice_outer_dim,
        levels.join(", ")
    )
    .unwrap();
    writeln!(s, "  tf span     {}", rep.tf_dim).unwrap();
    writeln!(s, "  wf span     {}", rep.wf_dim).unwrap();
    writeln!(s, "  sum         {}", rep.span_dim).unwrap();
    writeln!(s, "  deficiency  {}", rep.deficiency).unwrap();
    for w in &rep.witnesses {
        let parts: Vec<String> = w
            .components
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        writeln!(s, "  witness     {}", parts.join(", ")).unwrap();
    }
    for note in &rep.notes {
        writeln!(s, "  note        {note}").unwrap();
    }
    writeln!(s, "  verdict     {}", verdict_word(&rep.verdict)).unwrap();
    s
}

pub fn condition(rep: &ConditionReport) -> String {
    let mut s = String::new();
    writeln!(s, "[{}]", verdict_word(&rep.condition)).unwrap();
    match rep.quotient_dim_next {
        Some(next) => writeln!(
            s,
            "  quotient    {} (degree {}), {} (degree {})",
            rep.quotient_dim,
            rep.degree,
            next,
            rep.degree + 1
        )
        .unwrap(),
        None => writeln!(
            s,
            "  quotient    {} (degree {})",
            rep.quotient_dim, rep.degree
        )
        .unwrap(),
    }
    writeln!(s, "  generated   {}", rep.generated).unwrap();
    writeln!(s, "  umbrella    {}", verdict_word(&rep.umbrella)).unwrap();
    for note in &rep.notes {
        writeln!(s, "  note        {note}").unwrap();
    }
    writeln!(s, "  verdict     {}", verdict_word(&rep.verdict)).unwrap();
    s
}

pub fn classification(rep: &ClassificationReport) -> String {
    let mut s = String::new();
    writeln!(s, "[classification]").unwrap();
    writeln!(
        s,
        "  multiplicity {} (degree {}), {} (degree {})",
        rep.multiplicity.dim,
        rep.multiplicity.degree,
        rep.multiplicity.dim_next,
        rep.multiplicity.degree + 1
    )
    .unwrap();
    let result = match &rep.classification {
        Classification::Umbrella { k } => format!("open Whitney umbrella of type {k}"),
        Classification::NotUmbrella => "not an open Whitney umbrella at this order".to_string(),
        Classification::Inconclusive { reason } => format!("inconclusive: {reason}"),
    };
    writeln!(s, "  result      {result}").unwrap();
    s
}

pub fn ca(rep: &CaEvidence) -> String {
    let mut s = String::new();
    writeln!(s, "[ca-evidence]").unwrap();
    writeln!(s, "  R_f         {}", rep.rf_dim).unwrap();
    writeln!(s, "  f*E_W       {}", rep.pullback_dim).unwrap();
    writeln!(s, "  equal       {}", rep.rf_equals_pullback).unwrap();
    writeln!(
        s,
        "  locus       {} (linear minor rank {})",
        verdict_word(&rep.singular_locus),
        rep.linear_minor_rank
    )
    .unwrap();
    writeln!(s, "  verdict     {}", verdict_word(&rep.ca_evidence)).unwrap();
    s
}
