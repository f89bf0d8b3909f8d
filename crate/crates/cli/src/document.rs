//! Flat `key = value` germ documents.
//!
//! ```text
//! # the type-one umbrella in two variables
//! n = 2
//! cap = exact
//! u = 1/2*x2^2
//! v = x1*x2
//! complete = true
//! ```
//!
//! Keys: `name`, `n`, `cap` (a degree or `exact`), `source` and `params`
//! (comma separated names), `order`, then either `p1..pn`, `q1..qn`, `r`,
//! or `u`, `v` with `complete = true`.  An isotropic map omits `r`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use legendre_core::integral_maps::{complete_from_uv, IntegralError, IntegralMap, IsotropicMap};
use legendre_core::ring::{Cap, RingError, TruncatedPoly, VarKind, Vars};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("{0}")]
    Conflict(String),
    #[error("in `{key}`: {source}")]
    Expression { key: String, source: RingError },
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub type DocResult<T> = Result<T, DocError>;

#[derive(Debug, Clone)]
pub enum Body {
    Full(Vec<TruncatedPoly>),
    Graph {
        u: TruncatedPoly,
        v: TruncatedPoly,
    },
    Isotropic {
        p: Vec<TruncatedPoly>,
        q: Vec<TruncatedPoly>,
    },
}

#[derive(Debug, Clone)]
pub struct GermDocument {
    pub name: Option<String>,
    pub n: usize,
    pub cap: Cap,
    pub vars: Arc<Vars>,
    pub order: Option<u32>,
    pub body: Body,
}

const KNOWN: &[&str] = &[
    "name", "n", "cap", "source", "params", "order", "complete", "r", "u", "v",
];

fn is_component_key(key: &str, n: usize) -> bool {
    let (head, tail) = key.split_at(1.min(key.len()));
    matches!(head, "p" | "q") && tail.parse::<usize>().is_ok_and(|i| 1 <= i && i <= n)
}

fn parse_cap(s: &str) -> Option<Cap> {
    if s == "exact" {
        Some(Cap::EXACT)
    } else {
        s.parse::<u32>()
            .ok()
            .filter(|&d| d < u32::MAX)
            .map(Cap::new)
    }
}

fn names(s: &str) -> Vec<String> {
    s.split(',')
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect()
}

impl GermDocument {
    pub fn parse(text: &str) -> DocResult<GermDocument> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| DocError::Syntax {
                line: k + 1,
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim().to_string();
            if entries
                .insert(key.clone(), (k + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(DocError::Syntax {
                    line: k + 1,
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }
        let get = |key: &str| entries.get(key).map(|(_, v)| v.as_str());
        let n: usize = get("n")
            .ok_or_else(|| DocError::Missing("n".into()))?
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| DocError::Syntax {
                line: entries["n"].0,
                msg: "n must be a positive integer".into(),
            })?;
        for (key, (line, _)) in &entries {
            if !KNOWN.contains(&key.as_str()) && !is_component_key(key, n) {
                return Err(DocError::Syntax {
                    line: *line,
                    msg: format!("unknown key `{key}`"),
                });
            }
        }
        let cap = match get("cap") {
            None => Cap::EXACT,
            Some(s) => parse_cap(s).ok_or_else(|| DocError::Syntax {
                line: entries["cap"].0,
                msg: format!("bad cap `{s}`"),
            })?,
        };
        let order = match get("order") {
            None => None,
            Some(s) => Some(s.parse().map_err(|_| DocError::Syntax {
                line: entries["order"].0,
                msg: format!("bad order `{s}`"),
            })?),
        };
        let source = match get("source") {
            Some(s) => names(s),
            None => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        if source.len() != n {
            return Err(DocError::Conflict(format!(
                "{} source variables for n = {n}",
                source.len()
            )));
        }
        let params = get("params").map(names).unwrap_or_default();
        let mut all: Vec<(String, VarKind)> =
            source.into_iter().map(|s| (s, VarKind::Source)).collect();
        all.extend(params.into_iter().map(|s| (s, VarKind::Param)));
        let vars = Vars::from_names(&all)?;
        let expr = |key: &str| -> DocResult<TruncatedPoly> {
            let s = get(key).ok_or_else(|| DocError::Missing(key.into()))?;
            TruncatedPoly::parse(&vars, cap, s).map_err(|source| DocError::Expression {
                key: key.into(),
                source,
            })
        };
        let has_full = entries.keys().any(|k| is_component_key(k, n) || k == "r");
        let has_graph = get("u").is_some() || get("v").is_some();
        let body = match (has_full, has_graph) {
            (true, true) => {
                return Err(DocError::Conflict(
                    "give either p, q, r or u, v, not both".into(),
                ))
            }
            (false, false) => {
                return Err(DocError::Missing("components (p, q, r) or (u, v)".into()))
            }
            (false, true) => {
                if get("complete") != Some("true") {
                    return Err(DocError::Conflict(
                        "graph data `u`, `v` needs `complete = true`".into(),
                    ));
                }
                Body::Graph {
                    u: expr("u")?,
                    v: expr("v")?,
                }
            }
            (true, false) => {
                let p = (1..=n)
                    .map(|i| expr(&format!("p{i}")))
                    .collect::<DocResult<Vec<_>>>()?;
                let q = (1..=n)
                    .map(|i| expr(&format!("q{i}")))
                    .collect::<DocResult<Vec<_>>>()?;
                if get("r").is_some() {
                    let mut comps = p;
                    comps.extend(q);
                    comps.push(expr("r")?);
                    Body::Full(comps)
                } else {
                    Body::Isotropic { p, q }
                }
            }
        };
        Ok(GermDocument {
            name: get("name").map(str::to_string),
            n,
            cap,
            vars,
            order,
            body,
        })
    }

    pub fn label(&self, fallback: &str) -> String {
        self.name.clone().unwrap_or_else(|| fallback.to_string())
    }

    /// The integral germ, completing graph data when needed.
    pub fn integral_map(&self) -> DocResult<IntegralMap> {
        match &self.body {
            Body::Full(comps) => Ok(IntegralMap::from_components(&self.vars, comps.clone())?),
            Body::Graph { u, v } => Ok(complete_from_uv(&self.vars, u, v)?),
            Body::Isotropic { .. } => Err(DocError::Missing("r".into())),
        }
    }

    pub fn isotropic_map(&self) -> DocResult<IsotropicMap> {
        match &self.body {
            Body::Isotropic { p, q } => Ok(IsotropicMap::new(&self.vars, p.clone(), q.clone())?),
            _ => Err(DocError::Conflict(
                "an isotropic map has p and q but no r".into(),
            )),
        }
    }
}

fn header(out: &mut String, name: Option<&str>, n: usize, cap: Cap, vars: &Vars) {
    if let Some(name) = name {
        writeln!(out, "name = {name}").unwrap();
    }
    writeln!(out, "n = {n}").unwrap();
    writeln!(out, "cap = {cap}").unwrap();
    let of_kind = |kind| {
        vars.iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.name.clone())
            .collect::<Vec<_>>()
    };
    writeln!(out, "source = {}", of_kind(VarKind::Source).join(", ")).unwrap();
    let params = of_kind(VarKind::Param);
    if !params.is_empty() {
        writeln!(out, "params = {}", params.join(", ")).unwrap();
    }
}

/// Document text for an integral germ.
pub fn write_integral(f: &IntegralMap, name: Option<&str>) -> String {
    let mut out = String::new();
    header(&mut out, name, f.n(), f.cap(), f.source());
    for (i, c) in f.components().iter().enumerate() {
        writeln!(out, "{} = {}", f.germ().component_name(i), c).unwrap();
    }
    out
}

/// Document text for an isotropic map; the generating function is
/// recorded as a comment.
pub fn write_isotropic(g: &IsotropicMap, name: Option<&str>) -> String {
    let mut out = String::new();
    let cap = g
        .p()
        .iter()
        .chain(g.q())
        .map(|c| c.cap())
        .min()
        .unwrap_or(Cap::EXACT);
    header(&mut out, name, g.n(), cap, g.source());
    for (i, c) in g.p().iter().enumerate() {
        writeln!(out, "p{} = {}", i + 1, c).unwrap();
    }
    for (i, c) in g.q().iter().enumerate() {
        writeln!(out, "q{} = {}", i + 1, c).unwrap();
    }
    writeln!(out, "# generating function: {}", g.generating_function()).unwrap();
    out
}
