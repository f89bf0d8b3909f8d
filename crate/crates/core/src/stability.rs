//! Stability conditions at a fixed jet order.
//!
//! The span checks compare `tf(V_N) + wf(VH_W)` (or `wf(VL_W)`) with the
//! jets of `VI_f` through degree `r`.  The jets of genuine elements are the
//! truncations of the slice at a higher level (see
//! [`projected_slice_dim`]); levels `r + 1` and `r + 2` are computed and a
//! verdict is only a failure when they agree.
//!
//! The scalar conditions work in the space of values `H∘f` of target
//! monomials, truncated at a source degree `D`.  Columns are source
//! monomials ordered by degree, so truncation to a lower degree is a prefix
//! and the pivot structure of one echelon serves every `D` below it.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::deformations::{
    for_each_wf_generator, projected_slice, projected_slice_dim, tf_generators, DeformError,
    JetGerm,
};
use crate::integral_maps::{complete_graph, IntegralError, IntegralMap, Provenance};
use crate::jet::{JetPoly, Layer, MonomialTable};
use crate::linalg::{to_primitive, Echelon, IntVec};
use crate::ring::{Cap, RingError, TruncatedPoly, VarKind, Vars};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("the check needs jets through degree {needed}, the germ is known through {available}")]
    CapShortfall { needed: u32, available: Cap },
    #[error("unfolding parameters must be fixed before a stability check")]
    HasParameters,
    #[error("the unfoldings do not agree at parameter zero")]
    UnfoldingsDisagree,
    #[error("unfolding is not in graph form: q{index} is not x{index}")]
    NotGraphForm { index: usize },
    #[error("unfoldings must share source variables and use distinct parameters")]
    IncompatibleVariables,
    #[error(transparent)]
    Deform(DeformError),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

impl From<DeformError> for StabilityError {
    fn from(e: DeformError) -> Self {
        match e {
            DeformError::CapShortfall { needed, available } => {
                StabilityError::CapShortfall { needed, available }
            }
            DeformError::HasParameters => StabilityError::HasParameters,
            other => StabilityError::Deform(other),
        }
    }
}

pub type StabilityResult<T> = Result<T, StabilityError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
            _ => Verdict::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanCheck {
    Contact,
    Legendre,
}

/// A readable name for reports.
pub fn germ_label(f: &IntegralMap) -> String {
    match f.provenance() {
        Provenance::NormalForm { n, k } => format!("f_{{{n},{k}}}"),
        Provenance::Completed => "completed".to_string(),
        Provenance::User => "user".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelDim {
    pub level: u32,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorBounds {
    /// Source monomials `x^a ∂/∂x_j` with `|a|` up to this degree.
    pub source_monomial_degree: u32,
    /// Target degree of the monomial Hamiltonians enumerated.
    pub hamiltonian_degree: u32,
    /// Largest degree of a Hamiltonian with nonzero truncated image.
    pub hamiltonian_degree_used: u32,
    pub hamiltonians: usize,
}

/// Cokernel representative: one polynomial per nonzero component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub components: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub germ: String,
    pub check: SpanCheck,
    pub n: usize,
    pub order: u32,
    pub cap: Cap,
    pub verdict: Verdict,
    /// Dimension of the reference slice of `VI_f` the spans are compared with.
    pub slice_dim: usize,
    /// Dimension of the slice at level `r` itself, an outer bound.
    pub slice_outer_dim: usize,
    pub slice_levels: Vec<LevelDim>,
    pub slice_stabilized: bool,
    pub tf_dim: usize,
    pub wf_dim: usize,
    pub span_dim: usize,
    pub deficiency: usize,
    pub generator_bounds: GeneratorBounds,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl StabilityReport {
    pub fn with_label(mut self, label: &str) -> Self {
        self.germ = label.to_string();
        self
    }
}

struct SpanSide {
    echelon: Echelon,
    wf: Echelon,
}

/// Jet order needed by the span checks at order `r`.
pub fn span_check_degree(r: u32) -> u32 {
    r + 3
}

/// Contact and Legendre reports at order `r`, sharing one pass over the
/// generators.
pub fn check_spans(f: &IntegralMap, r: u32) -> StabilityResult<(StabilityReport, StabilityReport)> {
    let needed = span_check_degree(r);
    let jg = JetGerm::new(f, needed, needed)?;
    let layout = jg.layout(r);
    let outer = crate::deformations::vi_system(&jg, r).nullity();
    let levels: Vec<LevelDim> = [r + 1, r + 2]
        .into_iter()
        .map(|level| LevelDim {
            level,
            dim: projected_slice_dim(&jg, r, level),
        })
        .collect();
    let stabilized = levels[0].dim == levels[1].dim;

    let mut tf = Echelon::new();
    for v in tf_generators(&jg, r) {
        tf.insert(to_primitive(&v));
    }
    let mut legendre = SpanSide {
        echelon: tf.clone(),
        wf: Echelon::new(),
    };
    let mut nonlegendre: Vec<IntVec> = Vec::new();
    let mut wf_all = Echelon::new();
    let mut hams = 0usize;
    let mut used = 0u32;
    for_each_wf_generator(&jg, r, |gens| {
        for g in gens {
            hams += 1;
            used = used.max(g.hamiltonian.degree());
            let v = to_primitive(&g.vector);
            wf_all.insert(v.clone());
            if g.legendre {
                legendre.wf.insert(v.clone());
                legendre.echelon.insert(v);
            } else {
                nonlegendre.push(v);
            }
        }
    });
    let mut contact = SpanSide {
        echelon: legendre.echelon.clone(),
        wf: wf_all,
    };
    for v in nonlegendre {
        contact.echelon.insert(v);
    }
    assert!(
        contact.echelon.rank() >= legendre.echelon.rank(),
        "Legendre span lies in the contact span"
    );

    let bounds = GeneratorBounds {
        source_monomial_degree: r,
        hamiltonian_degree: r + 2,
        hamiltonian_degree_used: used,
        hamiltonians: hams,
    };
    let build = |check: SpanCheck, side: &SpanSide| -> StabilityReport {
        let span = side.echelon.rank();
        for l in &levels {
            assert!(span <= l.dim, "generators are genuine elements of VI_f");
        }
        let (verdict, reference) = if span == levels[0].dim {
            (Verdict::Pass, levels[0].clone())
        } else if span == levels[1].dim {
            (Verdict::Pass, levels[1].clone())
        } else if stabilized {
            (Verdict::Fail, levels[1].clone())
        } else {
            (Verdict::Inconclusive, levels[1].clone())
        };
        let witnesses = if verdict == Verdict::Pass {
            Vec::new()
        } else {
            let slice = projected_slice(&jg, r, reference.level);
            let mut span_ech = side.echelon.clone();
            let mut out = Vec::new();
            for row in slice.reduced_basis() {
                if span_ech.insert(to_primitive(&row)) {
                    out.push(Witness {
                        components: layout.decode(&row).into_iter().collect(),
                    });
                }
            }
            out
        };
        let mut notes = Vec::new();
        if outer != reference.dim {
            notes.push(format!(
                "the slice at level {r} has dimension {outer}, of which {} comes from jets without an integral extension",
                outer - reference.dim
            ));
        }
        if verdict == Verdict::Inconclusive {
            notes.push("the slice truncations have not stabilized at this cap".to_string());
        }
        StabilityReport {
            germ: germ_label(f),
            check,
            n: f.n(),
            order: r,
            cap: f.cap(),
            verdict,
            slice_dim: reference.dim,
            slice_outer_dim: outer,
            slice_levels: levels.clone(),
            slice_stabilized: stabilized,
            tf_dim: tf.rank(),
            wf_dim: side.wf.rank(),
            span_dim: span,
            deficiency: reference.dim - span,
            generator_bounds: bounds.clone(),
            witnesses,
            notes,
        }
    };
    let c = build(SpanCheck::Contact, &contact);
    let l = build(SpanCheck::Legendre, &legendre);
    assert!(
        l.verdict != Verdict::Pass || c.verdict == Verdict::Pass,
        "Legendre pass implies contact pass"
    );
    Ok((c, l))
}

/// Infinitesimal contact stability at order `r`.
pub fn check_contact_infinitesimal(f: &IntegralMap, r: u32) -> StabilityResult<StabilityReport> {
    Ok(check_spans(f, r)?.0)
}

/// Infinitesimal Legendre stability at order `r`, fibration `(p, q, r) -> (q, r)`.
pub fn check_legendre_infinitesimal(f: &IntegralMap, r: u32) -> StabilityResult<StabilityReport> {
    Ok(check_spans(f, r)?.1)
}

/// Truncated value spaces of `f*E_W`:
/// `all` = span of every `H∘f`, `fibre` = those with `H` divisible by a
/// fibration coordinate `q_i` or `r`, `high` = those with `deg H >= n + 2`.
pub struct ValueSpaces {
    degree: u32,
    n: usize,
    table: Arc<MonomialTable>,
    all: Echelon,
    fibre: Echelon,
    fibre_and_affine: Echelon,
    high: Echelon,
}

impl ValueSpaces {
    pub fn compute(f: &IntegralMap, degree: u32) -> StabilityResult<ValueSpaces> {
        let jg = JetGerm::new(f, degree, degree)?;
        let n = jg.n;
        let composer = jg.composer(degree);
        let mut all = Echelon::new();
        let mut fibre = Echelon::new();
        let mut high = Echelon::new();
        let mut layer: Layer = composer.first_layer();
        let mut target_degree = 0u32;
        while !layer.is_empty() {
            for (m, value) in &layer {
                let v = to_primitive(
                    &value
                        .terms
                        .iter()
                        .map(|(i, c)| (*i as usize, c.clone()))
                        .collect(),
                );
                if m.0[n..].iter().any(|&e| e > 0) {
                    fibre.insert(v.clone());
                }
                if target_degree >= n as u32 + 2 {
                    high.insert(v.clone());
                }
                all.insert(v);
            }
            layer = composer.next_layer(&layer, &composer.candidates(&layer));
            target_degree += 1;
        }
        let mut fibre_and_affine = fibre.clone();
        fibre_and_affine.insert(to_primitive(
            &JetPoly::one()
                .terms
                .iter()
                .map(|(i, c)| (*i as usize, c.clone()))
                .collect(),
        ));
        for i in 0..n {
            let p = jg.p(i).truncate(&jg.table, degree);
            fibre_and_affine.insert(to_primitive(
                &p.terms
                    .iter()
                    .map(|(i, c)| (*i as usize, c.clone()))
                    .collect(),
            ));
        }
        Ok(ValueSpaces {
            degree,
            n,
            table: jg.table.clone(),
            all,
            fibre,
            fibre_and_affine,
            high,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    fn limit(&self, d: u32) -> usize {
        assert!(
            d <= self.degree,
            "truncation degree {d} above the computed degree {}",
            self.degree
        );
        self.table.count_up_to(d)
    }

    fn projected_rank(ech: &Echelon, limit: usize) -> usize {
        ech.pivots().take_while(|&p| p < limit).count()
    }

    /// `dim` of `f*E_W` truncated at degree `d`.
    pub fn values_dim(&self, d: u32) -> usize {
        Self::projected_rank(&self.all, self.limit(d))
    }

    /// Dimension of `f*E_W / (π∘f)*m_Z f*E_W` truncated at degree `d`.
    pub fn quotient_dim(&self, d: u32) -> usize {
        let l = self.limit(d);
        Self::projected_rank(&self.all, l) - Self::projected_rank(&self.fibre, l)
    }

    /// Whether the classes of `1, p_i∘f` span that quotient at degree `d`.
    pub fn generated_by_affine(&self, d: u32) -> bool {
        let l = self.limit(d);
        Self::projected_rank(&self.all, l) == Self::projected_rank(&self.fibre_and_affine, l)
    }

    /// `f*E_W ∩ m^{r+1} ⊆ f*m_W^{n+2}` after truncation at degree `d`.
    pub fn r0_inclusion_holds(&self, r: u32, d: u32) -> bool {
        let l = self.limit(d);
        let start = self.table.count_up_to(r);
        self.all
            .rows_with_pivot_in(start..l)
            .all(|row| self.high.contains_truncated(row.clone(), l))
    }

    /// Smallest `r <= max_r` whose inclusion holds at degrees `r + 2` and `r + 3`.
    pub fn r0_up_to(&self, max_r: u32) -> Option<u32> {
        (0..=max_r)
            .take_while(|r| r + 3 <= self.degree)
            .find(|&r| self.r0_inclusion_holds(r, r + 2) && self.r0_inclusion_holds(r, r + 3))
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result", content = "value")]
pub enum R0 {
    Found(u32),
    NotFound { searched_up_to: u32 },
}

impl R0 {
    pub fn value(self) -> Option<u32> {
        match self {
            R0::Found(r) => Some(r),
            R0::NotFound { .. } => None,
        }
    }
}

/// Degree through which [`compute_r0`] needs the germ.
pub fn r0_degree(search_cap: u32) -> u32 {
    search_cap + 3
}

pub fn compute_r0(f: &IntegralMap, search_cap: u32) -> StabilityResult<R0> {
    let spaces = ValueSpaces::compute(f, r0_degree(search_cap))?;
    Ok(match spaces.r0_up_to(search_cap) {
        Some(r) => R0::Found(r),
        None => R0::NotFound {
            searched_up_to: search_cap,
        },
    })
}

/// [`compute_r0`] with search caps raised in steps up to `max_search`, so
/// germs with small `r₀` stay cheap.
pub fn search_r0(f: &IntegralMap, max_search: u32) -> StabilityResult<R0> {
    let mut cap = 6.min(max_search);
    loop {
        let found = compute_r0(f, cap)?;
        if found.value().is_some() || cap >= max_search {
            return Ok(found);
        }
        // the value spaces grow quickly with the degree, so small steps first
        cap = (cap + if cap < 12 { 3 } else { 6 }).min(max_search);
    }
}

/// `max(⌈n/2⌉ + 1, r₀)`.
pub fn default_order(n: usize, r0: u32) -> u32 {
    (n.div_ceil(2) as u32 + 1).max(r0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multiplicity {
    pub degree: u32,
    pub dim: usize,
    pub dim_next: usize,
    pub stabilized: bool,
}

/// `dim E_N / f*m_W E_N` truncated at `degree` and `degree + 1`.
pub fn local_multiplicity(f: &IntegralMap, degree: u32) -> StabilityResult<Multiplicity> {
    let top = degree + 1;
    let jg = JetGerm::new(f, top, top)?;
    let t = &jg.table;
    let mut ideal = Echelon::new();
    for m in 0..t.count_up_to(top - 1) as u32 {
        let mono = t.monomial(m).clone();
        for c in &jg.comps {
            let terms: Vec<(usize, crate::scalar::Rat)> = c
                .terms
                .iter()
                .filter(|(i, _)| t.degree(*i) + mono.degree() <= top)
                .map(|(i, x)| (t.product(*i, &mono) as usize, x.clone()))
                .collect();
            let mut terms = terms;
            terms.sort_by_key(|(i, _)| *i);
            if !terms.is_empty() {
                ideal.insert(to_primitive(&terms));
            }
        }
    }
    let quotient =
        |d: u32| t.count_up_to(d) - ValueSpaces::projected_rank(&ideal, t.count_up_to(d));
    let (dim, dim_next) = (quotient(degree), quotient(top));
    Ok(Multiplicity {
        degree,
        dim,
        dim_next,
        stabilized: dim == dim_next,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum Classification {
    Umbrella { k: usize },
    NotUmbrella,
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub germ: String,
    pub order: u32,
    pub cap: Cap,
    pub classification: Classification,
    pub contact: Verdict,
    pub multiplicity: Multiplicity,
}

/// Degree at which [`owu_classify`] truncates the local algebra.
pub fn multiplicity_degree(r: u32) -> u32 {
    r + 1
}

pub fn owu_classify(f: &IntegralMap, r: u32) -> StabilityResult<ClassificationReport> {
    let contact = check_contact_infinitesimal(f, r)?;
    classify_with(f, r, contact.verdict)
}

/// Classification when the contact verdict at order `r` is already known.
pub fn classify_with(
    f: &IntegralMap,
    r: u32,
    contact: Verdict,
) -> StabilityResult<ClassificationReport> {
    let multiplicity = local_multiplicity(f, multiplicity_degree(r))?;
    let classification = match contact {
        Verdict::Fail => Classification::NotUmbrella,
        Verdict::Inconclusive => Classification::Inconclusive {
            reason: "contact check inconclusive".into(),
        },
        Verdict::Pass if !multiplicity.stabilized => Classification::Inconclusive {
            reason: "local multiplicity not stabilized".into(),
        },
        Verdict::Pass => Classification::Umbrella {
            k: multiplicity.dim - 1,
        },
    };
    Ok(ClassificationReport {
        germ: germ_label(f),
        order: r,
        cap: f.cap(),
        classification,
        contact,
        multiplicity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Generation of `Q_{r+1}(f)` by `1, p_i∘f`.
    TruncatedGeneration,
    /// Generation of `Q(f)` by `1, p_i∘f`.
    Generation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub germ: String,
    pub condition: Condition,
    pub order: u32,
    pub cap: Cap,
    /// Source degree at which the quotient is truncated.
    pub degree: u32,
    pub quotient_dim: usize,
    pub quotient_dim_next: Option<usize>,
    pub stabilized: bool,
    pub generated: bool,
    pub umbrella: Verdict,
    pub r0: Option<u32>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn with_label(mut self, label: &str) -> Self {
        self.germ = label.to_string();
        self
    }
}

/// Degree through which the scalar conditions at order `r` need the germ.
pub fn condition_degree(r: u32) -> u32 {
    r + 3
}

/// Both scalar conditions at order `r`, given the contact verdict (the
/// umbrella clause of both conditions).
pub fn conditions_with(
    f: &IntegralMap,
    r: u32,
    umbrella: Verdict,
) -> StabilityResult<(ConditionReport, ConditionReport)> {
    let spaces = ValueSpaces::compute(f, condition_degree(r))?;
    let r0 = spaces.r0_up_to(r);
    let d = r + 1;
    let generated = spaces.generated_by_affine(d);
    let mut notes = Vec::new();
    let truncated_verdict = match (umbrella, r0) {
        (Verdict::Fail, _) => Verdict::Fail,
        (_, None) => {
            notes.push(format!("r0 exceeds the order {r}"));
            Verdict::Inconclusive
        }
        (v, Some(_)) => v.and(if generated {
            Verdict::Pass
        } else {
            Verdict::Fail
        }),
    };
    let a2r = ConditionReport {
        germ: germ_label(f),
        condition: Condition::TruncatedGeneration,
        order: r,
        cap: f.cap(),
        degree: d,
        quotient_dim: spaces.quotient_dim(d),
        quotient_dim_next: None,
        stabilized: true,
        generated,
        umbrella,
        r0,
        verdict: truncated_verdict,
        notes,
    };
    let q = q_dimension_from(&spaces, r + 2);
    let gen_verdict = match (umbrella, q.stabilized) {
        (Verdict::Fail, _) => Verdict::Fail,
        (_, false) => Verdict::Inconclusive,
        (v, true) => v.and(if q.generated {
            Verdict::Pass
        } else {
            Verdict::Fail
        }),
    };
    let mut notes = Vec::new();
    if !q.stabilized {
        notes.push("quotient dimension changes when the truncation is raised".to_string());
    }
    let aprime = ConditionReport {
        germ: germ_label(f),
        condition: Condition::Generation,
        order: r,
        cap: f.cap(),
        degree: q.degree,
        quotient_dim: q.dim,
        quotient_dim_next: Some(q.dim_next),
        stabilized: q.stabilized,
        generated: q.generated,
        umbrella,
        r0,
        verdict: gen_verdict,
        notes,
    };
    Ok((a2r, aprime))
}

pub fn check_condition_a2r(f: &IntegralMap, r: u32) -> StabilityResult<ConditionReport> {
    let contact = check_contact_infinitesimal(f, r)?;
    Ok(conditions_with(f, r, contact.verdict)?.0)
}

pub fn check_condition_a_prime(f: &IntegralMap, r: u32) -> StabilityResult<ConditionReport> {
    let contact = check_contact_infinitesimal(f, r)?;
    Ok(conditions_with(f, r, contact.verdict)?.1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QDimension {
    pub degree: u32,
    pub dim: usize,
    pub dim_next: usize,
    pub stabilized: bool,
    pub generated: bool,
}

fn q_dimension_from(spaces: &ValueSpaces, d: u32) -> QDimension {
    let (dim, dim_next) = (spaces.quotient_dim(d), spaces.quotient_dim(d + 1));
    QDimension {
        degree: d,
        dim,
        dim_next,
        stabilized: dim == dim_next,
        generated: spaces.generated_by_affine(d + 1),
    }
}

/// `dim Q(f)` truncated at `degree`, with the value at `degree + 1`.
pub fn q_dimension(f: &IntegralMap, degree: u32) -> StabilityResult<QDimension> {
    let spaces = ValueSpaces::compute(f, degree + 1)?;
    Ok(q_dimension_from(&spaces, degree))
}

/// All verdicts at one order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FullReport {
    pub contact: StabilityReport,
    pub legendre: StabilityReport,
    pub truncated_generation: ConditionReport,
    pub generation: ConditionReport,
    pub classification: ClassificationReport,
}

impl FullReport {
    /// The span and scalar verdicts agree.
    pub fn consistent(&self) -> bool {
        let v = [
            self.contact.verdict,
            self.legendre.verdict,
            self.truncated_generation.verdict,
            self.generation.verdict,
        ];
        v.iter().all(|x| *x == v[0])
    }
}

pub fn full_report(f: &IntegralMap, r: u32) -> StabilityResult<FullReport> {
    let (contact, legendre) = check_spans(f, r)?;
    let (truncated_generation, generation) = conditions_with(f, r, contact.verdict)?;
    let classification = classify_with(f, r, contact.verdict)?;
    Ok(FullReport {
        contact,
        legendre,
        truncated_generation,
        generation,
        classification,
    })
}

/// How the singular locus `{rank df < n}` was bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularLocus {
    /// A maximal minor is a unit: `f` is an immersion.
    Empty,
    /// The linear parts of the maximal minors span at least two
    /// directions, so the locus lies in a smooth codimension-2 germ.
    CodimensionTwo,
    /// A singular curve germ: the locus is the origin, of codimension one.
    CodimensionOne,
    /// The jet-level criterion does not decide.
    Undecided,
}

/// Jet-level evidence for condition (ca): `R_f` against `f*E_W` through
/// order `r` and a minor criterion on the singular locus.  The analytic
/// clause on complex representatives is not decided here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaEvidence {
    pub germ: String,
    pub order: u32,
    pub rf_dim: usize,
    pub pullback_dim: usize,
    pub rf_equals_pullback: bool,
    pub singular_locus: SingularLocus,
    pub linear_minor_rank: usize,
    /// `pass` means both pieces of evidence hold.
    pub ca_evidence: Verdict,
}

fn determinant(rows: &[Vec<TruncatedPoly>], cols: &[usize]) -> StabilityResult<TruncatedPoly> {
    if cols.len() == 1 {
        return Ok(rows[0][cols[0]].clone());
    }
    let mut acc: Option<TruncatedPoly> = None;
    for (pos, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = rows[0][c].try_mul(&determinant(&rows[1..], &rest)?)?;
        let term = if pos % 2 == 1 { term.neg() } else { term };
        acc = Some(match acc {
            None => term,
            Some(a) => a.try_add(&term)?,
        });
    }
    Ok(acc.expect("nonempty"))
}

fn singular_locus(f: &IntegralMap) -> StabilityResult<(SingularLocus, usize)> {
    let dirs = f.directions();
    let n = dirs.len();
    let linear = Cap::new(1);
    let jac: Vec<Vec<TruncatedPoly>> = f
        .components()
        .iter()
        .map(|c| {
            dirs.iter()
                .map(|&j| Ok(c.partial_derivative(j)?.truncate(linear)))
                .collect::<StabilityResult<Vec<_>>>()
        })
        .collect::<StabilityResult<_>>()?;
    let m = jac.len();
    let cols: Vec<usize> = (0..n).collect();
    let mut span = crate::linalg::Subspace::new(f.source().len());
    let mut choice: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<Vec<TruncatedPoly>> = choice.iter().map(|&i| jac[i].clone()).collect();
        let minor = determinant(&rows, &cols)?.truncate(linear);
        if !minor.constant_term().is_zero() {
            return Ok((SingularLocus::Empty, f.source().len()));
        }
        let v: crate::linalg::RatVec = minor
            .terms()
            .iter()
            .map(|(mono, c)| {
                (
                    mono.0.iter().position(|&e| e > 0).expect("linear term"),
                    c.clone(),
                )
            })
            .collect::<BTreeMap<_, _>>()
            .into_iter()
            .collect();
        if !v.is_empty() {
            span.insert_rat(&v);
        }
        // next n-subset of the rows
        let mut k = n;
        loop {
            if k == 0 {
                let rank = span.dim();
                let verdict = if rank >= 2 {
                    SingularLocus::CodimensionTwo
                } else if n == 1 {
                    SingularLocus::CodimensionOne
                } else {
                    SingularLocus::Undecided
                };
                return Ok((verdict, rank));
            }
            k -= 1;
            if choice[k] < m - n + k {
                choice[k] += 1;
                for l in k + 1..n {
                    choice[l] = choice[l - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn ca_evidence(f: &IntegralMap, r: u32) -> StabilityResult<CaEvidence> {
    let rf = crate::deformations::rf_truncated(f, r)?;
    let pullback = crate::deformations::pullback_truncated(f, r)?;
    let equal = rf.dim() == pullback.dim() && pullback.is_subspace_of(&rf);
    let (locus, rank) = singular_locus(f)?;
    let ca = match (equal, locus) {
        (false, _) | (_, SingularLocus::CodimensionOne) => Verdict::Fail,
        (true, SingularLocus::Undecided) => Verdict::Inconclusive,
        (true, _) => Verdict::Pass,
    };
    Ok(CaEvidence {
        germ: germ_label(f),
        order: r,
        rf_dim: rf.dim(),
        pullback_dim: pullback.dim(),
        rf_equals_pullback: equal,
        singular_locus: locus,
        linear_minor_rank: rank,
        ca_evidence: ca,
    })
}

/// Source variables of kind source, by name.
fn direction_names(vars: &Vars) -> Vec<String> {
    vars.indices_of(VarKind::Source)
        .into_iter()
        .map(|i| vars.get(i).name.clone())
        .collect()
}

fn param_names(vars: &Vars) -> Vec<String> {
    vars.indices_of(VarKind::Param)
        .into_iter()
        .map(|i| vars.get(i).name.clone())
        .collect()
}

/// Components with the named parameters set to zero, on the same variables.
pub fn restrict_params(f: &IntegralMap, names: &[String]) -> StabilityResult<Vec<TruncatedPoly>> {
    let vars = f.source();
    let idx: Vec<usize> = names.iter().filter_map(|n| vars.index_of(n)).collect();
    f.components()
        .iter()
        .map(|c| {
            idx.iter()
                .try_fold(c.clone(), |acc, &i| acc.restrict_zero(i))
        })
        .collect::<Result<_, _>>()
        .map_err(StabilityError::from)
}

/// Components of `f` embedded by name into `vars`.
pub fn embed_components(f: &IntegralMap, vars: &Arc<Vars>) -> StabilityResult<Vec<TruncatedPoly>> {
    f.components()
        .iter()
        .map(|c| c.embed_by_name(vars))
        .collect::<Result<_, _>>()
        .map_err(StabilityError::from)
}

/// Joins an unfolding over `λ` and one over `μ` of the same graph-form germ
/// into an unfolding over `(λ, μ)`: the graph data add (`Ũ = U + U′ - u`,
/// `Ṽ = V + V′ - v`) and the remaining components are recompleted with
/// boundary term `r_F + r_F′ - r_f` along `x_n = 0`.
pub fn extend_unfoldings(big: &IntegralMap, other: &IntegralMap) -> StabilityResult<IntegralMap> {
    let (va, vb) = (big.source(), other.source());
    let dirs = direction_names(va);
    if dirs != direction_names(vb) {
        return Err(StabilityError::IncompatibleVariables);
    }
    let (pa, pb) = (param_names(va), param_names(vb));
    if pa.iter().any(|p| pb.contains(p)) {
        return Err(StabilityError::IncompatibleVariables);
    }
    let mut names: Vec<(String, VarKind)> =
        dirs.iter().map(|d| (d.clone(), VarKind::Source)).collect();
    names.extend(pa.iter().map(|p| (p.clone(), VarKind::Param)));
    names.extend(pb.iter().map(|p| (p.clone(), VarKind::Param)));
    let vars = Vars::from_names(&names)?;
    let n = dirs.len();

    let fa = embed_components(big, &vars)?;
    let fb = embed_components(other, &vars)?;
    let zero_all =
        |comps: &[TruncatedPoly], params: &[String]| -> StabilityResult<Vec<TruncatedPoly>> {
            let idx: Vec<usize> = params
                .iter()
                .map(|p| vars.index_of(p).expect("embedded"))
                .collect();
            comps
                .iter()
                .map(|c| {
                    idx.iter()
                        .try_fold(c.clone(), |acc, &i| acc.restrict_zero(i))
                        .map_err(StabilityError::from)
                })
                .collect()
        };
    let base = zero_all(&fa, &pa)?;
    let base_b = zero_all(&fb, &pb)?;
    let cap = big.cap().min(other.cap());
    if base
        .iter()
        .zip(&base_b)
        .any(|(a, b)| a.truncate(cap) != b.truncate(cap))
    {
        return Err(StabilityError::UnfoldingsDisagree);
    }
    for comps in [&fa, &fb] {
        for i in 0..n - 1 {
            let x = TruncatedPoly::var(&vars, Cap::EXACT, i);
            if comps[n + i].truncate(cap) != x.truncate(cap) {
                return Err(StabilityError::NotGraphForm { index: i + 1 });
            }
        }
    }
    let last = n - 1;
    let (p_n, q_n, r_idx) = (last, n + last, 2 * n);
    let u = fa[q_n].try_add(&fb[q_n])?.try_sub(&base[q_n])?;
    let v = fa[p_n].try_add(&fb[p_n])?.try_sub(&base[p_n])?;
    let boundary = fa[r_idx]
        .restrict_zero(last)?
        .try_add(&fb[r_idx].restrict_zero(last)?)?
        .try_sub(&base[r_idx].restrict_zero(last)?)?;
    Ok(complete_graph(&vars, &u, &v, &boundary)?)
}
