//! Infinitesimal integral deformations: fields `v` along an integral germ `f`
//! with `v*α̃ = 0`, their generating functions, the module structure, the
//! image operators `tf`, `wf` and the finite linear systems describing
//! their jets.
//!
//! Jet coordinates of a field of degree at most `r` are numbered
//! `monomial_index * (2n+1) + component`, monomials ordered by degree, so the
//! coordinates of degree `>= d` form a tail.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::contact::ContactChart;
use crate::exec;
use crate::forms::{FieldAlongMap, FormError};
use crate::integral_maps::{IntegralError, IntegralMap, IntegralityReport, Violation};
use crate::jet::{Composer, JetPoly, Layer, MonomialTable, NONE};
use crate::linalg::{to_primitive, Ambient, Echelon, IntVec, RatVec, Subspace};
use crate::ring::{Cap, Monomial, RingError, TruncatedPoly, VarKind};
use crate::scalar::{Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformError {
    #[error("cap {available} is too small: degree {needed} is required")]
    CapShortfall { needed: u32, available: Cap },
    #[error("the field is not an integral deformation: {0}")]
    Uncertified(Violation),
    #[error("jet systems need a germ without unfolding parameters")]
    HasParameters,
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("the exact computation needs an exact germ")]
    NotExact,
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub type DeformResult<T> = Result<T, DeformError>;

/// A vector field along an integral germ with components `(φ, ξ, s)`.
#[derive(Debug, Clone)]
pub struct DeformationField {
    base: IntegralMap,
    comps: Vec<TruncatedPoly>,
    cert: OnceLock<IntegralityReport>,
}

impl PartialEq for DeformationField {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.comps == other.comps
    }
}

impl DeformationField {
    pub fn new(base: &IntegralMap, comps: Vec<TruncatedPoly>) -> DeformResult<DeformationField> {
        let expected = 2 * base.n() + 1;
        if comps.len() != expected {
            return Err(DeformError::ComponentCount {
                expected,
                got: comps.len(),
            });
        }
        if comps.iter().any(|c| **c.vars() != **base.source()) {
            return Err(RingError::VarMismatch.into());
        }
        Ok(DeformationField {
            base: base.clone(),
            comps,
            cert: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &IntegralMap {
        &self.base
    }

    pub fn components(&self) -> &[TruncatedPoly] {
        &self.comps
    }

    pub fn cap(&self) -> Cap {
        self.comps
            .iter()
            .map(|c| c.cap())
            .min()
            .unwrap_or(Cap::EXACT)
            .min(self.base.cap())
    }

    pub fn truncate(&self, cap: Cap) -> DeformationField {
        DeformationField {
            base: self.base.clone(),
            comps: self.comps.iter().map(|c| c.truncate(cap)).collect(),
            cert: OnceLock::new(),
        }
    }

    pub fn try_add(&self, other: &DeformationField) -> DeformResult<DeformationField> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        DeformationField::new(&self.base, comps)
    }

    pub fn try_sub(&self, other: &DeformationField) -> DeformResult<DeformationField> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_, _>>()?;
        DeformationField::new(&self.base, comps)
    }

    pub fn scale(&self, c: &Rat) -> DeformationField {
        DeformationField {
            base: self.base.clone(),
            comps: self.comps.iter().map(|a| a.scale(c)).collect(),
            cert: OnceLock::new(),
        }
    }

    pub fn mul_function(&self, h: &TruncatedPoly) -> DeformResult<DeformationField> {
        let comps = self
            .comps
            .iter()
            .map(|a| a.try_mul(h))
            .collect::<Result<_, _>>()?;
        DeformationField::new(&self.base, comps)
    }

    /// The field as a map into the tangent chart.
    pub fn as_field_along(&self) -> DeformResult<FieldAlongMap> {
        Ok(FieldAlongMap::new(
            self.base.germ().to_chart_map()?,
            self.comps.clone(),
        )?)
    }

    /// Certificate for `v*α̃ = 0`, computed through the natural lifting of
    /// the contact form and cached.
    pub fn is_integral_deformation(&self) -> DeformResult<&IntegralityReport> {
        if let Some(c) = self.cert.get() {
            return Ok(c);
        }
        let contact = ContactChart::standard(self.base.n());
        let lifted = contact.alpha().natural_lift()?;
        let pulled = self.as_field_along()?.pullback_tangent(&lifted)?;
        let source = self.base.source();
        let mut worst: Option<Violation> = None;
        for (idx, coeff) in pulled.terms() {
            if let Some((m, c)) = coeff.terms().iter().next() {
                let term = TruncatedPoly::monomial(source, Cap::EXACT, m.clone(), c.clone());
                let v = Violation {
                    direction: source.get(idx[0] as usize).name.clone(),
                    degree: m.degree() + 1,
                    term: term.to_string(),
                };
                if worst.as_ref().is_none_or(|w| v.degree < w.degree) {
                    worst = Some(v);
                }
            }
        }
        let report = match worst {
            Some(v) => IntegralityReport::Violation(v),
            None => IntegralityReport::Certificate {
                through_degree: pulled.cap(),
            },
        };
        let _ = self.cert.set(report);
        Ok(self.cert.get().expect("just set"))
    }

    fn require_member(&self) -> DeformResult<()> {
        match self.is_integral_deformation()? {
            IntegralityReport::Certificate { .. } => Ok(()),
            IntegralityReport::Violation(v) => Err(DeformError::Uncertified(v.clone())),
        }
    }

    /// `e(v) = s - Σ (p_i∘f) ξ_i`.
    pub fn generating_function(&self) -> DeformResult<TruncatedPoly> {
        let n = self.base.n();
        let mut e = self.comps[2 * n].clone();
        for i in 0..n {
            e = e.try_sub(&self.base.p(i).try_mul(&self.comps[n + i])?)?;
        }
        Ok(e)
    }
}

/// `tf(ξ) = f_*(ξ)` for a source field given by its components.
pub fn tf_apply(f: &IntegralMap, xi: &[TruncatedPoly]) -> DeformResult<DeformationField> {
    let dirs = f.directions();
    if xi.len() != dirs.len() {
        return Err(DeformError::ComponentCount {
            expected: dirs.len(),
            got: xi.len(),
        });
    }
    let comps = f
        .components()
        .iter()
        .map(|c| {
            let mut acc = TruncatedPoly::zero(f.source(), Cap::EXACT);
            for (x, &j) in xi.iter().zip(&dirs) {
                acc = acc.try_add(&x.try_mul(&c.partial_derivative(j)?)?)?;
            }
            Ok(acc)
        })
        .collect::<DeformResult<Vec<_>>>()?;
    DeformationField::new(f, comps)
}

/// `wf(H) = X_H∘f`.
pub fn wf_apply(f: &IntegralMap, h: &TruncatedPoly) -> DeformResult<DeformationField> {
    let contact = ContactChart::standard(f.n());
    let x = contact.contact_hamiltonian(h)?;
    let comps = x
        .components()
        .iter()
        .map(|c| c.compose(f.components()))
        .collect::<Result<Vec<_>, _>>()?;
    DeformationField::new(f, comps)
}

/// `H * v = f*H · v + e(v) (X_H - H R)∘f`.
pub fn module_mult(h: &TruncatedPoly, v: &DeformationField) -> DeformResult<DeformationField> {
    v.require_member()?;
    let f = v.base();
    let n = f.n();
    let contact = ContactChart::standard(n);
    let fh = h.compose(f.components())?;
    let e = v.generating_function()?;
    let x = contact.contact_hamiltonian(h)?;
    let mut comps = Vec::with_capacity(2 * n + 1);
    for (c, xc) in x.components().iter().enumerate() {
        let mut xc = xc.clone();
        if c == contact.r() {
            xc = xc.try_sub(h)?;
        }
        let along = xc.compose(f.components())?;
        comps.push(fh.try_mul(&v.comps[c])?.try_add(&e.try_mul(&along)?)?);
    }
    let out = DeformationField::new(f, comps)?;
    out.require_member()?;
    Ok(out)
}

/// Monomials and component slots of the jet coordinates.
#[derive(Debug, Clone)]
pub struct SliceLayout {
    table: Arc<MonomialTable>,
    ncomp: usize,
    degree: u32,
    component_names: Vec<String>,
    source_names: Vec<String>,
}

impl SliceLayout {
    pub fn table(&self) -> &Arc<MonomialTable> {
        &self.table
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.table.count_up_to(self.degree) * self.ncomp
    }

    pub fn coordinate(&self, monomial: u32, comp: usize) -> usize {
        monomial as usize * self.ncomp + comp
    }

    /// Vector of a field given by jet components, truncated at the degree.
    pub fn vector(&self, comps: &[JetPoly]) -> RatVec {
        let mut out: RatVec = Vec::new();
        for (c, p) in comps.iter().enumerate() {
            for (m, x) in &p.terms {
                if self.table.degree(*m) <= self.degree {
                    out.push((self.coordinate(*m, c), x.clone()));
                }
            }
        }
        out.sort_by_key(|(i, _)| *i);
        out
    }

    /// Inverse of [`SliceLayout::vector`], as readable components.
    pub fn decode(&self, vec: &RatVec) -> Vec<(String, String)> {
        let mut comps: Vec<Vec<(u32, Rat)>> = vec![Vec::new(); self.ncomp];
        for (i, x) in vec {
            comps[i % self.ncomp].push(((i / self.ncomp) as u32, x.clone()));
        }
        let vars = crate::ring::Vars::from_names(
            &self
                .source_names
                .iter()
                .map(|s| (s.as_str(), VarKind::Source))
                .collect::<Vec<_>>(),
        )
        .expect("distinct names");
        comps
            .into_iter()
            .enumerate()
            .filter(|(_, t)| !t.is_empty())
            .map(|(c, terms)| {
                let p = JetPoly { terms }.to_poly(&self.table, &vars, Cap::new(self.degree));
                (self.component_names[c].clone(), p.to_string())
            })
            .collect()
    }

    pub fn ambient(&self, description: &str) -> Ambient {
        Ambient {
            description: description.to_string(),
            source_vars: self.source_names.clone(),
            components: self.component_names.clone(),
            max_degree: self.degree,
            dim: self.dim(),
        }
    }
}

/// Components of a germ as indexed jets.
#[derive(Debug, Clone)]
pub struct JetGerm {
    pub n: usize,
    pub degree: u32,
    pub table: Arc<MonomialTable>,
    pub comps: Vec<JetPoly>,
    source_names: Vec<String>,
}

impl JetGerm {
    /// Jets through `degree`; the germ's cap must cover `needed`.
    pub fn new(f: &IntegralMap, degree: u32, needed: u32) -> DeformResult<JetGerm> {
        if !f.germ().params().is_empty() {
            return Err(DeformError::HasParameters);
        }
        if !f.cap().covers(needed) {
            return Err(DeformError::CapShortfall {
                needed,
                available: f.cap(),
            });
        }
        let table = MonomialTable::new(f.source().len(), degree);
        let comps = f
            .components()
            .iter()
            .map(|c| JetPoly::from_poly(&table, c, degree))
            .collect();
        Ok(JetGerm {
            n: f.n(),
            degree,
            table,
            comps,
            source_names: f.source().iter().map(|v| v.name.clone()).collect(),
        })
    }

    pub fn p(&self, i: usize) -> &JetPoly {
        &self.comps[i]
    }

    pub fn q(&self, i: usize) -> &JetPoly {
        &self.comps[self.n + i]
    }

    pub fn ncomp(&self) -> usize {
        2 * self.n + 1
    }

    pub fn nsource(&self) -> usize {
        self.table.nvars()
    }

    pub fn layout(&self, degree: u32) -> SliceLayout {
        let names = ContactChart::standard(self.n)
            .chart()
            .tangent()
            .expect("tangent chart");
        let component_names = names
            .vars()
            .iter()
            .skip(self.ncomp())
            .map(|v| v.name.clone())
            .collect();
        SliceLayout {
            table: self.table.clone(),
            ncomp: self.ncomp(),
            degree: degree.min(self.degree),
            component_names,
            source_names: self.source_names.clone(),
        }
    }

    pub fn composer(&self, deg: u32) -> Composer {
        Composer::new(
            self.table.clone(),
            self.comps
                .iter()
                .map(|c| c.truncate(&self.table, deg))
                .collect(),
            deg,
        )
    }
}

/// Sparse linear system given by the images of unit unknowns, solved block
/// by block along the connected components of its incidence graph.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub nrows: usize,
    pub columns: Vec<RatVec>,
}

impl LinearSystem {
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    /// Column groups with no row in common.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.nrows).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for col in &self.columns {
            if let Some((first, _)) = col.first() {
                let a = find(&mut parent, *first);
                for (row, _) in &col[1..] {
                    let b = find(&mut parent, *row);
                    if a != b {
                        parent[b] = a;
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut singles = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            match col.first() {
                Some((row, _)) => {
                    let root = find(&mut parent, *row);
                    groups.entry(root).or_default().push(j);
                }
                None => singles.push(vec![j]),
            }
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.extend(singles);
        out
    }

    pub fn rank(&self) -> usize {
        let blocks = self.blocks();
        exec::map(&blocks, |cols| {
            let mut ech = Echelon::new();
            for &j in cols {
                if !self.columns[j].is_empty() {
                    ech.insert(to_primitive(&self.columns[j]));
                }
            }
            ech.rank()
        })
        .into_iter()
        .sum()
    }

    pub fn nullity(&self) -> usize {
        self.ncols() - self.rank()
    }

    pub fn kernel(&self) -> Subspace {
        let blocks = self.blocks();
        let parts = exec::map(&blocks, |cols| {
            let mut ech = Echelon::new();
            for &j in cols {
                let mut v = self.columns[j].clone();
                v.push((self.nrows + j, Rat::one()));
                ech.insert(to_primitive(&v));
            }
            ech.rows_with_pivot_in(self.nrows..usize::MAX)
                .map(|r| {
                    r.iter()
                        .map(|(c, x)| (c - self.nrows, x.clone()))
                        .collect::<IntVec>()
                })
                .collect::<Vec<_>>()
        });
        Subspace::spanned_by(self.ncols(), parts.into_iter().flatten())
    }
}

pub fn jet_germ_for_slice(f: &IntegralMap, r: u32) -> DeformResult<JetGerm> {
    JetGerm::new(f, r + 1, r + 1)
}

/// The linear system for `v*α̃ ≡ 0` modulo degree `r`: unknowns are the jet
/// coordinates of `v` through degree `r`, equations the coefficients of
/// degree `< r` of `de + Σ ξ_i dP_i - Σ φ_i dQ_i`.
pub fn vi_system(jg: &JetGerm, r: u32) -> LinearSystem {
    let layout = jg.layout(r);
    let t = &jg.table;
    let n = jg.n;
    let ns = jg.nsource();
    let eq_deg = r.saturating_sub(1);
    let nrows = if r == 0 {
        0
    } else {
        t.count_up_to(eq_deg) * ns
    };
    let row = |m: u32, j: usize| m as usize * ns + j;
    let dq: Vec<Vec<JetPoly>> = (0..n)
        .map(|i| (0..ns).map(|j| jg.q(i).derivative(t, j)).collect())
        .collect();
    let nmono = t.count_up_to(r);
    let cols_for = |m: u32| -> Vec<RatVec> {
        let mono = t.monomial(m).clone();
        let dm = mono.degree();
        let mut out = vec![Vec::new(); layout.ncomp()];
        if r == 0 {
            return out;
        }
        // s: d(x^m)
        let mut s_col = Vec::new();
        for j in 0..ns {
            let e = mono.0[j];
            if e > 0 {
                s_col.push((row(t.div_var(m, j), j), Rat::int(e as i64)));
            }
        }
        // ξ_i: -P_i d(x^m)
        for i in 0..n {
            let mut raw = Vec::new();
            for j in 0..ns {
                let e = mono.0[j];
                if e == 0 {
                    continue;
                }
                let base = t.div_var(m, j);
                let base_mono = t.monomial(base);
                let c = Rat::int(-(e as i64));
                for (k, a) in &jg.p(i).terms {
                    if t.degree(*k) + dm - 1 > eq_deg {
                        break;
                    }
                    raw.push((row(t.product(*k, base_mono), j), &c * a));
                }
            }
            out[n + i] = normalize(raw);
        }
        // φ_i: -x^m dQ_i
        for i in 0..n {
            let mut raw = Vec::new();
            for (j, dqj) in dq[i].iter().enumerate().take(ns) {
                for (k, a) in &dqj.terms {
                    if t.degree(*k) + dm > eq_deg {
                        break;
                    }
                    raw.push((row(t.product(*k, &mono), j), -a));
                }
            }
            out[i] = normalize(raw);
        }
        out[2 * n] = s_col;
        out
    };
    let per_mono = exec::map_range(nmono, |m| cols_for(m as u32));
    LinearSystem {
        nrows,
        columns: per_mono.into_iter().flatten().collect(),
    }
}

fn normalize(mut raw: RatVec) -> RatVec {
    raw.sort_by_key(|(i, _)| *i);
    let mut out: RatVec = Vec::with_capacity(raw.len());
    for (i, c) in raw {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = &*acc + &c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Dimension of the jet slice of `VI_f` through degree `r`.
pub fn vi_dimension(f: &IntegralMap, r: u32) -> DeformResult<usize> {
    let jg = jet_germ_for_slice(f, r)?;
    Ok(vi_system(&jg, r).nullity())
}

/// Basis of the jet slice of `VI_f` through degree `r`.
pub fn vi_basis(f: &IntegralMap, r: u32) -> DeformResult<crate::linalg::JetSubspace> {
    let jg = jet_germ_for_slice(f, r)?;
    let layout = jg.layout(r);
    let k = vi_system(&jg, r).kernel();
    Ok(crate::linalg::JetSubspace::from_subspace(
        layout.ambient("jets of VI_f modulo VI_f^r"),
        &k,
    ))
}

/// Dimension of the degree-`r` truncation of the slice at a higher
/// `level`.  The slice at level `r` also contains jets that have no integral
/// extension; raising the level removes them, and the truncations decrease
/// towards the space of `r`-jets of genuine elements of `VI_f`.
///
/// `jg` must carry jets through degree `level + 1`.
pub fn projected_slice_dim(jg: &JetGerm, r: u32, level: u32) -> usize {
    let system = vi_system(jg, level);
    let cut = jg.table.count_up_to(r) * jg.ncomp();
    let tail = LinearSystem {
        nrows: system.nrows,
        columns: system.columns[cut..].to_vec(),
    };
    system.nullity() - tail.nullity()
}

/// Basis of the truncation counted by [`projected_slice_dim`], in the
/// coordinates of `jg.layout(r)`.
pub fn projected_slice(jg: &JetGerm, r: u32, level: u32) -> Subspace {
    let system = vi_system(jg, level);
    let cut = jg.table.count_up_to(r) * jg.ncomp();
    let kernel = system.kernel();
    // pivots are the lowest columns, so rows with pivot below the cut
    // project onto a basis of the truncation
    Subspace::spanned_by(
        cut,
        kernel.echelon().rows_with_pivot_in(0..cut).map(|row| {
            row.iter()
                .filter(|(c, _)| *c < cut)
                .cloned()
                .collect::<IntVec>()
        }),
    )
}

/// Truncations of `x^a ∂f/∂x_j` for `|a| <= r`.
pub fn tf_generators(jg: &JetGerm, r: u32) -> Vec<RatVec> {
    let layout = jg.layout(r);
    let t = &jg.table;
    let ns = jg.nsource();
    let partials: Vec<Vec<JetPoly>> = (0..ns)
        .map(|j| {
            jg.comps
                .iter()
                .map(|c| c.derivative(t, j).truncate(t, r))
                .collect()
        })
        .collect();
    let nmono = t.count_up_to(r);
    exec::map_range(nmono * ns, |k| {
        let (m, j) = ((k / ns) as u32, k % ns);
        let mono = t.monomial(m).clone();
        let comps: Vec<JetPoly> = partials[j]
            .iter()
            .map(|p| {
                let terms = p
                    .terms
                    .iter()
                    .filter(|(i, _)| t.degree(*i) + mono.degree() <= r)
                    .map(|(i, c)| (t.product(*i, &mono), c.clone()))
                    .filter(|(i, _)| *i != NONE)
                    .collect::<Vec<_>>();
                let mut terms = terms;
                terms.sort_by_key(|(i, _)| *i);
                JetPoly { terms }
            })
            .collect();
        layout.vector(&comps)
    })
    .into_iter()
    .filter(|v| !v.is_empty())
    .collect()
}

/// One generator `wf(H)` for a monomial Hamiltonian.
#[derive(Debug, Clone)]
pub struct WfGenerator {
    pub hamiltonian: Monomial,
    pub legendre: bool,
    pub vector: RatVec,
}

/// Streams the truncated images `wf(H)` of every monomial Hamiltonian whose
/// image is not zero through degree `r`, one target degree at a time.
///
/// A monomial `H` of degree `d` has image built from the values of `H` and
/// of its degree `d-1` divisors, so it can be nonzero only when some divisor
/// has a nonzero value; the candidates are therefore the products
/// `m·y_j` with `m` in the previous value layer, which is complete.
pub fn for_each_wf_generator(jg: &JetGerm, r: u32, mut sink: impl FnMut(&[WfGenerator])) {
    let n = jg.n;
    let ncomp = jg.ncomp();
    let layout = jg.layout(r);
    let composer = jg.composer(r);
    let t = &jg.table;
    let p_trunc: Vec<JetPoly> = (0..n).map(|i| jg.p(i).truncate(t, r)).collect();
    let mut prev: Layer = Layer::new();
    let mut cur: Layer = composer.first_layer();
    let mut degree = 0u32;
    loop {
        // candidates of this degree: everything reachable from the previous
        // layer, plus the constant at degree 0
        let cands: Vec<Monomial> = if degree == 0 {
            vec![Monomial::one(ncomp)]
        } else {
            composer.candidates(&prev).into_iter().collect()
        };
        if cands.is_empty() {
            break;
        }
        let gens = exec::map(&cands, |h| {
            let value_of_divisor = |k: usize| -> Option<&JetPoly> {
                let mut d = h.clone();
                d.0[k] -= 1;
                prev.get(&d)
            };
            let deg_p: u32 = (0..n).map(|i| h.0[i] as u32).sum();
            let mut comps = vec![JetPoly::zero(); ncomp];
            let r_idx = 2 * n;
            let h_r = (h.0[r_idx] > 0).then(|| value_of_divisor(r_idx)).flatten();
            for i in 0..n {
                // ∂/∂p_i: ∂H/∂q_i + p_i ∂H/∂r
                let mut acc = JetPoly::zero();
                if h.0[n + i] > 0 {
                    if let Some(v) = value_of_divisor(n + i) {
                        acc = acc.add(&v.scale(&Rat::int(h.0[n + i] as i64)));
                    }
                }
                if let Some(v) = h_r {
                    let prod = p_trunc[i].mul(v, t, r).scale(&Rat::int(h.0[r_idx] as i64));
                    acc = acc.add(&prod);
                }
                comps[i] = acc;
                // ∂/∂q_i: -∂H/∂p_i
                if h.0[i] > 0 {
                    if let Some(v) = value_of_divisor(i) {
                        comps[n + i] = v.scale(&Rat::int(-(h.0[i] as i64)));
                    }
                }
            }
            // ∂/∂r: (1 - deg_p H) H
            if deg_p != 1 {
                if let Some(v) = cur.get(h) {
                    comps[r_idx] = v.scale(&Rat::int(1 - deg_p as i64));
                }
            }
            WfGenerator {
                hamiltonian: h.clone(),
                legendre: deg_p <= 1,
                vector: layout.vector(&comps),
            }
        });
        let gens: Vec<WfGenerator> = gens.into_iter().filter(|g| !g.vector.is_empty()).collect();
        sink(&gens);
        if degree > r + 1 {
            break;
        }
        // advance: the next layer of values
        let next = composer.next_layer(&cur, &composer.candidates(&cur));
        prev = std::mem::replace(&mut cur, next);
        degree += 1;
        if prev.is_empty() {
            break;
        }
    }
}

/// Span of the truncated tf generators.
pub fn tf_span(f: &IntegralMap, r: u32) -> DeformResult<Subspace> {
    let jg = jet_germ_for_slice(f, r)?;
    let layout = jg.layout(r);
    Ok(Subspace::spanned_by(
        layout.dim(),
        tf_generators(&jg, r).iter().map(to_primitive),
    ))
}

/// Truncation of `f*E_W` through degree `r`, as coefficient vectors over
/// the source monomials.
pub fn pullback_truncated(f: &IntegralMap, r: u32) -> DeformResult<Subspace> {
    let jg = JetGerm::new(f, r, r)?;
    let composer = jg.composer(r);
    let dim = jg.table.count_up_to(r);
    let mut span = Subspace::new(dim);
    let mut layer = composer.first_layer();
    while !layer.is_empty() {
        for v in layer.values() {
            span.insert_rat(
                &v.terms
                    .iter()
                    .map(|(i, c)| (*i as usize, c.clone()))
                    .collect(),
            );
        }
        layer = composer.next_layer(&layer, &composer.candidates(&layer));
    }
    Ok(span)
}

/// `R_f` through degree `r`: polynomials `h` of degree `<= r` with `dh`
/// congruent modulo degree `r` to a combination `Σ a_i dQ_i + Σ b_i dP_i`.
pub fn rf_truncated(f: &IntegralMap, r: u32) -> DeformResult<Subspace> {
    let jg = jet_germ_for_slice(f, r)?;
    let t = &jg.table;
    let ns = jg.nsource();
    let dim = t.count_up_to(r);
    if r == 0 {
        return Ok(Subspace::spanned_by(dim, [vec![(0, Int::one())]]));
    }
    let eq_deg = r - 1;
    let row = |m: u32, j: usize| m as usize * ns + j;
    let mut module = Echelon::new();
    for c in 0..2 * jg.n {
        let partials: Vec<JetPoly> = (0..ns).map(|j| jg.comps[c].derivative(t, j)).collect();
        for m in 0..t.count_up_to(eq_deg) as u32 {
            let mono = t.monomial(m).clone();
            let mut raw = Vec::new();
            for (j, p) in partials.iter().enumerate() {
                for (k, a) in &p.terms {
                    if t.degree(*k) + mono.degree() > eq_deg {
                        break;
                    }
                    raw.push((row(t.product(*k, &mono), j), a.clone()));
                }
            }
            let v = normalize(raw);
            if !v.is_empty() {
                module.insert(to_primitive(&v));
            }
        }
    }
    // rows with zero 1-form part combine the dh's into the module
    let nrows = t.count_up_to(eq_deg) * ns;
    let columns = exec::map_range(dim, |m| {
        let mono = t.monomial(m as u32);
        let mut v: RatVec = Vec::new();
        for j in 0..ns {
            let e = mono.0[j];
            if e > 0 {
                v.push((row(t.div_var(m as u32, j), j), Rat::int(e as i64)));
            }
        }
        v = normalize(v);
        v.push((nrows + m, Rat::one()));
        to_primitive(&v)
    });
    for v in columns {
        module.insert(v);
    }
    Ok(Subspace::spanned_by(
        dim,
        module.rows_with_pivot_in(nrows..usize::MAX).map(|r| {
            r.iter()
                .map(|(c, x)| (c - nrows, x.clone()))
                .collect::<IntVec>()
        }),
    ))
}

/// Maps a slice vector of a field to the coefficient vector of its
/// generating function `s - Σ P_i ξ_i` through degree `r`.
pub fn generating_vector(jg: &JetGerm, r: u32, v: &IntVec) -> RatVec {
    let t = &jg.table;
    let n = jg.n;
    let ncomp = jg.ncomp();
    let mut raw: RatVec = Vec::new();
    for (i, x) in v {
        let (m, c) = ((i / ncomp) as u32, i % ncomp);
        let x = Rat::from_ints(x, &Int::one());
        if c == 2 * n {
            raw.push((m as usize, x));
        } else if c >= n {
            let mono = t.monomial(m).clone();
            for (k, a) in &jg.p(c - n).terms {
                if t.degree(*k) + mono.degree() > r {
                    break;
                }
                raw.push((t.product(*k, &mono) as usize, -(&x * a)));
            }
        }
    }
    normalize(raw)
}

/// Image of the slice under the generating function and the slice part of
/// its kernel.
pub fn generating_image_and_kernel(f: &IntegralMap, r: u32) -> DeformResult<(Subspace, Subspace)> {
    let jg = jet_germ_for_slice(f, r)?;
    let slice = vi_system(&jg, r).kernel();
    let dim = jg.table.count_up_to(r);
    let ldim = jg.layout(r).dim();
    let mut ech = Echelon::new();
    for row in slice.echelon().rows() {
        let mut e = generating_vector(&jg, r, row);
        e.extend(
            row.iter()
                .map(|(c, x)| (dim + c, Rat::from_ints(x, &Int::one()))),
        );
        ech.insert(to_primitive(&e));
    }
    let image = Subspace::spanned_by(
        dim,
        ech.rows_with_pivot_in(0..dim).map(|r| {
            r.iter()
                .filter(|(c, _)| *c < dim)
                .cloned()
                .collect::<IntVec>()
        }),
    );
    let kernel = Subspace::spanned_by(
        ldim,
        ech.rows_with_pivot_in(dim..usize::MAX).map(|r| {
            r.iter()
                .map(|(c, x)| (c - dim, x.clone()))
                .collect::<IntVec>()
        }),
    );
    Ok((image, kernel))
}

/// Exact `VI'_f` among polynomial fields of degree `<= r`: `v*α̃ = 0` and
/// `e(v) = 0` as polynomials, for an exact germ.
pub fn vi_prime_polynomial(f: &IntegralMap, r: u32) -> DeformResult<Subspace> {
    if !f.cap().is_exact() {
        return Err(DeformError::NotExact);
    }
    let top = f
        .components()
        .iter()
        .filter_map(|c| c.degree())
        .max()
        .unwrap_or(0);
    let full = r + top;
    let jg = JetGerm::new(f, full, full)?;
    let system = vi_system(&jg, full + 1);
    let layout = jg.layout(r);
    let ncomp = jg.ncomp();
    let nmono = jg.table.count_up_to(r);
    // restrict the unknowns to degree <= r and add e(v) = 0
    let nrows = system.nrows;
    let columns: Vec<RatVec> = (0..nmono * ncomp)
        .map(|k| {
            let mut col = system.columns[k].clone();
            let unit = vec![(k, Int::one())];
            col.extend(
                generating_vector(&jg, full + 1, &unit)
                    .into_iter()
                    .map(|(c, x)| (nrows + c, x)),
            );
            col
        })
        .collect();
    let restricted = LinearSystem {
        nrows: nrows + jg.table.len(),
        columns,
    };
    let k = restricted.kernel();
    debug_assert_eq!(k.ambient_dim(), layout.dim());
    Ok(k)
}

/// Slice fields with vanishing `(φ, ξ)` parts.
pub fn pi_kernel(f: &IntegralMap, r: u32) -> DeformResult<Subspace> {
    let jg = jet_germ_for_slice(f, r)?;
    let system = vi_system(&jg, r);
    let ncomp = jg.ncomp();
    let s = 2 * jg.n;
    let slots: Vec<usize> = (0..system.ncols()).filter(|k| k % ncomp == s).collect();
    let restricted = LinearSystem {
        nrows: system.nrows,
        columns: slots.iter().map(|&k| system.columns[k].clone()).collect(),
    };
    let k = restricted.kernel();
    Ok(Subspace::spanned_by(
        system.ncols(),
        k.echelon().rows().map(|row| {
            row.iter()
                .map(|(c, x)| (slots[*c], x.clone()))
                .collect::<IntVec>()
        }),
    ))
}
