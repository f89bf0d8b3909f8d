//! Integral map-germs `(K^n, 0) -> (K^{2n+1}, 0)` of corank at most one, their
//! completion from graph data `(u, v)`, the open Whitney umbrellas and the
//! correspondence with isotropic maps.
//!
//! Source variables of kind [`VarKind::Param`] are unfolding parameters: they
//! enter the components but exterior derivatives are taken in the
//! [`VarKind::Source`] variables only.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::contact::ContactChart;
use crate::forms::{Chart, FormError, MapBetweenCharts};
use crate::linalg::Subspace;
use crate::ring::{Cap, Monomial, RingError, TruncatedPoly, VarKind, Vars};
use crate::scalar::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegralError {
    #[error("the source has no variables of kind source")]
    NoSourceVariables,
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("component {name} does not vanish at the origin")]
    NotBasedAtOrigin { name: String },
    #[error("components use a different variable list")]
    VarMismatch,
    #[error("the map is not integral: {0}")]
    NotIntegral(Violation),
    #[error("corank {corank} at the origin; only corank at most one is supported")]
    CorankTooLarge { corank: usize },
    #[error("completion impossible: boundary residual {residual} along x{index}")]
    CompletionImpossible { index: usize, residual: String },
    #[error("type k = {k} outside 0 <= k <= n/2 for n = {n}")]
    TypeOutOfRange { n: usize, k: usize },
    #[error("the 1-form g*(p dq) is not closed: residual {residual}")]
    NotClosed { residual: String },
    #[error("unfolding parameters cannot be used as chart coordinates")]
    HasParameters,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Form(#[from] FormError),
}

pub type IntegralResult<T> = Result<T, IntegralError>;

/// Where a germ came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    NormalForm { n: usize, k: usize },
    Completed,
    User,
}

/// Lowest-degree term of `f*α` in a source direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub direction: String,
    /// Degree of the term `c x^m dx_j` as a form, `|m| + 1`.
    pub degree: u32,
    pub term: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "coefficient of d{} has the term {} (degree {} with the differential)",
            self.direction, self.term, self.degree
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum IntegralityReport {
    /// `f*α` vanishes through the stated degree.
    Certificate {
        through_degree: Cap,
    },
    Violation(Violation),
}

impl IntegralityReport {
    pub fn is_certificate(&self) -> bool {
        matches!(self, IntegralityReport::Certificate { .. })
    }
}

fn source_indices(vars: &Vars) -> Vec<usize> {
    vars.indices_of(VarKind::Source)
}

/// Candidate germ in Darboux layout `(p1..pn, q1..qn, r)`; integrality is
/// not assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapGerm {
    source: Arc<Vars>,
    n: usize,
    comps: Vec<TruncatedPoly>,
}

impl MapGerm {
    pub fn new(source: &Arc<Vars>, comps: Vec<TruncatedPoly>) -> IntegralResult<MapGerm> {
        let n = source_indices(source).len();
        if n == 0 {
            return Err(IntegralError::NoSourceVariables);
        }
        if comps.len() != 2 * n + 1 {
            return Err(IntegralError::ComponentCount {
                expected: 2 * n + 1,
                got: comps.len(),
            });
        }
        if comps.iter().any(|c| **c.vars() != **source) {
            return Err(IntegralError::VarMismatch);
        }
        let germ = MapGerm {
            source: source.clone(),
            n,
            comps,
        };
        for (i, c) in germ.comps.iter().enumerate() {
            if !c.constant_term().is_zero() {
                return Err(IntegralError::NotBasedAtOrigin {
                    name: germ.component_name(i),
                });
            }
        }
        Ok(germ)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> &Arc<Vars> {
        &self.source
    }

    pub fn components(&self) -> &[TruncatedPoly] {
        &self.comps
    }

    pub fn p(&self, i: usize) -> &TruncatedPoly {
        &self.comps[i]
    }

    pub fn q(&self, i: usize) -> &TruncatedPoly {
        &self.comps[self.n + i]
    }

    pub fn r(&self) -> &TruncatedPoly {
        &self.comps[2 * self.n]
    }

    pub fn component_name(&self, i: usize) -> String {
        ContactChart::standard(self.n).vars().get(i).name.clone()
    }

    pub fn cap(&self) -> Cap {
        self.comps
            .iter()
            .map(|c| c.cap())
            .min()
            .unwrap_or(Cap::EXACT)
    }

    /// Indices of the source directions, in variable order.
    pub fn directions(&self) -> Vec<usize> {
        source_indices(&self.source)
    }

    pub fn params(&self) -> Vec<usize> {
        self.source.indices_of(VarKind::Param)
    }

    /// Coefficient of `dx_j` in `f*α`: `∂r/∂x_j - Σ p_i ∂q_i/∂x_j`.
    pub fn alpha_coefficient(&self, j: usize) -> IntegralResult<TruncatedPoly> {
        let mut c = self.r().partial_derivative(j)?;
        for i in 0..self.n {
            c = c.try_sub(&self.p(i).try_mul(&self.q(i).partial_derivative(j)?)?)?;
        }
        Ok(c)
    }

    pub fn check_integral(&self) -> IntegralResult<IntegralityReport> {
        let mut worst: Option<Violation> = None;
        let mut cap = Cap::EXACT;
        for j in self.directions() {
            let c = self.alpha_coefficient(j)?;
            cap = cap.min(c.cap());
            if let Some((m, coeff)) = c.terms().iter().next() {
                let term =
                    TruncatedPoly::monomial(&self.source, Cap::EXACT, m.clone(), coeff.clone());
                let v = Violation {
                    direction: self.source.get(j).name.clone(),
                    degree: m.degree() + 1,
                    term: term.to_string(),
                };
                if worst.as_ref().is_none_or(|w| v.degree < w.degree) {
                    worst = Some(v);
                }
            }
        }
        Ok(match worst {
            Some(v) => IntegralityReport::Violation(v),
            None => IntegralityReport::Certificate {
                through_degree: cap,
            },
        })
    }

    /// Linear parts of the components in the source directions.
    pub fn jacobian_at_origin(&self) -> Vec<Vec<Rat>> {
        let dirs = self.directions();
        self.comps
            .iter()
            .map(|c| {
                dirs.iter()
                    .map(|&j| c.coeff(&Monomial::unit(self.source.len(), j)))
                    .collect()
            })
            .collect()
    }

    /// `n - rank` of the differential at the origin.
    pub fn corank(&self) -> IntegralResult<usize> {
        let rows = self.jacobian_at_origin();
        let mut span = Subspace::new(self.n);
        for row in rows {
            span.insert_rat(
                &row.into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect(),
            );
        }
        let corank = self.n - span.dim();
        if corank > 1 {
            return Err(IntegralError::CorankTooLarge { corank });
        }
        Ok(corank)
    }

    /// The germ as a map of charts; only possible without parameters.
    pub fn to_chart_map(&self) -> IntegralResult<MapBetweenCharts> {
        if !self.params().is_empty() {
            return Err(IntegralError::HasParameters);
        }
        let source = Chart::new("N", self.source.clone());
        let target = ContactChart::standard(self.n).chart().clone();
        Ok(MapBetweenCharts::new(source, target, self.comps.clone())?)
    }

    pub fn truncate(&self, cap: Cap) -> MapGerm {
        MapGerm {
            source: self.source.clone(),
            n: self.n,
            comps: self.comps.iter().map(|c| c.truncate(cap)).collect(),
        }
    }
}

/// An integral germ of corank at most one with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralMap {
    germ: MapGerm,
    corank: usize,
    provenance: Provenance,
}

impl IntegralMap {
    pub fn new(germ: MapGerm, provenance: Provenance) -> IntegralResult<IntegralMap> {
        if let IntegralityReport::Violation(v) = germ.check_integral()? {
            return Err(IntegralError::NotIntegral(v));
        }
        let corank = germ.corank()?;
        Ok(IntegralMap {
            germ,
            corank,
            provenance,
        })
    }

    pub fn from_components(
        source: &Arc<Vars>,
        comps: Vec<TruncatedPoly>,
    ) -> IntegralResult<IntegralMap> {
        IntegralMap::new(MapGerm::new(source, comps)?, Provenance::User)
    }

    pub fn germ(&self) -> &MapGerm {
        &self.germ
    }

    pub fn n(&self) -> usize {
        self.germ.n
    }

    pub fn source(&self) -> &Arc<Vars> {
        &self.germ.source
    }

    pub fn components(&self) -> &[TruncatedPoly] {
        &self.germ.comps
    }

    pub fn p(&self, i: usize) -> &TruncatedPoly {
        self.germ.p(i)
    }

    pub fn q(&self, i: usize) -> &TruncatedPoly {
        self.germ.q(i)
    }

    pub fn r(&self) -> &TruncatedPoly {
        self.germ.r()
    }

    pub fn cap(&self) -> Cap {
        self.germ.cap()
    }

    pub fn corank(&self) -> usize {
        self.corank
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn directions(&self) -> Vec<usize> {
        self.germ.directions()
    }

    pub fn truncate(&self, cap: Cap) -> IntegralMap {
        IntegralMap {
            germ: self.germ.truncate(cap),
            corank: self.corank,
            provenance: self.provenance,
        }
    }

    /// Precomposition with a source substitution (e.g. a diffeomorphism jet).
    pub fn precompose(&self, subs: &[TruncatedPoly]) -> IntegralResult<IntegralMap> {
        let comps = self
            .components()
            .iter()
            .map(|c| c.compose(subs))
            .collect::<Result<Vec<_>, _>>()?;
        let source = subs
            .first()
            .map(|s| s.vars().clone())
            .unwrap_or_else(|| self.source().clone());
        IntegralMap::new(MapGerm::new(&source, comps)?, self.provenance)
    }
}

/// Source directions split as `(x', x_n)`.
fn split_directions(vars: &Vars) -> IntegralResult<(Vec<usize>, usize)> {
    let mut dirs = source_indices(vars);
    let last = dirs.pop().ok_or(IntegralError::NoSourceVariables)?;
    Ok((dirs, last))
}

/// Completion from graph data: `q_i = x_i` (i < n), `q_n = u`, `p_n = v`,
/// `p_i = ∫(v_{x_i} u_{x_n} - v_{x_n} u_{x_i}) dx_n`, `r = ∫ v u_{x_n} dx_n`.
///
/// The integrals are integral only when `v(x', 0) u_{x_i}(x', 0) = 0`; this is
/// checked first.
pub fn complete_from_uv(
    source: &Arc<Vars>,
    u: &TruncatedPoly,
    v: &TruncatedPoly,
) -> IntegralResult<IntegralMap> {
    let (rest, last) = split_directions(source)?;
    if **u.vars() != **source || **v.vars() != **source {
        return Err(IntegralError::VarMismatch);
    }
    let v0 = v.restrict_zero(last)?;
    for &i in &rest {
        let residual = v0.try_mul(&u.partial_derivative(i)?.restrict_zero(last)?)?;
        if !residual.is_zero() {
            return Err(IntegralError::CompletionImpossible {
                index: i + 1,
                residual: residual.to_string(),
            });
        }
    }
    let cap = u.cap().min(v.cap());
    let u_n = u.partial_derivative(last)?;
    let v_n = v.partial_derivative(last)?;
    let mut p = Vec::new();
    let mut q = Vec::new();
    for &i in &rest {
        let integrand = v
            .partial_derivative(i)?
            .try_mul(&u_n)?
            .try_sub(&v_n.try_mul(&u.partial_derivative(i)?)?)?;
        p.push(integrand.formal_integral(last)?.truncate(cap));
        q.push(TruncatedPoly::var(source, cap, i));
    }
    p.push(v.truncate(cap));
    q.push(u.truncate(cap));
    let r = v.try_mul(&u_n)?.formal_integral(last)?.truncate(cap);
    let mut comps = p;
    comps.extend(q);
    comps.push(r);
    IntegralMap::new(MapGerm::new(source, comps)?, Provenance::Completed)
}

/// Graph-form completion with a free boundary term: `q_n = u`, `p_n = v`,
/// `r = ∫ v u_{x_n} dx_n + b(x')`, `p_i = ∂r/∂x_i - v u_{x_i}`.  Always
/// integral; `b` must not depend on `x_n`.
pub fn complete_graph(
    source: &Arc<Vars>,
    u: &TruncatedPoly,
    v: &TruncatedPoly,
    boundary: &TruncatedPoly,
) -> IntegralResult<IntegralMap> {
    let (rest, last) = split_directions(source)?;
    if !boundary.is_free_of(last) {
        return Err(IntegralError::CompletionImpossible {
            index: last + 1,
            residual: boundary.to_string(),
        });
    }
    let cap = u.cap().min(v.cap()).min(boundary.cap());
    let r = v
        .try_mul(&u.partial_derivative(last)?)?
        .formal_integral(last)?
        .try_add(boundary)?
        .truncate(cap);
    let mut p = Vec::new();
    let mut q = Vec::new();
    for &i in &rest {
        p.push(
            r.partial_derivative(i)?
                .try_sub(&v.try_mul(&u.partial_derivative(i)?)?)?,
        );
        q.push(TruncatedPoly::var(source, cap, i));
    }
    p.push(v.truncate(cap));
    q.push(u.truncate(cap));
    let mut comps = p;
    comps.extend(q);
    comps.push(r);
    IntegralMap::new(MapGerm::new(source, comps)?, Provenance::Completed)
}

fn factorial(k: usize) -> Rat {
    (1..=k as i64).fold(Rat::one(), |acc, i| &acc * &Rat::int(i))
}

/// Graph data `(u, v)` of the open Whitney umbrella of type `k` in `n` variables.
pub fn owu_uv(n: usize, k: usize) -> IntegralResult<(Arc<Vars>, TruncatedPoly, TruncatedPoly)> {
    if n == 0 || 2 * k > n {
        return Err(IntegralError::TypeOutOfRange { n, k });
    }
    let vars = Vars::source(n);
    let cap = Cap::EXACT;
    let x = |i: usize| TruncatedPoly::var(&vars, cap, i - 1);
    let term = |i: Option<usize>, e: usize| {
        let mut m = x(n)
            .pow(e as u32)
            .scale(&factorial(e).inv().expect("nonzero"));
        if let Some(i) = i {
            m = &m * &x(i);
        }
        m
    };
    let mut u = term(None, k + 1);
    for i in 1..k {
        u = &u + &term(Some(i), k - i);
    }
    let mut v = TruncatedPoly::zero(&vars, cap);
    for i in 1..=k {
        v = &v + &term(Some(k - 1 + i), k + 1 - i);
    }
    Ok((vars, u, v))
}

/// The open Whitney umbrella `f_{n,k}`, an exact polynomial germ.
pub fn owu_normal_form(n: usize, k: usize) -> IntegralResult<IntegralMap> {
    let (vars, u, v) = owu_uv(n, k)?;
    let f = complete_from_uv(&vars, &u, &v)?;
    Ok(IntegralMap {
        provenance: Provenance::NormalForm { n, k },
        ..f
    })
}

/// Map `g = (p, q)` into the symplectic space with a generating function
/// `e`, `de = g*(Σ p_i dq_i)` and `e(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropicMap {
    source: Arc<Vars>,
    n: usize,
    p: Vec<TruncatedPoly>,
    q: Vec<TruncatedPoly>,
    generating: TruncatedPoly,
}

impl IsotropicMap {
    /// Builds `g` and integrates its generating function; fails when
    /// `g*(p dq)` is not closed.
    pub fn new(
        source: &Arc<Vars>,
        p: Vec<TruncatedPoly>,
        q: Vec<TruncatedPoly>,
    ) -> IntegralResult<IsotropicMap> {
        let dirs = source_indices(source);
        let n = dirs.len();
        if n == 0 {
            return Err(IntegralError::NoSourceVariables);
        }
        if p.len() != n || q.len() != n {
            return Err(IntegralError::ComponentCount {
                expected: 2 * n,
                got: p.len() + q.len(),
            });
        }
        for c in p.iter().chain(&q) {
            if **c.vars() != **source {
                return Err(IntegralError::VarMismatch);
            }
            if !c.constant_term().is_zero() {
                return Err(IntegralError::NotBasedAtOrigin {
                    name: c.to_string(),
                });
            }
        }
        let coeffs = dirs
            .iter()
            .map(|&j| {
                let mut c = TruncatedPoly::zero(source, Cap::EXACT);
                for i in 0..n {
                    c = c.try_add(&p[i].try_mul(&q[i].partial_derivative(j)?)?)?;
                }
                Ok(c)
            })
            .collect::<IntegralResult<Vec<_>>>()?;
        // integrate along x_n first, then along the remaining directions on
        // the slices where the later variables vanish
        let mut e = TruncatedPoly::zero(
            source,
            coeffs
                .iter()
                .map(|c| c.cap().raise(1))
                .min()
                .unwrap_or(Cap::EXACT),
        );
        for (pos, &j) in dirs.iter().enumerate().rev() {
            let mut residual = coeffs[pos].try_sub(&e.partial_derivative(j)?)?;
            for &k in &dirs[..pos] {
                residual = residual.restrict_zero(k)?;
            }
            e = e.try_add(&residual.formal_integral(j)?)?;
        }
        for (pos, &j) in dirs.iter().enumerate() {
            let residual = coeffs[pos].try_sub(&e.partial_derivative(j)?)?;
            if !residual.is_zero() {
                return Err(IntegralError::NotClosed {
                    residual: residual.to_string(),
                });
            }
        }
        Ok(IsotropicMap {
            source: source.clone(),
            n,
            p,
            q,
            generating: e,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> &Arc<Vars> {
        &self.source
    }

    pub fn p(&self) -> &[TruncatedPoly] {
        &self.p
    }

    pub fn q(&self) -> &[TruncatedPoly] {
        &self.q
    }

    pub fn generating_function(&self) -> &TruncatedPoly {
        &self.generating
    }

    /// Coefficient of `dx_j ∧ dx_k` in `g*(Σ dp_i ∧ dq_i)`.
    pub fn omega_coefficient(&self, j: usize, k: usize) -> IntegralResult<TruncatedPoly> {
        let mut c = TruncatedPoly::zero(&self.source, Cap::EXACT);
        for i in 0..self.n {
            let a = self.p[i]
                .partial_derivative(j)?
                .try_mul(&self.q[i].partial_derivative(k)?)?;
            let b = self.p[i]
                .partial_derivative(k)?
                .try_mul(&self.q[i].partial_derivative(j)?)?;
            c = c.try_add(&a.try_sub(&b)?)?;
        }
        Ok(c)
    }

    pub fn is_isotropic(&self) -> IntegralResult<bool> {
        let dirs = source_indices(&self.source);
        for (a, &j) in dirs.iter().enumerate() {
            for &k in &dirs[a + 1..] {
                if !self.omega_coefficient(j, k)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Drops the `r` component; the generating function is `r∘f`.
pub fn project_isotropic(f: &IntegralMap) -> IntegralResult<IsotropicMap> {
    let n = f.n();
    let g = IsotropicMap {
        source: f.source().clone(),
        n,
        p: (0..n).map(|i| f.p(i).clone()).collect(),
        q: (0..n).map(|i| f.q(i).clone()).collect(),
        generating: f.r().clone(),
    };
    Ok(g)
}

/// The integral germ `(g, e)`.
pub fn lift_isotropic(g: &IsotropicMap) -> IntegralResult<IntegralMap> {
    let mut comps = g.p.clone();
    comps.extend(g.q.iter().cloned());
    comps.push(g.generating.clone());
    IntegralMap::new(MapGerm::new(&g.source, comps)?, Provenance::Completed)
}
