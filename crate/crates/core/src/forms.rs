//! Differential forms with polynomial coefficients, maps between charts,
//! vector fields along maps and the natural lifting to tangent charts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::ring::{Cap, Monomial, RingError, TruncatedPoly, Var, VarKind, Vars};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("forms live on different charts")]
    ChartMismatch,
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("component {index} does not vanish at the origin")]
    NotBasedAtOrigin { index: usize },
    #[error("interior product needs a form of positive degree")]
    DegreeZero,
    #[error("degree {degree} exceeds chart dimension {dim}")]
    DegreeTooLarge { degree: usize, dim: usize },
    #[error("chart is not a tangent chart")]
    NotTangent,
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub type FormResult<T> = Result<T, FormError>;

/// A coordinate chart; tangent charts pair each base variable with a fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    name: String,
    vars: Arc<Vars>,
    base_dim: Option<usize>,
}

fn fiber_name(v: &Var) -> String {
    let digits: String = v.name.chars().skip_while(|c| !c.is_ascii_digit()).collect();
    match v.kind {
        VarKind::P => format!("phi{digits}"),
        VarKind::Q => format!("xi{digits}"),
        VarKind::R => "s".to_string(),
        _ => format!("{}_dot", v.name),
    }
}

impl Chart {
    pub fn new(name: impl Into<String>, vars: Arc<Vars>) -> Arc<Chart> {
        Arc::new(Chart {
            name: name.into(),
            vars,
            base_dim: None,
        })
    }

    /// Tangent chart: base variables followed by their fibers.
    pub fn tangent(&self) -> FormResult<Arc<Chart>> {
        let mut vars: Vec<Var> = self.vars.iter().cloned().collect();
        vars.extend(self.vars.iter().map(|v| Var {
            name: fiber_name(v),
            kind: VarKind::Fiber,
        }));
        Ok(Arc::new(Chart {
            name: format!("T{}", self.name),
            vars: Vars::new(vars)?,
            base_dim: Some(self.vars.len()),
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn base_dim(&self) -> Option<usize> {
        self.base_dim
    }

    pub fn is_tangent(&self) -> bool {
        self.base_dim.is_some()
    }

    /// Charts are interchangeable when their coordinates agree; names are labels.
    pub fn same_coordinates(&self, other: &Chart) -> bool {
        std::ptr::eq(self, other) || (self.vars == other.vars && self.base_dim == other.base_dim)
    }
}

/// Strictly increasing list of coordinate indices.
pub type FormIndex = SmallVec<[u8; 4]>;

/// Inserts `j` into the increasing index `idx`; returns the sign of the
/// permutation moving `dx_j` from the front, or `None` when `j` repeats.
fn insert_index(idx: &FormIndex, j: u8) -> Option<(i64, FormIndex)> {
    let pos = idx.iter().position(|&k| k >= j).unwrap_or(idx.len());
    if idx.get(pos) == Some(&j) {
        return None;
    }
    let mut out = idx.clone();
    out.insert(pos, j);
    Some((if pos % 2 == 0 { 1 } else { -1 }, out))
}

/// Sign and merged index of `dx_a ∧ dx_b`, or `None` on overlap.
fn merge_indices(a: &FormIndex, b: &FormIndex) -> Option<(i64, FormIndex)> {
    let mut out = a.clone();
    let mut sign = 1;
    for &j in b {
        let pos = out.iter().position(|&k| k >= j).unwrap_or(out.len());
        if out.get(pos) == Some(&j) {
            return None;
        }
        // dx_j passes over the entries of `out` after `pos`
        if (out.len() - pos) % 2 == 1 {
            sign = -sign;
        }
        out.insert(pos, j);
    }
    Some((sign, out))
}

/// Exterior form `Σ a_I dx_I` over a chart, truncated at a uniform cap.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffForm {
    chart: Arc<Chart>,
    degree: usize,
    cap: Cap,
    terms: BTreeMap<FormIndex, TruncatedPoly>,
}

impl DiffForm {
    pub fn zero(chart: &Arc<Chart>, degree: usize, cap: Cap) -> DiffForm {
        DiffForm {
            chart: chart.clone(),
            degree,
            cap,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `h`.
    pub fn function(chart: &Arc<Chart>, h: TruncatedPoly) -> FormResult<DiffForm> {
        let mut f = DiffForm::zero(chart, 0, h.cap());
        f.add_term(FormIndex::new(), h)?;
        Ok(f)
    }

    /// The 1-form `dx_i`.
    pub fn dx(chart: &Arc<Chart>, i: usize, cap: Cap) -> DiffForm {
        let mut f = DiffForm::zero(chart, 1, cap);
        let one = TruncatedPoly::one(chart.vars(), cap);
        f.add_term(SmallVec::from_slice(&[i as u8]), one)
            .expect("chart variables");
        f
    }

    /// Builds `Σ coeff dx_I` from `(I, coeff)` pairs with arbitrary index order.
    pub fn from_terms(
        chart: &Arc<Chart>,
        degree: usize,
        cap: Cap,
        terms: impl IntoIterator<Item = (Vec<usize>, TruncatedPoly)>,
    ) -> FormResult<DiffForm> {
        if degree > chart.dim() {
            return Err(FormError::DegreeTooLarge {
                degree,
                dim: chart.dim(),
            });
        }
        let mut f = DiffForm::zero(chart, degree, cap);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "index length must match the degree");
            let mut sorted = FormIndex::new();
            let mut sign = 1;
            let mut repeated = false;
            for &j in idx.iter().rev() {
                match insert_index(&sorted, j as u8) {
                    Some((s, out)) => {
                        sign *= s;
                        sorted = out;
                    }
                    None => repeated = true,
                }
            }
            if !repeated {
                let c = if sign < 0 { c.neg() } else { c };
                f.add_term(sorted, c)?;
            }
        }
        Ok(f)
    }

    fn add_term(&mut self, idx: FormIndex, c: TruncatedPoly) -> FormResult<()> {
        if !Arc::ptr_eq(c.vars(), self.chart.vars()) && **c.vars() != **self.chart.vars() {
            return Err(FormError::ChartMismatch);
        }
        self.cap = self.cap.min(c.cap());
        let c = c.truncate(self.cap);
        let entry = self.terms.remove(&idx);
        let sum = match entry {
            Some(old) => old.try_add(&c)?,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
        // keep every stored coefficient at the form cap
        if self.terms.values().any(|t| t.cap() != self.cap) {
            let cap = self.cap;
            for t in self.terms.values_mut() {
                *t = t.truncate(cap);
            }
            self.terms.retain(|_, t| !t.is_zero());
        }
        Ok(())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<FormIndex, TruncatedPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, idx: &[usize]) -> TruncatedPoly {
        let key: FormIndex = idx.iter().map(|&i| i as u8).collect();
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| TruncatedPoly::zero(self.chart.vars(), self.cap))
    }

    /// The function of a 0-form.
    pub fn as_function(&self) -> TruncatedPoly {
        assert_eq!(self.degree, 0, "not a 0-form");
        self.coefficient(&[])
    }

    pub fn truncate(&self, cap: Cap) -> DiffForm {
        let cap = cap.min(self.cap);
        let mut out = DiffForm::zero(&self.chart, self.degree, cap);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c.truncate(cap))
                .expect("same chart");
        }
        out
    }

    fn check_compatible(&self, other: &DiffForm) -> FormResult<()> {
        if self.chart.same_coordinates(&other.chart) {
            Ok(())
        } else {
            Err(FormError::ChartMismatch)
        }
    }

    pub fn try_add(&self, other: &DiffForm) -> FormResult<DiffForm> {
        self.check_compatible(other)?;
        assert_eq!(
            self.degree, other.degree,
            "adding forms of different degrees"
        );
        let mut out = self.truncate(other.cap);
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &DiffForm) -> FormResult<DiffForm> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> DiffForm {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, c: &crate::scalar::Rat) -> DiffForm {
        self.map_coeffs(|t| t.scale(c))
    }

    /// Multiplies every coefficient by the function `h`.
    pub fn mul_function(&self, h: &TruncatedPoly) -> FormResult<DiffForm> {
        let mut out = DiffForm::zero(&self.chart, self.degree, self.cap.min(h.cap()));
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c.try_mul(h)?)?;
        }
        Ok(out)
    }

    fn map_coeffs(&self, f: impl Fn(&TruncatedPoly) -> TruncatedPoly) -> DiffForm {
        let mut out = DiffForm::zero(&self.chart, self.degree, self.cap);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), f(c)).expect("same chart");
        }
        out
    }

    /// Exterior derivative; the cap drops by one.
    pub fn d(&self) -> FormResult<DiffForm> {
        let cap = self.cap.lower(1).ok_or(RingError::CapExhausted)?;
        let mut out = DiffForm::zero(&self.chart, self.degree + 1, cap);
        for (idx, c) in &self.terms {
            for j in 0..self.chart.dim() {
                if c.is_free_of(j) {
                    continue;
                }
                if let Some((sign, new_idx)) = insert_index(idx, j as u8) {
                    let dc = c.partial_derivative(j)?;
                    out.add_term(new_idx, if sign < 0 { dc.neg() } else { dc })?;
                }
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &DiffForm) -> FormResult<DiffForm> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        if degree > self.chart.dim() {
            return Ok(DiffForm::zero(
                &self.chart,
                degree.min(self.chart.dim() + 1),
                self.cap.min(other.cap),
            ));
        }
        let mut out = DiffForm::zero(&self.chart, degree, self.cap.min(other.cap));
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some((sign, idx)) = merge_indices(ia, ib) {
                    let c = ca.try_mul(cb)?;
                    out.add_term(idx, if sign < 0 { c.neg() } else { c })?;
                }
            }
        }
        Ok(out)
    }

    /// The natural lifting to the tangent chart.
    ///
    /// A term `a dx_I` becomes `(Σ_j ∂a/∂x_j ẋ_j) dx_I` plus
    /// `a Σ_m dx_{i_1}∧…∧dẋ_{i_m}∧…∧dx_{i_p}`.
    pub fn natural_lift(&self) -> FormResult<DiffForm> {
        let tc = self.chart.tangent()?;
        let m = self.chart.dim();
        let tvars = tc.vars().clone();
        let embed: Vec<usize> = (0..m).collect();
        let mut out = DiffForm::zero(&tc, self.degree, self.cap);
        // the derivative part is known one degree less than the coefficient
        if let Some(c) = self.cap.lower(1) {
            out.cap = c;
        } else if !self.terms.is_empty() {
            return Err(RingError::CapExhausted.into());
        }
        for (idx, a) in &self.terms {
            let a_t = a.embed(&tvars, &embed)?;
            for j in 0..m {
                if a.is_free_of(j) {
                    continue;
                }
                let da = a.partial_derivative(j)?.embed(&tvars, &embed)?;
                let xdot = TruncatedPoly::var(&tvars, Cap::EXACT, m + j);
                out.add_term(idx.iter().copied().collect(), da.try_mul(&xdot)?)?;
            }
            for pos in 0..idx.len() {
                let mut lifted: Vec<usize> = idx.iter().map(|&k| k as usize).collect();
                lifted[pos] += m;
                let single =
                    DiffForm::from_terms(&tc, self.degree, a_t.cap(), [(lifted, a_t.clone())])?;
                out = out.try_add(&single)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [cap {}]", self, self.cap)
    }
}

impl fmt::Display for DiffForm {
    /// Canonical rendering `(a) dx1∧dx2 + …` in increasing index order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if idx.is_empty() {
                write!(f, "{c}")?;
                continue;
            }
            write!(f, "({c}) ")?;
            for (n, &i) in idx.iter().enumerate() {
                if n > 0 {
                    f.write_str("∧")?;
                }
                write!(f, "d{}", self.chart.vars().get(i as usize).name)?;
            }
        }
        Ok(())
    }
}

fn based_at_origin(comps: &[TruncatedPoly]) -> FormResult<()> {
    for (i, c) in comps.iter().enumerate() {
        if !c.constant_term().is_zero() {
            return Err(FormError::NotBasedAtOrigin { index: i });
        }
    }
    Ok(())
}

/// A polynomial map germ between charts, based at the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapBetweenCharts {
    source: Arc<Chart>,
    target: Arc<Chart>,
    comps: Vec<TruncatedPoly>,
}

impl MapBetweenCharts {
    pub fn new(
        source: Arc<Chart>,
        target: Arc<Chart>,
        comps: Vec<TruncatedPoly>,
    ) -> FormResult<Self> {
        if comps.len() != target.dim() {
            return Err(FormError::ComponentCount {
                expected: target.dim(),
                got: comps.len(),
            });
        }
        if comps.iter().any(|c| **c.vars() != **source.vars()) {
            return Err(FormError::ChartMismatch);
        }
        based_at_origin(&comps)?;
        Ok(MapBetweenCharts {
            source,
            target,
            comps,
        })
    }

    pub fn identity(chart: &Arc<Chart>, cap: Cap) -> Self {
        let comps = (0..chart.dim())
            .map(|i| TruncatedPoly::var(chart.vars(), cap, i))
            .collect();
        MapBetweenCharts {
            source: chart.clone(),
            target: chart.clone(),
            comps,
        }
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
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
    }

    /// `f*dy_i = d(y_i∘f)`.
    fn differentials(&self) -> FormResult<Vec<DiffForm>> {
        self.comps
            .iter()
            .map(|c| DiffForm::function(&self.source, c.clone())?.d())
            .collect()
    }

    fn wedge_of(&self, dfs: &[DiffForm], idx: &[usize], cap: Cap) -> FormResult<DiffForm> {
        let mut acc =
            DiffForm::function(&self.source, TruncatedPoly::one(self.source.vars(), cap))?;
        for &i in idx {
            acc = acc.wedge(&dfs[i])?;
        }
        Ok(acc)
    }

    pub fn pullback(&self, omega: &DiffForm) -> FormResult<DiffForm> {
        if !omega.chart().same_coordinates(&self.target) {
            return Err(FormError::ChartMismatch);
        }
        let dfs = self.differentials()?;
        let cap = omega.cap().min(self.cap());
        let mut out = DiffForm::zero(&self.source, omega.degree(), cap);
        for (idx, a) in omega.terms() {
            let a_f = a.compose(&self.comps)?;
            let idx: Vec<usize> = idx.iter().map(|&k| k as usize).collect();
            let w = self.wedge_of(&dfs, &idx, cap)?;
            out = out.try_add(&w.mul_function(&a_f)?)?;
        }
        Ok(out)
    }
}

/// A vector field along a map: one component per target coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldAlongMap {
    base: MapBetweenCharts,
    comps: Vec<TruncatedPoly>,
}

impl FieldAlongMap {
    pub fn new(base: MapBetweenCharts, comps: Vec<TruncatedPoly>) -> FormResult<Self> {
        if comps.len() != base.target.dim() {
            return Err(FormError::ComponentCount {
                expected: base.target.dim(),
                got: comps.len(),
            });
        }
        if comps.iter().any(|c| **c.vars() != **base.source.vars()) {
            return Err(FormError::ChartMismatch);
        }
        Ok(FieldAlongMap { base, comps })
    }

    pub fn base(&self) -> &MapBetweenCharts {
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

    pub fn try_add(&self, other: &FieldAlongMap) -> FormResult<FieldAlongMap> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        FieldAlongMap::new(self.base.clone(), comps)
    }

    pub fn mul_function(&self, h: &TruncatedPoly) -> FormResult<FieldAlongMap> {
        let comps = self
            .comps
            .iter()
            .map(|a| a.try_mul(h))
            .collect::<Result<_, _>>()?;
        FieldAlongMap::new(self.base.clone(), comps)
    }

    /// `i_v ω`, a form on the source of the base map.
    pub fn interior(&self, omega: &DiffForm) -> FormResult<DiffForm> {
        if omega.degree() == 0 {
            return Err(FormError::DegreeZero);
        }
        let f = &self.base;
        if !omega.chart().same_coordinates(&f.target) {
            return Err(FormError::ChartMismatch);
        }
        let dfs = f.differentials()?;
        let cap = omega.cap().min(self.cap());
        let mut out = DiffForm::zero(&f.source, omega.degree() - 1, cap);
        for (idx, a) in omega.terms() {
            let a_f = a.compose(&f.comps)?;
            let idx: Vec<usize> = idx.iter().map(|&k| k as usize).collect();
            for k in 0..idx.len() {
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| *m != k)
                    .map(|(_, &i)| i)
                    .collect();
                let w = f.wedge_of(&dfs, &rest, cap)?;
                let mut coeff = a_f.try_mul(&self.comps[idx[k]])?;
                if k % 2 == 1 {
                    coeff = coeff.neg();
                }
                out = out.try_add(&w.mul_function(&coeff)?)?;
            }
        }
        Ok(out)
    }

    /// `L_v ω = d(i_v ω) + i_v(dω)`.
    pub fn lie(&self, omega: &DiffForm) -> FormResult<DiffForm> {
        let second = self.interior(&omega.d()?)?;
        if omega.degree() == 0 {
            return Ok(second);
        }
        self.interior(omega)?.d()?.try_add(&second)
    }

    /// `v*ω` for a form on the tangent chart of the target: base variables
    /// are replaced by the components of the base map and fiber variables by
    /// the components of `v`.
    pub fn pullback_tangent(&self, omega: &DiffForm) -> FormResult<DiffForm> {
        let f = &self.base;
        let tc = omega.chart();
        let m = tc.base_dim().ok_or(FormError::NotTangent)?;
        if m != f.target.dim()
            || tc
                .vars()
                .iter()
                .take(m)
                .zip(f.target.vars().iter())
                .any(|(a, b)| a != b)
        {
            return Err(FormError::ChartMismatch);
        }
        let mut dvs = f.differentials()?;
        for c in &self.comps {
            dvs.push(DiffForm::function(&f.source, c.clone())?.d()?);
        }
        let cap = omega.cap().min(self.cap());
        let mut out = DiffForm::zero(&f.source, omega.degree(), cap);
        let base_vars = f.target.vars().clone();
        for (idx, a) in omega.terms() {
            // split the coefficient by fiber monomials; each piece is a
            // polynomial in the base variables with honest cap
            let mut pieces: BTreeMap<Monomial, Vec<(Monomial, crate::scalar::Rat)>> =
                BTreeMap::new();
            for (mono, c) in a.terms() {
                let fiber = Monomial::from_exps(&mono.0[m..]);
                let base = Monomial::from_exps(&mono.0[..m]);
                pieces.entry(fiber).or_default().push((base, c.clone()));
            }
            let mut a_v = TruncatedPoly::zero(f.source.vars(), cap);
            for (fiber, terms) in pieces {
                let piece_cap = a
                    .cap()
                    .lower(fiber.degree())
                    .ok_or(RingError::CapExhausted)?;
                let piece =
                    TruncatedPoly::from_terms(&base_vars, piece_cap, terms).compose(&f.comps)?;
                let mut prod = piece;
                for (k, &e) in fiber.0.iter().enumerate() {
                    for _ in 0..e {
                        prod = prod.try_mul(&self.comps[k])?;
                    }
                }
                a_v = a_v.try_add(&prod)?;
            }
            let idx: Vec<usize> = idx.iter().map(|&k| k as usize).collect();
            let w = f.wedge_of(&dvs, &idx, cap)?;
            out = out.try_add(&w.mul_function(&a_v)?)?;
        }
        Ok(out)
    }
}
