//! The standard contact chart `(K^{2n+1}, dr - Σ p_i dq_i)`, its Reeb field and
//! contact Hamiltonian vector fields.

use std::sync::Arc;

use crate::forms::{Chart, DiffForm, FieldAlongMap, FormResult, MapBetweenCharts};
use crate::ring::{Cap, RingError, RingResult, TruncatedPoly, VarKind, Vars};

/// Darboux chart with variables `p1..pn, q1..qn, r`.
#[derive(Debug, Clone)]
pub struct ContactChart {
    n: usize,
    chart: Arc<Chart>,
    alpha: DiffForm,
}

impl ContactChart {
    pub fn standard(n: usize) -> ContactChart {
        let chart = Chart::new("W", Vars::darboux(n));
        let v = chart.vars();
        let mut terms = vec![(vec![2 * n], TruncatedPoly::one(v, Cap::EXACT))];
        for i in 0..n {
            terms.push((vec![n + i], TruncatedPoly::var(v, Cap::EXACT, i).neg()));
        }
        let alpha =
            DiffForm::from_terms(&chart, 1, Cap::EXACT, terms).expect("alpha on its own chart");
        ContactChart { n, chart, alpha }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn vars(&self) -> &Arc<Vars> {
        self.chart.vars()
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn p(&self, i: usize) -> usize {
        i
    }

    pub fn q(&self, i: usize) -> usize {
        self.n + i
    }

    pub fn r(&self) -> usize {
        2 * self.n
    }

    pub fn alpha(&self) -> &DiffForm {
        &self.alpha
    }

    pub fn d_alpha(&self) -> DiffForm {
        self.alpha.d().expect("exact form")
    }

    /// `α∧(dα)^n`, a constant multiple of the volume form.
    pub fn volume(&self) -> DiffForm {
        let da = self.d_alpha();
        let mut acc = self.alpha.clone();
        for _ in 0..self.n {
            acc = acc.wedge(&da).expect("same chart");
        }
        acc
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.volume().is_zero()
    }

    /// Indices of the fibration coordinates `(q, r)`.
    pub fn fibration_coordinates(&self) -> Vec<usize> {
        (self.n..=2 * self.n).collect()
    }

    pub fn reeb(&self) -> VectorFieldOnChart {
        let mut comps = vec![TruncatedPoly::zero(self.vars(), Cap::EXACT); self.dim()];
        comps[self.r()] = TruncatedPoly::one(self.vars(), Cap::EXACT);
        VectorFieldOnChart {
            vars: self.vars().clone(),
            comps,
        }
    }

    /// `R(H) = ∂H/∂r`.
    pub fn reeb_derivative(&self, h: &TruncatedPoly) -> RingResult<TruncatedPoly> {
        h.partial_derivative(self.r())
    }

    pub fn contact_hamiltonian(&self, h: &TruncatedPoly) -> RingResult<VectorFieldOnChart> {
        self.check(h)?;
        let n = self.n;
        let v = self.vars();
        let h_r = h.partial_derivative(self.r())?;
        let mut comps = Vec::with_capacity(self.dim());
        for i in 0..n {
            let p_i = TruncatedPoly::var(v, Cap::EXACT, self.p(i));
            comps.push(
                h.partial_derivative(self.q(i))?
                    .try_add(&p_i.try_mul(&h_r)?)?,
            );
        }
        let mut euler = h.clone();
        for i in 0..n {
            let h_p = h.partial_derivative(self.p(i))?;
            comps.push(h_p.neg());
            let p_i = TruncatedPoly::var(v, Cap::EXACT, self.p(i));
            // p_i ∂H/∂p_i is known as far as H itself
            let term = p_i
                .with_cap(h.cap())
                .try_mul(&h_p.with_cap(h.cap()))?
                .truncate(h.cap());
            euler = euler.try_sub(&term)?;
        }
        comps.push(euler);
        Ok(VectorFieldOnChart {
            vars: v.clone(),
            comps,
        })
    }

    /// `i_X α`.
    pub fn hamiltonian_of(&self, x: &VectorFieldOnChart) -> RingResult<TruncatedPoly> {
        let mut h = x.comps[self.r()].clone();
        for i in 0..self.n {
            let p_i = TruncatedPoly::var(self.vars(), Cap::EXACT, self.p(i));
            h = h.try_sub(&p_i.try_mul(&x.comps[self.q(i)])?)?;
        }
        Ok(h)
    }

    /// Every monomial has p-degree at most one.
    pub fn is_legendre_hamiltonian(&self, h: &TruncatedPoly) -> bool {
        h.terms()
            .keys()
            .all(|m| (0..self.n).map(|i| m.exp(self.p(i)) as u32).sum::<u32>() <= 1)
    }

    fn check(&self, h: &TruncatedPoly) -> RingResult<()> {
        if **h.vars() != **self.vars() {
            return Err(RingError::VarMismatch);
        }
        Ok(())
    }

    pub fn interior(&self, x: &VectorFieldOnChart, omega: &DiffForm) -> FormResult<DiffForm> {
        x.along_identity(&self.chart, omega.cap())?.interior(omega)
    }

    pub fn lie(&self, x: &VectorFieldOnChart, omega: &DiffForm) -> FormResult<DiffForm> {
        x.along_identity(&self.chart, omega.cap())?.lie(omega)
    }
}

/// A vector field on a chart, one component per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorFieldOnChart {
    vars: Arc<Vars>,
    comps: Vec<TruncatedPoly>,
}

impl VectorFieldOnChart {
    pub fn new(vars: &Arc<Vars>, comps: Vec<TruncatedPoly>) -> RingResult<Self> {
        if comps.len() != vars.len() {
            return Err(RingError::SubstitutionArity {
                got: comps.len(),
                expected: vars.len(),
            });
        }
        if comps.iter().any(|c| **c.vars() != **vars) {
            return Err(RingError::VarMismatch);
        }
        Ok(VectorFieldOnChart {
            vars: vars.clone(),
            comps,
        })
    }

    pub fn zero(vars: &Arc<Vars>) -> Self {
        VectorFieldOnChart {
            vars: vars.clone(),
            comps: vec![TruncatedPoly::zero(vars, Cap::EXACT); vars.len()],
        }
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

    pub fn truncate(&self, cap: Cap) -> Self {
        VectorFieldOnChart {
            vars: self.vars.clone(),
            comps: self.comps.iter().map(|c| c.truncate(cap)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> RingResult<Self> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        VectorFieldOnChart::new(&self.vars, comps)
    }

    pub fn try_sub(&self, other: &Self) -> RingResult<Self> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_, _>>()?;
        VectorFieldOnChart::new(&self.vars, comps)
    }

    pub fn scale(&self, c: &crate::scalar::Rat) -> Self {
        VectorFieldOnChart {
            vars: self.vars.clone(),
            comps: self.comps.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn mul_function(&self, h: &TruncatedPoly) -> RingResult<Self> {
        let comps = self
            .comps
            .iter()
            .map(|a| a.try_mul(h))
            .collect::<Result<_, _>>()?;
        VectorFieldOnChart::new(&self.vars, comps)
    }

    /// The derivation `X(h) = Σ X_i ∂h/∂x_i`.
    pub fn apply(&self, h: &TruncatedPoly) -> RingResult<TruncatedPoly> {
        let mut acc = TruncatedPoly::zero(&self.vars, Cap::EXACT);
        for (i, c) in self.comps.iter().enumerate() {
            if !h.is_free_of(i) {
                acc = acc.try_add(&c.try_mul(&h.partial_derivative(i)?)?)?;
            }
        }
        if acc.is_zero() {
            let cap = h
                .cap()
                .lower(1)
                .ok_or(RingError::CapExhausted)?
                .min(self.cap());
            return Ok(TruncatedPoly::zero(&self.vars, cap));
        }
        Ok(acc)
    }

    /// `X∘f` as a field along `f`.
    pub fn along(&self, f: &MapBetweenCharts) -> FormResult<FieldAlongMap> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose(f.components()))
            .collect::<Result<Vec<_>, _>>()?;
        FieldAlongMap::new(f.clone(), comps)
    }

    fn along_identity(&self, chart: &Arc<Chart>, cap: Cap) -> FormResult<FieldAlongMap> {
        let id = MapBetweenCharts::identity(chart, cap.min(self.cap()));
        FieldAlongMap::new(id, self.comps.iter().map(|c| c.truncate(cap)).collect())
    }
}

/// Whether `kind` is a fibration coordinate (`q` or `r`).
pub fn is_fibration_kind(kind: VarKind) -> bool {
    matches!(kind, VarKind::Q | VarKind::R)
}
