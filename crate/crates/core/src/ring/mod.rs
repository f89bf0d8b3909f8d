//! Truncated multivariate polynomials over exact rationals.
//!
//! A [`TruncatedPoly`] is a jet: only terms of total degree at most its
//! [`Cap`] are known.  Products take the smaller cap, derivatives lose one
//! degree of information and formal integrals gain one.

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::scalar::Rat;

pub use parse::parse_poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operands live over different variable sets")]
    VarMismatch,
    #[error("variable index {index} out of range for {count} variables")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("substitution for variable {index} has a nonzero constant term")]
    NonzeroConstant { index: usize },
    #[error("substitution list has {got} entries, expected {expected}")]
    SubstitutionArity { got: usize, expected: usize },
    #[error("cap exhausted: no coefficient information left after differentiation")]
    CapExhausted,
    #[error("variable `{0}` carries no p/q/r weight")]
    Untagged(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("constant term is zero, series is not invertible")]
    NotInvertible,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type RingResult<T> = Result<T, RingError>;

/// Role of a coordinate; drives weighted order and integration directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Source,
    P,
    Q,
    R,
    Fiber,
    Param,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
}

/// Ordered, uniquely named variable list shared by polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vars {
    vars: Vec<Var>,
}

impl Vars {
    pub fn new(vars: Vec<Var>) -> RingResult<Arc<Vars>> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(RingError::DuplicateName(v.name.clone()));
            }
        }
        Ok(Arc::new(Vars { vars }))
    }

    pub fn from_names<S: AsRef<str>>(names: &[(S, VarKind)]) -> RingResult<Arc<Vars>> {
        Vars::new(
            names
                .iter()
                .map(|(n, k)| Var {
                    name: n.as_ref().to_string(),
                    kind: *k,
                })
                .collect(),
        )
    }

    /// `x1..xn`, all of source kind.
    pub fn source(n: usize) -> Arc<Vars> {
        let names: Vec<_> = (1..=n)
            .map(|i| (format!("x{i}"), VarKind::Source))
            .collect();
        Vars::from_names(&names).expect("generated names are unique")
    }

    /// `p1..pn, q1..qn, r` in Darboux layout.
    pub fn darboux(n: usize) -> Arc<Vars> {
        let mut names: Vec<_> = (1..=n).map(|i| (format!("p{i}"), VarKind::P)).collect();
        names.extend((1..=n).map(|i| (format!("q{i}"), VarKind::Q)));
        names.push(("r".to_string(), VarKind::R));
        Vars::from_names(&names).expect("generated names are unique")
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Var> {
        self.vars.iter()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn kind(&self, i: usize) -> VarKind {
        self.vars[i].kind
    }

    /// Indices of variables of the given kind, in order.
    pub fn indices_of(&self, kind: VarKind) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.vars[i].kind == kind)
            .collect()
    }
}

fn same_vars(a: &Arc<Vars>, b: &Arc<Vars>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Inclusive total-degree bound; `Cap::EXACT` marks a polynomial known exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cap(u32);

impl Cap {
    pub const EXACT: Cap = Cap(u32::MAX);

    pub fn new(deg: u32) -> Cap {
        assert!(deg < u32::MAX, "finite caps must be below u32::MAX");
        Cap(deg)
    }

    pub fn is_exact(self) -> bool {
        self == Cap::EXACT
    }

    /// Finite bound, or `None` when exact.
    pub fn degree(self) -> Option<u32> {
        (!self.is_exact()).then_some(self.0)
    }

    pub fn admits(self, deg: u32) -> bool {
        deg <= self.0
    }

    pub fn lower(self, by: u32) -> Option<Cap> {
        if self.is_exact() {
            Some(self)
        } else {
            self.0.checked_sub(by).map(Cap)
        }
    }

    pub fn raise(self, by: u32) -> Cap {
        if self.is_exact() {
            self
        } else {
            Cap(self.0.saturating_add(by).min(u32::MAX - 1))
        }
    }

    /// True when the cap covers every degree up to `deg`.
    pub fn covers(self, deg: u32) -> bool {
        self.is_exact() || self.0 >= deg
    }
}

impl fmt::Display for Cap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree() {
            None => write!(f, "exact"),
            Some(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for Cap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.degree() {
            None => s.serialize_str("exact"),
            Some(d) => s.serialize_u32(d),
        }
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub SmallVec<[u8; 12]>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn unit(nvars: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_exps(exps: &[u8]) -> Monomial {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Weighted order with `+∞` for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightedOrder {
    Finite(u32),
    Infinite,
}

/// Weight of a Darboux coordinate: p and q weigh 1, r weighs 2.
pub fn darboux_weight(kind: VarKind) -> Option<u32> {
    match kind {
        VarKind::P | VarKind::Q => Some(1),
        VarKind::R => Some(2),
        _ => None,
    }
}

/// A polynomial jet over a shared variable list.
#[derive(Clone)]
pub struct TruncatedPoly {
    vars: Arc<Vars>,
    cap: Cap,
    terms: BTreeMap<Monomial, Rat>,
}

impl PartialEq for TruncatedPoly {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.cap == other.cap && self.terms == other.terms
    }
}

impl Eq for TruncatedPoly {}

impl fmt::Debug for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [cap {}]", self, self.cap)
    }
}

impl TruncatedPoly {
    pub fn zero(vars: &Arc<Vars>, cap: Cap) -> Self {
        TruncatedPoly {
            vars: vars.clone(),
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<Vars>, cap: Cap, c: Rat) -> Self {
        let mut p = Self::zero(vars, cap);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn one(vars: &Arc<Vars>, cap: Cap) -> Self {
        Self::constant(vars, cap, Rat::one())
    }

    pub fn var(vars: &Arc<Vars>, cap: Cap, i: usize) -> Self {
        let mut p = Self::zero(vars, cap);
        p.add_term(Monomial::unit(vars.len(), i), Rat::one());
        p
    }

    pub fn monomial(vars: &Arc<Vars>, cap: Cap, m: Monomial, c: Rat) -> Self {
        let mut p = Self::zero(vars, cap);
        p.add_term(m, c);
        p
    }

    /// Builds from raw terms, dropping zeros and terms above the cap.
    pub fn from_terms(
        vars: &Arc<Vars>,
        cap: Cap,
        terms: impl IntoIterator<Item = (Monomial, Rat)>,
    ) -> Self {
        let mut p = Self::zero(vars, cap);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place, respecting the cap.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        debug_assert_eq!(m.len(), self.vars.len());
        if c.is_zero() || !self.cap.admits(m.degree()) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn cap(&self) -> Cap {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.num_vars()))
    }

    /// Lowest total degree of a stored term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    /// Highest total degree of a stored term.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Lowest-degree terms, as a polynomial with the same cap.
    pub fn lowest_part(&self) -> TruncatedPoly {
        match self.order() {
            None => self.clone(),
            Some(d) => self.homogeneous_part(d),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> TruncatedPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .map(|(m, c)| (m.clone(), c.clone()));
        TruncatedPoly::from_terms(&self.vars, self.cap, terms)
    }

    /// Lowers the cap (never raises it) and drops terms above it.
    pub fn truncate(&self, cap: Cap) -> TruncatedPoly {
        let cap = cap.min(self.cap);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| cap.admits(m.degree()))
            .map(|(m, c)| (m.clone(), c.clone()));
        TruncatedPoly::from_terms(&self.vars, cap, terms)
    }

    /// Replaces the cap by `cap`, which may claim more precision; callers
    /// use this only for polynomials whose terms are known exactly.
    pub fn with_cap(&self, cap: Cap) -> TruncatedPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.clone()));
        TruncatedPoly::from_terms(&self.vars, cap, terms)
    }

    fn check_vars(&self, other: &TruncatedPoly) -> RingResult<()> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(RingError::VarMismatch)
        }
    }

    pub fn try_add(&self, other: &TruncatedPoly) -> RingResult<TruncatedPoly> {
        self.check_vars(other)?;
        let cap = self.cap.min(other.cap);
        let mut out = self.truncate(cap);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &TruncatedPoly) -> RingResult<TruncatedPoly> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &TruncatedPoly) -> RingResult<TruncatedPoly> {
        self.check_vars(other)?;
        let cap = self.cap.min(other.cap);
        let mut out = TruncatedPoly::zero(&self.vars, cap);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                // terms are sorted by degree, so the inner loop can stop early
                if !cap.admits(da + mb.degree()) {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> TruncatedPoly {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> TruncatedPoly {
        if c.is_zero() {
            return TruncatedPoly::zero(&self.vars, self.cap);
        }
        TruncatedPoly {
            vars: self.vars.clone(),
            cap: self.cap,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> TruncatedPoly {
        let mut acc = TruncatedPoly::one(&self.vars, self.cap);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_index(&self, i: usize) -> RingResult<()> {
        if i < self.num_vars() {
            Ok(())
        } else {
            Err(RingError::IndexOutOfRange {
                index: i,
                count: self.num_vars(),
            })
        }
    }

    /// Termwise derivative; the cap drops by one.
    pub fn partial_derivative(&self, i: usize) -> RingResult<TruncatedPoly> {
        self.check_index(i)?;
        let cap = self.cap.lower(1).ok_or(RingError::CapExhausted)?;
        let mut out = TruncatedPoly::zero(&self.vars, cap);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut d = m.clone();
            d.0[i] -= 1;
            out.add_term(d, c * &Rat::int(e as i64));
        }
        Ok(out)
    }

    /// Antiderivative in variable `i` vanishing at `x_i = 0`; the cap grows by one.
    pub fn formal_integral(&self, i: usize) -> RingResult<TruncatedPoly> {
        self.check_index(i)?;
        let mut out = TruncatedPoly::zero(&self.vars, self.cap.raise(1));
        for (m, c) in &self.terms {
            let mut d = m.clone();
            d.0[i] += 1;
            let e = d.0[i] as i64;
            out.add_term(d, c / &Rat::int(e));
        }
        Ok(out)
    }

    /// Sets variable `i` to zero.
    pub fn restrict_zero(&self, i: usize) -> RingResult<TruncatedPoly> {
        self.check_index(i)?;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[i] == 0)
            .map(|(m, c)| (m.clone(), c.clone()));
        Ok(TruncatedPoly::from_terms(&self.vars, self.cap, terms))
    }

    /// Substitutes `subs[j]` for variable `j`.  All substitutes share one
    /// variable list and must vanish at the origin.
    pub fn compose(&self, subs: &[TruncatedPoly]) -> RingResult<TruncatedPoly> {
        if subs.len() != self.num_vars() {
            return Err(RingError::SubstitutionArity {
                got: subs.len(),
                expected: self.num_vars(),
            });
        }
        let Some(first) = subs.first() else {
            // no variables: the polynomial is a constant
            return Ok(self.clone());
        };
        let target = first.vars.clone();
        let mut cap = self.cap;
        for (j, s) in subs.iter().enumerate() {
            if !same_vars(&s.vars, &target) {
                return Err(RingError::VarMismatch);
            }
            if !s.constant_term().is_zero() {
                return Err(RingError::NonzeroConstant { index: j });
            }
            cap = cap.min(s.cap);
        }
        let mut powers: Vec<Vec<TruncatedPoly>> = subs
            .iter()
            .map(|s| vec![TruncatedPoly::one(&target, cap), s.truncate(cap)])
            .collect();
        let mut out = TruncatedPoly::zero(&target, cap);
        for (m, c) in &self.terms {
            let mut term = TruncatedPoly::constant(&target, cap, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = &powers[j][powers[j].len() - 1] * &powers[j][1];
                    powers[j].push(next);
                }
                term = &term * &powers[j][e as usize];
                if term.is_zero() {
                    break;
                }
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over `target`, sending variable `j` to
    /// variable `map[j]` of the target list.
    pub fn embed(&self, target: &Arc<Vars>, map: &[usize]) -> RingResult<TruncatedPoly> {
        if map.len() != self.num_vars() {
            return Err(RingError::SubstitutionArity {
                got: map.len(),
                expected: self.num_vars(),
            });
        }
        for &k in map {
            if k >= target.len() {
                return Err(RingError::IndexOutOfRange {
                    index: k,
                    count: target.len(),
                });
            }
        }
        let mut out = TruncatedPoly::zero(target, self.cap);
        for (m, c) in &self.terms {
            let mut e = Monomial::one(target.len());
            for (j, &k) in map.iter().enumerate() {
                e.0[k] += m.0[j];
            }
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    /// Embeds into `target` by matching variable names.
    pub fn embed_by_name(&self, target: &Arc<Vars>) -> RingResult<TruncatedPoly> {
        let map = self
            .vars
            .iter()
            .map(|v| {
                target
                    .index_of(&v.name)
                    .ok_or_else(|| RingError::Untagged(v.name.clone()))
            })
            .collect::<RingResult<Vec<_>>>()?;
        self.embed(target, &map)
    }

    /// Minimum Darboux weight over stored monomials.
    pub fn weighted_order(&self) -> RingResult<WeightedOrder> {
        let weights = (0..self.num_vars())
            .map(|i| {
                darboux_weight(self.vars.kind(i))
                    .ok_or_else(|| RingError::Untagged(self.vars.get(i).name.clone()))
            })
            .collect::<RingResult<Vec<_>>>()?;
        Ok(self
            .terms
            .keys()
            .map(|m| {
                m.0.iter()
                    .zip(&weights)
                    .map(|(&e, w)| e as u32 * w)
                    .sum::<u32>()
            })
            .min()
            .map_or(WeightedOrder::Infinite, WeightedOrder::Finite))
    }

    /// Largest total exponent in the variables of `kind` over stored terms.
    pub fn kind_degree(&self, kind: VarKind) -> u32 {
        let idx = self.vars.indices_of(kind);
        self.terms
            .keys()
            .map(|m| idx.iter().map(|&i| m.0[i] as u32).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// True when no stored term involves variable `i`.
    pub fn is_free_of(&self, i: usize) -> bool {
        self.terms.keys().all(|m| m.0[i] == 0)
    }

    /// Inverse of a series with nonzero constant term, up to the cap.
    pub fn inverse(&self, cap: Cap) -> RingResult<TruncatedPoly> {
        let c0 = self.constant_term();
        let inv0 = c0.inv().ok_or(RingError::NotInvertible)?;
        let cap = cap.min(self.cap);
        let d = cap.degree().ok_or(RingError::NotInvertible)?;
        // 1/(c0 (1 + m)) = inv0 * sum (-m)^k, m has order >= 1
        let unit = TruncatedPoly::one(&self.vars, cap);
        let m = (&self.scale(&inv0) - &unit).truncate(cap);
        let neg_m = m.neg();
        let mut acc = unit.clone();
        let mut power = unit;
        for _ in 0..d {
            power = &power * &neg_m;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&inv0))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.to_f64(), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    pub fn parse(vars: &Arc<Vars>, cap: Cap, src: &str) -> RingResult<TruncatedPoly> {
        parse_poly(vars, cap, src)
    }
}

macro_rules! poly_op {
    ($trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&TruncatedPoly> for &TruncatedPoly {
            type Output = TruncatedPoly;
            fn $method(self, rhs: &TruncatedPoly) -> TruncatedPoly {
                self.$try(rhs)
                    .expect("polynomial operands over different variable sets")
            }
        }
        impl std::ops::$trait<TruncatedPoly> for TruncatedPoly {
            type Output = TruncatedPoly;
            fn $method(self, rhs: TruncatedPoly) -> TruncatedPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_op!(Add, add, try_add);
poly_op!(Sub, sub, try_sub);
poly_op!(Mul, mul, try_mul);

impl std::ops::Neg for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn neg(self) -> TruncatedPoly {
        TruncatedPoly::neg(self)
    }
}

fn write_monomial(f: &mut impl fmt::Write, vars: &Vars, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        f.write_str(&vars.get(i).name)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for TruncatedPoly {
    /// Terms in descending graded-lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(f, &self.vars, m)?;
            }
        }
        Ok(())
    }
}
