//! Indexed jet arithmetic for the heavy linear systems.
//!
//! Source monomials up to a fixed degree are numbered by degree first, so
//! the tail `m^{d}` of the jet space is an index range.  Polynomials are
//! sorted sparse vectors over these indices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::exec;
use crate::ring::{Monomial, TruncatedPoly, Vars};
use crate::scalar::Rat;

pub const NONE: u32 = u32::MAX;

/// All monomials in `nvars` variables of degree at most `max_deg`.
#[derive(Debug)]
pub struct MonomialTable {
    nvars: usize,
    max_deg: u32,
    exps: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    deg_start: Vec<usize>,
    times_var: Vec<u32>,
    div_var: Vec<u32>,
}

impl MonomialTable {
    pub fn new(nvars: usize, max_deg: u32) -> Arc<MonomialTable> {
        let mut exps: Vec<Monomial> = Vec::new();
        let mut deg_start = Vec::new();
        let mut layer = vec![Monomial::one(nvars)];
        for d in 0..=max_deg {
            deg_start.push(exps.len());
            // descending lexicographic inside a degree, matching printing order
            layer.sort_by(|a, b| b.0.cmp(&a.0));
            layer.dedup();
            exps.extend(layer.iter().cloned());
            if d == max_deg {
                break;
            }
            let mut next = Vec::with_capacity(layer.len() * nvars);
            for m in &layer {
                for j in 0..nvars {
                    let mut e = m.clone();
                    e.0[j] += 1;
                    next.push(e);
                }
            }
            layer = next;
        }
        deg_start.push(exps.len());
        let index: HashMap<Monomial, u32> = exps
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        let mut times_var = vec![NONE; exps.len() * nvars];
        let mut div_var = vec![NONE; exps.len() * nvars];
        for (i, m) in exps.iter().enumerate() {
            for j in 0..nvars {
                if m.degree() < max_deg {
                    let mut e = m.clone();
                    e.0[j] += 1;
                    times_var[i * nvars + j] = index[&e];
                }
                if m.0[j] > 0 {
                    let mut e = m.clone();
                    e.0[j] -= 1;
                    div_var[i * nvars + j] = index[&e];
                }
            }
        }
        Arc::new(MonomialTable {
            nvars,
            max_deg,
            exps,
            index,
            deg_start,
            times_var,
            div_var,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_deg(&self) -> u32 {
        self.max_deg
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn monomial(&self, i: u32) -> &Monomial {
        &self.exps[i as usize]
    }

    pub fn degree(&self, i: u32) -> u32 {
        self.exps[i as usize].degree()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<u32> {
        self.index.get(m).copied()
    }

    /// Index range of monomials of degree `d`.
    pub fn degree_range(&self, d: u32) -> std::ops::Range<usize> {
        if d > self.max_deg {
            return self.len()..self.len();
        }
        self.deg_start[d as usize]..self.deg_start[d as usize + 1]
    }

    /// Number of monomials of degree at most `d`.
    pub fn count_up_to(&self, d: u32) -> usize {
        self.deg_start[(d.min(self.max_deg) + 1) as usize]
    }

    pub fn times_var(&self, i: u32, j: usize) -> u32 {
        self.times_var[i as usize * self.nvars + j]
    }

    pub fn div_var(&self, i: u32, j: usize) -> u32 {
        self.div_var[i as usize * self.nvars + j]
    }

    /// Index of the product, or `NONE` above the table degree.
    pub fn product(&self, i: u32, m: &Monomial) -> u32 {
        let mut k = i;
        for (j, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                k = self.times_var(k, j);
                if k == NONE {
                    return NONE;
                }
            }
        }
        k
    }
}

/// Sparse polynomial over a [`MonomialTable`], sorted by index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JetPoly {
    pub terms: Vec<(u32, Rat)>,
}

impl JetPoly {
    pub fn zero() -> JetPoly {
        JetPoly { terms: Vec::new() }
    }

    pub fn one() -> JetPoly {
        JetPoly {
            terms: vec![(0, Rat::one())],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn from_unsorted(mut raw: Vec<(u32, Rat)>) -> JetPoly {
        raw.sort_by_key(|(i, _)| *i);
        let mut terms: Vec<(u32, Rat)> = Vec::with_capacity(raw.len());
        for (i, c) in raw {
            match terms.last_mut() {
                Some((j, acc)) if *j == i => *acc = &*acc + &c,
                _ => terms.push((i, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        JetPoly { terms }
    }

    /// Terms of degree at most `deg` of a polynomial over the same variables.
    pub fn from_poly(table: &MonomialTable, p: &TruncatedPoly, deg: u32) -> JetPoly {
        let raw = p
            .terms()
            .iter()
            .filter(|(m, _)| m.degree() <= deg.min(table.max_deg))
            .map(|(m, c)| {
                (
                    table.index_of(m).expect("monomial within table degree"),
                    c.clone(),
                )
            })
            .collect();
        JetPoly::from_unsorted(raw)
    }

    pub fn to_poly(
        &self,
        table: &MonomialTable,
        vars: &Arc<Vars>,
        cap: crate::ring::Cap,
    ) -> TruncatedPoly {
        TruncatedPoly::from_terms(
            vars,
            cap,
            self.terms
                .iter()
                .map(|(i, c)| (table.monomial(*i).clone(), c.clone())),
        )
    }

    /// Product truncated at `deg`.
    pub fn mul(&self, other: &JetPoly, table: &MonomialTable, deg: u32) -> JetPoly {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (j, b) in &other.terms {
            let dj = table.degree(*j);
            let mj = table.monomial(*j);
            for (i, a) in &self.terms {
                if table.degree(*i) + dj > deg {
                    // degrees are nondecreasing along the sorted terms
                    break;
                }
                let k = table.product(*i, mj);
                if k != NONE {
                    raw.push((k, a * b));
                }
            }
        }
        JetPoly::from_unsorted(raw)
    }

    pub fn scale(&self, c: &Rat) -> JetPoly {
        if c.is_zero() {
            return JetPoly::zero();
        }
        JetPoly {
            terms: self.terms.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn add(&self, other: &JetPoly) -> JetPoly {
        let mut raw = self.terms.clone();
        raw.extend(other.terms.iter().cloned());
        JetPoly::from_unsorted(raw)
    }

    pub fn derivative(&self, table: &MonomialTable, j: usize) -> JetPoly {
        let raw = self
            .terms
            .iter()
            .filter_map(|(i, c)| {
                let e = table.monomial(*i).0[j];
                (e > 0).then(|| (table.div_var(*i, j), c * &Rat::int(e as i64)))
            })
            .collect();
        JetPoly::from_unsorted(raw)
    }

    pub fn truncate(&self, table: &MonomialTable, deg: u32) -> JetPoly {
        JetPoly {
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| table.degree(*i) <= deg)
                .cloned()
                .collect(),
        }
    }

    pub fn order(&self, table: &MonomialTable) -> Option<u32> {
        self.terms.first().map(|(i, _)| table.degree(*i))
    }
}

/// Values `H∘f` of target monomials, computed layer by layer in the
/// target degree and truncated at a source degree.
pub struct Composer {
    pub table: Arc<MonomialTable>,
    pub comps: Vec<JetPoly>,
    pub deg: u32,
    orders: Vec<Option<u32>>,
}

/// One layer of monomial values: every target monomial of a fixed degree
/// whose truncated value is nonzero.
pub type Layer = BTreeMap<Monomial, JetPoly>;

impl Composer {
    /// `comps` must vanish at the origin; values are truncated at `deg`.
    pub fn new(table: Arc<MonomialTable>, comps: Vec<JetPoly>, deg: u32) -> Composer {
        let orders = comps.iter().map(|c| c.order(&table)).collect();
        Composer {
            table,
            comps,
            deg,
            orders,
        }
    }

    pub fn ntarget(&self) -> usize {
        self.comps.len()
    }

    /// Lower bound for the order of `H∘f`; `None` when it vanishes identically.
    pub fn estimated_order(&self, m: &Monomial) -> Option<u32> {
        let mut acc = 0;
        for (j, &e) in m.0.iter().enumerate() {
            if e > 0 {
                acc += self.orders[j]? * e as u32;
            }
        }
        Some(acc)
    }

    /// Monomials of the next degree reachable from `prev` by one factor.
    pub fn candidates(&self, prev: &Layer) -> BTreeSet<Monomial> {
        let mut out = BTreeSet::new();
        for m in prev.keys() {
            for j in 0..self.ntarget() {
                let mut e = m.clone();
                e.0[j] += 1;
                out.insert(e);
            }
        }
        out
    }

    /// Values of `candidates` with nonzero truncation.
    pub fn next_layer(&self, prev: &Layer, candidates: &BTreeSet<Monomial>) -> Layer {
        let keep: Vec<&Monomial> = candidates
            .iter()
            .filter(|m| self.estimated_order(m).is_some_and(|o| o <= self.deg))
            .collect();
        let values = exec::map(&keep, |m| {
            let j = m.0.iter().position(|&e| e > 0).expect("positive degree");
            let mut parent = (*m).clone();
            parent.0[j] -= 1;
            prev.get(&parent)
                .map(|v| v.mul(&self.comps[j], &self.table, self.deg))
        });
        keep.into_iter()
            .zip(values)
            .filter_map(|(m, v)| v.filter(|v| !v.is_zero()).map(|v| (m.clone(), v)))
            .collect()
    }

    pub fn first_layer(&self) -> Layer {
        let mut l = Layer::new();
        l.insert(Monomial::one(self.ntarget()), JetPoly::one());
        l
    }
}
