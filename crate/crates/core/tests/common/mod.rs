//! Brute-force reference computations for the integration suites.
//!
//! Everything here is dense and slow on purpose: plain `BigRational`
//! row reduction, monomials enumerated from scratch, and the deformation
//! equations evaluated through the differential-form layer rather than the
//! indexed jet systems of the library.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use legendre_core::contact::ContactChart;
use legendre_core::deformations::{tf_apply, wf_apply, DeformationField};
use legendre_core::forms::{Chart, DiffForm, MapBetweenCharts};
use legendre_core::integral_maps::IntegralMap;
use legendre_core::ring::{Cap, Monomial, TruncatedPoly, Vars};
use legendre_core::scalar::Rat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(x: &Rat) -> Q {
    x.to_big()
}

/// Row space kept in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Dense {
    width: usize,
    rows: Vec<(usize, Vec<Q>)>,
}

impl Dense {
    pub fn new(width: usize) -> Dense {
        Dense {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn reduce(&self, v: &mut [Q]) {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let c = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
        }
    }

    pub fn insert(&mut self, mut v: Vec<Q>) -> bool {
        assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for (x, y) in row.iter_mut().zip(&v) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        true
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut v = v.to_vec();
        self.reduce(&mut v);
        v.iter().all(|x| x.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Dense) -> bool {
        self.rows.iter().all(|(_, r)| other.contains(r))
    }

    /// Rows whose leading entry is at or after `start`; they span the
    /// intersection with the coordinate subspace `{x_i = 0, i < start}`.
    pub fn rows_from(&self, start: usize) -> impl Iterator<Item = &Vec<Q>> {
        self.rows
            .iter()
            .filter(move |(p, _)| *p >= start)
            .map(|(_, r)| r)
    }

    /// Rank of the projection onto the first `limit` coordinates.
    pub fn truncated_rank(&self, limit: usize) -> usize {
        let mut d = Dense::new(limit);
        for (_, r) in &self.rows {
            d.insert(r[..limit].to_vec());
        }
        d.rank()
    }

    pub fn basis(&self) -> impl Iterator<Item = &Vec<Q>> {
        self.rows.iter().map(|(_, r)| r)
    }
}

/// Null space of the matrix with the given columns, each of length `height`.
pub fn null_space(height: usize, columns: &[Vec<Q>]) -> Dense {
    let w = columns.len();
    let mut aug = Dense::new(height + w);
    for (j, c) in columns.iter().enumerate() {
        let mut v = c.clone();
        v.resize(height + w, Q::zero());
        v[height + j] = Q::one();
        aug.insert(v);
    }
    let mut out = Dense::new(w);
    for r in aug.rows_from(height) {
        out.insert(r[height..].to_vec());
    }
    out
}

pub fn column_rank(height: usize, columns: &[Vec<Q>]) -> usize {
    let mut d = Dense::new(height);
    for c in columns {
        d.insert(c.clone());
    }
    d.rank()
}

/// Exponent vectors in `nvars` variables of total degree at most `deg`,
/// grouped by degree.
pub fn monomials(nvars: usize, deg: u32) -> Vec<Vec<u8>> {
    fn rec(nvars: usize, left: u32, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == nvars {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u8);
            rec(nvars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=deg {
        rec(nvars, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Coordinates of polynomials over the monomials of degree `<= deg`.
pub struct Basis {
    pub monos: Vec<Vec<u8>>,
    index: BTreeMap<Vec<u8>, usize>,
}

impl Basis {
    pub fn new(nvars: usize, deg: u32) -> Basis {
        let monos = monomials(nvars, deg);
        let index = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Basis { monos, index }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    /// Number of monomials of degree `<= d`.
    pub fn count_up_to(&self, d: u32) -> usize {
        self.monos
            .iter()
            .filter(|m| m.iter().map(|&e| e as u32).sum::<u32>() <= d)
            .count()
    }

    pub fn vector(&self, p: &TruncatedPoly) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.len()];
        for (m, c) in p.terms() {
            if let Some(&i) = self.index.get(&m.0.to_vec()) {
                v[i] = q(c);
            }
        }
        v
    }

    pub fn vector_below(&self, p: &TruncatedPoly, deg: u32) -> Vec<Q> {
        self.vector(&p.truncate(Cap::new(deg)))
    }

    pub fn poly(&self, vars: &Arc<Vars>, coeffs: &[Q]) -> TruncatedPoly {
        TruncatedPoly::from_terms(
            vars,
            Cap::EXACT,
            self.monos
                .iter()
                .zip(coeffs)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (Monomial::from_exps(m), Rat::from_big(c.clone()))),
        )
    }
}

/// Values `H∘f` of the target monomials, truncated at `deg`, keyed by the
/// exponent vector of `H`; zero values are dropped.
pub fn monomial_values(f: &IntegralMap, deg: u32) -> BTreeMap<Vec<u8>, TruncatedPoly> {
    let cap = Cap::new(deg);
    let comps: Vec<TruncatedPoly> = f.components().iter().map(|c| c.truncate(cap)).collect();
    let ncomp = comps.len();
    let mut out = BTreeMap::new();
    let mut layer: BTreeMap<Vec<u8>, TruncatedPoly> = BTreeMap::new();
    layer.insert(vec![0u8; ncomp], TruncatedPoly::one(f.source(), cap));
    while !layer.is_empty() {
        let mut next = BTreeMap::new();
        for (m, v) in &layer {
            for (j, c) in comps.iter().enumerate() {
                let mut e = m.clone();
                e[j] += 1;
                if next.contains_key(&e) {
                    continue;
                }
                let w = (v * c).truncate(cap);
                if !w.is_zero() {
                    next.insert(e, w);
                }
            }
        }
        out.append(&mut layer);
        layer = next;
    }
    out
}

/// The scalar value spaces of a germ truncated at `deg`.
pub struct ValueOracle {
    pub basis: Basis,
    pub all: Dense,
    /// Values of monomials divisible by some `q_i` or `r`.
    pub fibre: Dense,
    /// `fibre` together with `1` and the `p_i∘f`.
    pub fibre_and_affine: Dense,
    /// Values of monomials of degree `>= n + 2`.
    pub high: Dense,
}

impl ValueOracle {
    pub fn new(f: &IntegralMap, deg: u32) -> ValueOracle {
        let n = f.n();
        let basis = Basis::new(f.source().len(), deg);
        let w = basis.len();
        let (mut all, mut fibre, mut high) = (Dense::new(w), Dense::new(w), Dense::new(w));
        for (m, v) in monomial_values(f, deg) {
            let vec = basis.vector(&v);
            if m[n..].iter().any(|&e| e > 0) {
                fibre.insert(vec.clone());
            }
            if m.iter().map(|&e| e as usize).sum::<usize>() >= n + 2 {
                high.insert(vec.clone());
            }
            all.insert(vec);
        }
        let mut fibre_and_affine = fibre.clone();
        fibre_and_affine.insert(basis.vector(&TruncatedPoly::one(f.source(), Cap::new(deg))));
        for i in 0..n {
            fibre_and_affine.insert(basis.vector_below(f.p(i), deg));
        }
        ValueOracle {
            basis,
            all,
            fibre,
            fibre_and_affine,
            high,
        }
    }

    pub fn quotient_dim(&self, d: u32) -> usize {
        let l = self.basis.count_up_to(d);
        self.all.truncated_rank(l) - self.fibre.truncated_rank(l)
    }

    pub fn generated(&self, d: u32) -> bool {
        let l = self.basis.count_up_to(d);
        self.all.truncated_rank(l) == self.fibre_and_affine.truncated_rank(l)
    }

    /// The truncated inclusion `f*E_W ∩ m^{r+1} ⊆ f*m_W^{n+2}` at degree `d`.
    pub fn inclusion(&self, r: u32, d: u32) -> bool {
        let l = self.basis.count_up_to(d);
        let mut a = Dense::new(l);
        for v in self.all.basis() {
            a.insert(v[..l].to_vec());
        }
        let mut c = Dense::new(l);
        for v in self.high.basis() {
            c.insert(v[..l].to_vec());
        }
        let start = self.basis.count_up_to(r);
        let holds = a.rows_from(start).all(|v| c.contains(v));
        holds
    }
}

/// A slot of the field components `(φ_1..φ_n, ξ_1..ξ_n, s)` times a source
/// monomial.
pub struct FieldSlots {
    pub basis: Basis,
    pub ncomp: usize,
}

impl FieldSlots {
    pub fn new(f: &IntegralMap, r: u32) -> FieldSlots {
        FieldSlots {
            basis: Basis::new(f.source().len(), r),
            ncomp: 2 * f.n() + 1,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len() * self.ncomp
    }

    pub fn unit(&self, f: &IntegralMap, k: usize) -> DeformationField {
        let (m, c) = (k / self.ncomp, k % self.ncomp);
        let mut comps = vec![TruncatedPoly::zero(f.source(), Cap::EXACT); self.ncomp];
        comps[c] = TruncatedPoly::monomial(
            f.source(),
            Cap::EXACT,
            Monomial::from_exps(&self.basis.monos[m]),
            Rat::one(),
        );
        DeformationField::new(f, comps).expect("component count")
    }

    pub fn field(&self, f: &IntegralMap, coeffs: &[Q]) -> DeformationField {
        let mut parts: Vec<Vec<Q>> = vec![vec![Q::zero(); self.basis.len()]; self.ncomp];
        for (k, x) in coeffs.iter().enumerate() {
            parts[k % self.ncomp][k / self.ncomp] = x.clone();
        }
        let comps = parts
            .iter()
            .map(|p| self.basis.poly(f.source(), p))
            .collect();
        DeformationField::new(f, comps).expect("component count")
    }
}

/// Coefficients of degree `< r` of `v*α̃` in each source direction,
/// evaluated through the natural lifting.
pub fn lifted_equations(
    f: &IntegralMap,
    lifted_alpha: &DiffForm,
    v: &DeformationField,
    r: u32,
    rows: &Basis,
) -> Vec<Q> {
    let pulled = v
        .as_field_along()
        .expect("field")
        .pullback_tangent(lifted_alpha)
        .expect("pullback");
    let ns = f.source().len();
    let mut out = Vec::with_capacity(rows.len() * ns);
    for j in 0..ns {
        let c = pulled.coefficient(&[j]);
        if r == 0 {
            continue;
        }
        out.extend(rows.vector_below(&c, r - 1));
    }
    out
}

pub fn lifted_alpha(n: usize) -> DiffForm {
    ContactChart::standard(n)
        .alpha()
        .natural_lift()
        .expect("lift")
}

/// The slice of `VI_f` through degree `r`, by the naive construction.
pub struct SliceOracle {
    pub slots: FieldSlots,
    pub kernel: Dense,
    pub height: usize,
}

impl SliceOracle {
    pub fn new(f: &IntegralMap, r: u32) -> SliceOracle {
        let f = f.truncate(Cap::new(r + 1));
        let slots = FieldSlots::new(&f, r);
        let rows = Basis::new(f.source().len(), r.saturating_sub(1));
        let height = if r == 0 {
            0
        } else {
            rows.len() * f.source().len()
        };
        let lifted = lifted_alpha(f.n());
        let columns: Vec<Vec<Q>> = (0..slots.len())
            .map(|k| lifted_equations(&f, &lifted, &slots.unit(&f, k), r, &rows))
            .collect();
        SliceOracle {
            kernel: null_space(height, &columns),
            slots,
            height,
        }
    }

    pub fn dim(&self) -> usize {
        self.kernel.rank()
    }
}

/// `R_f` through degree `r` by brute force: `h` of degree `<= r` whose
/// differential agrees below degree `r` with some `Σ a_i dP_i + b_i dQ_i`.
pub fn rf_oracle(f: &IntegralMap, r: u32) -> (Basis, Dense) {
    let src = f.source();
    let ns = src.len();
    let hb = Basis::new(ns, r);
    if r == 0 {
        let mut d = Dense::new(1);
        d.insert(vec![Q::one()]);
        return (hb, d);
    }
    let rows = Basis::new(ns, r - 1);
    let height = rows.len() * ns;
    let one_form = |w: &[TruncatedPoly]| -> Vec<Q> {
        w.iter().flat_map(|c| rows.vector_below(c, r - 1)).collect()
    };
    let d_of = |h: &TruncatedPoly| -> Vec<TruncatedPoly> {
        (0..ns)
            .map(|j| h.partial_derivative(j).expect("index"))
            .collect()
    };
    let mut module = Dense::new(height);
    let mb = Basis::new(ns, r - 1);
    for c in &f.components()[..2 * f.n()] {
        let dc = d_of(c);
        for m in &mb.monos {
            let x = TruncatedPoly::monomial(src, Cap::EXACT, Monomial::from_exps(m), Rat::one());
            module.insert(one_form(&dc.iter().map(|p| p * &x).collect::<Vec<_>>()));
        }
    }
    // h is in R_f when dh reduces to zero modulo the module
    let reduced: Vec<Vec<Q>> = hb
        .monos
        .iter()
        .map(|m| {
            let h = TruncatedPoly::monomial(src, Cap::EXACT, Monomial::from_exps(m), Rat::one());
            let mut v = one_form(&d_of(&h));
            module.reduce(&mut v);
            v
        })
        .collect();
    (hb, null_space(height, &reduced))
}

/// `f*E_W` truncated at `r`, from the monomial values.
pub fn pullback_oracle(f: &IntegralMap, r: u32) -> (Basis, Dense) {
    let b = Basis::new(f.source().len(), r);
    let mut d = Dense::new(b.len());
    for v in monomial_values(f, r).values() {
        d.insert(b.vector(v));
    }
    (b, d)
}

/// Local multiplicity `dim E_N / (components)` truncated at `deg`.
pub fn multiplicity_oracle(f: &IntegralMap, deg: u32) -> usize {
    let src = f.source();
    let b = Basis::new(src.len(), deg);
    let mut ideal = Dense::new(b.len());
    for c in f.components() {
        for m in &b.monos {
            let x = TruncatedPoly::monomial(src, Cap::EXACT, Monomial::from_exps(m), Rat::one());
            ideal.insert(b.vector_below(&(c * &x), deg));
        }
    }
    b.len() - ideal.rank()
}

/// Converts a library vector over the indexed monomials of
/// `legendre_core::jet::MonomialTable::new(nvars, deg)` to [`Basis`]
/// coordinates with `ncomp` slots per monomial.
pub fn from_table(
    v: &[(usize, Rat)],
    nvars: usize,
    deg: u32,
    ncomp: usize,
    into: &Basis,
) -> Vec<Q> {
    let table = legendre_core::jet::MonomialTable::new(nvars, deg);
    let mut out = vec![Q::zero(); into.len() * ncomp];
    for (i, x) in v {
        let m = table.monomial((i / ncomp) as u32);
        let k = into
            .monos
            .iter()
            .position(|e| e[..] == m.0[..])
            .expect("monomial in range");
        out[k * ncomp + i % ncomp] = q(x);
    }
    out
}

pub fn subspace_to_dense(
    s: &legendre_core::linalg::Subspace,
    nvars: usize,
    deg: u32,
    ncomp: usize,
    into: &Basis,
) -> Dense {
    let mut d = Dense::new(into.len() * ncomp);
    for row in s.reduced_basis() {
        d.insert(from_table(&row, nvars, deg, ncomp, into));
    }
    d
}

pub fn same_space(a: &Dense, b: &Dense) -> bool {
    a.rank() == b.rank() && a.is_subspace_of(b)
}

// random inputs

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(rng: &mut impl Rng) -> Rat {
    let num = rng.gen_range(-5i64..=5);
    let den = rng.gen_range(1i64..=4);
    Rat::new(num, den)
}

/// A random polynomial with `terms` terms of degree in `degs`.
pub fn random_poly(
    rng: &mut impl Rng,
    vars: &Arc<Vars>,
    cap: Cap,
    degs: std::ops::RangeInclusive<u32>,
    terms: usize,
) -> TruncatedPoly {
    let nv = vars.len();
    let mut p = TruncatedPoly::zero(vars, cap);
    for _ in 0..terms {
        let d = rng.gen_range(degs.clone());
        let mut e = vec![0u8; nv];
        for _ in 0..d {
            e[rng.gen_range(0..nv)] += 1;
        }
        p.add_term(Monomial::from_exps(&e), small_rat(rng));
    }
    p
}

pub fn big(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

// agreement up to the smaller cap

pub fn poly_agree(a: &TruncatedPoly, b: &TruncatedPoly) -> bool {
    let cap = a.cap().min(b.cap());
    a.truncate(cap) == b.truncate(cap)
}

pub fn form_agree(a: &DiffForm, b: &DiffForm) -> bool {
    let cap = a.cap().min(b.cap());
    a.truncate(cap) == b.truncate(cap)
}

pub fn field_agree(a: &[TruncatedPoly], b: &[TruncatedPoly]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| poly_agree(x, y))
}

pub fn random_form(rng: &mut impl Rng, chart: &Arc<Chart>, degree: usize, cap: Cap) -> DiffForm {
    let dim = chart.dim();
    let mut terms = Vec::new();
    for _ in 0..3 {
        let mut idx: Vec<usize> = Vec::new();
        while idx.len() < degree {
            let j = rng.gen_range(0..dim);
            if !idx.contains(&j) {
                idx.push(j);
            }
        }
        idx.sort();
        terms.push((idx, random_poly(rng, chart.vars(), cap, 0..=2, 3)));
    }
    DiffForm::from_terms(chart, degree, cap, terms).expect("form")
}

pub fn random_map(
    rng: &mut impl Rng,
    source: &Arc<Chart>,
    target: &Arc<Chart>,
    cap: Cap,
) -> MapBetweenCharts {
    let comps = (0..target.dim())
        .map(|_| random_poly(rng, source.vars(), cap, 1..=3, 3))
        .collect();
    MapBetweenCharts::new(source.clone(), target.clone(), comps).expect("map")
}

pub fn random_member(rng: &mut impl Rng, f: &IntegralMap, target: &Arc<Vars>) -> DeformationField {
    let h = random_poly(rng, target, Cap::EXACT, 0..=3, 4);
    let xi: Vec<TruncatedPoly> = f
        .directions()
        .iter()
        .map(|_| random_poly(rng, f.source(), Cap::EXACT, 0..=2, 2))
        .collect();
    wf_apply(f, &h)
        .unwrap()
        .try_add(&tf_apply(f, &xi).unwrap())
        .unwrap()
}
