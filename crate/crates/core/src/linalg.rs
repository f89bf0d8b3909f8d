//! Exact subspaces of coefficient spaces.
//!
//! Rows are kept as primitive integer vectors and reduced fraction-free, so
//! no rational arithmetic happens during elimination.  Pivots are the
//! lowest nonzero column of each row; with coordinates ordered by degree,
//! the rows whose pivots lie at or above a given column span the
//! intersection with the corresponding coordinate tail.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::scalar::{common_denominator, Int, Rat};

/// Sparse vector with strictly increasing columns and no zero entries.
pub type IntVec = Vec<(usize, Int)>;
/// Sparse rational vector with strictly increasing columns.
pub type RatVec = Vec<(usize, Rat)>;

/// Clears denominators and returns the primitive integer multiple.
pub fn to_primitive(v: &RatVec) -> IntVec {
    let den = common_denominator(v.iter().map(|(_, c)| c));
    let mut out: IntVec = v
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (*i, (&c.numer() * &den).div_exact(&c.denom())))
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(v: &mut IntVec) {
    let mut g = Int::zero();
    for (_, c) in v.iter() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if v.first().is_some_and(|(_, c)| c.is_negative()) {
        g = -&g;
    }
    if !g.is_zero() && !g.is_one() {
        for (_, c) in v.iter_mut() {
            *c = c.div_exact(&g);
        }
    }
}

/// `a*v - b*w` for sparse vectors.
fn combine(a: &Int, v: &IntVec, b: &Int, w: &IntVec) -> IntVec {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        let take = match (v.get(i), w.get(j)) {
            (Some((ci, _)), Some((cj, _))) => ci.cmp(cj),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, _) => std::cmp::Ordering::Greater,
        };
        match take {
            std::cmp::Ordering::Less => {
                out.push((v[i].0, a * &v[i].1));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((w[j].0, -&(b * &w[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = &(a * &v[i].1) - &(b * &w[j].1);
                if !c.is_zero() {
                    out.push((v[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Incremental row echelon form keyed by pivot column.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, IntVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &IntVec> {
        self.rows.values()
    }

    /// Rows whose pivot lies in `range`.
    pub fn rows_with_pivot_in(&self, range: Range<usize>) -> impl Iterator<Item = &IntVec> {
        self.rows.range(range).map(|(_, r)| r)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Eliminates pivot columns from `v`.  With `full`, every pivot column
    /// is cleared (a normal form); otherwise stops at the first free column.
    /// Columns at or beyond `limit` are discarded throughout.
    fn reduce(&self, mut v: IntVec, full: bool, limit: usize) -> IntVec {
        v.retain(|(c, _)| *c < limit);
        let mut k = 0;
        while k < v.len() {
            let col = v[k].0;
            match self.rows.get(&col) {
                Some(row) => {
                    let a = &row[0].1;
                    let b = &v[k].1;
                    let g = a.gcd(b);
                    let (a, b) = (a.div_exact(&g), b.div_exact(&g));
                    let mut next = combine(&a, &v, &b, row);
                    next.retain(|(c, _)| *c < limit);
                    make_primitive(&mut next);
                    v = next;
                    // entries before position k are untouched by the elimination
                }
                None if full => k += 1,
                None => break,
            }
        }
        v
    }

    /// Inserts `v`; returns true when it was independent of the rows.
    pub fn insert(&mut self, v: IntVec) -> bool {
        let r = self.reduce(v, false, usize::MAX);
        match r.first() {
            None => false,
            Some((col, _)) => {
                let col = *col;
                self.rows.insert(col, r);
                true
            }
        }
    }

    pub fn insert_rat(&mut self, v: &RatVec) -> bool {
        self.insert(to_primitive(v))
    }

    pub fn contains(&self, v: IntVec) -> bool {
        self.reduce(v, false, usize::MAX).is_empty()
    }

    /// Membership of the projection of `v` to columns below `limit` in the
    /// projection of the row space.
    pub fn contains_truncated(&self, v: IntVec, limit: usize) -> bool {
        self.reduce(v, false, limit).is_empty()
    }

    /// Canonical representative of `v` modulo the row space.
    pub fn normal_form(&self, v: IntVec) -> IntVec {
        self.reduce(v, true, usize::MAX)
    }

    /// Reduced row echelon form with unit pivots.
    pub fn reduced_rows(&self) -> Vec<RatVec> {
        let mut done: BTreeMap<usize, IntVec> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut v = row.clone();
            let mut k = 1;
            while k < v.len() {
                let col = v[k].0;
                if let Some(other) = done.get(&col) {
                    let a = &other[0].1;
                    let b = &v[k].1;
                    let g = a.gcd(b);
                    let (a, b) = (a.div_exact(&g), b.div_exact(&g));
                    v = combine(&a, &v, &b, other);
                    make_primitive(&mut v);
                } else {
                    k += 1;
                }
            }
            done.insert(p, v);
        }
        done.into_values()
            .map(|v| {
                let lead = v[0].1.clone();
                v.into_iter()
                    .map(|(c, x)| (c, Rat::from_ints(&x, &lead)))
                    .collect()
            })
            .collect()
    }
}

/// A subspace of a coordinate space of fixed dimension.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    ech: Echelon,
}

impl Subspace {
    pub fn new(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            ech: Echelon::new(),
        }
    }

    pub fn spanned_by(ambient_dim: usize, vecs: impl IntoIterator<Item = IntVec>) -> Self {
        let mut s = Subspace::new(ambient_dim);
        for v in vecs {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    pub fn insert(&mut self, v: IntVec) -> bool {
        debug_assert!(v.iter().all(|(c, _)| *c < self.ambient_dim));
        self.ech.insert(v)
    }

    pub fn insert_rat(&mut self, v: &RatVec) -> bool {
        self.insert(to_primitive(v))
    }

    pub fn contains(&self, v: IntVec) -> bool {
        self.ech.contains(v)
    }

    pub fn contains_rat(&self, v: &RatVec) -> bool {
        self.contains(to_primitive(v))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ech.rows().all(|r| other.contains(r.clone()))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in other.ech.rows() {
            s.insert(r.clone());
        }
        s
    }

    /// Zassenhaus intersection.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let n = self.ambient_dim;
        let mut z = Echelon::new();
        for r in self.ech.rows() {
            let mut v = r.clone();
            v.extend(r.iter().map(|(c, x)| (c + n, x.clone())));
            z.insert(v);
        }
        for r in other.ech.rows() {
            z.insert(r.clone());
        }
        let mut out = Subspace::new(n);
        for r in z.rows_with_pivot_in(n..usize::MAX) {
            out.insert(r.iter().map(|(c, x)| (c - n, x.clone())).collect());
        }
        out
    }

    /// `dim(self + other) - dim(other)`.
    pub fn quotient_dim(&self, other: &Subspace) -> usize {
        self.sum(other).dim() - other.dim()
    }

    pub fn reduced_basis(&self) -> Vec<RatVec> {
        self.ech.reduced_rows()
    }
}

/// Kernel of a linear map given by the images of the unit vectors.
///
/// Image vectors live in columns `0..image_dim`; the returned subspace is
/// in the coordinates of the domain.
pub fn kernel(
    image_dim: usize,
    domain_dim: usize,
    images: impl IntoIterator<Item = (usize, IntVec)>,
) -> Subspace {
    let mut ech = Echelon::new();
    for (j, img) in images {
        let mut v = img;
        debug_assert!(v.iter().all(|(c, _)| *c < image_dim));
        v.push((image_dim + j, Int::one()));
        ech.insert(v);
    }
    let mut out = Subspace::new(domain_dim);
    for r in ech.rows_with_pivot_in(image_dim..usize::MAX) {
        out.insert(r.iter().map(|(c, x)| (c - image_dim, x.clone())).collect());
    }
    out
}

/// Coordinate label of a jet space: component name and exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coordinate {
    pub component: String,
    pub exponents: Vec<u8>,
}

/// Which coefficient space a [`JetSubspace`] lives in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ambient {
    pub description: String,
    pub source_vars: Vec<String>,
    pub components: Vec<String>,
    pub max_degree: u32,
    pub dim: usize,
}

/// A subspace with an exact reduced basis, ready for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JetSubspace {
    pub ambient: Ambient,
    pub dim: usize,
    pub basis: Vec<Vec<Rat>>,
}

impl JetSubspace {
    pub fn from_subspace(ambient: Ambient, s: &Subspace) -> JetSubspace {
        let basis = s
            .reduced_basis()
            .into_iter()
            .map(|row| {
                let mut dense = vec![Rat::zero(); ambient.dim];
                for (c, x) in row {
                    dense[c] = x;
                }
                dense
            })
            .collect::<Vec<_>>();
        JetSubspace {
            dim: basis.len(),
            ambient,
            basis,
        }
    }

    pub fn rows_sparse(&self) -> impl Iterator<Item = RatVec> + '_ {
        self.basis.iter().map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(c, x)| (c, x.clone()))
                .collect()
        })
    }

    pub fn to_subspace(&self) -> Subspace {
        Subspace::spanned_by(
            self.ambient.dim,
            self.rows_sparse().map(|r| to_primitive(&r)),
        )
    }
}
