//! Sparse elimination, monomial tables and the execution helpers.

mod common;

use legendre_core::exec;
use legendre_core::jet::{JetPoly, MonomialTable, NONE};
use legendre_core::linalg::{kernel, IntVec, Subspace};
use legendre_core::ring::{Cap, Monomial, TruncatedPoly, Vars};
use legendre_core::scalar::{Int, Rat};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn iv(entries: &[(usize, i64)]) -> IntVec {
    entries.iter().map(|&(c, x)| (c, Int::from(x))).collect()
}

fn dense(v: &IntVec, width: usize) -> Vec<Q> {
    let mut out = vec![big(0); width];
    for (c, x) in v {
        out[*c] = Q::from_integer(x.to_big());
    }
    out
}

#[test]
fn rank_and_membership() {
    let mut s = Subspace::new(4);
    assert!(s.insert(iv(&[(0, 1), (1, 2)])));
    assert!(s.insert(iv(&[(1, 1), (3, -1)])));
    // a combination adds nothing
    assert!(!s.insert(iv(&[(0, 2), (1, 5), (3, -1)])));
    assert_eq!(s.dim(), 2);
    assert!(s.contains(iv(&[(0, -1), (1, -2)])));
    assert!(!s.contains(iv(&[(2, 1)])));
    assert!(s.contains(Vec::new()));
    let reduced = s.reduced_basis();
    assert_eq!(reduced.len(), 2);
    assert_eq!(reduced[0][0], (0, Rat::one()));
}

#[test]
fn intersection_and_kernel() {
    let a = Subspace::spanned_by(3, [iv(&[(0, 1)]), iv(&[(1, 1)])]);
    let b = Subspace::spanned_by(3, [iv(&[(1, 1), (2, 1)]), iv(&[(0, 1), (1, 1)])]);
    let both = a.intersection(&b);
    assert_eq!(both.dim(), 1);
    assert!(both.contains(iv(&[(0, 1), (1, 1)])));
    assert_eq!(a.sum(&b).dim(), 3);
    assert_eq!(a.quotient_dim(&both), 1);
    // e0 -> (1, 1), e1 -> (2, 2), e2 -> (0, 1): kernel spanned by 2 e0 - e1
    let k = kernel(
        2,
        3,
        [
            (0, iv(&[(0, 1), (1, 1)])),
            (1, iv(&[(0, 2), (1, 2)])),
            (2, iv(&[(1, 1)])),
        ],
    );
    assert_eq!(k.dim(), 1);
    assert!(k.contains(iv(&[(0, 2), (1, -1)])));
}

#[test]
fn truncated_membership() {
    let s = Subspace::spanned_by(4, [iv(&[(0, 1), (3, 1)]), iv(&[(1, 1), (2, 1)])]);
    // agreeing on the first two coordinates is enough below limit 2
    assert!(s.echelon().contains_truncated(iv(&[(0, 1), (1, 1)]), 2));
    assert!(!s.contains(iv(&[(0, 1), (1, 1)])));
    assert!(!s.echelon().contains_truncated(iv(&[(2, 1)]), 3));
}

#[test]
fn monomial_table_layout() {
    let t = MonomialTable::new(2, 3);
    assert_eq!(t.len(), 10);
    assert_eq!(t.degree_range(2), 3..6);
    assert_eq!(t.count_up_to(1), 3);
    for i in 0..t.len() as u32 {
        let up = t.times_var(i, 1);
        if t.degree(i) == 3 {
            assert_eq!(up, NONE);
        } else {
            assert_eq!(t.monomial(up), &t.monomial(i).mul(&Monomial::unit(2, 1)));
            assert_eq!(t.div_var(up, 1), i);
        }
        assert_eq!(t.index_of(t.monomial(i)), Some(i));
    }
}

#[test]
fn jet_arithmetic_matches_truncated_polynomials() {
    let x = Vars::source(2);
    let t = MonomialTable::new(2, 4);
    let a = TruncatedPoly::parse(&x, Cap::EXACT, "1 + x1 - 2*x1*x2 + x2^3").unwrap();
    let b = TruncatedPoly::parse(&x, Cap::EXACT, "x2 + 1/2*x1^2").unwrap();
    let (ja, jb) = (JetPoly::from_poly(&t, &a, 4), JetPoly::from_poly(&t, &b, 4));
    let prod = ja.mul(&jb, &t, 4).to_poly(&t, &x, Cap::new(4));
    assert_eq!(prod, (&a * &b).truncate(Cap::new(4)));
    let d = ja.derivative(&t, 0).to_poly(&t, &x, Cap::new(4));
    assert_eq!(d, a.partial_derivative(0).unwrap().truncate(Cap::new(4)));
    assert_eq!(
        JetPoly::from_poly(&t, &a, 1)
            .to_poly(&t, &x, Cap::new(1))
            .to_string(),
        "x1 + 1"
    );
    assert_eq!(jb.order(&t), Some(1));
    assert!(JetPoly::zero().order(&t).is_none());
}

#[test]
fn order_is_preserved() {
    let items: Vec<u64> = (0..500).collect();
    let square = |x: &u64| x * x;
    let par = exec::map(&items, square);
    let seq = exec::sequential(|| {
        assert!(!exec::is_parallel());
        exec::map(&items, square)
    });
    assert_eq!(par, seq);
    assert_eq!(
        exec::map_range(500, |i| i * 3),
        (0..500).map(|i| i * 3).collect::<Vec<_>>()
    );
    assert_eq!(exec::is_parallel(), cfg!(feature = "parallel"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_agrees_with_dense_elimination(seed in any::<u64>(), rows in 1usize..9, width in 1usize..9) {
        let mut rng = rng(seed);
        let mut vecs: Vec<IntVec> = Vec::new();
        for _ in 0..rows {
            let entries: Vec<(usize, i64)> = (0..width).map(|c| (c, rng.gen_range(-3i64..=3))).filter(|&(_, x)| x != 0).collect();
            vecs.push(iv(&entries));
        }
        let sparse = Subspace::spanned_by(width, vecs.clone());
        let mut oracle = Dense::new(width);
        for v in &vecs {
            oracle.insert(dense(v, width));
        }
        prop_assert_eq!(sparse.dim(), oracle.rank());
        let probe: IntVec = (0..width).map(|c| (c, Int::from(rng.gen_range(1i64..=2)))).collect();
        prop_assert_eq!(sparse.contains(probe.clone()), oracle.contains(&dense(&probe, width)));
    }

    #[test]
    fn intersections_obey_the_dimension_formula(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let width = 6;
        let mut random_space = |k: usize| {
            let mut vecs = Vec::new();
            for _ in 0..k {
                let v: IntVec = (0..width).map(|c| (c, Int::from(rng.gen_range(-2i64..=2)))).filter(|(_, x)| !x.is_zero()).collect();
                vecs.push(v);
            }
            Subspace::spanned_by(width, vecs)
        };
        let a = random_space(3);
        let b = random_space(4);
        let (sum, meet) = (a.sum(&b), a.intersection(&b));
        prop_assert_eq!(sum.dim() + meet.dim(), a.dim() + b.dim());
        prop_assert!(meet.is_subspace_of(&a) && meet.is_subspace_of(&b));
    }
}
