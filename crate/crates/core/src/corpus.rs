//! Named germs used by the regression suites and the command line.

use crate::integral_maps::{owu_normal_form, IntegralMap, IntegralResult, IsotropicMap};
use crate::ring::{Cap, TruncatedPoly, VarKind, Vars};
use crate::scalar::Rat;

/// Legendre lift of the plane curve `(q, r) = (t^a, t^b)`, with
/// `p = (b/a) t^{b-a}`.
pub fn cusp_lift(a: u32, b: u32) -> IntegralResult<IntegralMap> {
    assert!(0 < a && a < b, "exponents must satisfy 0 < a < b");
    let v = Vars::from_names(&[("t", VarKind::Source)])?;
    let t = TruncatedPoly::var(&v, Cap::EXACT, 0);
    let p = t
        .pow(b - a)
        .scale(&Rat::from_ints(&(b as i64).into(), &(a as i64).into()));
    IntegralMap::from_components(&v, vec![p, t.pow(a), t.pow(b)])
}

/// The type-one umbrella in the coordinates `(x, λ, p, μ, y)` of the
/// deformed `(2, 5)`-cusp: `q = (t^2, λ)`, `p = (5/2 t^3 + 3/2 λt, t^3)`,
/// `r = t^5 + λt^3`.
pub fn five_space_germ() -> IntegralResult<IntegralMap> {
    let v = Vars::from_names(&[("t", VarKind::Source), ("lam", VarKind::Source)])?;
    let c = |s: &str| TruncatedPoly::parse(&v, Cap::EXACT, s);
    IntegralMap::from_components(
        &v,
        vec![
            c("5/2*t^3 + 3/2*lam*t")?,
            c("t^3")?,
            c("t^2")?,
            c("lam")?,
            c("t^5 + lam*t^3")?,
        ],
    )
}

/// The plane curves `(q, p) = (t^3, t^7 + λt^8)` with `λ` a parameter.
pub fn isotropic_family() -> IntegralResult<IsotropicMap> {
    let v = Vars::from_names(&[("t", VarKind::Source), ("lam", VarKind::Param)])?;
    let c = |s: &str| TruncatedPoly::parse(&v, Cap::EXACT, s);
    IsotropicMap::new(&v, vec![c("t^7 + lam*t^8")?], vec![c("t^3")?])
}

/// The deformation `r = t^5 + λt^3` of the `(2, 5)`-cusp as an unfolding
/// of its lift, with `λ` a parameter.
pub fn cusp_unfolding() -> IntegralResult<IntegralMap> {
    let v = Vars::from_names(&[("t", VarKind::Source), ("lam", VarKind::Param)])?;
    let c = |s: &str| TruncatedPoly::parse(&v, Cap::EXACT, s);
    IntegralMap::from_components(
        &v,
        vec![c("5/2*t^3 + 3/2*lam*t")?, c("t^2")?, c("t^5 + lam*t^3")?],
    )
}

#[derive(Debug, Clone)]
pub struct CorpusGerm {
    pub name: String,
    pub germ: IntegralMap,
    /// Expected umbrella type, `None` for germs that are not umbrellas.
    pub umbrella_type: Option<usize>,
}

/// The regression corpus: the cusp lifts, the five-space germ and the
/// normal forms `f_{n,k}` for `n <= 4`.
pub fn standard_corpus() -> Vec<CorpusGerm> {
    let mut out = vec![
        CorpusGerm {
            name: "cusp(2,3)".into(),
            germ: cusp_lift(2, 3).expect("integral"),
            umbrella_type: Some(0),
        },
        CorpusGerm {
            name: "cusp(2,5)".into(),
            germ: cusp_lift(2, 5).expect("integral"),
            umbrella_type: None,
        },
        CorpusGerm {
            name: "five-space".into(),
            germ: five_space_germ().expect("integral"),
            umbrella_type: Some(1),
        },
    ];
    for (n, k) in [(1, 0), (2, 0), (3, 0), (4, 0), (2, 1), (3, 1), (4, 2)] {
        out.push(CorpusGerm {
            name: format!("f_{{{n},{k}}}"),
            germ: owu_normal_form(n, k).expect("valid type"),
            umbrella_type: Some(k),
        });
    }
    out
}
