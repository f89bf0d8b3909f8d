mod common;

use legendre_core::contact::ContactChart;
use legendre_core::corpus::cusp_lift;
use legendre_core::deformations::{
    for_each_wf_generator, generating_image_and_kernel, jet_germ_for_slice, module_mult, pi_kernel,
    pullback_truncated, rf_truncated, tf_apply, tf_generators, tf_span, vi_basis, vi_dimension,
    vi_prime_polynomial, vi_system, wf_apply, DeformError, DeformationField,
};
use legendre_core::integral_maps::{owu_normal_form, IntegralMap, IntegralityReport};
use legendre_core::jet::JetPoly;
use legendre_core::ring::{Cap, TruncatedPoly, Vars};
use legendre_core::scalar::Rat;
use proptest::prelude::*;

use common::*;

fn target(f: &IntegralMap, s: &str) -> TruncatedPoly {
    TruncatedPoly::parse(ContactChart::standard(f.n()).vars(), Cap::EXACT, s).unwrap()
}

fn source(f: &IntegralMap, s: &str) -> TruncatedPoly {
    TruncatedPoly::parse(f.source(), Cap::EXACT, s).unwrap()
}

fn field(f: &IntegralMap, comps: &[&str]) -> DeformationField {
    DeformationField::new(f, comps.iter().map(|s| source(f, s)).collect()).unwrap()
}

fn strings(v: &DeformationField) -> Vec<String> {
    v.components().iter().map(|c| c.to_string()).collect()
}

fn certified(v: &DeformationField) -> bool {
    v.is_integral_deformation().unwrap().is_certificate()
}

#[test]
fn membership_examples() {
    let f = owu_normal_form(2, 1).unwrap();
    let mut rng = rng(0xde_0001);
    for _ in 0..5 {
        let h = random_poly(
            &mut rng,
            ContactChart::standard(2).vars(),
            Cap::EXACT,
            0..=3,
            4,
        );
        assert!(certified(&wf_apply(&f, &h).unwrap()));
        let xi: Vec<TruncatedPoly> = (0..2)
            .map(|_| random_poly(&mut rng, f.source(), Cap::EXACT, 0..=3, 3))
            .collect();
        assert!(certified(&tf_apply(&f, &xi).unwrap()));
    }
    let flat = owu_normal_form(1, 0).unwrap();
    // moving the base point along q is tf(∂/∂x1); moving the momentum is not integral
    assert!(certified(&field(&flat, &["0", "1", "0"])));
    match field(&flat, &["1", "0", "0"])
        .is_integral_deformation()
        .unwrap()
    {
        IntegralityReport::Violation(v) => assert_eq!(
            (v.direction.as_str(), v.degree, v.term.as_str()),
            ("x1", 1, "-1")
        ),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn generating_function_examples() {
    let f = owu_normal_form(2, 1).unwrap();
    let e = wf_apply(&f, &target(&f, "p1*q1"))
        .unwrap()
        .generating_function()
        .unwrap();
    assert_eq!(e.to_string(), "1/3*x1*x2^3");
    let tf = tf_apply(&f, &[source(&f, "x2"), source(&f, "1 + x1^2")]).unwrap();
    assert!(tf.generating_function().unwrap().is_zero());
    assert_eq!(
        wf_apply(&f, &target(&f, "1"))
            .unwrap()
            .generating_function()
            .unwrap()
            .to_string(),
        "1"
    );
}

#[test]
fn tf_and_wf_examples() {
    let f = owu_normal_form(2, 1).unwrap();
    let d1 = tf_apply(&f, &[source(&f, "1"), source(&f, "0")]).unwrap();
    let jacobian: Vec<TruncatedPoly> = f
        .components()
        .iter()
        .map(|c| c.partial_derivative(0).unwrap())
        .collect();
    assert!(field_agree(d1.components(), &jacobian));
    let reeb = wf_apply(&f, &target(&f, "1")).unwrap();
    assert_eq!(strings(&reeb), ["0", "0", "0", "0", "1"]);
    assert!(matches!(
        tf_apply(&f, &[source(&f, "1")]),
        Err(DeformError::ComponentCount {
            expected: 2,
            got: 1
        })
    ));
}

#[test]
fn module_multiplication_examples() {
    let f = owu_normal_form(2, 1).unwrap();
    let v = wf_apply(&f, &target(&f, "q2*p1 + r")).unwrap();
    let c = Rat::new(-7, 3);
    let cv = module_mult(
        &TruncatedPoly::constant(ContactChart::standard(2).vars(), Cap::EXACT, c.clone()),
        &v,
    )
    .unwrap();
    assert!(field_agree(cv.components(), v.scale(&c).components()));
    // on the flat line r*(R∘f) = f*r R∘f + (X_r - r R)∘f, and every term vanishes along f
    let flat = owu_normal_form(1, 0).unwrap();
    let reeb = wf_apply(&flat, &target(&flat, "1")).unwrap();
    let product = module_mult(&target(&flat, "r"), &reeb).unwrap();
    assert!(product.components().iter().all(|c| c.is_zero()));
    assert!(certified(&product));
    // p1*(R∘f) = (X_{p1} - p1 R)∘f = -∂/∂q1
    let product = module_mult(&target(&flat, "p1"), &reeb).unwrap();
    assert_eq!(strings(&product), ["0", "-1", "0"]);
    let stray = field(&flat, &["1", "0", "0"]);
    assert!(matches!(
        module_mult(&target(&flat, "q1"), &stray),
        Err(DeformError::Uncertified(_))
    ));
}

#[test]
fn degree_zero_slice_is_the_value_space() {
    for g in legendre_core::corpus::standard_corpus() {
        if !g.germ.germ().params().is_empty() {
            continue;
        }
        let n = g.germ.n();
        let basis = vi_basis(&g.germ, 0).unwrap();
        assert!(basis.dim <= 2 * n + 1, "{}", g.name);
        assert_eq!(basis.dim, vi_dimension(&g.germ, 0).unwrap());
    }
}

#[test]
fn flat_line_slice() {
    // along the line every (φ, ξ) of degree <= r extends, s up to a constant
    let f = owu_normal_form(1, 0).unwrap();
    assert_eq!(vi_dimension(&f, 2).unwrap(), 7);
    assert_eq!(SliceOracle::new(&f, 2).dim(), 7);
}

#[test]
fn generators_lie_in_the_slice() {
    for (f, r) in [
        (owu_normal_form(2, 1).unwrap(), 3),
        (owu_normal_form(1, 0).unwrap(), 4),
        (cusp_lift(2, 5).unwrap(), 4),
    ] {
        let jg = jet_germ_for_slice(&f, r).unwrap();
        let slice = vi_system(&jg, r).kernel();
        for v in tf_generators(&jg, r) {
            assert!(slice.contains_rat(&v));
        }
        let mut count = 0;
        for_each_wf_generator(&jg, r, |gens| {
            for g in gens {
                assert!(
                    slice.contains_rat(&g.vector),
                    "wf({:?}) outside the slice",
                    g.hamiltonian
                );
                count += 1;
            }
        });
        assert!(count > 0);
    }
}

#[test]
fn random_members_reduce_into_the_slice() {
    // a member computed through the form layer, truncated to degree r, is a
    // point of the linear system's kernel
    let f = owu_normal_form(2, 1).unwrap();
    let r = 3;
    let jg = jet_germ_for_slice(&f, r).unwrap();
    let layout = jg.layout(r);
    let slice = vi_system(&jg, r).kernel();
    let mut rng = rng(0xde_0002);
    for _ in 0..10 {
        let v = random_member(&mut rng, &f, ContactChart::standard(2).vars());
        let comps: Vec<JetPoly> = v
            .components()
            .iter()
            .map(|c| JetPoly::from_poly(layout.table(), c, r))
            .collect();
        assert!(slice.contains_rat(&layout.vector(&comps)));
    }
}

#[test]
fn rf_examples() {
    let flat = owu_normal_form(1, 0).unwrap();
    let all = rf_truncated(&flat, 5).unwrap();
    assert_eq!(all.dim(), 6);
    assert_eq!(pullback_truncated(&flat, 5).unwrap().dim(), 6);
    let f = owu_normal_form(2, 1).unwrap();
    let rf = rf_truncated(&f, 6).unwrap();
    let pb = pullback_truncated(&f, 6).unwrap();
    assert!(pb.is_subspace_of(&rf) && rf.dim() == pb.dim());
    // through degree 7 the jets of R_f and f*E_W agree for the (2,5) cusp as
    // well: the extra elements of R_f start above this degree
    let cusp = cusp_lift(2, 5).unwrap();
    let rf = rf_truncated(&cusp, 7).unwrap();
    let pb = pullback_truncated(&cusp, 7).unwrap();
    assert!(pb.is_subspace_of(&rf));
    assert_eq!((rf.dim(), pb.dim()), (7, 7));
}

#[test]
fn exact_sequence_and_kernels() {
    for (f, r) in [
        (owu_normal_form(2, 1).unwrap(), 4),
        (owu_normal_form(3, 1).unwrap(), 3),
        (owu_normal_form(1, 0).unwrap(), 4),
    ] {
        let (image, kernel) = generating_image_and_kernel(&f, r).unwrap();
        let rf = rf_truncated(&f, r).unwrap();
        assert!(image.is_subspace_of(&rf) && rf.is_subspace_of(&image));
        assert_eq!(vi_dimension(&f, r).unwrap(), image.dim() + kernel.dim());
        let vi_prime = vi_prime_polynomial(&f, r).unwrap();
        assert!(vi_prime.is_subspace_of(&tf_span(&f, r).unwrap()));
        // only the Reeb direction survives the projection away from (φ, ξ)
        let pk = pi_kernel(&f, r).unwrap();
        assert_eq!(pk.dim(), 1);
        assert!(pk.contains(vec![(2 * f.n(), 1.into())]));
    }
}

#[test]
fn parameters_are_rejected_by_jet_systems() {
    let family = legendre_core::corpus::cusp_unfolding().unwrap();
    assert!(matches!(
        vi_dimension(&family, 2),
        Err(DeformError::HasParameters)
    ));
}

#[test]
fn component_count_is_checked() {
    let f = owu_normal_form(1, 0).unwrap();
    assert!(matches!(
        DeformationField::new(&f, vec![source(&f, "0"); 2]),
        Err(DeformError::ComponentCount {
            expected: 3,
            got: 2
        })
    ));
    let other = TruncatedPoly::zero(&Vars::source(2), Cap::EXACT);
    assert!(DeformationField::new(&f, vec![other; 3]).is_err());
}

fn umbrella() -> (IntegralMap, std::sync::Arc<Vars>) {
    (
        owu_normal_form(2, 1).unwrap().truncate(Cap::new(8)),
        ContactChart::standard(2).vars().clone(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn products_stay_members(seed in any::<u64>()) {
        let (f, w) = umbrella();
        let mut rng = rng(seed);
        let v = random_member(&mut rng, &f, &w);
        let h = random_poly(&mut rng, &w, Cap::new(8), 0..=2, 3);
        let hv = module_mult(&h, &v).unwrap();
        prop_assert!(certified(&hv));
        let fh = h.compose(f.components()).unwrap();
        prop_assert!(poly_agree(&hv.generating_function().unwrap(), &(&fh * &v.generating_function().unwrap())));
    }

    #[test]
    fn module_axioms(seed in any::<u64>()) {
        let (f, w) = umbrella();
        let mut rng = rng(seed);
        let v = random_member(&mut rng, &f, &w);
        let k = random_poly(&mut rng, &w, Cap::new(8), 0..=2, 3);
        let h = random_poly(&mut rng, &w, Cap::new(8), 0..=2, 3);
        let unit = module_mult(&TruncatedPoly::one(&w, Cap::new(8)), &v).unwrap();
        prop_assert!(field_agree(unit.components(), v.components()));
        let assoc_l = module_mult(&(&k * &h), &v).unwrap();
        let assoc_r = module_mult(&k, &module_mult(&h, &v).unwrap()).unwrap();
        prop_assert!(field_agree(assoc_l.components(), assoc_r.components()));
        let sum = module_mult(&(&k + &h), &v).unwrap();
        let parts = module_mult(&k, &v).unwrap().try_add(&module_mult(&h, &v).unwrap()).unwrap();
        prop_assert!(field_agree(sum.components(), parts.components()));
        let w2 = random_member(&mut rng, &f, &w);
        let over = module_mult(&h, &v.try_add(&w2).unwrap()).unwrap();
        let split = module_mult(&h, &v).unwrap().try_add(&module_mult(&h, &w2).unwrap()).unwrap();
        prop_assert!(field_agree(over.components(), split.components()));
    }

    #[test]
    fn hamiltonian_images_pull_back_hamiltonians(seed in any::<u64>()) {
        let (f, w) = umbrella();
        let mut rng = rng(seed);
        let h = random_poly(&mut rng, &w, Cap::new(8), 0..=3, 4);
        let k = random_poly(&mut rng, &w, Cap::new(8), 0..=3, 4);
        prop_assert!(poly_agree(&wf_apply(&f, &h).unwrap().generating_function().unwrap(), &h.compose(f.components()).unwrap()));
        let sum = wf_apply(&f, &(&h + &k)).unwrap();
        let parts = wf_apply(&f, &h).unwrap().try_add(&wf_apply(&f, &k).unwrap()).unwrap();
        prop_assert!(field_agree(sum.components(), parts.components()));
    }

    #[test]
    fn changing_the_contact_form_leaves_the_product_alone(seed in any::<u64>()) {
        // (i_v λα)(X'_H - H R')∘f = (i_v α)(X_H - H R)∘f, where the primed
        // field for λα is X_{H/λ} - H X_{1/λ}
        let (f, w) = umbrella();
        let c = ContactChart::standard(2);
        let mut rng = rng(seed);
        let v = random_member(&mut rng, &f, &w);
        let h = random_poly(&mut rng, &w, Cap::new(8), 0..=2, 3);
        let lambda = &TruncatedPoly::one(&w, Cap::new(8)) + &random_poly(&mut rng, &w, Cap::new(8), 1..=2, 3);
        let inv = lambda.inverse(Cap::new(8)).unwrap();
        let e = v.generating_function().unwrap();
        let e_new = &lambda.compose(f.components()).unwrap() * &e;
        let primed = c.contact_hamiltonian(&(&h * &inv)).unwrap().try_sub(&c.contact_hamiltonian(&inv).unwrap().mul_function(&h).unwrap()).unwrap();
        let plain = c.contact_hamiltonian(&h).unwrap().try_sub(&c.reeb().mul_function(&h).unwrap()).unwrap();
        let lhs: Vec<TruncatedPoly> = primed.components().iter().map(|x| &x.compose(f.components()).unwrap() * &e_new).collect();
        let rhs: Vec<TruncatedPoly> = plain.components().iter().map(|x| &x.compose(f.components()).unwrap() * &e).collect();
        prop_assert!(field_agree(&lhs, &rhs));
    }

    #[test]
    fn fields_without_base_motion_are_reeb_multiples(seed in any::<u64>()) {
        // a member with φ = ξ = 0 has ds = 0, so s is constant
        let f = owu_normal_form(2, 1).unwrap();
        let mut rng = rng(seed);
        let s = random_poly(&mut rng, f.source(), Cap::EXACT, 0..=3, 3);
        let zero = TruncatedPoly::zero(f.source(), Cap::EXACT);
        let v = DeformationField::new(&f, vec![zero.clone(), zero.clone(), zero.clone(), zero, s.clone()]).unwrap();
        prop_assert_eq!(certified(&v), s.degree().is_none_or(|d| d == 0));
    }
}
