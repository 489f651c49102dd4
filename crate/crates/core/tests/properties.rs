use proptest::prelude::*;
use rigid_core::hitchin::char_coeffs;
use rigid_core::matrixrep::MatrixRep;
use rigid_core::opers::*;
use rigid_core::rootsys::{build_root_system, coxeter_and_degrees, weyl_order_formula, Family, GroupType};
use rigid_core::{q, LaurentPoly, QMat, Q};

fn group() -> impl Strategy<Value = GroupType> {
    prop_oneof![
        (1usize..=4).prop_map(|n| GroupType::new(Family::SL, n)),
        (1usize..=4).prop_map(|n| GroupType::new(Family::GL, n)),
        (1usize..=3).prop_map(|n| GroupType::new(Family::SOOdd, n)),
        (1usize..=3).prop_map(|n| GroupType::new(Family::Sp, n)),
        (2usize..=4).prop_map(|n| GroupType::new(Family::SOEven, n)),
    ]
}

fn oper_group() -> impl Strategy<Value = GroupType> {
    prop_oneof![
        (1usize..=3).prop_map(|n| GroupType::new(Family::SL, n)),
        (2usize..=3).prop_map(|n| GroupType::new(Family::Sp, n)),
        (2usize..=3).prop_map(|n| GroupType::new(Family::SOOdd, n)),
        Just(GroupType::new(Family::SOEven, 4)),
    ]
}

fn lie_element(rep: &MatrixRep, coeffs: &[i64]) -> QMat {
    let mut x = QMat::zeros(rep.size, rep.size);
    for (r, c) in rep.rs.roots.iter().zip(coeffs.iter().cycle()) {
        x = x.add(&rep.e(r).scale(&q(*c)));
    }
    let xi: Vec<Q> = rep.cartan_cochars()[0].clone();
    x.add(&rep.torus(&xi).scale(&q(coeffs[0])))
}

fn positive_nilpotent(rep: &MatrixRep, coeffs: &[i64]) -> QMat {
    let mut x = QMat::zeros(rep.size, rep.size);
    for (r, c) in rep.rs.positive_roots.iter().zip(coeffs.iter().cycle()) {
        x = x.add(&rep.e(r).scale(&q(*c)));
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn char_coeffs_are_conjugation_invariant(g in group(), a in prop::collection::vec(-3i64..=3, 1..8), b in prop::collection::vec(-2i64..=2, 1..6)) {
        let rep = MatrixRep::new(g).unwrap();
        let x = lie_element(&rep, &a);
        let n = positive_nilpotent(&rep, &b);
        let u = n.exp_nilpotent();
        let ui = n.neg().exp_nilpotent();
        prop_assert_eq!(char_coeffs(&u.mul(&x).mul(&ui)), char_coeffs(&x));
    }

    #[test]
    fn exp_of_nilpotent_is_inverted_by_minus(g in group(), b in prop::collection::vec(-3i64..=3, 1..6)) {
        let rep = MatrixRep::new(g).unwrap();
        let n = positive_nilpotent(&rep, &b);
        let u = n.exp_nilpotent();
        prop_assert_eq!(u.mul(&n.neg().exp_nilpotent()), QMat::identity(rep.size));
        prop_assert!(rep.in_group(&u));
    }

    #[test]
    fn root_vector_brackets_close(g in group(), i in 0usize..64, j in 0usize..64) {
        let rep = MatrixRep::new(g).unwrap();
        let roots = &rep.rs.roots;
        let (a, b) = (&roots[i % roots.len()], &roots[j % roots.len()]);
        let br = rep.e(a).bracket(rep.e(b));
        prop_assert!(rep.in_lie(&br));
        let s = a.add(b);
        if rep.rs.is_root(&s) {
            let c = rep.structure_constant(a, b).unwrap();
            prop_assert_eq!(br, rep.e(&s).scale(&c));
        } else if !s.is_zero() {
            prop_assert!(br.is_zero());
        }
    }

    #[test]
    fn heights_are_odd_functions(g in group(), i in 0usize..64) {
        let rs = build_root_system(g).unwrap();
        let r = &rs.roots[i % rs.roots.len()];
        prop_assert_eq!(rs.height(&r.neg()).unwrap(), -rs.height(r).unwrap());
        prop_assert_eq!(rs.height(r).unwrap() > 0, rs.positive_roots.contains(r));
    }

    #[test]
    fn root_counts(g in group()) {
        let rs = build_root_system(g).unwrap();
        let (h, degrees) = coxeter_and_degrees(g);
        let rank = rs.simple_roots.len() as i64;
        prop_assert_eq!(2 * rs.positive_roots.len() as i64, rank * h);
        prop_assert!(rs.simple_roots.iter().all(|a| rs.height(a).unwrap() == 1));
        let semisimple: Vec<i64> = degrees.iter().copied().filter(|&d| d > 1).collect();
        prop_assert_eq!(semisimple.iter().map(|d| d - 1).sum::<i64>(), rs.positive_roots.len() as i64);
    }

    #[test]
    fn laurent_theta_is_a_derivation(a in prop::collection::vec((-3i64..=3, -4i64..=4), 0..5), b in prop::collection::vec((-3i64..=3, -4i64..=4), 0..5)) {
        let f = LaurentPoly::from_terms(a.into_iter().map(|(e, c)| (e, q(c))));
        let g = LaurentPoly::from_terms(b.into_iter().map(|(e, c)| (e, q(c))));
        use rigid_core::Ring;
        prop_assert_eq!(f.mul(&g).theta(), f.theta().mul(&g).add(&f.mul(&g.theta())));
        prop_assert_eq!(f.invert_var().invert_var(), f.clone());
        prop_assert_eq!(f.mul(&g).invert_var(), f.invert_var().mul(&g.invert_var()));
    }

    #[test]
    fn canonical_form_ignores_unipotent_gauge(g in oper_group(), seed in 0u64..1000) {
        let pd = principal_data(g).unwrap();
        let op = random_oper(&pd, seed, 1);
        let x = random_unipotent_generator(&pd, seed + 1, -1, 1);
        let conn = gauge_unipotent(&oper_connection(&pd, &op), &x);
        prop_assert_eq!(ds_canonical_form(&pd, &conn).unwrap().lambdas, op.lambdas);
    }

    #[test]
    fn slope_survives_pushout(n in 1usize..=3, k in 1usize..=3, seed in 0u64..1000, which in 0usize..3) {
        let e = [Embedding::SpToSl, Embedding::SOOddToSl, Embedding::SOOddToSOEven][which];
        let d = 2 * k.min(n) as i64;
        prop_assume!(e != Embedding::SOOddToSOEven || d > n as i64 + 1);
        let src = principal_data(e.source(n)).unwrap();
        let tgt = principal_data(e.target(n)).unwrap();
        let op = random_global_oper(&src, d, seed);
        let cert = pushout(&src, &tgt, &op, e).unwrap();
        prop_assert_eq!(slope_at_infinity(&src, &op).unwrap().slope, slope_at_infinity(&tgt, &cert.target).unwrap().slope);
    }

    #[test]
    fn hyp_coordinates_roundtrip(n in 2usize..=6, m in 2usize..=6, seed in 0u64..1000) {
        prop_assume!(m <= n);
        let pd = principal_data(GroupType::new(Family::SL, n - 1)).unwrap();
        let h = random_hyp_coeffs(n, m, seed, 2);
        let op = hyp_to_oper(&pd, &h).unwrap().oper;
        prop_assert_eq!(oper_to_hyp(&pd, &op).unwrap(), h);
    }
}

#[test]
fn weyl_orders_match_formula() {
    for g in [
        GroupType::new(Family::SL, 3),
        GroupType::new(Family::GL, 4),
        GroupType::new(Family::SOOdd, 3),
        GroupType::new(Family::Sp, 4),
        GroupType::new(Family::SOEven, 4),
    ] {
        let rs = build_root_system(g).unwrap();
        assert_eq!(rs.weyl_order_by_enumeration(), weyl_order_formula(g), "{:?}", g);
    }
}
