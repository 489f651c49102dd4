use rigid_core::opers::*;
use rigid_core::rootsys::{Family, GroupType};
use rigid_core::{q, qf, Error, LaurentPoly, Ring, Q};

fn pd(f: Family, n: usize) -> PrincipalData {
    principal_data(GroupType::new(f, n)).unwrap()
}

#[test]
fn gl_is_unsupported() {
    assert!(matches!(principal_data(GroupType::new(Family::GL, 3)), Err(Error::Unsupported(_))));
}

#[test]
fn classical_limit_shapes_all_families() {
    for (f, n) in [(Family::SL, 4), (Family::Sp, 3), (Family::SOOdd, 3), (Family::SOEven, 4)] {
        let p = pd(f, n);
        let degs: Vec<i64> = p.slots.iter().map(|s| s.degree).collect();
        for &d in &degs {
            let r = classical_limit_shape(&p, d);
            if f == Family::SOEven && d <= n as i64 {
                assert!(matches!(r, Err(Error::Unsupported(_))));
            } else {
                let shape = r.unwrap_or_else(|e| panic!("{:?} {} d={}: {}", f, n, d, e));
                let count: usize = p.slots.iter().filter(|s| s.degree >= d).map(|s| (s.degree / d) as usize).sum();
                assert_eq!(shape.diagonal.len(), count);
            }
        }
    }
}

#[test]
fn classical_limit_rejects_wrong_shape() {
    let p = pd(Family::SL, 3);
    // Degree 2 is below d = 3 and must vanish.
    let mut lam = vec![LaurentPoly::zero(); 3];
    lam[0] = LaurentPoly::mono(q(1), 0);
    assert!(matches!(classical_limit_coeffs(&p, 3, &lam), Err(Error::Domain(_))));
}

#[test]
fn companion_relations_up_to_six() {
    for n in 2..=6usize {
        let p = pd(Family::SL, n - 1);
        for m in 2..=n {
            let rel = companion_relation(&p, m, 1).unwrap();
            for i in m..=n {
                for j in 0..=1 {
                    let u = &rel.u_of_lambda[&(i, j)];
                    assert_eq!(u.linear_coeff(rel.var(i, j)), rel.c_consts[i - m]);
                }
            }
        }
    }
}

#[test]
fn pushout_zero_and_random_all_embeddings() {
    for (e, n, d) in rigid_core::verify::functoriality_cases(3) {
        let src = pd(e.source(n).family, n);
        let tgt = principal_data(e.target(n)).unwrap();
        let z = OperCanonical::zero(&src, Some(d));
        let c = pushout(&src, &tgt, &z, e).unwrap();
        assert!(c.target.lambdas.iter().all(|l| l.is_zero()));
        for seed in 0..3 {
            let op = random_global_oper(&src, d, seed);
            pushout(&src, &tgt, &op, e).unwrap_or_else(|err| panic!("{:?} n={} d={}: {}", e, n, d, err));
        }
    }
}

#[test]
fn pushout_rejects_wrong_group() {
    let sp = pd(Family::Sp, 2);
    let sl = pd(Family::SL, 3);
    let op = OperCanonical::zero(&sl, None);
    assert!(matches!(pushout(&sp, &sl, &op, Embedding::SpToSl), Err(Error::Domain(_))));
}

#[test]
fn kloosterman_slope_for_every_rank() {
    // lambda only in the top degree h: slope 1/h.
    for n in 1..=5 {
        let p = pd(Family::SL, n);
        let h = (n + 1) as i64;
        let op = OperCanonical::global(&p, h, &[q(1)]).unwrap();
        assert_eq!(slope_at_infinity(&p, &op).unwrap().slope, Q::new(1.into(), h.into()));
    }
}

#[test]
fn symmetric_beta_about_minus_half_gives_sp_shaped_oper() {
    // beta = {-1/2 +- b}: the odd degree coordinates vanish.
    for b in [qf(1, 3), q(1), qf(5, 2)] {
        let beta = vec![qf(-1, 2) + b.clone(), qf(-1, 2) - b];
        let h = HypParams { alpha: vec![Q::from_integer(0.into()); 4], beta, lambda: q(2) }.to_coeffs().unwrap();
        let p = pd(Family::SL, 3);
        let op = hyp_to_oper(&p, &h).unwrap().oper;
        assert!(op.lambdas[p.slot_of_degree(3).unwrap()].is_zero());
    }
}
