use rigid_core::hitchin::*;
use rigid_core::matrix::QMat;
use rigid_core::rootsys::coxeter_and_degrees;
use rigid_core::{q, Error, Mat, Ring};

fn trunc_for(case: &HitchinCase) -> usize {
    coxeter_and_degrees(case.group()).0 as usize
}

#[test]
fn jplus_containment_and_z_direction() {
    for (f, n, m) in hitchin_cases(4) {
        let case = HitchinCase::new(f, n, m).unwrap();
        let lat = LatticeSpec::JPlus { d: case.d() };
        let mut hits_z = 0;
        for seed in 0..20 {
            let x = sample_jplus_perp(&case, seed, trunc_for(&case));
            assert!(case.rep().in_lie(&x.entries));
            let p = local_hitchin(&x, case.rep()).unwrap();
            assert!(lat.contains(&p).unwrap(), "{:?} n={} m={} seed={}", f, n, m, seed);
            if project_z(&p, case.d()).unwrap().coeffs.iter().any(|(_, c)| !c.is_zero()) {
                hits_z += 1;
            }
        }
        assert!(hits_z > 0, "{:?} n={} m={}: no sample reaches the Z directions", f, n, m);
    }
}

#[test]
fn deeper_pole_leaves_jplus() {
    // Negative control: push the m_{-1} part one full period deeper, to u^{-1-d}.
    for (f, n, m) in hitchin_cases(4) {
        let case = HitchinCase::new(f, n, m).unwrap();
        let rep = case.rep();
        let d = case.d();
        let lat = LatticeSpec::JPlus { d };
        let mut escaped = 0;
        for seed in 0..10 {
            let mut x = sample_jplus_perp(&case, seed, trunc_for(&case));
            let bump = case.ctx.grading.phi_m_minus1().iter().fold(QMat::zeros(rep.size, rep.size), |acc, r| acc.add(rep.e(r)));
            let add = Mat::from_fn(rep.size, rep.size, |a, b| rigid_core::LaurentPoly::mono(bump.get(a, b).clone(), -1 - d));
            x.entries = x.entries.add(&add);
            if !lat.contains(&local_hitchin(&x, rep).unwrap()).unwrap() {
                escaped += 1;
            }
        }
        assert!(escaped > 0, "{:?} n={} m={}", f, n, m);
    }
}

#[test]
fn z_targets_hit_exactly() {
    for (f, n, m) in hitchin_cases(4) {
        let case = HitchinCase::new(f, n, m).unwrap();
        for seed in 0..20 {
            let z = random_z_target(&case, seed);
            let sol = solve_z_preimage(&case, &z).unwrap_or_else(|e| panic!("{:?} n={} m={} seed={}: {}", f, n, m, seed, e));
            let p = local_hitchin(&sol.x, case.rep()).unwrap();
            assert!(LatticeSpec::Z { d: case.d() }.contains(&p).unwrap());
            assert_eq!(project_z(&p, case.d()).unwrap(), z);
        }
    }
}

#[test]
fn non_split_target_rejected() {
    let case = HitchinCase::new(rigid_core::Family::SL, 3, 1).unwrap();
    // kappa (lambda^2 + 1) has no rational roots.
    let d = case.d();
    let scale = |k: u32| q(1) / q((d as i64).pow(k));
    let z = ZPoint { d, coeffs: vec![(2, scale(2)), (3, q(0)), (4, scale(4))] };
    assert!(matches!(solve_z_preimage(&case, &z), Err(Error::Domain(_))));
}
