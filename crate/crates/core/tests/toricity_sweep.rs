use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigid_core::matrix::QMat;
use rigid_core::ring::q;
use rigid_core::rootsys::{Family, GroupType};
use rigid_core::stabilizer::StabilizerContext;
use rigid_core::toricity::*;
use std::collections::BTreeSet;

fn cases(max_n: usize) -> Vec<(Family, usize, usize)> {
    let mut out = Vec::new();
    for f in [Family::GL, Family::SL, Family::SOOdd, Family::Sp, Family::SOEven] {
        for n in GroupType::min_admissible_rank(f)..=max_n {
            let lo = if f == Family::SOEven { 3 } else { 1 };
            for m in lo..=n {
                out.push((f, n, m));
            }
        }
    }
    out
}

#[test]
fn toric_certificates_pass() {
    for (f, n, m) in cases(7) {
        let ctx = StabilizerContext::new(f, n, m, q(1)).unwrap();
        let c = toric_check(&ctx).unwrap();
        assert!(c.all_pass(), "{:?}", c);
        assert!(t_gamma_closed_forms(&ctx), "{:?} {} {}", f, n, m);
    }
}

#[test]
fn t_gamma_inside_stabilizers() {
    for (f, n, m) in cases(5) {
        let ctx = StabilizerContext::new(f, n, m, q(1)).unwrap();
        let dim = ctx.rep.rs.dim();
        for a in orbit_labels(&ctx) {
            let st = orbit_stabilizer(&ctx, &a);
            for w in ctx.bases.uc_weights.iter().filter(|w| !a.contains(w)) {
                assert!(span_contains(&st.stab_basis, &t_gamma(&ctx, *w), dim));
            }
        }
    }
}

fn random_uphi(ctx: &StabilizerContext, rng: &mut ChaCha8Rng) -> QMat {
    let mut x = QMat::zeros(ctx.rep.size, ctx.rep.size);
    for (_, v) in &ctx.bases.uphi_basis {
        let c = q(rng.gen_range(-3..=3));
        x = x.add(&v.to_matrix(&ctx.rep).scale(&c));
    }
    x.exp_nilpotent()
}

#[test]
fn orbit_invariants_are_coset_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (f, n, m) in cases(5) {
        let ctx = StabilizerContext::new(f, n, m, q(1)).unwrap();
        for a in orbit_labels(&ctx) {
            let u = orbit_representative(&ctx, &a).unwrap();
            // Reordering the product stays in the same U_phi coset.
            let mut order: Vec<usize> = a.iter().copied().collect();
            order.shuffle(&mut rng);
            let u2 = orbit_representative_in_order(&ctx, &order).unwrap();
            assert!(same_uphi_coset(&ctx, &u, &u2).unwrap(), "{:?} {} {} {:?}", f, n, m, a);
            // Right U_phi translates and T_phi conjugates keep the weight support.
            let v = random_uphi(&ctx, &mut rng);
            let moved = u.mul(&v);
            assert_eq!(weight_support(&ctx, &moved).unwrap(), a, "{:?} {} {}", f, n, m);
            // Conjugate by a rational point of T_phi.
            let lattice = orbit_stabilizer(&ctx, &BTreeSet::new()).stab_basis;
            let mut xi = vec![0i64; ctx.rep.rs.dim()];
            for b in &lattice {
                let c = rng.gen_range(1..=2);
                for (x, y) in xi.iter_mut().zip(b) {
                    *x += c * y;
                }
            }
            let t = torus_point(&ctx, &xi, 2);
            let conj = t.mul(&moved).mul(&t.inverse().unwrap());
            assert_eq!(weight_support(&ctx, &conj).unwrap(), a);
        }
    }
}
