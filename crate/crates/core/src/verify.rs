//! Acceptance sweeps: one function per criterion, each returning a pass/fail line.

use crate::error::{Error, Result};
use crate::grading::{delta_g0, delta_g0_closed_form, delta_g0_count_formula, grade, types_match_case_analysis};
use crate::hitchin::{
    global_dim_audit, hitchin_cases, local_hitchin, project_z, random_z_target, sample_jplus_perp, solve_z_preimage, type_a_det_symbolic,
    HitchinCase, LatticeSpec,
};
use crate::laurent::LaurentPoly;
use crate::matrix::{rank_of, QMat};
use crate::opers::*;
use crate::ring::{q, qf, Ring, Q};
use crate::rootsys::{build_root_system, coxeter_and_degrees, Family, GroupType};
use crate::stabilizer::{StabilizerContext, WeightKind};
use crate::toricity::{
    center_in_tphi, general_position_check, orbit_labels, orbit_stabilizer, s_family, span_contains, t_gamma, toric_check, CharMode,
    Character, SFamily,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::time::Instant;

/// Criteria whose literal statement is known not to hold under the implemented conventions.
pub const KNOWN_UNATTAINABLE: &[u8] = &[10];

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub elapsed_ms: u128,
}

impl CriterionResult {
    /// One summary line.
    pub fn line(&self) -> String {
        let mut s = format!(
            "criterion {:>2} [{}] {}: {} checks, {} failures, {} ms",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.failures.len(),
            self.elapsed_ms
        );
        if let Some(f) = self.failures.first() {
            s.push_str(&format!("; first failure: {}", f));
        }
        s
    }
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn result<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{}: {}", what(), e));
                None
            }
        }
    }
}

/// Names of the twelve criteria.
pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "Delta(G_0) tables",
        2 => "toricity",
        3 => "stabilizer combinatorics",
        4 => "u_phi double derivation",
        5 => "Hitchin containment",
        6 => "Z-surjectivity",
        7 => "dimension audit",
        8 => "oper engine",
        9 => "functoriality",
        10 => "hypergeometric symmetry",
        11 => "slopes",
        12 => "general position",
        _ => "unknown",
    }
}

fn admissible_cases(max_n: usize, with_gl: bool) -> Vec<(Family, usize, usize)> {
    let mut out = Vec::new();
    for f in [Family::GL, Family::SL, Family::SOOdd, Family::Sp, Family::SOEven] {
        if f == Family::GL && !with_gl {
            continue;
        }
        for n in GroupType::min_admissible_rank(f)..=max_n {
            let lo = if f == Family::SOEven { 3 } else { 1 };
            for m in lo..=n {
                out.push((f, n, m));
            }
        }
    }
    out
}

/// Run one criterion.
pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::default();
    match id {
        1 => criterion_1(&mut t),
        2 => criterion_2(&mut t),
        3 => criterion_3(&mut t),
        4 => criterion_4(&mut t),
        5 => criterion_5(&mut t),
        6 => criterion_6(&mut t),
        7 => criterion_7(&mut t),
        8 => criterion_8(&mut t),
        9 => criterion_9(&mut t),
        10 => criterion_10(&mut t),
        11 => criterion_11(&mut t),
        12 => criterion_12(&mut t),
        _ => return Err(Error::Config(format!("criteria are numbered 1..=12, got {}", id))),
    }
    Ok(CriterionResult {
        id,
        name: criterion_name(id).into(),
        pass: t.failures.is_empty() && t.checks > 0,
        checks: t.checks,
        failures: t.failures,
        notes: t.notes,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Run all twelve criteria in order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=12).map(|i| run_criterion(i).expect("valid criterion id")).collect()
}

fn criterion_1(t: &mut Tally) {
    for (f, n, m) in admissible_cases(7, true) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(rs) = t.result(build_root_system(GroupType::new(f, n)), tag) else { continue };
        let Some(levi) = t.result(rs.admissible_levi(m), tag) else { continue };
        let g = grade(&rs, &levi);
        let Some(dec) = t.result(delta_g0(&g), tag) else { continue };
        let computed: BTreeSet<_> = dec.delta_g0.iter().cloned().collect();
        let closed: BTreeSet<_> = delta_g0_closed_form(f, n, m).into_iter().collect();
        t.check(computed == closed, || format!("{}: Delta(G_0) differs from the closed form", tag()));
        t.check(dec.delta_g0.len() == delta_g0_count_formula(f, n, m), || format!("{}: count formula", tag()));
        t.check(types_match_case_analysis(&dec, f, n, m), || format!("{}: component types {:?}", tag(), dec.components));
        if f == Family::SOOdd && 2 * n as i64 >= 3 * levi.d {
            let letters: BTreeSet<char> = dec.components.iter().filter_map(|c| c.cartan_type.chars().next()).collect();
            t.check(letters.contains(&'B') && letters.contains(&'D'), || format!("{}: expected B and D components", tag()));
        }
    }
}

fn criterion_2(t: &mut Tally) {
    for (f, n, m) in admissible_cases(7, true) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(ctx) = t.result(StabilizerContext::new(f, n, m, q(1)), tag) else { continue };
        let Some(cert) = t.result(toric_check(&ctx), tag) else { continue };
        for c in &cert.clauses {
            t.check(c.pass, || format!("{}: {} ({})", tag(), c.name, c.detail));
        }
    }
}

fn criterion_3(t: &mut Tally) {
    for (f, n, m) in admissible_cases(5, true) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(ctx) = t.result(StabilizerContext::new(f, n, m, q(1)), tag) else { continue };
        let dim = ctx.rep.rs.dim();
        let full: BTreeSet<usize> = ctx.bases.uc_weights.iter().copied().collect();
        for a in orbit_labels(&ctx) {
            let st = orbit_stabilizer(&ctx, &a);
            if a == full {
                let z = center_in_tphi(&ctx);
                t.check(span_contains(&st.stab_basis, &z, dim) && span_contains(&z, &st.stab_basis, dim), || {
                    format!("{}: open orbit stabilizer is not Lie(Z_G,phi)", tag())
                });
                continue;
            }
            for w in ctx.bases.uc_weights.iter().filter(|w| !a.contains(w)) {
                t.check(span_contains(&st.stab_basis, &t_gamma(&ctx, *w), dim), || format!("{}: T_gamma {} not in stab({:?})", tag(), w, a));
            }
        }
    }
}

fn criterion_4(t: &mut Tally) {
    for (f, n, m) in admissible_cases(6, true) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(ctx) = t.result(StabilizerContext::new(f, n, m, q(1)), tag) else { continue };
        let g = &ctx.grading;
        let rep = &ctx.rep;
        let u0 = g.phi_u0();
        if u0.is_empty() {
            t.check(ctx.bases.uphi_basis.is_empty(), || format!("{}: u_0 = 0 but u_phi is not", tag()));
            continue;
        }
        // Combinatorial route: kind I roots with no m_{-1} neighbour, E_1 - E_2 on two-root fibers.
        let m_minus = g.phi_m_minus1();
        let coords = |terms: &[(usize, Q)]| {
            let mut v = vec![Q::from_integer(0.into()); u0.len()];
            for (i, c) in terms {
                v[*i] = c.clone();
            }
            v
        };
        let pos = |r: &crate::rootsys::Root| u0.iter().position(|x| x == r).expect("root of u_0");
        let mut comb = Vec::new();
        for w in &ctx.weights {
            match w.kind {
                WeightKind::I => {
                    let gamma = &w.fiber[0];
                    if m_minus.iter().all(|a| !g.rs.is_root(&gamma.add(a))) {
                        comb.push(coords(&[(pos(gamma), q(1))]));
                    }
                }
                WeightKind::II | WeightKind::III => comb.push(coords(&[(pos(&w.fiber[0]), q(1)), (pos(&w.fiber[1]), q(-1))])),
            }
        }
        // Matrix route: kernel of ad f_phi on u_0.
        let cols: Vec<Vec<Q>> = u0.iter().map(|r| rep.e(r).bracket(&ctx.f_phi).to_vec()).collect();
        let kernel = QMat::from_columns(rep.size * rep.size, &cols).nullspace();
        let mut joint = kernel.clone();
        joint.extend(comb.iter().cloned());
        let ok = rank_of(&comb, u0.len()) == comb.len() && kernel.len() == comb.len() && rank_of(&joint, u0.len()) == comb.len();
        t.check(ok, || format!("{}: combinatorial u_phi (dim {}) differs from ker ad f_phi (dim {})", tag(), comb.len(), kernel.len()));
    }
}

fn criterion_5(t: &mut Tally) {
    for (f, n, m) in hitchin_cases(5) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(case) = t.result(HitchinCase::new(f, n, m), tag) else { continue };
        let trunc = coxeter_and_degrees(case.group()).0 as usize;
        let lat = LatticeSpec::JPlus { d: case.d() };
        for seed in 0..200 {
            let x = sample_jplus_perp(&case, seed, trunc);
            let Some(p) = t.result(local_hitchin(&x, case.rep()), tag) else { continue };
            let ok = lat.contains(&p).unwrap_or(false);
            t.check(ok, || format!("{} seed {}: sample leaves Hit_j+", tag(), seed));
        }
    }
}

fn criterion_6(t: &mut Tally) {
    for (f, n, m) in hitchin_cases(4) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(case) = t.result(HitchinCase::new(f, n, m), tag) else { continue };
        for seed in 0..20 {
            let z = random_z_target(&case, seed);
            let Some(sol) = t.result(solve_z_preimage(&case, &z), || format!("{} seed {}", tag(), seed)) else { continue };
            let Some(p) = t.result(local_hitchin(&sol.x, case.rep()), tag) else { continue };
            let inside = LatticeSpec::Z { d: case.d() }.contains(&p).unwrap_or(false);
            let exact = project_z(&p, case.d()).map(|pz| pz == z).unwrap_or(false);
            t.check(inside && exact, || format!("{} seed {}: preimage misses the target", tag(), seed));
        }
    }
    for nn in 2..=7 {
        for i in 1..=nn {
            let r = type_a_det_symbolic(nn, i);
            t.check(r.is_ok(), || format!("det identity N={} i={}: {:?}", nn, i, r.err()));
        }
    }
}

fn criterion_7(t: &mut Tally) {
    let range: BTreeSet<_> = hitchin_cases(6).into_iter().collect();
    for (f, n, m) in admissible_cases(6, false) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(a) = t.result(global_dim_audit(f, n, m, 25, 3, 0), tag) else { continue };
        t.check(a.formulas_agree && a.equality, || format!("{}: {:?}", tag(), a));
        if range.contains(&(f, n, m)) {
            t.check(a.single_point_dim == (n - m + 1) as i64, || format!("{}: dim Hit = {}, expected n-m+1", tag(), a.single_point_dim));
        }
    }
}

fn oper_groups_8() -> Vec<GroupType> {
    let mut g: Vec<GroupType> = (1..=5).map(|n| GroupType::new(Family::SL, n)).collect();
    g.push(GroupType::new(Family::Sp, 2));
    g.push(GroupType::new(Family::SOOdd, 2));
    g
}

fn criterion_8(t: &mut Tally) {
    for g in oper_groups_8() {
        let tag = || algebra_name(g);
        let Some(pd) = t.result(principal_data(g), tag) else { continue };
        for seed in 0..50u64 {
            let op = random_oper(&pd, seed, 2);
            let x = random_unipotent_generator(&pd, 1000 + seed, -1, 1);
            let conn = gauge_unipotent(&oper_connection(&pd, &op), &x);
            let Some(c1) = t.result(ds_canonical_form(&pd, &conn), || format!("{} seed {}", tag(), seed)) else { continue };
            t.check(c1.lambdas == op.lambdas, || format!("{} seed {}: gauge changed the canonical form", tag(), seed));
            let again = ds_canonical_form(&pd, &oper_connection(&pd, &c1)).map(|c| c.lambdas == c1.lambdas);
            t.check(again.unwrap_or(false), || format!("{} seed {}: reduction not idempotent", tag(), seed));
            let y = random_unipotent_generator(&pd, 5000 + seed, 0, 2);
            let other = ds_canonical_form(&pd, &gauge_unipotent(&conn, &y)).map(|c| c.lambdas == c1.lambdas);
            t.check(other.unwrap_or(false), || format!("{} seed {}: second gauge changed the canonical form", tag(), seed));
        }
    }
    for n in 2..=8usize {
        let Some(pd) = t.result(principal_data(GroupType::new(Family::SL, n - 1)), || format!("sl{}", n)) else { continue };
        for seed in 0..50u64 {
            let m = 2 + (seed as usize) % (n - 1);
            let h = random_hyp_coeffs(n, m, seed, 1);
            let back = hyp_to_oper(&pd, &h).and_then(|c| oper_to_hyp(&pd, &c.oper));
            t.check(matches!(&back, Ok(b) if *b == h), || format!("sl{} m={} seed {}: hyp -> oper -> hyp: {:?}", n, m, seed, back.err()));
            let mut op = random_oper(&pd, 100 + seed, 1);
            for (s, l) in pd.slots.iter().zip(op.lambdas.iter_mut()) {
                if (s.degree as usize) < m {
                    *l = LaurentPoly::zero();
                }
            }
            op.d = Some(m as i64);
            let back = oper_to_hyp(&pd, &op).and_then(|h| hyp_to_oper(&pd, &h)).map(|c| c.oper.lambdas == op.lambdas);
            t.check(back.unwrap_or(false), || format!("sl{} m={} seed {}: oper -> hyp -> oper", n, m, seed));
        }
    }
    for n in 2..=6usize {
        let Some(pd) = t.result(principal_data(GroupType::new(Family::SL, n - 1)), || format!("sl{}", n)) else { continue };
        for m in 2..=n {
            let r = companion_relation(&pd, m, 2);
            t.check(r.is_ok(), || format!("sl{} m={}: {:?}", n, m, r.err()));
        }
    }
}

/// `(embedding, source rank n, d)` triples of the functoriality sweep.
pub fn functoriality_cases(max_n: usize) -> Vec<(Embedding, usize, i64)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for d in (2..=2 * n as i64).step_by(2) {
            out.push((Embedding::SpToSl, n, d));
            out.push((Embedding::SOOddToSl, n, d));
            if d > n as i64 + 1 {
                out.push((Embedding::SOOddToSOEven, n, d));
            }
        }
    }
    out
}

fn criterion_9(t: &mut Tally) {
    for (e, n, d) in functoriality_cases(4) {
        let tag = || format!("{:?} n={} d={}", e, n, d);
        let Some(src) = t.result(principal_data(e.source(n)), tag) else { continue };
        let Some(tgt) = t.result(principal_data(e.target(n)), tag) else { continue };
        let mut opers = vec![OperCanonical::zero(&src, Some(d))];
        opers.extend((0..5).map(|seed| random_global_oper(&src, d, seed)));
        for op in &opers {
            let Some(cert) = t.result(pushout(&src, &tgt, op, e), tag) else { continue };
            t.check(cert.target == cert.expected, || format!("{}: interleaving mismatch", tag()));
            let s1 = slope_at_infinity(&src, op).map(|r| r.slope);
            let s2 = slope_at_infinity(&tgt, &cert.target).map(|r| r.slope);
            t.check(matches!((&s1, &s2), (Ok(a), Ok(b)) if a == b), || format!("{}: slope changed under pushout", tag()));
        }
    }
}

/// Parity checks on expanded coefficients, literal and derived.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ParityTally {
    pub sp_odd_vanish: (usize, usize),
    pub so_literal: (usize, usize),
    pub so_derived: (usize, usize),
    pub pushout_odd_vanish: (usize, usize),
    pub pushout_constant: (usize, usize),
    pub pushout_mod_z_symmetric: (usize, usize),
}

fn bump(c: &mut (usize, usize), ok: bool) {
    c.1 += 1;
    if ok {
        c.0 += 1;
    }
}

fn random_betas(rng: &mut ChaCha8Rng, k: usize) -> Vec<Q> {
    let mut out = Vec::new();
    for _ in 0..k {
        let b = qf(rng.gen_range(-6..=6), rng.gen_range(1..=4));
        out.push(b.clone());
        out.push(-b);
    }
    out
}

/// Sweep of the hypergeometric symmetry checks.
pub fn parity_sweep(max_n: usize, seeds: u64) -> Result<ParityTally> {
    let mut p = ParityTally::default();
    let zero = || Q::from_integer(0.into());
    for n in 1..=max_n {
        for m in 1..=n {
            for seed in 0..seeds {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 131 + (n * 17 + m) as u64);
                let lambda = qf(rng.gen_range(1..=5), rng.gen_range(1..=3));
                // Sp: type (2n, 2(n-m)).
                let h = HypParams { alpha: vec![zero(); 2 * n], beta: random_betas(&mut rng, n - m), lambda: lambda.clone() }.to_coeffs()?;
                for i in h.m..=h.n {
                    if i % 2 == 1 {
                        bump(&mut p.sp_odd_vanish, h.u_at(i).is_zero());
                    }
                }
                // SO_odd: type (2n+1, 2(n-m)+1) with the extra 1/2.
                let mut beta = random_betas(&mut rng, n - m);
                beta.push(qf(1, 2));
                let h = HypParams { alpha: vec![zero(); 2 * n + 1], beta, lambda }.to_coeffs()?;
                for i in (h.m / 2)..=n {
                    if 2 * i < h.m || 2 * i + 1 > h.n {
                        continue;
                    }
                    let (even, odd) = (h.u_at(2 * i), h.u_at(2 * i + 1));
                    bump(&mut p.so_literal, odd == even.scale(&q(2)));
                    bump(&mut p.so_derived, odd == even.scale(&qf(-1, 2)));
                }
            }
        }
    }
    // Pushout of sp opers with n >= 3 and d in {h, h - 2}, then hypergeometric coordinates.
    for n in 3..=max_n.max(3) {
        let sp = principal_data(GroupType::new(Family::Sp, n))?;
        let sl = principal_data(GroupType::new(Family::SL, 2 * n - 1))?;
        let h_cox = 2 * n as i64;
        for d in [h_cox, h_cox - 2] {
            for seed in 0..seeds {
                let op = random_global_oper(&sp, d, seed);
                let cert = pushout(&sp, &sl, &op, Embedding::SpToSl)?;
                let h = oper_to_hyp(&sl, &cert.target)?;
                bump(&mut p.pushout_odd_vanish, (h.m..=h.n).filter(|i| i % 2 == 1).all(|i| h.u_at(i).is_zero()));
                match hyp_beta_polynomial(&h) {
                    Ok(poly) => {
                        bump(&mut p.pushout_constant, true);
                        bump(&mut p.pushout_mod_z_symmetric, roots_symmetric_about(&poly, &qf(-1, 2)));
                    }
                    Err(_) => bump(&mut p.pushout_constant, false),
                }
            }
        }
    }
    Ok(p)
}

fn criterion_10(t: &mut Tally) {
    let Some(p) = t.result(parity_sweep(4, 10), || "parity sweep".into()) else { return };
    let mut clause = |name: &str, c: (usize, usize), literal: bool| {
        t.checks += c.1;
        let line = format!("{}: {}/{}", name, c.0, c.1);
        if c.0 != c.1 && literal {
            t.failures.push(line.clone());
        }
        t.notes.push(line);
    };
    clause("Sp-symmetric beta: odd u vanish", p.sp_odd_vanish, true);
    clause("SO_odd-symmetric beta: u_(2i+1) = 2 u_(2i)", p.so_literal, true);
    clause("SO_odd-symmetric beta: u_(2i+1) = -1/2 u_(2i) (derived)", p.so_derived, false);
    clause("pushout + oper_to_hyp on sp opers: odd u vanish", p.pushout_odd_vanish, true);
    clause("pushout + oper_to_hyp on sp opers: constant u", p.pushout_constant, false);
    clause("pushout + oper_to_hyp on sp opers: beta symmetric mod Z (about -1/2)", p.pushout_mod_z_symmetric, false);
    let derived_ok = p.so_derived.0 == p.so_derived.1 && p.pushout_constant.0 == p.pushout_constant.1 && p.pushout_mod_z_symmetric.0 == p.pushout_mod_z_symmetric.1;
    if !derived_ok {
        t.failures.push("derived symmetry clauses fail".into());
    }
}

fn slope_groups() -> Vec<GroupType> {
    let mut g: Vec<GroupType> = (1..=4).map(|n| GroupType::new(Family::SL, n)).collect();
    for n in 2..=3 {
        g.push(GroupType::new(Family::Sp, n));
        g.push(GroupType::new(Family::SOOdd, n));
    }
    g.push(GroupType::new(Family::SOEven, 4));
    g
}

fn criterion_11(t: &mut Tally) {
    for g in slope_groups() {
        let tag = || algebra_name(g);
        let Some(pd) = t.result(principal_data(g), tag) else { continue };
        let degrees: BTreeSet<i64> = pd.slots.iter().filter(|s| !s.pfaffian).map(|s| s.degree).collect();
        for &d in &degrees {
            for seed in 0..5 {
                let op = random_global_oper(&pd, d, seed);
                let r = slope_at_infinity(&pd, &op).map(|r| r.slope);
                t.check(matches!(&r, Ok(s) if *s == Q::new(1.into(), d.into())), || format!("{} d={} seed {}: slope {:?}", tag(), d, seed, r));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..5 {
            let lambdas = pd
                .slots
                .iter()
                .map(|s| {
                    let a = qf(rng.gen_range(-4..=4), rng.gen_range(1..=3));
                    LaurentPoly::mono(a, if k % 2 == 0 { -s.degree } else { -1 })
                })
                .collect();
            let op = OperCanonical { group: g, d: None, lambdas };
            let r = slope_at_infinity(&pd, &op).map(|r| r.slope);
            t.check(matches!(&r, Ok(s) if *s == Q::from_integer(0.into())), || format!("{} regular singular {}: slope {:?}", tag(), k, r));
        }
    }
}

fn rho_with_pairings(f: Family, n: usize, pairings: &[Q]) -> Vec<Q> {
    let dim = GroupType::new(f, n).chi_dim();
    let mut rho = vec![Q::from_integer(0.into()); dim];
    if f == Family::SL {
        // rho(T_i) = sum(rho) - (n+1) rho_i with sum(rho) = 0.
        for (i, r) in pairings.iter().enumerate() {
            rho[i] = -r / q(n as i64 + 1);
        }
        let s: Q = rho.iter().sum();
        rho[dim - 1] -= s;
    } else {
        for (i, r) in pairings.iter().enumerate() {
            rho[i] = r.clone();
        }
    }
    rho
}

fn criterion_12(t: &mut Tally) {
    let mut last_group = None;
    let mut weyl = Vec::new();
    for (f, n, m) in admissible_cases(6, true) {
        let tag = || format!("{:?} n={} m={}", f, n, m);
        let Some(ctx) = t.result(StabilizerContext::new(f, n, m, q(1)), tag) else { continue };
        if last_group != Some((f, n)) {
            weyl = ctx.rep.rs.weyl_elements();
            last_group = Some((f, n));
        }
        let s = s_family(&ctx, SFamily::Simplified);
        let dim = ctx.rep.rs.dim();
        let zero = Character::new(CharMode::Multiplicative, vec![Q::from_integer(0.into()); dim]);
        let mut rng = ChaCha8Rng::seed_from_u64((n * 10 + m) as u64);
        let k = n - m;
        let nonint = |rng: &mut ChaCha8Rng| qf(2 * rng.gen_range(-3..=3) + 1, 2 * rng.gen_range(1..=3));
        let good: Vec<Q> = (0..k).map(|_| nonint(&mut rng)).collect();
        let rho = Character::new(CharMode::Multiplicative, rho_with_pairings(f, n, &good));
        let r = general_position_check(&zero, &rho, &s, &weyl);
        t.check(matches!(&r, Ok(rep) if rep.general_position), || format!("{}: non-integral rho rejected", tag()));
        for i in 0..k {
            let mut bad = good.clone();
            bad[i] = q(rng.gen_range(-2..=2));
            let rho = Character::new(CharMode::Multiplicative, rho_with_pairings(f, n, &bad));
            let r = general_position_check(&zero, &rho, &s, &weyl);
            let ok = matches!(&r, Ok(rep) if !rep.general_position && rep.witness.as_ref().is_some_and(|w| w.subtorus == s[i]));
            t.check(ok, || format!("{}: integral rho_{} not caught with witness T_{}", tag(), i + 1, i + 1));
        }
        // Weyl transport of delta leaves the verdict unchanged.
        if k > 0 {
            let delta = Character::new(CharMode::Multiplicative, (0..dim).map(|_| qf(rng.gen_range(0..6), 6)).collect());
            let base = general_position_check(&delta, &rho, &s, &weyl).map(|r| r.general_position);
            for _ in 0..2 {
                let w = &weyl[rng.gen_range(0..weyl.len())];
                let moved = general_position_check(&delta.transport(w), &rho, &s, &weyl).map(|r| r.general_position);
                t.check(matches!((&base, &moved), (Ok(a), Ok(b)) if a == b), || format!("{}: verdict not Weyl invariant", tag()));
            }
        }
    }
}
