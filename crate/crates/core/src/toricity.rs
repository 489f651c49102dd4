//! Orbits of `T_phi` on `U_0 / U_phi`, their stabilizers, the toric certificate and general position.

use crate::error::{Error, Result};
use crate::matrix::{integer_kernel, rank_of, QMat};
use crate::matrixrep::exp_nilpotent;
use crate::ring::{q, Ring, Q};
use crate::rootsys::{Family, SignedPerm};
use crate::stabilizer::{StabilizerContext, WeightKind};
use serde::Serialize;
use std::collections::BTreeSet;

/// Logarithm of a unipotent matrix as a finite sum.
pub fn unipotent_log(u: &QMat) -> Result<QMat> {
    let n = u.rows;
    let x = u.sub(&QMat::identity(n));
    let mut p = QMat::identity(n);
    for _ in 0..n {
        p = p.mul(&x);
    }
    if !p.is_zero() {
        return Err(Error::Domain("logarithm requested for a non-unipotent matrix".into()));
    }
    let mut out = QMat::zeros(n, n);
    let mut pw = x.clone();
    for k in 1..=n {
        if pw.is_zero() {
            break;
        }
        let c = if k % 2 == 1 { q(1) } else { q(-1) } / q(k as i64);
        out = out.add(&pw.scale(&c));
        pw = pw.mul(&x);
    }
    Ok(out)
}

/// `u_A`: ordered product of `exp(E^c)` over the weights in `a`, in the fixed order.
pub fn orbit_representative(ctx: &StabilizerContext, a: &BTreeSet<usize>) -> Result<QMat> {
    let order: Vec<usize> = ctx.bases.uc_weights.iter().copied().filter(|w| a.contains(w)).collect();
    if order.len() != a.len() {
        return Err(Error::Domain("orbit label contains a weight outside u^c".into()));
    }
    orbit_representative_in_order(ctx, &order)
}

/// Product of `exp(E^c)` in an explicit order.
pub fn orbit_representative_in_order(ctx: &StabilizerContext, order: &[usize]) -> Result<QMat> {
    let mut u = QMat::identity(ctx.rep.size);
    for w in order {
        let (_, v) = ctx
            .bases
            .uc_basis
            .iter()
            .find(|(wi, _)| wi == w)
            .ok_or_else(|| Error::Domain(format!("weight {} is not a u^c weight", w)))?;
        u = u.mul(&exp_nilpotent(&v.to_matrix(&ctx.rep))?);
    }
    Ok(u)
}

/// Components of `x in u_0` along each weight space, as `(weight, coefficients on the fiber)`.
fn weight_components(ctx: &StabilizerContext, x: &QMat) -> Result<Vec<Vec<Q>>> {
    let (xi, coeffs) = ctx.rep.decompose(x);
    if xi.iter().any(|c| !c.is_zero()) {
        return Err(Error::Domain("element has a torus component".into()));
    }
    let u0: BTreeSet<_> = ctx.u0_roots().into_iter().collect();
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() && !u0.contains(&ctx.rep.rs.roots[k]) {
            return Err(Error::Domain(format!("element has a component on {} outside u_0", ctx.rep.rs.roots[k])));
        }
    }
    if &ctx.rep.compose(&xi, &coeffs) != x {
        return Err(Error::Domain("element is not in the Lie algebra".into()));
    }
    Ok(ctx
        .weights
        .iter()
        .map(|w| w.fiber.iter().map(|r| coeffs[ctx.rep.rs.root_index(r).unwrap()].clone()).collect())
        .collect())
}

/// Projection of `x in u_0` onto each `u^c` weight line along `u_phi`.
pub fn uc_projection(ctx: &StabilizerContext, x: &QMat) -> Result<Vec<(usize, Q)>> {
    let comps = weight_components(ctx, x)?;
    let mut out = Vec::new();
    for (w, v) in &ctx.bases.uc_basis {
        let c = &comps[*w];
        let val = match ctx.weights[*w].kind {
            WeightKind::I => c[0].clone(),
            _ => {
                // x = alpha (1, b) + beta (1, -b) on the fiber.
                let b = v.terms[1].1.clone().neg();
                (&c[0] - &(&c[1] / &b)) / q(2)
            }
        };
        out.push((*w, val));
    }
    Ok(out)
}

/// Degree of a `T_phi`-weight: the sum of its coefficients on `alpha_1 .. alpha_{n-m}`.
pub fn weight_degree(ctx: &StabilizerContext, w: usize) -> i64 {
    ctx.weights[w].coeffs.iter().sum()
}

/// The unique `X in u^c` with `exp(-X) u in U_phi`, as coordinates on the `u^c` weights.
///
/// Solved degree by degree; each pass fixes the lowest degree where `log(exp(-X) u)` leaves `u_phi`.
pub fn uc_coordinates(ctx: &StabilizerContext, u: &QMat) -> Result<Vec<(usize, Q)>> {
    let mut coords: Vec<(usize, Q)> = ctx.bases.uc_basis.iter().map(|(w, _)| (*w, q(0))).collect();
    let mats: Vec<QMat> = ctx.bases.uc_basis.iter().map(|(_, v)| v.to_matrix(&ctx.rep)).collect();
    let max_deg = ctx.weights.iter().enumerate().map(|(w, _)| weight_degree(ctx, w)).max().unwrap_or(0);
    for _ in 0..=max_deg + 1 {
        let mut x = QMat::zeros(ctx.rep.size, ctx.rep.size);
        for ((_, c), m) in coords.iter().zip(&mats) {
            x = x.add(&m.scale(c));
        }
        let rest = x.neg().exp_nilpotent().mul(u);
        let p = uc_projection(ctx, &unipotent_log(&rest)?)?;
        let low = p.iter().filter(|(_, c)| !c.is_zero()).map(|(w, _)| weight_degree(ctx, *w)).min();
        let Some(low) = low else { return Ok(coords) };
        for ((w, c), (w2, pc)) in coords.iter_mut().zip(&p) {
            debug_assert_eq!(w, w2);
            if weight_degree(ctx, *w) == low {
                *c += pc;
            }
        }
    }
    Err(Error::Internal("u^c coordinates did not stabilize".into()))
}

/// Set of `u^c` weights with a nonzero coordinate in the decomposition `u = exp(X) v`.
pub fn weight_support(ctx: &StabilizerContext, u: &QMat) -> Result<BTreeSet<usize>> {
    Ok(uc_coordinates(ctx, u)?.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, _)| w).collect())
}

/// The torus point `diag(base^<w_a, xi>)` for an integral cocharacter `xi`.
pub fn torus_point(ctx: &StabilizerContext, xi: &[i64], base: i64) -> QMat {
    let mut t = QMat::zeros(ctx.rep.size, ctx.rep.size);
    for (a, w) in ctx.rep.weights.iter().enumerate() {
        let e: i64 = w.0.iter().zip(xi).map(|(x, y)| x * y).sum();
        let v = if e >= 0 { q(base.pow(e as u32)) } else { q(1) / q(base.pow((-e) as u32)) };
        t.set(a, a, v);
    }
    t
}

/// Whether `x in u_0` lies in `u_phi`.
pub fn in_uphi(ctx: &StabilizerContext, x: &QMat) -> Result<bool> {
    Ok(uc_projection(ctx, x)?.iter().all(|(_, c)| c.is_zero()))
}

/// Whether `u1 U_phi = u2 U_phi`.
pub fn same_uphi_coset(ctx: &StabilizerContext, u1: &QMat, u2: &QMat) -> Result<bool> {
    let inv = u1.inverse().ok_or_else(|| Error::Domain("singular group element".into()))?;
    let x = unipotent_log(&inv.mul(u2))?;
    in_uphi(ctx, &x)
}

/// Stabilizer of an orbit at the Lie level.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizerReport {
    pub orbit: Vec<usize>,
    pub stab_lie_dim: usize,
    /// Z-basis of the cocharacter lattice of the identity component.
    pub stab_basis: Vec<Vec<i64>>,
}

fn tphi_rows(ctx: &StabilizerContext) -> Vec<Vec<i64>> {
    let dim = ctx.rep.rs.dim();
    let mut rows: Vec<Vec<i64>> = ctx.grading.levi.delta_m.iter().map(|a| a.0.clone()).collect();
    if ctx.family() == Family::SL {
        rows.push(vec![1; dim]);
    }
    rows
}

/// Kernel of the weights in `a` on `Lie(T_phi)`, with a saturated lattice basis.
pub fn orbit_stabilizer(ctx: &StabilizerContext, a: &BTreeSet<usize>) -> StabilizerReport {
    let dim = ctx.rep.rs.dim();
    let mut rows = tphi_rows(ctx);
    for w in a {
        rows.push(ctx.weights[*w].fiber[0].0.clone());
    }
    let basis = integer_kernel(&rows, dim);
    StabilizerReport { orbit: a.iter().copied().collect(), stab_lie_dim: basis.len(), stab_basis: basis }
}

/// `Lie(T_gamma)`: kernel of the other `u^c` weights.
pub fn t_gamma(ctx: &StabilizerContext, w: usize) -> Vec<Vec<i64>> {
    let others: BTreeSet<usize> = ctx.bases.uc_weights.iter().copied().filter(|x| *x != w).collect();
    orbit_stabilizer(ctx, &others).stab_basis
}

/// Rational span inclusion `small ⊆ big`.
pub fn span_contains(big: &[Vec<i64>], small: &[Vec<i64>], dim: usize) -> bool {
    let to_q = |v: &Vec<i64>| v.iter().map(|x| q(*x)).collect::<Vec<Q>>();
    let b: Vec<Vec<Q>> = big.iter().map(to_q).collect();
    let mut j = b.clone();
    j.extend(small.iter().map(to_q));
    rank_of(&j, dim) == rank_of(&b, dim)
}

/// Cocharacter basis of `Lie(Z_G) ∩ Lie(T_phi)`.
pub fn center_in_tphi(ctx: &StabilizerContext) -> Vec<Vec<i64>> {
    if ctx.family() == Family::GL {
        vec![vec![1; ctx.rep.rs.dim()]]
    } else {
        vec![]
    }
}

/// Closed-form line `T_i` attached to the `i`-th coordinate (1-based).
pub fn t_i_closed_form(family: Family, n: usize, i: usize) -> Vec<i64> {
    let dim = if family.is_type_a() { n + 1 } else { n };
    let mut v = vec![0; dim];
    if family == Family::SL {
        v = vec![1; dim];
        v[i - 1] = -(n as i64);
    } else {
        v[i - 1] = 1;
    }
    v
}

/// One clause of a certificate.
#[derive(Clone, Debug, Serialize)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Certificate of the toric property.
#[derive(Clone, Debug, Serialize)]
pub struct ToricCertificate {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub d: i64,
    pub clauses: Vec<Clause>,
}

impl ToricCertificate {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

/// All subsets of the `u^c` weights.
pub fn orbit_labels(ctx: &StabilizerContext) -> Vec<BTreeSet<usize>> {
    let uc = &ctx.bases.uc_weights;
    (0u64..(1u64 << uc.len()))
        .map(|mask| uc.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, w)| *w).collect())
        .collect()
}

/// Dimension of the center of the group.
pub fn dim_center(f: Family) -> usize {
    if f == Family::GL {
        1
    } else {
        0
    }
}

/// Check orbit count, open-orbit stabilizer, the numerical identity and the dimension bookkeeping.
pub fn toric_check(ctx: &StabilizerContext) -> Result<ToricCertificate> {
    let dim = ctx.rep.rs.dim();
    let k = ctx.bases.uc_weights.len();
    let mut clauses = Vec::new();

    // (a) labels give pairwise distinct cosets, detected by the weight support.
    let labels = orbit_labels(ctx);
    let mut supports = BTreeSet::new();
    let mut support_ok = true;
    for a in &labels {
        let u = orbit_representative(ctx, a)?;
        let s = weight_support(ctx, &u)?;
        support_ok &= &s == a;
        supports.insert(s.into_iter().collect::<Vec<_>>());
    }
    let expected = 1usize << (ctx.n() - ctx.m());
    clauses.push(Clause {
        name: "orbit count".into(),
        pass: support_ok && supports.len() == expected,
        detail: format!("{} distinct orbit invariants, expected 2^(n-m) = {}", supports.len(), expected),
    });

    // (b) open orbit stabilizer equals Lie(Z_{G,phi}).
    let full: BTreeSet<usize> = ctx.bases.uc_weights.iter().copied().collect();
    let st = orbit_stabilizer(ctx, &full);
    let z = center_in_tphi(ctx);
    let b_ok = st.stab_lie_dim == ctx.tphi.z_g_phi_dim && span_contains(&st.stab_basis, &z, dim) && span_contains(&z, &st.stab_basis, dim);
    clauses.push(Clause {
        name: "open orbit stabilizer".into(),
        pass: b_ok,
        detail: format!("stabilizer dimension {}, dim Lie(Z_G,phi) = {}", st.stab_lie_dim, ctx.tphi.z_g_phi_dim),
    });

    // (c) dim T_phi = dim u^c + dim Z_G.
    let zg = dim_center(ctx.family());
    clauses.push(Clause {
        name: "numerical requirement".into(),
        pass: ctx.tphi.dim == k + zg,
        detail: format!("dim T_phi = {}, dim u^c = {}, dim Z_G = {}", ctx.tphi.dim, k, zg),
    });

    // (d) dimension bookkeeping.
    let npos = ctx.rep.rs.positive_roots.len() as i64;
    let r = ctx.rep.cartan_cochars().len() as i64;
    let dim_g = ctx.rep.lie_dim() as i64;
    let hny = -dim_g + npos + (npos + r);
    let dim_u0 = ctx.u0_roots().len() as i64;
    let dim_uphi = ctx.bases.uphi_basis.len() as i64;
    let rel = ctx.tphi.dim as i64 + dim_uphi - zg as i64 - dim_u0;
    clauses.push(Clause {
        name: "dim Bun = 0".into(),
        pass: hny == 0 && rel == 0,
        detail: format!("reference term {}, relative term dim T_phi + dim U_phi - dim Z_G - dim U_0 = {}", hny, rel),
    });

    Ok(ToricCertificate { family: ctx.family(), n: ctx.n(), m: ctx.m(), d: ctx.d(), clauses })
}

/// Additive characters compare in `Q`; multiplicative ones in `Q/Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CharMode {
    Additive,
    Multiplicative,
}

/// A character of the torus in the character coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct Character {
    pub mode: CharMode,
    #[serde(with = "crate::ring::qser::vec")]
    pub values: Vec<Q>,
}

fn frac(x: &Q) -> Q {
    x - Q::from_integer(x.floor().to_integer())
}

impl Character {
    pub fn new(mode: CharMode, values: Vec<Q>) -> Self {
        let values = match mode {
            CharMode::Additive => values,
            CharMode::Multiplicative => values.iter().map(frac).collect(),
        };
        Character { mode, values }
    }

    /// Restriction to a subtorus given by a lattice basis.
    pub fn restrict(&self, basis: &[Vec<i64>]) -> Vec<Q> {
        basis
            .iter()
            .map(|xi| {
                let v = xi.iter().zip(&self.values).fold(q(0), |acc, (a, b)| acc + b * q(*a));
                match self.mode {
                    CharMode::Additive => v,
                    CharMode::Multiplicative => frac(&v),
                }
            })
            .collect()
    }

    /// Weyl transport.
    pub fn transport(&self, w: &SignedPerm) -> Character {
        Character::new(self.mode, w.apply_q(&self.values))
    }
}

/// Which family of subtori to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SFamily {
    /// Identity components of all orbit stabilizers.
    Stabilizers,
    /// The lines `T_i`, `i <= n - m`.
    Simplified,
}

/// A witness `(S, w)` of failure.
#[derive(Clone, Debug, Serialize)]
pub struct GpWitness {
    pub subtorus: Vec<Vec<i64>>,
    pub weyl: SignedPerm,
}

/// Result of the general position check.
#[derive(Clone, Debug, Serialize)]
pub struct GpReport {
    pub general_position: bool,
    pub subtori_checked: usize,
    pub weyl_order: usize,
    pub witness: Option<GpWitness>,
}

/// The family of subtori.
pub fn s_family(ctx: &StabilizerContext, which: SFamily) -> Vec<Vec<Vec<i64>>> {
    match which {
        SFamily::Stabilizers => {
            let mut out: Vec<Vec<Vec<i64>>> = Vec::new();
            for a in orbit_labels(ctx) {
                let s = orbit_stabilizer(ctx, &a).stab_basis;
                if !s.is_empty() && !out.contains(&s) {
                    out.push(s);
                }
            }
            out
        }
        SFamily::Simplified => (1..=ctx.n() - ctx.m()).map(|i| vec![t_i_closed_form(ctx.family(), ctx.n(), i)]).collect(),
    }
}

/// `rho|_S != delta^w|_S` for all `S` and `w`.
pub fn general_position_check(delta: &Character, rho: &Character, s: &[Vec<Vec<i64>>], weyl: &[SignedPerm]) -> Result<GpReport> {
    if delta.mode != rho.mode {
        return Err(Error::Domain("characters given in different modes".into()));
    }
    if delta.values.len() != rho.values.len() {
        return Err(Error::Domain("characters of different length".into()));
    }
    for sub in s {
        let r = rho.restrict(sub);
        for w in weyl {
            if delta.transport(w).restrict(sub) == r {
                return Ok(GpReport {
                    general_position: false,
                    subtori_checked: s.len(),
                    weyl_order: weyl.len(),
                    witness: Some(GpWitness { subtorus: sub.clone(), weyl: w.clone() }),
                });
            }
        }
    }
    Ok(GpReport { general_position: true, subtori_checked: s.len(), weyl_order: weyl.len(), witness: None })
}

/// Check that every `T_gamma` line matches its closed form (up to the center for GL).
pub fn t_gamma_closed_forms(ctx: &StabilizerContext) -> bool {
    let dim = ctx.rep.rs.dim();
    let z = center_in_tphi(ctx);
    ctx.bases.uc_weights.iter().all(|w| {
        let line = t_gamma(ctx, *w);
        let i = ctx.representative(*w).support().into_iter().next().unwrap() + 1;
        let mut expect = vec![t_i_closed_form(ctx.family(), ctx.n(), i)];
        expect.extend(z.iter().cloned());
        line.len() == expect.len() && span_contains(&line, &expect, dim)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates_small() {
        for (f, n, m) in [(Family::SOOdd, 3, 2), (Family::GL, 4, 1), (Family::Sp, 3, 3), (Family::SL, 3, 1)] {
            let ctx = StabilizerContext::new(f, n, m, q(1)).unwrap();
            let c = toric_check(&ctx).unwrap();
            assert!(c.all_pass(), "{:?}", c);
        }
    }

    #[test]
    fn stabilizer_examples() {
        let ctx = StabilizerContext::new(Family::Sp, 3, 2, q(1)).unwrap();
        let full: BTreeSet<usize> = ctx.bases.uc_weights.iter().copied().collect();
        assert_eq!(orbit_stabilizer(&ctx, &full).stab_lie_dim, 0);
        let ctx = StabilizerContext::new(Family::GL, 3, 2, q(1)).unwrap();
        let full: BTreeSet<usize> = ctx.bases.uc_weights.iter().copied().collect();
        assert_eq!(orbit_stabilizer(&ctx, &full).stab_lie_dim, 1);
        assert_eq!(orbit_stabilizer(&ctx, &BTreeSet::new()).stab_lie_dim, ctx.tphi.dim);
    }

    #[test]
    fn empty_and_single_representatives() {
        let ctx = StabilizerContext::new(Family::SOOdd, 4, 2, q(1)).unwrap();
        assert_eq!(orbit_representative(&ctx, &BTreeSet::new()).unwrap(), QMat::identity(ctx.rep.size));
        let w = ctx.bases.uc_weights[0];
        let u = orbit_representative(&ctx, &BTreeSet::from([w])).unwrap();
        let e = ctx.bases.uc_basis.iter().find(|(x, _)| *x == w).unwrap().1.to_matrix(&ctx.rep);
        assert_eq!(u, e.exp_nilpotent());
        assert!(ctx.rep.in_group(&u));
    }

    #[test]
    fn general_position_examples() {
        let ctx = StabilizerContext::new(Family::SOOdd, 3, 1, q(1)).unwrap();
        let weyl = ctx.rep.rs.weyl_elements();
        let s = s_family(&ctx, SFamily::Simplified);
        let zero = Character::new(CharMode::Multiplicative, vec![q(0); 3]);
        let half = Character::new(CharMode::Multiplicative, vec![crate::ring::qf(1, 2); 3]);
        assert!(general_position_check(&zero, &half, &s, &weyl).unwrap().general_position);
        let bad = Character::new(CharMode::Multiplicative, vec![crate::ring::qf(1, 2), q(1), crate::ring::qf(1, 2)]);
        let r = general_position_check(&zero, &bad, &s, &weyl).unwrap();
        assert!(!r.general_position);
        assert_eq!(r.witness.unwrap().subtorus, vec![vec![0, 1, 0]]);
        let add = Character::new(CharMode::Additive, vec![q(0); 3]);
        assert!(general_position_check(&add, &half, &s, &weyl).is_err());
    }
}
