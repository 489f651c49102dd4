//! Opers on the dual side.
//!
//! Connections are matrices of Laurent polynomials in the standard representation of a
//! classical Lie algebra. An oper in canonical form is
//! `d/dt + t^{-1} p_{-1} + sum_i lambda_i(t) p_i` along the graded basis `p_i` of
//! `ker(ad p_1)`. The reduction to canonical form is the unipotent gauge that kills the
//! image of `ad p_{-1}` height by height.

use crate::error::{Error, Result};
use crate::hitchin::{pfaffian, random_q, LaurentRepr};
use crate::laurent::LaurentPoly;
use crate::matrix::{trace_form, Mat, QMat};
use crate::matrixrep::MatrixRep;
use crate::ring::{q, MPoly, Ring, Q};
use crate::rootsys::{coxeter_and_degrees, Family, GroupType};
use crate::hitchin::hitchin_degrees;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Laurent polynomials with rational coefficients.
pub type LQ = LaurentPoly<Q>;

/// Sign in `p_i = SIGMA * p_1^{d_i - 1}`; chosen so that the companion constants are positive.
pub const SIGMA: i64 = -1;

/// Derivation acting on the coefficients of a connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Deriv {
    /// `d/dt` in the chart variable.
    Plain,
    /// `t d/dt`.
    Euler,
}

impl Deriv {
    fn apply<C: Ring>(self, f: &LaurentPoly<C>) -> LaurentPoly<C> {
        match self {
            Deriv::Plain => f.deriv(),
            Deriv::Euler => f.theta(),
        }
    }
}

/// The operator `D + A` on the trivial bundle of the standard representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<C: Ring> {
    pub group: GroupType,
    pub deriv: Deriv,
    pub matrix: Mat<LaurentPoly<C>>,
}

/// One line `V_{d_i}` of the oper space.
#[derive(Clone, Debug)]
pub struct Slot {
    pub degree: i64,
    /// The extra degree `n` line of `so_2n`.
    pub pfaffian: bool,
    pub p: QMat,
}

/// Per-height tables of the canonical-form reduction.
#[derive(Clone, Debug)]
struct Level {
    probes: Vec<(usize, usize)>,
    probe_inv: QMat,
    gauge: Vec<QMat>,
    slots: Vec<usize>,
    split_inv: QMat,
}

impl Level {
    fn coords<R: Ring>(&self, a: &Mat<R>) -> Vec<R> {
        let e: Vec<&R> = self.probes.iter().map(|&(i, j)| a.get(i, j)).collect();
        apply_q(&self.probe_inv, &e)
    }

    fn split<R: Ring>(&self, c: &[R]) -> Vec<R> {
        let refs: Vec<&R> = c.iter().collect();
        apply_q(&self.split_inv, &refs)
    }
}

fn apply_q<R: Ring>(m: &QMat, v: &[&R]) -> Vec<R> {
    (0..m.rows)
        .map(|i| {
            let mut acc = R::zero();
            for (j, x) in v.iter().enumerate() {
                let c = m.get(i, j);
                if !num_traits::Zero::is_zero(c) && !x.is_exact_zero() {
                    acc = acc.add(&x.scale(c));
                }
            }
            acc
        })
        .collect()
}

/// Principal `sl_2` data, the graded basis `p_i` and the reduction tables of a classical algebra.
#[derive(Clone, Debug)]
pub struct PrincipalData {
    pub rep: MatrixRep,
    pub p_minus1: QMat,
    pub two_rho_check: QMat,
    pub p_plus1: QMat,
    /// Sorted by degree, the Pfaffian line last among equal degrees.
    pub slots: Vec<Slot>,
    /// Companion constants `c_i` for `sl_N`, one per slot.
    pub c_consts: Option<Vec<Q>>,
    pub coxeter: i64,
    heights: Vec<Vec<i64>>,
    levels: Vec<Level>,
}

/// Display name of the matrix algebra, e.g. `sl4`, `sp6`, `so7`.
pub fn algebra_name(g: GroupType) -> String {
    let s = g.matrix_size();
    match g.family {
        Family::GL => format!("gl{}", s),
        Family::SL => format!("sl{}", s),
        Family::Sp => format!("sp{}", s),
        Family::SOOdd | Family::SOEven => format!("so{}", s),
    }
}

fn vec_of(m: &QMat) -> Vec<Q> {
    m.data.clone()
}

fn first_nonzero_entry(m: &QMat) -> Option<Q> {
    m.data.iter().find(|x| !num_traits::Zero::is_zero(*x)).cloned()
}

fn probe_system(basis: &[QMat]) -> Result<(Vec<(usize, usize)>, QMat)> {
    let size = basis[0].rows;
    let rows: Vec<Vec<Q>> = basis.iter().map(vec_of).collect();
    let (_, piv) = QMat::from_rows(size * size, &rows).rref();
    if piv.len() != basis.len() {
        return Err(Error::Internal("dependent basis in a graded piece".into()));
    }
    let p = Mat::from_fn(piv.len(), piv.len(), |i, j| basis[j].data[piv[i]].clone());
    let inv = p.inverse().ok_or_else(|| Error::Internal("singular probe system".into()))?;
    Ok((piv.iter().map(|&k| (k / size, k % size)).collect(), inv))
}

fn lift<C: Ring>(m: &QMat) -> Mat<LaurentPoly<C>> {
    m.map(|x| LaurentPoly::<C>::from_q(x))
}

/// `sum_k coeffs[k] * basis[k]`.
fn combine<C: Ring>(basis: &[QMat], coeffs: &[LaurentPoly<C>]) -> Mat<LaurentPoly<C>> {
    let size = basis.first().map(|b| b.rows).unwrap_or(0);
    let mut out = Mat::<LaurentPoly<C>>::zeros(size, size);
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_exact_zero() {
            continue;
        }
        for (k, x) in b.data.iter().enumerate() {
            if !num_traits::Zero::is_zero(x) {
                out.data[k] = out.data[k].add(&c.scale(x));
            }
        }
    }
    out
}

fn pow(m: &QMat, k: i64) -> QMat {
    let mut out = QMat::identity(m.rows);
    for _ in 0..k {
        out = out.mul(m);
    }
    out
}

/// Build the principal data of a classical algebra.
pub fn principal_data(g: GroupType) -> Result<PrincipalData> {
    if g.family == Family::GL {
        return Err(Error::Unsupported("opers are defined for the simple algebras sl, so, sp; not gl".into()));
    }
    let rep = MatrixRep::new(g)?;
    let rs = rep.rs.clone();
    let size = rep.size;
    let mut p_minus1 = QMat::zeros(size, size);
    for a in &rs.simple_roots {
        p_minus1 = p_minus1.add(rep.e(&a.neg()));
    }
    let two_rho: Vec<Q> = rs.rho_check.iter().map(|x| x * q(2)).collect();
    let two_rho_check = rep.torus(&two_rho);
    let cols: Vec<Vec<Q>> = rs.simple_roots.iter().map(|a| vec_of(&rep.e(a).bracket(&p_minus1))).collect();
    let sol = QMat::from_columns(size * size, &cols)
        .solve(&vec_of(&two_rho_check))
        .ok_or_else(|| Error::Internal("no p_1 with [p_1, p_-1] = 2 rho_check".into()))?;
    let mut p_plus1 = QMat::zeros(size, size);
    for (c, a) in sol.iter().zip(&rs.simple_roots) {
        p_plus1 = p_plus1.add(&rep.e(a).scale(c));
    }
    if p_plus1.bracket(&p_minus1) != two_rho_check
        || two_rho_check.bracket(&p_plus1) != p_plus1.scale(&q(2))
        || two_rho_check.bracket(&p_minus1) != p_minus1.scale(&q(-2))
    {
        return Err(Error::Internal("principal sl2 relations fail".into()));
    }

    let heights: Vec<Vec<i64>> = (0..size)
        .map(|a| (0..size).map(|b| rs.height_unchecked(&rep.weights[a].sub(&rep.weights[b]))).collect())
        .collect();
    let (coxeter, _) = coxeter_and_degrees(g);
    let by_height = |k: i64| -> Vec<QMat> {
        rs.positive_roots.iter().filter(|r| rs.height_unchecked(r) == k).map(|r| rep.e(r).clone()).collect()
    };

    // Graded kernel of ad p_1 and the normalized basis.
    let (degs, pf) = hitchin_degrees(g);
    let mut wanted: Vec<(i64, bool)> = degs.iter().map(|&k| (k, false)).collect();
    if let Some(k) = pf {
        wanted.push((k, true));
    }
    wanted.sort();
    let mut slots = Vec::new();
    for &(deg, is_pf) in &wanted {
        let k = deg - 1;
        let basis = by_height(k);
        let cols: Vec<Vec<Q>> = basis.iter().map(|e| vec_of(&p_plus1.bracket(e))).collect();
        let null = QMat::from_columns(size * size, &cols).nullspace();
        let kernel: Vec<QMat> = null
            .iter()
            .map(|v| {
                let mut m = QMat::zeros(size, size);
                for (c, e) in v.iter().zip(&basis) {
                    m = m.add(&e.scale(c));
                }
                m
            })
            .collect();
        let mult = wanted.iter().filter(|w| w.0 == deg).count();
        if kernel.len() != mult {
            return Err(Error::Internal(format!("ker ad p_1 in height {} has dimension {}, expected {}", k, kernel.len(), mult)));
        }
        let p = if !is_pf {
            let p = pow(&p_plus1, k).scale(&q(SIGMA));
            if !rep.in_lie(&p) || !p_plus1.bracket(&p).is_zero() || p.is_zero() {
                return Err(Error::Internal(format!("p_1^{} is not a kernel vector", k)));
            }
            p
        } else {
            let p = if kernel.len() == 1 {
                kernel[0].clone()
            } else {
                let pm = pow(&p_minus1, k);
                let (a, b) = (trace_form(&kernel[1], &pm), -trace_form(&kernel[0], &pm));
                kernel[0].scale(&a).add(&kernel[1].scale(&b))
            };
            let lead = first_nonzero_entry(&p).ok_or_else(|| Error::Internal("zero Pfaffian line".into()))?;
            p.scale(&(q(1) / lead))
        };
        slots.push(Slot { degree: deg, pfaffian: is_pf, p });
    }

    let mut levels = Vec::new();
    for k in 0..coxeter {
        let basis: Vec<QMat> = if k == 0 { rep.cartan_cochars().iter().map(|xi| rep.torus(xi)).collect() } else { by_height(k) };
        let (probes, probe_inv) = probe_system(&basis)?;
        let gauge = by_height(k + 1);
        let slot_idx: Vec<usize> = (0..slots.len()).filter(|&s| slots[s].degree - 1 == k).collect();
        let mut cols: Vec<Vec<Q>> = Vec::new();
        let coords_q = |m: &QMat| -> Vec<Q> {
            let e: Vec<&Q> = probes.iter().map(|&(i, j)| m.get(i, j)).collect();
            apply_q(&probe_inv, &e)
        };
        for e in &gauge {
            cols.push(coords_q(&p_minus1.bracket(e)));
        }
        for &s in &slot_idx {
            cols.push(coords_q(&slots[s].p));
        }
        if cols.len() != basis.len() {
            return Err(Error::Internal(format!("height {}: {} gauge + slot directions for a {}-dimensional piece", k, cols.len(), basis.len())));
        }
        let split_inv = QMat::from_columns(basis.len(), &cols)
            .inverse()
            .ok_or_else(|| Error::Internal(format!("height {}: image of ad p_-1 meets ker ad p_1", k)))?;
        levels.push(Level { probes, probe_inv, gauge, slots: slot_idx, split_inv });
    }

    let mut pd = PrincipalData { rep, p_minus1, two_rho_check, p_plus1, slots, c_consts: None, coxeter, heights, levels };
    if g.family == Family::SL {
        let mut cs = Vec::new();
        for s in 0..pd.slots.len() {
            let deg = pd.slots[s].degree;
            let u: Vec<LQ> = (2..=size as i64).map(|i| if i == deg { LQ::one() } else { LQ::zero() }).collect();
            let a = pd.companion_matrix(2, &u)?;
            let v = pd.ds_reduce(&a, Deriv::Euler)?;
            let lam = v[s].coeff(1);
            if num_traits::Zero::is_zero(&lam) || v.iter().enumerate().any(|(j, x)| j < s && !x.is_zero()) {
                return Err(Error::Internal(format!("companion slot {} does not reduce triangularly", deg)));
            }
            let c = q(1) / lam;
            if c <= Q::zero() {
                return Err(Error::Internal(format!("companion constant c_{} = {} is not positive", deg, c)));
            }
            cs.push(c);
        }
        pd.c_consts = Some(cs);
    }
    Ok(pd)
}

impl PrincipalData {
    pub fn group(&self) -> GroupType {
        self.rep.group()
    }

    pub fn size(&self) -> usize {
        self.rep.size
    }

    /// Height `<w_a - w_b, rho_check>` of the matrix entry `(a, b)`.
    pub fn entry_height(&self, a: usize, b: usize) -> i64 {
        self.heights[a][b]
    }

    /// Slot index of a non-Pfaffian degree.
    pub fn slot_of_degree(&self, deg: i64) -> Option<usize> {
        self.slots.iter().position(|s| s.degree == deg && !s.pfaffian)
    }

    /// Check `A - p_{-1}` lies in the Borel subalgebra.
    pub fn check_oper_shape<C: Ring>(&self, a: &Mat<LaurentPoly<C>>) -> Result<()> {
        let n = self.size();
        if a.rows != n || a.cols != n {
            return Err(Error::Domain(format!("expected a {0}x{0} connection matrix", n)));
        }
        for i in 0..n {
            for j in 0..n {
                let h = self.heights[i][j];
                let e = a.get(i, j);
                if h < -1 && !e.is_zero() {
                    return Err(Error::Domain(format!("entry ({}, {}) of height {} is nonzero; not in oper shape", i, j, h)));
                }
                if h == -1 && *e != LaurentPoly::from_q(self.p_minus1.get(i, j)) {
                    return Err(Error::Domain(format!("height -1 entry ({}, {}) differs from p_-1; not in oper shape", i, j)));
                }
            }
        }
        if !self.rep.in_lie(&a.sub(&lift(&self.p_minus1))) {
            return Err(Error::Domain(format!("connection matrix is not in {}", algebra_name(self.group()))));
        }
        Ok(())
    }

    /// Reduce `D + p_{-1} + B` with `B` Borel-valued to `D + p_{-1} + sum v_i p_i`; returns the `v_i`.
    pub fn ds_reduce<C: Ring>(&self, a0: &Mat<LaurentPoly<C>>, deriv: Deriv) -> Result<Vec<LaurentPoly<C>>> {
        self.check_oper_shape(a0)?;
        let mut a = a0.clone();
        for lvl in &self.levels {
            if lvl.gauge.is_empty() {
                continue;
            }
            let xv = lvl.split(&lvl.coords(&a));
            let x = combine(&lvl.gauge, &xv[..lvl.gauge.len()]);
            if x.data.iter().all(|e| e.is_exact_zero()) {
                continue;
            }
            a = gauge_by_exp(&a, &x, deriv);
        }
        let mut out = vec![LaurentPoly::<C>::zero(); self.slots.len()];
        let mut recon = lift::<C>(&self.p_minus1);
        for lvl in &self.levels {
            let xv = lvl.split(&lvl.coords(&a));
            if xv[..lvl.gauge.len()].iter().any(|x| !x.is_zero()) {
                return Err(Error::Internal("reduction left an image component".into()));
            }
            for (j, &s) in lvl.slots.iter().enumerate() {
                out[s] = xv[lvl.gauge.len() + j].clone();
                recon = recon.add(&lift::<C>(&self.slots[s].p).scale_r(&out[s]));
            }
        }
        if recon != a {
            return Err(Error::Internal("reduced connection has components outside the canonical slice".into()));
        }
        Ok(out)
    }

    /// Euler-form companion matrix `p_{-1} - t sum_i u_i(t) E_{N-i+1, N}` of
    /// `delta^N + t (u_m delta^{N-m} + ... + u_N)`; `u[k]` is `u_{m+k}`.
    pub fn companion_matrix<C: Ring>(&self, m: usize, u: &[LaurentPoly<C>]) -> Result<Mat<LaurentPoly<C>>> {
        let n = self.size();
        if self.group().family != Family::SL {
            return Err(Error::Domain(format!("companion form needs sl_N, got {}", algebra_name(self.group()))));
        }
        if m < 2 || m > n || u.len() != n + 1 - m {
            return Err(Error::Domain(format!("companion of sl{} needs 2 <= m <= {} and {} coefficients", n, n, n + 1 - m.max(2))));
        }
        let mut a = lift::<C>(&self.p_minus1);
        for (k, ui) in u.iter().enumerate() {
            let i = m + k;
            a.set(n - i, n - 1, ui.shift(1).neg());
        }
        Ok(a)
    }
}

fn gauge_by_exp<C: Ring>(a: &Mat<LaurentPoly<C>>, x: &Mat<LaurentPoly<C>>, deriv: Deriv) -> Mat<LaurentPoly<C>> {
    let g = x.exp_nilpotent();
    let gi = x.neg().exp_nilpotent();
    let dg = g.map(|f| deriv.apply(f));
    g.mul(a).mul(&gi).sub(&dg.mul(&gi))
}

/// Inverse of a matrix over `Q[t, t^-1]`; the determinant must be a monomial.
pub fn invert_laurent(g: &Mat<LQ>) -> Result<Mat<LQ>> {
    let n = g.rows;
    let c = g.char_coeffs();
    let det = &c[n];
    let mut it = det.terms();
    let (e, a) = match (it.next(), it.next()) {
        (Some((e, a)), None) => (*e, a.clone()),
        _ => return Err(Error::Domain("gauge matrix is not invertible over Q[t, 1/t]".into())),
    };
    let det_inv = LQ::mono(q(1) / a, -e);
    // det(lambda - g) = sum_k (-1)^k c_k lambda^(n-k); Cayley-Hamilton.
    let mut acc = Mat::<LQ>::zeros(n, n);
    let mut pw = Mat::<LQ>::identity(n);
    for k in (0..n).rev() {
        let coef = if k % 2 == 0 { c[k].clone() } else { c[k].neg() };
        acc = acc.add(&pw.scale_r(&coef));
        pw = pw.mul(g);
    }
    let sign = if n % 2 == 0 { q(-1) } else { q(1) };
    let inv = acc.scale_r(&det_inv).scale(&sign);
    if g.mul(&inv) != Mat::identity(n) {
        return Err(Error::Internal("Cayley-Hamilton inverse failed".into()));
    }
    Ok(inv)
}

/// `A -> g A g^-1 - D(g) g^-1`.
pub fn gauge(conn: &Connection<Q>, g: &Mat<LQ>) -> Result<Connection<Q>> {
    let gi = invert_laurent(g)?;
    let dg = g.map(|f| conn.deriv.apply(f));
    Ok(Connection { group: conn.group, deriv: conn.deriv, matrix: g.mul(&conn.matrix).mul(&gi).sub(&dg.mul(&gi)) })
}

/// Gauge by `exp(X)` for a nilpotent `X`.
pub fn gauge_unipotent<C: Ring>(conn: &Connection<C>, x: &Mat<LaurentPoly<C>>) -> Connection<C> {
    Connection { group: conn.group, deriv: conn.deriv, matrix: gauge_by_exp(&conn.matrix, x, conn.deriv) }
}

/// Gauge by `t^{k rho_check}`; entries of height `h` pick up `t^{k h}`.
pub fn gauge_rho_power<C: Ring>(pd: &PrincipalData, conn: &Connection<C>, k: i64) -> Connection<C> {
    let n = pd.size();
    let rho = pd.rep.torus(&pd.rep.rs.rho_check);
    let mut m = Mat::from_fn(n, n, |a, b| conn.matrix.get(a, b).shift(k * pd.heights[a][b]));
    let shift = match conn.deriv {
        Deriv::Plain => -1,
        Deriv::Euler => 0,
    };
    for a in 0..n {
        let v = m.get(a, a).sub(&LaurentPoly::mono(C::from_q(&(rho.get(a, a) * q(k))), shift));
        m.set(a, a, v);
    }
    Connection { group: conn.group, deriv: conn.deriv, matrix: m }
}

/// The constant adjoint torus element acting by `(-1)^height`.
pub fn sign_twist<C: Ring>(pd: &PrincipalData, conn: &Connection<C>) -> Connection<C> {
    let n = pd.size();
    let m = Mat::from_fn(n, n, |a, b| {
        let e = conn.matrix.get(a, b);
        if pd.heights[a][b].rem_euclid(2) == 1 {
            e.neg()
        } else {
            e.clone()
        }
    });
    Connection { group: conn.group, deriv: conn.deriv, matrix: m }
}

/// Change of chart `s = 1/t`: `d/dt + A(t)` becomes `d/ds - s^-2 A(1/s)`.
pub fn to_infinity_chart<C: Ring>(conn: &Connection<C>) -> Result<Connection<C>> {
    if conn.deriv != Deriv::Plain {
        return Err(Error::Domain("chart change expects a d/dt connection".into()));
    }
    Ok(Connection { group: conn.group, deriv: Deriv::Plain, matrix: conn.matrix.map(|f| f.invert_var().shift(-2).neg()) })
}

/// An oper in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct OperCanonical {
    pub group: GroupType,
    /// The `d` of the slope bound `1/d`, when the oper was built for one.
    pub d: Option<i64>,
    /// `lambda_i(t)`, aligned with [`PrincipalData::slots`].
    pub lambdas: Vec<LQ>,
}

/// Serializable slot coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct SlotRepr {
    pub degree: i64,
    pub pfaffian: bool,
    pub lambda: LaurentRepr,
}

/// Serializable oper.
#[derive(Clone, Debug, Serialize)]
pub struct OperRepr {
    pub algebra: String,
    pub d: Option<i64>,
    pub slots: Vec<SlotRepr>,
}

impl OperCanonical {
    /// The oper with all coordinates zero.
    pub fn zero(pd: &PrincipalData, d: Option<i64>) -> Self {
        OperCanonical { group: pd.group(), d, lambdas: vec![LQ::zero(); pd.slots.len()] }
    }

    /// Constant coordinates on the slots of degree `>= d`, in slot order.
    pub fn global(pd: &PrincipalData, d: i64, values: &[Q]) -> Result<Self> {
        let idx: Vec<usize> = (0..pd.slots.len()).filter(|&s| pd.slots[s].degree >= d).collect();
        if idx.len() != values.len() {
            return Err(Error::Config(format!("{} has {} slots of degree >= {}, got {} values", algebra_name(pd.group()), idx.len(), d, values.len())));
        }
        let mut op = Self::zero(pd, Some(d));
        for (s, v) in idx.into_iter().zip(values) {
            op.lambdas[s] = LQ::mono(v.clone(), 0);
        }
        Ok(op)
    }

    pub fn to_repr(&self, pd: &PrincipalData) -> OperRepr {
        OperRepr {
            algebra: algebra_name(self.group),
            d: self.d,
            slots: pd.slots.iter().zip(&self.lambdas).map(|(s, l)| SlotRepr { degree: s.degree, pfaffian: s.pfaffian, lambda: LaurentRepr::from(l) }).collect(),
        }
    }
}

/// `d/dt + t^{-1} p_{-1} + sum lambda_i(t) p_i`.
pub fn oper_connection(pd: &PrincipalData, op: &OperCanonical) -> Connection<Q> {
    let mut m = lift::<Q>(&pd.p_minus1).map(|f| f.shift(-1));
    for (s, l) in pd.slots.iter().zip(&op.lambdas) {
        m = m.add(&lift::<Q>(&s.p).scale_r(l));
    }
    Connection { group: pd.group(), deriv: Deriv::Plain, matrix: m }
}

/// Canonical form of `d/dt + t^{-1} p_{-1} + b(t)` (or of an Euler-form connection `t d/dt + p_{-1} + B`).
pub fn ds_canonical_form(pd: &PrincipalData, conn: &Connection<Q>) -> Result<OperCanonical> {
    if conn.group != pd.group() {
        return Err(Error::Domain(format!("connection is for {}, not {}", algebra_name(conn.group), algebra_name(pd.group()))));
    }
    let euler = match conn.deriv {
        Deriv::Plain => conn.matrix.map(|f| f.shift(1)),
        Deriv::Euler => conn.matrix.clone(),
    };
    let v = pd.ds_reduce(&euler, Deriv::Euler)?;
    Ok(OperCanonical { group: pd.group(), d: None, lambdas: v.iter().map(|f| f.shift(-1)).collect() })
}

/// Slope at infinity with the valuations it was read from.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport {
    #[serde(serialize_with = "crate::ring::qser::serialize")]
    pub slope: Q,
    /// `(degree, ord_s v_i)` of the canonical coefficients at infinity.
    pub orders: Vec<(i64, Option<i64>)>,
}

/// Formal slope at `t = infinity`: `max_i max(0, (-ord_s v_i - d_i) / d_i)`.
///
/// Chart change `s = 1/t`, gauge by `s^{-rho_check}` and the sign twist bring the
/// connection to `d/ds + p_{-1} + ...`, which is then reduced in the `s` chart.
pub fn slope_at_infinity(pd: &PrincipalData, op: &OperCanonical) -> Result<SlopeReport> {
    let conn = to_infinity_chart(&oper_connection(pd, op))?;
    let conn = sign_twist(pd, &gauge_rho_power(pd, &conn, -1));
    let v = pd.ds_reduce(&conn.matrix, Deriv::Plain)?;
    let mut slope = Q::zero();
    let mut orders = Vec::new();
    for (s, vi) in pd.slots.iter().zip(&v) {
        let ord = vi.min_exp();
        if let Some(o) = ord {
            let cand = Q::new((-o - s.degree).into(), s.degree.into());
            if cand > slope {
                slope = cand;
            }
        }
        orders.push((s.degree, ord));
    }
    Ok(SlopeReport { slope, orders })
}

/// Hypergeometric operator by parameters:
/// `prod_i (delta - alpha_i) - (-1)^{n+m'} lambda t prod_j (delta - beta_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypParams {
    pub alpha: Vec<Q>,
    pub beta: Vec<Q>,
    pub lambda: Q,
}

/// `delta^n + t (u_m(t) delta^{n-m} + ... + u_n(t))`; `u[k]` is `u_{m+k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypCoeffs {
    pub n: usize,
    pub m: usize,
    pub u: Vec<LQ>,
}

/// Serializable hypergeometric coefficients keyed by index `i`.
#[derive(Clone, Debug, Serialize)]
pub struct HypRepr {
    pub n: usize,
    pub m: usize,
    pub u: BTreeMap<usize, LaurentRepr>,
}

impl HypCoeffs {
    /// `u_i(t)`, zero outside `m..=n`.
    pub fn u_at(&self, i: usize) -> LQ {
        if i < self.m || i > self.n {
            LQ::zero()
        } else {
            self.u[i - self.m].clone()
        }
    }

    pub fn to_repr(&self) -> HypRepr {
        HypRepr { n: self.n, m: self.m, u: self.u.iter().enumerate().map(|(k, f)| (self.m + k, LaurentRepr::from(f))).collect() }
    }
}

/// Coefficients of `prod_j (x - r_j)`, leading first.
pub fn poly_from_roots(roots: &[Q]) -> Vec<Q> {
    let mut p = vec![q(1)];
    for r in roots {
        let mut np = vec![Q::zero(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            np[k] += c;
            np[k + 1] -= c * r;
        }
        p = np;
    }
    p
}

impl HypParams {
    /// Expand to the coefficient form; needs every `alpha_i = 0` and `n > m'`.
    pub fn to_coeffs(&self) -> Result<HypCoeffs> {
        let n = self.alpha.len();
        let mp = self.beta.len();
        if n <= mp {
            return Err(Error::Domain(format!("type ({}, {}) is not wild: need n > m'", n, mp)));
        }
        if self.alpha.iter().any(|a| !num_traits::Zero::is_zero(a)) {
            return Err(Error::Domain("the coefficient form delta^n + t(...) needs all alpha_i = 0".into()));
        }
        let sign = if (n + mp) % 2 == 0 { q(-1) } else { q(1) };
        let p = poly_from_roots(&self.beta);
        let u = p.iter().map(|c| LQ::mono(c * &self.lambda * &sign, 0)).collect();
        Ok(HypCoeffs { n, m: n - mp, u })
    }
}

fn check_sl_for(pd: &PrincipalData, n: usize) -> Result<()> {
    if pd.group().family != Family::SL || pd.size() != n {
        return Err(Error::Domain(format!("hypergeometric coordinates of order {} live on sl{}, got {}", n, n, algebra_name(pd.group()))));
    }
    Ok(())
}

/// Result of [`hyp_to_oper`].
#[derive(Clone, Debug)]
pub struct HypConversion {
    pub oper: OperCanonical,
    pub c_consts: Vec<Q>,
}

/// Canonical form of the companion connection of `h`.
///
/// Asserts the triangular shape: removing `u_i` changes `lambda_i` by exactly `u_i / c_i`
/// and leaves `lambda_mu`, `mu < i`, unchanged.
pub fn hyp_to_oper(pd: &PrincipalData, h: &HypCoeffs) -> Result<HypConversion> {
    check_sl_for(pd, h.n)?;
    let cs = pd.c_consts.clone().ok_or_else(|| Error::Internal("missing companion constants".into()))?;
    let lam = companion_lambdas(pd, h)?;
    for i in h.m..=h.n {
        let mut h2 = h.clone();
        h2.u[i - h.m] = LQ::zero();
        let lam2 = companion_lambdas(pd, &h2)?;
        let s = pd.slot_of_degree(i as i64).expect("sl slot");
        let diff = lam[s].sub(&lam2[s]);
        let expect = h.u[i - h.m].scale(&(q(1) / &cs[s]));
        if diff != expect || (0..s).any(|j| lam[j] != lam2[j]) {
            return Err(Error::violation("companion triangularity", format!("u_{} does not enter lambda as u/c_i at the diagonal", i)));
        }
    }
    for (s, l) in pd.slots.iter().zip(&lam) {
        if (s.degree as usize) < h.m && !l.is_zero() {
            return Err(Error::violation("companion triangularity", format!("lambda_{} is nonzero below m = {}", s.degree, h.m)));
        }
    }
    Ok(HypConversion { oper: OperCanonical { group: pd.group(), d: Some(h.m as i64), lambdas: lam }, c_consts: cs })
}

fn companion_lambdas(pd: &PrincipalData, h: &HypCoeffs) -> Result<Vec<LQ>> {
    let a = pd.companion_matrix(h.m, &h.u)?;
    Ok(pd.ds_reduce(&a, Deriv::Euler)?.iter().map(|f| f.shift(-1)).collect())
}

/// Hypergeometric coordinates of an `sl_N` oper, by triangular inversion.
pub fn oper_to_hyp(pd: &PrincipalData, op: &OperCanonical) -> Result<HypCoeffs> {
    if pd.group().family != Family::SL || op.group != pd.group() {
        return Err(Error::Domain(format!("hypergeometric coordinates need an sl_N oper, got {}", algebra_name(op.group))));
    }
    let n = pd.size();
    let lowest = pd.slots.iter().zip(&op.lambdas).find(|(_, l)| !l.is_zero()).map(|(s, _)| s.degree as usize);
    let m = op.d.map(|d| d as usize).or(lowest).unwrap_or(n).max(2);
    for (s, l) in pd.slots.iter().zip(&op.lambdas) {
        if (s.degree as usize) < m && !l.is_zero() {
            return Err(Error::Domain(format!("lambda_{} is nonzero below m = {}", s.degree, m)));
        }
        if l.min_exp().is_some_and(|e| e < 0) {
            return Err(Error::Domain("hypergeometric coordinates need polynomial lambda_i(t)".into()));
        }
    }
    let cs = pd.c_consts.as_ref().ok_or_else(|| Error::Internal("missing companion constants".into()))?;
    let mut h = HypCoeffs { n, m, u: vec![LQ::zero(); n + 1 - m] };
    for i in m..=n {
        let s = pd.slot_of_degree(i as i64).expect("sl slot");
        let cur = companion_lambdas(pd, &h)?;
        h.u[i - m] = op.lambdas[s].sub(&cur[s]).scale(&cs[s]);
    }
    if companion_lambdas(pd, &h)? != op.lambdas {
        return Err(Error::violation("companion triangularity", "triangular inversion does not reproduce the oper"));
    }
    Ok(h)
}

/// Symbolic form of the companion change of coordinates.
#[derive(Clone, Debug)]
pub struct CompanionRelation {
    pub n: usize,
    pub m: usize,
    pub jmax: usize,
    pub c_consts: Vec<Q>,
    /// `lambda_{ij}` in the variables `u_{mu nu}`.
    pub lambda_of_u: BTreeMap<(usize, usize), MPoly>,
    /// `u_{ij}` in the variables `lambda_{mu nu}`, `j <= jmax`.
    pub u_of_lambda: BTreeMap<(usize, usize), MPoly>,
}

impl CompanionRelation {
    /// Variable number of `u_{ij}` (and of `lambda_{ij}`).
    pub fn var(&self, i: usize, j: usize) -> u32 {
        ((i - self.m) * (self.jmax + 1) + j) as u32
    }

    /// Inverse of [`Self::var`].
    pub fn unvar(&self, v: u32) -> (usize, usize) {
        let v = v as usize;
        (self.m + v / (self.jmax + 1), v % (self.jmax + 1))
    }
}

fn shape_ok(p: &MPoly, unvar: &dyn Fn(u32) -> (usize, usize), i: usize, j: usize) -> bool {
    p.terms().all(|(mono, _)| {
        let weight: usize = mono.iter().map(|&(v, e)| (unvar(v).1 + 1) * e as usize).sum();
        weight == j + 1 && mono.iter().all(|&(v, _)| {
            let (mu, nu) = unvar(v);
            mu < i && nu <= j
        })
    })
}

/// Symbolic reduction of the generic companion connection with `u_i(t) = sum_{j <= jmax} u_{ij} t^j`.
///
/// Asserts `lambda_{ij} = u_{ij} / c_i + R_{ij}` and `u_{ij} = c_i lambda_{ij} + Q_{ij}` where
/// `R`, `Q` only involve indices `mu < i`, `nu <= j` and are homogeneous of weight `j + 1`
/// with `u_{mu nu}` of weight `nu + 1`.
pub fn companion_relation(pd: &PrincipalData, m: usize, jmax: usize) -> Result<CompanionRelation> {
    let n = pd.size();
    check_sl_for(pd, n)?;
    let cs = pd.c_consts.clone().ok_or_else(|| Error::Internal("missing companion constants".into()))?;
    let mut rel = CompanionRelation { n, m, jmax, c_consts: Vec::new(), lambda_of_u: BTreeMap::new(), u_of_lambda: BTreeMap::new() };
    let u: Vec<LaurentPoly<MPoly>> =
        (m..=n).map(|i| LaurentPoly::from_terms((0..=jmax).map(|j| (j as i64, MPoly::var(rel.var(i, j)))))).collect();
    let a = pd.companion_matrix(m, &u)?;
    let v = pd.ds_reduce(&a, Deriv::Euler)?;
    let (mm, jj) = (m, jmax);
    let unvar = move |x: u32| (mm + x as usize / (jj + 1), x as usize % (jj + 1));
    for i in m..=n {
        let s = pd.slot_of_degree(i as i64).expect("sl slot");
        let lam = v[s].shift(-1);
        if lam.min_exp().is_some_and(|e| e < 0) {
            return Err(Error::violation("companion triangularity", format!("lambda_{} has negative powers of t", i)));
        }
        for (&e, p) in lam.terms() {
            let j = e as usize;
            let mut r = p.clone();
            if j <= jmax {
                let own = MPoly::var(rel.var(i, j)).scale(&(q(1) / &cs[s]));
                r = r.sub(&own);
            }
            if !shape_ok(&r, &unvar, i, j) {
                return Err(Error::violation("companion triangularity", format!("R_{{{},{}}} = {:?} has the wrong dependency shape", i, j, r)));
            }
            rel.lambda_of_u.insert((i, j), p.clone());
        }
    }
    for (s, f) in v.iter().enumerate() {
        if (pd.slots[s].degree as usize) < m && !f.is_zero() {
            return Err(Error::violation("companion triangularity", format!("lambda_{} is nonzero below m", pd.slots[s].degree)));
        }
    }
    // Invert in increasing (i, j).
    for i in m..=n {
        let s = pd.slot_of_degree(i as i64).expect("sl slot");
        for j in 0..=jmax {
            let p = rel.lambda_of_u.get(&(i, j)).cloned().unwrap_or_default();
            let r = p.sub(&MPoly::var(rel.var(i, j)).scale(&(q(1) / &cs[s])));
            let known = rel.u_of_lambda.clone();
            let r_lam = r.subst(&|x| known.get(&rel.unvar(x)).cloned().expect("lower u already inverted"));
            let uq = MPoly::var(rel.var(i, j)).sub(&r_lam).scale(&cs[s]);
            let qpart = uq.sub(&MPoly::var(rel.var(i, j)).scale(&cs[s]));
            if !shape_ok(&qpart, &unvar, i, j) {
                return Err(Error::violation("companion triangularity", format!("Q_{{{},{}}} has the wrong dependency shape", i, j)));
            }
            rel.u_of_lambda.insert((i, j), uq);
        }
    }
    rel.c_consts = (m..=n).map(|i| cs[pd.slot_of_degree(i as i64).unwrap()].clone()).collect();
    Ok(rel)
}

/// Inclusions of classical algebras used for pushouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Embedding {
    /// `sp_2n -> sl_2n`.
    SpToSl,
    /// `so_{2n+1} -> sl_{2n+1}`.
    SOOddToSl,
    /// `so_{2n+1} -> so_{2n+2}`.
    SOOddToSOEven,
}

impl Embedding {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sp-sl" | "sp2n-sl2n" => Some(Embedding::SpToSl),
            "so-odd-sl" | "so2n+1-sl2n+1" => Some(Embedding::SOOddToSl),
            "so-odd-so-even" | "so2n+1-so2n+2" => Some(Embedding::SOOddToSOEven),
            _ => None,
        }
    }

    pub fn source(self, n: usize) -> GroupType {
        match self {
            Embedding::SpToSl => GroupType::new(Family::Sp, n),
            Embedding::SOOddToSl | Embedding::SOOddToSOEven => GroupType::new(Family::SOOdd, n),
        }
    }

    pub fn target(self, n: usize) -> GroupType {
        match self {
            Embedding::SpToSl => GroupType::new(Family::SL, 2 * n - 1),
            Embedding::SOOddToSl => GroupType::new(Family::SL, 2 * n),
            Embedding::SOOddToSOEven => GroupType::new(Family::SOEven, n + 1),
        }
    }

    /// Matrices `iota`, `pi` with `pi iota = 1`; the algebra map is `X -> iota X pi`.
    pub fn matrices(self, n: usize) -> Result<(QMat, QMat)> {
        match self {
            Embedding::SpToSl => Ok((QMat::identity(2 * n), QMat::identity(2 * n))),
            Embedding::SOOddToSl => Ok((QMat::identity(2 * n + 1), QMat::identity(2 * n + 1))),
            Embedding::SOOddToSOEven => {
                let mut iota = QMat::zeros(2 * n + 2, 2 * n + 1);
                for i in 1..=n {
                    iota.set(i - 1, i - 1, q(1));
                    iota.set(2 * n + 3 - i - 1, 2 * n + 2 - i - 1, q(1));
                }
                iota.set(n, n, q(1));
                iota.set(n + 1, n, crate::ring::qf(1, 2));
                let jb = crate::matrixrep::bilinear_j(self.source(n)).expect("form");
                let jd = crate::matrixrep::bilinear_j(self.target(n)).expect("form");
                let pulled = iota.transpose().mul(&jd).mul(&iota);
                let kappa = pulled.get(0, 2 * n).clone() / jb.get(0, 2 * n).clone();
                if pulled != jb.scale(&kappa) {
                    return Err(Error::Internal("embedding is not a similitude".into()));
                }
                let pi = jb.inverse().expect("form").mul(&iota.transpose()).mul(&jd).scale(&(q(1) / kappa));
                Ok((iota, pi))
            }
        }
    }
}

/// Result of a pushout.
#[derive(Clone, Debug)]
pub struct PushoutCertificate {
    pub embedding: Embedding,
    pub source: OperCanonical,
    pub target: OperCanonical,
    /// Interleaving pattern predicted from the source coordinates.
    pub expected: OperCanonical,
    /// `c_i` of the adjoint torus element normalizing the image of `p_{-1}`.
    pub torus_rescale: Vec<Q>,
}

/// Push an oper along an embedding and reduce it in the target algebra.
///
/// `so_{2n+1} -> so_{2n+2}` needs `op.d = Some(2m)` with `2m > n + 1`.
pub fn pushout(src: &PrincipalData, tgt: &PrincipalData, op: &OperCanonical, e: Embedding) -> Result<PushoutCertificate> {
    let n = src.group().n;
    if op.group != src.group() || e.source(n) != src.group() || e.target(n) != tgt.group() {
        return Err(Error::Domain(format!("embedding {:?} does not apply to {} -> {}", e, algebra_name(op.group), algebra_name(tgt.group()))));
    }
    if e == Embedding::SOOddToSOEven {
        match op.d {
            Some(d) if d % 2 == 0 && d > n as i64 + 1 => {}
            _ => return Err(Error::Unsupported(format!("so{} -> so{} needs d = 2m > n + 1 = {}, got {:?}", 2 * n + 1, 2 * n + 2, n + 1, op.d))),
        }
    }
    let (iota, pi) = e.matrices(n)?;
    let li = lift::<Q>(&iota);
    let lp = lift::<Q>(&pi);
    let push = |x: &QMat| iota.mul(x).mul(&pi);
    let im_pm1 = push(&src.p_minus1);
    let rs = &tgt.rep.rs;
    let mut c = Vec::new();
    let mut rebuilt = QMat::zeros(tgt.size(), tgt.size());
    for a in &rs.simple_roots {
        let coef = tgt.rep.coord(&im_pm1, &a.neg());
        if num_traits::Zero::is_zero(&coef) {
            return Err(Error::Internal("image of p_-1 is not principal".into()));
        }
        rebuilt = rebuilt.add(&tgt.rep.e(&a.neg()).scale(&coef));
        c.push(coef);
    }
    if rebuilt != im_pm1 {
        return Err(Error::Internal("image of p_-1 leaves the simple negative root spaces".into()));
    }
    // Adjoint torus element with alpha_i -> c_i; entry (a, b) scales by c^{w_a - w_b}.
    let size = tgt.size();
    let factor: Vec<Vec<Q>> = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| {
                    let k = rs.simple_coeffs(&tgt.rep.weights[a].sub(&tgt.rep.weights[b]));
                    k.iter().zip(&c).fold(q(1), |acc, (&ki, ci)| {
                        let p = num_traits::pow(ci.clone(), ki.unsigned_abs() as usize);
                        if ki >= 0 {
                            acc * p
                        } else {
                            acc / p
                        }
                    })
                })
                .collect()
        })
        .collect();
    let rescale = |m: &Mat<LQ>| Mat::from_fn(size, size, |a, b| m.get(a, b).scale(&factor[a][b]));
    let rho_img = rescale(&lift::<Q>(&push(&src.two_rho_check)));
    if rho_img != lift::<Q>(&tgt.two_rho_check) {
        return Err(Error::Internal("image of 2 rho_check is not the target 2 rho_check".into()));
    }
    let src_conn = oper_connection(src, op);
    let img = rescale(&li.mul(&src_conn.matrix).mul(&lp));
    if !tgt.rep.in_lie(&img) {
        return Err(Error::Internal("pushed connection leaves the target algebra".into()));
    }
    let target = ds_canonical_form(tgt, &Connection { group: tgt.group(), deriv: Deriv::Plain, matrix: img })?;
    let target = OperCanonical { d: op.d, ..target };
    let mut expected = OperCanonical::zero(tgt, op.d);
    for (k, s) in tgt.slots.iter().enumerate() {
        if s.pfaffian {
            continue;
        }
        if let Some(j) = src.slots.iter().position(|x| x.degree == s.degree && !x.pfaffian) {
            expected.lambdas[k] = op.lambdas[j].clone();
        }
    }
    if target != expected {
        return Err(Error::violation("oper functoriality", format!("{:?}: reduced target coordinates differ from the interleaving pattern", e)));
    }
    Ok(PushoutCertificate { embedding: e, source: op.clone(), target, expected, torus_rescale: c })
}

/// Coefficients `delta_{ij}` of `c_{d_i}(X) (dt)^{d_i}` at `t^{1+j} (dt/t)^{d_i}`, `X = t^{-1} p_{-1} + sum lambda_i(t) p_i`.
///
/// Slots of degree `< d` must have `lambda = 0` and give `c_{d_i} = 0`; for `d_i >= d` only
/// `j < floor(d_i / d)` may occur. For `so_2n` the Pfaffian replaces the characteristic
/// coefficient on its slot, and `d > n` is required.
pub fn classical_limit_generic<C: Ring>(pd: &PrincipalData, d: i64, lambdas: &[LaurentPoly<C>]) -> Result<Vec<Vec<C>>> {
    let g = pd.group();
    if g.family == Family::SOEven && d <= g.n as i64 {
        return Err(Error::Unsupported(format!("classical limit for so{} needs d > n = {}", 2 * g.n, g.n)));
    }
    if lambdas.len() != pd.slots.len() {
        return Err(Error::Config(format!("expected {} coordinates", pd.slots.len())));
    }
    for (s, l) in pd.slots.iter().zip(lambdas) {
        let top = if s.degree >= d { s.degree / d - 1 } else { -1 };
        if l.min_exp().is_some_and(|e| e < 0) || l.max_exp().is_some_and(|e| e > top) {
            return Err(Error::Domain(format!("lambda for degree {} must be a polynomial of degree <= {}", s.degree, top)));
        }
    }
    let mut x = lift::<C>(&pd.p_minus1).map(|f| f.shift(-1));
    for (s, l) in pd.slots.iter().zip(lambdas) {
        x = x.add(&lift::<C>(&s.p).scale_r(l));
    }
    let cc = x.char_coeffs();
    let mut out = Vec::new();
    for s in &pd.slots {
        let f = if s.pfaffian {
            let j = pd.rep.j.as_ref().ok_or_else(|| Error::Internal("missing form".into()))?;
            pfaffian(&x, j)
        } else {
            cc[s.degree as usize].clone()
        };
        let f = f.shift(s.degree);
        let count = if s.degree >= d { s.degree / d } else { 0 };
        if f.terms().any(|(e, _)| *e < 1 || *e > count) {
            return Err(Error::violation("classical limit", format!("degree {} component has powers outside t^1..t^{}", s.degree, count)));
        }
        out.push((0..count).map(|j| f.coeff(1 + j)).collect());
    }
    Ok(out)
}

/// Numeric classical limit.
pub fn classical_limit_coeffs(pd: &PrincipalData, d: i64, lambdas: &[LQ]) -> Result<Vec<Vec<Q>>> {
    classical_limit_generic(pd, d, lambdas)
}

/// Symbolic classical limit with the triangular shape asserted.
#[derive(Clone, Debug)]
pub struct ClassicalLimitShape {
    pub d: i64,
    /// `(slot, j)` of each variable.
    pub vars: Vec<(usize, usize)>,
    /// `delta_{ij}` as a polynomial in the `lambda` variables, per slot.
    pub deltas: Vec<Vec<MPoly>>,
    /// Diagonal constants `u_{ij}`.
    pub diagonal: BTreeMap<(usize, usize), Q>,
}

/// `delta_{ij} = u_{ij} lambda_{ij} + Q_{ij}` with `u_{ij} != 0` and `Q_{ij}` in `lambda_{mu nu}`, `mu < i`, `nu < j`.
pub fn classical_limit_shape(pd: &PrincipalData, d: i64) -> Result<ClassicalLimitShape> {
    let mut vars = Vec::new();
    let mut lambdas = Vec::new();
    for (k, s) in pd.slots.iter().enumerate() {
        let count = if s.degree >= d { s.degree / d } else { 0 };
        let mut terms = Vec::new();
        for j in 0..count as usize {
            terms.push((j as i64, MPoly::var(vars.len() as u32)));
            vars.push((k, j));
        }
        lambdas.push(LaurentPoly::from_terms(terms));
    }
    let deltas = classical_limit_generic(pd, d, &lambdas)?;
    let mut diagonal = BTreeMap::new();
    for (k, row) in deltas.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            let v = vars.iter().position(|x| *x == (k, j)).expect("variable") as u32;
            let u = p.linear_coeff(v);
            if num_traits::Zero::is_zero(&u) {
                return Err(Error::violation("classical limit", format!("delta_({},{}) has no linear term in its own lambda", k, j)));
            }
            let rest = p.sub(&MPoly::var(v).scale(&u));
            let ok = rest.terms().all(|(mono, _)| mono.iter().all(|&(w, _)| {
                let (mu, nu) = vars[w as usize];
                mu < k && nu < j
            }));
            if !ok {
                return Err(Error::violation("classical limit", format!("delta_({},{}) depends on variables outside mu < i, nu < j", k, j)));
            }
            diagonal.insert((k, j), u);
        }
    }
    Ok(ClassicalLimitShape { d, vars, deltas, diagonal })
}

fn random_poly(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> LQ {
    LQ::from_terms((lo..=hi).map(|e| (e, random_q(rng))))
}

/// Random oper with polynomial coordinates of degree `<= deg`.
pub fn random_oper(pd: &PrincipalData, seed: u64, deg: i64) -> OperCanonical {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    OperCanonical { group: pd.group(), d: None, lambdas: pd.slots.iter().map(|_| random_poly(&mut rng, 0, deg)).collect() }
}

/// Random oper of the global shape for `d`: `lambda_i` of degree `< floor(d_i / d)` on the
/// slots of degree `>= d`, zero below, and the constant term of the degree `d` slot nonzero.
pub fn random_global_oper(pd: &PrincipalData, d: i64, seed: u64) -> OperCanonical {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut op = OperCanonical::zero(pd, Some(d));
    for (k, s) in pd.slots.iter().enumerate() {
        if s.degree < d {
            continue;
        }
        let mut l = random_poly(&mut rng, 0, s.degree / d - 1);
        if s.degree == d && !s.pfaffian {
            while num_traits::Zero::is_zero(&l.coeff(0)) {
                l = random_poly(&mut rng, 0, 0);
            }
        }
        op.lambdas[k] = l;
    }
    op
}

/// `P(x) = sum_k u_{m+k} x^{n-m-k}`, leading first; its roots are the `beta_j` up to the sign of
/// `lambda`. Needs constant `u_i`.
pub fn hyp_beta_polynomial(h: &HypCoeffs) -> Result<Vec<Q>> {
    h.u.iter()
        .map(|f| {
            if f.terms().any(|(e, _)| *e != 0) {
                Err(Error::Domain("u_i(t) is not constant; not a hypergeometric equation".into()))
            } else {
                Ok(f.coeff(0))
            }
        })
        .collect()
}

/// Coefficients of `P(2c - x)` for `P` given leading first.
pub fn reflect_poly(p: &[Q], c: &Q) -> Vec<Q> {
    // Horner in y = 2c - x.
    let y = [q(-1), c * q(2)];
    let mut acc: Vec<Q> = vec![];
    for a in p {
        let mut next = vec![Q::zero(); acc.len() + 1];
        for (i, x) in acc.iter().enumerate() {
            next[i] += x * &y[0];
            next[i + 1] += x * &y[1];
        }
        let last = next.len() - 1;
        next[last] += a;
        acc = next;
    }
    acc
}

/// Whether the root multiset of `P` is invariant under `x -> 2c - x`.
pub fn roots_symmetric_about(p: &[Q], c: &Q) -> bool {
    let r = reflect_poly(p, c);
    let deg = p.len().saturating_sub(1);
    let sign = if deg % 2 == 0 { q(1) } else { q(-1) };
    r.iter().zip(p).all(|(a, b)| a == &(b * &sign))
}

/// Random `exp(N)` with `N` in the positive nilpotent part, entries in `Q[t, 1/t]` of exponent `lo..=hi`.
pub fn random_unipotent_generator(pd: &PrincipalData, seed: u64, lo: i64, hi: i64) -> Mat<LQ> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis: Vec<QMat> = pd.rep.rs.positive_roots.iter().map(|r| pd.rep.e(r).clone()).collect();
    let coeffs: Vec<LQ> = basis.iter().map(|_| if rng.gen_bool(0.6) { random_poly(&mut rng, lo, hi) } else { LQ::zero() }).collect();
    combine(&basis, &coeffs)
}

/// Random hypergeometric coefficients with `u_i(t)` of degree `<= deg`.
pub fn random_hyp_coeffs(n: usize, m: usize, seed: u64, deg: i64) -> HypCoeffs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HypCoeffs { n, m, u: (m..=n).map(|_| random_poly(&mut rng, 0, deg)).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::qf;

    fn pd(f: Family, n: usize) -> PrincipalData {
        principal_data(GroupType::new(f, n)).unwrap()
    }

    #[test]
    fn sl2_principal() {
        let p = pd(Family::SL, 1);
        assert_eq!(p.p_minus1, QMat::unit(2, 1, 0));
        assert_eq!(p.p_plus1, QMat::unit(2, 0, 1));
        assert_eq!(p.slots.len(), 1);
        assert_eq!(p.slots[0].degree, 2);
        assert_eq!(p.slots[0].p, QMat::unit(2, 0, 1).scale(&q(SIGMA)));
    }

    #[test]
    fn degrees_of_small_algebras() {
        let degs = |f, n| pd(f, n).slots.iter().map(|s| (s.degree, s.pfaffian)).collect::<Vec<_>>();
        assert_eq!(degs(Family::SL, 2), vec![(2, false), (3, false)]);
        assert_eq!(degs(Family::Sp, 2), vec![(2, false), (4, false)]);
        assert_eq!(degs(Family::SOOdd, 2), vec![(2, false), (4, false)]);
        assert_eq!(degs(Family::SOEven, 4), vec![(2, false), (4, false), (4, true), (6, false)]);
        assert_eq!(degs(Family::SOEven, 3), vec![(2, false), (3, true), (4, false)]);
    }

    #[test]
    fn kernel_dimension_oracle_sl3() {
        // Independent: ker ad p_1 on strictly upper 3x3 matrices.
        let p = pd(Family::SL, 2);
        let basis = [QMat::unit(3, 0, 1), QMat::unit(3, 1, 2), QMat::unit(3, 0, 2)];
        let cols: Vec<Vec<Q>> = basis.iter().map(|e| p.p_plus1.bracket(e).data).collect();
        assert_eq!(QMat::from_columns(9, &cols).nullspace().len(), 2);
    }

    #[test]
    fn sl2_rho_gauge_oracle() {
        // d/ds + s^-1 p_-1 + s^-2 l p_1 gauged by s^{-rho}: p_-1 constant, p_1 gets s^-3, plus rho/s.
        let p = pd(Family::SL, 1);
        let l = q(5);
        let m = Mat::from_fn(2, 2, |a, b| match (a, b) {
            (1, 0) => LQ::mono(q(1), -1),
            (0, 1) => LQ::mono(l.clone(), -2),
            _ => LQ::zero(),
        });
        let c = Connection { group: p.group(), deriv: Deriv::Plain, matrix: m };
        let g = gauge_rho_power(&p, &c, -1);
        let expect = Mat::from_fn(2, 2, |a, b| match (a, b) {
            (1, 0) => LQ::one(),
            (0, 1) => LQ::mono(l.clone(), -3),
            (0, 0) => LQ::mono(qf(1, 2), -1),
            (1, 1) => LQ::mono(qf(-1, 2), -1),
            _ => LQ::zero(),
        });
        assert_eq!(g.matrix, expect);
    }

    #[test]
    fn gauge_identity_and_inverse() {
        let p = pd(Family::SL, 2);
        let op = random_oper(&p, 3, 1);
        let c = oper_connection(&p, &op);
        assert_eq!(gauge(&c, &Mat::identity(3)).unwrap(), c);
        let x = random_unipotent_generator(&p, 4, -1, 1);
        let g = x.exp_nilpotent();
        let gi = x.neg().exp_nilpotent();
        let back = gauge(&gauge(&c, &g).unwrap(), &gi).unwrap();
        assert_eq!(back, c);
        let singular = Mat::from_fn(3, 3, |a, b| if a == b && a > 0 { LQ::one() } else if a == b { LQ::t().add(&LQ::one()) } else { LQ::zero() });
        assert!(matches!(gauge(&c, &singular), Err(Error::Domain(_))));
    }

    #[test]
    fn canonical_form_is_idempotent_and_recovers() {
        for (f, n) in [(Family::SL, 1), (Family::SL, 3), (Family::Sp, 2), (Family::SOOdd, 2), (Family::SOEven, 4)] {
            let p = pd(f, n);
            for seed in 0..3 {
                let op = random_oper(&p, seed, 2);
                let c = oper_connection(&p, &op);
                assert_eq!(ds_canonical_form(&p, &c).unwrap().lambdas, op.lambdas);
                let x = random_unipotent_generator(&p, 100 + seed, -1, 1);
                let g = gauge_unipotent(&c, &x);
                assert_eq!(ds_canonical_form(&p, &g).unwrap().lambdas, op.lambdas, "{:?} {}", f, n);
            }
        }
    }

    #[test]
    fn non_oper_rejected() {
        let p = pd(Family::SL, 2);
        let mut c = oper_connection(&p, &OperCanonical::zero(&p, None));
        c.matrix.set(2, 0, LQ::one());
        assert!(matches!(ds_canonical_form(&p, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn sl2_companion_oracle() {
        // delta^2 + t u_2: companion p_-1 - t u E_12 reduces with lambda = u / c, c = 1 (p_1 = E_12).
        let p = pd(Family::SL, 1);
        assert_eq!(p.c_consts.as_ref().unwrap(), &vec![q(1)]);
        let h = HypCoeffs { n: 2, m: 2, u: vec![LQ::mono(q(7), 0)] };
        let op = hyp_to_oper(&p, &h).unwrap().oper;
        assert_eq!(op.lambdas[0], LQ::mono(q(7), 0));
    }

    #[test]
    fn c_consts_match_trace_formula() {
        for n in 1..=5 {
            let p = pd(Family::SL, n);
            for (s, c) in p.slots.iter().zip(p.c_consts.as_ref().unwrap()) {
                let k = s.degree - 1;
                let tr = trace_form(&pow(&p.p_plus1, k), &pow(&p.p_minus1, k));
                assert_eq!(&tr, c);
            }
        }
    }

    #[test]
    fn single_top_coefficient() {
        let p = pd(Family::SL, 3);
        let h = HypCoeffs { n: 4, m: 2, u: vec![LQ::mono(q(3), 0), LQ::zero(), LQ::zero()] };
        let op = hyp_to_oper(&p, &h).unwrap().oper;
        let c2 = p.c_consts.as_ref().unwrap()[0].clone();
        assert_eq!(op.lambdas[0], LQ::mono(q(3) / c2, 0));
    }

    #[test]
    fn hyp_roundtrip_small() {
        for n in 2..=5 {
            let p = pd(Family::SL, n - 1);
            for m in 2..=n {
                let h = random_hyp_coeffs(n, m, (n * 10 + m) as u64, 1);
                let op = hyp_to_oper(&p, &h).unwrap().oper;
                assert_eq!(oper_to_hyp(&p, &op).unwrap(), h);
            }
        }
    }

    #[test]
    fn params_expansion() {
        // delta^3 - (-1)^{3+1} 2 t (delta - 1/2): u_2 = -2, u_3 = 1.
        let hp = HypParams { alpha: vec![Q::zero(); 3], beta: vec![qf(1, 2)], lambda: q(2) };
        let h = hp.to_coeffs().unwrap();
        assert_eq!(h.m, 2);
        assert_eq!(h.u, vec![LQ::mono(q(-2), 0), LQ::mono(q(1), 0)]);
        let bad = HypParams { alpha: vec![q(1), Q::zero()], beta: vec![], lambda: q(1) };
        assert!(bad.to_coeffs().is_err());
    }

    #[test]
    fn companion_relation_small() {
        let p = pd(Family::SL, 3);
        let rel = companion_relation(&p, 2, 1).unwrap();
        assert_eq!(rel.c_consts.len(), 3);
        assert!(rel.u_of_lambda.contains_key(&(4, 1)));
    }

    #[test]
    fn slopes() {
        let p = pd(Family::SL, 1);
        assert_eq!(slope_at_infinity(&p, &OperCanonical::zero(&p, None)).unwrap().slope, Q::zero());
        let kl = OperCanonical::global(&p, 2, &[q(1)]).unwrap();
        assert_eq!(slope_at_infinity(&p, &kl).unwrap().slope, qf(1, 2));
        let p = pd(Family::SL, 3);
        let op = OperCanonical::global(&p, 3, &[q(1), q(2)]).unwrap();
        assert_eq!(slope_at_infinity(&p, &op).unwrap().slope, qf(1, 3));
        let euler = OperCanonical { group: p.group(), d: None, lambdas: vec![LQ::mono(q(1), -1); 3] };
        assert_eq!(slope_at_infinity(&p, &euler).unwrap().slope, Q::zero());
    }

    #[test]
    fn pushout_examples() {
        let sp4 = pd(Family::Sp, 2);
        let sl4 = pd(Family::SL, 3);
        let op = OperCanonical::global(&sp4, 4, &[q(3)]).unwrap();
        let cert = pushout(&sp4, &sl4, &op, Embedding::SpToSl).unwrap();
        assert_eq!(cert.target.lambdas, vec![LQ::zero(), LQ::zero(), LQ::mono(q(3), 0)]);
        let z = OperCanonical::zero(&sp4, Some(4));
        assert!(pushout(&sp4, &sl4, &z, Embedding::SpToSl).unwrap().target.lambdas.iter().all(|l| l.is_zero()));
        let so7 = pd(Family::SOOdd, 3);
        let so8 = pd(Family::SOEven, 4);
        let op = OperCanonical::global(&so7, 6, &[q(2)]).unwrap();
        let cert = pushout(&so7, &so8, &op, Embedding::SOOddToSOEven).unwrap();
        let s6 = so8.slot_of_degree(6).unwrap();
        assert_eq!(cert.target.lambdas[s6], LQ::mono(q(2), 0));
        let low = OperCanonical::global(&so7, 4, &[q(1), q(1)]).unwrap();
        assert!(matches!(pushout(&so7, &so8, &low, Embedding::SOOddToSOEven), Err(Error::Unsupported(_))));
    }

    #[test]
    fn classical_limit_sl3_oracle() {
        // X = t^-1 p_-1 + l p_3 with p_3 = -p_1^2; det X = -(l) t^-2 * (p_1^2)_{13}.
        let p = pd(Family::SL, 2);
        let l = q(5);
        let lam = vec![LQ::zero(), LQ::mono(l.clone(), 0)];
        let out = classical_limit_coeffs(&p, 3, &lam).unwrap();
        let e13 = pow(&p.p_plus1, 2).get(0, 2).clone();
        // det [[0,0,a],[1/t,0,0],[0,1/t,0]] = a / t^2.
        let a = -e13 * &l;
        assert_eq!(out[1], vec![a]);
        assert!(out[0].is_empty());
    }

    #[test]
    fn reflection_symmetry() {
        // (x - 1/2)(x + 3/2) is symmetric about -1/2, not about 0.
        let p = poly_from_roots(&[qf(1, 2), qf(-3, 2)]);
        assert!(roots_symmetric_about(&p, &qf(-1, 2)));
        assert!(!roots_symmetric_about(&p, &Q::zero()));
        assert_eq!(reflect_poly(&[q(1), q(0)], &q(1)), vec![q(-1), q(2)]);
    }

    #[test]
    fn classical_limit_shape_sl() {
        for n in 2..=4 {
            let p = pd(Family::SL, n);
            for d in 2..=(n as i64 + 1) {
                classical_limit_shape(&p, d).unwrap();
            }
        }
    }
}
