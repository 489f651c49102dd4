//! The generic functional, the torus `T_phi`, weight fibers and the splitting `u_0 = u_phi + u^c`.

use crate::error::{Error, Result};
use crate::grading::{delta_g0, grade, CoxeterGrading, G0Decomposition};
use crate::matrix::{rank_of, trace_form, QMat};
use crate::matrixrep::MatrixRep;
use crate::ring::{q, Ring, Q};
use crate::rootsys::{build_root_system, Family, GroupType, Root};
use serde::Serialize;
use std::collections::BTreeMap;

/// Coefficients of the functional on the root spaces of `m_1`.
#[derive(Clone, Debug, Serialize)]
pub struct GenericFunctional {
    /// Pairs `(beta, c_beta)` for `beta` in `Delta_M + {-theta_M}`.
    #[serde(with = "crate::ring::qser::pairs")]
    pub coeffs: Vec<(Root, Q)>,
}

impl GenericFunctional {
    /// `lambda` on `-theta_M` and `1` on each simple root of `M`.
    pub fn standard(g: &CoxeterGrading, lambda: Q) -> Result<Self> {
        let mut coeffs: Vec<(Root, Q)> = g.levi.delta_m.iter().map(|a| (a.clone(), q(1))).collect();
        coeffs.push((g.levi.theta_m.neg(), lambda));
        let f = GenericFunctional { coeffs };
        f.check()?;
        Ok(f)
    }

    /// Every coefficient must be nonzero.
    pub fn check(&self) -> Result<()> {
        for (b, c) in &self.coeffs {
            if c.is_zero() {
                return Err(Error::Config(format!("functional coefficient on {} must be nonzero", b)));
            }
        }
        Ok(())
    }
}

/// Lie algebra of `T_phi`.
#[derive(Clone, Debug, Serialize)]
pub struct TphiData {
    #[serde(with = "crate::ring::qser::vecvec")]
    pub basis_cochars: Vec<Vec<Q>>,
    pub dim: usize,
    /// `dim Lie(T_phi) ∩ Lie(Z_G)`.
    pub z_g_phi_dim: usize,
}

/// Fiber type of a `T_phi`-weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightKind {
    I,
    II,
    III,
}

/// A `T_phi`-weight of `u_0` with its fiber of roots.
#[derive(Clone, Debug, Serialize)]
pub struct TphiWeight {
    /// Coefficients on `alpha_1 .. alpha_{n-m}`.
    pub coeffs: Vec<i64>,
    pub fiber: Vec<Root>,
    pub kind: WeightKind,
}

/// A vector of `u_0` in root coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootVec {
    #[serde(with = "crate::ring::qser::pairs")]
    pub terms: Vec<(Root, Q)>,
}

impl RootVec {
    pub fn single(r: Root) -> Self {
        RootVec { terms: vec![(r, q(1))] }
    }

    /// Matrix in the defining representation.
    pub fn to_matrix(&self, rep: &MatrixRep) -> QMat {
        let mut m = QMat::zeros(rep.size, rep.size);
        for (r, c) in &self.terms {
            m = m.add(&rep.e(r).scale(c));
        }
        m
    }

    /// Coordinates along an ordered list of roots.
    pub fn coords(&self, basis: &[Root]) -> Vec<Q> {
        basis.iter().map(|b| self.terms.iter().find(|(r, _)| r == b).map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)).collect()
    }
}

/// The splitting of `u_0` into `u_phi` and its complement.
#[derive(Clone, Debug, Serialize)]
pub struct UphiUcBases {
    /// `(weight index, vector)` spanning `u_phi`.
    pub uphi_basis: Vec<(usize, RootVec)>,
    /// `(weight index, vector)` spanning `u^c`.
    pub uc_basis: Vec<(usize, RootVec)>,
    /// Weight indices of `u^c` in the fixed order.
    pub uc_weights: Vec<usize>,
    /// Whether every two-root fiber of `u_phi` is spanned by `E_1 - E_2`.
    pub literal_difference_sign: bool,
}

/// Everything derived from `(family, n, m, functional)`.
#[derive(Clone, Debug)]
pub struct StabilizerContext {
    pub grading: CoxeterGrading,
    pub dec: G0Decomposition,
    pub rep: MatrixRep,
    pub tphi: TphiData,
    pub weights: Vec<TphiWeight>,
    pub functional: GenericFunctional,
    pub f_phi: QMat,
    pub bases: UphiUcBases,
}

impl StabilizerContext {
    /// Build with the standard functional.
    pub fn new(family: Family, n: usize, m: usize, lambda: Q) -> Result<Self> {
        let rs = build_root_system(GroupType::new(family, n))?;
        let levi = rs.admissible_levi(m)?;
        let grading = grade(&rs, &levi);
        let functional = GenericFunctional::standard(&grading, lambda)?;
        Self::with_functional(grading, functional)
    }

    pub fn with_functional(grading: CoxeterGrading, functional: GenericFunctional) -> Result<Self> {
        functional.check()?;
        let dec = delta_g0(&grading)?;
        let rep = MatrixRep::from_root_system(grading.rs.clone())?;
        let tphi = t_phi(&grading);
        let weights = classify_weights(&grading, &tphi)?;
        let f_phi = f_phi(&rep, &functional);
        let bases = uphi_uc_bases(&grading, &rep, &weights, &f_phi, &tphi)?;
        Ok(StabilizerContext { grading, dec, rep, tphi, weights, functional, f_phi, bases })
    }

    pub fn family(&self) -> Family {
        self.grading.family()
    }

    pub fn n(&self) -> usize {
        self.grading.n()
    }

    pub fn m(&self) -> usize {
        self.grading.m()
    }

    pub fn d(&self) -> i64 {
        self.grading.d
    }

    /// Positive grade-0 roots, the basis of `u_0`.
    pub fn u0_roots(&self) -> Vec<Root> {
        self.grading.phi_u0()
    }

    /// Representative root of a weight for ordering purposes.
    pub fn representative(&self, w: usize) -> Root {
        representative(&self.grading, &self.weights[w])
    }
}

/// `Lie(T_phi)`: kernel of `Delta_M` in `Lie(T)`.
pub fn t_phi(g: &CoxeterGrading) -> TphiData {
    let dim = g.rs.dim();
    let mut rows: Vec<Vec<Q>> = g.levi.delta_m.iter().map(|a| a.0.iter().map(|c| q(*c)).collect()).collect();
    if g.family() == Family::SL {
        rows.push(vec![q(1); dim]);
    }
    let basis_cochars = QMat::from_rows(dim, &rows).nullspace();
    let center: Vec<Vec<Q>> = if g.family() == Family::GL { vec![vec![q(1); dim]] } else { vec![] };
    let z = if center.is_empty() {
        0
    } else {
        // dim(A ∩ B) = dim A + dim B - dim(A + B).
        let mut all = basis_cochars.clone();
        all.extend(center.iter().cloned());
        basis_cochars.len() + center.len() - rank_of(&all, dim)
    };
    TphiData { dim: basis_cochars.len(), basis_cochars, z_g_phi_dim: z }
}

/// Coefficients of `gamma` on the simple roots outside `M`.
pub fn pi(g: &CoxeterGrading, gamma: &Root) -> Vec<i64> {
    let c = g.rs.simple_coeffs(gamma);
    c[..g.n() - g.m()].to_vec()
}

/// Restriction of a character to `Lie(T_phi)` in the cocharacter basis.
pub fn restrict(t: &TphiData, gamma: &Root) -> Vec<Q> {
    t.basis_cochars.iter().map(|xi| gamma.pair(xi)).collect()
}

/// Group `u_0` roots into `T_phi`-weight fibers and classify them.
pub fn classify_weights(g: &CoxeterGrading, t: &TphiData) -> Result<Vec<TphiWeight>> {
    let mut fibers: BTreeMap<Vec<i64>, Vec<Root>> = BTreeMap::new();
    for gamma in g.phi_u0() {
        let p = pi(g, &gamma);
        if p.iter().all(|c| *c == 0) {
            return Err(Error::violation("nonzero T_phi-weights on u_0", format!("{} restricts to zero", gamma)));
        }
        fibers.entry(p).or_default().push(gamma);
    }
    let mut out = Vec::new();
    for (coeffs, mut fiber) in fibers {
        fiber.sort_by_key(|r| (g.rs.height_unchecked(r), std::cmp::Reverse(r.clone())));
        // Two roots in one fiber must restrict identically to Lie(T_phi).
        let r0 = restrict(t, &fiber[0]);
        if fiber.iter().any(|r| restrict(t, r) != r0) {
            return Err(Error::Internal(format!("fiber {:?} splits on Lie(T_phi)", coeffs)));
        }
        let kind = match fiber.len() {
            1 => WeightKind::I,
            2 => {
                let h0 = g.rs.height_unchecked(&fiber[0]);
                let h1 = g.rs.height_unchecked(&fiber[1]);
                if h0 == h1 {
                    WeightKind::II
                } else if (h1 - h0).abs() == g.d {
                    WeightKind::III
                } else {
                    return Err(Error::violation("fiber types", format!("fiber {:?} has heights {} and {}", coeffs, h0, h1)));
                }
            }
            k => return Err(Error::violation("fiber types", format!("fiber {:?} has {} roots", coeffs, k))),
        };
        out.push(TphiWeight { coeffs, fiber, kind });
    }
    Ok(out)
}

/// Trace-form dual of the functional, an element of `m_{-1}`.
pub fn f_phi(rep: &MatrixRep, phi: &GenericFunctional) -> QMat {
    let mut f = QMat::zeros(rep.size, rep.size);
    for (beta, c) in &phi.coeffs {
        let em = rep.e(&beta.neg());
        let t = trace_form(rep.e(beta), em);
        f = f.add(&em.scale(&(c / t)));
    }
    f
}

fn representative(g: &CoxeterGrading, w: &TphiWeight) -> Root {
    w.fiber
        .iter()
        .min_by_key(|r| (*r.support().iter().next().unwrap_or(&usize::MAX), g.rs.height_unchecked(r)))
        .unwrap()
        .clone()
}

/// Sort key of the fixed order on `u^c` weights.
pub fn uc_order_key(g: &CoxeterGrading, w: &TphiWeight) -> (usize, i64) {
    let r = representative(g, w);
    (*r.support().iter().next().unwrap_or(&usize::MAX), g.rs.height_unchecked(&r))
}

/// Split `u_0` by a combinatorial rule and confirm with the kernel of `ad f_phi`.
pub fn uphi_uc_bases(g: &CoxeterGrading, rep: &MatrixRep, weights: &[TphiWeight], f: &QMat, t: &TphiData) -> Result<UphiUcBases> {
    let m_minus: Vec<Root> = g.phi_m_minus1();
    let mut uphi_basis = Vec::new();
    let mut uc_basis = Vec::new();
    let mut literal = true;
    for (wi, w) in weights.iter().enumerate() {
        match w.kind {
            WeightKind::I => {
                let gamma = &w.fiber[0];
                if m_minus.iter().all(|a| !g.rs.is_root(&gamma.add(a))) {
                    uphi_basis.push((wi, RootVec::single(gamma.clone())));
                } else {
                    uc_basis.push((wi, RootVec::single(gamma.clone())));
                }
            }
            WeightKind::II | WeightKind::III => {
                let (g1, g2) = (&w.fiber[0], &w.fiber[1]);
                let b1 = rep.e(g1).bracket(f);
                let b2 = rep.e(g2).bracket(f);
                let cols = vec![b1.to_vec(), b2.to_vec()];
                let ns = QMat::from_columns(rep.size * rep.size, &cols).nullspace();
                if ns.len() != 1 || ns[0].iter().any(|c| c.is_zero()) {
                    return Err(Error::violation(
                        "stabilizer of a two-root fiber",
                        format!("fiber {} / {} has centralizer of dimension {}", g1, g2, ns.len()),
                    ));
                }
                let (a, b) = (ns[0][0].clone(), ns[0][1].clone());
                let (a, b) = (q(1), b / a);
                if b != q(-1) {
                    literal = false;
                }
                uphi_basis.push((wi, RootVec { terms: vec![(g1.clone(), a.clone()), (g2.clone(), b.clone())] }));
                uc_basis.push((wi, RootVec { terms: vec![(g1.clone(), a), (g2.clone(), -b)] }));
            }
        }
    }

    // Kernel route on all of u_0.
    let u0 = g.phi_u0();
    let cols: Vec<Vec<Q>> = u0.iter().map(|r| rep.e(r).bracket(f).to_vec()).collect();
    let kernel = if u0.is_empty() { vec![] } else { QMat::from_columns(rep.size * rep.size, &cols).nullspace() };
    let comb: Vec<Vec<Q>> = uphi_basis.iter().map(|(_, v)| v.coords(&u0)).collect();
    let mut joint = kernel.clone();
    joint.extend(comb.iter().cloned());
    let rk_joint = rank_of(&joint, u0.len());
    if kernel.len() != comb.len() || rank_of(&comb, u0.len()) != comb.len() || rk_joint != comb.len() {
        return Err(Error::Internal(format!(
            "u_phi: combinatorial span has dimension {}, kernel of ad f_phi has dimension {}, joint rank {}",
            comb.len(),
            kernel.len(),
            rk_joint
        )));
    }

    let mut uc_weights: Vec<usize> = uc_basis.iter().map(|(w, _)| *w).collect();
    uc_weights.sort_by_key(|w| uc_order_key(g, &weights[*w]));
    let expect = g.n() - g.m();
    if uc_weights.len() != expect {
        return Err(Error::violation("dim u^c = n - m", format!("found {} weights, expected {}", uc_weights.len(), expect)));
    }
    let restr: Vec<Vec<Q>> = uc_weights.iter().map(|w| restrict(t, &weights[*w].fiber[0])).collect();
    if rank_of(&restr, t.dim) != expect {
        return Err(Error::violation("u^c weights form a basis", "restrictions to Lie(T_phi) are dependent"));
    }
    Ok(UphiUcBases { uphi_basis, uc_basis, uc_weights, literal_difference_sign: literal })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tphi_examples() {
        let c = StabilizerContext::new(Family::SOOdd, 3, 2, q(1)).unwrap();
        assert_eq!(c.tphi.basis_cochars, vec![vec![q(1), q(0), q(0)]]);
        let c = StabilizerContext::new(Family::GL, 3, 2, q(1)).unwrap();
        assert_eq!(c.tphi.dim, 2);
        assert_eq!(c.tphi.z_g_phi_dim, 1);
        let c = StabilizerContext::new(Family::Sp, 3, 3, q(1)).unwrap();
        assert_eq!(c.tphi.dim, 0);
    }

    #[test]
    fn sp3_all_kind_one() {
        let c = StabilizerContext::new(Family::Sp, 3, 2, q(1)).unwrap();
        assert!(c.weights.iter().all(|w| w.kind == WeightKind::I));
        assert_eq!(c.weights.len(), c.u0_roots().len());
        assert_eq!(c.bases.uc_weights.len(), 1);
    }

    #[test]
    fn so13_kind_three() {
        let c = StabilizerContext::new(Family::SOOdd, 6, 2, q(1)).unwrap();
        let rs = &c.grading.rs;
        let a = |coeffs: &[i64]| rs.from_simple_coeffs(coeffs);
        let g1 = a(&[1, 1, 1, 1, 0, 0]);
        let g2 = a(&[1, 1, 1, 1, 2, 2]);
        let w = c.weights.iter().find(|w| w.fiber.contains(&g1)).unwrap();
        assert_eq!(w.kind, WeightKind::III);
        assert!(w.fiber.contains(&g2));
    }

    #[test]
    fn so10_only_kind_one() {
        let c = StabilizerContext::new(Family::SOEven, 5, 4, q(1)).unwrap();
        assert_eq!(c.d(), 6);
        assert!(c.weights.iter().all(|w| w.kind == WeightKind::I));
    }
}
