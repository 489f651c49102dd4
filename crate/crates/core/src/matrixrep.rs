//! Defining-representation matrices: the forms `J`, root vectors and adjoint actions.

use crate::error::{Error, Result};
use crate::matrix::{trace_form, Mat, QMat};
use crate::ring::{q, Ring, Q};
use crate::rootsys::{build_root_system, Family, GroupType, Root, RootSystem};

/// The invariant form of the orthogonal and symplectic families (1-based formulas, 0-based storage).
pub fn bilinear_j(g: GroupType) -> Option<QMat> {
    let n = g.n;
    let size = g.matrix_size();
    let sgn = |k: usize| if k % 2 == 0 { 1 } else { -1 };
    match g.family {
        Family::GL | Family::SL => None,
        Family::SOOdd => Some(Mat::from_fn(size, size, |i, j| {
            let (i1, j1) = (i + 1, j + 1);
            if i1 + j1 == 2 * n + 2 {
                q(sgn(i1))
            } else {
                Q::zero()
            }
        })),
        Family::Sp => Some(Mat::from_fn(size, size, |i, j| {
            let (i1, j1) = (i + 1, j + 1);
            if i1 + j1 == 2 * n + 1 {
                q(sgn(i1))
            } else {
                Q::zero()
            }
        })),
        Family::SOEven => Some(Mat::from_fn(size, size, |i, j| {
            let (i1, j1) = (i + 1, j + 1);
            if i1 + j1 == 2 * n + 1 {
                q(sgn(i1.max(j1)))
            } else {
                Q::zero()
            }
        })),
    }
}

/// Torus weight of each standard basis vector.
pub fn basis_weights(g: GroupType) -> Vec<Root> {
    let n = g.n;
    let dim = g.chi_dim();
    let size = g.matrix_size();
    (0..size)
        .map(|a| match g.family {
            Family::GL | Family::SL => Root::chi(dim, a, 1),
            Family::SOOdd => {
                if a < n {
                    Root::chi(dim, a, 1)
                } else if a == n {
                    Root::zero(dim)
                } else {
                    Root::chi(dim, 2 * n - a, -1)
                }
            }
            Family::Sp | Family::SOEven => {
                if a < n {
                    Root::chi(dim, a, 1)
                } else {
                    Root::chi(dim, 2 * n - 1 - a, -1)
                }
            }
        })
        .collect()
}

/// Matrix realization of a classical Lie algebra with chosen root vectors.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    pub rs: RootSystem,
    pub size: usize,
    pub j: Option<QMat>,
    pub weights: Vec<Root>,
    /// `E_gamma` for each root, indexed like `rs.roots`.
    pub root_vectors: Vec<QMat>,
    /// First nonzero entry (row-major) of each root vector.
    pub pivot: Vec<(usize, usize)>,
}

impl MatrixRep {
    /// Build from a group type.
    pub fn new(g: GroupType) -> Result<Self> {
        let rs = build_root_system(g)?;
        Self::from_root_system(rs)
    }

    pub fn from_root_system(rs: RootSystem) -> Result<Self> {
        let g = rs.group;
        let size = g.matrix_size();
        let j = bilinear_j(g);
        let weights = basis_weights(g);
        let mut root_vectors = vec![QMat::zeros(size, size); rs.roots.len()];
        let mut pivot = vec![(0, 0); rs.roots.len()];
        for gamma in &rs.positive_roots {
            let e = eigenvector(size, &weights, j.as_ref(), gamma)?;
            let et = e.transpose();
            let ip = rs.root_index(gamma).expect("positive root indexed");
            let im = rs.root_index(&gamma.neg()).expect("negative root indexed");
            pivot[ip] = first_nonzero(&e);
            pivot[im] = first_nonzero(&et);
            root_vectors[ip] = e;
            root_vectors[im] = et;
        }
        Ok(MatrixRep { rs, size, j, weights, root_vectors, pivot })
    }

    pub fn group(&self) -> GroupType {
        self.rs.group
    }

    /// `E_gamma`.
    pub fn root_vector(&self, gamma: &Root) -> Result<&QMat> {
        let i = self
            .rs
            .root_index(gamma)
            .ok_or_else(|| Error::Domain(format!("{} is not a root", gamma)))?;
        Ok(&self.root_vectors[i])
    }

    /// `E_gamma` for a known root; panics otherwise.
    pub fn e(&self, gamma: &Root) -> &QMat {
        self.root_vector(gamma).expect("root vector of a root")
    }

    /// Diagonal matrix of a cocharacter `xi` (a vector over the character coordinates).
    pub fn torus(&self, xi: &[Q]) -> QMat {
        let mut m = QMat::zeros(self.size, self.size);
        for (a, w) in self.weights.iter().enumerate() {
            m.set(a, a, w.pair(xi));
        }
        m
    }

    /// Lie algebra membership.
    pub fn in_lie<R: Ring>(&self, x: &Mat<R>) -> bool {
        if x.rows != self.size || x.cols != self.size {
            return false;
        }
        match self.group().family {
            Family::GL => true,
            Family::SL => x.trace().is_zero(),
            _ => {
                let j = self.j.as_ref().unwrap().map(R::from_q);
                x.mul(&j).add(&j.mul(&x.transpose())).is_zero()
            }
        }
    }

    /// Group membership for the matrix groups (determinant one for SL).
    pub fn in_group(&self, a: &QMat) -> bool {
        match self.group().family {
            Family::GL => !a.det().is_zero(),
            Family::SL => a.det() == q(1),
            _ => {
                let j = self.j.as_ref().unwrap();
                &a.mul(j).mul(&a.transpose()) == j
            }
        }
    }

    /// Decompose `x` into a cocharacter (diagonal part) and root coordinates.
    pub fn decompose<R: Ring>(&self, x: &Mat<R>) -> (Vec<R>, Vec<R>) {
        let dim = self.rs.dim();
        let mut xi = vec![R::zero(); dim];
        for (a, w) in self.weights.iter().enumerate() {
            if let Some(i) = w.0.iter().position(|c| *c == 1) {
                xi[i] = x.get(a, a).clone();
            }
        }
        let coeffs = (0..self.rs.roots.len())
            .map(|k| {
                let (a, b) = self.pivot[k];
                x.get(a, b).scale(&(q(1) / self.root_vectors[k].get(a, b).clone()))
            })
            .collect();
        (xi, coeffs)
    }

    /// Root coordinate of `x` along `E_gamma`.
    pub fn coord<R: Ring>(&self, x: &Mat<R>, gamma: &Root) -> R {
        let k = self.rs.root_index(gamma).expect("root");
        let (a, b) = self.pivot[k];
        x.get(a, b).scale(&(q(1) / self.root_vectors[k].get(a, b).clone()))
    }

    /// Reassemble from [`Self::decompose`] output.
    pub fn compose<R: Ring>(&self, xi: &[R], coeffs: &[R]) -> Mat<R> {
        let mut m = Mat::<R>::zeros(self.size, self.size);
        for (a, w) in self.weights.iter().enumerate() {
            let mut v = R::zero();
            for (c, x) in w.0.iter().zip(xi) {
                if *c != 0 {
                    v = v.add(&x.scale(&q(*c)));
                }
            }
            m.set(a, a, v);
        }
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = &self.root_vectors[k];
            for i in 0..self.size {
                for jj in 0..self.size {
                    let v = e.get(i, jj);
                    if !v.is_zero() {
                        let cur = m.get(i, jj).add(&c.scale(v));
                        m.set(i, jj, cur);
                    }
                }
            }
        }
        m
    }

    /// `E_gamma` lifted to an arbitrary coefficient ring.
    pub fn e_in<R: Ring>(&self, gamma: &Root) -> Mat<R> {
        self.e(gamma).map(R::from_q)
    }

    /// Basis of the Cartan subalgebra as cocharacters.
    pub fn cartan_cochars(&self) -> Vec<Vec<Q>> {
        let dim = self.rs.dim();
        match self.group().family {
            Family::SL => (0..dim - 1)
                .map(|i| {
                    let mut v = vec![Q::zero(); dim];
                    v[i] = q(1);
                    v[i + 1] = q(-1);
                    v
                })
                .collect(),
            _ => (0..dim)
                .map(|i| {
                    let mut v = vec![Q::zero(); dim];
                    v[i] = q(1);
                    v
                })
                .collect(),
        }
    }

    /// Dimension of the Lie algebra.
    pub fn lie_dim(&self) -> usize {
        self.cartan_cochars().len() + self.rs.roots.len()
    }

    /// Ad-action `g X g^-1`.
    pub fn adjoint(&self, g: &QMat, x: &QMat) -> Result<QMat> {
        let gi = g.inverse().ok_or_else(|| Error::Domain("adjoint by a singular matrix".into()))?;
        Ok(g.mul(x).mul(&gi))
    }

    /// Structure constant `N_{a,b}` with `[E_a, E_b] = N E_{a+b}`.
    pub fn structure_constant(&self, a: &Root, b: &Root) -> Option<Q> {
        let s = a.add(b);
        if !self.rs.is_root(&s) {
            return None;
        }
        let br = self.e(a).bracket(self.e(b));
        Some(self.coord(&br, &s))
    }

    /// Trace form of two root vectors `tr(E_a E_{-a})`.
    pub fn pairing(&self, a: &Root) -> Q {
        trace_form(self.e(a), self.e(&a.neg()))
    }
}

/// Nilpotent exponential with a nilpotency check.
pub fn exp_nilpotent(x: &QMat) -> Result<QMat> {
    let n = x.rows;
    let mut p = QMat::identity(n);
    for _ in 0..n {
        p = p.mul(x);
    }
    if !p.is_zero() {
        return Err(Error::Domain("exponential requested for a non-nilpotent matrix".into()));
    }
    Ok(x.exp_nilpotent())
}

fn first_nonzero(m: &QMat) -> (usize, usize) {
    for i in 0..m.rows {
        for j in 0..m.cols {
            if !m.get(i, j).is_zero() {
                return (i, j);
            }
        }
    }
    panic!("zero root vector")
}

/// Solve for the root space of `gamma` inside the Lie algebra.
fn eigenvector(size: usize, weights: &[Root], j: Option<&QMat>, gamma: &Root) -> Result<QMat> {
    let pos: Vec<(usize, usize)> = (0..size)
        .flat_map(|a| (0..size).map(move |b| (a, b)))
        .filter(|&(a, b)| weights[a].sub(&weights[b]) == *gamma)
        .collect();
    if pos.is_empty() {
        return Err(Error::Domain(format!("no matrix entries of weight {}", gamma)));
    }
    let vecs: Vec<Vec<Q>> = match j {
        None => vec![{
            let mut v = vec![Q::zero(); pos.len()];
            v[0] = q(1);
            v
        }],
        Some(j) => {
            // Rows: entries of XJ + JX^T as linear forms in the unknowns.
            let mut rows = Vec::new();
            for r in 0..size {
                for c in 0..size {
                    let mut row = vec![Q::zero(); pos.len()];
                    let mut any = false;
                    for (k, &(a, b)) in pos.iter().enumerate() {
                        // (XJ)_{rc} = sum_t X_{rt} J_{tc}, contributes when a == r, t == b.
                        if a == r && !j.get(b, c).is_zero() {
                            row[k] += j.get(b, c);
                            any = true;
                        }
                        // (J X^T)_{rc} = sum_t J_{rt} X_{ct}, contributes when c == a, t == b.
                        if a == c && !j.get(r, b).is_zero() {
                            row[k] += j.get(r, b);
                            any = true;
                        }
                    }
                    if any {
                        rows.push(row);
                    }
                }
            }
            QMat::from_rows(pos.len(), &rows).nullspace()
        }
    };
    if vecs.len() != 1 {
        return Err(Error::Internal(format!("root space of {} has dimension {}", gamma, vecs.len())));
    }
    let v = &vecs[0];
    let mut e = QMat::zeros(size, size);
    for (k, &(a, b)) in pos.iter().enumerate() {
        e.set(a, b, v[k].clone());
    }
    let (a, b) = first_nonzero(&e);
    let s = q(1) / e.get(a, b).clone();
    Ok(e.scale(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::Family::*;

    #[test]
    fn gl_root_vector_is_unit() {
        let r = MatrixRep::new(GroupType::new(GL, 2)).unwrap();
        assert_eq!(r.e(&Root(vec![1, -1, 0])), &QMat::unit(3, 0, 1));
    }

    #[test]
    fn sp4_long_root_vector() {
        let r = MatrixRep::new(GroupType::new(Sp, 2)).unwrap();
        assert_eq!(r.e(&Root(vec![0, 2])), &QMat::unit(4, 1, 2));
    }

    #[test]
    fn eigen_and_membership_all_families() {
        for f in [GL, SL, SOOdd, Sp, SOEven] {
            for n in 2..=4 {
                let r = MatrixRep::new(GroupType::new(f, n)).unwrap();
                let cochars = r.cartan_cochars();
                for (k, gamma) in r.rs.roots.iter().enumerate() {
                    let e = &r.root_vectors[k];
                    assert!(r.in_lie(e), "{:?} {} {}", f, n, gamma);
                    for xi in &cochars {
                        let h = r.torus(xi);
                        assert_eq!(h.bracket(e), e.scale(&gamma.pair(xi)));
                    }
                    assert!(!r.pairing(gamma).is_zero());
                }
            }
        }
    }

    #[test]
    fn decompose_roundtrip() {
        let r = MatrixRep::new(GroupType::new(SOOdd, 3)).unwrap();
        let coeffs: Vec<Q> = (0..r.rs.roots.len()).map(|k| q(k as i64 - 5)).collect();
        let xi = vec![q(1), q(-2), q(3)];
        let x = r.compose(&xi, &coeffs);
        assert!(r.in_lie(&x));
        let (xi2, c2) = r.decompose(&x);
        assert_eq!(xi2, xi);
        assert_eq!(c2, coeffs);
    }

    #[test]
    fn exp_rejects_non_nilpotent() {
        assert!(exp_nilpotent(&QMat::identity(2)).is_err());
        assert_eq!(exp_nilpotent(&QMat::unit(2, 0, 1)).unwrap(), QMat::identity(2).add(&QMat::unit(2, 0, 1)));
    }
}
