//! Dense matrices over a [`Ring`], with exact linear algebra over `Q`.

use crate::ring::{q, Ring, Q};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<R> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<R>,
}

/// Rational matrix.
pub type QMat = Mat<Q>;

impl<R: Ring> Mat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Matrix unit `e_{ij}` (zero-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, R::one());
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|x| x.scale(c))
    }

    pub fn scale_r(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_exact_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Commutator `[self, o]`.
    pub fn bracket(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> R {
        let mut t = R::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t.add(self.get(i, i));
        }
        t
    }

    /// Coefficients `c_k`, `k = 0..=N`, of `det(lambda + self) = sum_k c_k lambda^(N-k)`.
    ///
    /// Division-free (Berkowitz), so it works over any commutative ring.
    pub fn char_coeffs(&self) -> Vec<R> {
        assert!(self.is_square());
        let n = self.rows;
        // Berkowitz gives det(lambda - A); substitute A -> -A.
        let a = self.neg();
        let mut poly: Vec<R> = vec![R::one()];
        for k in 0..n {
            // Leading principal block of size k+1; r = row k cols < k, c = col k rows < k, akk.
            let akk = a.get(k, k).clone();
            let mut col: Vec<R> = (0..k).map(|i| a.get(i, k).clone()).collect();
            let row: Vec<R> = (0..k).map(|j| a.get(k, j).clone()).collect();
            // Toeplitz column: 1, -akk, -R C, -R A C, ...
            let mut t: Vec<R> = Vec::with_capacity(k + 2);
            t.push(R::one());
            t.push(akk.neg());
            for _ in 0..k {
                let mut s = R::zero();
                for j in 0..k {
                    s = s.add(&row[j].mul(&col[j]));
                }
                t.push(s.neg());
                let mut nc = vec![R::zero(); k];
                for i in 0..k {
                    let mut acc = R::zero();
                    for j in 0..k {
                        let x = a.get(i, j);
                        if !x.is_exact_zero() && !col[j].is_exact_zero() {
                            acc = acc.add(&x.mul(&col[j]));
                        }
                    }
                    nc[i] = acc;
                }
                col = nc;
            }
            let mut np = vec![R::zero(); k + 2];
            for (i, ti) in t.iter().enumerate() {
                if ti.is_exact_zero() {
                    continue;
                }
                for (j, pj) in poly.iter().enumerate() {
                    if i + j < k + 2 {
                        np[i + j] = np[i + j].add(&ti.mul(pj));
                    }
                }
            }
            poly = np;
        }
        poly
    }

    /// Determinant via the characteristic coefficients.
    pub fn det(&self) -> R {
        let n = self.rows;
        self.char_coeffs()[n].clone()
    }

    /// Determinant by Laplace expansion over column subsets; `O(n 2^n)` ring products.
    ///
    /// Cheaper than [`Self::det`] for small matrices with large polynomial entries.
    pub fn det_expansion(&self) -> R {
        assert!(self.is_square() && self.rows < 24);
        let n = self.rows;
        let mut minors: std::collections::HashMap<u32, R> = std::collections::HashMap::new();
        minors.insert(0, R::one());
        for r in 0..n {
            let mut next: std::collections::HashMap<u32, R> = std::collections::HashMap::new();
            for (mask, m) in &minors {
                if m.is_zero() {
                    continue;
                }
                for c in 0..n {
                    if mask & (1 << c) != 0 || self.get(r, c).is_zero() {
                        continue;
                    }
                    // Sign from the number of used columns to the right of c.
                    let sign_odd = (mask >> (c + 1)).count_ones() % 2 == 1;
                    let mut t = m.mul(self.get(r, c));
                    if sign_odd {
                        t = t.neg();
                    }
                    let key = mask | (1 << c);
                    let cur = next.remove(&key).unwrap_or_else(R::zero);
                    next.insert(key, cur.add(&t));
                }
            }
            minors = next;
        }
        minors.remove(&((1u32 << n) - 1)).unwrap_or_else(R::zero)
    }

    /// Pfaffian of an antisymmetric matrix of even size.
    pub fn pfaffian(&self) -> R {
        assert!(self.is_square() && self.rows % 2 == 0);
        let idx: Vec<usize> = (0..self.rows).collect();
        self.pf_rec(&idx)
    }

    fn pf_rec(&self, idx: &[usize]) -> R {
        if idx.is_empty() {
            return R::one();
        }
        let i = idx[0];
        let mut acc = R::zero();
        for (p, &j) in idx.iter().enumerate().skip(1) {
            let a = self.get(i, j);
            if a.is_exact_zero() {
                continue;
            }
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(k, _)| *k != 0 && *k != p).map(|(_, &x)| x).collect();
            let sub = a.mul(&self.pf_rec(&rest));
            acc = if p % 2 == 1 { acc.add(&sub) } else { acc.sub(&sub) };
        }
        acc
    }

    /// Exponential of a nilpotent matrix as a finite sum.
    pub fn exp_nilpotent(&self) -> Self {
        let n = self.rows;
        let mut out = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=n {
            term = term.mul(self).scale(&crate::ring::qf(1, k as i64));
            if term.is_zero() {
                break;
            }
            out = out.add(&term);
        }
        out
    }

    /// Flatten to a vector in row-major order.
    pub fn to_vec(&self) -> Vec<R> {
        self.data.clone()
    }
}

impl Mat<Q> {
    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r >= m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = q(1) / m.get(r, c).clone();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let (r, piv) = self.rref();
        let mut out = Vec::new();
        for f in 0..self.cols {
            if piv.contains(&f) {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[f] = q(1);
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = -r.get(row, f).clone();
            }
            out.push(v);
        }
        out
    }

    /// Solve `self * x = b` for one solution, or `None` if inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| if j < self.cols { self.get(i, j).clone() } else { b[i].clone() });
        let (r, piv) = aug.rref();
        if piv.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &pc) in piv.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = Mat::from_fn(n, 2 * n, |i, j| if j < n { self.get(i, j).clone() } else if j - n == i { q(1) } else { Q::zero() });
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r.get(i, j + n).clone()))
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(rows: usize, cols: &[Vec<Q>]) -> QMat {
        Mat::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    /// Matrix with the given vectors as rows.
    pub fn from_rows(cols: usize, rows: &[Vec<Q>]) -> QMat {
        Mat::from_fn(rows.len(), cols, |i, j| rows[i][j].clone())
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows).map(|i| (0..self.cols).fold(Q::zero(), |acc, j| acc + self.get(i, j) * &v[j])).collect()
    }
}

/// Rank of a list of vectors.
pub fn rank_of(vs: &[Vec<Q>], dim: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    Mat::from_rows(dim, vs).rank()
}

/// Trace form `tr(a b)`.
pub fn trace_form<R: Ring>(a: &Mat<R>, b: &Mat<R>) -> R {
    let mut t = R::zero();
    for i in 0..a.rows {
        for k in 0..a.cols {
            t = t.add(&a.get(i, k).mul(b.get(k, i)));
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{qf, MPoly};

    fn qm(rows: &[&[i64]]) -> QMat {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| q(rows[i][j]))
    }

    #[test]
    fn det_expansion_matches() {
        let a = qm(&[&[2, -1, 0, 3], &[1, 4, 2, 0], &[0, 5, -3, 1], &[7, 0, 1, 1]]);
        assert_eq!(a.det_expansion(), a.det());
        let b = qm(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert_eq!(b.det_expansion(), q(1));
    }

    #[test]
    fn char_coeffs_small() {
        let a = qm(&[&[1, 2], &[3, 4]]);
        // det(l + A) = l^2 + 5 l + (4 - 6)
        assert_eq!(a.char_coeffs(), vec![q(1), q(5), q(-2)]);
        assert_eq!(a.det(), q(-2));
    }

    #[test]
    fn inverse_and_solve() {
        let a = qm(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMat::identity(3));
        let x = a.solve(&[q(1), q(2), q(3)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![q(1), q(2), q(3)]);
        assert_eq!(a.det(), q(18));
    }

    #[test]
    fn nullspace_dim() {
        let a = qm(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn pfaffian_squares_to_det() {
        let x: Vec<MPoly> = (0..6).map(MPoly::var).collect();
        let mut m = Mat::<MPoly>::zeros(4, 4);
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                m.set(i, j, x[k].clone());
                m.set(j, i, x[k].neg());
                k += 1;
            }
        }
        let pf = m.pfaffian();
        assert_eq!(pf.mul(&pf), m.det());
    }

    #[test]
    fn exp_of_nilpotent() {
        let n = qm(&[&[0, 1], &[0, 0]]).scale(&qf(1, 2));
        let e = n.exp_nilpotent();
        assert_eq!(e.mul(&n.neg().exp_nilpotent()), QMat::identity(2));
    }
}

/// Z-basis of the integer kernel `{x in Z^dim : rows x = 0}` via unimodular column operations.
pub fn integer_kernel(rows: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1 } else { 0 }).collect()).collect();
    // Column c of u is stored as u[*][c].
    let col_op = |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, a: usize, b: usize, x: i128, y: i128, z: i128, w: i128| {
        // (col_a, col_b) <- (x col_a + y col_b, z col_a + w col_b)
        for row in m.iter_mut().chain(u.iter_mut()) {
            let (ca, cb) = (row[a], row[b]);
            row[a] = x * ca + y * cb;
            row[b] = z * ca + w * cb;
        }
    };
    let mut p = 0;
    for k in 0..m.len() {
        if p >= dim {
            break;
        }
        // Collapse row k onto column p with extended gcd steps.
        for c in p + 1..dim {
            let (a, b) = (m[k][p], m[k][c]);
            if b == 0 {
                continue;
            }
            let (g, s, t) = ext_gcd(a, b);
            // [s t; -b/g a/g] has determinant 1.
            col_op(&mut m, &mut u, p, c, s, t, -b / g, a / g);
        }
        if m[k][p] != 0 {
            p += 1;
        }
    }
    (p..dim).map(|c| (0..dim).map(|i| u[i][c] as i64).collect()).collect()
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        // g = s b + t (a mod b) = s b + t (a - floor(a/b) b)
        (g, t, s - t * a.div_euclid(b))
    }
}

#[cfg(test)]
mod kernel_tests {
    use super::*;

    #[test]
    fn integer_kernel_is_saturated() {
        // x + y + z = 0 and 2x - 2y = 0 has kernel spanned by (1, 1, -2).
        let k = integer_kernel(&[vec![1, 1, 1], vec![2, -2, 0]], 3);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!(v == &vec![1, 1, -2] || v == &vec![-1, -1, 2]);
        let k = integer_kernel(&[vec![2, 4, 6]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(2 * v[0] + 4 * v[1] + 6 * v[2], 0);
        }
        // Saturation: the index of span(k) in the kernel lattice is 1, checked via 2x2 minors gcd.
        let minors = [k[0][0] * k[1][1] - k[0][1] * k[1][0], k[0][0] * k[1][2] - k[0][2] * k[1][0], k[0][1] * k[1][2] - k[0][2] * k[1][1]];
        let g = minors.iter().fold(0i64, |g, x| num_integer::gcd(g, *x));
        // Primitive normal vector (1,2,3) has gcd 1, so the minors are a primitive multiple of it.
        assert_eq!(g, 1);
    }
}
