//! Root data of the classical groups in the character basis `chi_1..chi_N`.

use crate::error::{Error, Result};
use crate::ring::{q, qf, Q};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

/// Classical family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    GL,
    SL,
    SOOdd,
    Sp,
    SOEven,
}

impl Family {
    /// Parse the command line spelling (`gl`, `sl`, `so-odd`, `sp`, `so-even`).
    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "gl" => Some(Family::GL),
            "sl" => Some(Family::SL),
            "so-odd" | "b" => Some(Family::SOOdd),
            "sp" | "c" => Some(Family::Sp),
            "so-even" | "d" => Some(Family::SOEven),
            _ => None,
        }
    }

    /// Cartan letter.
    pub fn letter(self) -> char {
        match self {
            Family::GL | Family::SL => 'A',
            Family::SOOdd => 'B',
            Family::Sp => 'C',
            Family::SOEven => 'D',
        }
    }

    /// True for GL and SL.
    pub fn is_type_a(self) -> bool {
        matches!(self, Family::GL | Family::SL)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::GL => "gl",
            Family::SL => "sl",
            Family::SOOdd => "so-odd",
            Family::Sp => "sp",
            Family::SOEven => "so-even",
        };
        write!(f, "{}", s)
    }
}

/// A classical group: family and rank parameter `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupType {
    pub family: Family,
    pub n: usize,
}

impl GroupType {
    pub fn new(family: Family, n: usize) -> Self {
        GroupType { family, n }
    }

    /// Size of the defining matrices.
    pub fn matrix_size(&self) -> usize {
        match self.family {
            Family::GL | Family::SL => self.n + 1,
            Family::SOOdd => 2 * self.n + 1,
            Family::Sp | Family::SOEven => 2 * self.n,
        }
    }

    /// Number of character coordinates.
    pub fn chi_dim(&self) -> usize {
        if self.family.is_type_a() {
            self.n + 1
        } else {
            self.n
        }
    }

    /// Minimal `n` for which the root datum is built.
    pub fn min_rank(family: Family) -> usize {
        if family == Family::SOEven {
            2
        } else {
            1
        }
    }

    /// Minimal `n` for which admissible Levi data is defined.
    pub fn min_admissible_rank(family: Family) -> usize {
        match family {
            Family::GL | Family::SL => 1,
            Family::SOOdd => 2,
            Family::Sp => 3,
            Family::SOEven => 4,
        }
    }

    /// Check the construction bound.
    pub fn validate(&self) -> Result<()> {
        let lo = Self::min_rank(self.family);
        if self.n < lo {
            return Err(Error::Config(format!("{} requires n >= {}, got n = {}", self.family, lo, self.n)));
        }
        Ok(())
    }
}

/// A root in character coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn zero(dim: usize) -> Self {
        Root(vec![0; dim])
    }

    /// `c chi_i` (zero-based index).
    pub fn chi(dim: usize, i: usize, c: i64) -> Self {
        let mut v = vec![0; dim];
        v[i] = c;
        Root(v)
    }

    pub fn add(&self, o: &Root) -> Root {
        Root(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Root) -> Root {
        Root(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: i64) -> Root {
        Root(self.0.iter().map(|a| a * c).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| *a == 0)
    }

    /// Standard dot product of character coordinates.
    pub fn dot(&self, o: &Root) -> i64 {
        self.0.iter().zip(&o.0).map(|(a, b)| a * b).sum()
    }

    /// Squared length in the standard form.
    pub fn norm2(&self) -> i64 {
        self.dot(self)
    }

    /// Indices with a nonzero coefficient.
    pub fn support(&self) -> BTreeSet<usize> {
        self.0.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, _)| i).collect()
    }

    /// Pair with a rational cocharacter.
    pub fn pair(&self, xi: &[Q]) -> Q {
        self.0.iter().zip(xi).fold(q(0), |acc, (a, x)| acc + x * q(*a))
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.0.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else { "+" };
            let mag = c.abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            parts.push(format!("{}{}x{}", sign, coef, i + 1));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let s = parts.concat();
        write!(f, "{}", s.strip_prefix('+').unwrap_or(&s))
    }
}

/// Signed permutation of character coordinates: `(w v)[perm[i]] = sign[i] v[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignedPerm {
    pub perm: Vec<usize>,
    pub sign: Vec<i64>,
}

impl SignedPerm {
    pub fn identity(dim: usize) -> Self {
        SignedPerm { perm: (0..dim).collect(), sign: vec![1; dim] }
    }

    pub fn apply(&self, v: &Root) -> Root {
        let mut out = vec![0; v.0.len()];
        for i in 0..v.0.len() {
            out[self.perm[i]] = self.sign[i] * v.0[i];
        }
        Root(out)
    }

    pub fn apply_q(&self, v: &[Q]) -> Vec<Q> {
        let mut out = vec![q(0); v.len()];
        for i in 0..v.len() {
            out[self.perm[i]] = &v[i] * q(self.sign[i]);
        }
        out
    }

    /// `self` after `o`.
    pub fn compose(&self, o: &SignedPerm) -> SignedPerm {
        let dim = self.perm.len();
        let mut perm = vec![0; dim];
        let mut sign = vec![1; dim];
        for i in 0..dim {
            let j = o.perm[i];
            perm[i] = self.perm[j];
            sign[i] = o.sign[i] * self.sign[j];
        }
        SignedPerm { perm, sign }
    }
}

/// Full root datum of a classical group.
#[derive(Clone, Debug, Serialize)]
pub struct RootSystem {
    pub group: GroupType,
    pub roots: Vec<Root>,
    pub positive_roots: Vec<Root>,
    pub simple_roots: Vec<Root>,
    #[serde(with = "crate::ring::qser::vec")]
    pub rho_check: Vec<Q>,
    pub weyl_generators: Vec<SignedPerm>,
    #[serde(skip)]
    index: HashMap<Root, usize>,
}

/// Levi data attached to `m` trailing simple roots.
#[derive(Clone, Debug, Serialize)]
pub struct LeviData {
    pub m: usize,
    /// Zero-based indices of `Delta_M` inside the simple roots.
    pub delta_m_idx: Vec<usize>,
    pub delta_m: Vec<Root>,
    pub theta_m: Root,
    pub d: i64,
}

/// Build the root datum.
pub fn build_root_system(group: GroupType) -> Result<RootSystem> {
    group.validate()?;
    let n = group.n;
    let dim = group.chi_dim();
    let fam = group.family;
    let e = |i: usize| Root::chi(dim, i, 1);

    let mut roots = Vec::new();
    match fam {
        Family::GL | Family::SL => {
            for i in 0..dim {
                for j in 0..dim {
                    if i != j {
                        roots.push(e(i).sub(&e(j)));
                    }
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in i + 1..n {
                    for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        roots.push(e(i).scale(si).add(&e(j).scale(sj)));
                    }
                }
                match fam {
                    Family::SOOdd => {
                        roots.push(e(i));
                        roots.push(e(i).neg());
                    }
                    Family::Sp => {
                        roots.push(e(i).scale(2));
                        roots.push(e(i).scale(-2));
                    }
                    _ => {}
                }
            }
        }
    }

    let rho_check: Vec<Q> = match fam {
        Family::GL | Family::SL => (1..=dim).map(|i| qf(n as i64 - 2 * i as i64 + 2, 2)).collect(),
        Family::SOOdd => (1..=n).map(|i| q((n - i + 1) as i64)).collect(),
        Family::Sp => (1..=n).map(|i| qf(2 * (n as i64 - i as i64) + 1, 2)).collect(),
        Family::SOEven => (1..=n).map(|i| q((n - i) as i64)).collect(),
    };

    let mut simple_roots = Vec::new();
    let last = if fam.is_type_a() { n } else { n - 1 };
    for i in 0..last {
        simple_roots.push(e(i).sub(&e(i + 1)));
    }
    match fam {
        Family::SOOdd => simple_roots.push(e(n - 1)),
        Family::Sp => simple_roots.push(e(n - 1).scale(2)),
        Family::SOEven => simple_roots.push(e(n - 2).add(&e(n - 1))),
        _ => {}
    }

    let mut positive_roots: Vec<Root> = roots.iter().filter(|r| r.pair(&rho_check) > q(0)).cloned().collect();
    positive_roots.sort_by(|a, b| {
        let ha = a.pair(&rho_check);
        let hb = b.pair(&rho_check);
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    roots.sort();
    let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();

    let mut weyl_generators = Vec::new();
    for i in 0..last {
        let mut w = SignedPerm::identity(dim);
        w.perm.swap(i, i + 1);
        weyl_generators.push(w);
    }
    match fam {
        Family::SOOdd | Family::Sp => {
            let mut w = SignedPerm::identity(dim);
            w.sign[n - 1] = -1;
            weyl_generators.push(w);
        }
        Family::SOEven => {
            let mut w = SignedPerm::identity(dim);
            w.perm.swap(n - 2, n - 1);
            w.sign[n - 2] = -1;
            w.sign[n - 1] = -1;
            weyl_generators.push(w);
        }
        _ => {}
    }

    Ok(RootSystem { group, roots, positive_roots, simple_roots, rho_check, weyl_generators, index })
}

impl RootSystem {
    pub fn n(&self) -> usize {
        self.group.n
    }

    pub fn family(&self) -> Family {
        self.group.family
    }

    pub fn dim(&self) -> usize {
        self.group.chi_dim()
    }

    pub fn is_root(&self, r: &Root) -> bool {
        self.index.contains_key(r)
    }

    /// Position of a root in `roots`.
    pub fn root_index(&self, r: &Root) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn is_positive(&self, r: &Root) -> bool {
        r.pair(&self.rho_check) > q(0)
    }

    /// Height `<rho_check, r>`; defined on roots and zero.
    pub fn height(&self, r: &Root) -> Result<i64> {
        if !r.is_zero() && !self.is_root(r) {
            return Err(Error::Domain(format!("{} is not a root of {}{}", r, self.family(), self.n())));
        }
        Ok(self.height_unchecked(r))
    }

    /// Height of any element of the root lattice.
    pub fn height_unchecked(&self, r: &Root) -> i64 {
        let h = r.pair(&self.rho_check);
        debug_assert!(h.is_integer());
        h.to_integer().try_into().expect("height fits in i64")
    }

    /// Coefficients in the simple-root basis (root lattice elements only).
    pub fn simple_coeffs(&self, r: &Root) -> Vec<i64> {
        let n = self.n();
        let v = &r.0;
        let mut partial = Vec::with_capacity(v.len());
        let mut s = 0;
        for x in v {
            s += x;
            partial.push(s);
        }
        match self.family() {
            Family::GL | Family::SL | Family::SOOdd => partial[..n].to_vec(),
            Family::Sp => {
                let mut c = partial[..n].to_vec();
                c[n - 1] /= 2;
                c
            }
            Family::SOEven => {
                let mut c = partial[..n].to_vec();
                let top = partial[n - 1] / 2;
                c[n - 2] = partial[n - 2] - top;
                c[n - 1] = top;
                c
            }
        }
    }

    /// Inverse of [`Self::simple_coeffs`].
    pub fn from_simple_coeffs(&self, c: &[i64]) -> Root {
        let mut r = Root::zero(self.dim());
        for (ci, a) in c.iter().zip(&self.simple_roots) {
            r = r.add(&a.scale(*ci));
        }
        r
    }

    /// Coxeter number and sorted fundamental degrees.
    pub fn coxeter_and_degrees(&self) -> (i64, Vec<i64>) {
        coxeter_and_degrees(self.group)
    }

    /// Highest root of the sub-system spanned by the simple roots with the given indices.
    pub fn highest_root_of(&self, idx: &[usize]) -> Option<Root> {
        self.positive_roots
            .iter()
            .filter(|r| {
                let c = self.simple_coeffs(r);
                c.iter().enumerate().all(|(j, cj)| *cj == 0 || idx.contains(&j))
            })
            .max_by_key(|r| self.height_unchecked(r))
            .cloned()
    }

    /// Order of the Weyl group by orbit enumeration of a regular vector.
    pub fn weyl_order_by_enumeration(&self) -> usize {
        let dim = self.dim();
        // A regular vector: generic strictly decreasing positive entries.
        let v: Vec<i64> = (0..dim).map(|i| (2 * (dim - i) + 1) as i64 * 7 + i as i64).collect();
        let start = Root(v);
        let mut seen: BTreeSet<Root> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for g in &self.weyl_generators {
                let y = g.apply(&x);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.len()
    }

    /// All Weyl group elements by breadth-first search.
    pub fn weyl_elements(&self) -> Vec<SignedPerm> {
        let id = SignedPerm::identity(self.dim());
        let mut seen: std::collections::HashSet<SignedPerm> = std::collections::HashSet::new();
        let mut out = vec![id.clone()];
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.weyl_generators {
                let y = g.compose(&x);
                if seen.insert(y.clone()) {
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        out
    }

    /// Admissible Levi with `m` simple roots.
    pub fn admissible_levi(&self, m: usize) -> Result<LeviData> {
        admissible_levi(self, m)
    }
}

/// Expected Weyl group order.
pub fn weyl_order_formula(g: GroupType) -> usize {
    let n = g.n;
    let fact = |k: usize| (1..=k).product::<usize>();
    match g.family {
        Family::GL | Family::SL => fact(n + 1),
        Family::SOOdd | Family::Sp => (1 << n) * fact(n),
        Family::SOEven => (1 << (n - 1)) * fact(n),
    }
}

/// Coxeter number and sorted fundamental degrees (GL includes degree 1).
pub fn coxeter_and_degrees(g: GroupType) -> (i64, Vec<i64>) {
    let n = g.n as i64;
    let (h, mut deg): (i64, Vec<i64>) = match g.family {
        Family::GL => (n + 1, (1..=n + 1).collect()),
        Family::SL => (n + 1, (2..=n + 1).collect()),
        Family::SOOdd | Family::Sp => (2 * n, (1..=n).map(|i| 2 * i).collect()),
        Family::SOEven => {
            let mut v: Vec<i64> = (1..n).map(|i| 2 * i).collect();
            v.push(n);
            (2 * n - 2, v)
        }
    };
    deg.sort();
    (h, deg)
}

/// Closed-form highest root of `Delta_M`.
pub fn theta_m_closed_form(g: GroupType, m: usize) -> Root {
    let n = g.n;
    let dim = g.chi_dim();
    let e = |i: usize| Root::chi(dim, i - 1, 1);
    match g.family {
        Family::GL | Family::SL => e(n - m + 1).sub(&e(n + 1)),
        Family::SOOdd => {
            if m == 1 {
                e(n)
            } else {
                e(n - m + 1).add(&e(n - m + 2))
            }
        }
        Family::Sp => e(n - m + 1).scale(2),
        Family::SOEven => e(n - m + 1).add(&e(n - m + 2)),
    }
}

/// Coxeter number of `M` as a function of `m`.
pub fn d_of_m(f: Family, m: usize) -> i64 {
    let m = m as i64;
    match f {
        Family::GL | Family::SL => m + 1,
        Family::SOOdd | Family::Sp => 2 * m,
        Family::SOEven => 2 * m - 2,
    }
}

/// Validate `m` and build Levi data.
pub fn admissible_levi(rs: &RootSystem, m: usize) -> Result<LeviData> {
    let g = rs.group;
    let n = g.n;
    let lo_n = GroupType::min_admissible_rank(g.family);
    if n < lo_n {
        return Err(Error::Config(format!("admissible Levi data for {} requires n >= {}, got n = {}", g.family, lo_n, n)));
    }
    let lo_m = if g.family == Family::SOEven { 3 } else { 1 };
    if m < lo_m || m > n {
        return Err(Error::Config(format!("m must satisfy {} <= m <= n = {} for {}, got m = {}", lo_m, n, g.family, m)));
    }
    let delta_m_idx: Vec<usize> = (n - m..n).collect();
    let delta_m: Vec<Root> = delta_m_idx.iter().map(|&i| rs.simple_roots[i].clone()).collect();
    let theta = rs
        .highest_root_of(&delta_m_idx)
        .ok_or_else(|| Error::Internal("empty Levi root system".into()))?;
    let closed = theta_m_closed_form(g, m);
    if theta != closed {
        return Err(Error::Internal(format!("highest root of M: brute force {} vs closed form {}", theta, closed)));
    }
    let d = d_of_m(g.family, m);
    if rs.height_unchecked(&theta) + 1 != d {
        return Err(Error::Internal(format!("Coxeter number of M: ht(theta)+1 = {} but d = {}", rs.height_unchecked(&theta) + 1, d)));
    }
    Ok(LeviData { m, delta_m_idx, delta_m, theta_m: theta, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(f: Family, n: usize) -> RootSystem {
        build_root_system(GroupType::new(f, n)).unwrap()
    }

    #[test]
    fn gl2_example() {
        let r = rs(Family::GL, 2);
        assert_eq!(r.positive_roots.len(), 3);
        assert_eq!(r.rho_check, vec![q(1), q(0), q(-1)]);
        assert_eq!(r.height(&Root(vec![1, 0, -1])).unwrap(), 2);
    }

    #[test]
    fn sp2_example() {
        let r = rs(Family::Sp, 2);
        let pos: BTreeSet<Root> = r.positive_roots.iter().cloned().collect();
        let want: BTreeSet<Root> = [vec![1, -1], vec![0, 2], vec![1, 1], vec![2, 0]].into_iter().map(Root).collect();
        assert_eq!(pos, want);
        assert_eq!(r.rho_check, vec![qf(3, 2), qf(1, 2)]);
        assert_eq!(r.height(&Root(vec![2, 0])).unwrap(), 3);
    }

    #[test]
    fn so8_counts() {
        let r = rs(Family::SOEven, 4);
        assert_eq!(r.roots.len(), 24);
        for a in &r.simple_roots {
            assert_eq!(r.height(a).unwrap(), 1);
        }
    }

    #[test]
    fn non_root_rejected() {
        let r = rs(Family::GL, 2);
        assert!(matches!(r.height(&Root(vec![2, 0, -2])), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_bounds() {
        assert!(matches!(build_root_system(GroupType::new(Family::SOEven, 1)), Err(Error::Config(_))));
        let r = rs(Family::SOEven, 3);
        assert!(matches!(r.admissible_levi(3), Err(Error::Config(_))));
        let r = rs(Family::SOEven, 4);
        assert!(matches!(r.admissible_levi(2), Err(Error::Config(_))));
        assert!(r.admissible_levi(3).is_ok());
    }

    #[test]
    fn levi_examples() {
        let l = rs(Family::GL, 3).admissible_levi(2).unwrap();
        assert_eq!(l.d, 3);
        let r = rs(Family::GL, 3);
        assert_eq!(l.theta_m, r.simple_roots[1].add(&r.simple_roots[2]));
        assert_eq!(rs(Family::SOOdd, 3).admissible_levi(2).unwrap().d, 4);
        assert_eq!(rs(Family::SOEven, 4).admissible_levi(3).unwrap().d, 4);
    }

    #[test]
    fn degrees() {
        assert_eq!(coxeter_and_degrees(GroupType::new(Family::Sp, 3)), (6, vec![2, 4, 6]));
        assert_eq!(coxeter_and_degrees(GroupType::new(Family::SOEven, 4)), (6, vec![2, 4, 4, 6]));
        assert_eq!(coxeter_and_degrees(GroupType::new(Family::GL, 1)), (2, vec![1, 2]));
    }
}
