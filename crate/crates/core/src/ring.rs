//! Exact scalars and the small ring abstraction used by the matrix and series code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar.
pub type Q = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `n / d`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as `p/q` (or `p` when integral).
pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `p`, `p/q` or a decimal literal.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if num_traits::Zero::is_zero(&d) {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((a, b)) = s.split_once('.') {
        let neg = a.starts_with('-');
        let ip: BigInt = if a == "-" || a.is_empty() { <BigInt as num_traits::Zero>::zero() } else { a.parse().ok()? };
        let fp: BigInt = if b.is_empty() { <BigInt as num_traits::Zero>::zero() } else { b.parse().ok()? };
        let den = num_traits::pow(BigInt::from(10), b.len());
        let frac = Q::new(fp, den);
        return Some(if neg { Q::from_integer(ip) - frac } else { Q::from_integer(ip) + frac });
    }
    s.parse::<BigInt>().ok().map(Q::from_integer)
}

/// Serde helper: serialize rationals as strings.
pub mod qser {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q_to_string(x))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;
        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&q_to_string(x))?;
            }
            seq.end()
        }
    }

    pub mod pairs {
        use super::*;
        use serde::ser::SerializeSeq;
        use serde::Serialize;
        pub fn serialize<S: Serializer, K: Serialize>(xs: &[(K, Q)], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for (k, x) in xs {
                seq.serialize_element(&(k, q_to_string(x)))?;
            }
            seq.end()
        }
    }

    pub mod vecvec {
        use super::*;
        use serde::ser::SerializeSeq;
        pub fn serialize<S: Serializer>(xs: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for row in xs {
                let r: Vec<String> = row.iter().map(q_to_string).collect();
                seq.serialize_element(&r)?;
            }
            seq.end()
        }
    }
}

/// Exact rational square root, if one exists.
pub fn q_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    let r = Q::new(n, d);
    if &(&r * &r) == x {
        Some(r)
    } else {
        None
    }
}

/// Convert to `f64` for display only.
pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Commutative ring with rational scalars.
///
/// Implemented by [`Q`], [`MPoly`] and `LaurentPoly<C>`.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_q(x: &Q) -> Self;
    fn scale(&self, x: &Q) -> Self;
    /// The value as a rational constant, if it is one.
    fn as_q(&self) -> Option<Q>;
    /// Zero with no truncation uncertainty; products with it may be skipped.
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for Q {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn scale(&self, x: &Q) -> Self {
        self * x
    }
    fn as_q(&self) -> Option<Q> {
        Some(self.clone())
    }
}

/// A monomial: sorted `(variable, exponent)` pairs with positive exponents.
pub type Mono = Vec<(u32, u32)>;

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse multivariate polynomial over `Q`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Mono, Q>,
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = q_to_string(c);
                for (v, e) in m {
                    if *e == 1 {
                        s.push_str(&format!("*x{}", v));
                    } else {
                        s.push_str(&format!("*x{}^{}", v, e));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl MPoly {
    /// The variable `x_i`.
    pub fn var(i: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(i, 1)], q(1));
        MPoly { terms }
    }

    /// A constant polynomial.
    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !num_traits::Zero::is_zero(&c) {
            terms.insert(Vec::new(), c);
        }
        MPoly { terms }
    }

    /// Build from `(monomial, coefficient)` pairs; monomials must be sorted by variable.
    pub fn from_terms(it: impl IntoIterator<Item = (Mono, Q)>) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in it {
            Self::insert_add(&mut terms, m, c);
        }
        MPoly { terms }
    }

    /// The cofactor of `v` in the part of `self` that is linear in `v`.
    pub fn coeff_of_var(&self, v: u32) -> MPoly {
        MPoly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            if m.contains(&(v, 1)) {
                Some((m.iter().filter(|(w, _)| *w != v).cloned().collect(), c.clone()))
            } else {
                None
            }
        }))
    }

    /// Iterate over `(monomial, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True for the zero polynomial.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Set of variables that occur.
    pub fn vars(&self) -> std::collections::BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| *v)).collect()
    }

    /// Highest exponent of `v`.
    pub fn degree_in(&self, v: u32) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().find(|(w, _)| *w == v).map(|(_, e)| *e).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Total degree, zero for constants and the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|(_, e)| e).sum()).max().unwrap_or(0)
    }

    /// Coefficient of the monomial `m`.
    pub fn coeff(&self, m: &Mono) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(<Q as Ring>::zero)
    }

    /// The part that is linear in exactly the variable `v` (as a coefficient of `v`) with no other variables.
    pub fn linear_coeff(&self, v: u32) -> Q {
        self.coeff(&vec![(v, 1)])
    }

    /// Evaluate with `vals[v]` substituted for `x_v`; missing variables are zero.
    pub fn eval(&self, vals: &[Q]) -> Q {
        let mut acc = <Q as Ring>::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let x = vals.get(*v as usize).cloned().unwrap_or_else(<Q as Ring>::zero);
                t *= num_traits::pow(x, *e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Substitute polynomials for variables.
    pub fn subst(&self, f: &dyn Fn(u32) -> MPoly) -> MPoly {
        let mut acc = MPoly::zero();
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(c.clone());
            for (v, e) in m {
                let x = f(*v);
                for _ in 0..*e {
                    t = t.mul(&x);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    fn insert_add(terms: &mut BTreeMap<Mono, Q>, m: Mono, c: Q) {
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                if !num_traits::Zero::is_zero(&c) {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if num_traits::Zero::is_zero(e.get()) {
                    e.remove();
                }
            }
        }
    }
}

impl Ring for MPoly {
    fn zero() -> Self {
        MPoly::default()
    }
    fn one() -> Self {
        MPoly::constant(q(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            MPoly::insert_add(&mut terms, m.clone(), c.clone());
        }
        MPoly { terms }
    }
    fn sub(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            MPoly::insert_add(&mut terms, m.clone(), -c);
        }
        MPoly { terms }
    }
    fn mul(&self, o: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                MPoly::insert_add(&mut terms, mono_mul(m1, m2), c1 * c2);
            }
        }
        MPoly { terms }
    }
    fn neg(&self) -> Self {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    fn from_q(x: &Q) -> Self {
        MPoly::constant(x.clone())
    }
    fn scale(&self, x: &Q) -> Self {
        if num_traits::Zero::is_zero(x) {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * x)).collect() }
    }
    fn as_q(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(<Q as Ring>::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_q("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_q("-0.25").unwrap(), qf(-1, 4));
        assert_eq!(parse_q("7").unwrap(), q(7));
        assert_eq!(q_to_string(&qf(-2, 4)), "-1/2");
        assert!(parse_q("1/0").is_none());
    }

    #[test]
    fn sqrt_exact() {
        assert_eq!(q_sqrt(&qf(9, 4)), Some(qf(3, 2)));
        assert_eq!(q_sqrt(&q(2)), None);
    }

    #[test]
    fn mpoly_arith() {
        let x = MPoly::var(0);
        let y = MPoly::var(1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.eval(&[q(2), q(3)]), q(25));
        assert_eq!(sq.sub(&x.mul(&x)).sub(&y.mul(&y)).linear_coeff(0), q(0));
        assert_eq!(sq.total_degree(), 2);
        assert_eq!(x.sub(&x), MPoly::zero());
    }
}
