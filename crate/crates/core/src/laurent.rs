//! Truncated Laurent polynomials in one variable.

use crate::ring::{q, Ring, Q};
use std::collections::BTreeMap;

/// Laurent polynomial `sum c_k t^k`.
///
/// `trunc = Some(N)` means the coefficients are only known for exponents `< N`;
/// `None` means the value is exact.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentPoly<C> {
    terms: BTreeMap<i64, C>,
    pub trunc: Option<i64>,
}

impl<C: Ring> Default for LaurentPoly<C> {
    fn default() -> Self {
        LaurentPoly { terms: BTreeMap::new(), trunc: None }
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl<C: Ring> LaurentPoly<C> {
    /// Monomial `c t^k`.
    pub fn mono(c: C, k: i64) -> Self {
        let mut p = Self::default();
        p.add_term(k, c);
        p
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::mono(C::one(), 1)
    }

    /// Build from `(exponent, coefficient)` pairs.
    pub fn from_terms(it: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut p = Self::default();
        for (k, c) in it {
            p.add_term(k, c);
        }
        p
    }

    /// Add `c t^k` in place.
    pub fn add_term(&mut self, k: i64, c: C) {
        if let Some(t) = self.trunc {
            if k >= t {
                return;
            }
        }
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&k) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(k, v);
        }
    }

    /// Coefficient of `t^k`; panics if `k` is beyond the truncation.
    pub fn coeff(&self, k: i64) -> C {
        if let Some(t) = self.trunc {
            assert!(k < t, "coefficient t^{} requested beyond truncation {}", k, t);
        }
        self.terms.get(&k).cloned().unwrap_or_else(C::zero)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &C)> {
        self.terms.iter()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Valuation used for truncation bookkeeping.
    fn val(&self) -> Option<i64> {
        self.min_exp().or(self.trunc)
    }

    /// Impose a truncation order.
    pub fn truncate(&self, n: i64) -> Self {
        let trunc = min_opt(self.trunc, Some(n));
        let terms = self.terms.iter().filter(|(k, _)| **k < n).map(|(k, c)| (*k, c.clone())).collect();
        LaurentPoly { terms, trunc }
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(), trunc: self.trunc.map(|t| t + k) }
    }

    /// `d/dt`.
    pub fn deriv(&self) -> Self {
        let mut out = LaurentPoly { terms: BTreeMap::new(), trunc: self.trunc.map(|t| t - 1) };
        for (k, c) in &self.terms {
            if *k != 0 {
                out.add_term(k - 1, c.scale(&q(*k)));
            }
        }
        out
    }

    /// `t d/dt`.
    pub fn theta(&self) -> Self {
        let mut out = LaurentPoly { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, c) in &self.terms {
            out.add_term(*k, c.scale(&q(*k)));
        }
        out
    }

    /// Substitute `t -> t^{-1}`; only valid for exact values.
    pub fn invert_var(&self) -> Self {
        assert!(self.trunc.is_none(), "cannot invert a truncated series");
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (-k, c.clone())).collect(), trunc: None }
    }

    /// Map coefficients.
    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        let mut out = LaurentPoly { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, c) in &self.terms {
            out.add_term(*k, f(c));
        }
        out
    }

    /// True if every exponent is a multiple of `d`.
    pub fn exps_divisible_by(&self, d: i64) -> bool {
        self.terms.keys().all(|k| k.rem_euclid(d) == 0)
    }

    /// Replace `t^k` by `t^{k/d}`; requires divisibility.
    pub fn divide_exps(&self, d: i64) -> Option<Self> {
        if !self.exps_divisible_by(d) {
            return None;
        }
        Some(LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (k / d, c.clone())).collect(),
            trunc: self.trunc.map(|t| t.div_euclid(d) + if t.rem_euclid(d) == 0 { 0 } else { 1 }),
        })
    }
}

impl<C: Ring> Ring for LaurentPoly<C> {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::mono(C::one(), 0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }
    fn add(&self, o: &Self) -> Self {
        let trunc = min_opt(self.trunc, o.trunc);
        let mut out = LaurentPoly { terms: BTreeMap::new(), trunc };
        for (k, c) in self.terms.iter().chain(o.terms.iter()) {
            out.add_term(*k, c.clone());
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let t1 = match (self.trunc, o.val()) {
            (Some(t), Some(v)) => Some(t + v),
            _ => None,
        };
        let t2 = match (o.trunc, self.val()) {
            (Some(t), Some(v)) => Some(t + v),
            _ => None,
        };
        let trunc = min_opt(t1, t2);
        let (Some(lo_a), Some(lo_b)) = (self.min_exp(), o.min_exp()) else {
            return LaurentPoly { terms: BTreeMap::new(), trunc };
        };
        let lo = lo_a + lo_b;
        let mut hi = self.max_exp().unwrap() + o.max_exp().unwrap();
        if let Some(t) = trunc {
            hi = hi.min(t - 1);
        }
        if hi < lo {
            return LaurentPoly { terms: BTreeMap::new(), trunc };
        }
        let mut acc: Vec<Option<C>> = vec![None; (hi - lo + 1) as usize];
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let k = a + b;
                if k > hi {
                    break;
                }
                let slot = &mut acc[(k - lo) as usize];
                let p = ca.mul(cb);
                *slot = Some(match slot.take() {
                    Some(v) => v.add(&p),
                    None => p,
                });
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| c.filter(|c| !c.is_zero()).map(|c| (lo + i as i64, c)))
            .collect();
        LaurentPoly { terms, trunc }
    }
    fn neg(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(), trunc: self.trunc }
    }
    fn from_q(x: &Q) -> Self {
        Self::mono(C::from_q(x), 0)
    }
    fn scale(&self, x: &Q) -> Self {
        let mut out = LaurentPoly { terms: BTreeMap::new(), trunc: self.trunc };
        for (k, c) in &self.terms {
            out.add_term(*k, c.scale(x));
        }
        out
    }
    fn as_q(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::from_integer(0.into())),
            1 => self.terms.get(&0).and_then(|c| c.as_q()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::qf;

    type L = LaurentPoly<Q>;

    #[test]
    fn product_and_truncation() {
        let a = L::from_terms([(-1, q(1)), (0, q(2))]);
        let b = L::from_terms([(1, q(1)), (2, q(3))]).truncate(4);
        let p = a.mul(&b);
        assert_eq!(p.trunc, Some(3));
        assert_eq!(p.coeff(0), q(1));
        assert_eq!(p.coeff(1), q(5));
        assert_eq!(p.coeff(2), q(6));
    }

    #[test]
    fn derivative() {
        let a = L::from_terms([(-2, q(1)), (3, qf(1, 3))]);
        let d = a.deriv();
        assert_eq!(d.coeff(-3), q(-2));
        assert_eq!(d.coeff(2), q(1));
    }

    #[test]
    fn exps_division() {
        let a = L::from_terms([(-4, q(1)), (2, q(3))]);
        assert!(a.divide_exps(3).is_none());
        let b = a.divide_exps(2).unwrap();
        assert_eq!(b.coeff(-2), q(1));
        assert_eq!(b.coeff(1), q(3));
    }
}
