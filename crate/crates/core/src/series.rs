//! Truncated Laurent series about `s = 1`.
//!
//! A series stores the coefficients of `(s-1)^e` for `e` in the window
//! `lowest_order ..= trunc_order`; everything above `trunc_order` is unknown.
//! Products propagate the window as `min(p + b, q + a)` for operands with
//! lowest orders `a`, `b` and truncation orders `p`, `q`.

use std::ops::{Mul, Neg};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<S> {
    lowest_order: i64,
    coeffs: Vec<S>,
}

impl<S: Scalar> LaurentSeries<S> {
    /// Builds a series, dropping exactly-zero leading coefficients. The
    /// truncation order is `lowest_order + coeffs.len() - 1` before stripping.
    pub fn new(lowest_order: i64, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::TruncationUnderflow(
                "empty coefficient window".into(),
            ));
        }
        Ok(Self::normalized(lowest_order, coeffs))
    }

    fn normalized(lowest_order: i64, coeffs: Vec<S>) -> Self {
        match coeffs.iter().position(|c| !c.is_zero()) {
            None => Self::zero(),
            Some(0) => LaurentSeries {
                lowest_order,
                coeffs,
            },
            Some(skip) => LaurentSeries {
                lowest_order: lowest_order + skip as i64,
                coeffs: coeffs.into_iter().skip(skip).collect(),
            },
        }
    }

    /// The canonical zero series. It behaves as an exact zero: adding it
    /// leaves the other operand's window untouched.
    pub fn zero() -> Self {
        LaurentSeries {
            lowest_order: 0,
            coeffs: vec![S::zero()],
        }
    }

    /// The unit series `1 + 0(s-1) + ...` accurate through `trunc`.
    pub fn one(trunc: i64) -> Self {
        Self::constant(S::one(), trunc)
    }

    pub fn constant(c: S, trunc: i64) -> Self {
        let len = trunc.max(0) as usize + 1;
        let mut coeffs = vec![S::zero(); len];
        coeffs[0] = c;
        Self::normalized(0, coeffs)
    }

    /// `(s-1)^exponent`, exact (window of a single term).
    pub fn monomial(exponent: i64, coeff: S) -> Self {
        Self::normalized(exponent, vec![coeff])
    }

    pub fn lowest_order(&self) -> i64 {
        self.lowest_order
    }

    pub fn trunc_order(&self) -> i64 {
        self.lowest_order + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.lowest_order == 0 && self.coeffs[0].is_zero()
    }

    /// Coefficient of `(s-1)^exponent`, or `None` outside the window.
    pub fn coeff(&self, exponent: i64) -> Option<&S> {
        let idx = exponent - self.lowest_order;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize)
    }

    fn coeff_or_zero(&self, exponent: i64) -> S {
        self.coeff(exponent).cloned().unwrap_or_else(S::zero)
    }

    /// Cauchy product. Pairs `(i, n-i)` are accumulated symmetrically so the
    /// result does not depend on operand order, even in floating point.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let len = self.len().min(other.len());
        let (a, b) = (&self.coeffs, &other.coeffs);
        let coeffs = (0..len)
            .map(|n| {
                let mut acc = S::zero();
                for i in 0..=n / 2 {
                    let j = n - i;
                    let term = if i == j {
                        a[i].clone() * b[i].clone()
                    } else {
                        a[i].clone() * b[j].clone() + a[j].clone() * b[i].clone()
                    };
                    acc = acc + term;
                }
                acc
            })
            .collect();
        Self::normalized(self.lowest_order + other.lowest_order, coeffs)
    }

    fn combine(&self, other: &Self, negate_other: bool) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(if negate_other {
                -other.clone()
            } else {
                other.clone()
            });
        }
        let lowest = self.lowest_order.min(other.lowest_order);
        let trunc = self.trunc_order().min(other.trunc_order());
        if trunc < lowest {
            return Err(Error::TruncationUnderflow(format!(
                "sum window [{lowest}, {trunc}] is empty"
            )));
        }
        let coeffs = (lowest..=trunc)
            .map(|e| {
                let b = other.coeff_or_zero(e);
                if negate_other {
                    self.coeff_or_zero(e) - b
                } else {
                    self.coeff_or_zero(e) + b
                }
            })
            .collect();
        Ok(Self::normalized(lowest, coeffs))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    pub fn scale(&self, c: &S) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.clone() * c.clone()).collect();
        Self::normalized(self.lowest_order, coeffs)
    }

    /// Multiplicative inverse. The result has the same number of terms.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NonInvertible);
        }
        let a = &self.coeffs;
        let lead_inv = S::one() / a[0].clone();
        let mut out: Vec<S> = Vec::with_capacity(a.len());
        out.push(lead_inv.clone());
        for n in 1..a.len() {
            let mut acc = S::zero();
            for i in 1..=n {
                acc = acc + a[i].clone() * out[n - i].clone();
            }
            out.push(-(acc * lead_inv.clone()));
        }
        Ok(Self::normalized(-self.lowest_order, out))
    }

    /// `self^m` by repeated squaring; `m = 0` gives the unit series at the
    /// same relative depth as `self`.
    pub fn pow(&self, m: u32) -> Self {
        let mut result = Self::one(self.len() as i64 - 1);
        if m == 0 {
            return result;
        }
        let mut base = self.clone();
        let mut e = m;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.mul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Term-by-term derivative in `s`; the truncation order drops by one.
    pub fn diff(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.clone() * S::from_i64(self.lowest_order + i as i64))
            .collect();
        Self::new(self.lowest_order - 1, coeffs)
    }

    /// Drops terms above `trunc`.
    pub fn truncate(&self, trunc: i64) -> Result<Self> {
        if trunc > self.trunc_order() {
            return Err(Error::TruncationUnderflow(format!(
                "cannot extend truncation from {} to {trunc}",
                self.trunc_order()
            )));
        }
        if trunc < self.lowest_order {
            return Err(Error::TruncationUnderflow(format!(
                "truncation {trunc} below lowest order {}",
                self.lowest_order
            )));
        }
        let keep = (trunc - self.lowest_order + 1) as usize;
        Ok(Self::normalized(
            self.lowest_order,
            self.coeffs[..keep].to_vec(),
        ))
    }

    /// Evaluates the retained terms at `s - 1 = x`.
    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        let e = self.lowest_order;
        let mut power = S::one();
        for _ in 0..e.unsigned_abs() {
            power = power * x.clone();
        }
        if e >= 0 {
            acc * power
        } else {
            acc / power
        }
    }

    /// Largest coefficient-wise difference over the common window.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        let lo = self.lowest_order.min(other.lowest_order);
        let hi = self.trunc_order().min(other.trunc_order());
        let mut worst = S::zero();
        for e in lo..=hi {
            let d = (self.coeff_or_zero(e) - other.coeff_or_zero(e)).abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

impl<S: Scalar> Neg for LaurentSeries<S> {
    type Output = Self;
    fn neg(self) -> Self {
        let coeffs = self.coeffs.into_iter().map(|c| -c).collect();
        Self::normalized(self.lowest_order, coeffs)
    }
}

impl<'a, S: Scalar> Mul<&'a LaurentSeries<S>> for &'a LaurentSeries<S> {
    type Output = LaurentSeries<S>;
    fn mul(self, rhs: &'a LaurentSeries<S>) -> LaurentSeries<S> {
        LaurentSeries::mul(self, rhs)
    }
}

/// `1/s = 1 - (s-1) + (s-1)^2 - ...` through `(s-1)^trunc`.
pub fn one_over_s_series<S: Scalar>(trunc: i64) -> Result<LaurentSeries<S>> {
    if trunc < 0 {
        return Err(Error::TruncationUnderflow(format!(
            "1/s needs trunc >= 0, got {trunc}"
        )));
    }
    let coeffs = (0..=trunc)
        .map(|j| if j % 2 == 0 { S::one() } else { -S::one() })
        .collect();
    LaurentSeries::new(0, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn pole() -> LaurentSeries<Q> {
        LaurentSeries::monomial(-1, Q::one())
    }

    #[test]
    fn pole_squared() {
        let p2 = pole().mul(&pole());
        assert_eq!(p2.lowest_order(), -2);
        assert_eq!(p2.coeffs(), &[Q::one()]);
    }

    #[test]
    fn unit_is_multiplicative_identity() {
        let a = LaurentSeries::new(-2, vec![q(3, 1), q(-1, 2), q(5, 7), q(2, 3)]).unwrap();
        let one = LaurentSeries::one(10);
        assert_eq!(a.mul(&one), a);
        assert_eq!(one.mul(&a), a);
    }

    #[test]
    fn inverse_examples() {
        let inv = pole().inv().unwrap();
        assert_eq!(inv, LaurentSeries::monomial(1, Q::one()));
        let one = LaurentSeries::<Q>::one(4);
        assert_eq!(one.inv().unwrap(), one);
        assert!(matches!(
            LaurentSeries::<Q>::zero().inv(),
            Err(Error::NonInvertible)
        ));
    }

    #[test]
    fn inverse_by_long_division() {
        // 1/(1/x + g0 + g1 x) = x - g0 x^2 + (g0^2 - g1) x^3
        let (g0, g1) = (q(1, 3), q(-2, 5));
        let a = LaurentSeries::new(-1, vec![Q::one(), g0.clone(), g1.clone()]).unwrap();
        let inv = a.inv().unwrap();
        assert_eq!(inv.lowest_order(), 1);
        assert_eq!(
            inv.coeffs(),
            &[Q::one(), -g0.clone(), g0.clone() * g0 - g1]
        );
    }

    #[test]
    fn truncation_of_products() {
        // a: lowest -1, trunc 2; b: lowest -2, trunc 0 -> min(2 - 2, 0 - 1) = -1
        let a = LaurentSeries::new(-1, vec![q(1, 1), q(2, 1), q(3, 1), q(4, 1)]).unwrap();
        let b = LaurentSeries::new(-2, vec![q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        let ab = a.mul(&b);
        assert_eq!(ab.lowest_order(), -3);
        assert_eq!(ab.trunc_order(), -1);
    }

    #[test]
    fn derivative_examples() {
        let d = pole().diff().unwrap();
        assert_eq!(d, LaurentSeries::monomial(-2, -Q::one()));
        let c = LaurentSeries::constant(q(7, 2), 3);
        assert!(c.diff().unwrap().is_zero());
        let x2 = LaurentSeries::new(0, vec![q(1, 1), Q::zero(), q(1, 1)]).unwrap();
        let d = x2.diff().unwrap();
        assert_eq!(d.lowest_order(), 1);
        assert_eq!(d.coeffs(), &[q(2, 1)]);
        assert_eq!(d.trunc_order(), 1);
    }

    #[test]
    fn pow_examples() {
        let a = LaurentSeries::new(-1, vec![q(1, 1), q(2, 3), q(-1, 5)]).unwrap();
        assert_eq!(a.pow(1), a);
        assert_eq!(a.pow(0), LaurentSeries::one(2));
        assert_eq!(a.pow(3), a.mul(&a).mul(&a));
        assert_eq!(a.pow(6), a.pow(3).mul(&a.pow(3)));
    }

    #[test]
    fn one_over_s() {
        let s = one_over_s_series::<Q>(2).unwrap();
        assert_eq!(s.coeffs(), &[q(1, 1), q(-1, 1), q(1, 1)]);
        assert_eq!(one_over_s_series::<Q>(0).unwrap().coeffs(), &[Q::one()]);
        assert_eq!(s.eval(&Q::zero()), Q::one());
        assert!(one_over_s_series::<Q>(-1).is_err());
        // s * (1/s) = 1 through the retained depth
        let s_itself = LaurentSeries::new(0, vec![q(1, 1), q(1, 1), Q::zero()]).unwrap();
        assert_eq!(s_itself.mul(&s).coeffs(), &[q(1, 1), Q::zero(), Q::zero()]);
    }

    #[test]
    fn add_underflow_and_zero_identity() {
        let a = LaurentSeries::new(3, vec![q(1, 1)]).unwrap();
        let b = LaurentSeries::new(0, vec![q(1, 1), q(1, 1)]).unwrap();
        let sum = a.checked_add(&b).unwrap();
        assert_eq!((sum.lowest_order(), sum.trunc_order()), (0, 1));
        assert_eq!(sum, b);
        let z = LaurentSeries::<Q>::zero();
        assert_eq!(b.checked_add(&z).unwrap(), b);
        assert!(b.checked_sub(&b).unwrap().is_zero());
        assert!(matches!(
            LaurentSeries::<Q>::new(0, vec![]),
            Err(Error::TruncationUnderflow(_))
        ));
    }

    #[test]
    fn truncate_window_checks() {
        let a = LaurentSeries::new(-1, vec![q(1, 1), q(2, 1), q(3, 1)]).unwrap();
        assert_eq!(a.truncate(0).unwrap().trunc_order(), 0);
        assert!(a.truncate(5).is_err());
        assert!(a.truncate(-2).is_err());
    }

    fn series_strategy(len: usize) -> impl Strategy<Value = LaurentSeries<f64>> {
        (
            -3i64..3,
            proptest::collection::vec(-4.0f64..4.0, len),
            0.5f64..3.0,
        )
            .prop_map(|(lo, mut c, lead)| {
                c[0] = lead;
                LaurentSeries::new(lo, c).unwrap()
            })
    }

    fn rational_strategy(len: usize) -> impl Strategy<Value = LaurentSeries<Q>> {
        (-3i64..3, proptest::collection::vec((-20i64..20, 1i64..9), len)).prop_map(
            |(lo, c)| {
                let mut coeffs: Vec<Q> = c.into_iter().map(|(n, d)| q(n, d)).collect();
                coeffs[0] = q(1, 1) + coeffs[0].clone() * coeffs[0].clone();
                LaurentSeries::new(lo, coeffs).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn product_commutes_exactly(a in series_strategy(8), b in series_strategy(8)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn product_associates(a in series_strategy(8), b in series_strategy(8), c in series_strategy(8)) {
            let lhs = a.mul(&b).mul(&c);
            let rhs = a.mul(&b.mul(&c));
            let scale = lhs.coeffs().iter().fold(1.0f64, |m, x| m.max(x.abs()));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
        }

        #[test]
        fn exact_ring_axioms(a in rational_strategy(5), b in rational_strategy(5), c in rational_strategy(5)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            let ab = a.checked_add(&b).unwrap();
            prop_assert_eq!(ab.mul(&c).truncate(ab.mul(&c).trunc_order()).unwrap(),
                a.mul(&c).checked_add(&b.mul(&c)).unwrap().truncate(ab.mul(&c).trunc_order()).unwrap());
        }

        #[test]
        fn inverse_round_trip(a in rational_strategy(6)) {
            let prod = a.mul(&a.inv().unwrap());
            prop_assert_eq!(prod.lowest_order(), 0);
            prop_assert_eq!(prod, LaurentSeries::one(5));
        }

        #[test]
        fn leibniz_rule(a in rational_strategy(6), b in rational_strategy(6)) {
            let lhs = a.mul(&b).diff().unwrap();
            let rhs = a.diff().unwrap().mul(&b)
                .checked_add(&a.mul(&b.diff().unwrap())).unwrap();
            prop_assert_eq!(lhs.max_abs_diff(&rhs), Q::zero());
            prop_assert_eq!(lhs.trunc_order(), rhs.trunc_order());
        }
    }
}
