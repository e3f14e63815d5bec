//! Dense polynomials with generic coefficients, used for the symbolic cost
//! and size composition behind the static checks.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_traits::Num;

/// Coefficient ring for [`Poly`] and [`Poly2`].
pub trait Coefficient: Clone + Num + PartialOrd + fmt::Display {}
impl<T: Clone + Num + PartialOrd + fmt::Display> Coefficient for T {}

/// Univariate polynomial, coefficients stored from degree 0 upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coefficient> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::monomial(c, 0)
    }

    pub fn monomial(c: T, degree: usize) -> Self {
        let mut coeffs = vec![T::zero(); degree + 1];
        coeffs[degree] = c;
        Poly { coeffs }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        Poly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> T {
        self.coeffs.get(degree).cloned().unwrap_or_else(T::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly::constant(T::one()), |acc, _| &acc * self)
    }

    /// `P(M + 1)` as a polynomial in `M`.
    pub fn shift_by_one(&self) -> Self {
        let step = Poly::from_coeffs(vec![T::one(), T::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &step) + &Poly::constant(c.clone()))
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// True when `self(N) <= c * N^p` for every integer `N >= 1`.
    ///
    /// The test shifts `c*N^p - self(N)` to `N = M + 1` and asks for
    /// non-negative coefficients. For polynomials with non-negative
    /// coefficients this is exact (it reduces to `deg <= p` and
    /// `self(1) <= c`); otherwise it is sufficient.
    pub fn dominated_by(&self, c: &T, p: u32) -> bool {
        let gap = &Poly::monomial(c.clone(), p as usize) - self;
        gap.shift_by_one().coeffs.iter().all(|k| *k >= T::zero())
    }
}

impl<T: Coefficient> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|d| self.coeff(d) + rhs.coeff(d)).collect())
    }
}

impl<T: Coefficient> std::ops::Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|d| self.coeff(d) - rhs.coeff(d)).collect())
    }
}

impl<T: Coefficient> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::from_coeffs(out)
    }
}

impl<T: Coefficient> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*N")?,
                _ => write!(f, "{c}*N^{d}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial in two variables: `u`, the size of the current `listof`
/// iteration's variables, and `n`, the total size of the bound variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly2<T> {
    /// `(deg_u, deg_n) -> coefficient`, zero entries omitted.
    terms: BTreeMap<(u32, u32), T>,
}

impl<T: Coefficient> Poly2<T> {
    pub fn zero() -> Self {
        Poly2 { terms: BTreeMap::new() }
    }

    pub fn term(c: T, deg_u: u32, deg_n: u32) -> Self {
        let mut p = Poly2::zero();
        p.add_term(c, deg_u, deg_n);
        p
    }

    pub fn constant(c: T) -> Self {
        Poly2::term(c, 0, 0)
    }

    fn add_term(&mut self, c: T, deg_u: u32, deg_n: u32) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((deg_u, deg_n)).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&(deg_u, deg_n));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly2::constant(T::one()), |acc, _| &acc * self)
    }

    /// Coefficient-wise maximum; an upper bound on both when coefficients
    /// and variables are non-negative.
    pub fn max_coeffwise(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(du, dn), c) in &other.terms {
            match out.terms.get_mut(&(du, dn)) {
                Some(slot) if *slot < *c => *slot = c.clone(),
                Some(_) => {}
                None => {
                    out.terms.insert((du, dn), c.clone());
                }
            }
        }
        out
    }

    /// Bound on the sum of `self(u_i, n)` over `k <= n` iterations with
    /// `sum u_i <= n`: `n * self(0, n) + (self(n, n) - self(0, n))`.
    /// Sound for non-negative coefficients because `u^d` is superadditive
    /// for `d >= 1`.
    pub fn sum_over_iterations(&self) -> Self {
        let mut out = Poly2::zero();
        for (&(du, dn), c) in &self.terms {
            if du == 0 {
                out.add_term(c.clone(), 0, dn + 1);
            } else {
                out.add_term(c.clone(), 0, dn + du);
            }
        }
        out
    }

    /// Substitutes `u := n`.
    pub fn collapse(&self) -> Poly<T> {
        let mut out = Poly::zero();
        for (&(du, dn), c) in &self.terms {
            out = &out + &Poly::monomial(c.clone(), (du + dn) as usize);
        }
        out
    }
}

impl<T: Coefficient> Add for &Poly2<T> {
    type Output = Poly2<T>;
    fn add(self, rhs: &Poly2<T>) -> Poly2<T> {
        let mut out = self.clone();
        for (&(du, dn), c) in &rhs.terms {
            out.add_term(c.clone(), du, dn);
        }
        out
    }
}

impl<T: Coefficient> Mul for &Poly2<T> {
    type Output = Poly2<T>;
    fn mul(self, rhs: &Poly2<T>) -> Poly2<T> {
        let mut out = Poly2::zero();
        for (&(au, an), a) in &self.terms {
            for (&(bu, bn), b) in &rhs.terms {
                out.add_term(a.clone() * b.clone(), au + bu, an + bn);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly<i64> {
        Poly::from_coeffs(c.to_vec())
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&p(&[1, 1]) * &p(&[1, 1]), p(&[1, 2, 1]));
        assert_eq!(p(&[1, 1]).pow(3), p(&[1, 3, 3, 1]));
        assert_eq!(&p(&[1, 2]) - &p(&[1, 2]), Poly::zero());
        assert_eq!(p(&[0, 0, 1]).shift_by_one(), p(&[1, 2, 1]));
        assert_eq!(p(&[3, 0, 2]).eval(&2), 11);
        assert_eq!(p(&[2, 0, 5]).to_string(), "2 + 5*N^2");
    }

    #[test]
    fn domination_examples() {
        // 1 + N <= 4N on N >= 1
        assert!(p(&[1, 1]).dominated_by(&4, 1));
        // 2 + 2N <= 4N holds from N = 1 on
        assert!(p(&[2, 2]).dominated_by(&4, 1));
        // 1 + 2N: 3 > 2 at N = 1
        assert!(!p(&[1, 2]).dominated_by(&2, 1));
        // degree too high
        assert!(!p(&[0, 0, 1]).dominated_by(&100, 1));
        // negative constant term: -1 + 3N <= 2N fails at N = 2
        assert!(!p(&[-1, 3]).dominated_by(&2, 1));
        // 1 + 2N - 2 + ... from a shifted arity bound
        assert!(p(&[1, 2]).dominated_by(&4, 1));
    }

    #[test]
    fn iteration_sum_bound() {
        // one unit of cost per iteration plus the iteration's size
        let body: Poly2<i64> = &Poly2::constant(1) + &Poly2::term(1, 1, 0);
        assert_eq!(body.sum_over_iterations().collapse(), p(&[0, 2]));
        let sq = Poly2::term(1i64, 2, 0);
        assert_eq!(sq.sum_over_iterations().collapse(), p(&[0, 0, 1]));
    }

    proptest! {
        /// For non-negative coefficients the shift test agrees with the
        /// closed form `deg <= p && P(1) <= c`.
        #[test]
        fn shift_test_is_exact_for_nonnegative(coeffs in prop::collection::vec(0i64..6, 0..4), c in 1i64..20, deg in 1u32..4) {
            let poly = Poly::from_coeffs(coeffs.iter().map(|&k| BigInt::from(k)).collect());
            let closed = poly.degree().is_none_or(|d| d <= deg as usize)
                && poly.eval(&BigInt::from(1)) <= BigInt::from(c);
            prop_assert_eq!(poly.dominated_by(&BigInt::from(c), deg), closed);
        }

        /// Whenever the shift test passes the inequality holds pointwise.
        #[test]
        fn shift_test_is_sound(coeffs in prop::collection::vec(-5i64..6, 0..4), c in 1i64..20, deg in 1u32..3) {
            let poly = Poly::from_coeffs(coeffs.clone());
            if poly.dominated_by(&c, deg) {
                for n in 1i64..40 {
                    prop_assert!(poly.eval(&n) <= c * n.pow(deg));
                }
            }
        }

        #[test]
        fn iteration_sum_is_an_upper_bound(cu in 0i64..4, c0 in 0i64..4, cn in 0i64..3, parts in prop::collection::vec(0i64..6, 1..6)) {
            let body: Poly2<i64> = &(&Poly2::term(cu, 2, 0) + &Poly2::constant(c0)) + &Poly2::term(cn, 1, 1);
            let n: i64 = parts.iter().sum::<i64>().max(parts.len() as i64);
            let actual: i64 = parts.iter().map(|&u| cu * u * u + c0 + cn * u * n).sum();
            prop_assert!(actual <= body.sum_over_iterations().collapse().eval(&n));
        }
    }
}
