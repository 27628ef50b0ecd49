//! Sparse bivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::{format_rational, rat, rat_to_f64, Poly, Rational};

/// Polynomial in `x`, `y`; keys are `(i, j)` for `x^i y^j`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BiPoly {
    pub fn zero() -> BiPoly {
        BiPoly::default()
    }

    pub fn monomial(c: Rational, i: u32, j: u32) -> BiPoly {
        let mut p = BiPoly::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rational)>>(it: I) -> BiPoly {
        let mut p = BiPoly::zero();
        for ((i, j), c) in it {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn from_ints(terms: &[((u32, u32), i64)]) -> BiPoly {
        BiPoly::from_terms(terms.iter().map(|&(k, c)| (k, rat(c))))
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rational)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, k: &Rational) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, c * k)))
    }

    pub fn swap(&self) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|((i, j), c)| ((*j, *i), c.clone())))
    }

    /// p(-x, y).
    pub fn reflect_x(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms
                .iter()
                .map(|((i, j), c)| ((*i, *j), if i % 2 == 1 { -c.clone() } else { c.clone() })),
        )
    }

    /// p(x, -y).
    pub fn reflect_y(&self) -> BiPoly {
        self.swap().reflect_x().swap()
    }

    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn y_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0 + k.1).max().unwrap_or(0)
    }

    pub fn min_x_exponent(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).min()
    }

    /// Coefficient of `x^i` as a polynomial in `y`.
    pub fn x_slice(&self, i: u32) -> Poly {
        Poly::from_terms(self.terms.iter().filter(|(k, _)| k.0 == i).map(|(k, c)| (k.1, c.clone())))
    }

    /// Divide by `x^k`; every term must carry at least that power.
    pub fn div_x_power(&self, k: u32) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|((i, j), c)| {
            assert!(*i >= k, "x^{} does not divide the polynomial", k);
            ((i - k, *j), c.clone())
        }))
    }

    pub fn mul_x_power(&self, k: u32) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|((i, j), c)| ((i + k, *j), c.clone())))
    }

    pub fn partial_x(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.0 > 0)
                .map(|((i, j), c)| ((i - 1, *j), c * rat(*i as i64))),
        )
    }

    pub fn partial_y(&self) -> BiPoly {
        self.swap().partial_x().swap()
    }

    /// p(x, y + a).
    pub fn translate_y(&self, a: &Rational) -> BiPoly {
        let mut out = BiPoly::zero();
        for i in self.terms.keys().map(|k| k.0).collect::<std::collections::BTreeSet<_>>() {
            for (j, c) in self.x_slice(i).translate(a).terms() {
                out.add_term(i, j, c.clone());
            }
        }
        out
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|((i, j), c)| c * num_traits::pow(x.clone(), *i as usize) * num_traits::pow(y.clone(), *j as usize))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn to_f64(&self) -> FloatBiPoly {
        FloatBiPoly { terms: self.terms.iter().map(|((i, j), c)| (*i, *j, rat_to_f64(c))).collect() }
    }

    /// Terms with weighted degree `alpha*i + beta*j == k`.
    pub fn weighted_part(&self, alpha: u32, beta: u32, shift: (i64, i64), k: i64) -> BiPoly {
        BiPoly::from_terms(
            self.terms
                .iter()
                .filter(|((i, j), _)| alpha as i64 * (*i as i64 + shift.0) + beta as i64 * (*j as i64 + shift.1) == k)
                .map(|(e, c)| (*e, c.clone())),
        )
    }
}

/// Binomial coefficient as a rational.
pub fn binomial(n: u32, k: u32) -> Rational {
    let mut b = BigInt::one();
    for t in 0..k {
        b = b * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    Rational::from_integer(b)
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", format_rational(c))?;
            if *i > 0 {
                write!(f, "*x^{}", i)?;
            }
            if *j > 0 {
                write!(f, "*y^{}", j)?;
            }
        }
        Ok(())
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for ((i, j), c) in rhs.terms() {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for ((i, j), c) in rhs.terms() {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for ((i1, j1), c1) in self.terms() {
            for ((i2, j2), c2) in rhs.terms() {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.scale(&-Rational::one())
    }
}

/// Floating evaluation copy.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatBiPoly {
    pub terms: Vec<(u32, u32, f64)>,
}

impl FloatBiPoly {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translate_matches_eval() {
        let p = BiPoly::from_ints(&[((1, 2), 3), ((0, 3), -1), ((2, 0), 5)]);
        let a = Rational::new(2.into(), 3.into());
        let t = p.translate_y(&a);
        for (x, y) in [(1, 1), (-2, 3), (0, 5)] {
            let (x, y) = (rat(x), rat(y));
            assert_eq!(t.eval(&x, &y), p.eval(&x, &(&y + &a)));
        }
    }

    #[test]
    fn partials_and_reflections() {
        let p = BiPoly::from_ints(&[((1, 2), 3), ((3, 1), 1)]);
        assert_eq!(p.partial_x(), BiPoly::from_ints(&[((0, 2), 3), ((2, 1), 3)]));
        assert_eq!(p.partial_y(), BiPoly::from_ints(&[((1, 1), 6), ((3, 0), 1)]));
        assert_eq!(p.reflect_x(), BiPoly::from_ints(&[((1, 2), -3), ((3, 1), -1)]));
        assert_eq!(p.reflect_y(), BiPoly::from_ints(&[((1, 2), 3), ((3, 1), -1)]));
        assert_eq!(binomial(5, 2), rat(10));
    }
}
