//! Truncated power series in one variable with rational coefficients.

use num_traits::{One, Zero};

use crate::poly::{rat, Poly, Rational};

/// Coefficients of `x^0 .. x^order`; higher terms are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    pub fn zero(order: usize) -> Series {
        Series { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn from_poly(p: &Poly, order: usize) -> Series {
        let mut s = Series::zero(order);
        for (e, c) in p.terms() {
            if (e as usize) <= order {
                s.coeffs[e as usize] = c.clone();
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set(&mut self, k: usize, c: Rational) {
        if k <= self.order() {
            self.coeffs[k] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index and value of the first nonzero coefficient.
    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero())
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(self.coeffs.iter().enumerate().map(|(k, c)| (k as u32, c.clone())))
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        let mut out = Series::zero(n);
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    /// `self^alpha` for a series with constant term 1.
    pub fn pow_rational(&self, alpha: &Rational) -> Series {
        assert!(self.coeffs[0].is_one(), "constant term must be 1");
        let n = self.order();
        let mut a = Series::zero(n);
        a.coeffs[0] = Rational::one();
        let alpha1 = alpha + Rational::one();
        for k in 1..=n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                let b = &self.coeffs[j];
                if b.is_zero() {
                    continue;
                }
                let w = &alpha1 * rat(j as i64) - rat(k as i64);
                acc += w * b * &a.coeffs[k - j];
            }
            a.coeffs[k] = acc / rat(k as i64);
        }
        a
    }

    /// Powers `self^0 .. self^count` for a series without constant term.
    pub fn powers(&self, count: usize) -> Vec<Series> {
        let mut out = vec![Series::from_poly(&Poly::one(), self.order())];
        for _ in 0..count {
            let next = out.last().unwrap().mul(self);
            out.push(next);
        }
        out
    }

    /// `p(self)` for a polynomial `p` and a series without constant term.
    pub fn compose_poly(&self, p: &Poly) -> Series {
        let deg = p.degree().unwrap_or(0) as usize;
        let pw = self.powers(deg);
        let mut out = Series::zero(self.order());
        for (e, c) in p.terms() {
            for (k, v) in pw[e as usize].coeffs.iter().enumerate() {
                if !v.is_zero() {
                    out.coeffs[k] += c * v;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_squares_back() {
        let s = Series::from_poly(&Poly::from_ints(&[1, 3, -2]), 8);
        let r = s.pow_rational(&Rational::new(1.into(), 2.into()));
        assert_eq!(r.mul(&r), s);
    }

    #[test]
    fn compose_matches_polynomial() {
        let inner = Poly::from_ints(&[0, 1, 2]);
        let outer = Poly::from_ints(&[0, 0, 1, 1]);
        let s = Series::from_poly(&inner, 10).compose_poly(&outer);
        assert_eq!(s.to_poly(), outer.compose(&inner));
    }
}
