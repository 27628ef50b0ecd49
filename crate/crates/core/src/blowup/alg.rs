//! Arithmetic in Q(t) for a real algebraic t, held as polynomials reduced
//! modulo a square-free polynomial that has t as a root.

use num_traits::Zero;

use crate::poly::{Poly, RealRoot, Sign};

#[derive(Debug, Clone)]
pub struct AlgContext {
    root: RealRoot,
}

impl AlgContext {
    pub fn new(root: &RealRoot) -> AlgContext {
        let mut root = root.clone();
        if let Some(x) = root.rational().cloned() {
            root.defining = &Poly::x() - &Poly::constant(x);
        }
        AlgContext { root }
    }

    pub fn modulus(&self) -> &Poly {
        &self.root.defining
    }

    pub fn root(&self) -> &RealRoot {
        &self.root
    }

    pub fn reduce(&self, a: &Poly) -> Poly {
        if a.degree().unwrap_or(0) < self.modulus().degree().unwrap_or(1) {
            return a.clone();
        }
        a.rem(self.modulus())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a * b))
    }

    pub fn sign(&mut self, a: &Poly) -> Sign {
        if a.is_zero() {
            return Sign::Zero;
        }
        if a.degree() == Some(0) {
            return Sign::of(&a.coeff(0));
        }
        let s = self.root.sign_of(a);
        if s == Sign::Zero {
            // shrink the modulus to the factor carrying the root
            let g = Poly::gcd(self.modulus(), a);
            if g.degree().unwrap_or(0) > 0 {
                self.root.defining = g;
            }
        }
        s
    }

    pub fn is_zero(&mut self, a: &Poly) -> bool {
        self.sign(a) == Sign::Zero
    }

    /// Inverse of an element that is nonzero at the root.
    pub fn inv(&mut self, a: &Poly) -> Option<Poly> {
        if self.is_zero(a) {
            return None;
        }
        let a = self.reduce(a);
        if a.degree() == Some(0) {
            return Some(Poly::constant(a.coeff(0).recip()));
        }
        let g = Poly::gcd(self.modulus(), &a);
        if g.degree().unwrap_or(0) > 0 {
            // the root is not a zero of g; drop that factor
            self.root.defining = self.modulus().div_exact(&g).monic();
        }
        let (g, s, _) = Poly::ext_gcd(&self.reduce(&a), self.modulus());
        debug_assert_eq!(g.degree(), Some(0));
        let c = g.coeff(0);
        debug_assert!(!c.is_zero());
        Some(self.reduce(&s.scale(&c.recip())))
    }
}
