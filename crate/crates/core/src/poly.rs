//! Exact univariate polynomials over the rationals, real-root isolation and
//! radical comparisons.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    // to_f64 on huge numerators overflows; scale through the bit lengths
    let n = q.numer();
    let d = q.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb < 1000 && db < 1000 {
        return n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN);
    }
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        Rational::new(n.clone(), d.clone() << shift as usize)
    } else {
        Rational::new(n.clone() << (-shift) as usize, d.clone())
    };
    let base = scaled.numer().to_f64().unwrap() / scaled.denom().to_f64().unwrap();
    base * 2f64.powi(shift as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn of_int(n: i64) -> Sign {
        match n.cmp(&0) {
            std::cmp::Ordering::Less => Sign::Negative,
            std::cmp::Ordering::Equal => Sign::Zero,
            std::cmp::Ordering::Greater => Sign::Positive,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid radical exponent {num}/{den}")]
    InvalidExponent { num: i64, den: i64 },
    #[error("radical base must be positive")]
    NonPositiveBase,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Sparse polynomial in one variable with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<u32, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::monomial(c, 0)
    }

    /// The polynomial `x`.
    pub fn x() -> Poly {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, e: u32) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, Rational)>>(it: I) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    /// Integer coefficients in increasing exponent order starting at 0.
    pub fn from_ints(coeffs: &[i64]) -> Poly {
        Poly::from_terms(coeffs.iter().enumerate().map(|(e, &c)| (e as u32, rat(c))))
    }

    pub fn add_term(&mut self, e: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn coeff(&self, e: u32) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.terms.values().next_back().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn trailing_coeff(&self) -> Rational {
        self.terms.values().next().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        // Horner over the dense range, skipping runs of zeros with powers
        let mut acc = Rational::zero();
        let mut last: Option<u32> = None;
        for (&e, c) in self.terms.iter().rev() {
            if let Some(l) = last {
                acc *= pow_rat(x, l - e);
            }
            acc += c;
            last = Some(e);
        }
        if let Some(l) = last {
            acc *= pow_rat(x, l);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms.iter().map(|(&e, c)| rat_to_f64(c) * x.powi(e as i32)).sum()
    }

    pub fn sign_at(&self, x: &Rational) -> Sign {
        Sign::of(&self.eval(x))
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn shift_exponents(&self, by: u32) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect() }
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| **e > 0)
                .map(|(e, c)| (e - 1, c * rat(*e as i64))),
        )
    }

    pub fn nth_derivative(&self, k: u32) -> Poly {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Primitive with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + 1, c / rat(*e as i64 + 1)))
                .collect(),
        }
    }

    /// p(-x).
    pub fn reflect(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, if e % 2 == 1 { -c.clone() } else { c.clone() }))
                .collect(),
        }
    }

    /// p(x + a).
    pub fn translate(&self, a: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (&e, c) in &self.terms {
            let mut binom = BigInt::one();
            for k in 0..=e {
                // term c * C(e,k) x^k a^(e-k)
                let coef = c * Rational::from_integer(binom.clone()) * pow_rat(a, e - k);
                out.add_term(k, coef);
                binom = binom * BigInt::from(e - k) / BigInt::from(k + 1);
            }
        }
        out
    }

    /// p(q(x)).
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut out = Poly::zero();
        let mut last: Option<u32> = None;
        for (&e, c) in self.terms.iter().rev() {
            if let Some(l) = last {
                out = &out * &q.pow(l - e);
            }
            out = &out + &Poly::constant(c.clone());
            last = Some(e);
        }
        if let Some(l) = last {
            out = &out * &q.pow(l);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Terms with exponent below `n`.
    pub fn truncate(&self, n: u32) -> Poly {
        Poly { terms: self.terms.range(..n).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading_coeff();
        self.scale(&lc.recip())
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly), PolyError> {
        let dd = d.degree().ok_or(PolyError::DivisionByZero)?;
        let lc = d.leading_coeff();
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = r.leading_coeff() / &lc;
            let e = rd - dd;
            for (de, dc) in d.terms() {
                r.add_term(de + e, -(dc * &c));
            }
            q.add_term(e, c);
        }
        Ok((q, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).expect("nonzero divisor").1
    }

    /// Exact quotient; panics on a nonzero remainder in debug builds.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d).expect("nonzero divisor");
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Extended gcd: returns (g, s, t) with s a + t b = g, g monic.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).unwrap();
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading_coeff().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Square-free part (monic).
    pub fn squarefree(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.div_exact(&g).monic()
    }

    /// Yun factorisation: factors f_1, f_2, ... with self = c * prod f_i^i.
    pub fn squarefree_factors(&self) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = Poly::gcd(self, &d);
        let mut b = self.div_exact(&a0);
        let mut c = d.div_exact(&a0);
        let mut dd = &c - &b.derivative();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let f = Poly::gcd(&b, &dd);
            b = b.div_exact(&f);
            c = dd.div_exact(&f);
            dd = &c - &b.derivative();
            if f.degree().unwrap_or(0) > 0 {
                out.push((f.monic(), i));
            }
            i += 1;
        }
        out
    }

    /// Multiplicity of `root` as a zero, for a rational root.
    pub fn multiplicity_at(&self, root: &Rational) -> u32 {
        let mut k = 0;
        let mut p = self.clone();
        while !p.is_zero() && p.eval(root).is_zero() {
            k += 1;
            p = p.derivative();
        }
        k
    }

    /// Bound strictly exceeding every |root|.
    pub fn root_bound(&self) -> Rational {
        let lc = self.leading_coeff().abs();
        let d = self.degree().unwrap_or(0);
        let mut m = Rational::zero();
        for (e, c) in self.terms() {
            if e < d {
                let v = c.abs() / &lc;
                if v > m {
                    m = v;
                }
            }
        }
        m + rat(1)
    }

    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            // positive rescale keeps the sign pattern and tames growth
            let lc = r.leading_coeff().abs();
            seq.push(-&r.scale(&lc.recip()));
        }
        seq
    }

    /// Real roots with multiplicities, optionally restricted to the closed
    /// interval `domain`.
    pub fn real_roots(&self, domain: Option<(&Rational, &Rational)>) -> Result<RootList, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut roots: Vec<RealRoot> = Vec::new();
        for (f, mult) in self.squarefree_factors() {
            for mut r in isolate(&f) {
                r.multiplicity = mult;
                roots.push(r);
            }
        }
        separate(&mut roots);
        let whole = self.squarefree();
        for r in roots.iter_mut() {
            while !r.is_exact() && (whole.eval(&r.lo).is_zero() || whole.eval(&r.hi).is_zero()) {
                r.bisect();
            }
        }
        roots.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        if let Some((a, b)) = domain {
            let mut kept = Vec::new();
            for mut r in roots {
                if r.clip_inside(a, b) {
                    kept.push(r);
                }
            }
            roots = kept;
        }
        Ok(RootList { roots })
    }
}

fn pow_rat(x: &Rational, k: u32) -> Rational {
    num_traits::pow(x.clone(), k as usize)
}

/// Sign variations of a Sturm sequence at x.
fn variations(seq: &[Poly], x: &Rational) -> usize {
    let mut count = 0;
    let mut prev = Sign::Zero;
    for p in seq {
        let s = p.sign_at(x);
        if s == Sign::Zero {
            continue;
        }
        if prev != Sign::Zero && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// Number of distinct roots of the square-free `f` in (lo, hi].
pub fn count_roots(seq: &[Poly], lo: &Rational, hi: &Rational) -> usize {
    variations(seq, lo).saturating_sub(variations(seq, hi))
}

/// Number of distinct roots of the square-free polynomial in the open interval.
fn count_open(f: &Poly, seq: &[Poly], lo: &Rational, hi: &Rational) -> usize {
    let c = count_roots(seq, lo, hi);
    if f.eval(hi).is_zero() {
        c - 1
    } else {
        c
    }
}

fn isolate(f: &Poly) -> Vec<RealRoot> {
    let mut out = Vec::new();
    match f.degree().unwrap_or(0) {
        0 => return out,
        1 => {
            out.push(RealRoot::exact(-f.coeff(0) / f.coeff(1), f.clone()));
            return out;
        }
        _ => {}
    }
    let seq = f.sturm_sequence();
    let b = f.root_bound();
    let lo = -b.clone();
    let n = count_open(f, &seq, &lo, &b);
    let mut stack = vec![(lo, b, n)];
    while let Some((lo, hi, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(RealRoot::interval(lo, hi, f.clone()));
            continue;
        }
        let mid = (&lo + &hi) / rat(2);
        let left = count_open(f, &seq, &lo, &mid);
        let at_mid = f.eval(&mid).is_zero() as usize;
        if at_mid == 1 {
            out.push(RealRoot::exact(mid.clone(), f.clone()));
        }
        stack.push((lo, mid.clone(), left));
        stack.push((mid, hi, n - left - at_mid));
    }
    out
}

/// Refine until isolating intervals coming from different factors are disjoint.
fn separate(roots: &mut [RealRoot]) {
    loop {
        let mut changed = false;
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if roots[i].overlaps(&roots[j]) {
                    if roots[i].width() >= roots[j].width() {
                        roots[i].bisect();
                    } else {
                        roots[j].bisect();
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// A real root of a square-free rational polynomial, held as an isolating
/// interval (lo, hi) or as the exact point lo == hi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: u32,
    /// Square-free defining polynomial with exactly one root in (lo, hi].
    pub defining: Poly,
}

impl RealRoot {
    pub fn exact(x: Rational, defining: Poly) -> RealRoot {
        RealRoot { lo: x.clone(), hi: x, multiplicity: 1, defining }
    }

    fn interval(lo: Rational, hi: Rational, defining: Poly) -> RealRoot {
        let mut r = RealRoot { lo, hi, multiplicity: 1, defining };
        r.tighten();
        r
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value when the root is rational and already pinned.
    pub fn rational(&self) -> Option<&Rational> {
        if self.is_exact() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rat(2)
    }

    /// Floating value, refining a copy of the interval to about 1e-15.
    pub fn approx(&self) -> f64 {
        let mut r = self.clone();
        r.refine_to(&Rational::new(1.into(), (1u64 << 50).into()));
        rat_to_f64(&r.midpoint())
    }

    fn overlaps(&self, other: &RealRoot) -> bool {
        if self.is_exact() && other.is_exact() {
            return self.lo == other.lo;
        }
        if self.is_exact() {
            return self.lo > other.lo && self.lo < other.hi;
        }
        if other.is_exact() {
            return other.lo > self.lo && other.lo < self.hi;
        }
        self.lo < other.hi && other.lo < self.hi
    }

    /// Make sure the defining polynomial is nonzero at both endpoints.
    fn tighten(&mut self) {
        if self.is_exact() {
            return;
        }
        let f = self.defining.clone();
        let seq = f.sturm_sequence();
        while f.eval(&self.lo).is_zero() || f.eval(&self.hi).is_zero() {
            let mid = self.midpoint();
            let left = count_open(&f, &seq, &self.lo, &mid);
            if f.eval(&mid).is_zero() && left == 0 && count_open(&f, &seq, &mid, &self.hi) == 0 {
                self.lo = mid.clone();
                self.hi = mid;
                return;
            }
            if left == 1 {
                self.hi = mid;
            } else {
                self.lo = mid;
            }
        }
    }

    /// Halve the isolating interval.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = self.midpoint();
        let sm = self.defining.sign_at(&mid);
        if sm == Sign::Zero {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let sh = self.defining.sign_at(&self.hi);
        if sm == sh {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    pub fn refine_to(&mut self, width: &Rational) {
        while !self.is_exact() && &self.width() > width {
            self.bisect();
        }
    }

    /// Keep only if inside [a, b]; refines as needed.
    fn clip_inside(&mut self, a: &Rational, b: &Rational) -> bool {
        loop {
            if self.is_exact() {
                return &self.lo >= a && &self.lo <= b;
            }
            if &self.lo >= a && &self.hi <= b {
                return true;
            }
            if &self.hi <= a || &self.lo >= b {
                return false;
            }
            for endpoint in [a, b] {
                if &self.lo < endpoint
                    && endpoint < &self.hi
                    && self.defining.eval(endpoint).is_zero()
                {
                    self.lo = endpoint.clone();
                    self.hi = endpoint.clone();
                }
            }
            self.bisect();
        }
    }

    /// Sign of `f` at this root, decided exactly.
    pub fn sign_of(&mut self, f: &Poly) -> Sign {
        if let Some(x) = self.rational() {
            return f.sign_at(x);
        }
        if f.is_zero() {
            return Sign::Zero;
        }
        let g = Poly::gcd(f, &self.defining);
        if g.degree().unwrap_or(0) > 0 {
            // g is square-free, nonzero at the endpoints, and can only vanish
            // inside at this root
            if g.sign_at(&self.lo) != g.sign_at(&self.hi) {
                return Sign::Zero;
            }
        }
        let fs = f.squarefree();
        let seq = fs.sturm_sequence();
        loop {
            if self.is_exact() {
                return f.sign_at(&self.lo);
            }
            let lo_s = fs.sign_at(&self.lo);
            if lo_s != Sign::Zero && count_roots(&seq, &self.lo, &self.hi) == 0 {
                return f.sign_at(&self.hi);
            }
            self.bisect();
        }
    }

    /// Try to pin the root to a rational value with small denominator.
    pub fn try_rational(&mut self) -> Option<Rational> {
        if let Some(x) = self.rational() {
            return Some(x.clone());
        }
        let f = self.defining.clone();
        if f.degree() == Some(1) {
            let x = -f.coeff(0) / f.coeff(1);
            self.lo = x.clone();
            self.hi = x.clone();
            return Some(x);
        }
        // clear denominators; a rational root a/b has b | leading coefficient
        let mut lcm = BigInt::one();
        for (_, c) in f.terms() {
            lcm = lcm.lcm(c.denom());
        }
        let lead = (f.leading_coeff() * Rational::from_integer(lcm)).to_integer().abs();
        let bound = lead.to_u64()?;
        if bound > 4096 {
            return None;
        }
        let sep = Rational::new(BigInt::one(), BigInt::from(2 * bound * bound));
        self.refine_to(&sep);
        if let Some(x) = self.rational() {
            return Some(x.clone());
        }
        for den in 1..=bound {
            if bound % den != 0 {
                continue;
            }
            let scaled = self.midpoint() * rat(den as i64);
            let num = scaled.round().to_integer();
            let cand = Rational::new(num, BigInt::from(den));
            if cand > self.lo && cand < self.hi && f.eval(&cand).is_zero() {
                self.lo = cand.clone();
                self.hi = cand.clone();
                return Some(cand);
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootList {
    pub roots: Vec<RealRoot>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RealRoot> {
        self.roots.iter()
    }

    pub fn nonzero(&self) -> Vec<&RealRoot> {
        self.roots.iter().filter(|r| r.rational().is_none_or(|x| !x.is_zero())).collect()
    }
}

/// Sign of `lhs - base^(num/den)`, exactly.
pub fn compare_radical(lhs: &Rational, base: &Rational, num: i64, den: i64) -> Result<Sign, PolyError> {
    if den <= 0 || num <= 0 {
        return Err(PolyError::InvalidExponent { num, den });
    }
    if !base.is_positive() {
        return Err(PolyError::NonPositiveBase);
    }
    if !lhs.is_positive() {
        return Ok(Sign::Negative);
    }
    let l = pow_rat(lhs, den as u32);
    let r = pow_rat(base, num as u32);
    Ok(Sign::of(&(l - r)))
}

/// Rational approximation of `base^(num/den)` to within `2^-bits`, by
/// bisection on exact comparisons.
pub fn radical_approx(base: &Rational, num: i64, den: i64, bits: u32) -> Rational {
    let mut lo = Rational::zero();
    let mut hi = rat(1);
    while compare_radical(&hi, base, num, den).unwrap() == Sign::Negative {
        hi *= rat(2);
    }
    let eps = Rational::new(BigInt::one(), BigInt::one() << bits as usize);
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / rat(2);
        match compare_radical(&mid, base, num, den).unwrap() {
            Sign::Zero => return mid,
            Sign::Negative => lo = mid,
            Sign::Positive => hi = mid,
        }
    }
    (lo + hi) / rat(2)
}

/// Fixed-point decimal rendering with `digits` fractional digits.
pub fn to_decimal(q: &Rational, digits: usize) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a * Rational::from_integer(scale.clone())).round().to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = format!("{}{}", if neg && !scaled.is_zero() { "-" } else { "" }, int);
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
    }
    s
}

/// Parse "a", "-a", "a/b" into a rational. Decimal floats are rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = format_rational(&a);
            match (e, a.is_one()) {
                (0, _) => write!(f, "{}", coef)?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{}*x", coef)?,
                (_, true) => write!(f, "x^{}", e)?,
                (_, false) => write!(f, "{}*x^{}", coef, e)?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
