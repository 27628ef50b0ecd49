//! The generalized Lienard system `x' = phi(y) - F(x)`, `y' = -g(x)`, its
//! normalizations and the sign thresholds used by the decision tables.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::{compare_radical, radical_approx, rat, rat_to_f64, to_decimal, Poly, Rational, Sign};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("{0} has no coefficients")]
    EmptyPolynomial(&'static str),
    #[error("boundary coefficient {0} is zero")]
    ZeroBoundaryCoefficient(String),
    #[error("{0} has a term of exponent 0; exponents start at 1")]
    ConstantTerm(&'static str),
    #[error("threshold {0} is undefined for these exponents")]
    UndefinedThreshold(&'static str),
}

/// Exponent windows of the three polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponents {
    pub phi_low: u32,
    pub phi_high: u32,
    pub damping_low: u32,
    pub damping_high: u32,
    pub restoring_low: u32,
    pub restoring_high: u32,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedLienardSystem {
    /// phi(y)
    pub phi: Poly,
    /// F(x)
    pub damping: Poly,
    /// g(x)
    pub restoring: Poly,
    exps: Exponents,
}

fn window(name: &'static str, symbol: char, terms: &[(u32, Rational)]) -> Result<(u32, u32, Poly), SystemError> {
    if terms.is_empty() {
        return Err(SystemError::EmptyPolynomial(name));
    }
    let low = terms.iter().map(|t| t.0).min().unwrap();
    let high = terms.iter().map(|t| t.0).max().unwrap();
    if low == 0 {
        return Err(SystemError::ConstantTerm(name));
    }
    let poly = Poly::from_terms(terms.iter().cloned());
    if poly.coeff(low).is_zero() {
        return Err(SystemError::ZeroBoundaryCoefficient(format!("{}_{}", symbol, low)));
    }
    if poly.coeff(high).is_zero() {
        return Err(SystemError::ZeroBoundaryCoefficient(format!("{}_{}", symbol, high)));
    }
    Ok((low, high, poly))
}

/// Validate and assemble a system from (exponent, coefficient) lists.
pub fn build_system(
    phi: &[(u32, Rational)],
    damping: &[(u32, Rational)],
    restoring: &[(u32, Rational)],
) -> Result<GeneralizedLienardSystem, SystemError> {
    let (p, l, phi) = window("phi", 'a', phi)?;
    let (q, m, damping) = window("F", 'b', damping)?;
    let (r, n, restoring) = window("g", 'c', restoring)?;
    Ok(GeneralizedLienardSystem {
        phi,
        damping,
        restoring,
        exps: Exponents {
            phi_low: p,
            phi_high: l,
            damping_low: q,
            damping_high: m,
            restoring_low: r,
            restoring_high: n,
        },
    })
}

impl GeneralizedLienardSystem {
    pub fn from_polys(phi: Poly, damping: Poly, restoring: Poly) -> Result<Self, SystemError> {
        let terms = |p: &Poly| p.terms().map(|(e, c)| (e, c.clone())).collect::<Vec<_>>();
        build_system(&terms(&phi), &terms(&damping), &terms(&restoring))
    }

    /// Integer-coefficient shorthand: `(exponent, coefficient)` triples.
    pub fn from_ints(phi: &[(u32, i64)], damping: &[(u32, i64)], restoring: &[(u32, i64)]) -> Result<Self, SystemError> {
        let conv = |v: &[(u32, i64)]| v.iter().map(|&(e, c)| (e, rat(c))).collect::<Vec<_>>();
        build_system(&conv(phi), &conv(damping), &conv(restoring))
    }

    pub fn exponents(&self) -> Exponents {
        self.exps
    }

    pub fn a_low(&self) -> Rational {
        self.phi.coeff(self.exps.phi_low)
    }
    pub fn a_high(&self) -> Rational {
        self.phi.coeff(self.exps.phi_high)
    }
    pub fn b_low(&self) -> Rational {
        self.damping.coeff(self.exps.damping_low)
    }
    pub fn b_high(&self) -> Rational {
        self.damping.coeff(self.exps.damping_high)
    }
    pub fn c_low(&self) -> Rational {
        self.restoring.coeff(self.exps.restoring_low)
    }
    pub fn c_high(&self) -> Rational {
        self.restoring.coeff(self.exps.restoring_high)
    }

    /// Multiply the whole vector field by `k`.
    pub fn scale_field(&self, k: &Rational) -> GeneralizedLienardSystem {
        GeneralizedLienardSystem {
            phi: self.phi.scale(k),
            damping: self.damping.scale(k),
            restoring: self.restoring.scale(k),
            exps: self.exps,
        }
    }

    pub fn apply(&self, t: SymmetryTransform) -> GeneralizedLienardSystem {
        let sx = if t.flip_x { -1 } else { 1 };
        let sy = if t.flip_y { -1 } else { 1 };
        let st = if t.reverse_time { -1 } else { 1 };
        let map = |p: &Poly, outer: i64, inner: i64| {
            Poly::from_terms(p.terms().map(|(e, c)| {
                let s = outer * if e % 2 == 1 { inner } else { 1 };
                (e, c * rat(s))
            }))
        };
        GeneralizedLienardSystem {
            phi: map(&self.phi, sx * st, sy),
            damping: map(&self.damping, sx * st, sx),
            restoring: map(&self.restoring, sy * st, sx),
            exps: self.exps,
        }
    }

    /// Vector field components as bivariate data `(P, Q)`, each a list of
    /// `((i, j), coefficient)` for `x^i y^j`.
    pub fn field_terms(&self) -> (Vec<((u32, u32), Rational)>, Vec<((u32, u32), Rational)>) {
        let mut p = Vec::new();
        for (e, c) in self.phi.terms() {
            p.push(((0, e), c.clone()));
        }
        for (e, c) in self.damping.terms() {
            p.push(((e, 0), -c.clone()));
        }
        let q = self.restoring.terms().map(|(e, c)| ((e, 0), -c.clone())).collect();
        (p, q)
    }

    pub fn to_f64(&self) -> FloatSystem {
        let conv = |p: &Poly| p.terms().map(|(e, c)| (e, rat_to_f64(c))).collect();
        FloatSystem { phi: conv(&self.phi), damping: conv(&self.damping), restoring: conv(&self.restoring) }
    }
}

impl fmt::Debug for GeneralizedLienardSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GeneralizedLienardSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phi = self.phi.to_string().replace('x', "y");
        write!(f, "x' = ({}) - ({}), y' = -({})", phi, self.damping, self.restoring)
    }
}

/// Floating-point copy of a system for the numeric path.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatSystem {
    pub phi: Vec<(u32, f64)>,
    pub damping: Vec<(u32, f64)>,
    pub restoring: Vec<(u32, f64)>,
}

fn eval_terms(terms: &[(u32, f64)], x: f64) -> f64 {
    terms.iter().map(|&(e, c)| c * x.powi(e as i32)).sum()
}

impl FloatSystem {
    pub fn phi(&self, y: f64) -> f64 {
        eval_terms(&self.phi, y)
    }
    pub fn damping(&self, x: f64) -> f64 {
        eval_terms(&self.damping, x)
    }
    pub fn restoring(&self, x: f64) -> f64 {
        eval_terms(&self.restoring, x)
    }
    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        (self.phi(y) - self.damping(x), -self.restoring(x))
    }
    pub fn degree(&self) -> u32 {
        self.phi
            .iter()
            .chain(&self.damping)
            .chain(&self.restoring)
            .map(|t| t.0)
            .max()
            .unwrap_or(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SymmetryTransform {
    pub flip_x: bool,
    pub flip_y: bool,
    pub reverse_time: bool,
}

impl SymmetryTransform {
    pub const IDENTITY: SymmetryTransform = SymmetryTransform { flip_x: false, flip_y: false, reverse_time: false };

    /// The eight elements in canonical order: identity, x, y, xy, then the
    /// same four composed with time reversal.
    pub fn all() -> [SymmetryTransform; 8] {
        let mut out = [SymmetryTransform::IDENTITY; 8];
        for (i, t) in out.iter_mut().enumerate() {
            t.flip_x = i & 1 == 1;
            t.flip_y = i & 2 == 2;
            t.reverse_time = i & 4 == 4;
        }
        out
    }

    pub fn compose(self, other: SymmetryTransform) -> SymmetryTransform {
        SymmetryTransform {
            flip_x: self.flip_x ^ other.flip_x,
            flip_y: self.flip_y ^ other.flip_y,
            reverse_time: self.reverse_time ^ other.reverse_time,
        }
    }

    pub fn is_identity(self) -> bool {
        self == SymmetryTransform::IDENTITY
    }

    pub fn label(self) -> String {
        let mut s = String::new();
        if self.flip_x {
            s.push('x');
        }
        if self.flip_y {
            s.push('y');
        }
        if self.reverse_time {
            s.push('t');
        }
        if s.is_empty() {
            s.push_str("id");
        }
        s
    }

    /// Orientation-reversing in the plane (one axis flipped).
    pub fn reflects(self) -> bool {
        self.flip_x ^ self.flip_y
    }
}

/// First group element (canonical order) whose image satisfies `pred`.
pub fn symmetry_search<F>(sys: &GeneralizedLienardSystem, pred: F) -> Option<(SymmetryTransform, GeneralizedLienardSystem)>
where
    F: Fn(&GeneralizedLienardSystem) -> bool,
{
    SymmetryTransform::all().into_iter().find_map(|t| {
        let image = sys.apply(t);
        pred(&image).then_some((t, image))
    })
}

/// Record of a time rescale `t -> t / factor`; negative factor reverses time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeRecord {
    /// Positive magnitude of the rescale as a rational string.
    pub scale: String,
    pub reversed: bool,
}

impl TimeRecord {
    pub fn identity() -> TimeRecord {
        TimeRecord { scale: "1".into(), reversed: false }
    }
}

fn normalize_by(sys: &GeneralizedLienardSystem, lead: Rational) -> (GeneralizedLienardSystem, TimeRecord) {
    let k = -lead.recip();
    let record = TimeRecord { scale: crate::poly::format_rational(&k.abs()), reversed: k.is_negative() };
    (sys.scale_field(&k), record)
}

/// Rescale time so that the lowest coefficient of phi is -1.
pub fn normalize_time(sys: &GeneralizedLienardSystem) -> (GeneralizedLienardSystem, TimeRecord) {
    normalize_by(sys, sys.a_low())
}

/// Rescale time so that the highest coefficient of phi is -1.
pub fn normalize_time_high(sys: &GeneralizedLienardSystem) -> (GeneralizedLienardSystem, TimeRecord) {
    normalize_by(sys, sys.a_high())
}

/// Result of the joint normalization of both phi boundary coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PairNormalization {
    /// y is replaced by `alpha * y`.
    pub alpha: f64,
    /// Time factor applied to the field.
    pub time_factor: f64,
    /// Signs of the boundary coefficients after the transform.
    pub signs: (i8, i8),
    /// phi has a nonzero real root; rules out a global center.
    pub phi_changes_sign: bool,
    pub system: FloatSystem,
}

pub fn normalize_pair(sys: &GeneralizedLienardSystem) -> PairNormalization {
    let e = sys.exponents();
    let opposite = Sign::of(&sys.a_low()) != Sign::of(&sys.a_high());
    if e.phi_low == e.phi_high {
        let (norm, rec) = normalize_time(sys);
        let k = rat_to_f64(&-sys.a_low().recip());
        debug_assert_eq!(rec.reversed, k < 0.0);
        return PairNormalization {
            alpha: 1.0,
            time_factor: k,
            signs: (-1, -1),
            phi_changes_sign: false,
            system: norm.to_f64(),
        };
    }
    let ap = rat_to_f64(&sys.a_low());
    let al = rat_to_f64(&sys.a_high());
    let alpha = (ap / al).abs().powf(1.0 / (e.phi_high - e.phi_low) as f64);
    let factor = -1.0 / (ap * alpha.powi(e.phi_low as i32));
    let f = sys.to_f64();
    let system = FloatSystem {
        phi: f.phi.iter().map(|&(i, c)| (i, c * factor * alpha.powi(i as i32))).collect(),
        damping: f.damping.iter().map(|&(i, c)| (i, c * factor)).collect(),
        restoring: f.restoring.iter().map(|&(i, c)| (i, c * factor / alpha)).collect(),
    };
    PairNormalization {
        alpha,
        time_factor: factor,
        signs: (-1, if opposite { 1 } else { -1 }),
        phi_changes_sign: opposite,
        system,
    }
}

/// A value `coefficient * base^(num/den)` with `base > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    #[serde(with = "rational_string")]
    pub coefficient: Rational,
    #[serde(with = "rational_string")]
    pub base: Rational,
    pub num: u32,
    pub den: u32,
}

impl Threshold {
    fn new(coefficient: Rational, base: Rational, num: i64, den: i64) -> Threshold {
        let (base, num, den) = if num * den < 0 { (base.recip(), num.abs(), den.abs()) } else { (base, num.abs(), den.abs()) };
        let g = num_integer::gcd(num, den);
        Threshold { coefficient, base, num: (num / g) as u32, den: (den / g) as u32 }
    }

    pub fn negated(&self) -> Threshold {
        Threshold { coefficient: -self.coefficient.clone(), ..self.clone() }
    }

    /// Sign of `x - value`.
    pub fn compare(&self, x: &Rational) -> Sign {
        if self.coefficient.is_zero() {
            return Sign::of(x);
        }
        let scaled = x / &self.coefficient;
        let s = compare_radical(&scaled, &self.base, self.num as i64, self.den as i64).expect("valid threshold");
        if self.coefficient.is_positive() {
            s
        } else {
            s.flip()
        }
    }

    /// Rational approximation within `2^-bits` relative to the coefficient.
    pub fn approx(&self, bits: u32) -> Rational {
        &self.coefficient * radical_approx(&self.base, self.num as i64, self.den as i64, bits)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.coefficient) * rat_to_f64(&self.base).powf(self.num as f64 / self.den as f64)
    }

    pub fn decimal(&self, digits: usize) -> String {
        let bits = (digits as f64 * 3.33) as u32 + 40 + self.coefficient.numer().bits() as u32;
        to_decimal(&self.approx(bits), digits)
    }

    /// Exact rational value, when the radical happens to be rational.
    pub fn exact_value(&self) -> Option<Rational> {
        let r = radical_approx(&self.base, self.num as i64, self.den as i64, 256);
        // candidate by continued fraction would be overkill; test the rounded value
        for d in 1..=4096i64 {
            let cand = (r.clone() * rat(d)).round() / rat(d);
            if compare_radical(&cand, &self.base, self.num as i64, self.den as i64).ok() == Some(Sign::Zero) {
                return Some(&self.coefficient * cand);
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub c_hat: Threshold,
    pub c_star: Threshold,
    pub c_star_upper: Option<Threshold>,
}

impl Thresholds {
    pub fn c_star_upper(&self) -> Result<&Threshold, SystemError> {
        self.c_star_upper.as_ref().ok_or(SystemError::UndefinedThreshold("c^*"))
    }
}

pub fn thresholds(sys: &GeneralizedLienardSystem) -> Thresholds {
    let e = sys.exponents();
    let (p, q) = (e.phi_low as i64, e.damping_low as i64);
    let (l, m, n) = (e.phi_high as i64, e.damping_high as i64, e.restoring_high as i64);
    let c_hat = Threshold::new(rat(q), sys.b_low().abs() / rat(p + 1), p + 1, p);
    let c_star = Threshold::new(rat(l), sys.b_high().abs() / rat(l + 1), l + 1, l);
    let c_star_upper = (m != l && n != m && n != l).then(|| {
        let coef = Rational::new(((m - l) * (n + 1)).into(), ((n - m) * (l + 1)).into());
        let base = (sys.b_high() * rat(n - m) / rat(n - l)).abs();
        Threshold::new(coef, base, n - l, m - l)
    });
    Thresholds { c_hat, c_star, c_star_upper }
}

pub(crate) mod rational_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::poly::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn sys_a() -> GeneralizedLienardSystem {
        GeneralizedLienardSystem::from_ints(&[(3, -1)], &[(4, 1)], &[(3, -1)]).unwrap()
    }

    #[test]
    fn example_exponents() {
        let e = sys_a().exponents();
        assert_eq!((e.phi_low, e.phi_high, e.damping_low, e.damping_high, e.restoring_low, e.restoring_high), (3, 3, 4, 4, 3, 3));
        let d = GeneralizedLienardSystem::from_ints(&[(3, -1), (7, -1)], &[(4, 1)], &[(3, -1), (5, -1)]).unwrap();
        let e = d.exponents();
        assert_eq!((e.phi_low, e.phi_high, e.damping_low, e.damping_high, e.restoring_low, e.restoring_high), (3, 7, 4, 4, 3, 5));
    }

    #[test]
    fn zero_boundary_rejected() {
        let err = GeneralizedLienardSystem::from_ints(&[(3, 0), (5, -1)], &[(4, 1)], &[(3, -1)]).unwrap_err();
        assert_eq!(err, SystemError::ZeroBoundaryCoefficient("a_3".into()));
        assert_eq!(
            GeneralizedLienardSystem::from_ints(&[], &[(4, 1)], &[(3, -1)]).unwrap_err(),
            SystemError::EmptyPolynomial("phi")
        );
    }

    #[test]
    fn time_normalization() {
        let (s, rec) = normalize_time(&sys_a());
        assert_eq!(s, sys_a());
        assert_eq!(rec, TimeRecord::identity());
        let two = GeneralizedLienardSystem::from_ints(&[(3, 2)], &[(4, 1)], &[(3, -1)]).unwrap();
        let (s, rec) = normalize_time(&two);
        assert_eq!(s.a_low(), rat(-1));
        assert!(rec.reversed);
        assert_eq!(rec.scale, "1/2");
        let three = GeneralizedLienardSystem::from_ints(&[(3, -3)], &[(4, 1)], &[(3, -1)]).unwrap();
        let (s, rec) = normalize_time(&three);
        assert_eq!(s.a_low(), rat(-1));
        assert!(!rec.reversed);
        let (again, _) = normalize_time(&s);
        assert_eq!(again, s);
    }

    #[test]
    fn pair_normalization() {
        let s = GeneralizedLienardSystem::from_ints(&[(3, -2), (7, -4)], &[(4, 1)], &[(3, -1)]).unwrap();
        let pn = normalize_pair(&s);
        assert!((pn.alpha - 0.5f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(pn.signs, (-1, -1));
        let lo = pn.system.phi.iter().find(|t| t.0 == 3).unwrap().1;
        let hi = pn.system.phi.iter().find(|t| t.0 == 7).unwrap().1;
        assert!((lo + 1.0).abs() < 1e-12 && (hi + 1.0).abs() < 1e-12);
        let mixed = GeneralizedLienardSystem::from_ints(&[(3, -1), (5, 1)], &[(4, 1)], &[(3, -1)]).unwrap();
        assert!(normalize_pair(&mixed).phi_changes_sign);
        assert!(!normalize_pair(&sys_a()).phi_changes_sign);
    }

    #[test]
    fn x_flip_on_even_damping() {
        // x' = -y^3 - x^4, y' = x^3
        let s = sys_a();
        let t = SymmetryTransform { flip_x: true, flip_y: false, reverse_time: false };
        let img = s.apply(t);
        // x -> -x flips the x' equation sign: F' (x) = -F(-x) = -x^4 and g'(x) = g(-x)
        assert_eq!(img.b_low(), rat(-1));
        assert_eq!(img.c_low(), rat(1));
        assert_eq!(img.a_low(), rat(1));
    }

    #[test]
    fn search_order_and_failure() {
        let s = sys_a();
        let (t, _) = symmetry_search(&s, |_| true).unwrap();
        assert!(t.is_identity());
        assert!(symmetry_search(&s, |x| x.exponents().damping_high % 2 == 1).is_none());
        let (t, img) = symmetry_search(&s, |x| x.b_low() < rat(0) && x.a_low() < rat(0)).unwrap();
        assert_eq!(t.label(), "xy");
        assert_eq!(img.c_low(), rat(-1));
    }

    #[test]
    fn group_involutions() {
        let s = GeneralizedLienardSystem::from_ints(&[(2, -1), (5, 3)], &[(1, 2), (4, -1)], &[(3, -1), (6, 2)]).unwrap();
        for t in SymmetryTransform::all() {
            assert_eq!(s.apply(t).apply(t), s);
            for u in SymmetryTransform::all() {
                assert_eq!(s.apply(t).apply(u), s.apply(t.compose(u)));
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let s = GeneralizedLienardSystem::from_ints(&[(1, -1)], &[(2, -2)], &[(3, -1)]).unwrap();
        let th = thresholds(&s);
        assert_eq!(th.c_hat.exact_value(), Some(rat(2)));
        assert_eq!(th.c_hat.compare(&rat(2)), Sign::Zero);
        let s = GeneralizedLienardSystem::from_ints(&[(3, -1)], &[(3, 1)], &[(3, -1)]).unwrap();
        let th = thresholds(&s);
        assert!((th.c_star.to_f64() - 3.0 * 0.25f64.powf(4.0 / 3.0)).abs() < 1e-12);
        assert_eq!(&th.c_star.decimal(30)[..7], "0.47247");
        assert_eq!(th.c_star.negated().compare(&rat(-2)), Sign::Negative);
        assert_eq!(th.c_star.negated().compare(&ratio(-2, 5)), Sign::Positive);
        assert!(th.c_star_upper().is_err());
    }

    #[test]
    fn c_star_upper_formula() {
        // l=2, m=4, n=5, b=1: coefficient 2*6/(1*3)=4, base |1*1/3|, exponent 3/2
        let s = GeneralizedLienardSystem::from_ints(&[(2, -1)], &[(4, 1)], &[(5, 1)]).unwrap();
        let th = thresholds(&s).c_star_upper.unwrap();
        let expect = 4.0 * (1.0f64 / 3.0).powf(1.5);
        assert!((th.to_f64() - expect).abs() < 1e-12);
    }
}
