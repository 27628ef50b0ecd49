//! Portrait, monodromy and center test at the origin.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::{center_probe, NumericError, ProbeOptions, ProbeReport, ProbeVerdict, Stability};
use crate::poly::{format_rational, rat, Poly, Rational, Sign};
use crate::series::Series;
use crate::system::{normalize_time, symmetry_search, thresholds, GeneralizedLienardSystem, SymmetryTransform, TimeRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OriginError {
    #[error("parameters not covered by the table (oracle: {0})")]
    UnclassifiedByTable(String),
    #[error("series order {0} is too small (need at least 2)")]
    OrderTooSmall(usize),
    #[error("origin is not monodromic")]
    NotMonodromic,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OriginPortrait {
    #[serde(rename = "fig1-a")]
    A,
    #[serde(rename = "fig1-b")]
    B,
    #[serde(rename = "fig1-c")]
    C,
    #[serde(rename = "fig1-d")]
    D,
    #[serde(rename = "fig1-e")]
    E,
    #[serde(rename = "fig1-f")]
    F,
    #[serde(rename = "fig1-g")]
    G,
    /// fig1-h and fig1-i: center or focus, not separated by the table.
    #[serde(rename = "fig1-h/i")]
    Monodromic,
}

impl OriginPortrait {
    pub const ALL: [OriginPortrait; 8] = [
        OriginPortrait::A,
        OriginPortrait::B,
        OriginPortrait::C,
        OriginPortrait::D,
        OriginPortrait::E,
        OriginPortrait::F,
        OriginPortrait::G,
        OriginPortrait::Monodromic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OriginPortrait::A => "fig1-a",
            OriginPortrait::B => "fig1-b",
            OriginPortrait::C => "fig1-c",
            OriginPortrait::D => "fig1-d",
            OriginPortrait::E => "fig1-e",
            OriginPortrait::F => "fig1-f",
            OriginPortrait::G => "fig1-g",
            OriginPortrait::Monodromic => "fig1-h/i",
        }
    }

    /// Canonical sector word of the class; empty when monodromic.
    pub fn sector_word(self) -> &'static str {
        match self {
            OriginPortrait::A => "HHHH",
            OriginPortrait::B => "EH",
            OriginPortrait::C => "HPHP",
            OriginPortrait::D => "HH",
            OriginPortrait::E => "EHHH",
            OriginPortrait::F => "HHP",
            OriginPortrait::G => "P",
            OriginPortrait::Monodromic => "",
        }
    }

    pub fn index(self) -> i64 {
        let w = self.sector_word();
        let e = w.matches('E').count() as i64;
        let h = w.matches('H').count() as i64;
        1 + (e - h) / 2
    }

    pub fn from_label(s: &str) -> Option<OriginPortrait> {
        OriginPortrait::ALL.into_iter().find(|p| p.label() == s)
    }
}

impl fmt::Display for OriginPortrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginCase {
    I,
    II,
    III,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: OriginCase,
    pub subcase: String,
    /// Root configuration of the chart polynomial (Z1..Z6) or the canonical
    /// sign situation (R1..R12), when applicable.
    pub situation: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginMonodromy {
    M1,
    M2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginClass {
    pub portrait: OriginPortrait,
    pub monodromy: Option<OriginMonodromy>,
    pub case_label: CaseLabel,
    pub applied_symmetry: SymmetryTransform,
    pub time: TimeRecord,
}

fn odd(k: u32) -> bool {
    k % 2 == 1
}

struct LowData {
    p: u32,
    q: u32,
    r: u32,
    b: Rational,
    c: Rational,
    delta: Sign,
}

fn low_data(sys: &GeneralizedLienardSystem) -> LowData {
    let e = sys.exponents();
    let (p, q, r) = (e.phi_low, e.damping_low, e.restoring_low);
    let delta = Sign::of_int(p as i64 * (r as i64 + 1) - q as i64 * (p as i64 + 1));
    LowData { p, q, r, b: sys.b_low(), c: sys.c_low(), delta }
}

/// Row lookup for a system with `a_p = -1`.
fn table_row(sys: &GeneralizedLienardSystem) -> Option<OriginPortrait> {
    use OriginPortrait::*;
    let d = low_data(sys);
    let c_hat = thresholds(sys).c_hat;
    let (cs, bs) = (Sign::of(&d.c), Sign::of(&d.b));
    if odd(d.p) && odd(d.r) && cs == Sign::Positive {
        return Some(A);
    }
    let portrait = match d.delta {
        Sign::Negative => {
            if odd(d.p) && odd(d.r) {
                Monodromic
            } else {
                D
            }
        }
        Sign::Zero => {
            if odd(d.p) {
                if !odd(d.r) {
                    return None;
                }
                if c_hat.negated().compare(&d.c) == Sign::Negative {
                    Monodromic
                } else if odd(d.q) {
                    G
                } else {
                    B
                }
            } else {
                if odd(d.q) {
                    return None;
                }
                if bs == Sign::Positive || c_hat.compare(&d.c.abs()) == Sign::Positive {
                    D
                } else if odd(d.r) {
                    E
                } else {
                    C
                }
            }
        }
        Sign::Positive => {
            if odd(d.p) {
                if !odd(d.r) {
                    F
                } else if odd(d.q) {
                    G
                } else {
                    B
                }
            } else if odd(d.q) {
                F
            } else if bs == Sign::Positive {
                D
            } else if odd(d.r) {
                E
            } else {
                C
            }
        }
    };
    Some(portrait)
}

fn z_situation(c: &Rational, c_hat: &crate::system::Threshold) -> &'static str {
    match (c_hat.compare(c), c_hat.negated().compare(c), Sign::of(c)) {
        (Sign::Positive, _, _) => "Z1",
        (Sign::Zero, _, _) => "Z2",
        (_, _, Sign::Positive) => "Z3",
        (_, Sign::Positive, _) => "Z4",
        (_, Sign::Zero, _) => "Z5",
        _ => "Z6",
    }
}

/// Canonical sign situation of case III (all listed ones have `c_r > 0`
/// and `b_q > 0` except R2, R5, R10, R12).
fn r_situation(d: &LowData) -> Option<u8> {
    let (op, oq, or) = (odd(d.p), odd(d.q), odd(d.r));
    let (bp, cp) = (d.b.is_positive(), d.c.is_positive());
    let k = match (op, oq, or, bp, cp) {
        (true, true, true, true, true) => 1,
        (true, true, true, true, false) => 2,
        (true, true, false, true, true) => 3,
        (true, false, true, true, true) => 4,
        (true, false, true, true, false) => 5,
        (true, false, false, true, true) => 6,
        (false, true, true, true, true) => 7,
        (false, true, false, true, true) => 8,
        (false, false, true, true, true) => 9,
        (false, false, true, false, true) => 10,
        (false, false, false, true, true) => 11,
        (false, false, false, false, true) => 12,
        _ => return None,
    };
    Some(k)
}

fn case_label(sys: &GeneralizedLienardSystem) -> CaseLabel {
    let d = low_data(sys);
    let cs = Sign::of(&d.c);
    match d.delta {
        Sign::Negative => {
            let k = match (odd(d.p), odd(d.r), cs) {
                (false, _, _) => 1,
                (true, true, Sign::Positive) => 2,
                (true, true, _) => 3,
                (true, false, Sign::Positive) => 4,
                (true, false, _) => 5,
            };
            CaseLabel { case: OriginCase::I, subcase: format!("I{}", k), situation: None }
        }
        Sign::Zero => {
            let bp = d.b.is_positive();
            let k = match (odd(d.p), odd(d.q), odd(d.r), bp) {
                (true, true, _, _) => 1,
                (true, false, _, _) => 2,
                (false, _, true, true) => 3,
                (false, _, true, false) => 4,
                (false, _, false, true) => 5,
                (false, _, false, false) => 6,
            };
            let situation = (k == 4 || k == 6).then(|| z_situation(&d.c, &thresholds(sys).c_hat).to_string());
            CaseLabel { case: OriginCase::II, subcase: format!("II{}", k), situation }
        }
        Sign::Positive => {
            let situation = symmetry_search(sys, |s| r_situation(&low_data(&normalize_time(s).0)).is_some())
                .and_then(|(_, s)| r_situation(&low_data(&normalize_time(&s).0)))
                .map(|k| format!("R{}", k));
            CaseLabel { case: OriginCase::III, subcase: "III".into(), situation }
        }
    }
}

/// Portrait class at the origin from the parameter table.
pub fn classify_origin(sys: &GeneralizedLienardSystem) -> Result<OriginClass, OriginError> {
    let (norm, time) = normalize_time(sys);
    let applied_symmetry = SymmetryTransform { reverse_time: time.reversed, ..SymmetryTransform::IDENTITY };
    let portrait = table_row(&norm).ok_or_else(|| {
        let oracle = crate::blowup::local_portrait_oracle(&crate::blowup::PlanarField::from_system(sys), 6)
            .map(|s| if s.monodromic { "monodromic".to_string() } else { s.word })
            .unwrap_or_else(|e| e.to_string());
        OriginError::UnclassifiedByTable(oracle)
    })?;
    let monodromy = monodromy_origin(sys);
    Ok(OriginClass { portrait, monodromy, case_label: case_label(&norm), applied_symmetry, time })
}

/// Monodromy type at the origin, if any.
pub fn monodromy_origin(sys: &GeneralizedLienardSystem) -> Option<OriginMonodromy> {
    let (norm, _) = normalize_time(sys);
    let d = low_data(&norm);
    if !(odd(d.p) && odd(d.r) && d.c.is_negative()) {
        return None;
    }
    match d.delta {
        Sign::Negative => Some(OriginMonodromy::M1),
        Sign::Zero if thresholds(&norm).c_hat.negated().compare(&d.c) == Sign::Negative => Some(OriginMonodromy::M2),
        _ => None,
    }
}

/// `G(x)`, the antiderivative of the restoring term vanishing at 0.
pub fn restoring_potential(sys: &GeneralizedLienardSystem) -> Poly {
    sys.restoring.antiderivative()
}

/// Powers of the branch series, `pw[j][t]` the coefficient of `x^t` in `z^j`.
fn branch_powers(g_pot: &Poly, order: usize, max_power: usize) -> Vec<Vec<Rational>> {
    let k = g_pot.order().expect("nonzero potential");
    let h0 = g_pot.coeff(k);
    // psi = x * (G / (h0 x^k))^(1/k)
    let unit = Poly::from_terms(g_pot.terms().map(|(e, c)| (e - k, c / &h0)));
    let a = Series::from_poly(&unit, order).pow_rational(&Rational::new(1.into(), (k as i64).into()));
    let psi: Vec<Rational> = (0..=order).map(|t| if t == 0 { Rational::zero() } else { a.coeff(t - 1) }).collect();
    let jmax = order.max(max_power);
    let mut pw = vec![vec![Rational::zero(); order + 1]; jmax + 1];
    pw[0][0] = Rational::one();
    pw[1][1] = -Rational::one();
    for t in 2..=order {
        for j in 2..=t.min(jmax) {
            let mut acc = Rational::zero();
            for a in 1..=(t + 1 - j) {
                let za = &pw[1][a];
                if za.is_zero() {
                    continue;
                }
                let w = &pw[j - 1][t - a];
                if !w.is_zero() {
                    acc += za * w;
                }
            }
            pw[j][t] = acc;
        }
        let mut rhs = -psi[t].clone();
        for j in 2..=t {
            if !psi[j].is_zero() {
                rhs -= &psi[j] * &pw[j][t];
            }
        }
        pw[1][t] = rhs;
    }
    pw
}

/// Branch `z(x) = -x + ...` of `G(z) = G(x)` as a truncated series.
pub fn cherkas_branch(sys: &GeneralizedLienardSystem, order: usize) -> Result<Series, OriginError> {
    if order < 2 {
        return Err(OriginError::OrderTooSmall(order));
    }
    if monodromy_origin(sys).is_none() {
        return Err(OriginError::NotMonodromic);
    }
    let pw = branch_powers(&restoring_potential(sys), order, 1);
    Ok(Series::from_poly(&Poly::from_terms(pw[1].iter().enumerate().map(|(k, c)| (k as u32, c.clone()))), order))
}

/// Truncated `F(x) - F(z(x))`.
pub fn cherkas_residual(sys: &GeneralizedLienardSystem, order: usize) -> Result<Series, OriginError> {
    if order < 2 {
        return Err(OriginError::OrderTooSmall(order));
    }
    if monodromy_origin(sys).is_none() {
        return Err(OriginError::NotMonodromic);
    }
    let f = &sys.damping;
    let m = f.degree().unwrap_or(0) as usize;
    let pw = branch_powers(&restoring_potential(sys), order, m.min(order));
    let mut out = Series::from_poly(f, order);
    for (e, c) in f.terms() {
        let e = e as usize;
        if e > order {
            continue;
        }
        for t in 0..=order {
            let v = &pw[e][t];
            if !v.is_zero() {
                let cur = out.coeff(t);
                out.set(t, cur - c * v);
            }
        }
    }
    Ok(out)
}

/// `P` written as a polynomial in `a`, if possible.
fn expand_in(p: &Poly, a: &Poly) -> Option<Vec<Rational>> {
    let mut digits = Vec::new();
    let mut cur = p.clone();
    while !cur.is_zero() {
        let (q, r) = cur.div_rem(a).ok()?;
        if r.degree().unwrap_or(0) > 0 {
            return None;
        }
        digits.push(r.coeff(0));
        cur = q;
    }
    Some(digits)
}

/// A polynomial `A` with even order at 0 such that both `F` and `G` are
/// polynomials in `A`.
pub fn common_even_factor(f: &Poly, g: &Poly) -> Option<Poly> {
    let n = g.degree()? as usize;
    let lc = g.leading_coeff();
    for d in 2..=n {
        if !n.is_multiple_of(d) || f.degree().is_none_or(|m| !(m as usize).is_multiple_of(d)) {
            continue;
        }
        let s = n / d;
        let rev = Poly::from_terms(g.terms().map(|(e, c)| (n as u32 - e, c / &lc)));
        let root = Series::from_poly(&rev, d).pow_rational(&Rational::new(1.into(), (s as i64).into()));
        let a = Poly::from_terms((0..d).map(|i| ((d - i) as u32, root.coeff(i))));
        if a.order().is_none_or(|o| o % 2 == 1) {
            continue;
        }
        if expand_in(g, &a).is_some() && expand_in(f, &a).is_some() {
            return Some(a);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CenterMethod {
    Series,
    NumericReturnMap,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CenterCertificate {
    /// F and G even, so z = -x exactly.
    EvenSymmetry,
    /// F and G are polynomials in a common factor of even order.
    Composition { factor: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Center,
    Focus { stability: Option<Stability> },
    Inconclusive { series_order_reached: usize, residual_first_nonzero: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterVerdict {
    pub verdict: Verdict,
    pub method: CenterMethod,
    pub certificate: Option<CenterCertificate>,
    pub series_order: usize,
    /// First nonzero residual term `(power, coefficient)`.
    pub residual_leading: Option<(usize, String)>,
    pub probe: Option<ProbeReport>,
}

impl CenterVerdict {
    pub fn is_center(&self) -> bool {
        self.verdict == Verdict::Center
    }
}

pub fn default_series_order(sys: &GeneralizedLienardSystem) -> usize {
    let e = sys.exponents();
    let k = e.damping_high.max(e.restoring_high + 1) as usize;
    2 * k * k
}

/// Cherkas center test with optional numeric confirmation.
pub fn center_test(
    sys: &GeneralizedLienardSystem,
    series_order: Option<usize>,
    numeric_fallback: bool,
) -> Result<CenterVerdict, OriginError> {
    let order = series_order.unwrap_or_else(|| default_series_order(sys));
    if order < 2 {
        return Err(OriginError::OrderTooSmall(order));
    }
    if monodromy_origin(sys).is_none() {
        return Err(OriginError::NotMonodromic);
    }
    let (norm, time) = normalize_time(sys);
    let g_pot = restoring_potential(&norm);
    let probe = |sys: &GeneralizedLienardSystem| center_probe(sys, &ProbeOptions::default());
    let base = CenterVerdict {
        verdict: Verdict::Center,
        method: CenterMethod::Series,
        certificate: None,
        series_order: order,
        residual_leading: None,
        probe: None,
    };
    if norm.damping.is_even() && g_pot.is_even() {
        return Ok(CenterVerdict { certificate: Some(CenterCertificate::EvenSymmetry), ..base });
    }
    if let Some(a) = common_even_factor(&norm.damping, &g_pot) {
        return Ok(CenterVerdict { certificate: Some(CenterCertificate::Composition { factor: a.to_string() }), ..base });
    }
    // the leading residual term does not change with the truncation order,
    // so grow the order until one shows up
    let mut reached = order.min(16);
    loop {
        let residual = cherkas_residual(&norm, reached)?;
        if let Some((k, c)) = residual.leading() {
            // the normalized flow turns counterclockwise with g < 0 on x > 0;
            // F(x) > F(z(x)) then means the orbit loses energy
            let stability = if c.is_positive() != time.reversed { Stability::Stable } else { Stability::Unstable };
            let base = CenterVerdict {
                verdict: Verdict::Focus { stability: Some(stability) },
                series_order: reached,
                residual_leading: Some((k, format_rational(c))),
                ..base
            };
            if numeric_fallback {
                return Ok(CenterVerdict { method: CenterMethod::Both, probe: Some(probe(sys)?), ..base });
            }
            return Ok(base);
        }
        if reached == order {
            break;
        }
        reached = (2 * reached).min(order);
    }
    if numeric_fallback {
        let report = probe(sys)?;
        let verdict = if report.verdict == ProbeVerdict::Center {
            Verdict::Center
        } else {
            Verdict::Inconclusive { series_order_reached: order, residual_first_nonzero: None }
        };
        return Ok(CenterVerdict { verdict, method: CenterMethod::Both, probe: Some(report), ..base });
    }
    Ok(CenterVerdict {
        verdict: Verdict::Inconclusive { series_order_reached: order, residual_first_nonzero: None },
        ..base
    })
}

/// `x' = -y - x^(2k) - eps x^(2k+1)`, `y' = x`: monodromic, a focus unless eps = 0.
pub fn focus_family(k: u32, eps: Rational) -> GeneralizedLienardSystem {
    let damping = vec![(2 * k, rat(1)), (2 * k + 1, eps)];
    crate::system::build_system(&[(1, rat(-1))], &damping, &[(1, rat(-1))]).expect("valid family")
}
