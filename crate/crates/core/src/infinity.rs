//! Portrait and monodromy near the equator of the Poincare disc.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::blowup::oracle::point_half;
use crate::blowup::sectors::{Cycle, HalfPortrait, Ray, Token};
use crate::blowup::{
    oracle::DEFAULT_RECURSION_LIMIT, poincare_chart, Axis, BlowupError, Direction, EquilibriumKind, PlanarField,
    SectorSequence,
};
use crate::poly::{rat, Poly, Rational, RealRoot, Sign};
use crate::system::{normalize_time_high, thresholds, GeneralizedLienardSystem, SymmetryTransform, TimeRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InfinityError {
    #[error("ell-one-out-of-scope")]
    EllOne,
    #[error("parameters not covered by the table (oracle: {0})")]
    UnclassifiedByTable(String),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
}

macro_rules! portraits {
    ($($v:ident => $l:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum InfinityPortrait {
            $(#[serde(rename = $l)] $v,)*
        }

        impl InfinityPortrait {
            pub const ALL: [InfinityPortrait; 24] = [$(InfinityPortrait::$v,)*];

            pub fn label(self) -> &'static str {
                match self {
                    $(InfinityPortrait::$v => $l,)*
                }
            }
        }
    };
}

portraits! {
    A => "fig8-a", B => "fig8-b", C => "fig8-c", D => "fig8-d", E => "fig8-e", F => "fig8-f",
    G => "fig8-g", H => "fig8-h", I => "fig8-i", J => "fig8-j", K => "fig8-k", L => "fig8-l",
    M => "fig8-m", N => "fig8-n", O => "fig8-o", P => "fig8-p", Q => "fig8-q", R => "fig8-r",
    S => "fig8-s", T => "fig8-t", U => "fig8-u", V => "fig8-v", W => "fig8-w", X => "fig8-x",
}

impl InfinityPortrait {
    pub fn from_label(s: &str) -> Option<InfinityPortrait> {
        InfinityPortrait::ALL.into_iter().find(|p| p.label() == s)
    }

    /// Encoded equator structure of the class.
    pub fn figure(self) -> &'static EquatorFigure {
        &figures().fig8[self.label()]
    }

    /// Sum of the indices of the equator equilibria on the sphere.
    pub fn equator_index(self) -> i64 {
        self.figure().index_sum
    }

    pub fn is_monodromic(self) -> bool {
        matches!(self, InfinityPortrait::W | InfinityPortrait::X)
    }
}

impl fmt::Display for InfinityPortrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// One entry of the fig1 section of the figure file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginFigure {
    pub word: String,
    pub index: i64,
}

/// Equator structure of a fig8 class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquatorFigure {
    /// Canonical equator signature (see [`EquatorPortrait::signature`]).
    pub signature: String,
    pub index_sum: i64,
    pub monodromic: bool,
    pub example: FigureExample,
}

/// Representative system of a class, as `(exponent, coefficient)` lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureExample {
    pub phi: Vec<(u32, i64)>,
    pub damping: Vec<(u32, i64)>,
    pub restoring: Vec<(u32, i64)>,
}

impl FigureExample {
    pub fn system(&self) -> GeneralizedLienardSystem {
        GeneralizedLienardSystem::from_ints(&self.phi, &self.damping, &self.restoring).expect("valid example")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Figures {
    pub fig1: BTreeMap<String, OriginFigure>,
    pub fig8: BTreeMap<String, EquatorFigure>,
}

/// Figure structure file shipped with the crate.
pub fn figures() -> &'static Figures {
    static FIGURES: OnceLock<Figures> = OnceLock::new();
    FIGURES.get_or_init(|| serde_json::from_str(include_str!("../data/figures.json")).expect("valid figure file"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfinityCase {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `l(n+1) > (l+1)m`
    RatioAbove,
    /// `l(n+1) = (l+1)m` with `n = m+1` (so `m = 2l`, `n = 2l+1`)
    RatioEqualAdjacent,
    /// `l(n+1) = (l+1)m` with `n > m+1`
    RatioEqualSpread,
    /// `l(n+1) < (l+1)m`
    RatioBelow,
    /// `m <= n`
    DampingAtMostRestoring,
    /// `m = n+1`
    DampingAdjacent,
    /// `m > n+1`
    DampingSpread,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::RatioAbove => "l(n+1)>(l+1)m",
            Branch::RatioEqualAdjacent => "l(n+1)=(l+1)m, m=2l, n=2l+1",
            Branch::RatioEqualSpread => "l(n+1)=(l+1)m, n>m+1",
            Branch::RatioBelow => "l(n+1)<(l+1)m",
            Branch::DampingAtMostRestoring => "m<=n",
            Branch::DampingAdjacent => "m=n+1",
            Branch::DampingSpread => "m>n+1",
        }
    }

    /// Rows of this branch are indexed by T situations.
    fn uses_t(self) -> bool {
        matches!(self, Branch::RatioAbove | Branch::DampingAtMostRestoring)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InfinityCaseLabel {
    pub case: InfinityCase,
    pub branch: Option<Branch>,
}

impl fmt::Display for InfinityCaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.branch {
            Some(b) => write!(f, "{:?} [{}]", self.case, b.label()),
            None => write!(f, "{:?}", self.case),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Situation {
    S(u8),
    T(u8),
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Situation::S(k) => write!(f, "S{}", k),
            Situation::T(k) => write!(f, "T{}", k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfinityMonodromy {
    W1,
    W2,
    W3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityClass {
    pub portrait: InfinityPortrait,
    pub case_label: InfinityCaseLabel,
    pub situation: Situation,
    pub monodromy: Option<InfinityMonodromy>,
    /// Transform taking the input to the system the table was read on.
    pub applied_symmetry: SymmetryTransform,
    pub time: TimeRecord,
}

fn odd(k: u32) -> bool {
    k % 2 == 1
}

struct HighData {
    l: u32,
    m: u32,
    n: u32,
    b: Rational,
    c: Rational,
}

fn high_data(sys: &GeneralizedLienardSystem) -> HighData {
    let e = sys.exponents();
    HighData { l: e.phi_high, m: e.damping_high, n: e.restoring_high, b: sys.b_high(), c: sys.c_high() }
}

/// Case and sub-branch from the exponents alone.
pub fn infinity_case(l: u32, m: u32, n: u32) -> InfinityCaseLabel {
    use InfinityCase::*;
    let (case, branch) = if n == m && m == l {
        (C1, None)
    } else if n == m && m > l {
        (C2, None)
    } else if n == l && l > m {
        (C3, None)
    } else if n > l.max(m) {
        let lhs = l as u64 * (n as u64 + 1);
        let rhs = (l as u64 + 1) * m as u64;
        let b = match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => Branch::RatioAbove,
            std::cmp::Ordering::Less => Branch::RatioBelow,
            std::cmp::Ordering::Equal if n == m + 1 => Branch::RatioEqualAdjacent,
            std::cmp::Ordering::Equal => Branch::RatioEqualSpread,
        };
        (C4, Some(b))
    } else if m == l && l > n {
        (C5, None)
    } else if m > l.max(n) {
        (C6, None)
    } else {
        let b = if m <= n {
            Branch::DampingAtMostRestoring
        } else if m == n + 1 {
            Branch::DampingAdjacent
        } else {
            Branch::DampingSpread
        };
        (C7, Some(b))
    };
    InfinityCaseLabel { case, branch }
}

fn s_situation(d: &HighData) -> Option<u8> {
    let (ol, om, on) = (odd(d.l), odd(d.m), odd(d.n));
    let (bp, cp) = (d.b.is_positive(), d.c.is_positive());
    let k = match (ol, om, on, bp, cp) {
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

fn t_situation(d: &HighData) -> Option<u8> {
    let k = match (odd(d.l), odd(d.n), d.c.is_positive()) {
        (true, true, true) => 1,
        (true, true, false) => 2,
        (true, false, true) => 3,
        (false, true, true) => 4,
        (false, false, true) => 5,
        _ => return None,
    };
    Some(k)
}

/// Row lookup for a system with `a_l = -1`.
fn table_row(sys: &GeneralizedLienardSystem) -> Option<(InfinityCaseLabel, Situation, InfinityPortrait)> {
    use InfinityPortrait::*;
    let d = high_data(sys);
    let label = infinity_case(d.l, d.m, d.n);
    let th = thresholds(sys);
    let situation = match label.branch {
        Some(b) if b.uses_t() => Situation::T(t_situation(&d)?),
        _ => match label.case {
            InfinityCase::C3 => Situation::T(t_situation(&d)?),
            _ => Situation::S(s_situation(&d)?),
        },
    };
    // sign of c - (-c_*) and of c - c_*
    let vs_neg_star = || th.c_star.negated().compare(&d.c);
    let vs_star = || th.c_star.compare(&d.c);
    let vs_neg_upper = || th.c_star_upper.as_ref().map(|t| t.negated().compare(&d.c));
    let vs_upper = || th.c_star_upper.as_ref().map(|t| t.compare(&d.c));
    let portrait = match (label.case, label.branch, situation) {
        (InfinityCase::C1, _, Situation::S(k)) => match k {
            1 => A,
            2 => match vs_neg_star() {
                Sign::Positive => B,
                Sign::Zero => C,
                Sign::Negative => X,
            },
            11 => D,
            12 => match vs_star() {
                Sign::Positive => D,
                Sign::Zero => E,
                Sign::Negative => F,
            },
            _ => return None,
        },
        (InfinityCase::C2, _, Situation::S(k)) => match k {
            1 => A,
            2 => B,
            6 => G,
            7 => H,
            11 => I,
            12 => E,
            _ => return None,
        },
        (InfinityCase::C3, _, Situation::T(k)) => match k {
            1 => A,
            2 => X,
            5 => D,
            _ => return None,
        },
        (InfinityCase::C4, Some(Branch::RatioAbove), Situation::T(k)) => match k {
            1 => N,
            2 => W,
            3 => D,
            4 => O,
            5 => D,
            _ => return None,
        },
        (InfinityCase::C4, Some(Branch::RatioEqualAdjacent), Situation::S(k)) => match k {
            4 => N,
            5 => match vs_neg_upper()? {
                Sign::Negative => W,
                _ => U,
            },
            9 => O,
            10 => match vs_upper()? {
                Sign::Positive => O,
                _ => V,
            },
            _ => return None,
        },
        (InfinityCase::C4, Some(Branch::RatioEqualSpread), Situation::S(k)) => match k {
            1 => N,
            2 => match vs_neg_upper()? {
                Sign::Negative => W,
                _ => C,
            },
            4 => N,
            5 => match vs_neg_upper()? {
                Sign::Negative => W,
                _ => U,
            },
            9 => O,
            11 | 12 => D,
            _ => return None,
        },
        (InfinityCase::C4, Some(Branch::RatioBelow), Situation::S(k)) => match k {
            1 | 4 => N,
            2 => C,
            3 | 6 | 8 | 11 | 12 => D,
            5 => U,
            7 => P,
            9 => O,
            10 => V,
            _ => return None,
        },
        (InfinityCase::C5, _, Situation::S(k)) => match k {
            1 => A,
            2 => B,
            3 => H,
            9 | 11 => D,
            10 => J,
            12 => F,
            _ => return None,
        },
        (InfinityCase::C6, _, Situation::S(k)) => match k {
            1 => A,
            2 => B,
            3 | 7 | 8 => H,
            4 => K,
            5 => L,
            6 => G,
            9 | 11 => I,
            10 => M,
            12 => E,
            _ => return None,
        },
        (InfinityCase::C7, Some(Branch::DampingAtMostRestoring), Situation::T(k)) => match k {
            1 => N,
            2 => W,
            3 => O,
            4 | 5 => D,
            _ => return None,
        },
        (InfinityCase::C7, Some(Branch::DampingAdjacent), Situation::S(k)) => match k {
            3 => P,
            4 => N,
            5 => Q,
            8 => R,
            9 => D,
            10 => T,
            _ => return None,
        },
        (InfinityCase::C7, Some(Branch::DampingSpread), Situation::S(k)) => match k {
            1 | 4 => N,
            2 => C,
            3 | 6 => P,
            5 => Q,
            7 | 8 => R,
            9 | 11 => D,
            10 => T,
            12 => S,
            _ => return None,
        },
        _ => return None,
    };
    Some((label, situation, portrait))
}

struct Routed {
    transform: SymmetryTransform,
    system: GeneralizedLienardSystem,
    time: TimeRecord,
    row: Option<(InfinityCaseLabel, Situation, InfinityPortrait)>,
}

/// First group element whose time-normalized image has a table row; the
/// time-normalized input itself when none does.
fn route(sys: &GeneralizedLienardSystem) -> Routed {
    for t in SymmetryTransform::all() {
        let (norm, time) = normalize_time_high(&sys.apply(t));
        if let Some(row) = table_row(&norm) {
            let transform = SymmetryTransform { reverse_time: t.reverse_time ^ time.reversed, ..t };
            return Routed { transform, system: norm, time, row: Some(row) };
        }
    }
    let (norm, time) = normalize_time_high(sys);
    let transform = SymmetryTransform { reverse_time: time.reversed, ..SymmetryTransform::IDENTITY };
    Routed { transform, system: norm, time, row: None }
}

fn require_ell(sys: &GeneralizedLienardSystem) -> Result<(), InfinityError> {
    if sys.exponents().phi_high < 2 {
        return Err(InfinityError::EllOne);
    }
    Ok(())
}

/// Portrait class near the equator from the parameter table.
pub fn classify_infinity(sys: &GeneralizedLienardSystem) -> Result<InfinityClass, InfinityError> {
    require_ell(sys)?;
    let routed = route(sys);
    let Some((case_label, situation, portrait)) = routed.row else {
        let oracle = infinity_oracle(sys).map(|e| e.signature()).unwrap_or_else(|e| e.to_string());
        return Err(InfinityError::UnclassifiedByTable(oracle));
    };
    Ok(InfinityClass {
        portrait,
        case_label,
        situation,
        monodromy: monodromy_of(&routed.system),
        applied_symmetry: routed.transform,
        time: routed.time,
    })
}

fn monodromy_of(sys: &GeneralizedLienardSystem) -> Option<InfinityMonodromy> {
    let d = high_data(sys);
    let (l, m, n) = (d.l as u64, d.m as u64, d.n as u64);
    let th = thresholds(sys);
    let odd_ln = odd(d.l) && odd(d.n);
    if l * (n + 1) > (l + 1) * m && m <= n && odd_ln && d.c.is_negative() {
        return Some(InfinityMonodromy::W1);
    }
    if l == m && m == n && odd(d.l) && d.b.is_positive() && th.c_star.negated().compare(&d.c) == Sign::Negative {
        return Some(InfinityMonodromy::W2);
    }
    if l * (n + 1) == (l + 1) * m && n > m && odd_ln {
        if let Some(t) = &th.c_star_upper {
            if t.negated().compare(&d.c) == Sign::Negative {
                return Some(InfinityMonodromy::W3);
            }
        }
    }
    None
}

/// Monodromy at infinity, read on the same normalized and symmetry-routed
/// system as the table.
pub fn monodromy_infinity(sys: &GeneralizedLienardSystem) -> Result<Option<InfinityMonodromy>, InfinityError> {
    require_ell(sys)?;
    Ok(monodromy_of(&route(sys).system))
}

/// The two Poincare charts of the time-normalized system, in `(u, v)`
/// coordinates with the equator at `v = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoincareCharts {
    /// `x = 1/v`, `y = u/v`
    pub chart_u: PlanarField,
    /// `x = u/v`, `y = 1/v`
    pub chart_v: PlanarField,
    pub time: TimeRecord,
}

pub fn poincare_charts(sys: &GeneralizedLienardSystem) -> Result<PoincareCharts, InfinityError> {
    require_ell(sys)?;
    let (norm, time) = normalize_time_high(sys);
    let field = PlanarField::from_system(&norm);
    Ok(PoincareCharts {
        chart_u: poincare_chart(&field, Direction::X_POS).field.swap(),
        chart_v: poincare_chart(&field, Direction::Y_POS).field.swap(),
        time,
    })
}

/// An equilibrium on the equator.
#[derive(Debug, Clone, PartialEq)]
pub struct EquatorPoint {
    pub direction: Direction,
    /// Chart coordinate along the equator.
    pub position: RealRoot,
    pub kind: EquilibriumKind,
    /// Sectors on the disc side, ordered counterclockwise along the equator.
    pub half: HalfPortrait,
    /// Full neighbourhood on the sphere.
    pub sectors: SectorSequence,
}

impl EquatorPoint {
    pub fn index(&self) -> i64 {
        self.sectors.index
    }
}

/// Equator of the Poincare disc with its equilibria in counterclockwise
/// order, starting from the positive x-direction.
#[derive(Debug, Clone, PartialEq)]
pub struct EquatorPortrait {
    pub points: Vec<EquatorPoint>,
}

impl EquatorPortrait {
    /// Every equilibrium sees a single hyperbolic sector from the disc.
    pub fn is_monodromic(&self) -> bool {
        self.points.iter().all(|p| {
            let h = p.half.normalized();
            h.tokens.len() == 1 && h.word() == "H"
        })
    }

    pub fn index_sum(&self) -> i64 {
        self.points.iter().map(EquatorPoint::index).sum()
    }

    /// Canonical cyclic word of the disc-side halves, up to rotation,
    /// reflection and time reversal.
    pub fn signature(&self) -> String {
        if self.points.is_empty() {
            return "cycle".into();
        }
        let words: Vec<String> = self.points.iter().map(|p| p.half.normalized().flow_word()).collect();
        let reflect = |ws: &[String]| -> Vec<String> { ws.iter().rev().map(|w| w.chars().rev().collect()).collect() };
        let reverse_time = |ws: &[String]| -> Vec<String> {
            ws.iter()
                .map(|w| {
                    w.chars()
                        .map(|c| match c {
                            '+' => '-',
                            '-' => '+',
                            'i' => 'o',
                            'o' => 'i',
                            other => other,
                        })
                        .collect()
                })
                .collect()
        };
        let variants = [words.clone(), reflect(&words), reverse_time(&words), reverse_time(&reflect(&words))];
        let mut best: Option<String> = None;
        for v in &variants {
            for k in 0..v.len() {
                let s = v[k..].iter().chain(v[..k].iter()).cloned().collect::<Vec<_>>().join(" ");
                if best.as_ref().is_none_or(|b| s < *b) {
                    best = Some(s);
                }
            }
        }
        best.unwrap()
    }

    /// Fig8 class whose encoded structure matches, if any.
    pub fn matching_portrait(&self) -> Option<InfinityPortrait> {
        let sig = self.signature();
        InfinityPortrait::ALL.into_iter().find(|p| p.figure().signature == sig)
    }
}

/// Equator structure by compactification and recursive blow-up of every
/// equator equilibrium.
pub fn infinity_oracle(sys: &GeneralizedLienardSystem) -> Result<EquatorPortrait, InfinityError> {
    infinity_oracle_with_limit(sys, DEFAULT_RECURSION_LIMIT)
}

pub fn infinity_oracle_with_limit(sys: &GeneralizedLienardSystem, limit: usize) -> Result<EquatorPortrait, InfinityError> {
    require_ell(sys)?;
    let field = PlanarField::from_system(sys);
    let mut points = Vec::new();
    for direction in Direction::CCW {
        let chart = poincare_chart(&field, direction);
        let g = chart.divisor_poly();
        if g.is_zero() {
            return Err(BlowupError::Dicritical.into());
        }
        let roots: Vec<RealRoot> = match direction.axis {
            Axis::X if g.degree() == Some(0) => Vec::new(),
            Axis::X => g.real_roots(None).expect("nonzero").roots,
            Axis::Y => {
                let zero = rat(0);
                let mut r = RealRoot::exact(zero.clone(), Poly::x());
                r.multiplicity = g.multiplicity_at(&zero);
                if r.multiplicity == 0 {
                    Vec::new()
                } else {
                    vec![r]
                }
            }
        };
        let mirror = chart.field.reflect_x();
        let mut found = Vec::new();
        for root in roots {
            let (eq, half, _) = point_half(&chart.field, &root, 0, limit)?;
            let (_, far, _) = point_half(&mirror, &root, 0, limit)?;
            let mut tokens = half.tokens.clone();
            tokens.push(Token::Ray(Ray { flow: half.right(), axis: false }));
            tokens.extend(far.reversed().tokens);
            tokens.push(Token::Ray(Ray { flow: half.left(), axis: false }));
            let sectors = SectorSequence::from_cycle(&Cycle { tokens }, None);
            let half = if direction.reversed() { half.reversed() } else { half };
            found.push(EquatorPoint { direction, position: eq.position, kind: eq.kind, half, sectors });
        }
        if direction.reversed() {
            found.reverse();
        }
        points.extend(found);
    }
    Ok(EquatorPortrait { points })
}
