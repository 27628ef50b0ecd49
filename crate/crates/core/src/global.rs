//! Global phase portraits when the origin is the only equilibrium and a
//! center, and the global center criterion.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::infinity::{classify_infinity, monodromy_infinity, InfinityClass, InfinityError, InfinityMonodromy, InfinityPortrait};
use crate::origin::{center_test, monodromy_origin, CenterVerdict, OriginClass, OriginError, OriginMonodromy, Verdict};
use crate::poly::{format_rational, Poly, RealRoot, Sign};
use crate::system::GeneralizedLienardSystem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GlobalError {
    #[error("center test inconclusive at series order {order}; global verdict withheld")]
    CenterUndecided { order: usize, verdict: Box<CenterVerdict> },
    #[error(transparent)]
    Origin(#[from] OriginError),
    #[error(transparent)]
    Infinity(#[from] InfinityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GlobalPortrait {
    #[serde(rename = "fig12-a")]
    A,
    #[serde(rename = "fig12-b")]
    B,
    #[serde(rename = "fig12-c")]
    C,
    #[serde(rename = "fig12-d")]
    D,
    #[serde(rename = "fig12-e")]
    E,
}

impl GlobalPortrait {
    pub const ALL: [GlobalPortrait; 5] = [Self::A, Self::B, Self::C, Self::D, Self::E];

    pub fn label(self) -> &'static str {
        match self {
            Self::A => "fig12-a",
            Self::B => "fig12-b",
            Self::C => "fig12-c",
            Self::D => "fig12-d",
            Self::E => "fig12-e",
        }
    }

    pub fn is_global_center(self) -> bool {
        matches!(self, Self::D | Self::E)
    }

    /// Portrait at infinity that goes with each global picture.
    pub fn infinity(self) -> InfinityPortrait {
        match self {
            Self::A => InfinityPortrait::L,
            Self::B => InfinityPortrait::Q,
            Self::C => InfinityPortrait::U,
            Self::D => InfinityPortrait::W,
            Self::E => InfinityPortrait::X,
        }
    }

    pub fn from_infinity(p: InfinityPortrait) -> Option<GlobalPortrait> {
        Self::ALL.into_iter().find(|g| g.infinity() == p)
    }
}

impl fmt::Display for GlobalPortrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalOutcome {
    Portrait(GlobalPortrait),
    NotApplicable { reasons: Vec<String> },
}

/// Nonzero real roots found by [`g1_check`], as isolating intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootWitness {
    pub polynomial: String,
    pub lo: String,
    pub hi: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct G1Check {
    pub holds: bool,
    pub witness: Vec<RootWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub g1: G1Check,
    pub g2: Option<OriginMonodromy>,
    /// `None` when the origin is not monodromic and the test was skipped.
    pub g3: Option<bool>,
    pub g4: Option<InfinityMonodromy>,
    pub origin_unique: bool,
}

impl Criteria {
    pub fn all_hold(&self) -> bool {
        self.g1.holds && self.g2.is_some() && self.g3 == Some(true) && self.g4.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalClass {
    pub portrait: GlobalOutcome,
    pub global_center: bool,
    pub criteria: Criteria,
    pub infinity: Option<InfinityPortrait>,
}

fn nonzero_roots(p: &Poly, name: &str) -> Vec<RootWitness> {
    let roots = p.real_roots(None).expect("nonzero polynomial");
    roots
        .nonzero()
        .into_iter()
        .map(|r| RootWitness { polynomial: name.to_string(), lo: format_rational(&r.lo), hi: format_rational(&r.hi) })
        .collect()
}

/// Whether `phi` and `g` vanish only at 0 on the real line.
pub fn g1_check(sys: &GeneralizedLienardSystem) -> G1Check {
    let mut witness = nonzero_roots(&sys.phi, "phi");
    witness.extend(nonzero_roots(&sys.restoring, "g"));
    G1Check { holds: witness.is_empty(), witness }
}

/// Whether `phi(y) = F(x0)` has a real solution at the real root `x0` of
/// `g`, given that `phi` has no nonzero real root.
fn phi_reaches(sys: &GeneralizedLienardSystem, x0: &RealRoot) -> bool {
    if sys.exponents().phi_high % 2 == 1 {
        return true;
    }
    // phi keeps the sign of its leading coefficient away from 0
    let s = x0.clone().sign_of(&sys.damping);
    s == Sign::Zero || s == Sign::of(&sys.a_high())
}

/// Whether `(0, 0)` is the only finite equilibrium.
pub fn origin_unique(sys: &GeneralizedLienardSystem) -> bool {
    let phi_roots = sys.phi.real_roots(None).expect("nonzero polynomial");
    if !phi_roots.nonzero().is_empty() {
        return false;
    }
    let g_roots = sys.restoring.real_roots(None).expect("nonzero polynomial");
    g_roots.nonzero().into_iter().all(|x0| !phi_reaches(sys, x0))
}

/// Global classification for a monodromic origin that is the only
/// equilibrium.
pub fn classify_global(sys: &GeneralizedLienardSystem) -> Result<GlobalClass, GlobalError> {
    if sys.exponents().phi_high < 2 {
        return Err(InfinityError::EllOne.into());
    }
    let g1 = g1_check(sys);
    let g2 = monodromy_origin(sys);
    let g3 = match g2 {
        None => None,
        Some(_) => {
            let verdict = center_test(sys, None, false)?;
            match verdict.verdict {
                Verdict::Center => Some(true),
                Verdict::Focus { .. } => Some(false),
                Verdict::Inconclusive { series_order_reached, .. } => {
                    return Err(GlobalError::CenterUndecided { order: series_order_reached, verdict: Box::new(verdict) })
                }
            }
        }
    };
    let g4 = monodromy_infinity(sys)?;
    let unique = g1.holds || origin_unique(sys);
    let criteria = Criteria { g1, g2, g3, g4, origin_unique: unique };

    let mut reasons = Vec::new();
    if !unique {
        reasons.push("origin is not the only equilibrium".to_string());
    }
    match criteria.g3 {
        None => reasons.push("origin is not monodromic".to_string()),
        Some(false) => reasons.push("origin is a focus".to_string()),
        Some(true) => {}
    }
    if !reasons.is_empty() {
        return Ok(GlobalClass { portrait: GlobalOutcome::NotApplicable { reasons }, global_center: false, criteria, infinity: None });
    }

    let at_infinity = classify_infinity(sys)?.portrait;
    let portrait = match GlobalPortrait::from_infinity(at_infinity) {
        Some(p) if p.is_global_center() == criteria.all_hold() => GlobalOutcome::Portrait(p),
        _ => GlobalOutcome::NotApplicable {
            reasons: vec![format!("unique center with {} at infinity is outside the known global pictures", at_infinity)],
        },
    };
    let global_center = criteria.all_hold();
    Ok(GlobalClass { portrait, global_center, criteria, infinity: Some(at_infinity) })
}

/// Sphere index total assuming the origin is the only finite equilibrium:
/// two copies of the origin plus the equator.
pub fn index_check(origin: &OriginClass, infinity: &InfinityClass) -> bool {
    2 * origin.portrait.index() + infinity.portrait.equator_index() == 2
}

/// Degree of the one-dimensional map `p` summed over all its real zeros.
fn total_degree(p: &Poly) -> i64 {
    match p.degree() {
        Some(d) if d % 2 == 1 => Sign::of(&p.leading_coeff()).to_i32() as i64,
        _ => 0,
    }
}

/// Local degree of `p` at its zero `0`.
fn degree_at_zero(p: &Poly) -> i64 {
    match p.order() {
        Some(k) if k % 2 == 1 => Sign::of(&p.trailing_coeff()).to_i32() as i64,
        _ => 0,
    }
}

/// Index bookkeeping on the Poincare sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBalance {
    pub origin: i64,
    /// Summed index of the finite equilibria other than the origin.
    pub others: i64,
    pub equator: i64,
}

impl IndexBalance {
    pub fn total(&self) -> i64 {
        2 * (self.origin + self.others) + self.equator
    }

    pub fn holds(&self) -> bool {
        self.total() == 2
    }
}

/// Index balance from the two classifications plus the finite equilibria
/// away from the origin. The field `(phi(y) - F(x), -g(x))` has index
/// `deg_phi(y0) * deg_g(x0)` at each zero, so the finite total is the
/// product of the global one-dimensional degrees of `phi` and `g`.
pub fn index_balance(sys: &GeneralizedLienardSystem, origin: &OriginClass, infinity: &InfinityClass) -> IndexBalance {
    let finite = total_degree(&sys.phi) * total_degree(&sys.restoring);
    let at_origin = degree_at_zero(&sys.phi) * degree_at_zero(&sys.restoring);
    IndexBalance { origin: origin.portrait.index(), others: finite - at_origin, equator: infinity.portrait.equator_index() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origin::classify_origin;

    fn sys(phi: &[(u32, i64)], f: &[(u32, i64)], g: &[(u32, i64)]) -> GeneralizedLienardSystem {
        GeneralizedLienardSystem::from_ints(phi, f, g).unwrap()
    }

    fn example(letter: char) -> GeneralizedLienardSystem {
        match letter {
            'a' => sys(&[(3, -1)], &[(4, 1)], &[(3, -1)]),
            'b' => sys(&[(5, -1)], &[(4, 1)], &[(3, -1)]),
            'c' => sys(&[(3, -1)], &[(10, 1)], &[(11, -1)]),
            'd' => sys(&[(3, -1), (7, -1)], &[(4, 1)], &[(3, -1), (5, -1)]),
            'e' => sys(&[(3, -1), (5, -1)], &[(4, 1)], &[(3, -1), (5, -1)]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn example_systems() {
        let expected = [
            ('a', GlobalPortrait::A, false),
            ('b', GlobalPortrait::B, false),
            ('c', GlobalPortrait::C, false),
            ('d', GlobalPortrait::D, true),
            ('e', GlobalPortrait::E, true),
        ];
        for (letter, portrait, center) in expected {
            let c = classify_global(&example(letter)).unwrap();
            assert_eq!(c.portrait, GlobalOutcome::Portrait(portrait), "{}", letter);
            assert_eq!(c.global_center, center, "{}", letter);
            assert_eq!(c.criteria.all_hold(), center);
        }
    }

    #[test]
    fn g1_examples() {
        assert!(g1_check(&example('d')).holds);
        let c = g1_check(&sys(&[(3, -1)], &[(2, 1)], &[(3, -1), (5, 1)]));
        assert!(!c.holds);
        assert_eq!(c.witness.len(), 2);
        assert!(!g1_check(&sys(&[(3, -1), (5, 1)], &[(2, 1)], &[(3, -1)])).holds);
    }

    #[test]
    fn uniqueness() {
        assert!(origin_unique(&example('d')));
        // g vanishes at +-1 and phi is onto
        assert!(!origin_unique(&sys(&[(3, -1)], &[(2, 1)], &[(1, -1), (3, 1)])));
        // phi vanishes at y = 1
        assert!(!origin_unique(&sys(&[(3, -1), (4, 1)], &[(2, 1)], &[(3, -1)])));
        // even phi >= 0, g vanishes at +-sqrt 2
        let even = |f: i64| sys(&[(2, 1), (4, 1)], &[(2, f)], &[(1, 2), (3, -1)]);
        assert!(!origin_unique(&even(1)));
        assert!(origin_unique(&even(-1)));
        // F(+-1) = 0 puts equilibria at (+-1, 0)
        assert!(!origin_unique(&sys(&[(2, 1), (4, 1)], &[(2, -1), (4, 1)], &[(1, -1), (3, 1)])));
    }

    #[test]
    fn index_gate() {
        for letter in ['a', 'b', 'c', 'd', 'e'] {
            let s = example(letter);
            let o = classify_origin(&s).unwrap();
            let i = classify_infinity(&s).unwrap();
            assert!(index_check(&o, &i), "{}", letter);
            assert!(index_balance(&s, &o, &i).holds());
        }
    }

    #[test]
    fn excluded_pairs_fail_the_gate() {
        let o = classify_origin(&example('d')).unwrap();
        for p in [InfinityPortrait::J, InfinityPortrait::M, InfinityPortrait::T, InfinityPortrait::V] {
            let s = p.figure().example.system();
            let i = classify_infinity(&s).unwrap();
            assert_eq!(i.portrait, p);
            assert!(!index_check(&o, &i));
            assert_eq!(2 * o.portrait.index() + i.portrait.equator_index(), 4);
        }
    }

    #[test]
    fn focus_is_not_applicable() {
        let focus = sys(&[(3, -1)], &[(4, 1), (5, 1)], &[(3, -1)]);
        let c = classify_global(&focus).unwrap();
        assert_eq!(c.criteria.g3, Some(false));
        assert!(matches!(c.portrait, GlobalOutcome::NotApplicable { .. }));
        assert!(!c.global_center);
    }

    #[test]
    fn ell_one_is_rejected() {
        let s = sys(&[(1, -1)], &[(2, 1)], &[(1, -1)]);
        assert_eq!(classify_global(&s), Err(GlobalError::Infinity(InfinityError::EllOne)));
    }
}
