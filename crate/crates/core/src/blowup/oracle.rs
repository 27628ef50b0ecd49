//! Recursive desingularization and blow-down into sector cycles.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::alg::AlgContext;
use super::sectors::{close_cycle, glue_linear, Cycle, Flow, GlueError, HalfPortrait, Ray, SectorKind, Token};
use super::{directional_blowup, support_and_polygon, Axis, ChartField, Direction, PlanarField};
use crate::bipoly::BiPoly;
use crate::poly::{rat, Poly, RealRoot, Sign};

pub const DEFAULT_RECURSION_LIMIT: usize = 6;
const MAX_REDUCTION_ORDER: u32 = 400;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BlowupError {
    #[error("support of the field is a single point")]
    DegenerateSupport,
    #[error("origin is not an equilibrium")]
    NotSingular,
    #[error("recursion limit {0} exceeded")]
    RecursionLimitExceeded(usize),
    #[error("unresolved equilibrium: {0}")]
    UnresolvedEquilibrium(String),
    #[error("non-elementary divisor equilibrium at irrational position {0:.6} in chart {1}")]
    NonElementaryResidue(f64, &'static str),
    #[error("divisor is not invariant (dicritical blow-up)")]
    Dicritical,
    #[error(transparent)]
    Glue(#[from] GlueError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Hyperbolic {
        sign_u: Sign,
        sign_v: Sign,
    },
    SemiHyperbolic {
        transverse_sign: Sign,
        reduced_coefficient_sign: Sign,
        reduced_exponent: u32,
        /// The center manifold is the divisor itself.
        along_divisor: bool,
    },
    NonElementary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorEquilibrium {
    pub position: RealRoot,
    pub kind: EquilibriumKind,
}

impl DivisorEquilibrium {
    pub fn approx(&self) -> f64 {
        self.position.approx()
    }
}

/// Leading term `coefficient * s^exponent` of the flow on a transverse
/// center manifold, with the coefficient in Q(theta*) modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedTerm {
    pub coefficient: Poly,
    pub modulus: Poly,
    pub exponent: u32,
    pub sign: Sign,
}

/// Taylor coefficients of a chart polynomial around theta = theta*, keyed
/// by `(s power, w power)`.
fn shifted(p: &BiPoly, ctx: &AlgContext) -> BTreeMap<(u32, u32), Poly> {
    let mut out = BTreeMap::new();
    let mut powers = std::collections::BTreeSet::new();
    for ((i, _), _) in p.terms() {
        powers.insert(i);
    }
    for i in powers {
        let slice = p.x_slice(i);
        let mut d = slice.clone();
        let mut fact = rat(1);
        let mut j = 0u32;
        while !d.is_zero() {
            let c = ctx.reduce(&d.scale(&fact.recip()));
            if !c.is_zero() {
                out.insert((i, j), c);
            }
            j += 1;
            fact *= rat(j as i64);
            d = d.derivative();
        }
    }
    out
}

/// Center-manifold reduction for a divisor point with zero transverse and
/// nonzero tangential eigenvalue.
pub fn transverse_reduction(field: &PlanarField, root: &RealRoot) -> Result<ReducedTerm, BlowupError> {
    let mut ctx = AlgContext::new(root);
    let s_terms = shifted(&field.p, &ctx);
    let t_terms = shifted(&field.q, &ctx);
    let t01 = t_terms.get(&(0, 1)).cloned().unwrap_or_else(Poly::zero);
    let inv = ctx
        .inv(&t01)
        .ok_or_else(|| BlowupError::UnresolvedEquilibrium("tangential eigenvalue vanishes".into()))?;
    let jmax = s_terms.keys().chain(t_terms.keys()).map(|k| k.1).max().unwrap_or(1).max(1) as usize;
    // pw[j][k] = coefficient of s^k in w(s)^j
    let mut pw: Vec<Vec<Poly>> = (0..=jmax).map(|j| vec![if j == 0 { Poly::one() } else { Poly::zero() }]).collect();
    let mut lam: Vec<Poly> = vec![Poly::zero()];
    let coeff_at = |terms: &BTreeMap<(u32, u32), Poly>, pw: &Vec<Vec<Poly>>, k: usize, skip: Option<(u32, u32)>, ctx: &AlgContext| {
        let mut acc = Poly::zero();
        for (&(i, j), c) in terms {
            if Some((i, j)) == skip || i as usize > k {
                continue;
            }
            let w = &pw[j as usize][k - i as usize];
            if !w.is_zero() {
                acc = &acc + &ctx.mul(c, w);
            }
        }
        acc
    };
    for k in 1..=MAX_REDUCTION_ORDER as usize {
        pw[0].push(Poly::zero());
        pw[1].push(Poly::zero());
        for j in 2..=jmax {
            let mut acc = Poly::zero();
            for a in 1..k {
                if lam[a].is_zero() {
                    continue;
                }
                let w = &pw[j - 1][k - a];
                if !w.is_zero() {
                    acc = &acc + &ctx.mul(&lam[a], w);
                }
            }
            pw[j].push(acc);
        }
        let r = coeff_at(&t_terms, &pw, k, Some((0, 1)), &ctx);
        let lk = ctx.mul(&(-&r), &inv);
        pw[1][k] = lk.clone();
        lam.push(lk);
        let u = coeff_at(&s_terms, &pw, k, None, &ctx);
        let sign = ctx.sign(&u);
        if sign != Sign::Zero {
            return Ok(ReducedTerm { coefficient: ctx.reduce(&u), modulus: ctx.modulus().clone(), exponent: k as u32, sign });
        }
    }
    Err(BlowupError::UnresolvedEquilibrium(format!(
        "center manifold flow vanishes to order {}",
        MAX_REDUCTION_ORDER
    )))
}

struct PointAnalysis {
    kind: EquilibriumKind,
    left: Flow,
    right: Flow,
    middle: Option<Flow>,
}

/// Classify the equilibrium of a chart field at `(0, theta*)`.
fn analyze(field: &PlanarField, divisor: &Poly, root: &mut RealRoot) -> Result<PointAnalysis, BlowupError> {
    let k = root.multiplicity;
    let rate = field.p.x_slice(1);
    let lt = root.sign_of(&rate);
    let ld = root.sign_of(&divisor.derivative());
    let right_sign = root.sign_of(&divisor.nth_derivative(k));
    debug_assert_ne!(right_sign, Sign::Zero);
    let left_sign = if k.is_multiple_of(2) { right_sign } else { right_sign.flip() };
    let left = if left_sign == Sign::Positive { Flow::In } else { Flow::Out };
    let right = if right_sign == Sign::Negative { Flow::In } else { Flow::Out };
    let out_if = |s: Sign| if s == Sign::Positive { Flow::Out } else { Flow::In };
    if lt != Sign::Zero {
        let kind = if ld != Sign::Zero {
            EquilibriumKind::Hyperbolic { sign_u: lt, sign_v: ld }
        } else {
            EquilibriumKind::SemiHyperbolic {
                transverse_sign: lt,
                reduced_coefficient_sign: right_sign,
                reduced_exponent: k,
                along_divisor: true,
            }
        };
        return Ok(PointAnalysis { kind, left, right, middle: Some(out_if(lt)) });
    }
    if ld != Sign::Zero {
        let red = transverse_reduction(field, root)?;
        let kind = EquilibriumKind::SemiHyperbolic {
            transverse_sign: ld,
            reduced_coefficient_sign: red.sign,
            reduced_exponent: red.exponent,
            along_divisor: false,
        };
        return Ok(PointAnalysis { kind, left, right, middle: Some(out_if(red.sign)) });
    }
    Ok(PointAnalysis { kind: EquilibriumKind::NonElementary, left, right, middle: None })
}

/// All equilibria on the divisor `s = 0` of a chart, with their kinds.
pub fn divisor_equilibria(chart: &ChartField) -> Result<Vec<DivisorEquilibrium>, BlowupError> {
    let g = chart.divisor_poly();
    if g.is_zero() {
        return Err(BlowupError::Dicritical);
    }
    let mut out = Vec::new();
    if g.degree() == Some(0) {
        return Ok(out);
    }
    for mut root in g.real_roots(None).expect("nonzero").roots {
        let a = analyze(&chart.field, &g, &mut root)?;
        if a.kind == EquilibriumKind::NonElementary && root.try_rational().is_none() {
            return Err(BlowupError::NonElementaryResidue(root.approx(), chart.direction.label()));
        }
        out.push(DivisorEquilibrium { position: root, kind: a.kind });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorPoint {
    pub direction: Direction,
    pub equilibrium: DivisorEquilibrium,
    /// Local half-portrait in counterclockwise order around the blown-up point.
    pub half: HalfPortrait,
    pub child: Option<Box<Resolution>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartRecord {
    pub direction: Direction,
    pub divisor_poly: Poly,
}

/// One blow-up (or compactification) step and everything found on its
/// divisor, in counterclockwise order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub alpha: u32,
    pub beta: u32,
    pub poincare: bool,
    pub charts: Vec<ChartRecord>,
    pub points: Vec<DivisorPoint>,
}

fn pole_root(g: &Poly) -> Option<RealRoot> {
    let zero = rat(0);
    if !g.eval(&zero).is_zero() {
        return None;
    }
    let mut r = RealRoot::exact(zero.clone(), Poly::x());
    r.multiplicity = g.multiplicity_at(&zero);
    Some(r)
}

/// Half-portrait and sub-resolution of one divisor point of a chart field.
pub(crate) fn point_half(
    field: &PlanarField,
    root: &RealRoot,
    depth: usize,
    limit: usize,
) -> Result<(DivisorEquilibrium, HalfPortrait, Option<Box<Resolution>>), BlowupError> {
    let g = field.q.x_slice(0);
    let mut root = root.clone();
    let a = analyze(field, &g, &mut root)?;
    if let Some(m) = a.middle {
        let half = HalfPortrait::elementary(a.left, m, a.right);
        return Ok((DivisorEquilibrium { position: root, kind: a.kind }, half, None));
    }
    let Some(theta) = root.try_rational() else {
        return Err(BlowupError::NonElementaryResidue(root.approx(), "sub"));
    };
    if depth >= limit {
        return Err(BlowupError::RecursionLimitExceeded(limit));
    }
    let local = field.translate_y(&theta);
    let (res, half) = resolve_half(&local, depth + 1, limit)?;
    if half.left() != a.left || half.right() != a.right {
        return Err(BlowupError::UnresolvedEquilibrium("divisor flows disagree after blow-up".into()));
    }
    Ok((DivisorEquilibrium { position: root, kind: a.kind }, half, Some(Box::new(res))))
}

/// Find and classify the divisor points of four charts, in ccw order.
pub(crate) fn resolve_charts(
    charts: &[ChartField; 4],
    depth: usize,
    limit: usize,
) -> Result<Resolution, BlowupError> {
    let mut points = Vec::new();
    let mut records = Vec::new();
    for chart in charts {
        let g = chart.divisor_poly();
        if g.is_zero() {
            return Err(BlowupError::Dicritical);
        }
        records.push(ChartRecord { direction: chart.direction, divisor_poly: g.clone() });
        let roots: Vec<RealRoot> = match chart.direction.axis {
            Axis::X => {
                if g.degree() == Some(0) {
                    Vec::new()
                } else {
                    g.real_roots(None).expect("nonzero").roots
                }
            }
            Axis::Y => pole_root(&g).into_iter().collect(),
        };
        let mut found = Vec::new();
        for root in roots {
            let (eq, half, child) = point_half(&chart.field, &root, depth, limit)?;
            let half = if chart.direction.reversed() { half.reversed() } else { half };
            found.push(DivisorPoint { direction: chart.direction, equilibrium: eq, half, child });
        }
        if chart.direction.reversed() {
            found.reverse();
        }
        points.extend(found);
    }
    let c = &charts[0];
    Ok(Resolution { alpha: c.alpha, beta: c.beta, poincare: c.poincare, charts: records, points })
}

fn blowup_weights(field: &PlanarField) -> (u32, u32) {
    match support_and_polygon(field) {
        Ok(poly) if !poly.edges.is_empty() => (poly.edges[0].alpha, poly.edges[0].beta),
        _ => (1, 1),
    }
}

/// Blow up the origin of `field` along the first Newton-polygon edge.
pub fn resolve_singular_point(field: &PlanarField, limit: usize) -> Result<Resolution, BlowupError> {
    resolve_at_depth(field, 0, limit)
}

fn resolve_at_depth(field: &PlanarField, depth: usize, limit: usize) -> Result<Resolution, BlowupError> {
    if !field.is_singular_at_origin() {
        return Err(BlowupError::NotSingular);
    }
    let (alpha, beta) = blowup_weights(field);
    let charts = Direction::CCW.map(|d| directional_blowup(field, alpha, beta, d));
    resolve_charts(&charts, depth, limit)
}

/// Half-portrait on the side x > 0 of the origin of `field`, where the
/// y-axis is invariant (it is the divisor the origin lies on).
fn resolve_half(field: &PlanarField, depth: usize, limit: usize) -> Result<(Resolution, HalfPortrait), BlowupError> {
    let res = resolve_at_depth(field, depth, limit)?;
    let pole = |dir: Direction| res.points.iter().find(|p| p.direction == dir);
    let missing = || BlowupError::UnresolvedEquilibrium("invariant divisor misses a pole".into());
    let low = pole(Direction::Y_NEG).ok_or_else(missing)?;
    let high = pole(Direction::Y_POS).ok_or_else(missing)?;
    let (_, _, after_low) = low.half.split_at_axis().ok_or_else(missing)?;
    let (before_high, _, _) = high.half.split_at_axis().ok_or_else(missing)?;
    let mut parts = vec![after_low];
    for p in res.points.iter().filter(|p| p.direction == Direction::X_POS) {
        let mut h = p.half.clone();
        if p.equilibrium.position.rational().is_none_or(|x| !x.is_zero()) {
            h.clear_axis();
        }
        parts.push(h.tokens);
    }
    parts.push(before_high);
    let mut tokens = glue_linear(&parts)?;
    // axis flags from the poles themselves must not leak upward
    for t in tokens.iter_mut() {
        if let Token::Ray(r) = t {
            if r.axis && !axis_from_center(&res) {
                *r = Ray { flow: r.flow, axis: false };
            }
        }
    }
    Ok((res, HalfPortrait { tokens }))
}

fn axis_from_center(res: &Resolution) -> bool {
    res.points
        .iter()
        .any(|p| p.direction == Direction::X_POS && p.equilibrium.position.rational().is_some_and(|x| x.is_zero()))
}

/// Glue all divisor halves of a resolution into the sector cycle.
pub fn assemble_cycle(res: &Resolution) -> Result<Cycle, BlowupError> {
    if res.points.is_empty() {
        return Ok(Cycle { tokens: Vec::new() });
    }
    let parts: Vec<Vec<Token>> = res.points.iter().map(|p| p.half.tokens.clone()).collect();
    Ok(close_cycle(glue_linear(&parts)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicDirection {
    pub chart: String,
    pub position: f64,
}

/// Sector structure around a singular point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSequence {
    /// Sectors in cyclic order after removing non-separatrix rays.
    pub sectors: Vec<SectorKind>,
    /// Canonical word up to rotation, reflection and time reversal.
    pub word: String,
    pub monodromic: bool,
    pub index: i64,
    pub characteristic_directions: Vec<CharacteristicDirection>,
}

impl SectorSequence {
    pub fn from_cycle(cycle: &Cycle, res: Option<&Resolution>) -> SectorSequence {
        let norm = cycle.normalized();
        let dirs = res
            .map(|r| {
                r.points
                    .iter()
                    .filter(|p| p.half.rays().next().is_some())
                    .map(|p| CharacteristicDirection { chart: p.direction.label().into(), position: p.equilibrium.approx() })
                    .collect()
            })
            .unwrap_or_default();
        SectorSequence {
            sectors: norm.pieces().iter().map(|p| p.kind).collect(),
            word: cycle.canonical_word(),
            monodromic: cycle.is_monodromic(),
            index: cycle.index(),
            characteristic_directions: if cycle.is_monodromic() { Vec::new() } else { dirs },
        }
    }
}

/// Sector cycle at the origin of `field` by recursive blow-up.
pub fn local_portrait_oracle(field: &PlanarField, recursion_limit: usize) -> Result<SectorSequence, BlowupError> {
    let res = resolve_singular_point(field, recursion_limit)?;
    let cycle = assemble_cycle(&res)?;
    Ok(SectorSequence::from_cycle(&cycle, Some(&res)))
}

fn kind_label(k: &EquilibriumKind) -> String {
    let s = |x: &Sign| match x {
        Sign::Negative => "-",
        Sign::Zero => "0",
        Sign::Positive => "+",
    };
    match k {
        EquilibriumKind::Hyperbolic { sign_u, sign_v } => format!("hyperbolic ({}, {})", s(sign_u), s(sign_v)),
        EquilibriumKind::SemiHyperbolic { transverse_sign, reduced_coefficient_sign, reduced_exponent, along_divisor } => {
            format!(
                "semi-hyperbolic ({}; {}s^{}{})",
                s(transverse_sign),
                s(reduced_coefficient_sign),
                reduced_exponent,
                if *along_divisor { " along divisor" } else { "" }
            )
        }
        EquilibriumKind::NonElementary => "non-elementary".into(),
    }
}

impl Resolution {
    /// Text tree of the blow-up hierarchy.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_into(&mut out, 0);
        out
    }

    fn dump_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        if self.poincare {
            let _ = writeln!(out, "{}compactification", pad);
        } else {
            let _ = writeln!(out, "{}blow-up weights ({}, {})", pad, self.alpha, self.beta);
        }
        for rec in &self.charts {
            let _ = writeln!(out, "{}  chart {}: divisor {}", pad, rec.direction.label(), rec.divisor_poly);
            for p in self.points.iter().filter(|p| p.direction == rec.direction) {
                let pos = match p.equilibrium.position.rational() {
                    Some(x) => crate::poly::format_rational(x),
                    None => format!("~{:.6}", p.equilibrium.approx()),
                };
                let _ = writeln!(
                    out,
                    "{}    point {}: {} half {}",
                    pad,
                    pos,
                    kind_label(&p.equilibrium.kind),
                    p.half.word()
                );
                if let Some(child) = &p.child {
                    child.dump_into(out, depth + 3);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::GeneralizedLienardSystem;

    fn field(phi: &[(u32, i64)], f: &[(u32, i64)], g: &[(u32, i64)]) -> PlanarField {
        PlanarField::from_system(&GeneralizedLienardSystem::from_ints(phi, f, g).unwrap())
    }

    fn word(pf: &PlanarField) -> String {
        let s = local_portrait_oracle(pf, DEFAULT_RECURSION_LIMIT).unwrap();
        if s.monodromic {
            "monodromic".into()
        } else {
            s.word
        }
    }

    #[test]
    fn elementary_points() {
        // saddle x' = x, y' = -y
        let saddle = PlanarField::new(BiPoly::from_ints(&[((1, 0), 1)]), BiPoly::from_ints(&[((0, 1), -1)]));
        assert_eq!(word(&saddle), "HHHH");
        let node = PlanarField::new(BiPoly::from_ints(&[((1, 0), 1)]), BiPoly::from_ints(&[((0, 1), 2)]));
        assert_eq!(word(&node), "P");
        let focus = PlanarField::new(
            BiPoly::from_ints(&[((1, 0), 1), ((0, 1), -1)]),
            BiPoly::from_ints(&[((1, 0), 1), ((0, 1), 1)]),
        );
        assert_eq!(word(&focus), "monodromic");
    }

    #[test]
    fn saddle_node_and_cusp() {
        // x' = x^2, y' = -y : saddle-node
        let sn = PlanarField::new(BiPoly::from_ints(&[((2, 0), 1)]), BiPoly::from_ints(&[((0, 1), -1)]));
        let s = local_portrait_oracle(&sn, 6).unwrap();
        assert_eq!(s.word, "HHP");
        assert_eq!(s.index, 0);
        // cusp x' = y, y' = x^2
        let cusp = PlanarField::new(BiPoly::from_ints(&[((0, 1), 1)]), BiPoly::from_ints(&[((2, 0), 1)]));
        let s = local_portrait_oracle(&cusp, 6).unwrap();
        assert_eq!(s.word, "HH");
        assert_eq!(s.index, 0);
    }

    #[test]
    fn elliptic_point() {
        // x' = y, y' = -x^3 + 4 x y : one elliptic and one hyperbolic sector
        let f = PlanarField::new(
            BiPoly::from_ints(&[((0, 1), 1)]),
            BiPoly::from_ints(&[((3, 0), -1), ((1, 1), 4)]),
        );
        let s = local_portrait_oracle(&f, 6).unwrap();
        assert_eq!(s.word, "EH");
        assert_eq!(s.index, 1);
    }

    #[test]
    fn lienard_monodromic_case() {
        // x' = -y^3 - x^4, y' = x^3
        let f = field(&[(3, -1)], &[(4, 1)], &[(3, -1)]);
        assert_eq!(word(&f), "monodromic");
        // same with c_r > 0: saddle
        let f = field(&[(3, -1)], &[(4, 1)], &[(3, 1)]);
        assert_eq!(word(&f), "HHHH");
    }

    #[test]
    fn semi_hyperbolic_reduction_matches_closed_form() {
        // x' = -y^3 + x^2, y' = x^5 with weights (3, 2)
        let f = field(&[(3, -1)], &[(2, -1)], &[(5, -1)]);
        let ch = directional_blowup(&f, 3, 2, Direction::X_POS);
        let g = ch.divisor_poly();
        let roots = g.real_roots(None).unwrap();
        let root = roots.iter().find(|r| r.rational().is_some_and(|x| *x == rat(1))).unwrap();
        let red = transverse_reduction(&ch.field, root).unwrap();
        // w = -s^10/2 on the manifold, so s' = (3/2) s^11
        assert_eq!(red.exponent, 11);
        assert_eq!(red.coefficient, Poly::constant(crate::poly::ratio(3, 2)));
    }

    #[test]
    fn reduction_over_cube_root() {
        // x' = -y^3 + 2x^2, y' = x^5: divisor root 2^(1/3)
        let f = field(&[(3, -1)], &[(2, -2)], &[(5, -1)]);
        let ch = directional_blowup(&f, 3, 2, Direction::X_POS);
        let roots = ch.divisor_poly().real_roots(None).unwrap();
        let root = roots.iter().find(|r| !r.is_exact()).unwrap();
        let red = transverse_reduction(&ch.field, root).unwrap();
        assert_eq!(red.exponent, 11);
        assert_eq!(red.modulus.degree(), Some(3));
        // (3/4) t^2 with t^3 = 2
        let expected = Poly::from_terms([(2, crate::poly::ratio(3, 4))]);
        assert_eq!(red.coefficient, expected);
        assert_eq!(red.sign, Sign::Positive);
    }
}
