//! Newton polygons, quasi-homogeneous directional blow-ups and the local
//! phase-portrait oracle built on them.

pub mod alg;
pub mod oracle;
pub mod sectors;

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bipoly::BiPoly;
use crate::poly::{rat, Poly, Rational};
use crate::system::GeneralizedLienardSystem;

pub use oracle::{
    divisor_equilibria, local_portrait_oracle, resolve_singular_point, BlowupError, DivisorEquilibrium,
    DivisorPoint, EquilibriumKind, Resolution, SectorSequence,
};

/// One entry of a field's time-rescale history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeRescale {
    /// The field was divided by `s^divided_power`.
    pub divided_power: u32,
    /// Then multiplied by this positive constant.
    pub factor: u32,
    /// Multiplied by `s^multiplied_power` (Poincare charts).
    pub multiplied_power: u32,
    pub reversed: bool,
}

/// Polynomial vector field `x' = p(x, y)`, `y' = q(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarField {
    pub p: BiPoly,
    pub q: BiPoly,
    pub time_log: Vec<TimeRescale>,
}

impl PlanarField {
    pub fn new(p: BiPoly, q: BiPoly) -> PlanarField {
        PlanarField { p, q, time_log: Vec::new() }
    }

    pub fn from_system(sys: &GeneralizedLienardSystem) -> PlanarField {
        let (p, q) = sys.field_terms();
        PlanarField::new(BiPoly::from_terms(p), BiPoly::from_terms(q))
    }

    /// Exchange the roles of x and y.
    pub fn swap(&self) -> PlanarField {
        PlanarField { p: self.q.swap(), q: self.p.swap(), time_log: self.time_log.clone() }
    }

    /// Conjugate by x -> -x.
    pub fn reflect_x(&self) -> PlanarField {
        PlanarField { p: -&self.p.reflect_x(), q: self.q.reflect_x(), time_log: self.time_log.clone() }
    }

    pub fn translate_y(&self, a: &Rational) -> PlanarField {
        PlanarField { p: self.p.translate_y(a), q: self.q.translate_y(a), time_log: self.time_log.clone() }
    }

    pub fn is_singular_at_origin(&self) -> bool {
        self.p.coeff(0, 0).is_zero() && self.q.coeff(0, 0).is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.p.total_degree().max(self.q.total_degree())
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Weighted order: least `alpha*(i-1)+beta*j` over P and
    /// `alpha*i+beta*(j-1)` over Q.
    pub fn weighted_order(&self, alpha: u32, beta: u32) -> i64 {
        support(self).iter().map(|&(u, v)| alpha as i64 * u + beta as i64 * v).min().unwrap_or(0)
    }
}

impl fmt::Display for PlanarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x' = {}, y' = {}", self.p, self.q)
    }
}

fn support(field: &PlanarField) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = field
        .p
        .terms()
        .map(|((i, j), _)| (i as i64 - 1, j as i64))
        .chain(field.q.terms().map(|((i, j), _)| (i as i64, j as i64 - 1)))
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub alpha: u32,
    pub beta: u32,
    pub delta: i64,
    /// Common factor removed from the raw normal `(alpha, beta)`.
    pub scale: u32,
    pub points: Vec<(i64, i64)>,
}

impl Edge {
    /// Weights and degree before removing the common factor.
    pub fn raw(&self) -> (u32, u32, i64) {
        (self.alpha * self.scale, self.beta * self.scale, self.delta * self.scale as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub support: Vec<(i64, i64)>,
    pub edges: Vec<Edge>,
}

impl NewtonPolygon {
    pub fn vertices(&self) -> Vec<(i64, i64)> {
        let mut v = Vec::new();
        for e in &self.edges {
            let first = *e.points.first().unwrap();
            let last = *e.points.last().unwrap();
            if v.last() != Some(&first) {
                v.push(first);
            }
            v.push(last);
        }
        v
    }
}

/// Support points and the edges of the Newton diagram whose inward normals
/// are positive in both coordinates, from the top-left vertex downward.
pub fn support_and_polygon(field: &PlanarField) -> Result<NewtonPolygon, BlowupError> {
    let pts = support(field);
    if pts.is_empty() {
        return Err(BlowupError::DegenerateSupport);
    }
    let umin = pts.iter().map(|p| p.0).min().unwrap();
    let mut cur = *pts.iter().filter(|p| p.0 == umin).min_by_key(|p| p.1).unwrap();
    let mut edges = Vec::new();
    loop {
        // steepest descent to the right: minimise (v - v0)/(u - u0)
        let mut best: Option<(i64, i64)> = None;
        for &pt in &pts {
            if pt.0 <= cur.0 || pt.1 >= cur.1 {
                continue;
            }
            best = match best {
                None => Some(pt),
                Some(b) => {
                    let lhs = (pt.1 - cur.1) * (b.0 - cur.0);
                    let rhs = (b.1 - cur.1) * (pt.0 - cur.0);
                    if lhs < rhs || (lhs == rhs && pt.0 > b.0) {
                        Some(pt)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let Some(next) = best else { break };
        let a = cur.1 - next.1;
        let b = next.0 - cur.0;
        let g = a.gcd(&b);
        let (alpha, beta) = (a / g, b / g);
        let delta = alpha * cur.0 + beta * cur.1;
        let points: Vec<(i64, i64)> = pts.iter().cloned().filter(|p| alpha * p.0 + beta * p.1 == delta).collect();
        edges.push(Edge { alpha: alpha as u32, beta: beta as u32, delta, scale: g as u32, points });
        cur = next;
    }
    if edges.is_empty() && pts.len() == 1 {
        return Err(BlowupError::DegenerateSupport);
    }
    Ok(NewtonPolygon { support: pts, edges })
}

/// Quasi-homogeneous slice of a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedComponent {
    pub degree: i64,
    pub p: BiPoly,
    pub q: BiPoly,
}

pub fn graded_components(field: &PlanarField, alpha: u32, beta: u32) -> Vec<GradedComponent> {
    let mut degrees: Vec<i64> = support(field).iter().map(|&(u, v)| alpha as i64 * u + beta as i64 * v).collect();
    degrees.sort();
    degrees.dedup();
    degrees
        .into_iter()
        .map(|k| GradedComponent {
            degree: k,
            p: field.p.weighted_part(alpha, beta, (-1, 0), k),
            q: field.q.weighted_part(alpha, beta, (0, -1), k),
        })
        .filter(|c| !c.p.is_zero() || !c.q.is_zero())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// A chart direction: along `axis`, on the positive or negative side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub axis: Axis,
    pub positive: bool,
}

impl Direction {
    pub const X_POS: Direction = Direction { axis: Axis::X, positive: true };
    pub const Y_POS: Direction = Direction { axis: Axis::Y, positive: true };
    pub const X_NEG: Direction = Direction { axis: Axis::X, positive: false };
    pub const Y_NEG: Direction = Direction { axis: Axis::Y, positive: false };

    /// Counterclockwise order around the blown-up point.
    pub const CCW: [Direction; 4] = [Direction::X_POS, Direction::Y_POS, Direction::X_NEG, Direction::Y_NEG];

    /// Whether increasing chart angle runs clockwise around the point.
    pub fn reversed(self) -> bool {
        matches!((self.axis, self.positive), (Axis::Y, true) | (Axis::X, false))
    }

    pub fn label(self) -> &'static str {
        match (self.axis, self.positive) {
            (Axis::X, true) => "x+",
            (Axis::X, false) => "x-",
            (Axis::Y, true) => "y+",
            (Axis::Y, false) => "y-",
        }
    }

    /// Bring a field into the frame where this direction is the positive
    /// x-direction.
    pub fn orient(self, field: &PlanarField) -> PlanarField {
        match (self.axis, self.positive) {
            (Axis::X, true) => field.clone(),
            (Axis::X, false) => field.reflect_x(),
            (Axis::Y, true) => field.swap(),
            (Axis::Y, false) => field.swap().reflect_x(),
        }
    }
}

/// A blown-up or compactified chart. The field lives in coordinates
/// `(s, theta)` stored as `(x, y)`: `s` is transverse to the divisor (or
/// equator) and `theta` runs along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartField {
    pub direction: Direction,
    pub alpha: u32,
    pub beta: u32,
    pub delta: i64,
    pub poincare: bool,
    pub field: PlanarField,
}

impl ChartField {
    /// Restriction of theta' to the divisor s = 0.
    pub fn divisor_poly(&self) -> Poly {
        self.field.q.x_slice(0)
    }

    /// Coefficient A(theta) in s' = s A(theta) + O(s^2).
    pub fn transverse_rate(&self) -> Poly {
        self.field.p.x_slice(1)
    }
}

/// Positive x-direction blow-up `x = s^alpha`, `y = s^beta theta`, divided by
/// `s^delta` and multiplied by `alpha`.
fn x_positive_blowup(field: &PlanarField, alpha: u32, beta: u32) -> (PlanarField, i64) {
    let delta = field.weighted_order(alpha, beta);
    let mut p_tilde = BiPoly::zero();
    for ((i, j), c) in field.p.terms() {
        let e = alpha as i64 * (i as i64 - 1) + beta as i64 * j as i64 - delta;
        debug_assert!(e >= 0);
        p_tilde.add_term(e as u32, j, c.clone());
    }
    let mut q_tilde = BiPoly::zero();
    for ((i, j), c) in field.q.terms() {
        let e = alpha as i64 * i as i64 + beta as i64 * (j as i64 - 1) - delta;
        debug_assert!(e >= 0);
        q_tilde.add_term(e as u32, j, c.clone());
    }
    let s_dot = p_tilde.mul_x_power(1);
    let theta = BiPoly::monomial(rat(1), 0, 1);
    let theta_dot = &q_tilde.scale(&rat(alpha as i64)) - &(&theta * &p_tilde).scale(&rat(beta as i64));
    let mut out = PlanarField::new(s_dot, theta_dot);
    out.time_log = field.time_log.clone();
    out.time_log.push(TimeRescale {
        divided_power: delta.max(0) as u32,
        factor: alpha,
        multiplied_power: (-delta).max(0) as u32,
        reversed: false,
    });
    (out, delta)
}

/// Directional quasi-homogeneous blow-up of the origin with weights
/// `(alpha, beta)` in the given direction.
pub fn directional_blowup(field: &PlanarField, alpha: u32, beta: u32, direction: Direction) -> ChartField {
    let oriented = direction.orient(field);
    let (a, b) = match direction.axis {
        Axis::X => (alpha, beta),
        Axis::Y => (beta, alpha),
    };
    let (chart, delta) = x_positive_blowup(&oriented, a, b);
    ChartField { direction, alpha: a, beta: b, delta, poincare: false, field: chart }
}

/// Poincare chart `x = 1/s`, `y = theta/s` in the given direction,
/// multiplied by `s^(d-1)` with `d` the degree of the field.
pub fn poincare_chart(field: &PlanarField, direction: Direction) -> ChartField {
    let f = direction.orient(field);
    let d = field.degree();
    let homog = |p: &BiPoly| {
        let mut out = BiPoly::zero();
        for ((i, j), c) in p.terms() {
            out.add_term(d - i - j, j, c.clone());
        }
        out
    };
    let ps = homog(&f.p);
    let qs = homog(&f.q);
    let theta = BiPoly::monomial(rat(1), 0, 1);
    let s_dot = -&ps.mul_x_power(1);
    let theta_dot = &qs - &(&theta * &ps);
    let mut out = PlanarField::new(s_dot, theta_dot);
    out.time_log = field.time_log.clone();
    out.time_log.push(TimeRescale { divided_power: 0, factor: 1, multiplied_power: d.saturating_sub(1), reversed: false });
    ChartField { direction, alpha: 1, beta: 1, delta: d as i64 - 1, poincare: true, field: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn lienard(p: u32, q: u32, r: u32, b: i64, c: i64) -> PlanarField {
        let sys = GeneralizedLienardSystem::from_ints(&[(p, -1)], &[(q, b)], &[(r, c)]).unwrap();
        PlanarField::from_system(&sys)
    }

    #[test]
    fn polygon_case_one() {
        let poly = support_and_polygon(&lienard(3, 4, 3, 1, -1)).unwrap();
        assert_eq!(poly.edges.len(), 1);
        let e = &poly.edges[0];
        assert_eq!((e.alpha, e.beta), (1, 1));
        assert_eq!(e.raw(), (4, 4, 8));
        assert_eq!(poly.vertices(), vec![(-1, 3), (3, -1)]);
    }

    #[test]
    fn polygon_case_two() {
        let poly = support_and_polygon(&lienard(1, 2, 3, -2, -1)).unwrap();
        assert_eq!(poly.edges.len(), 1);
        assert!(poly.edges[0].points.contains(&(1, 0)));
        assert_eq!(poly.edges[0].points.len(), 3);
    }

    #[test]
    fn polygon_case_three() {
        let poly = support_and_polygon(&lienard(3, 2, 5, 1, -1)).unwrap();
        assert_eq!(poly.edges.len(), 2);
        assert_eq!(poly.vertices(), vec![(-1, 3), (1, 0), (5, -1)]);
        assert_eq!((poly.edges[0].alpha, poly.edges[0].beta), (3, 2));
    }

    #[test]
    fn graded_lowest_components() {
        let f = lienard(3, 4, 3, 1, -1);
        let comps = graded_components(&f, 4, 4);
        assert_eq!(comps[0].degree, 8);
        assert_eq!(comps[0].p, BiPoly::from_ints(&[((0, 3), -1)]));
        assert_eq!(comps[0].q, BiPoly::from_ints(&[((3, 0), 1)]));
        let f = lienard(1, 2, 3, -2, -1);
        let comps = graded_components(&f, 1, 2);
        assert_eq!(comps[0].p, BiPoly::from_ints(&[((0, 1), -1), ((2, 0), 2)]));
        // sum of components restores the field
        let mut p = BiPoly::zero();
        let mut q = BiPoly::zero();
        for c in &comps {
            p = &p + &c.p;
            q = &q + &c.q;
        }
        assert_eq!((p, q), (f.p.clone(), f.q.clone()));
    }

    #[test]
    fn case_one_chart_divisor() {
        // p=3, r=3, c_r=-1 (g = -x^3, so Q = x^3): G0 = -(p+1) c_r + (r+1) v^(p+1)
        let f = lienard(3, 4, 3, 1, -1);
        let ch = directional_blowup(&f, 4, 4, Direction::X_POS);
        assert_eq!(ch.divisor_poly(), Poly::from_terms([(0, rat(4)), (4, rat(4))]));
    }

    #[test]
    fn case_two_chart_divisors() {
        // p=1, q=2, b=-2, c=-1
        let f = lienard(1, 2, 3, -2, -1);
        let ch = directional_blowup(&f, 1, 2, Direction::X_POS);
        // -p c + q b v + q v^(p+1) = 1 - 4v + 2v^2
        assert_eq!(ch.divisor_poly(), Poly::from_ints(&[1, -4, 2]));
        let ch = directional_blowup(&f, 1, 2, Direction::X_NEG);
        // (-1)^(r+1) p c + (-1)^(q+1) q b v - q v^(p+1) = -1 + 4v - 2v^2
        assert_eq!(ch.divisor_poly(), Poly::from_ints(&[-1, 4, -2]));
    }
}
