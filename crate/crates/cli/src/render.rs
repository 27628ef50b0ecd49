//! SVG phase portraits: a window around the origin or the whole Poincare disc.

use std::f64::consts::PI;
use std::fmt::Write as _;

use lienard_core::infinity::infinity_oracle;
use lienard_core::numeric::{integrate_partial, Chart, FloatField, IntegrationOptions, Sample};
use lienard_core::poly::Poly;
use lienard_core::system::GeneralizedLienardSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Disc {
    #[default]
    Local,
    Poincare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub disc: Disc,
    pub orbits: usize,
    pub seed: u64,
    /// Half-width of the local window.
    pub radius: f64,
    pub size: u32,
    pub title: Option<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { disc: Disc::Local, orbits: 12, seed: 0, radius: 1.5, size: 480, title: None }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Directions of the equator equilibria of the Poincare compactification,
/// as angles in `(-pi/2, 3pi/2]` in counterclockwise order from the
/// positive x-direction.
pub fn equator_angles(sys: &GeneralizedLienardSystem) -> Vec<f64> {
    let e = sys.exponents();
    let (l, m, n) = (e.phi_high, e.damping_high, e.restoring_high);
    let d = l.max(m).max(n);
    // x Q_d - y P_d on x = 1, y = t
    let mut h = Poly::zero();
    if n == d {
        h.add_term(0, -sys.c_high());
    }
    if m == d {
        h.add_term(1, sys.b_high());
    }
    if l == d {
        h.add_term(l + 1, -sys.a_high());
    }
    let mut angles = Vec::new();
    if let Ok(roots) = h.real_roots(None) {
        for r in roots.iter() {
            let theta = r.approx().atan();
            angles.push(theta);
            angles.push(theta + PI);
        }
    }
    if l < d {
        angles.push(PI / 2.0);
        angles.push(3.0 * PI / 2.0);
    }
    angles.sort_by(f64::total_cmp);
    angles
}

/// Point of the closed unit disc for a chart sample.
fn disc_point(s: &Sample) -> (f64, f64) {
    match s.chart {
        Chart::Plane => {
            let k = (1.0 + s.u * s.u + s.v * s.v).sqrt();
            (s.u / k, s.v / k)
        }
        Chart::U => {
            let k = s.v.signum() / (s.v * s.v + 1.0 + s.u * s.u).sqrt();
            (k, s.u * k)
        }
        Chart::V => {
            let k = s.v.signum() / (s.v * s.v + 1.0 + s.u * s.u).sqrt();
            (s.u * k, k)
        }
    }
}

fn plane_point(s: &Sample) -> (f64, f64) {
    match s.chart {
        Chart::Plane => (s.u, s.v),
        Chart::U => (1.0 / s.v, s.u / s.v),
        Chart::V => (s.u / s.v, 1.0 / s.v),
    }
}

struct Canvas {
    out: String,
    size: f64,
    extent: f64,
}

impl Canvas {
    fn px(&self, p: (f64, f64)) -> (f64, f64) {
        let half = self.size / 2.0;
        (half + p.0 / self.extent * half, half - p.1 / self.extent * half)
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (k, &p) in pts.iter().enumerate() {
            let (x, y) = self.px(p);
            let _ = write!(d, "{}{:.2},{:.2}", if k == 0 { "" } else { " " }, x, y);
        }
        let _ = writeln!(self.out, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.2"/>"#, d, color);
    }

    fn arrow(&mut self, at: (f64, f64), toward: (f64, f64), color: &str) {
        let (x0, y0) = self.px(at);
        let (x1, y1) = self.px(toward);
        let (dx, dy) = (x1 - x0, y1 - y0);
        let len = (dx * dx + dy * dy).sqrt();
        if len < 1e-9 {
            return;
        }
        let (ux, uy) = (dx / len, dy / len);
        let tip = (x0 + 4.0 * ux, y0 + 4.0 * uy);
        let left = (x0 - 4.0 * ux - 3.5 * uy, y0 - 4.0 * uy + 3.5 * ux);
        let right = (x0 - 4.0 * ux + 3.5 * uy, y0 - 4.0 * uy - 3.5 * ux);
        let _ = writeln!(
            self.out,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{}"/>"#,
            tip.0, tip.1, left.0, left.1, right.0, right.1, color
        );
    }
}

/// Consecutive visible runs of an orbit, split where it leaves the window.
fn visible_runs(points: Vec<(f64, f64)>, extent: f64) -> Vec<Vec<(f64, f64)>> {
    let mut runs = Vec::new();
    let mut cur = Vec::new();
    for p in points {
        if p.0.is_finite() && p.1.is_finite() && p.0.abs() <= extent && p.1.abs() <= extent {
            cur.push(p);
        } else if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs
}

/// Cut an orbit once it has wound a full turn around the origin, so closed
/// orbits are drawn once.
fn one_turn(points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut wound = 0.0;
    let mut prev: Option<f64> = None;
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let a = p.1.atan2(p.0);
        if let Some(b) = prev {
            let mut d = a - b;
            if d > PI {
                d -= 2.0 * PI;
            } else if d < -PI {
                d += 2.0 * PI;
            }
            wound += d;
        }
        prev = Some(a);
        out.push(p);
        if wound.abs() > 2.0 * PI + 0.05 {
            break;
        }
    }
    out
}

/// Thin a run to at most `max` points, keeping both ends.
fn thin(run: &[(f64, f64)], max: usize) -> Vec<(f64, f64)> {
    if run.len() <= max {
        return run.to_vec();
    }
    let step = run.len() as f64 / (max - 1) as f64;
    let mut out: Vec<(f64, f64)> = (0..max - 1).map(|k| run[(k as f64 * step) as usize]).collect();
    out.push(*run.last().unwrap());
    out
}

fn seeds(opts: &RenderOptions) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    (0..opts.orbits)
        .map(|_| match opts.disc {
            Disc::Local => (rng.gen_range(-opts.radius..opts.radius), rng.gen_range(-opts.radius..opts.radius)),
            Disc::Poincare => {
                // uniform in the disc of radius 0.95, pulled back to the plane
                let r = 0.95 * rng.gen::<f64>().sqrt();
                let a = rng.gen_range(0.0..2.0 * PI);
                let rho = r / (1.0 - r * r).sqrt();
                (rho * a.cos(), rho * a.sin())
            }
        })
        .collect()
}

pub fn render_svg(sys: &GeneralizedLienardSystem, opts: &RenderOptions) -> String {
    let extent = match opts.disc {
        Disc::Local => opts.radius,
        Disc::Poincare => 1.08,
    };
    let size = opts.size as f64;
    let mut c = Canvas { out: String::new(), size, extent };
    let _ = writeln!(c.out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        c.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    let _ = writeln!(c.out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(t) = &opts.title {
        let _ = writeln!(c.out, r#"<title>{}</title>"#, escape(t));
    }
    let (cx, cy) = c.px((0.0, 0.0));
    match opts.disc {
        Disc::Local => {
            let (x0, y0) = c.px((-extent, extent));
            let _ = writeln!(
                c.out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
                x0,
                y0,
                size - 2.0 * x0,
                size - 2.0 * y0
            );
        }
        Disc::Poincare => {
            let r = size / 2.0 / extent;
            let _ = writeln!(c.out, r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#, cx, cy, r);
        }
    }

    let field = FloatField::from_system(sys);
    let integration = match opts.disc {
        Disc::Local => IntegrationOptions { tol: 1e-8, handover: None, max_steps: 6000 },
        Disc::Poincare => IntegrationOptions { tol: 1e-8, max_steps: 6000, ..Default::default() },
    };
    let project = |s: &Sample| match opts.disc {
        Disc::Local => plane_point(s),
        Disc::Poincare => disc_point(s),
    };
    for (k, start) in seeds(opts).into_iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let (fwd, _) = integrate_partial(&field, start, 200.0, &integration);
        let (bwd, _) = integrate_partial(&field.reversed(), start, 200.0, &integration);
        let back = one_turn(bwd.samples.iter().map(project).collect());
        let mut pts: Vec<(f64, f64)> = back.into_iter().rev().collect();
        pts.extend(one_turn(fwd.samples.iter().map(project).collect()).into_iter().skip(1));
        for run in visible_runs(pts, extent) {
            let run = thin(&run, 800);
            c.polyline(&run, color);
            if run.len() >= 4 {
                let mid = run.len() / 2;
                c.arrow(run[mid], run[mid + 1], color);
            }
        }
    }

    let _ = writeln!(c.out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, cx, cy);
    if opts.disc == Disc::Poincare {
        let angles = equator_angles(sys);
        let words: Option<Vec<String>> = infinity_oracle(sys)
            .ok()
            .filter(|eq| eq.points.len() == angles.len())
            .map(|eq| eq.points.iter().map(|p| p.half.normalized().flow_word()).collect());
        for (k, &theta) in angles.iter().enumerate() {
            let (x, y) = c.px((theta.cos(), theta.sin()));
            let _ = writeln!(c.out, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="white" stroke="black"/>"#, x, y);
            if let Some(w) = words.as_ref().map(|w| &w[k]) {
                let (tx, ty) = c.px((1.04 * theta.cos(), 1.04 * theta.sin()));
                let _ = writeln!(
                    c.out,
                    r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="monospace" text-anchor="middle">{}</text>"#,
                    tx,
                    ty,
                    escape(w)
                );
            }
        }
    }
    c.out.push_str("</svg>\n");
    c.out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(phi: &[(u32, i64)], f: &[(u32, i64)], g: &[(u32, i64)]) -> GeneralizedLienardSystem {
        GeneralizedLienardSystem::from_ints(phi, f, g).unwrap()
    }

    #[test]
    fn equator_of_system_a() {
        // phi = -y^3, F = x^4, g = -x^3: degree 4 comes from F alone, so
        // h = t and the equilibria sit on both axes
        let a = sys(&[(3, -1)], &[(4, 1)], &[(3, -1)]);
        let angles = equator_angles(&a);
        assert_eq!(angles.len(), 4);
        assert!((angles[0]).abs() < 1e-12);
        let eq = infinity_oracle(&a).unwrap();
        assert_eq!(eq.points.len(), angles.len());
    }

    #[test]
    fn rendering_is_deterministic() {
        let d = sys(&[(3, -1), (7, -1)], &[(4, 1)], &[(3, -1), (5, -1)]);
        let opts = RenderOptions { disc: Disc::Poincare, orbits: 4, ..Default::default() };
        let a = render_svg(&d, &opts);
        assert_eq!(a, render_svg(&d, &opts));
        assert!(a.starts_with("<?xml") && a.ends_with("</svg>\n"));
        assert!(a.contains("<polyline"));
    }

    #[test]
    fn disc_projection_is_continuous_across_charts() {
        let s = Sample { t: 0.0, chart: Chart::Plane, u: 20.0, v: 3.0 };
        let (u, v) = lienard_core::numeric::from_plane(Chart::U, 20.0, 3.0);
        let t = Sample { t: 0.0, chart: Chart::U, u, v };
        let (a, b) = (disc_point(&s), disc_point(&t));
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }
}
