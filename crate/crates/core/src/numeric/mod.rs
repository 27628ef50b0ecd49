//! Adaptive integration on the plane and the Poincare charts, return maps,
//! period profiles and the numeric center probe.

pub mod dopri;

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::blowup::PlanarField;
use crate::origin::monodromy_origin;
use crate::poly::rat_to_f64;
use crate::system::GeneralizedLienardSystem;
use dopri::{Attempt, State, Step, Stepper};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error("step size underflow at t = {t:.6e} in chart {chart} near ({u:.6e}, {v:.6e})")]
    StepUnderflow { t: f64, chart: Chart, u: f64, v: f64 },
    #[error("origin is not monodromic")]
    NotMonodromic,
    #[error("orbit from amplitude {0} escaped to infinity")]
    EscapedOrbit(f64),
    #[error("orbit from amplitude {0} did not return to the section")]
    NonClosingOrbit(f64),
    #[error("field is tangent to the section at amplitude {0}")]
    TangentSection(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Plane,
    U,
    V,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chart::Plane => "plane",
            Chart::U => "U",
            Chart::V => "V",
        };
        write!(f, "{}", s)
    }
}

/// Polynomial field with floating coefficients, `(i, j, c)` for `c x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatField {
    pub p: Vec<(u32, u32, f64)>,
    pub q: Vec<(u32, u32, f64)>,
    pub degree: u32,
}

fn powi(x: f64, k: u32) -> f64 {
    x.powi(k as i32)
}

impl FloatField {
    pub fn new(p: Vec<(u32, u32, f64)>, q: Vec<(u32, u32, f64)>) -> FloatField {
        let degree = p.iter().chain(q.iter()).map(|t| t.0 + t.1).max().unwrap_or(1).max(1);
        FloatField { p, q, degree }
    }

    pub fn from_planar(field: &PlanarField) -> FloatField {
        let conv = |b: &crate::bipoly::BiPoly| b.terms().map(|((i, j), c)| (i, j, rat_to_f64(c))).collect();
        FloatField::new(conv(&field.p), conv(&field.q))
    }

    pub fn from_system(sys: &GeneralizedLienardSystem) -> FloatField {
        FloatField::from_planar(&PlanarField::from_system(sys))
    }

    /// The same orbits traversed backwards.
    pub fn reversed(&self) -> FloatField {
        let neg = |t: &[(u32, u32, f64)]| t.iter().map(|&(i, j, c)| (i, j, -c)).collect();
        FloatField { p: neg(&self.p), q: neg(&self.q), degree: self.degree }
    }

    pub fn plane(&self, x: f64, y: f64) -> (f64, f64) {
        let ev = |t: &[(u32, u32, f64)]| t.iter().map(|&(i, j, c)| c * powi(x, i) * powi(y, j)).sum::<f64>();
        (ev(&self.p), ev(&self.q))
    }

    /// `v^d P`, `v^d Q` at the point with chart coordinates `(u, v)`.
    fn chart_parts(&self, chart: Chart, u: f64, v: f64) -> (f64, f64) {
        let d = self.degree;
        let ev = |t: &[(u32, u32, f64)]| {
            t.iter()
                .map(|&(i, j, c)| match chart {
                    Chart::U => c * powi(u, j) * powi(v, d - i - j),
                    _ => c * powi(u, i) * powi(v, d - i - j),
                })
                .sum::<f64>()
        };
        (ev(&self.p), ev(&self.q))
    }

    /// Right-hand side in `chart` with independent variable tau and the
    /// original time as the third component.
    pub fn rhs(&self, chart: Chart, y: &State) -> State {
        match chart {
            Chart::Plane => {
                let (p, q) = self.plane(y[0], y[1]);
                [p, q, 1.0]
            }
            Chart::U | Chart::V => {
                let (u, v) = (y[0], y[1]);
                let sigma = if v < 0.0 && (self.degree - 1) % 2 == 1 { -1.0 } else { 1.0 };
                let (ph, qh) = self.chart_parts(chart, u, v);
                let (a, b) = if chart == Chart::U { (ph, qh) } else { (qh, ph) };
                // U: x = 1/v, y = u/v; V: x = u/v, y = 1/v
                [sigma * (b - u * a), -sigma * v * a, powi(v.abs(), self.degree - 1)]
            }
        }
    }
}

/// Plane coordinates of a chart point.
pub fn to_plane(chart: Chart, u: f64, v: f64) -> (f64, f64) {
    match chart {
        Chart::Plane => (u, v),
        Chart::U => (1.0 / v, u / v),
        Chart::V => (u / v, 1.0 / v),
    }
}

/// Chart coordinates of a plane point.
pub fn from_plane(chart: Chart, x: f64, y: f64) -> (f64, f64) {
    match chart {
        Chart::Plane => (x, y),
        Chart::U => (y / x, 1.0 / x),
        Chart::V => (x / y, 1.0 / y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub chart: Chart,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Event {
    ChartSwitch { t: f64, from: Chart, to: Chart },
    SectionCrossing { t: f64, x: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn plane_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|s| to_plane(s.chart, s.u, s.v))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,chart,u,v\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.12e},{},{:.12e},{:.12e}", s.t, s.chart, s.u, s.v);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub tol: f64,
    /// Plane-to-chart radius and chart-to-plane radius; `None` stays in the plane.
    pub handover: Option<(f64, f64)>,
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { tol: 1e-10, handover: Some((10.0, 8.0)), max_steps: 2_000_000 }
    }
}

enum Control {
    Continue,
    Stop,
}

fn plane_radius(chart: Chart, u: f64, v: f64) -> f64 {
    match chart {
        Chart::Plane => u.abs().max(v.abs()),
        _ => u.abs().max(1.0) / v.abs(),
    }
}

/// Chart to move to after an accepted step, if any.
fn handover(chart: Chart, y: &State, radii: (f64, f64)) -> Option<(Chart, State)> {
    let (out_r, in_r) = radii;
    let (u, v) = (y[0], y[1]);
    match chart {
        Chart::Plane if plane_radius(chart, u, v) > out_r => {
            let target = if u.abs() >= v.abs() { Chart::U } else { Chart::V };
            let (a, b) = from_plane(target, u, v);
            Some((target, [a, b, y[2]]))
        }
        Chart::Plane => None,
        _ if plane_radius(chart, u, v) < in_r => {
            let (x, yy) = to_plane(chart, u, v);
            Some((Chart::Plane, [x, yy, y[2]]))
        }
        _ if u.abs() > 2.0 => {
            let other = if chart == Chart::U { Chart::V } else { Chart::U };
            Some((other, [1.0 / u, v / u, y[2]]))
        }
        _ => None,
    }
}

/// Drive the flow from a plane point, calling `on_step` for every accepted
/// step until it returns `Stop` or original time reaches `t_end`.
fn drive<C>(
    field: &FloatField,
    start: (f64, f64),
    t_end: f64,
    opts: &IntegrationOptions,
    mut on_step: C,
) -> Result<Vec<Event>, NumericError>
where
    C: FnMut(&Step, Chart) -> Control,
{
    if !(opts.tol > 0.0) {
        return Err(NumericError::InvalidTolerance);
    }
    let mut chart = Chart::Plane;
    let mut y: State = [start.0, start.1, 0.0];
    if let Some(radii) = opts.handover {
        if let Some((c, s)) = handover(chart, &y, radii) {
            chart = c;
            y = s;
        }
    }
    let mut events = Vec::new();
    let mut tau = 0.0;
    let mut h = 1e-3;
    let mut steps = 0usize;
    'charts: loop {
        let c = chart;
        let mut st = Stepper::new(|s: &State| field.rhs(c, s), opts.tol, h);
        loop {
            steps += 1;
            if steps > opts.max_steps {
                return Ok(events);
            }
            // cap tau steps so the original time does not overshoot much
            let rate = field.rhs(c, &y)[2].abs().max(1e-300);
            let h_max = if t_end.is_finite() { ((t_end - y[2]) / rate).max(1e-12) } else { f64::INFINITY };
            match st.attempt(tau, &y, h_max) {
                Attempt::Rejected => {
                    if st.h < 1e-14 * (1.0 + tau.abs()) {
                        return Err(NumericError::StepUnderflow { t: y[2], chart: c, u: y[0], v: y[1] });
                    }
                }
                Attempt::Accepted(step) => {
                    tau = step.t1();
                    y = step.y1;
                    if y.iter().any(|v| !v.is_finite()) {
                        return Err(NumericError::StepUnderflow { t: y[2], chart: c, u: y[0], v: y[1] });
                    }
                    if let Control::Stop = on_step(&step, c) {
                        return Ok(events);
                    }
                    if y[2] >= t_end {
                        return Ok(events);
                    }
                    if c != Chart::Plane && y[1].abs() < 1e-13 {
                        return Err(NumericError::EscapedOrbit(f64::INFINITY));
                    }
                    if let Some(radii) = opts.handover {
                        if let Some((next, state)) = handover(c, &y, radii) {
                            events.push(Event::ChartSwitch { t: y[2], from: c, to: next });
                            chart = next;
                            y = state;
                            h = st.h;
                            continue 'charts;
                        }
                    }
                }
            }
        }
    }
}

/// Integrate a field from a plane point over original time `t_span`.
pub fn integrate_field(
    field: &FloatField,
    start: (f64, f64),
    t_span: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory, NumericError> {
    match integrate_partial(field, start, t_span, opts) {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}

/// Like [`integrate_field`], but keeps the samples reached before a failure.
pub fn integrate_partial(
    field: &FloatField,
    start: (f64, f64),
    t_span: f64,
    opts: &IntegrationOptions,
) -> (Trajectory, Option<NumericError>) {
    let mut samples = vec![Sample { t: 0.0, chart: Chart::Plane, u: start.0, v: start.1 }];
    let result = drive(field, start, t_span, opts, |step, chart| {
        samples.push(Sample { t: step.y1[2], chart, u: step.y1[0], v: step.y1[1] });
        Control::Continue
    });
    match result {
        Ok(events) => (Trajectory { samples, events }, None),
        Err(e) => (Trajectory { samples, events: Vec::new() }, Some(e)),
    }
}

pub fn integrate(
    sys: &GeneralizedLienardSystem,
    start: (f64, f64),
    t_span: f64,
    tol: f64,
) -> Result<Trajectory, NumericError> {
    let opts = IntegrationOptions { tol, ..Default::default() };
    integrate_field(&FloatField::from_system(sys), start, t_span, &opts)
}

/// Signed distance to the positive x-axis section, if the point is on the
/// right half where the section lives.
fn section_value(chart: Chart, y: &State) -> Option<f64> {
    match chart {
        Chart::Plane if y[0] > 0.0 => Some(y[1]),
        Chart::U if y[1] > 0.0 => Some(y[0]),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnPoint {
    pub amplitude: f64,
    pub value: f64,
    pub displacement: f64,
    /// Original time of the first return.
    pub period: f64,
}

/// First return to the positive x-axis of a field, without monodromy checks.
pub fn return_map_field(field: &FloatField, s: f64, opts: &IntegrationOptions) -> Result<ReturnPoint, NumericError> {
    if s == 0.0 {
        return Ok(ReturnPoint { amplitude: 0.0, value: 0.0, displacement: 0.0, period: 0.0 });
    }
    let dir = field.plane(s, 0.0).1.signum();
    if dir == 0.0 {
        return Err(NumericError::TangentSection(s));
    }
    let mut hit: Option<(f64, f64)> = None;
    let mut left_section = false;
    let events = drive(field, (s, 0.0), f64::INFINITY, opts, |step, chart| {
        let a = section_value(chart, &step.y0);
        let b = section_value(chart, &step.y1);
        if let (Some(a), Some(b)) = (a, b) {
            if a * dir > 0.0 {
                left_section = true;
            }
            if left_section && a * dir < 0.0 && b * dir >= 0.0 {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let m = section_value(chart, &step.dense(mid)).unwrap_or(a);
                    if m * dir < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let p = step.dense(0.5 * (lo + hi));
                let (x, _) = to_plane(chart, p[0], p[1]);
                hit = Some((x, p[2]));
                return Control::Stop;
            }
        } else if a.is_none() {
            left_section = true;
        }
        Control::Continue
    })?;
    let _ = events;
    match hit {
        Some((x, t)) => Ok(ReturnPoint { amplitude: s, value: x, displacement: x - s, period: t }),
        None => Err(NumericError::NonClosingOrbit(s)),
    }
}

/// First return map on the positive x-axis at amplitude `s`.
pub fn return_map(sys: &GeneralizedLienardSystem, s: f64, tol: f64) -> Result<ReturnPoint, NumericError> {
    if monodromy_origin(sys).is_none() {
        return Err(NumericError::NotMonodromic);
    }
    let opts = IntegrationOptions { tol, ..Default::default() };
    return_map_field(&FloatField::from_system(sys), s, &opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodProfile {
    pub points: Vec<(f64, f64)>,
    /// First index from which periods strictly decrease to the end.
    pub decreasing_from: usize,
    pub eventually_decreasing: bool,
    pub max_min_ratio: f64,
}

/// Periods of the orbits through `(s, 0)`; every orbit must close.
pub fn period_profile(sys: &GeneralizedLienardSystem, amplitudes: &[f64], tol: f64) -> Result<PeriodProfile, NumericError> {
    let field = FloatField::from_system(sys);
    let opts = IntegrationOptions { tol, ..Default::default() };
    let mut points = Vec::new();
    for &s in amplitudes {
        let r = return_map_field(&field, s, &opts)?;
        let closure = r.displacement.abs() / s.abs().max(1.0);
        if closure > 1e-6 {
            return Err(NumericError::NonClosingOrbit(s));
        }
        points.push((s, r.period));
    }
    let mut from = points.len().saturating_sub(1);
    while from > 0 && points[from - 1].1 > points[from].1 {
        from -= 1;
    }
    let max = points.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let min = points.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    Ok(PeriodProfile {
        eventually_decreasing: points.len() >= 2 && from + 1 < points.len(),
        decreasing_from: from,
        max_min_ratio: if points.is_empty() { 0.0 } else { max / min },
        points,
    })
}

/// `n` geometric amplitudes from `lo` to `hi`.
pub fn geometric_amplitudes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).powf(1.0 / (n - 1) as f64);
    (0..n).map(|k| lo * r.powi(k as i32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    Center,
    Focus(Stability),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub amplitude: f64,
    pub displacement: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub samples: Vec<ProbeSample>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    pub amplitudes: Vec<f64>,
    /// Coarse tolerance; the reported displacement uses `tol / 100`.
    pub tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { amplitudes: vec![0.01, 0.02, 0.05, 0.1], tol: 1e-12 }
    }
}

/// Displacement at one amplitude with a noise estimate from two tolerances.
pub fn probe_sample(field: &FloatField, s: f64, tol: f64) -> Result<ProbeSample, NumericError> {
    let coarse = IntegrationOptions { tol, ..Default::default() };
    let fine = IntegrationOptions { tol: tol / 100.0, ..Default::default() };
    let a = return_map_field(field, s, &coarse)?;
    let b = return_map_field(field, s, &fine)?;
    Ok(ProbeSample { amplitude: s, displacement: b.displacement, noise: (a.displacement - b.displacement).abs() })
}

pub fn verdict_from_samples(samples: &[ProbeSample]) -> ProbeVerdict {
    if samples.is_empty() {
        return ProbeVerdict::Inconclusive;
    }
    let strong = samples.iter().all(|p| p.displacement.abs() > 10.0 * p.noise);
    let first = samples[0].displacement.signum();
    if strong && samples.iter().all(|p| p.displacement.signum() == first) && first != 0.0 {
        let st = if first < 0.0 { Stability::Stable } else { Stability::Unstable };
        return ProbeVerdict::Focus(st);
    }
    if samples.iter().all(|p| p.displacement.abs() <= (1e-7 * p.amplitude).max(10.0 * p.noise)) {
        let closed = samples.iter().all(|p| p.displacement.abs() <= 1e-7 * p.amplitude);
        if closed {
            return ProbeVerdict::Center;
        }
    }
    ProbeVerdict::Inconclusive
}

/// Numeric center/focus decision from the return map.
pub fn center_probe(sys: &GeneralizedLienardSystem, opts: &ProbeOptions) -> Result<ProbeReport, NumericError> {
    if monodromy_origin(sys).is_none() {
        return Err(NumericError::NotMonodromic);
    }
    let field = FloatField::from_system(sys);
    let samples = opts
        .amplitudes
        .iter()
        .map(|&s| probe_sample(&field, s, opts.tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProbeReport { verdict: verdict_from_samples(&samples), samples, tol: opts.tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamiltonian() -> FloatField {
        FloatField::new(vec![(0, 3, -1.0)], vec![(3, 0, 1.0)])
    }

    #[test]
    fn chart_coordinates_round_trip() {
        for &(x, y) in &[(12.0, 3.0), (-15.0, 40.0), (30.0, -31.0), (-9.5, -0.25)] {
            for chart in [Chart::U, Chart::V] {
                let (u, v) = from_plane(chart, x, y);
                let (a, b) = to_plane(chart, u, v);
                assert!((a - x).abs() < 1e-12 * x.abs().max(1.0));
                assert!((b - y).abs() < 1e-12 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn chart_fields_agree_with_plane_field() {
        // velocity pushed through the chart map equals the chart field times dt/dtau
        let f = FloatField::new(vec![(0, 3, -1.0), (4, 0, -1.0)], vec![(3, 0, 1.0), (5, 0, 1.0)]);
        let (x, y) = (13.0, -4.0);
        let (p, q) = f.plane(x, y);
        for chart in [Chart::U, Chart::V] {
            let (u, v) = from_plane(chart, x, y);
            let r = f.rhs(chart, &[u, v, 0.0]);
            let dt = r[2];
            let (du, dv) = match chart {
                Chart::U => ((q * x - y * p) / (x * x), -p / (x * x)),
                _ => ((p * y - x * q) / (y * y), -q / (y * y)),
            };
            assert!((r[0] / dt - du).abs() < 1e-9 * du.abs().max(1.0), "{:?}", chart);
            assert!((r[1] / dt - dv).abs() < 1e-9 * dv.abs().max(1.0), "{:?}", chart);
        }
    }

    #[test]
    fn hamiltonian_quartic_energy() {
        let f = hamiltonian();
        let opts = IntegrationOptions { tol: 1e-10, ..Default::default() };
        let r = return_map_field(&f, 1.0, &opts).unwrap();
        let traj = integrate_field(&f, (1.0, 0.0), 10.0 * r.period, &opts).unwrap();
        let worst = traj.plane_points().map(|(x, y)| (x.powi(4) + y.powi(4) - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{}", worst);
    }

    #[test]
    fn zero_amplitude_is_fixed() {
        let r = return_map_field(&hamiltonian(), 0.0, &IntegrationOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn orbit_through_charts_matches_plane_orbit() {
        let f = hamiltonian();
        let with = IntegrationOptions { tol: 1e-12, ..Default::default() };
        let without = IntegrationOptions { tol: 1e-12, handover: None, ..Default::default() };
        let a = return_map_field(&f, 20.0, &with).unwrap();
        let b = return_map_field(&f, 20.0, &without).unwrap();
        assert!((a.value - 20.0).abs() < 1e-8, "{}", a.value);
        assert!((a.period - b.period).abs() < 1e-9 * b.period.max(1.0));
    }

    #[test]
    fn stiff_start_inside_handover_radius() {
        // the first trial step from x = 6 overflows; it must be rejected, not accepted as NaN
        let f = FloatField::new(vec![(0, 3, -1.0), (4, 0, -1.0)], vec![(3, 0, 1.0), (5, 0, 1.0)]);
        for s in [4.15, 5.92, 8.45] {
            let r = return_map_field(&f, s, &IntegrationOptions { tol: 1e-9, ..Default::default() }).unwrap();
            assert!(r.displacement.abs() < 1e-6 * s, "{s}: {r:?}");
        }
    }

    #[test]
    fn geometric_ladder() {
        let a = geometric_amplitudes(1.0, 50.0, 12);
        assert_eq!(a.len(), 12);
        assert!((a[11] - 50.0).abs() < 1e-9);
    }
}
