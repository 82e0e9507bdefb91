//! Collinear and triangular equilibrium points.

mod series;

pub use series::{degree10_coefficients, eval_poly, series_rho, series_to_point, SeriesCase, SeriesCoefficients};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, Position};
use crate::roots;

/// Half-width of the collinear search window.
pub const X_MAX: f64 = 3.0;
/// Sampling step of the bracketing scan.
pub const SCAN_STEP: f64 = 1e-4;
/// Exclusion radius around the poles of K(x).
pub const POLE_EPS: f64 = 1e-6;
/// Target |K| when polishing a collinear root.
pub const K_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    L1,
    L2,
    L3,
    /// The additional collinear point between the radiating primary and the
    /// disk centre.
    #[serde(rename = "l1")]
    NewL1,
    L4,
    L5,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::L1 => "L1",
            Label::L2 => "L2",
            Label::L3 => "L3",
            Label::NewL1 => "l1",
            Label::L4 => "L4",
            Label::L5 => "L5",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "L1" => Label::L1,
            "L2" => Label::L2,
            "L3" => Label::L3,
            "l1" => Label::NewL1,
            "L4" => Label::L4,
            "L5" => Label::L5,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Partition of the x-axis by the two primaries and the disk centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Interval {
    /// 1 − μ < x
    Right,
    /// 0 ≤ x < 1 − μ
    MidRight,
    /// −μ < x < 0
    MidLeft,
    /// x < −μ
    Left,
    OffAxis,
}

impl Interval {
    pub const COLLINEAR: [Interval; 4] = [Interval::Right, Interval::MidRight, Interval::MidLeft, Interval::Left];

    /// Interval containing x, or `None` on a primary.
    pub fn of(x: f64, mu: f64) -> Option<Self> {
        if x > 1.0 - mu {
            Some(Interval::Right)
        } else if x >= 0.0 && x < 1.0 - mu {
            Some(Interval::MidRight)
        } else if x > -mu && x < 0.0 {
            Some(Interval::MidLeft)
        } else if x < -mu {
            Some(Interval::Left)
        } else {
            None
        }
    }

    pub fn label(self) -> Label {
        match self {
            Interval::Right => Label::L1,
            Interval::MidRight => Label::L2,
            Interval::MidLeft => Label::NewL1,
            Interval::Left => Label::L3,
            Interval::OffAxis => Label::L4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Interval::Right => "right",
            Interval::MidRight => "mid-right",
            Interval::MidLeft => "mid-left",
            Interval::Left => "left",
            Interval::OffAxis => "off-axis",
        }
    }

    /// Open search range inside [−X_MAX, X_MAX], pulled back from the poles.
    pub fn search_range(self, model: &Model) -> (f64, f64) {
        let mu = model.mu();
        let zero = if model.has_disk() { POLE_EPS } else { 0.0 };
        match self {
            Interval::Right => (1.0 - mu + POLE_EPS, X_MAX),
            Interval::MidRight => (zero, 1.0 - mu - POLE_EPS),
            Interval::MidLeft => (-mu + POLE_EPS, -zero),
            Interval::Left => (-X_MAX, -mu - POLE_EPS),
            Interval::OffAxis => (f64::NAN, f64::NAN),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    NumericRoot,
    Series,
    NewtonRefined,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::NumericRoot => "numeric",
            Method::Series => "series",
            Method::NewtonRefined => "newton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumPoint {
    pub label: Label,
    pub x: f64,
    pub y: f64,
    pub interval: Interval,
    pub method: Method,
    /// ‖∇Ω‖ at the point.
    pub residual: f64,
    /// ‖∇Ω‖ divided by the sum of the magnitudes of its terms.
    pub scaled_residual: f64,
    /// Whether x lies in the interval the point was computed for.
    pub in_interval: bool,
    /// False when an iterative refinement stopped early.
    pub converged: bool,
}

impl EquilibriumPoint {
    pub fn position(&self) -> Position {
        Position::new(self.x, self.y)
    }

    pub fn is_collinear(&self) -> bool {
        self.interval != Interval::OffAxis
    }

    pub(crate) fn build(model: &Model, label: Label, p: Position, interval: Interval, method: Method) -> Self {
        let (residual, scaled_residual) = residuals(model, p);
        let in_interval = match interval {
            Interval::OffAxis => p.y != 0.0,
            iv => p.y == 0.0 && Interval::of(p.x, model.mu()) == Some(iv),
        };
        Self { label, x: p.x, y: p.y, interval, method, residual, scaled_residual, in_interval, converged: true }
    }
}

/// (‖∇Ω‖, scaled ‖∇Ω‖); NaN at singular positions.
pub fn residuals(model: &Model, p: Position) -> (f64, f64) {
    match (model.gradient(p), model.force_scale(p)) {
        (Ok(g), Ok(s)) => (g.norm(), g.norm() / s),
        _ => (f64::NAN, f64::NAN),
    }
}

/// K(x) = Ω_x(x, 0), written branch by branch with the absolute values
/// resolved for each interval.
pub fn k_of_x(x: f64, model: &Model) -> Result<f64> {
    let p = model.params();
    let (mu, q1, a2) = (p.mu, p.q1, p.a2);
    let interval = Interval::of(x, mu).ok_or_else(|| {
        let (distance, value) = if x == -mu { ("r1", 0.0) } else { ("r2", 0.0) };
        Error::Singular { distance, value }
    })?;
    if model.has_disk() && x == 0.0 {
        return Err(Error::Singular { distance: "r", value: 0.0 });
    }
    let n2 = model.mean_motion_sq_at(Position::new(x, 0.0));
    let d1 = x + mu;
    let d2 = x + mu - 1.0;
    let m1 = (1.0 - mu) * q1 / (d1 * d1);
    let m2 = mu / (d2 * d2) + 1.5 * mu * a2 / d2.powi(4);
    let (lin, lg) = if model.has_disk() {
        (model.disk().linear / (x * x), 0.375 * model.disk().log / x.powi(3))
    } else {
        (0.0, 0.0)
    };
    Ok(match interval {
        Interval::Right => n2 * x - m1 - m2 - lin - lg,
        Interval::MidRight => n2 * x - m1 + m2 - lin - lg,
        Interval::MidLeft => n2 * x - m1 + m2 + lin - lg,
        Interval::Left => n2 * x + m1 + m2 + lin - lg,
        Interval::OffAxis => unreachable!(),
    })
}

/// K on one interval, NaN outside it.
pub fn k_branch(model: &Model, interval: Interval, x: f64) -> f64 {
    if Interval::of(x, model.mu()) != Some(interval) {
        return f64::NAN;
    }
    k_of_x(x, model).unwrap_or(f64::NAN)
}

/// Roots of K on one interval.
pub fn collinear_in(model: &Model, interval: Interval) -> Result<Vec<EquilibriumPoint>> {
    let (lo, hi) = interval.search_range(model);
    let f = |x: f64| k_branch(model, interval, x);
    let mut out = Vec::new();
    for (a, b) in roots::scan_brackets(f, lo, hi, SCAN_STEP) {
        let x = roots::polish(f, a, b, K_TOL)?;
        let pt = EquilibriumPoint::build(model, interval.label(), Position::new(x, 0.0), interval, Method::NumericRoot);
        if pt.in_interval {
            out.push(pt);
        }
    }
    Ok(out)
}

/// All collinear points, ordered Right, MidRight, MidLeft, Left. Intervals
/// without a root are simply absent.
pub fn collinear_points(model: &Model) -> Result<Vec<EquilibriumPoint>> {
    let mut out = Vec::new();
    for iv in Interval::COLLINEAR {
        out.extend(collinear_in(model, iv)?);
    }
    Ok(out)
}

/// δ₁ and δ₂ of the first-order triangular-point expansion.
pub fn triangular_deltas(model: &Model) -> (f64, f64) {
    let p = model.params();
    let (mu, q1, a2) = (p.mu, p.q1, p.a2);
    let n2 = model.mean_motion_sq();
    let s = mu * mu + q1.powf(2.0 / 3.0) * (1.0 - mu);
    let disk =
        if model.has_disk() { model.disk().linear / s.powf(1.5) + 0.375 * model.disk().log / (s * s) } else { 0.0 };
    let d1 = (1.0 - n2 + disk) / 3.0;
    let d2 = (1.0 + 1.5 * a2 - n2 + disk) / (3.0 * (1.0 + 2.5 * a2));
    (d1, d2)
}

/// First-order position of L4 (y > 0).
pub fn triangular_series(model: &Model) -> Result<Position> {
    let q1 = model.params().q1;
    let mu = model.mu();
    let (d1, d2) = triangular_deltas(model);
    let q23 = q1.powf(2.0 / 3.0);
    let x = q23 / 2.0 - mu + (q23 * d1 - d2);
    let radicand = 1.0 - q23 / 4.0 + (2.0 - q23) * d1 + d2;
    if !(radicand > 0.0) {
        return Err(Error::NoOffAxisEquilibrium(radicand));
    }
    Ok(Position::new(x, q1.cbrt() * radicand.sqrt()))
}

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;

/// Damped Newton iteration on ∇Ω = 0. Returns the last iterate and whether it
/// converged.
pub fn newton_refine(model: &Model, seed: Position) -> (Position, bool) {
    // Full steps first: the damped path can stall in curved valleys when the
    // Jacobian is nearly singular (small μ with a disk).
    let (p, ok) = newton_iterate(model, seed, false);
    if ok {
        return (p, true);
    }
    newton_iterate(model, seed, true)
}

fn newton_iterate(model: &Model, seed: Position, damped: bool) -> (Position, bool) {
    let mut p = seed;
    let mut g = match model.gradient(p) {
        Ok(g) => g,
        Err(_) => return (seed, false),
    };
    for _ in 0..NEWTON_MAX_ITER {
        let scale = model.force_scale(p).unwrap_or(1.0);
        if g.norm() <= NEWTON_TOL * scale.max(1.0) {
            return (p, true);
        }
        let Ok(h) = model.gradient_jacobian(p) else { return (p, false) };
        let det = h.xx * h.yy - h.xy * h.xy;
        if det == 0.0 || !det.is_finite() {
            return (p, false);
        }
        let dx = -(h.yy * g.x - h.xy * g.y) / det;
        let dy = -(h.xx * g.y - h.xy * g.x) / det;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = Position::new(p.x + t * dx, p.y + t * dy);
            if let Ok(gt) = model.gradient(trial) {
                if !damped || gt.norm() < g.norm() || t < 1e-6 {
                    p = trial;
                    g = gt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return (p, false);
        }
        if (t * dx).hypot(t * dy) <= NEWTON_TOL * p.norm().max(1.0) {
            let scale = model.force_scale(p).unwrap_or(1.0);
            return (p, g.norm() <= 1e-9 * scale.max(1.0));
        }
    }
    let scale = model.force_scale(p).unwrap_or(1.0);
    (p, g.norm() <= NEWTON_TOL * scale.max(1.0))
}

/// Smallest y accepted as an off-axis equilibrium.
pub const OFF_AXIS_MIN_Y: f64 = 1e-6;

/// Newton refinement of an upper-half-plane equilibrium. When the seed does
/// not converge, the best cells of a polar grid around the radiating primary
/// are tried and the converged point closest to the seed is kept.
pub fn refine_off_axis(model: &Model, seed: Position) -> (Position, bool) {
    let off_axis = |q: Position| q.y > OFF_AXIS_MIN_Y;
    let (p, ok) = newton_refine(model, seed);
    if ok && off_axis(p) {
        return (p, true);
    }
    let mu = model.mu();
    let mut cells: Vec<(f64, Position)> = Vec::new();
    for i in 0..=65 {
        let rho = 0.3 + 0.02 * i as f64;
        for j in 1..90 {
            let th = (2.0 * j as f64).to_radians();
            let q = Position::new(-mu + rho * th.cos(), rho * th.sin());
            let (_, scaled) = residuals(model, q);
            if scaled.is_finite() {
                cells.push((scaled, q));
            }
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let best = cells
        .iter()
        .take(40)
        .map(|&(_, q)| newton_refine(model, q))
        .filter(|&(q, ok)| ok && off_axis(q))
        .map(|(q, _)| q)
        .min_by(|a, b| (a.x - seed.x).hypot(a.y - seed.y).total_cmp(&(b.x - seed.x).hypot(b.y - seed.y)));
    match best {
        Some(q) => (q, true),
        None => (p, false),
    }
}

/// L4 and L5, both from the first-order expansion and after Newton refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangularPoints {
    pub series: [EquilibriumPoint; 2],
    pub refined: [EquilibriumPoint; 2],
}

impl TriangularPoints {
    pub fn l4(&self) -> &EquilibriumPoint {
        &self.refined[0]
    }

    pub fn l5(&self) -> &EquilibriumPoint {
        &self.refined[1]
    }
}

pub fn triangular_points(model: &Model) -> Result<TriangularPoints> {
    let seed = triangular_series(model)?;
    let series_l4 = EquilibriumPoint::build(model, Label::L4, seed, Interval::OffAxis, Method::Series);
    let series = [series_l4, mirror(series_l4)];

    let (p, converged) = refine_off_axis(model, seed);
    let mut l4 = EquilibriumPoint::build(model, Label::L4, p, Interval::OffAxis, Method::NewtonRefined);
    l4.converged = converged;
    Ok(TriangularPoints { series, refined: [l4, mirror(l4)] })
}

/// Image of L4 under y → −y.
pub fn mirror(p: EquilibriumPoint) -> EquilibriumPoint {
    EquilibriumPoint { label: Label::L5, y: -p.y, ..p }
}

/// Every equilibrium: numeric collinear roots, refined L4/L5, and the series
/// estimates that can be evaluated for these parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllPoints {
    pub collinear: Vec<EquilibriumPoint>,
    pub triangular: Option<TriangularPoints>,
    pub series: Vec<EquilibriumPoint>,
    /// Series cases that could not be evaluated, with the reason.
    pub series_skipped: Vec<(SeriesCase, String)>,
}

pub fn all_points(model: &Model) -> Result<AllPoints> {
    let collinear = collinear_points(model)?;
    let triangular = match triangular_points(model) {
        Ok(t) => Some(t),
        Err(Error::NoOffAxisEquilibrium(_)) => None,
        Err(e) => return Err(e),
    };
    let mut series = Vec::new();
    let mut series_skipped = Vec::new();
    for case in SeriesCase::ALL {
        match series_rho(case, model).map(|(rho, _)| series_to_point(case, rho, model)) {
            Ok(p) => series.push(p),
            Err(e) => series_skipped.push((case, e.to_string())),
        }
    }
    Ok(AllPoints { collinear, triangular, series, series_skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MeanMotion, SystemParams};

    fn preset() -> Model {
        Model::new(SystemParams::paper()).unwrap()
    }

    #[test]
    fn preset_collinear_points() {
        let pts = collinear_points(&preset()).unwrap();
        let got: Vec<(Label, f64)> = pts.iter().map(|p| (p.label, p.x)).collect();
        assert_eq!(got.len(), 4, "{got:?}");
        let expected =
            [(Label::L1, 1.05667), (Label::L2, 0.813609), (Label::NewL1, -0.000879106), (Label::L3, -0.823420)];
        for ((l, x), (el, ex)) in got.iter().zip(expected) {
            assert_eq!(*l, el);
            let tol = if el == Label::NewL1 { 1e-8 } else { 1e-3 };
            assert!((x - ex).abs() < tol, "{l}: {x} vs {ex}");
        }
        for p in &pts {
            assert!(p.scaled_residual < 1e-12, "{p:?}");
            assert!(p.in_interval);
        }
    }

    #[test]
    fn sign_change_across_each_root() {
        let m = preset();
        for p in collinear_points(&m).unwrap() {
            let h = 1e-7 * p.x.abs().max(1e-3);
            let a = k_of_x(p.x - h, &m).unwrap();
            let b = k_of_x(p.x + h, &m).unwrap();
            assert!(a * b < 0.0, "{:?}", p.label);
        }
    }

    #[test]
    fn classical_has_no_mid_left_point() {
        let m = Model::new(SystemParams::classical(0.000953728)).unwrap();
        let pts = collinear_points(&m).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| p.interval != Interval::MidLeft));
        for p in &pts {
            assert!(p.residual < 1e-10);
        }
    }

    #[test]
    fn k_matches_gradient() {
        let m = preset();
        for x in [-2.0, -0.5, -0.0005, 0.3, 0.99, 1.3] {
            let k = k_of_x(x, &m).unwrap();
            let g = m.gradient(Position::new(x, 0.0)).unwrap().x;
            assert!((k - g).abs() <= 1e-12 * g.abs().max(1.0), "{x}: {k} vs {g}");
        }
    }

    #[test]
    fn k_singularities() {
        let m = preset();
        assert!(k_of_x(-m.mu(), &m).is_err());
        assert!(k_of_x(1.0 - m.mu(), &m).is_err());
        assert!(k_of_x(0.0, &m).is_err());
        let classical = Model::new(SystemParams::classical(0.01)).unwrap();
        assert!(k_of_x(0.0, &classical).is_ok());
    }

    #[test]
    fn classical_triangular_point() {
        let mu = 0.01;
        let m = Model::new(SystemParams::classical(mu)).unwrap();
        assert_eq!(triangular_deltas(&m), (0.0, 0.0));
        let t = triangular_points(&m).unwrap();
        let s = t.series[0];
        assert!((s.x - (0.5 - mu)).abs() < 1e-15 && (s.y - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let l4 = t.l4();
        assert!(l4.converged);
        assert!((l4.x - (0.5 - mu)).abs() < 1e-12 && (l4.y - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn preset_triangular_points_are_equilibria() {
        for mode in [MeanMotion::Frozen, MeanMotion::Local] {
            let mut p = SystemParams::paper();
            p.mean_motion = mode;
            let m = Model::new(p).unwrap();
            let t = triangular_points(&m).unwrap();
            assert!(t.l4().converged);
            assert!(t.l4().residual < 1e-10);
            assert_eq!(t.l5().x, t.l4().x);
            assert_eq!(t.l5().y, -t.l4().y);
            assert_eq!(t.series[1].y, -t.series[0].y);
        }
    }

    #[test]
    fn interval_membership() {
        let mu = 0.1;
        assert_eq!(Interval::of(0.95, mu), Some(Interval::Right));
        assert_eq!(Interval::of(0.0, mu), Some(Interval::MidRight));
        assert_eq!(Interval::of(-0.05, mu), Some(Interval::MidLeft));
        assert_eq!(Interval::of(-0.2, mu), Some(Interval::Left));
        assert_eq!(Interval::of(-0.1, mu), None);
        assert_eq!(Interval::of(0.9, mu), None);
    }

    #[test]
    fn label_round_trip() {
        for l in [Label::L1, Label::L2, Label::L3, Label::NewL1, Label::L4, Label::L5] {
            assert_eq!(Label::parse(l.as_str()), Some(l));
        }
    }
}
