//! Linear stability of equilibria and the parameter scans built on it.

mod scans;

pub use scans::{
    critical_mass, critical_mass_curve, critical_mass_curves, stability_band_scan, BandSample, BandScan, CriticalMass,
    CriticalMassCurve, CurveSample, CURVE_A2, CURVE_Q1,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::equilibria::{residuals, triangular_points, EquilibriumPoint};
use crate::error::{Error, Result};
use crate::model::{Hessian, Model, Position, SystemParams};

/// Real parts up to this size count as zero.
pub const MARGINAL_RE: f64 = 1e-12;
/// Largest scaled ‖∇Ω‖ accepted as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-8;

/// λ⁴ + pλ² + q = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartic {
    pub p: f64,
    pub q: f64,
    /// n² of the linearisation.
    pub n_sq: f64,
    pub hessian: Hessian,
}

impl Quartic {
    pub fn discriminant(&self) -> f64 {
        self.p * self.p - 4.0 * self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub point: EquilibriumPoint,
    pub quartic: Quartic,
    pub lambdas: [Complex64; 4],
    pub verdict: Verdict,
    pub discriminant: f64,
    /// Sign of Ω⁰_xx (−1, 0 or 1).
    pub sign_xx: i8,
    /// Sign of Ω⁰_yy (−1, 0 or 1).
    pub sign_yy: i8,
}

impl StabilityReport {
    pub fn max_re(&self) -> f64 {
        max_re(&self.lambdas)
    }
}

pub fn max_re(l: &[Complex64; 4]) -> f64 {
    l.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Second partials at a point of the x-axis from the reduced collinear forms.
pub fn collinear_hessian(model: &Model, x: f64) -> Result<Hessian> {
    let p = model.params();
    let (mu, q1, a2) = (p.mu, p.q1, p.a2);
    let d = model.distances(Position::new(x, 0.0))?;
    let n2 = model.mean_motion_sq_at(Position::new(x, 0.0));
    let m1 = q1 * (1.0 - mu);
    let (lin, lg) = if model.has_disk() { (model.disk().linear, model.disk().log) } else { (0.0, 0.0) };
    let (r3, r4) = if model.has_disk() { (d.r.powi(3), d.r.powi(4)) } else { (1.0, 1.0) };
    Ok(Hessian {
        xx: n2
            + 2.0 * m1 / d.r1.powi(3)
            + 2.0 * mu / d.r2.powi(3)
            + 6.0 * mu * a2 / d.r2.powi(5)
            + 2.0 * lin / r3
            + 1.125 * lg / r4,
        yy: n2 - m1 / d.r1.powi(3) - mu / d.r2.powi(3) - 1.5 * mu * a2 / d.r2.powi(5) - lin / r3 - 0.375 * lg / r4,
        xy: 0.0,
    })
}

/// (p, q) of the characteristic equation at an equilibrium. With a local mean
/// motion the rate is frozen at the point's radius first.
pub fn characteristic_coefficients(point: &EquilibriumPoint, model: &Model) -> Result<Quartic> {
    let pos = point.position();
    let (_, scaled) = residuals(model, pos);
    if !(scaled < EQUILIBRIUM_TOL) {
        return Err(Error::NotEquilibrium(scaled));
    }
    let lin = model.linearized_at(pos)?;
    let h = if pos.y == 0.0 { collinear_hessian(&lin, pos.x)? } else { lin.hessian(pos)? };
    let n_sq = lin.mean_motion_sq();
    Ok(Quartic { p: 4.0 * n_sq - h.xx - h.yy, q: h.xx * h.yy - h.xy * h.xy, n_sq, hessian: h })
}

/// The four roots of λ⁴ + pλ² + q, as ±√λ²₊ and ±√λ²₋.
pub fn solve_quartic(p: f64, q: f64) -> [Complex64; 4] {
    let s = Complex64::new(p * p - 4.0 * q, 0.0).sqrt();
    let plus = (Complex64::new(-p, 0.0) + s) / 2.0;
    let minus = (Complex64::new(-p, 0.0) - s) / 2.0;
    let l1 = plus.sqrt();
    let l3 = minus.sqrt();
    [l1, -l1, l3, -l3]
}

pub fn verdict_of(lambdas: &[Complex64; 4]) -> Verdict {
    if max_re(lambdas) <= MARGINAL_RE {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

pub fn classify(point: &EquilibriumPoint, model: &Model) -> Result<StabilityReport> {
    let quartic = characteristic_coefficients(point, model)?;
    let lambdas = solve_quartic(quartic.p, quartic.q);
    Ok(StabilityReport {
        point: *point,
        quartic,
        lambdas,
        verdict: verdict_of(&lambdas),
        discriminant: quartic.discriminant(),
        sign_xx: sign(quartic.hessian.xx),
        sign_yy: sign(quartic.hessian.yy),
    })
}

/// Closed-form p and q at L4 next to the values from the Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L4Condition {
    pub l4: EquilibriumPoint,
    pub p_l4: f64,
    pub q_l4: f64,
    pub gamma0: f64,
    /// (p, q) from [`characteristic_coefficients`] at the same point.
    pub direct: Quartic,
}

impl L4Condition {
    /// The closed-form stability inequality p² > 4q.
    pub fn closed_form_stable(&self) -> bool {
        self.p_l4 * self.p_l4 > 4.0 * self.q_l4
    }
}

pub fn l4_condition_terms(model: &Model) -> Result<L4Condition> {
    let l4 = *triangular_points(model)?.l4();
    let pos = l4.position();
    let lin = model.linearized_at(pos)?;
    let SystemParams { mu, q1, a2, disk, pi_mode, .. } = *model.params();
    let d = lin.distances(pos)?;
    let n2 = lin.mean_motion_sq();
    let (width, ln, chpi) = if model.has_disk() {
        ((disk.b - disk.a) / (disk.a * disk.b), (disk.b / disk.a).ln(), disk.c(pi_mode) * disk.h * pi_mode.value())
    } else {
        (0.0, 0.0, 0.0)
    };
    let lg = chpi * ln;
    let r4 = if model.has_disk() { d.r.powi(4) } else { 1.0 };
    let p_l4 = n2 - 3.0 * mu * a2 / d.r2.powi(5) - 0.375 * lg / r4;

    let obl = 1.0 + 5.0 * a2 / (2.0 * d.r2 * d.r2);
    let disk_bracket = if model.has_disk() { 2.0 * width + ln / (2.0 * d.r) } else { 0.0 };
    let r5 = d.r.powi(5);
    let mut gamma0 = q1 / (d.r1.powi(5) * d.r2.powi(5)) * obl;
    if model.has_disk() {
        gamma0 +=
            q1 * mu / (d.r1.powi(5) * r5) * disk_bracket + chpi * (1.0 - mu) / (r5 * d.r2.powi(5)) * obl * disk_bracket;
    }
    gamma0 *= pos.y * pos.y;
    let q_l4 = 9.0 * mu * (1.0 - mu) * gamma0;
    let direct = characteristic_coefficients(&l4, model)?;
    Ok(L4Condition { l4, p_l4, q_l4, gamma0, direct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{collinear_points, Label};
    use crate::model::MeanMotion;

    #[test]
    fn quartic_examples() {
        let l = solve_quartic(2.0, 1.0);
        for z in l {
            assert!(z.re.abs() < 1e-15 && (z.im.abs() - 1.0).abs() < 1e-8);
        }
        let mu: f64 = 0.01;
        let l = solve_quartic(1.0, 6.75 * mu * (1.0 - mu));
        assert_eq!(verdict_of(&l), Verdict::Stable);
        assert!(l.iter().all(|z| z.re == 0.0));
        let l = solve_quartic(1.0, -0.5);
        assert_eq!(verdict_of(&l), Verdict::Unstable);
        assert!(l.iter().any(|z| z.re > 0.0 && z.im == 0.0));
    }

    #[test]
    fn roots_pair_up() {
        for (p, q) in [(1.0, 0.1), (-3.0, 2.0), (0.5, 4.0), (1.0, -1.0)] {
            let l = solve_quartic(p, q);
            assert_eq!(l[0], -l[1]);
            assert_eq!(l[2], -l[3]);
            for z in l {
                let r = z.powu(4) + p * z.powu(2) + q;
                assert!(r.norm() < 1e-10, "{p} {q} {z}");
            }
        }
    }

    #[test]
    fn classical_l4_coefficients() {
        for (mu, v) in [(0.03, Verdict::Stable), (0.04, Verdict::Unstable)] {
            let m = Model::new(SystemParams::classical(mu)).unwrap();
            let l4 = *triangular_points(&m).unwrap().l4();
            let q = characteristic_coefficients(&l4, &m).unwrap();
            assert!((q.p - 1.0).abs() < 1e-10);
            assert!((q.q - 6.75 * mu * (1.0 - mu)).abs() < 1e-10);
            assert_eq!(classify(&l4, &m).unwrap().verdict, v);
        }
    }

    #[test]
    fn collinear_shortcut_matches_general_hessian() {
        let m = Model::new(SystemParams::paper()).unwrap();
        for pt in collinear_points(&m).unwrap() {
            let lin = m.linearized_at(pt.position()).unwrap();
            let s = collinear_hessian(&lin, pt.x).unwrap();
            let g = lin.hessian(pt.position()).unwrap();
            let scale = lin.force_scale(pt.position()).unwrap() / pt.x.abs().min(1.0);
            assert!((s.xx - g.xx).abs() <= 1e-10 * scale, "{:?}", pt.label);
            assert!((s.yy - g.yy).abs() <= 1e-10 * scale, "{:?}", pt.label);
            assert_eq!(g.xy, 0.0);
        }
    }

    #[test]
    fn preset_collinear_points_are_unstable() {
        for mode in [MeanMotion::Frozen, MeanMotion::Local] {
            let mut p = SystemParams::paper();
            p.mean_motion = mode;
            let m = Model::new(p).unwrap();
            for pt in collinear_points(&m).unwrap() {
                let r = classify(&pt, &m).unwrap();
                assert_eq!(r.quartic.hessian.xy, 0.0);
                assert_eq!(r.quartic.q, r.quartic.hessian.xx * r.quartic.hessian.yy);
                if matches!(pt.label, Label::L1 | Label::NewL1) {
                    assert_eq!(r.verdict, Verdict::Unstable);
                }
            }
        }
    }

    #[test]
    fn rejects_non_equilibrium() {
        let m = Model::new(SystemParams::classical(0.01)).unwrap();
        let mut l4 = *triangular_points(&m).unwrap().l4();
        l4.x += 0.1;
        assert!(matches!(characteristic_coefficients(&l4, &m), Err(Error::NotEquilibrium(_))));
    }

    #[test]
    fn classical_closed_form() {
        let mu = 0.02;
        let m = Model::new(SystemParams::classical(mu)).unwrap();
        let c = l4_condition_terms(&m).unwrap();
        assert!((c.p_l4 - 1.0).abs() < 1e-12);
        assert!((c.q_l4 - 6.75 * mu * (1.0 - mu)).abs() < 1e-10);
        assert!((c.q_l4 - c.direct.q).abs() < 1e-10);
        assert!(c.closed_form_stable());
    }

    #[test]
    fn time_rescaling_keeps_verdict() {
        for (p, q) in [(1.0, 0.1), (1.0, 0.3), (0.2, -0.1)] {
            let k: f64 = 3.7;
            let base = verdict_of(&solve_quartic(p, q));
            let scaled = solve_quartic(k * k * p, k.powi(4) * q);
            assert_eq!(base, verdict_of(&scaled));
        }
    }
}
