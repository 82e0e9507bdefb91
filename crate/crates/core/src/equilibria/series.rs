//! Degree-10 collinear polynomials in ρ and their μ^{1/4} series roots.
//!
//! ρ is the offset of the point from the oblate primary. Coefficients are kept
//! exactly as derived term by term, with two corrections: the μ factor on the
//! −8(296n² + q1 − 1) group of the left-hand polynomial's ρ⁷ coefficient, and
//! the π in the ln(b/a) cross term of d₃. Without the former the μ = 0 limit
//! does not factor as (ρ − 2)⁴(ρ − 1)²(…); the latter is the only place where
//! c and h appear without π.

use serde::Serialize;

use super::{EquilibriumPoint, Interval, Method};
use crate::error::{Error, Result};
use crate::model::{Model, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SeriesCase {
    /// 1 − μ < x
    Case1,
    /// 0 ≤ x < 1 − μ
    Case2i,
    /// −μ < x < 0
    Case2ii,
    /// x < −μ
    Case3,
}

impl SeriesCase {
    pub const ALL: [SeriesCase; 4] = [SeriesCase::Case1, SeriesCase::Case2i, SeriesCase::Case2ii, SeriesCase::Case3];

    pub fn interval(self) -> Interval {
        match self {
            SeriesCase::Case1 => Interval::Right,
            SeriesCase::Case2i => Interval::MidRight,
            SeriesCase::Case2ii => Interval::MidLeft,
            SeriesCase::Case3 => Interval::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SeriesCase::Case1 => "1",
            SeriesCase::Case2i => "2i",
            SeriesCase::Case2ii => "2ii",
            SeriesCase::Case3 => "3",
        }
    }
}

impl std::fmt::Display for SeriesCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "case {}", self.as_str())
    }
}

/// Quantities shared by all the coefficient formulas.
struct Consts {
    mu: f64,
    q1: f64,
    a2: f64,
    n2: f64,
    /// chπ (b − a)/(ab)
    w: f64,
    /// chπ ln(b/a)
    lg: f64,
    a: f64,
    b: f64,
    /// chπ
    k: f64,
    ln: f64,
}

impl Consts {
    fn new(model: &Model) -> Self {
        let p = model.params();
        let disk = &p.disk;
        let k = if disk.a == disk.b { 0.0 } else { disk.c(p.pi_mode) * disk.h * p.pi_mode.value() };
        let coeffs = model.disk();
        Self {
            mu: p.mu,
            q1: p.q1,
            a2: p.a2,
            n2: model.mean_motion_sq(),
            w: coeffs.linear / 2.0,
            lg: coeffs.log,
            a: disk.a,
            b: disk.b,
            k,
            ln: (disk.b / disk.a).ln(),
        }
    }
}

/// Coefficients of the degree-10 polynomial in ρ for one case, in ascending
/// order (index i multiplies ρ^i). The mean motion is taken at the reference
/// radius.
pub fn degree10_coefficients(case: SeriesCase, model: &Model) -> [f64; 11] {
    let c = Consts::new(model);
    match case {
        SeriesCase::Case3 => case3(&c),
        _ => inner_cases(case, &c),
    }
}

fn inner_cases(case: SeriesCase, c: &Consts) -> [f64; 11] {
    let Consts { mu, q1, a2, n2, w, lg, .. } = *c;
    let (mu2, mu3, mu4) = (mu * mu, mu.powi(3), mu.powi(4));

    let b1 = 48.0 * n2 - 32.0 * n2 * mu;
    let b2 = 120.0 * n2 - 160.0 * n2 * mu + 48.0 * n2 * mu2;
    let b3 = 160.0 * n2 - 8.0 * q1 + 8.0 * (-40.0 * n2 + q1) * mu + 192.0 * n2 * mu2 - 32.0 * n2 * mu3;
    let b4 = 120.0 * n2 - 3.0 * lg - 24.0 * q1 + 16.0 * (3.0 * q1 - 20.0 * n2) * mu + 24.0 * (-q1 + 12.0 * n2) * mu2
        - 96.0 * mu3
        + 8.0 * n2 * mu4;
    let b5 = 48.0 * n2 - 6.0 * lg - 24.0 * q1 - 4.0 * (40.0 * n2 + 3.0 * a2 - 18.0 * q1) * mu
        + 24.0 * (8.0 * n2 - 3.0 * q1) * mu2
        + 24.0 * (-4.0 * n2 + q1) * mu3
        + 16.0 * n2 * mu4;
    let b6 = 8.0 * n2 - 3.0 * lg - 8.0 * q1 - 4.0 * (8.0 * n2 + 15.0 * a2 - 8.0 * q1) * mu
        + 12.0 * (4.0 * n2 + 3.0 * a2 - 4.0 * q1) * mu2
        + 32.0 * (-n2 + q1) * mu3
        + 8.0 * (n2 - q1) * mu4;
    let b7 = -40.0 * (1.0 + 3.0 * a2) * mu + 48.0 * (2.0 + 3.0 * a2) * mu2 - 36.0 * (2.0 + a2) * mu3 + 16.0 * mu4;
    let b8 = -8.0 * (1.0 + 15.0 * a2) * mu + 24.0 * (1.0 + 9.0 * a2) * mu2 - 12.0 * (2.0 + 9.0 * a2) * mu3
        + 4.0 * (2.0 + 3.0 * a2) * mu4;
    let b9 = -60.0 * a2 * mu + 144.0 * a2 * mu2 - 108.0 * a2 * mu3 + 24.0 * a2 * mu4;
    let b10 = -12.0 * a2 * mu + 36.0 * a2 * mu2 - 36.0 * a2 * mu3 + 12.0 * a2 * mu4;

    let (r7, r6, r5, r4, odd) = match case {
        SeriesCase::Case1 => (
            b3 - 16.0 * w - 8.0 * mu,
            b4 - 48.0 * w + 8.0 * (2.0 * w - 5.0) * mu + 24.0 * mu2,
            b5 - 48.0 * w + 16.0 * (2.0 * w - 5.0) * mu + 96.0 * mu2 - 24.0 * mu3,
            b6 - 16.0 * w + 16.0 * (w - 5.0) * mu + 144.0 * mu2 - 72.0 * mu3 + 8.0 * mu4,
            1.0,
        ),
        SeriesCase::Case2i => (
            -b3 + 16.0 * w - 8.0 * mu,
            b4 - 48.0 * w + 8.0 * (16.0 * w + 5.0) * mu - 24.0 * mu2,
            -b5 + 48.0 * w - 16.0 * (2.0 * w + 5.0) * mu + 96.0 * mu2 - 24.0 * mu3,
            b6 - 16.0 * w + 16.0 * (16.0 * w - 5.0) * mu - 144.0 * mu2 + 72.0 * mu3 - 8.0 * mu4,
            -1.0,
        ),
        SeriesCase::Case2ii => (
            -b3 - 16.0 * w - 8.0 * mu,
            b4 + 48.0 * w - 8.0 * (2.0 * w - 5.0) * mu - 24.0 * mu2,
            -b5 - 48.0 * w + 16.0 * (2.0 * w - 5.0) * mu + 96.0 * mu2 - 24.0 * mu3,
            b6 + 16.0 * w - 16.0 * (w - 5.0) * mu - 144.0 * mu2 + 72.0 * mu3 - 8.0 * mu4,
            -1.0,
        ),
        SeriesCase::Case3 => unreachable!(),
    };
    [b10, odd * b9, b8, odd * b7, r4, r5, r6, r7, b2, odd * b1, 8.0 * n2]
}

fn case3(c: &Consts) -> [f64; 11] {
    let Consts { mu, q1, a2, n2, w, lg, .. } = *c;
    let (mu2, mu3, mu4) = (mu * mu, mu.powi(3), mu.powi(4));

    let b1 = -112.0 * n2 - 32.0 * n2 * mu;
    let b2 = 696.0 * n2 + 416.0 * n2 * mu + 48.0 * n2 * mu2;
    let b3 = -2528.0 * n2 + 16.0 * w + 8.0 * q1 - 8.0 * (296.0 * n2 + q1 - 1.0) * mu;
    let b4 = 5944.0 * n2 - 176.0 * w - 3.0 * lg - 88.0 * q1
        + 8.0 * (968.0 * n2 - 16.0 * w - 8.0 * q1 - 9.0) * mu
        + 24.0 * (124.0 * n2 + q1 - 1.0) * mu2
        + 352.0 * n2 * mu3
        + 8.0 * n2 * mu4;
    let b5 = -9456.0 * n2
        + 816.0 * w
        + 30.0 * lg
        + 408.0 * q1
        + 4.0 * (-4008.0 * n2 + 40.0 * w + 3.0 * a2 - 42.0 * q1 + 68.0) * mu
        - 8.0 * (1080.0 * n2 + 27.0 * q1 - 24.0) * mu2
        - 24.0 * (68.0 * n2 + q1 - 1.0) * mu3
        - 80.0 * n2 * mu4;
    let b6 = 10312.0 * n2 - 2064.0 * w - 123.0 * lg - 1032.0 * q1
        + 4.0 * (5448.0 * n2 - 164.0 * w - 15.0 * a2 + 12.0 * q1 - 140.0) * mu
        + 12.0 * (1284.0 * n2 - 3.0 * a2 - 64.0 * q1 - 52.0) * mu2
        + 8.0 * (516.0 * n2 + 26.0 * q1 - 21.0) * mu3
        + 8.0 * (41.0 * n2 + q1 - 1.0) * mu4;
    let b7 = -7616.0 * n2
        + 3072.0 * w
        + 264.0 * lg
        + 1536.0 * q1
        + 8.0 * (2432.0 * n2 + 176.0 * w + 15.0 * a2 + 72.0 * q1 + 85.0) * mu
        + 4.0 * (-4320.0 * n2 + 36.0 * a2 + 336.0 * q1 + 264.0) * mu2
        + 4.0 * (-1536.0 * n2 + 9.0 * a2 - 176.0 * q1 + 114.0) * mu3
        - 16.0 * (44.0 * n2 + 4.0 * q1 - 3.0) * mu4;
    let b8 = 3648.0 * n2 - 2688.0 * w - 312.0 * lg - 1344.0 * q1
        + 8.0 * (1376.0 * n2 - 208.0 * w - 15.0 * a2 - 144.0 * q1 - 61.0) * mu
        + 8.0 * (1488.0 * n2 - 27.0 * a2 + 144.0 * q1 - 123.0) * mu2
        + 4.0 * (1344.0 * n2 - 27.0 * a2 + 288.0 * q1 - 150.0) * mu3
        + 4.0 * (208.0 * n2 - 3.0 * a2 + 48.0 * q1 - 13.0) * mu4;
    let b9 = -1024.0 * n2
        + 1280.0 * w
        + 192.0 * lg
        + 640.0 * q1
        + 4.0 * (-896.0 * n2 + 256.0 * w + 15.0 * a2 + 224.0 * q1 + 48.0) * mu
        + 8.0 * (-576.0 * n2 + 18.0 * a2 - 48.0 * q1 + 60.0) * mu2
        + 4.0 * (-640.0 * n2 + 27.0 * a2 - 224.0 * q1 + 96.0) * mu3
        + 8.0 * (-64.0 * n2 + 3.0 * a2 - 32.0 * q1 + 12.0) * mu4;
    let b10 = 128.0 * n2 - 256.0 * w - 48.0 * lg - 128.0 * q1
        + 4.0 * (128.0 * n2 - 64.0 * w - 3.0 * a2 - 64.0 * q1 - 8.0) * mu
        + 12.0 * (64.0 * n2 - 3.0 * a2 - 8.0) * mu2
        + 4.0 * (128.0 * n2 - 9.0 * a2 + 64.0 * q1 - 24.0) * mu3
        + 4.0 * (32.0 * n2 - 3.0 * a2 + 32.0 * q1 - 8.0) * mu4;
    [b10, b9, b8, b7, b6, b5, b4, b3, b2, b1, 8.0 * n2]
}

/// Evaluate an ascending coefficient vector.
pub fn eval_poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesCoefficients {
    pub case: SeriesCase,
    /// α₁..α₄
    pub alpha: [f64; 4],
    /// d₁..d₆
    pub d: [f64; 6],
    /// 12abA₂/d₁
    pub alpha_base: f64,
}

fn d_values(case: SeriesCase, c: &Consts) -> [f64; 6] {
    let Consts { q1, n2, a, b, k, ln, .. } = *c;
    let ab = a * b;
    let bma = b - a;
    let kl = k * ln;
    let n4 = n2 * n2;
    let n6 = n4 * n2;
    let (ab2, k2, bma2) = (ab * ab, k * k, bma * bma);

    // d₃ and d₅ of the right-hand and mid-right cases.
    let d3_r = 448.0 * ab2 * n4 - 6656.0 * a * a * n2 * k * bma
        + 1024.0 * k2 * bma2
        + 135.0 * ab2 * kl * kl
        + 144.0 * ab * k * (15.0 * ab * n2 + 4.0 * k * bma) * ln;
    let d5_r = 512.0 * ab2 * n6 - 16384.0 * a * a * n4 * k * bma
        + 20480.0 * n2 * k2 * bma2
        + 5952.0 * ab2 * n4 * kl
        + 2232.0 * ab2 * n2 * kl * kl
        - 27.0 * ab2 * kl.powi(3)
        + 12288.0 * ab * n2 * k2 * bma * ln;
    // d₃ and d₅ of the mid-left and left cases.
    let d3_l = 448.0 * ab2 * n4 - 6656.0 * ab * n2 * k * bma
        + 1024.0 * k2 * bma2
        + 135.0 * ab2 * kl * kl
        + 144.0 * ab * k * (15.0 * ab * n2 - 4.0 * k * bma) * ln;
    let d5_l = 512.0 * ab2 * n6 - 16384.0 * ab * n4 * k * bma
        + 20480.0 * n2 * k2 * bma2
        + 5952.0 * ab2 * n4 * kl
        + 2232.0 * ab2 * n2 * kl * kl
        + 27.0 * ab2 * kl.powi(3)
        - 12288.0 * ab * n2 * k2 * bma * ln;

    match case {
        SeriesCase::Case1 | SeriesCase::Case2i => [
            8.0 * ab * n2 - 16.0 * k * bma - 3.0 * ab * kl - 8.0 * ab * q1,
            8.0 * ab * n2 + 32.0 * k * bma + 9.0 * ab * kl + 16.0 * ab * q1,
            d3_r,
            32.0 * ab * (104.0 * ab * n2 + 32.0 * k * bma + 9.0 * ab * q1 * kl) + 256.0 * ab2 * q1 * q1,
            d5_r,
            2048.0 * ab * n2 * (4.0 * ab * n2 + 10.0 * b * k * bma + 3.0 * ab * kl) * q1 + 5120.0 * ab2 * n2 * q1 * q1,
        ],
        SeriesCase::Case2ii => [
            8.0 * ab * n2 + 16.0 * k * bma - 3.0 * ab * kl - 8.0 * ab * q1,
            8.0 * ab * n2 - 32.0 * a * k * bma + 9.0 * ab * kl + 16.0 * ab * q1,
            d3_l,
            32.0 * ab * (104.0 * ab * n2 - 32.0 * k * bma + 9.0 * ab * kl) * q1 + 256.0 * ab2 * q1 * q1,
            d5_l,
            2048.0 * ab * n2 * (4.0 * ab * n2 - 10.0 * k * bma + 3.0 * ab * kl) * q1 + 5120.0 * ab2 * n2 * q1 * q1,
        ],
        SeriesCase::Case3 => [
            8.0 * ab * n2 + 16.0 * k * bma - 3.0 * ab * kl + 8.0 * ab * q1,
            -8.0 * ab * n2 + 32.0 * k * bma - 9.0 * ab * kl + 16.0 * ab * q1,
            d3_l,
            -32.0 * ab * (104.0 * ab * n2 - 32.0 * k * bma + 9.0 * ab * kl) * q1 + 256.0 * ab2 * q1 * q1,
            d5_l,
            -2048.0 * ab * n2 * (4.0 * ab * n2 - 10.0 * k * bma + 3.0 * ab * kl) * q1 + 5120.0 * ab2 * n2 * q1 * q1,
        ],
    }
}

/// ρ from the series truncated after the μ term, taking the + branch of α₁
/// and α₃. The left-hand case adds the constant 2.
pub fn series_rho(case: SeriesCase, model: &Model) -> Result<(f64, SeriesCoefficients)> {
    let c = Consts::new(model);
    if c.a2 == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let d = d_values(case, &c);
    let [d1, d2, d3, d4, d5, d6] = d;
    if d1 == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let ab = c.a * c.b;
    let alpha_base = 12.0 * ab * c.a2 / d1;
    let base = if case == SeriesCase::Case2i { -alpha_base } else { alpha_base };
    if base < 0.0 {
        return Err(Error::Branch(base));
    }
    let q = base.powf(0.25);
    let alpha = [
        q / d1,
        d2 / (4.0 * d1) * q * q,
        (d1 * d1 + 3.0 * c.a2 * (d3 + d4)) / (6.0 * c.a2 * d1 * d1) * q.powi(3),
        -(2.0 * d1 * d1 * d2 + 3.0 * ab * c.a2 * (d5 + d6)) / (12.0 * c.a2 * d1.powi(3)) * base,
    ];
    let m = c.mu.powf(0.25);
    let mut rho = alpha[0] * m + alpha[1] * m * m + alpha[2] * m.powi(3) + alpha[3] * c.mu;
    if case == SeriesCase::Case3 {
        rho += 2.0;
    }
    Ok((rho, SeriesCoefficients { case, alpha, d, alpha_base }))
}

/// Abscissa for a series ρ: 1 − μ + ρ on the right of the oblate primary and
/// 1 − μ − ρ everywhere else.
pub fn series_x(case: SeriesCase, rho: f64, mu: f64) -> f64 {
    match case {
        SeriesCase::Case1 => 1.0 - mu + rho,
        _ => 1.0 - mu - rho,
    }
}

/// The series point. Its `in_interval` flag is false when x falls outside the
/// case's interval; the point is returned regardless.
pub fn series_to_point(case: SeriesCase, rho: f64, model: &Model) -> EquilibriumPoint {
    let x = series_x(case, rho, model.mu());
    EquilibriumPoint::build(model, case.interval().label(), Position::new(x, 0.0), case.interval(), Method::Series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::collinear_points;
    use crate::model::{MeanMotion, SystemParams};

    fn model(mu: f64, mode: MeanMotion) -> Model {
        let mut p = SystemParams::paper();
        p.mu = mu;
        p.mean_motion = mode;
        Model::new(p).unwrap()
    }

    fn scaled(c: &[f64], x: f64) -> f64 {
        let mag: f64 = c.iter().enumerate().map(|(i, ci)| (ci * x.powi(i as i32)).abs()).sum();
        eval_poly(c, x) / mag
    }

    #[test]
    fn case1_polynomial_vanishes_at_l1() {
        let m = model(0.000953728, MeanMotion::Frozen);
        let l1 = collinear_points(&m).unwrap()[0];
        let c = degree10_coefficients(SeriesCase::Case1, &m);
        let rho = l1.x - (1.0 - m.mu());
        assert!(scaled(&c, rho).abs() < 1e-6, "{}", scaled(&c, rho));
    }

    #[test]
    fn case1_mu_zero_factorization() {
        let m = model(1e-300, MeanMotion::Frozen);
        let c = degree10_coefficients(SeriesCase::Case1, &m);
        for ci in &c[..4] {
            assert!(ci.abs() < 1e-250);
        }
        let n2 = m.mean_motion_sq();
        let w = m.disk().linear / 2.0;
        let lg = m.disk().log;
        let q1 = m.params().q1;
        let expected = [
            8.0 * n2 - 16.0 * w - 3.0 * lg - 8.0 * q1,
            48.0 * n2 - 48.0 * w - 6.0 * lg - 24.0 * q1,
            120.0 * n2 - 48.0 * w - 3.0 * lg - 24.0 * q1,
            160.0 * n2 - 16.0 * w - 8.0 * q1,
            120.0 * n2,
            48.0 * n2,
            8.0 * n2,
        ];
        for (got, want) in c[4..].iter().zip(expected) {
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn case3_mu_zero_factorization() {
        let m = model(1e-300, MeanMotion::Frozen);
        let c = degree10_coefficients(SeriesCase::Case3, &m);
        let n2 = m.mean_motion_sq();
        let w = m.disk().linear / 2.0;
        let lg = m.disk().log;
        let q1 = m.params().q1;
        // (ρ − 2)⁴ (ρ − 1)² × quartic, multiplied out in ascending order.
        let quartic = [
            8.0 * n2 - 16.0 * w - 3.0 * lg - 8.0 * q1,
            16.0 * w - 32.0 * n2 + 8.0 * q1,
            48.0 * n2,
            -32.0 * n2,
            8.0 * n2,
        ];
        let mut prod = vec![1.0];
        for root in [2.0, 2.0, 2.0, 2.0, 1.0, 1.0] {
            let mut next = vec![0.0; prod.len() + 1];
            for (i, p) in prod.iter().enumerate() {
                next[i] -= root * p;
                next[i + 1] += p;
            }
            prod = next;
        }
        let mut expected = [0.0; 11];
        for (i, p) in prod.iter().enumerate() {
            for (j, q) in quartic.iter().enumerate() {
                expected[i + j] += p * q;
            }
        }
        for (i, (got, want)) in c.iter().zip(expected).enumerate() {
            assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "rho^{i}: {got} vs {want}");
        }
        assert!(eval_poly(&c, 2.0).abs() < 1e-9);
        assert!(eval_poly(&c, 1.0).abs() < 1e-9);
    }

    #[test]
    fn series_vanishes_with_mu() {
        for case in [SeriesCase::Case1, SeriesCase::Case2ii] {
            let big = series_rho(case, &model(1e-4, MeanMotion::Frozen)).unwrap().0;
            let small = series_rho(case, &model(1e-12, MeanMotion::Frozen)).unwrap().0;
            assert!(small.abs() < big.abs() && small.abs() < 1e-2, "{case}: {small}");
        }
    }

    #[test]
    fn preset_coefficients_are_finite() {
        let m = model(0.000953728, MeanMotion::Local);
        for case in SeriesCase::ALL {
            let d = d_values(case, &Consts::new(&m));
            assert!(d.iter().all(|v| v.is_finite()));
            assert_ne!(d[0], 0.0);
        }
        let (_, s) = series_rho(SeriesCase::Case1, &m).unwrap();
        assert!(s.alpha.iter().all(|a| a.is_finite()));
        assert!((s.d[0] - 6.2017).abs() < 1e-3, "{}", s.d[0]);
        assert!((s.alpha_base - 0.0072561).abs() < 1e-6, "{}", s.alpha_base);
    }

    #[test]
    fn mid_right_branch_is_complex() {
        let m = model(0.000953728, MeanMotion::Local);
        assert!(matches!(series_rho(SeriesCase::Case2i, &m), Err(Error::Branch(_))));
    }

    #[test]
    fn degenerate_without_oblateness() {
        let m = Model::new(SystemParams::classical(0.01)).unwrap();
        assert_eq!(series_rho(SeriesCase::Case1, &m).unwrap_err(), Error::DegenerateSeries);
    }

    #[test]
    fn conversion_conventions() {
        let mu = 0.01;
        assert_eq!(series_x(SeriesCase::Case1, 0.1, mu), 1.0 - mu + 0.1);
        assert_eq!(series_x(SeriesCase::Case2i, 0.1, mu), 1.0 - mu - 0.1);
        assert!(series_x(SeriesCase::Case3, 2.003, mu) < -mu);
    }
}
