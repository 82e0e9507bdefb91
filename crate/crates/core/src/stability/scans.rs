use rayon::prelude::*;
use serde::Serialize;

use super::{characteristic_coefficients, classify, Verdict};
use crate::equilibria::{
    collinear_in, refine_off_axis, triangular_points, triangular_series, EquilibriumPoint, Interval, Label, Method,
};
use crate::error::{Error, Result};
use crate::model::{MeanMotion, Model, Position, SystemParams};
use crate::roots::bisect_predicate;

/// Upper limit of the mass ratio.
pub const MU_CAP: f64 = 0.5;
/// Continuation step in μ before bisection.
const MU_STEP: f64 = 1e-3;
const D_TOL: f64 = 1e-10;

pub const CURVE_Q1: [f64; 2] = [1.0, 0.75];
pub const CURVE_A2: [f64; 3] = [0.0, 0.0025, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalMass {
    pub mu_c: f64,
    /// No loss of stability below the cap.
    pub saturated: bool,
    /// p² − 4q at `mu_c`.
    pub discriminant: f64,
}

/// Discriminant at the refined L4 for a given μ, continuing from `seed`.
fn l4_discriminant(base: &SystemParams, mu: f64, seed: Option<Position>) -> Result<(f64, Position)> {
    let model = Model::new(base.with_mu(mu))?;
    let seed = match seed {
        Some(s) => s,
        None => triangular_series(&model).unwrap_or(Position::new(0.5 - mu, 3f64.sqrt() / 2.0)),
    };
    let (p, ok) = refine_off_axis(&model, seed);
    if !ok {
        return Err(Error::NoConvergence { lo: mu, hi: mu });
    }
    let pt = EquilibriumPoint::build(&model, Label::L4, p, Interval::OffAxis, Method::NewtonRefined);
    Ok((characteristic_coefficients(&pt, &model)?.discriminant(), p))
}

/// Smallest μ in [lo, hi] at which L4 stops being linearly stable: the first
/// sign change of p² − 4q found by stepping up from `lo`, bisected to
/// |p² − 4q| < 1e-10. μ of `base` is ignored.
pub fn critical_mass(base: &SystemParams, lo: f64, hi: f64) -> Result<CriticalMass> {
    let hi = hi.min(MU_CAP - 1e-12);
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidParams(format!("critical-mass bracket [{lo}, {hi}] must lie in (0, 0.5)")));
    }
    let (mut d_lo, mut seed) = l4_discriminant(base, lo, None)?;
    if d_lo <= 0.0 {
        return Ok(CriticalMass { mu_c: lo, saturated: false, discriminant: d_lo });
    }
    let mut mu_lo = lo;
    loop {
        let mu_hi = (mu_lo + MU_STEP).min(hi);
        let (d_hi, p_hi) = match l4_discriminant(base, mu_hi, Some(seed)) {
            Ok(v) => v,
            Err(_) if mu_hi > mu_lo + 1e-9 => {
                // Lost the branch: treat as the stability edge and bisect on
                // whether a stable L4 can still be found.
                (f64::NEG_INFINITY, seed)
            }
            Err(e) => return Err(e),
        };
        if d_hi <= 0.0 {
            return bisect_discriminant(base, mu_lo, mu_hi, d_lo, seed);
        }
        if mu_hi >= hi {
            return Ok(CriticalMass { mu_c: MU_CAP, saturated: true, discriminant: d_hi });
        }
        mu_lo = mu_hi;
        d_lo = d_hi;
        seed = p_hi;
    }
}

fn bisect_discriminant(
    base: &SystemParams,
    mut a: f64,
    mut b: f64,
    mut d_a: f64,
    mut seed: Position,
) -> Result<CriticalMass> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let (d, p) = match l4_discriminant(base, mid, Some(seed)) {
            Ok(v) => v,
            Err(_) => (f64::NEG_INFINITY, seed),
        };
        if d.abs() < D_TOL {
            return Ok(CriticalMass { mu_c: mid, saturated: false, discriminant: d });
        }
        if d > 0.0 {
            a = mid;
            d_a = d;
            seed = p;
        } else {
            b = mid;
        }
    }
    Ok(CriticalMass { mu_c: a, saturated: false, discriminant: d_a })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub b: f64,
    pub mu_c: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalMassCurve {
    pub q1: f64,
    pub a2: f64,
    pub samples: Vec<CurveSample>,
}

impl CriticalMassCurve {
    /// μ_c at the sample closest to `b`.
    pub fn at(&self, b: f64) -> Option<f64> {
        self.samples.iter().min_by(|x, y| (x.b - b).abs().total_cmp(&(y.b - b).abs())).map(|s| s.mu_c)
    }

    pub fn is_nondecreasing(&self, slack: f64) -> bool {
        self.samples.windows(2).all(|w| w[1].mu_c >= w[0].mu_c - slack)
    }
}

/// μ_c against the outer disk radius. The density factor c of `base` is held
/// fixed as b varies, and the mean motion stays frozen at `base.r_ref`.
pub fn critical_mass_curve(base: &SystemParams, q1: f64, a2: f64, b_values: &[f64]) -> Result<CriticalMassCurve> {
    let samples = b_values
        .par_iter()
        .map(|&b| {
            let mut p = *base;
            p.q1 = q1;
            p.a2 = a2;
            p.mean_motion = MeanMotion::Frozen;
            p.disk = base.disk.with_outer_radius_fixed_density(b, base.pi_mode);
            let cm = critical_mass(&p, 1e-4, MU_CAP)?;
            Ok(CurveSample { b, mu_c: cm.mu_c, saturated: cm.saturated })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CriticalMassCurve { q1, a2, samples })
}

/// b = 1.00, 1.01, …, 2.00
pub fn curve_b_values() -> Vec<f64> {
    (0..=100).map(|i| 1.0 + i as f64 * 0.01).collect()
}

/// The six curves for q1 ∈ {1, 0.75} and A2 ∈ {0, 0.0025, 0.005}.
pub fn critical_mass_curves(base: &SystemParams) -> Result<Vec<CriticalMassCurve>> {
    let bs = curve_b_values();
    let mut out = Vec::new();
    for q1 in CURVE_Q1 {
        for a2 in CURVE_A2 {
            out.push(critical_mass_curve(base, q1, a2, &bs)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandSample {
    pub b: f64,
    /// `None` where the point does not exist or the disk is undefined.
    pub verdict: Option<Verdict>,
    pub x: Option<f64>,
    pub max_re: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandScan {
    pub label: Label,
    pub samples: Vec<BandSample>,
    /// Maximal stable sub-intervals of b, endpoints refined by bisection.
    pub bands: Vec<(f64, f64)>,
    /// Values of b where the point could not be located.
    pub gaps: Vec<f64>,
}

/// Band endpoints are refined to this width.
pub const BAND_TOL: f64 = 1e-4;

fn locate(model: &Model, label: Label) -> Option<EquilibriumPoint> {
    match label {
        Label::L4 | Label::L5 => {
            let t = triangular_points(model).ok()?;
            let p = if label == Label::L4 { t.refined[0] } else { t.refined[1] };
            p.converged.then_some(p)
        }
        _ => {
            let iv = Interval::COLLINEAR.into_iter().find(|iv| iv.label() == label)?;
            collinear_in(model, iv).ok()?.into_iter().next()
        }
    }
}

fn sample_band(base: &SystemParams, label: Label, b: f64) -> BandSample {
    let mut p = *base;
    p.disk = base.disk.with_outer_radius_fixed_mass(b, base.pi_mode);
    let none = BandSample { b, verdict: None, x: None, max_re: None };
    let Ok(model) = Model::new(p) else { return none };
    let Some(pt) = locate(&model, label) else { return none };
    match classify(&pt, &model) {
        Ok(r) => BandSample { b, verdict: Some(r.verdict), x: Some(pt.x), max_re: Some(r.max_re()) },
        Err(_) => none,
    }
}

/// Classify one equilibrium across outer radii b ∈ [b_lo, b_hi], holding the
/// disk mass of `base` fixed.
pub fn stability_band_scan(label: Label, b_lo: f64, b_hi: f64, step: f64, base: &SystemParams) -> Result<BandScan> {
    if !(b_hi >= b_lo) || !(b_lo >= base.disk.a) || !(step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "band scan needs a <= b_lo <= b_hi and step > 0 (a = {}, b in [{b_lo}, {b_hi}], step {step})",
            base.disk.a
        )));
    }
    let n = ((b_hi - b_lo) / step + 1e-9).floor() as usize;
    let samples: Vec<BandSample> =
        (0..=n).into_par_iter().map(|i| sample_band(base, label, (b_lo + i as f64 * step).min(b_hi))).collect();
    let stable = |s: &BandSample| s.verdict == Some(Verdict::Stable);
    let stable_at = |b: f64| stable(&sample_band(base, label, b));

    let mut bands = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        if !stable(&samples[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < samples.len() && stable(&samples[i + 1]) {
            i += 1;
        }
        let lo = if start == 0 {
            samples[0].b
        } else {
            bisect_predicate(stable_at, samples[start - 1].b, samples[start].b, BAND_TOL).1
        };
        let hi = if i + 1 == samples.len() {
            samples[i].b
        } else {
            bisect_predicate(|b| !stable_at(b), samples[i].b, samples[i + 1].b, BAND_TOL).0
        };
        bands.push((lo, hi));
        i += 1;
    }
    let gaps = samples.iter().filter(|s| s.verdict.is_none()).map(|s| s.b).collect();
    Ok(BandScan { label, samples, bands, gaps })
}
