//! Planar equations of motion in the rotating frame, integrated with an
//! adaptive Dormand–Prince 5(4) scheme.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, State};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_CADENCE: f64 = 1e-2;

/// ẍ = 2nẏ + Ω_x, ÿ = −2nẋ + Ω_y.
pub fn acceleration(model: &Model, s: &State) -> Result<(f64, f64)> {
    let p = s.position();
    let g = model.gradient(p)?;
    let n = model.mean_motion_sq_at(p).sqrt();
    Ok((2.0 * n * s.vy + g.x, -2.0 * n * s.vx + g.y))
}

fn deriv(model: &Model, y: &[f64; 4]) -> Result<[f64; 4]> {
    let (ax, ay) = acceleration(model, &State::new(y[0], y[1], y[2], y[3]))?;
    Ok([y[2], y[3], ax, ay])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrateOptions {
    /// Local error bound per step, relative to max(1, |y|).
    pub tol: f64,
    /// Spacing of the recorded samples.
    pub cadence: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, cadence: DEFAULT_CADENCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// The step size collapsed, typically on approach to a primary.
    StepUnderflow {
        t: f64,
    },
    /// The state reached a singular position.
    Singular {
        t: f64,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    /// Jacobi constant −v² + 2Ω.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// max |C(t) − C(0)| over the samples.
    pub c_drift: f64,
    /// Same for the integral built on the force potential, which the flow
    /// conserves exactly when the mean motion is frozen.
    pub integral_drift: f64,
    pub termination: Termination,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory always holds the initial sample")
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One step of size h; returns the fifth-order solution and the error norm.
fn dopri_step(model: &Model, y: &[f64; 4], k0: &[f64; 4], h: f64, tol: f64) -> Result<([f64; 4], [f64; 4], f64)> {
    let mut k = [[0.0; 4]; 7];
    k[0] = *k0;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..4 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = deriv(model, &ys)?;
    }
    let mut y5 = *y;
    let mut err = 0.0f64;
    for i in 0..4 {
        let mut e = 0.0;
        for s in 0..7 {
            y5[i] += h * B5[s] * k[s][i];
            e += h * (B5[s] - B4[s]) * k[s][i];
        }
        let sc = tol * y[i].abs().max(y5[i].abs()).max(1.0);
        err = err.max((e / sc).abs());
    }
    // First-same-as-last: stage 7 is the derivative at y5.
    Ok((y5, k[6], err))
}

/// Integrate from t = 0 to `t_end` (either sign), recording a sample every
/// `cadence` and at `t_end`.
pub fn integrate(model: &Model, s0: State, t_end: f64, opts: IntegrateOptions) -> Result<Trajectory> {
    if !(t_end != 0.0 && t_end.is_finite()) || !(opts.tol > 0.0) || !(opts.cadence > 0.0) {
        return Err(Error::Integration(format!(
            "need t_end != 0, tol > 0 and cadence > 0 (t_end = {t_end}, tol = {}, cadence = {})",
            opts.tol, opts.cadence
        )));
    }
    let dir = t_end.signum();
    let span = t_end.abs();
    let c0 = model.jacobi_constant(&s0)?;
    let i0 = model.motion_integral(&s0)?;
    let mut samples = vec![Sample { t: 0.0, state: s0, c: c0 }];
    let mut c_drift = 0.0f64;
    let mut integral_drift = 0.0f64;

    let mut y = [s0.x, s0.y, s0.vx, s0.vy];
    let mut k0 = deriv(model, &y)?;
    let mut t = 0.0f64; // elapsed |time|
    let mut h = (opts.cadence * 0.1).min(span);
    let n_out = (span / opts.cadence).ceil() as usize;
    let mut steps = 0usize;
    let mut termination = Termination::Completed;

    'outer: for j in 1..=n_out {
        let target = (j as f64 * opts.cadence).min(span);
        while t < target {
            let remaining = target - t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            if step <= 1e-14 * t.max(1.0) && !clamped {
                termination = Termination::StepUnderflow { t: dir * t };
                break 'outer;
            }
            match dopri_step(model, &y, &k0, dir * step, opts.tol) {
                Ok((y5, k_last, err)) if err.is_finite() && err <= 1.0 => {
                    y = y5;
                    k0 = k_last;
                    t = if clamped { target } else { t + step };
                    steps += 1;
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // A step shortened to hit an output time says nothing
                    // about the sustainable step size.
                    if !clamped || factor < 1.0 {
                        h = step * factor;
                    }
                }
                Ok((_, _, err)) => {
                    let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                    h = step * factor;
                    if h <= 1e-14 * t.max(1.0) {
                        termination = Termination::StepUnderflow { t: dir * t };
                        break 'outer;
                    }
                }
                Err(e @ Error::Singular { .. }) => {
                    h = step * 0.1;
                    if h <= 1e-14 * t.max(1.0) {
                        termination = Termination::Singular { t: dir * t, reason: e.to_string() };
                        break 'outer;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let state = State::new(y[0], y[1], y[2], y[3]);
        let c = match model.jacobi_constant(&state) {
            Ok(c) => c,
            Err(e) => {
                termination = Termination::Singular { t: dir * t, reason: e.to_string() };
                break;
            }
        };
        if let Ok(i) = model.motion_integral(&state) {
            integral_drift = integral_drift.max((i - i0).abs());
        }
        c_drift = c_drift.max((c - c0).abs());
        samples.push(Sample { t: dir * target, state, c });
    }
    Ok(Trajectory { samples, c_drift, integral_drift, termination, steps })
}
