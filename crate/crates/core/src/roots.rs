//! Scalar root bracketing and polishing.

use crate::error::{Error, Result};

/// Sample `f` on a uniform grid over [lo, hi] (both ends included) and return
/// every sub-interval across which it changes sign. A sample that is exactly
/// zero yields a degenerate bracket (x, x).
pub fn scan_brackets<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if !(hi > lo) || !(step > 0.0) {
        return out;
    }
    let steps = ((hi - lo) / step).ceil() as usize;
    let at = |i: usize| if i >= steps { hi } else { lo + i as f64 * step };
    let mut x0 = lo;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        out.push((x0, x0));
    }
    for i in 1..=steps {
        let x1 = at(i);
        let f1 = f(x1);
        if f1 == 0.0 {
            out.push((x1, x1));
        } else if f0 != 0.0 && f0.is_finite() && f1.is_finite() && (f0 < 0.0) != (f1 < 0.0) {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Refine a sign-change bracket until |f| < `ftol` or the bracket has shrunk to
/// a few ulps. Uses the Illinois variant of regula falsi, falling back to
/// bisection whenever the interpolated point is not making progress.
pub fn polish<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, ftol: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoConvergence { lo, hi });
    }
    let mut side = 0i8;
    for _ in 0..400 {
        let width = (b - a).abs();
        let mid = 0.5 * (a + b);
        if width <= 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            return Ok(best(a, fa, b, fb));
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        // Keep away from the ends; a stalled secant step becomes bisection.
        let guard = 0.01 * width;
        if !x.is_finite() || x <= a.min(b) + guard || x >= a.max(b) - guard {
            x = mid;
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NoConvergence { lo, hi });
        }
        if fx.abs() < ftol || fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == (fb < 0.0) {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence { lo, hi })
}

fn best(a: f64, fa: f64, b: f64, fb: f64) -> f64 {
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

/// Plain bisection on a predicate that is `false` at `lo` and `true` at `hi`,
/// down to an interval of width `tol`. Returns the final bracket.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(mut p: P, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if p(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}
