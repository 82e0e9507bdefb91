//! Effective potential, its derivatives and the Jacobi integral.
//!
//! The primary of mass 1 − μ sits at (−μ, 0) and radiates (factor q1); the
//! oblate primary of mass μ sits at (1 − μ, 0). The disk enters twice, in two
//! forms that are not derivatives of one another:
//!
//! * the potential V(r) = −2chπ (b−a)/(ab) / r + 7/8 chπ ln(b/a) / r² inside Ω,
//! * the radial force f_b(r) = −2chπ (b−a)/(ab) / r² − 3/8 chπ ln(b/a) / r³
//!   inside the mean motion and the equations of motion.
//!
//! Both are kept as given. [`Model::omega`] therefore differs from the
//! potential of the force field by a pure ln(b/a) term; [`Model::force_potential`]
//! is the potential whose gradient is exactly [`Model::gradient`].

mod params;

pub use params::{DiskCoefficients, DiskDensity, DiskProfile, MeanMotion, PiMode, SystemParams};

use serde::Serialize;

use crate::error::{Error, Result};

/// A point of the orbital plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Position and velocity in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl State {
    pub const fn new(x: f64, y: f64, vx: f64, vy: f64) -> Self {
        Self { x, y, vx, vy }
    }

    pub const fn at_rest(p: Position) -> Self {
        Self::new(p.x, p.y, 0.0, 0.0)
    }

    pub fn position(&self) -> Position {
        Position::new(self.x, self.y)
    }
}

/// (Ω_x, Ω_y)
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gradient {
    pub x: f64,
    pub y: f64,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Second partials of Ω. Ω_xy = Ω_yx.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hessian {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

/// Distances to the primaries and to the disk centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    pub r1: f64,
    pub r2: f64,
    pub r: f64,
}

/// V(r), the disk potential.
pub fn disk_potential(r: f64, disk: &DiskProfile, pi: PiMode) -> Result<f64> {
    check_radius(r)?;
    let k = disk.coefficients(pi);
    Ok(-k.linear / r + 0.875 * k.log / (r * r))
}

/// f_b(r), the radial disk force. Planar components are (x/r, y/r) · f_b.
pub fn disk_force(r: f64, disk: &DiskProfile, pi: PiMode) -> Result<f64> {
    check_radius(r)?;
    Ok(radial_force(&disk.coefficients(pi), r))
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Singular { distance: "r", value: r })
    }
}

fn radial_force(k: &DiskCoefficients, r: f64) -> f64 {
    -k.linear / (r * r) - 0.375 * k.log / (r * r * r)
}

/// n = √(q1 + 3/2 A2 − 2 f_b(r_ref)).
pub fn mean_motion(params: &SystemParams) -> Result<f64> {
    Ok(Model::new(*params)?.mean_motion())
}

/// Validated parameters plus the derived disk coefficients and n².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    params: SystemParams,
    disk: DiskCoefficients,
    n_sq_ref: f64,
}

impl Model {
    pub fn new(params: SystemParams) -> Result<Self> {
        params.validate()?;
        let disk = params.disk.coefficients(params.pi_mode);
        let n_sq_ref = n_sq(&params, &disk, params.r_ref);
        if !(n_sq_ref > 0.0) {
            return Err(Error::MeanMotion(n_sq_ref));
        }
        Ok(Self { params, disk, n_sq_ref })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    pub fn disk(&self) -> &DiskCoefficients {
        &self.disk
    }

    pub fn has_disk(&self) -> bool {
        !self.disk.is_absent()
    }

    /// n at the reference radius.
    pub fn mean_motion(&self) -> f64 {
        self.n_sq_ref.sqrt()
    }

    pub fn mean_motion_sq(&self) -> f64 {
        self.n_sq_ref
    }

    /// n² = q1 + 3/2 A2 − 2 f_b(r) at an arbitrary radius.
    pub fn mean_motion_sq_at_radius(&self, r: f64) -> f64 {
        n_sq(&self.params, &self.disk, r)
    }

    /// n² that applies at `p` under the configured [`MeanMotion`].
    pub fn mean_motion_sq_at(&self, p: Position) -> f64 {
        match self.params.mean_motion {
            MeanMotion::Frozen => self.n_sq_ref,
            MeanMotion::Local => self.mean_motion_sq_at_radius(p.norm()),
        }
    }

    /// The same model with n frozen at radius `r`.
    pub fn frozen_at(&self, r: f64) -> Result<Self> {
        let mut params = self.params;
        params.mean_motion = MeanMotion::Frozen;
        params.r_ref = r;
        Self::new(params)
    }

    /// Model used to linearise about `p`: unchanged when n is frozen, frozen at
    /// |p| when n is local.
    pub fn linearized_at(&self, p: Position) -> Result<Self> {
        match self.params.mean_motion {
            MeanMotion::Frozen => Ok(*self),
            MeanMotion::Local => self.frozen_at(p.norm()),
        }
    }

    pub fn distances(&self, p: Position) -> Result<Distances> {
        let mu = self.params.mu;
        let r1 = (p.x + mu).hypot(p.y);
        let r2 = (p.x + mu - 1.0).hypot(p.y);
        let r = p.norm();
        if !(r1 > 0.0) {
            return Err(Error::Singular { distance: "r1", value: r1 });
        }
        if !(r2 > 0.0) {
            return Err(Error::Singular { distance: "r2", value: r2 });
        }
        if self.has_disk() && !(r > 0.0) {
            return Err(Error::Singular { distance: "r", value: r });
        }
        Ok(Distances { r1, r2, r })
    }

    /// Ω = n²(x²+y²)/2 + (1−μ)q1/r1 + μ/r2 + μA2/(2 r2³) − V(r).
    pub fn omega(&self, p: Position) -> Result<f64> {
        let d = self.distances(p)?;
        let disk = if self.has_disk() { -(-self.disk.linear / d.r + 0.875 * self.disk.log / (d.r * d.r)) } else { 0.0 };
        Ok(self.point_masses(p, &d) + disk)
    }

    /// Potential whose gradient is [`Model::gradient`]; its disk part is
    /// linear/r + 3/16 · log/r². Equal to Ω when the disk is absent.
    pub fn force_potential(&self, p: Position) -> Result<f64> {
        let d = self.distances(p)?;
        let disk = if self.has_disk() { self.disk.linear / d.r + 0.1875 * self.disk.log / (d.r * d.r) } else { 0.0 };
        Ok(self.point_masses(p, &d) + disk)
    }

    fn point_masses(&self, p: Position, d: &Distances) -> f64 {
        let SystemParams { mu, q1, a2, .. } = self.params;
        0.5 * self.mean_motion_sq_at(p) * (p.x * p.x + p.y * p.y)
            + (1.0 - mu) * q1 / d.r1
            + mu / d.r2
            + mu * a2 / (2.0 * d.r2.powi(3))
    }

    /// (Ω_x, Ω_y), with the disk entering through f_b.
    pub fn gradient(&self, p: Position) -> Result<Gradient> {
        let d = self.distances(p)?;
        let SystemParams { mu, q1, a2, .. } = self.params;
        let n2 = self.mean_motion_sq_at(p);
        // Common radial factor multiplying (x, y) for every centred term.
        let disk =
            if self.has_disk() { -self.disk.linear / d.r.powi(3) - 0.375 * self.disk.log / d.r.powi(4) } else { 0.0 };
        let k1 = (1.0 - mu) * q1 / d.r1.powi(3);
        let k2 = mu / d.r2.powi(3) + 1.5 * mu * a2 / d.r2.powi(5);
        Ok(Gradient {
            x: n2 * p.x - k1 * (p.x + mu) - k2 * (p.x + mu - 1.0) + disk * p.x,
            y: n2 * p.y - k1 * p.y - k2 * p.y + disk * p.y,
        })
    }

    /// Sum of the magnitudes of the terms of the gradient; used to scale
    /// residuals near the primaries where cancellation is severe.
    pub fn force_scale(&self, p: Position) -> Result<f64> {
        let d = self.distances(p)?;
        let SystemParams { mu, q1, a2, .. } = self.params;
        let disk =
            if self.has_disk() { self.disk.linear / d.r.powi(2) + 0.375 * self.disk.log / d.r.powi(3) } else { 0.0 };
        Ok(self.mean_motion_sq_at(p) * d.r
            + (1.0 - mu) * q1 / d.r1.powi(2)
            + mu / d.r2.powi(2)
            + 1.5 * mu * a2 / d.r2.powi(4)
            + disk)
    }

    /// Second partials of Ω with n held constant at its value for `p`.
    pub fn hessian(&self, p: Position) -> Result<Hessian> {
        let d = self.distances(p)?;
        let SystemParams { mu, q1, a2, .. } = self.params;
        let n2 = self.mean_motion_sq_at(p);
        let (x, y) = (p.x, p.y);
        let (dx1, dx2) = (x + mu, x + mu - 1.0);
        let m1 = q1 * (1.0 - mu);
        let (lin, lg) = if self.has_disk() { (self.disk.linear, self.disk.log) } else { (0.0, 0.0) };
        let r = d.r;

        let base = n2
            - m1 / d.r1.powi(3)
            - mu / d.r2.powi(3)
            - 1.5 * mu * a2 / d.r2.powi(5)
            - if self.has_disk() { lin / r.powi(3) + 0.375 * lg / r.powi(4) } else { 0.0 };
        // Coefficients of the quadratic forms (u v) in each second partial.
        let c1 = 3.0 * m1 / d.r1.powi(5);
        let c2 = 3.0 * mu / d.r2.powi(5) + 7.5 * mu * a2 / d.r2.powi(7);
        let (c3, c4) = if self.has_disk() { (3.0 * lin / r.powi(5), 1.5 * lg / r.powi(6)) } else { (0.0, 0.0) };
        Ok(Hessian {
            xx: base + c1 * dx1 * dx1 + c2 * dx2 * dx2 + (c3 + c4) * x * x,
            yy: base + c1 * y * y + c2 * y * y + (c3 + c4) * y * y,
            xy: c1 * dx1 * y + c2 * dx2 * y + (c3 + c4) * x * y,
        })
    }

    /// Jacobian of the gradient field. Equals the Hessian for frozen n; for
    /// local n it adds the variation of n²(r).
    pub fn gradient_jacobian(&self, p: Position) -> Result<Hessian> {
        let mut h = self.hessian(p)?;
        if self.params.mean_motion == MeanMotion::Local && self.has_disk() {
            let r = p.norm();
            // d(n²)/dr = −2 f_b'(r)
            let dfb = 2.0 * self.disk.linear / r.powi(3) + 1.125 * self.disk.log / r.powi(4);
            let g = -2.0 * dfb / r;
            h.xx += g * p.x * p.x;
            h.yy += g * p.y * p.y;
            h.xy += g * p.x * p.y;
        }
        Ok(h)
    }

    /// C = −(vx² + vy²) + 2Ω.
    pub fn jacobi_constant(&self, s: &State) -> Result<f64> {
        Ok(2.0 * self.omega(s.position())? - s.vx * s.vx - s.vy * s.vy)
    }

    /// Integral of the equations of motion: −v² + 2 × force potential.
    pub fn motion_integral(&self, s: &State) -> Result<f64> {
        Ok(2.0 * self.force_potential(s.position())? - s.vx * s.vx - s.vy * s.vy)
    }
}

fn n_sq(params: &SystemParams, disk: &DiskCoefficients, r: f64) -> f64 {
    let fb = if disk.is_absent() { 0.0 } else { radial_force(disk, r) };
    params.q1 + 1.5 * params.a2 - 2.0 * fb
}
