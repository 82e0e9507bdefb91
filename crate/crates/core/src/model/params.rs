use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value of π used in every disk coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PiMode {
    #[default]
    Exact,
    /// π = 3.14, the truncated value the reference tables were computed with.
    #[serde(rename = "paper")]
    Paper314,
}

impl PiMode {
    pub fn value(self) -> f64 {
        match self {
            PiMode::Exact => std::f64::consts::PI,
            #[allow(clippy::approx_constant)]
            PiMode::Paper314 => 3.14,
        }
    }
}

/// How the rotating-frame rate n is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanMotion {
    /// n is computed once from the disk force at `r_ref`.
    #[default]
    Frozen,
    /// n² = q1 + 3/2 A2 − 2 f_b(r) is evaluated at the radius of the point
    /// under consideration. Equilibria are force balances at that local rate;
    /// linearisation freezes the rate at the equilibrium's radius.
    Local,
}

/// Disk density is specified either directly or through the total mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiskDensity {
    /// Control factor c of ρ(r) = c / r³.
    Density(f64),
    /// Total disk mass M_b.
    Mass(f64),
}

/// Annulus a ≤ r ≤ b of thickness h with density c / r³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskProfile {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub density: DiskDensity,
}

/// Coefficients of the disk terms.
///
/// `linear` = 2chπ (b − a)/(ab), `log` = chπ ln(b/a). With these,
/// V(r) = −linear/r + 7/8 · log/r² and f_b(r) = −linear/r² − 3/8 · log/r³.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiskCoefficients {
    pub linear: f64,
    pub log: f64,
}

impl DiskCoefficients {
    pub fn is_absent(&self) -> bool {
        self.linear == 0.0 && self.log == 0.0
    }
}

impl DiskProfile {
    pub fn with_density(a: f64, b: f64, h: f64, c: f64) -> Self {
        Self { a, b, h, density: DiskDensity::Density(c) }
    }

    pub fn with_mass(a: f64, b: f64, h: f64, m_b: f64) -> Self {
        Self { a, b, h, density: DiskDensity::Mass(m_b) }
    }

    /// An empty disk (a = b), which contributes nothing.
    pub fn absent() -> Self {
        Self::with_density(1.0, 1.0, 1e-4, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !(self.b >= self.a) || !self.b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "disk radii must satisfy b >= a > 0 (a = {}, b = {})",
                self.a, self.b
            )));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidParams(format!("disk thickness h = {} must be > 0", self.h)));
        }
        match self.density {
            DiskDensity::Density(c) if !(c >= 0.0) || !c.is_finite() => {
                Err(Error::InvalidParams(format!("density factor c = {c} must be >= 0")))
            }
            DiskDensity::Mass(m) if !(m >= 0.0) || !m.is_finite() => {
                Err(Error::InvalidParams(format!("disk mass M_b = {m} must be >= 0")))
            }
            DiskDensity::Mass(m) if m > 0.0 && self.a == self.b => {
                Err(Error::InvalidParams("disk mass closure is undefined for a = b; give the density factor c".into()))
            }
            _ => Ok(()),
        }
    }

    fn width_factor(&self) -> f64 {
        (self.b - self.a) / (self.a * self.b)
    }

    /// Density factor c, derived from M_b when needed.
    pub fn c(&self, pi: PiMode) -> f64 {
        match self.density {
            DiskDensity::Density(c) => c,
            DiskDensity::Mass(0.0) => 0.0,
            DiskDensity::Mass(m) => m / (2.0 * pi.value() * self.h * self.width_factor()),
        }
    }

    /// Total mass M_b = 2πch (b − a)/(ab).
    pub fn mass(&self, pi: PiMode) -> f64 {
        match self.density {
            DiskDensity::Mass(m) => m,
            DiskDensity::Density(c) => 2.0 * pi.value() * c * self.h * self.width_factor(),
        }
    }

    pub fn coefficients(&self, pi: PiMode) -> DiskCoefficients {
        if self.a == self.b {
            return DiskCoefficients::default();
        }
        let chpi = self.c(pi) * self.h * pi.value();
        DiskCoefficients { linear: 2.0 * chpi * self.width_factor(), log: chpi * (self.b / self.a).ln() }
    }

    /// Same disk with a new outer radius, keeping M_b fixed.
    pub fn with_outer_radius_fixed_mass(&self, b: f64, pi: PiMode) -> Self {
        Self::with_mass(self.a, b, self.h, self.mass(pi))
    }

    /// Same disk with a new outer radius, keeping c fixed.
    pub fn with_outer_radius_fixed_density(&self, b: f64, pi: PiMode) -> Self {
        Self::with_density(self.a, b, self.h, self.c(pi))
    }
}

/// Every constant of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub mu: f64,
    pub q1: f64,
    pub a2: f64,
    pub disk: DiskProfile,
    pub r_ref: f64,
    pub pi_mode: PiMode,
    pub mean_motion: MeanMotion,
}

impl SystemParams {
    /// Sun–Jupiter mass ratio with radiation, oblateness and the reference disk
    /// (a = 1, b = 1.5, h = 1e-4, c = 1910.83, π = 3.14).
    pub fn paper() -> Self {
        Self {
            mu: 0.000953728,
            q1: 0.75,
            a2: 0.0025,
            disk: DiskProfile::with_density(1.0, 1.5, 1e-4, 1910.83),
            r_ref: 0.99,
            pi_mode: PiMode::Paper314,
            mean_motion: MeanMotion::Local,
        }
    }

    /// Classical restricted problem: no radiation, no oblateness, no disk.
    pub fn classical(mu: f64) -> Self {
        Self {
            mu,
            q1: 1.0,
            a2: 0.0,
            disk: DiskProfile::absent(),
            r_ref: 0.99,
            pi_mode: PiMode::Exact,
            mean_motion: MeanMotion::Frozen,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.mu > 0.0 && self.mu < 0.5) {
            return bad(format!("mu = {} must lie in (0, 0.5)", self.mu));
        }
        if !(self.q1 > 0.0 && self.q1 <= 1.0) {
            return bad(format!("q1 = {} must lie in (0, 1]", self.q1));
        }
        if !(self.a2 >= 0.0) || !self.a2.is_finite() {
            return bad(format!("a2 = {} must be >= 0", self.a2));
        }
        if !(self.r_ref > 0.0) || !self.r_ref.is_finite() {
            return bad(format!("r_ref = {} must be > 0", self.r_ref));
        }
        self.disk.validate()
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }
}
