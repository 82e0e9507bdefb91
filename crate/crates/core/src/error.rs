use thiserror::Error;

/// Errors raised by the model, the equilibrium solvers and the scans.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("singular position: {distance} = {value:e}")]
    Singular { distance: &'static str, value: f64 },

    #[error("mean motion undefined: n^2 = {0} is not positive")]
    MeanMotion(f64),

    #[error("root polishing did not converge in [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },

    #[error("series expansion needs A2 > 0; use the numeric collinear solver instead")]
    DegenerateSeries,

    #[error("series branch is not real: radicand {0} < 0")]
    Branch(f64),

    #[error("no off-axis equilibrium: y^2 radicand {0} < 0")]
    NoOffAxisEquilibrium(f64),

    #[error("point is not an equilibrium (scaled residual {0:e})")]
    NotEquilibrium(f64),

    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
