//! Error type shared across the crate.

use core::fmt;

/// Why an integrator gave up on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortKind {
    /// Fixed-point iteration of the drift-implicit step failed to converge
    /// and no direct solve was possible.
    ImplicitNonConvergence,
    /// A non-finite value appeared in the state.
    NonFinite,
    /// The density-matrix trace collapsed below the renormalization floor.
    TraceCollapse,
}

impl fmt::Display for AbortKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbortKind::ImplicitNonConvergence => write!(f, "implicit solve did not converge"),
            AbortKind::NonFinite => write!(f, "non-finite state"),
            AbortKind::TraceCollapse => write!(f, "trace collapse"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    Invalid(&'static str),
    /// Mean spin too short to define the tangential frame.
    DegenerateFrame { spin_magnitude: f64 },
    /// Ensemble records do not share one time grid.
    GridMismatch,
    /// A series never reaches the requested crossing level.
    NoCrossing,
    /// Power-law fits need strictly positive data.
    NonPositiveData,
    /// Not enough points for the requested statistic.
    TooFewPoints { needed: usize, got: usize },
    /// All candidate frequency scales vanished; no time step can be chosen.
    ZeroFrequencyScale,
    /// A trajectory integration aborted at `step`.
    TrajectoryAbort {
        seed: u64,
        step: usize,
        kind: AbortKind,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(what) => write!(f, "invalid input: {what}"),
            Error::DegenerateFrame { spin_magnitude } => write!(
                f,
                "mean spin magnitude {spin_magnitude:e} too small to define a frame"
            ),
            Error::GridMismatch => write!(f, "trajectory records do not share one time grid"),
            Error::NoCrossing => write!(f, "series never crosses the requested level"),
            Error::NonPositiveData => write!(f, "power-law fit requires positive data"),
            Error::TooFewPoints { needed, got } => {
                write!(f, "need at least {needed} points, got {got}")
            }
            Error::ZeroFrequencyScale => write!(f, "no nonzero frequency scale for the time step"),
            Error::TrajectoryAbort { seed, step, kind } => {
                write!(f, "trajectory (seed {seed}) aborted at step {step}: {kind}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
