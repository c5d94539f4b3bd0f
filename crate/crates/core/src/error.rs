use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller supplied parameters outside the documented domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// An integral or functional is not defined for the given data
    /// (non-integrable tail, unbounded function, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The residual has the same sign at both ends of the search interval.
    #[error("invalid bracket [{lo}, {hi}]: residual does not change sign")]
    Bracket { lo: f64, hi: f64 },

    /// Outward scan for the free boundary found no sign change.
    #[error("boundary search failed: {0}")]
    Boundary(String),

    /// Every candidate solves the boundary equation (constant data).
    #[error("degenerate boundary equation: {0}")]
    Degenerate(String),

    /// Numerical configuration is unusable (e.g. unstable time step).
    #[error("configuration error: {0}")]
    Config(String),

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    /// Failure inside one stage of a recursion.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: usize) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Input(_) => false,
            Error::Stage { source, .. } => source.is_numerical(),
            _ => true,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
