use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two coincident points fed to a singular kernel.
    #[error("kernel singularity: {0}")]
    Singularity(String),

    /// Quadrature could not reach the requested tolerance.
    #[error("accuracy error: requested {requested:e}, achieved {achieved:e}")]
    Accuracy { requested: f64, achieved: f64 },

    /// Two point vortices came closer than the collapse threshold.
    #[error("point-vortex collapse at t = {time} between vortices {i} and {j} (separation {separation:e})")]
    Collapse {
        time: f64,
        i: usize,
        j: usize,
        separation: f64,
    },

    /// A particle reached the symmetry axis (r0 + x2 <= 0).
    #[error("axis collision: blob {blob} particle {particle} reached r = {radius:e}")]
    AxisCollision {
        blob: usize,
        particle: usize,
        radius: f64,
    },

    /// A particle left the band `|x2| <= r0/2` while that stop is enabled.
    #[error("regime exit: blob {blob} particle {particle} at x2 = {x2:e} (limit {limit:e})")]
    RegimeExit {
        blob: usize,
        particle: usize,
        x2: f64,
        limit: f64,
    },

    /// Initial data violate the blob hypotheses (overlap, L-infinity bound, ...).
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("degenerate blob {0}: zero intensity")]
    DegenerateBlob(usize),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Numerical failures (collapse, axis, accuracy, singular kernel) as opposed
    /// to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Accuracy { .. }
                | Error::Collapse { .. }
                | Error::AxisCollision { .. }
                | Error::RegimeExit { .. }
                | Error::Singularity(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
