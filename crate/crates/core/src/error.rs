use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// The CLI maps these onto exit codes: [`Error::Parse`] and [`Error::Io`]
/// exit with 3, [`Error::Budget`] with 2, everything else with 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("{what} budget exceeded: needed {needed}, limit {limit}")]
    Budget {
        what: &'static str,
        needed: String,
        limit: String,
    },

    #[error("budget exceeded after reaching level {level}: {message}")]
    LevelBudget { level: usize, message: String },

    #[error("degree mismatch: polynomial has degree {actual}, expected {expected}")]
    DegreeMismatch { actual: usize, expected: u128 },

    #[error("root finder did not converge: {unconverged} of {degree} roots unconverged after {sweeps} sweeps")]
    NonConvergence {
        unconverged: usize,
        degree: usize,
        sweeps: usize,
    },

    #[error("map of degree {0} is degenerate for this operation (needs degree >= 2)")]
    DegenerateMap(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn budget(what: &'static str, needed: impl ToString, limit: impl ToString) -> Self {
        Error::Budget {
            what,
            needed: needed.to_string(),
            limit: limit.to_string(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::LevelBudget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
