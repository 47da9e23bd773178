use thiserror::Error;

/// Pipeline stage an error originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Setup,
    Estimation,
    Statistics,
    Binning,
    Simulation,
    Adjustment,
    Study,
    Io,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Setup => "setup",
            Stage::Estimation => "estimation",
            Stage::Statistics => "statistics",
            Stage::Binning => "binning",
            Stage::Simulation => "simulation",
            Stage::Adjustment => "adjustment",
            Stage::Study => "study",
            Stage::Io => "io",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown distribution family `{0}`")]
    UnknownFamily(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("invalid parameters for {family}: {reason}")]
    InvalidParams { family: String, reason: String },

    #[error("parameter estimation failed: {0}")]
    EstimationFailed(String),

    #[error("insufficient sample size: got {given}, need at least {needed}")]
    InsufficientSampleSize { given: usize, needed: usize },

    #[error("zero variance in sample")]
    ZeroVariance,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{failed} of {rows} simulated rows failed (limit {limit}); last error: {last}")]
    TooManyFailures {
        failed: usize,
        rows: usize,
        limit: usize,
        last: Box<Error>,
    },

    #[error("{stage}: {source}")]
    AtStage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// Attach a stage label, unless one is already present.
    pub fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::AtStage { .. } => e,
            e => Error::AtStage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The underlying error with any stage label stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::AtStage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// True for errors caused by estimation on degenerate data.
    pub fn is_estimation_failure(&self) -> bool {
        matches!(
            self.root(),
            Error::EstimationFailed(_) | Error::ZeroVariance | Error::TooManyFailures { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
