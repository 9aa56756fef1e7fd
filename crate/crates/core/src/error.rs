use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class, stable for scripts that parse CLI output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCategory {
    Parse,
    Infeasible,
    Limit,
    Io,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Parse => "parse",
            ErrorCategory::Infeasible => "infeasible",
            ErrorCategory::Limit => "limit",
            ErrorCategory::Io => "io",
        }
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown student id `{0}`")]
    UnknownStudent(String),

    #[error("duplicate score for student `{student_id}` on task {task_no}")]
    DuplicateScore { student_id: String, task_no: u32 },

    #[error("score {score} for student `{student_id}` on task {task_no} is outside [0, 100]")]
    ScoreOutOfRange { student_id: String, task_no: u32, score: f64 },

    #[error("task numbers start at 1 (student `{0}`)")]
    ZeroTask(String),

    #[error("invalid option letter `{0}` (expected A..E)")]
    InvalidOption(char),

    #[error("ranking position {0} is outside 1..=5")]
    InvalidPosition(usize),

    #[error("invalid ranking `{0}`: expected distinct letters from A..E")]
    InvalidRanking(String),

    #[error("cannot normalize: {0}")]
    Normalize(&'static str),

    #[error("orientation mismatch: {0}")]
    Orientation(&'static str),

    #[error("student `{0}` has no competence level")]
    MissingLevel(String),

    #[error("cohort of {n} students cannot be assigned with minimum cycle length {min_cycle}")]
    InvalidMinCycle { n: usize, min_cycle: usize },

    #[error("no feasible assignment exists")]
    Infeasible,

    #[error("node limit of {0} exhausted before optimality was proven")]
    NodeLimit(u64),

    #[error("brute-force oracle refuses n = {0} (limit 9)")]
    OracleTooLarge(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("rejection sampling gave up after {attempts} attempts (acceptance rate < {rate_bound:.2e})")]
    SamplingExhausted { attempts: u64, rate_bound: f64 },

    #[error("task {task_no}: {source}")]
    Task {
        task_no: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Csv { path: String, line: u64, message: String },

    #[error("{path}: {message}")]
    Json { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidMinCycle { .. } | Error::Infeasible | Error::SamplingExhausted { .. } => {
                ErrorCategory::Infeasible
            }
            Error::NodeLimit(_) | Error::OracleTooLarge(_) => ErrorCategory::Limit,
            Error::Io { .. } => ErrorCategory::Io,
            Error::Task { source, .. } => source.category(),
            _ => ErrorCategory::Parse,
        }
    }

    pub(crate) fn in_task(self, task_no: u32) -> Error {
        Error::Task { task_no, source: Box::new(self) }
    }
}
