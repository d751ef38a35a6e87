use std::path::PathBuf;

/// Errors raised by instance loading, evaluation and the solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance file is empty")]
    Empty,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("timetable is incomplete: exam {exam} is unassigned")]
    Incomplete { exam: usize },

    #[error("slot {slot} is out of range for {num_slots} slots")]
    SlotOutOfRange { slot: usize, num_slots: usize },

    #[error("exam {exam} is out of range for {num_exams} exams")]
    ExamOutOfRange { exam: usize, num_exams: usize },

    #[error("exam {exam} is already assigned")]
    AlreadyAssigned { exam: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown instance: {0}")]
    UnknownInstance(String),

    #[error("no slot count known for instance `{0}`")]
    MissingSlots(String),

    #[error("{0}")]
    Statistics(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Metadata(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
