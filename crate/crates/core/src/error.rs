use std::path::PathBuf;

use thiserror::Error;

use crate::domain::DefectClass;

#[derive(Debug, Error)]
pub enum OrcasError {
    #[error("unknown {kind}: {value:?}")]
    UnknownValue { kind: &'static str, value: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("duplicate id: {0}")]
    DuplicateId(String),

    #[error("no corpus records")]
    EmptyCorpus,

    #[error("corpus record {0} has no observed failure modes")]
    UnlabeledRecord(String),

    #[error("no causality row: {0}")]
    MissingRow(DefectClass),

    #[error("causality row {class} is invalid: {reason}")]
    InvalidRow { class: DefectClass, reason: String },

    #[error("insufficient failure data: {0}")]
    InsufficientData(String),

    #[error("reliability growth fit did not converge for {0}; use bounded estimation instead")]
    Unconverged(String),

    #[error("{0}")]
    Evidence(String),

    #[error("{}: {reason}", path.display())]
    File { path: PathBuf, reason: String },

    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<OrcasError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl OrcasError {
    pub fn in_stage(self, stage: &'static str) -> Self {
        OrcasError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = OrcasError> = std::result::Result<T, E>;
