use std::path::PathBuf;

use thiserror::Error;

/// Parameter errors raised by the two codecs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("symbol size {0} is outside the supported range 2..=16")]
    SymbolSize(u32),
    #[error("{bits} data bits are not a multiple of the {s}-bit symbol size")]
    NotSymbolAligned { bits: usize, s: u32 },
    #[error("{data} data symbols + {parity} parity symbols exceed the {max}-symbol codeword")]
    Capacity {
        data: usize,
        parity: usize,
        max: usize,
    },
    #[error("expected {expected} elements, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("invalid code dimensions: {0}")]
    Dimensions(String),
}

/// Errors from loading, generating or querying a BER table.
#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read BER table {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("BER table line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("BER table is invalid: {0}")]
    Invalid(String),
    #[error("distance {distance} m is outside the table range [{min}, {max}] m")]
    OutOfRange { distance: f64, min: f64, max: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Errors raised while parsing or validating a run specification.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read run spec {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid value {value:?} for `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
}

/// Top-level error for simulation runs.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
