// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GlinError>;

#[derive(Debug, Error)]
pub enum GlinError {
    /// Malformed WKT; `offset` is the byte offset where parsing failed.
    #[error("WKT parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported WKT geometry type `{0}`")]
    UnsupportedType(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot build an index from an empty record set")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error(
        "result mismatch for engine `{engine}` on window {window}: \
         missing {missing:?}, unexpected {unexpected:?}"
    )]
    ResultMismatch {
        engine: String,
        window: String,
        missing: Vec<u64>,
        unexpected: Vec<u64>,
    },

    #[error("structural audit failed: {0}")]
    Audit(String),

    #[error("snapshot format error (line {line}): {message}")]
    Snapshot { line: usize, message: String },

    #[error("dataset format error (line {line}): {message}")]
    Dataset { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
