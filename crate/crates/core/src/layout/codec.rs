use serde_json::Value;

use super::{LayoutDocument, SCHEMA_VERSION};
use crate::canonical::to_canonical_vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("unsupported schema version {0}")]
    UnsupportedSchemaVersion(u64),
    #[error("invalid field `{path}`: {message}")]
    FieldViolation { path: String, message: String },
}

/// Canonical UTF-8 JSON for `doc`: sorted keys, no whitespace.
pub fn encode(doc: &LayoutDocument) -> Vec<u8> {
    to_canonical_vec(doc).expect("layout documents always serialize")
}

/// Parses any JSON spelling of a supported document.
pub fn decode(data: &[u8]) -> Result<LayoutDocument, DecodeError> {
    let value: Value =
        serde_json::from_slice(data).map_err(|e| DecodeError::MalformedDocument(e.to_string()))?;
    decode_value(value)
}

/// Like [`decode`] for an already parsed JSON value.
pub fn decode_value(value: Value) -> Result<LayoutDocument, DecodeError> {
    if let Some(version) = value.get("schema_version").and_then(Value::as_u64) {
        if version != u64::from(SCHEMA_VERSION) {
            return Err(DecodeError::UnsupportedSchemaVersion(version));
        }
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        DecodeError::FieldViolation {
            path,
            message: e.into_inner().to_string(),
        }
    })
}
