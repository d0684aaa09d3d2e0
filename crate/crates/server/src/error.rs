use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use serde::Serialize;
use serde_json::Value;

use flexpdm_core::canonical::to_canonical_vec;
use flexpdm_core::layout::DecodeError;
use flexpdm_core::{AuthError, StoreError};

/// The closed set of machine-readable error codes. Each code has exactly
/// one HTTP status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    MalformedRequest,
    Denied,
    Unauthenticated,
    Forbidden,
    OwnerMismatch,
    RoleForbidden,
    NotFound,
    MethodNotAllowed,
    RevisionConflict,
    DuplicateUsername,
    ValidationFailed,
    InvalidRequest,
    RateLimited,
    Internal,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 14] = [
        ErrorCode::MalformedRequest,
        ErrorCode::Denied,
        ErrorCode::Unauthenticated,
        ErrorCode::Forbidden,
        ErrorCode::OwnerMismatch,
        ErrorCode::RoleForbidden,
        ErrorCode::NotFound,
        ErrorCode::MethodNotAllowed,
        ErrorCode::RevisionConflict,
        ErrorCode::DuplicateUsername,
        ErrorCode::ValidationFailed,
        ErrorCode::InvalidRequest,
        ErrorCode::RateLimited,
        ErrorCode::Internal,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            ErrorCode::MalformedRequest => "malformed_request",
            ErrorCode::Denied => "denied",
            ErrorCode::Unauthenticated => "unauthenticated",
            ErrorCode::Forbidden => "forbidden",
            ErrorCode::OwnerMismatch => "owner_mismatch",
            ErrorCode::RoleForbidden => "role_forbidden",
            ErrorCode::NotFound => "not_found",
            ErrorCode::MethodNotAllowed => "method_not_allowed",
            ErrorCode::RevisionConflict => "revision_conflict",
            ErrorCode::DuplicateUsername => "duplicate_username",
            ErrorCode::ValidationFailed => "validation_failed",
            ErrorCode::InvalidRequest => "invalid_request",
            ErrorCode::RateLimited => "rate_limited",
            ErrorCode::Internal => "internal",
        }
    }

    pub const fn status(self) -> StatusCode {
        match self {
            ErrorCode::MalformedRequest => StatusCode::BAD_REQUEST,
            ErrorCode::Denied | ErrorCode::Unauthenticated => StatusCode::UNAUTHORIZED,
            ErrorCode::Forbidden | ErrorCode::OwnerMismatch | ErrorCode::RoleForbidden => {
                StatusCode::FORBIDDEN
            }
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::MethodNotAllowed => StatusCode::METHOD_NOT_ALLOWED,
            ErrorCode::RevisionConflict | ErrorCode::DuplicateUsername => StatusCode::CONFLICT,
            ErrorCode::ValidationFailed | ErrorCode::InvalidRequest => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ErrorCode::RateLimited => StatusCode::TOO_MANY_REQUESTS,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub http_status: u16,
    pub code: ErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            http_status: code.status().as_u16(),
            code,
            message: message.into(),
            details: None,
        }
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).ok();
        self
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::InvalidRequest, message)
    }

    pub fn internal(message: impl std::fmt::Display) -> Self {
        tracing::error!("internal error: {message}");
        ApiError::new(ErrorCode::Internal, "internal server error")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = to_canonical_vec(&self).expect("errors serialize");
        let mut response = (self.code.status(), body).into_response();
        response.headers_mut().insert(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/json"),
        );
        response
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::ValidationFailed(report) => {
                ApiError::new(ErrorCode::ValidationFailed, "layout failed validation")
                    .with_details(report)
            }
            StoreError::RevisionConflict { expected, stored } => ApiError::new(
                ErrorCode::RevisionConflict,
                "the layout was changed since it was loaded",
            )
            .with_details(serde_json::json!({ "expected": expected, "stored": stored })),
            StoreError::DuplicateUsername(_) => {
                ApiError::new(ErrorCode::DuplicateUsername, e.to_string())
            }
            StoreError::Denied => denied(),
            StoreError::UnknownUser(_) => ApiError::new(ErrorCode::NotFound, e.to_string()),
            StoreError::InvalidUsername(_)
            | StoreError::EmptyPassword
            | StoreError::EmptyBody
            | StoreError::BodyTooLong { .. }
            | StoreError::BadFilter(_) => ApiError::invalid(e.to_string()),
            StoreError::StoreNotEmpty
            | StoreError::Corrupt(_)
            | StoreError::Backend(_)
            | StoreError::Io(_) => ApiError::internal(e),
        }
    }
}

/// The single response for every failed login.
pub fn denied() -> ApiError {
    ApiError::new(ErrorCode::Denied, "invalid username or password")
}

impl From<AuthError> for ApiError {
    fn from(e: AuthError) -> Self {
        match e {
            AuthError::Denied => denied(),
            AuthError::RateLimited => ApiError::new(ErrorCode::RateLimited, e.to_string()),
            AuthError::Store(e) => e.into(),
        }
    }
}

impl From<DecodeError> for ApiError {
    fn from(e: DecodeError) -> Self {
        let details = match &e {
            DecodeError::FieldViolation { path, .. } => serde_json::json!({ "path": path }),
            _ => Value::Null,
        };
        let err = ApiError::invalid(e.to_string());
        if details.is_null() {
            err
        } else {
            err.with_details(details)
        }
    }
}
