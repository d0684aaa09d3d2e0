use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Deserialize;
use serde_json::json;

use super::{blocking, parse_body, Caller};
use crate::error::ApiError;
use crate::{json_response, AppState};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoginRequest {
    username: String,
    password: String,
}

pub(crate) async fn login(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: LoginRequest = parse_body(&body)?;
    let sessions = state.sessions.clone();
    let token = blocking(move || sessions.login(&req.username, &req.password)).await??;
    Ok(json_response(
        StatusCode::OK,
        &json!({ "token": token.token, "role": token.role, "expires_at": token.expires_at }),
    ))
}

/// Always 204; logging out an unknown or expired token is a no-op.
pub(crate) async fn logout(
    State(state): State<AppState>,
    caller: Caller,
) -> Result<Response, ApiError> {
    if let Some(token) = caller.token {
        let sessions = state.sessions.clone();
        blocking(move || sessions.logout(&token)).await??;
    }
    Ok(StatusCode::NO_CONTENT.into_response())
}
