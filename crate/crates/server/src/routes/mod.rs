mod layout;
mod misc;
mod session;

use std::collections::HashMap;
use std::convert::Infallible;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{FromRequestParts, Query};
use axum::http::request::Parts;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;

use flexpdm_core::store::MAX_QUERY_LIMIT;
use flexpdm_core::Principal;

use crate::error::{ApiError, ErrorCode};
use crate::{AppState, DEFAULT_LIMIT, SESSION_HEADER};

pub(crate) fn routes() -> Router<AppState> {
    Router::new()
        .route("/api/login", post(session::login))
        .route("/api/logout", post(session::logout))
        .route(
            "/api/layout",
            get(layout::get_layout)
                .put(layout::put_layout)
                .delete(layout::delete_layout),
        )
        .route("/api/components", get(misc::components))
        .route("/api/theme", get(misc::theme))
        .route(
            "/api/user/details",
            get(misc::get_details).put(misc::put_details),
        )
        .route("/api/audit", get(misc::audit))
        .route("/api/chat", get(misc::get_chat).post(misc::post_chat))
        .route("/api/pdm/products", get(misc::products))
        .route("/api/pdm/projects", get(misc::projects))
        .route("/api/users", post(misc::create_user))
        .method_not_allowed_fallback(|| async {
            ApiError::new(ErrorCode::MethodNotAllowed, "method not allowed").into_response()
        })
        .fallback(|| async {
            ApiError::new(ErrorCode::NotFound, "no such endpoint").into_response()
        })
}

/// The resolved caller of a request. Missing, unknown and expired tokens
/// all resolve to a guest.
pub(crate) struct Caller {
    pub principal: Principal,
    pub token: Option<String>,
}

impl FromRequestParts<AppState> for Caller {
    type Rejection = Infallible;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Infallible> {
        let token = parts
            .headers
            .get(SESSION_HEADER)
            .and_then(|v| v.to_str().ok())
            .map(str::to_owned);
        let sessions = state.sessions.clone();
        let lookup = token.clone();
        let principal =
            tokio::task::spawn_blocking(move || sessions.authenticate(lookup.as_deref()))
                .await
                .unwrap_or(Principal::Guest);
        Ok(Caller { principal, token })
    }
}

/// Runs store work off the async executor.
pub(crate) async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> T + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(ApiError::internal)
}

/// 400 for bytes that are not JSON, 422 for JSON of the wrong shape.
pub(crate) fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let value: serde_json::Value = serde_json::from_slice(body).map_err(|e| {
        ApiError::new(
            ErrorCode::MalformedRequest,
            format!("body is not valid JSON: {e}"),
        )
    })?;
    serde_json::from_value(value).map_err(|e| ApiError::invalid(e.to_string()))
}

pub(crate) type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

pub(crate) struct QueryArgs(HashMap<String, String>);

impl QueryArgs {
    pub fn from(params: Params) -> Result<Self, ApiError> {
        params
            .map(|Query(map)| QueryArgs(map))
            .map_err(|e| ApiError::invalid(e.body_text()))
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ApiError> {
        self.0
            .get(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|_| ApiError::invalid(format!("bad value for `{key}`: `{raw}`")))
            })
            .transpose()
    }

    pub fn limit(&self) -> Result<usize, ApiError> {
        let limit = self.parse("limit")?.unwrap_or(DEFAULT_LIMIT);
        if limit == 0 || limit > MAX_QUERY_LIMIT {
            return Err(ApiError::invalid(format!(
                "limit must be within 1..={MAX_QUERY_LIMIT}"
            )));
        }
        Ok(limit)
    }
}
