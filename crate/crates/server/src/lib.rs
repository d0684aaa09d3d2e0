//! HTTP+JSON API over the flexpdm store.
//!
//! Handlers hold no state of their own: every request resolves its caller
//! from the `X-Flex-Session` header and goes straight to the store, so two
//! servers over one store answer identically.

pub mod access;
pub mod error;
mod routes;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::{header, HeaderName, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Router;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

use flexpdm_core::canonical::to_canonical_vec;
use flexpdm_core::{builtin_catalog, RegistrySnapshot, SessionManager, Store};

pub use access::{authorize, Access, Endpoint};
pub use error::{ApiError, ErrorCode};

pub const SESSION_HEADER: &str = "x-flex-session";
pub const READ_ONLY_HEADER: &str = "x-flex-read-only";
pub const DEFAULT_LIMIT: usize = 100;
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Clone)]
pub struct AppState {
    pub store: Store,
    pub sessions: Arc<SessionManager>,
    pub registry: Arc<RegistrySnapshot>,
}

impl AppState {
    pub fn new(store: Store, session_ttl: chrono::Duration) -> Self {
        AppState {
            sessions: Arc::new(SessionManager::new(store.clone(), session_ttl)),
            store,
            registry: Arc::new(builtin_catalog()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub bind: SocketAddr,
    pub store_path: PathBuf,
    pub session_ttl: chrono::Duration,
    pub cors_origins: Vec<String>,
}

/// The full API. `cors_origins` empty means no CORS headers at all.
pub fn router(state: AppState, cors_origins: &[String]) -> Result<Router, ApiError> {
    let app = routes::routes().with_state(state);
    if cors_origins.is_empty() {
        return Ok(app);
    }
    let origins = cors_origins
        .iter()
        .map(|o| {
            HeaderValue::from_str(o)
                .map_err(|_| ApiError::invalid(format!("bad CORS origin `{o}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::list(origins))
        .allow_methods([Method::GET, Method::PUT, Method::POST, Method::DELETE])
        .allow_headers([
            header::CONTENT_TYPE,
            HeaderName::from_static(SESSION_HEADER),
        ])
        .expose_headers([HeaderName::from_static(READ_ONLY_HEADER)]);
    Ok(app.layer(cors))
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    app: Router,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
}

pub(crate) fn json_response(status: StatusCode, body: &impl Serialize) -> Response {
    match to_canonical_vec(body) {
        Ok(bytes) => json_bytes(status, bytes),
        Err(e) => ApiError::internal(e).into_response(),
    }
}

pub(crate) fn json_bytes(status: StatusCode, bytes: Vec<u8>) -> Response {
    let mut response = (status, bytes).into_response();
    response.headers_mut().insert(
        header::CONTENT_TYPE,
        HeaderValue::from_static("application/json"),
    );
    response
}
