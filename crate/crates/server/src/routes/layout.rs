use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use serde::Deserialize;
use serde_json::{json, Value};

use flexpdm_core::layout::decode_value;
use flexpdm_core::store::AuditEventType;
use flexpdm_core::{compose_default, encode, validate, LayoutDocument, Principal, Right};

use super::{blocking, parse_body, Caller};
use crate::access::{authorize, Endpoint};
use crate::error::{ApiError, ErrorCode};
use crate::{json_bytes, json_response, AppState, READ_ONLY_HEADER};

/// The caller's saved layout, else the role default. The body is the
/// document alone; whether the caller may save is in `X-Flex-Read-Only`.
pub(crate) async fn get_layout(
    State(state): State<AppState>,
    caller: Caller,
) -> Result<Response, ApiError> {
    let principal = caller.principal;
    let stored = match principal.user_id() {
        Some(user_id) => {
            let store = state.store.clone();
            let user_id = user_id.to_owned();
            blocking(move || store.load_layout(&user_id)).await??
        }
        None => None,
    };
    let doc = stored.unwrap_or_else(|| compose_default(principal.role(), &state.registry));
    let mut response = json_bytes(StatusCode::OK, encode(&doc));
    let read_only = !principal.has(Right::EditOwnLayout);
    response.headers_mut().insert(
        READ_ONLY_HEADER,
        HeaderValue::from_static(if read_only { "true" } else { "false" }),
    );
    Ok(response)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PutLayout {
    document: Value,
}

fn caller_identity(principal: &Principal) -> (String, flexpdm_core::Role) {
    (
        principal.user_id().unwrap_or_default().to_owned(),
        principal.role(),
    )
}

/// Saves the caller's layout. The document may name the caller or the
/// role default as owner (a client editing a fresh default); it is stored
/// under the caller either way.
pub(crate) async fn put_layout(
    State(state): State<AppState>,
    caller: Caller,
    body: Bytes,
) -> Result<Response, ApiError> {
    authorize(Endpoint::PutLayout, &caller.principal)?;
    let (user_id, role) = caller_identity(&caller.principal);
    let req: PutLayout = parse_body(&body)?;
    let mut doc = decode_value(req.document)?;

    if doc.owner != user_id && doc.owner != LayoutDocument::default_owner(role) {
        return Err(ApiError::new(
            ErrorCode::OwnerMismatch,
            format!("document belongs to `{}`", doc.owner),
        ));
    }
    if doc.role != role {
        return Err(ApiError::new(
            ErrorCode::RoleForbidden,
            format!("document is for {} but the caller is {role}", doc.role),
        ));
    }
    let report = validate(&doc, &state.registry);
    if !report.is_empty() {
        let store = state.store.clone();
        let uid = user_id.clone();
        let codes = report.codes();
        blocking(move || {
            store.append_audit(
                &uid,
                AuditEventType::LayoutEditRejected,
                json!({ "codes": codes }),
            )
        })
        .await??;
        return Err(
            ApiError::new(ErrorCode::ValidationFailed, "layout failed validation")
                .with_details(report),
        );
    }

    doc.owner = user_id.clone();
    let expected = doc.revision;
    let store = state.store.clone();
    let registry = state.registry.clone();
    let revision =
        blocking(move || store.save_layout(&user_id, &doc, expected, &registry)).await??;
    Ok(json_response(
        StatusCode::OK,
        &json!({ "revision": revision }),
    ))
}

pub(crate) async fn delete_layout(
    State(state): State<AppState>,
    caller: Caller,
) -> Result<Response, ApiError> {
    authorize(Endpoint::DeleteLayout, &caller.principal)?;
    let (user_id, _) = caller_identity(&caller.principal);
    let store = state.store.clone();
    blocking(move || store.delete_layout(&user_id)).await??;
    Ok(StatusCode::NO_CONTENT.into_response())
}
