use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::Response;
use serde::{Deserialize, Serialize};
use serde_json::json;

use flexpdm_core::layout::{FONT_FAMILIES, MAX_FONT_SIZE_PT, MIN_FONT_SIZE_PT};
use flexpdm_core::store::{AuditEventType, AuditFilter, UserDetails, UserRecord};
use flexpdm_core::{list_visible, Role};

use super::{blocking, parse_body, Caller, Params, QueryArgs};
use crate::access::{authorize, Endpoint};
use crate::error::ApiError;
use crate::{json_response, AppState};

pub(crate) async fn components(State(state): State<AppState>, caller: Caller) -> Response {
    json_response(
        StatusCode::OK,
        &list_visible(&state.registry, caller.principal.role()),
    )
}

/// The choices a theme editor may offer.
pub(crate) async fn theme() -> Response {
    json_response(
        StatusCode::OK,
        &json!({
            "font_families": FONT_FAMILIES,
            "font_size_pt": { "min": MIN_FONT_SIZE_PT, "max": MAX_FONT_SIZE_PT },
            "color_format": "#RRGGBB",
        }),
    )
}

/// A user as other clients see it: never the password hash.
#[derive(Serialize)]
struct UserView {
    user_id: String,
    username: String,
    role: Role,
    details: UserDetails,
}

impl From<UserRecord> for UserView {
    fn from(u: UserRecord) -> Self {
        UserView {
            user_id: u.user_id,
            username: u.username,
            role: u.role,
            details: u.details,
        }
    }
}

fn user_id(caller: &Caller) -> String {
    caller.principal.user_id().unwrap_or_default().to_owned()
}

pub(crate) async fn get_details(
    State(state): State<AppState>,
    caller: Caller,
) -> Result<Response, ApiError> {
    authorize(Endpoint::GetDetails, &caller.principal)?;
    let id = user_id(&caller);
    let store = state.store.clone();
    let user = blocking(move || store.get_user(&id)).await??;
    Ok(json_response(StatusCode::OK, &UserView::from(user)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DetailsBody {
    full_name: String,
    email: String,
    department: String,
}

pub(crate) async fn put_details(
    State(state): State<AppState>,
    caller: Caller,
    body: Bytes,
) -> Result<Response, ApiError> {
    authorize(Endpoint::PutDetails, &caller.principal)?;
    let b: DetailsBody = parse_body(&body)?;
    let details = UserDetails {
        full_name: b.full_name,
        email: b.email,
        department: b.department,
    };
    let id = user_id(&caller);
    let store = state.store.clone();
    let user = blocking(move || store.update_details(&id, details)).await??;
    Ok(json_response(StatusCode::OK, &UserView::from(user)))
}

pub(crate) async fn audit(
    State(state): State<AppState>,
    caller: Caller,
    params: Params,
) -> Result<Response, ApiError> {
    authorize(Endpoint::Audit, &caller.principal)?;
    let q = QueryArgs::from(params)?;
    let filter = AuditFilter {
        user_id: q.parse("user_id")?,
        event_type: q.parse::<AuditEventType>("event_type")?,
        since_seq: q.parse("since_seq")?,
    };
    let limit = q.limit()?;
    let store = state.store.clone();
    let entries = blocking(move || store.query_audit(&filter, limit)).await??;
    Ok(json_response(StatusCode::OK, &entries))
}

pub(crate) async fn get_chat(
    State(state): State<AppState>,
    caller: Caller,
    params: Params,
) -> Result<Response, ApiError> {
    authorize(Endpoint::GetChat, &caller.principal)?;
    let q = QueryArgs::from(params)?;
    let since = q.parse("since_seq")?.unwrap_or(0);
    let limit = q.limit()?;
    let store = state.store.clone();
    let messages = blocking(move || store.list_chat(since, limit)).await??;
    Ok(json_response(StatusCode::OK, &messages))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChatBody {
    body: String,
}

pub(crate) async fn post_chat(
    State(state): State<AppState>,
    caller: Caller,
    body: Bytes,
) -> Result<Response, ApiError> {
    authorize(Endpoint::PostChat, &caller.principal)?;
    let msg: ChatBody = parse_body(&body)?;
    let id = user_id(&caller);
    let store = state.store.clone();
    let seq = blocking(move || store.post_chat(&id, &msg.body)).await??;
    Ok(json_response(StatusCode::CREATED, &json!({ "seq": seq })))
}

pub(crate) async fn products(
    State(state): State<AppState>,
    caller: Caller,
) -> Result<Response, ApiError> {
    authorize(Endpoint::Products, &caller.principal)?;
    let store = state.store.clone();
    let items = blocking(move || store.products()).await??;
    Ok(json_response(StatusCode::OK, &items))
}

pub(crate) async fn projects(
    State(state): State<AppState>,
    caller: Caller,
) -> Result<Response, ApiError> {
    authorize(Endpoint::Projects, &caller.principal)?;
    let store = state.store.clone();
    let items = blocking(move || store.projects()).await??;
    Ok(json_response(StatusCode::OK, &items))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewUser {
    username: String,
    password: String,
    role: Role,
    #[serde(default)]
    details: UserDetails,
}

pub(crate) async fn create_user(
    State(state): State<AppState>,
    caller: Caller,
    body: Bytes,
) -> Result<Response, ApiError> {
    authorize(Endpoint::CreateUser, &caller.principal)?;
    let u: NewUser = parse_body(&body)?;
    let store = state.store.clone();
    let user =
        blocking(move || store.create_user(&u.username, &u.password, u.role, u.details)).await??;
    Ok(json_response(StatusCode::CREATED, &UserView::from(user)))
}
