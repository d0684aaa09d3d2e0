#![allow(dead_code)]

use std::sync::Arc;

use axum::body::{to_bytes, Body, Bytes};
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use chrono::TimeZone;
use serde_json::Value;
use tower::ServiceExt;

use flexpdm_core::session::DEFAULT_TTL;
use flexpdm_core::store::{seed_password, PasswordConfig};
use flexpdm_core::{ManualClock, Store, StoreOptions};
use flexpdm_server::{router, AppState};

pub struct TestApp {
    pub app: Router,
    pub store: Store,
    pub clock: ManualClock,
}

pub fn seeded_store() -> (Store, ManualClock) {
    let clock = ManualClock::new(chrono::Utc.with_ymd_and_hms(2024, 5, 6, 8, 0, 0).unwrap());
    let store = Store::in_memory(StoreOptions {
        clock: Arc::new(clock.clone()),
        passwords: PasswordConfig::insecure_fast(),
    })
    .unwrap();
    store.seed_sample_data().unwrap();
    (store, clock)
}

pub fn app_over(store: Store) -> Router {
    router(AppState::new(store, DEFAULT_TTL), &[]).unwrap()
}

pub fn test_app() -> TestApp {
    let (store, clock) = seeded_store();
    TestApp {
        app: app_over(store.clone()),
        store,
        clock,
    }
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Bytes,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or(Value::Null)
    }

    pub fn code(&self) -> Option<String> {
        self.json()["code"].as_str().map(str::to_owned)
    }
}

pub async fn call_raw(
    app: &Router,
    method: Method,
    uri: &str,
    token: Option<&str>,
    body: Option<Vec<u8>>,
) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("X-Flex-Session", t);
    }
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    Reply {
        status,
        headers,
        body,
    }
}

pub async fn call(
    app: &Router,
    method: Method,
    uri: &str,
    token: Option<&str>,
    body: Option<Value>,
) -> Reply {
    call_raw(
        app,
        method,
        uri,
        token,
        body.map(|b| serde_json::to_vec(&b).unwrap()),
    )
    .await
}

pub async fn login(app: &Router, username: &str) -> String {
    let reply = call(
        app,
        Method::POST,
        "/api/login",
        None,
        Some(serde_json::json!({ "username": username, "password": seed_password(username) })),
    )
    .await;
    assert_eq!(
        reply.status,
        StatusCode::OK,
        "login {username}: {:?}",
        reply.body
    );
    reply.json()["token"].as_str().unwrap().to_owned()
}
