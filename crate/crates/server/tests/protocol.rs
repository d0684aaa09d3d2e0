mod common;

use std::collections::BTreeSet;

use axum::http::{Method, StatusCode};
use serde_json::{json, Value};

use common::{call, call_raw, login, test_app, Reply};
use flexpdm_core::{builtin_catalog, compose_default, Role};
use flexpdm_server::{ApiError, ErrorCode};

const GOLDEN: [(&str, u16); 14] = [
    ("malformed_request", 400),
    ("denied", 401),
    ("unauthenticated", 401),
    ("forbidden", 403),
    ("owner_mismatch", 403),
    ("role_forbidden", 403),
    ("not_found", 404),
    ("method_not_allowed", 405),
    ("revision_conflict", 409),
    ("duplicate_username", 409),
    ("validation_failed", 422),
    ("invalid_request", 422),
    ("rate_limited", 429),
    ("internal", 500),
];

#[test]
fn code_table_is_closed_and_fixed() {
    let got: Vec<(&str, u16)> = ErrorCode::ALL
        .iter()
        .map(|c| (c.as_str(), c.status().as_u16()))
        .collect();
    assert_eq!(got, GOLDEN);
    for code in ErrorCode::ALL {
        let v = serde_json::to_value(ApiError::new(code, "m")).unwrap();
        assert_eq!(v["code"], code.as_str());
        assert_eq!(v["http_status"], code.status().as_u16());
    }
}

/// Error bodies carry exactly these fields, `details` optional, and the
/// code agrees with the transport status.
fn assert_error_schema(reply: &Reply, code: &str) {
    let body = reply.json();
    let obj = body
        .as_object()
        .unwrap_or_else(|| panic!("not an object: {:?}", reply.body));
    let keys: BTreeSet<&str> = obj.keys().map(String::as_str).collect();
    let required: BTreeSet<&str> = ["code", "http_status", "message"].into();
    assert!(keys.is_superset(&required) && keys.len() <= 4, "{keys:?}");
    if keys.len() == 4 {
        assert!(keys.contains("details"));
    }
    assert_eq!(obj["code"], code);
    assert_eq!(obj["http_status"], reply.status.as_u16());
    assert!(obj["message"].as_str().is_some_and(|m| !m.is_empty()));
    let expected = GOLDEN.iter().find(|(c, _)| *c == code).unwrap().1;
    assert_eq!(reply.status.as_u16(), expected);
    assert_eq!(reply.headers["content-type"], "application/json");
}

#[tokio::test]
async fn every_reachable_code_has_the_schema() {
    let t = test_app();
    let app = &t.app;
    let eng = login(app, "engineer").await;
    let admin = login(app, "admin").await;
    let mut seen = BTreeSet::new();
    let mut check = |reply: Reply, code: &'static str| {
        assert_error_schema(&reply, code);
        seen.insert(code);
    };

    check(
        call_raw(
            app,
            Method::POST,
            "/api/login",
            None,
            Some(b"{nope".to_vec()),
        )
        .await,
        "malformed_request",
    );
    check(
        call(
            app,
            Method::POST,
            "/api/login",
            None,
            Some(json!({ "username": "engineer", "password": "x" })),
        )
        .await,
        "denied",
    );
    check(
        call(app, Method::GET, "/api/chat", None, None).await,
        "unauthenticated",
    );
    check(
        call(app, Method::GET, "/api/audit", Some(&eng), None).await,
        "forbidden",
    );

    let mut doc = compose_default(Role::Engineer, &builtin_catalog());
    doc.owner = "usr-9999".into();
    check(
        call(
            app,
            Method::PUT,
            "/api/layout",
            Some(&eng),
            Some(json!({ "document": doc })),
        )
        .await,
        "owner_mismatch",
    );
    let doc = compose_default(Role::StaffMember, &builtin_catalog());
    let mut doc = serde_json::to_value(doc).unwrap();
    doc["owner"] = json!("default:Engineer");
    check(
        call(
            app,
            Method::PUT,
            "/api/layout",
            Some(&eng),
            Some(json!({ "document": doc })),
        )
        .await,
        "role_forbidden",
    );
    check(
        call(app, Method::GET, "/api/nothing-here", None, None).await,
        "not_found",
    );
    check(
        call(app, Method::PATCH, "/api/layout", Some(&eng), None).await,
        "method_not_allowed",
    );

    let doc = compose_default(Role::Engineer, &builtin_catalog());
    let put = call(
        app,
        Method::PUT,
        "/api/layout",
        Some(&eng),
        Some(json!({ "document": doc })),
    )
    .await;
    assert_eq!(put.status, StatusCode::OK);
    check(
        call(
            app,
            Method::PUT,
            "/api/layout",
            Some(&eng),
            Some(json!({ "document": doc })),
        )
        .await,
        "revision_conflict",
    );
    check(
        call(
            app,
            Method::POST,
            "/api/users",
            Some(&admin),
            Some(json!({ "username": "engineer", "password": "pw", "role": "Engineer" })),
        )
        .await,
        "duplicate_username",
    );

    let mut doc = compose_default(Role::Engineer, &builtin_catalog());
    doc.theme.font_family = "Wingdings".into();
    check(
        call(
            app,
            Method::PUT,
            "/api/layout",
            Some(&eng),
            Some(json!({ "document": doc })),
        )
        .await,
        "validation_failed",
    );
    check(
        call(app, Method::GET, "/api/chat?limit=1001", Some(&eng), None).await,
        "invalid_request",
    );
    for _ in 0..10 {
        call(
            app,
            Method::POST,
            "/api/login",
            None,
            Some(json!({ "username": "pm", "password": "x" })),
        )
        .await;
    }
    check(
        call(
            app,
            Method::POST,
            "/api/login",
            None,
            Some(json!({ "username": "pm", "password": "x" })),
        )
        .await,
        "rate_limited",
    );

    let unreachable: BTreeSet<&str> = GOLDEN
        .iter()
        .map(|(c, _)| *c)
        .filter(|c| !seen.contains(c))
        .collect();
    assert_eq!(unreachable, BTreeSet::from(["internal"]));
}

#[tokio::test]
async fn login_denials_are_indistinguishable() {
    let t = test_app();
    let wrong = call(
        &t.app,
        Method::POST,
        "/api/login",
        None,
        Some(json!({ "username": "engineer", "password": "wrong" })),
    )
    .await;
    let unknown = call(
        &t.app,
        Method::POST,
        "/api/login",
        None,
        Some(json!({ "username": "nobody", "password": "wrong" })),
    )
    .await;
    assert_eq!(wrong.status, StatusCode::UNAUTHORIZED);
    assert_eq!((wrong.status, wrong.body), (unknown.status, unknown.body));
}

#[tokio::test]
async fn login_returns_token_role_and_expiry() {
    let t = test_app();
    let reply = call(
        &t.app,
        Method::POST,
        "/api/login",
        None,
        Some(json!({ "username": "engineer", "password": "engineer-pass" })),
    )
    .await;
    assert_eq!(reply.status, StatusCode::OK);
    let body = reply.json();
    assert_eq!(body["role"], "Engineer");
    assert_eq!(body["token"].as_str().unwrap().len(), 43);
    assert_eq!(body["expires_at"], "2024-05-06T16:00:00Z");
}

#[tokio::test]
async fn bad_bodies_and_limits_are_422() {
    let t = test_app();
    let eng = login(&t.app, "engineer").await;
    for (method, uri, body) in [
        (Method::POST, "/api/chat", json!({ "text": "wrong field" })),
        (Method::POST, "/api/chat", json!({ "body": "" })),
        (Method::PUT, "/api/layout", json!({ "doc": {} })),
        (
            Method::PUT,
            "/api/layout",
            json!({ "document": { "schema_version": 1 } }),
        ),
        (Method::PUT, "/api/user/details", json!({ "full_name": 3 })),
    ] {
        let reply = call(&t.app, method.clone(), uri, Some(&eng), Some(body)).await;
        assert_eq!(
            reply.code().as_deref(),
            Some("invalid_request"),
            "{method} {uri}"
        );
    }
    for uri in [
        "/api/chat?limit=0",
        "/api/chat?limit=x",
        "/api/chat?since_seq=-1",
    ] {
        let reply = call(&t.app, Method::GET, uri, Some(&eng), None).await;
        assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY, "{uri}");
    }
    let reply = call(
        &t.app,
        Method::GET,
        "/api/chat?limit=1000",
        Some(&eng),
        None,
    )
    .await;
    assert_eq!(reply.status, StatusCode::OK);
}

#[tokio::test]
async fn field_violations_name_the_path() {
    let t = test_app();
    let eng = login(&t.app, "engineer").await;
    let mut doc: Value =
        serde_json::to_value(compose_default(Role::Engineer, &builtin_catalog())).unwrap();
    doc["instances"][1]["placement"]["width"] = json!(0);
    let reply = call(
        &t.app,
        Method::PUT,
        "/api/layout",
        Some(&eng),
        Some(json!({ "document": doc })),
    )
    .await;
    assert_eq!(reply.code().as_deref(), Some("invalid_request"));
    assert_eq!(reply.json()["details"]["path"], "instances[1].placement");
}

#[tokio::test]
async fn cors_allows_only_listed_origins() {
    use axum::body::Body;
    use axum::http::Request;
    use tower::ServiceExt;

    let (store, _) = common::seeded_store();
    let app = flexpdm_server::router(
        flexpdm_server::AppState::new(store, flexpdm_core::session::DEFAULT_TTL),
        &["http://localhost:5173".to_string()],
    )
    .unwrap();
    let preflight = |origin: &'static str| {
        Request::builder()
            .method(Method::OPTIONS)
            .uri("/api/layout")
            .header("origin", origin)
            .header("access-control-request-method", "PUT")
            .header("access-control-request-headers", "x-flex-session")
            .body(Body::empty())
            .unwrap()
    };
    let ok = app
        .clone()
        .oneshot(preflight("http://localhost:5173"))
        .await
        .unwrap();
    assert_eq!(
        ok.headers()["access-control-allow-origin"],
        "http://localhost:5173"
    );
    let other = app.oneshot(preflight("http://evil.example")).await.unwrap();
    assert!(other.headers().get("access-control-allow-origin").is_none());
}
