//! Acceptance criteria 1-7, run against the `flexpdm` binary and a live
//! server on a loopback port. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use reqwest::{Method, StatusCode};
use serde_json::{json, Value};

use flexpdm_core::layout::{
    apply_edit, decode, diff, encode, find_free_slot, patch, validate, LayoutEdit, Placement,
    ViolationCode,
};
use flexpdm_core::store::seed_password;
use flexpdm_core::testkit::{
    brute_force_free_slot, brute_force_overlaps, random_doc, random_edit, random_grid,
    random_target, random_valid_doc, ChaCha8Rng,
};
use flexpdm_core::{builtin_catalog, ComponentInstance, LayoutDocument, Role};

// Pinned parameters and tolerances.
const AC5_CASES: u64 = 1000;
const AC5_SEED: u64 = 0x00F1_E7D0;
const AC5_MAX_ROWS: u32 = 40;
const AC6_TRIALS: usize = 100;
const AC7_SAMPLES: usize = 200;
/// 50 ms target plus the 50% tolerance.
const AC7_BUDGET: Duration = Duration::from_millis(75);

const USERS: [(&str, Role); 5] = [
    ("staff", Role::StaffMember),
    ("engineer", Role::Engineer),
    ("pm", Role::ProjectManager),
    ("businessman", Role::Businessman),
    ("admin", Role::Administrator),
];

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn flexpdm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_flexpdm"))
        .args(args)
        .output()
        .expect("flexpdm runs")
}

/// A seeded store on disk and a `flexpdm serve` process over it.
struct Server {
    child: Child,
    base: String,
    http: reqwest::Client,
    _dir: tempfile::TempDir,
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

struct Reply {
    status: StatusCode,
    read_only: Option<String>,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or(Value::Null)
    }
}

impl Server {
    fn start() -> Server {
        let dir = tempfile::tempdir().unwrap();
        let store = dir.path().join("pdm.redb");
        let store = store.to_str().unwrap();
        let seeded = flexpdm(&["seed", "--store", store]);
        assert!(seeded.status.success(), "seed failed: {seeded:?}");
        let mut child = Command::new(env!("CARGO_BIN_EXE_flexpdm"))
            .args(["serve", "--store", store, "--bind", "127.0.0.1:0"])
            .env("RUST_LOG", "warn")
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let addr = line
            .trim()
            .strip_prefix("flexpdm listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"));
        Server {
            child,
            base: format!("http://{addr}"),
            http: reqwest::Client::new(),
            _dir: dir,
        }
    }

    async fn call(
        &self,
        method: Method,
        path: &str,
        token: Option<&str>,
        body: Option<&Value>,
    ) -> Reply {
        let mut req = self.http.request(method, format!("{}{path}", self.base));
        if let Some(t) = token {
            req = req.header("X-Flex-Session", t);
        }
        if let Some(b) = body {
            req = req.json(b);
        }
        let resp = req.send().await.expect("request");
        Reply {
            status: resp.status(),
            read_only: resp
                .headers()
                .get("x-flex-read-only")
                .map(|v| v.to_str().unwrap().to_owned()),
            body: resp.bytes().await.unwrap().to_vec(),
        }
    }

    async fn login(&self, username: &str) -> Result<String, String> {
        let body = json!({ "username": username, "password": seed_password(username) });
        let reply = self
            .call(Method::POST, "/api/login", None, Some(&body))
            .await;
        ensure!(
            reply.status == StatusCode::OK,
            "login {username}: {}",
            reply.status
        );
        Ok(reply.json()["token"]
            .as_str()
            .unwrap_or_default()
            .to_owned())
    }

    async fn get_layout(&self, token: Option<&str>) -> Result<LayoutDocument, String> {
        let reply = self.call(Method::GET, "/api/layout", token, None).await;
        ensure!(
            reply.status == StatusCode::OK,
            "GET /api/layout: {}",
            reply.status
        );
        decode(&reply.body).map_err(|e| e.to_string())
    }

    async fn put_layout(&self, token: &str, doc: &LayoutDocument) -> Reply {
        self.call(
            Method::PUT,
            "/api/layout",
            Some(token),
            Some(&json!({ "document": doc })),
        )
        .await
    }
}

/// Moves the first instance below everything else.
fn moved(doc: &LayoutDocument) -> Result<LayoutDocument, String> {
    let first = doc.instances.first().ok_or("empty layout")?;
    let bottom = doc
        .instances
        .iter()
        .map(|i| i.placement.row + i.placement.height)
        .max()
        .unwrap();
    let p = first.placement;
    let edit = LayoutEdit::MoveResize {
        instance_id: first.instance_id.clone(),
        placement: Placement::new(0, bottom, p.width, p.height),
    };
    apply_edit(doc, &edit, &builtin_catalog()).map_err(|e| e.to_string())
}

async fn ac1_default_layouts() -> Check {
    let server = Server::start();
    for role in Role::ALL {
        let expected = flexpdm(&["compose-default", "--role", role.as_str()]).stdout;
        let token = match USERS.iter().find(|(_, r)| *r == role) {
            Some((user, _)) => Some(server.login(user).await?),
            None => None,
        };
        let reply = server
            .call(Method::GET, "/api/layout", token.as_deref(), None)
            .await;
        ensure!(
            reply.status == StatusCode::OK,
            "{role}: status {}",
            reply.status
        );
        ensure!(
            reply.body == expected,
            "{role}: body differs from compose-default"
        );
        let doc = decode(&reply.body).map_err(|e| e.to_string())?;
        ensure!(doc.revision == 0, "{role}: revision {}", doc.revision);
        let want_ro = if role == Role::Guest { "true" } else { "false" };
        ensure!(
            reply.read_only.as_deref() == Some(want_ro),
            "{role}: read-only flag {:?}",
            reply.read_only
        );
    }
    Ok("6/6 roles byte-identical to compose-default, revision 0".into())
}

async fn ac2_save_and_reuse() -> Check {
    let server = Server::start();
    for (user, role) in USERS {
        let token = server.login(user).await?;
        let before = server.get_layout(Some(&token)).await?;
        let mut modified = moved(&before)?;
        let reply = server.put_layout(&token, &modified).await;
        ensure!(
            reply.status == StatusCode::OK,
            "{role}: PUT {} {}",
            reply.status,
            String::from_utf8_lossy(&reply.body)
        );
        let logout = server
            .call(Method::POST, "/api/logout", Some(&token), None)
            .await;
        ensure!(
            logout.status == StatusCode::NO_CONTENT,
            "{role}: logout {}",
            logout.status
        );
        let stale = server
            .call(Method::GET, "/api/user/details", Some(&token), None)
            .await;
        ensure!(
            stale.status == StatusCode::UNAUTHORIZED,
            "{role}: token survived logout"
        );

        let token = server.login(user).await?;
        let after = server.get_layout(Some(&token)).await?;
        modified.owner = after.owner.clone();
        modified.revision = reply.json()["revision"].as_u64().unwrap_or_default();
        ensure!(
            after == modified,
            "{role}: reloaded layout differs from the saved one"
        );
        ensure!(
            after.owner != LayoutDocument::default_owner(role),
            "{role}: owner not rewritten"
        );
    }
    Ok("GET, MoveResize, PUT, logout, login, GET verbatim for 5 editing roles".into())
}

async fn ac3_save_again() -> Check {
    let server = Server::start();
    for (user, role) in USERS {
        let token = server.login(user).await?;
        let mut doc = server.get_layout(Some(&token)).await?;
        for expected in [1u64, 2] {
            doc = moved(&doc)?;
            doc.theme.font_size_pt = 10 + expected as u32;
            let reply = server.put_layout(&token, &doc).await;
            ensure!(
                reply.status == StatusCode::OK,
                "{role}: save {expected}: {}",
                reply.status
            );
            let revision = reply.json()["revision"].as_u64();
            ensure!(
                revision == Some(expected),
                "{role}: revision {revision:?}, wanted {expected}"
            );
            let reloaded = server.get_layout(Some(&token)).await?;
            doc.revision = expected;
            doc.owner = reloaded.owner.clone();
            ensure!(
                reloaded == doc,
                "{role}: reload after save {expected} differs"
            );
        }
    }
    Ok("revisions 0 -> 1 -> 2, each reload equals the latest save, 5 roles".into())
}

// Hand-written rights table. G guest, S staff member, E engineer,
// P project manager, B businessman, A administrator.
const RIGHTS_TABLE: &[(&str, &str, &str)] = &[
    ("POST", "/api/login", "GSEPBA"),
    ("POST", "/api/logout", "GSEPBA"),
    ("GET", "/api/layout", "GSEPBA"),
    ("PUT", "/api/layout", "SEPBA"),
    ("DELETE", "/api/layout", "SEPBA"),
    ("GET", "/api/components", "GSEPBA"),
    ("GET", "/api/theme", "GSEPBA"),
    ("GET", "/api/user/details", "SEPBA"),
    ("PUT", "/api/user/details", "SEPBA"),
    ("GET", "/api/audit", "A"),
    ("GET", "/api/chat", "SEPBA"),
    ("POST", "/api/chat", "SEPBA"),
    ("GET", "/api/pdm/products", "GSEPBA"),
    ("GET", "/api/pdm/projects", "GSEPBA"),
    ("POST", "/api/users", "A"),
];

fn letter(role: Role) -> char {
    match role {
        Role::Guest => 'G',
        Role::StaffMember => 'S',
        Role::Engineer => 'E',
        Role::ProjectManager => 'P',
        Role::Businessman => 'B',
        Role::Administrator => 'A',
    }
}

fn matrix_body(method: &str, path: &str, role: Role) -> Option<Value> {
    let reg = builtin_catalog();
    match (method, path) {
        ("POST", "/api/login") => {
            Some(json!({ "username": "engineer", "password": "engineer-pass" }))
        }
        ("PUT", "/api/layout") => {
            Some(json!({ "document": flexpdm_core::compose_default(role, &reg) }))
        }
        ("PUT", "/api/user/details") => {
            Some(json!({ "full_name": "A", "email": "a@b.c", "department": "D" }))
        }
        ("POST", "/api/chat") => Some(json!({ "body": "hello" })),
        ("POST", "/api/users") => Some(json!({
            "username": format!("created-by-{}", letter(role)), "password": "pw", "role": "Guest"
        })),
        _ => None,
    }
}

async fn ac4_authorization() -> Check {
    let server = Server::start();
    let mut pairs = 0;
    for (method, path, allowed) in RIGHTS_TABLE {
        for role in Role::ALL {
            let token = match USERS.iter().find(|(_, r)| *r == role) {
                Some((user, _)) => Some(server.login(user).await?),
                None => None,
            };
            let m = Method::from_bytes(method.as_bytes()).unwrap();
            let body = matrix_body(method, path, role);
            let reply = server.call(m, path, token.as_deref(), body.as_ref()).await;
            let code = reply.json()["code"].as_str().map(str::to_owned);
            let observed_allowed = reply.status.is_success();
            let observed_denied = matches!(
                (reply.status, code.as_deref()),
                (StatusCode::UNAUTHORIZED, Some("unauthenticated"))
                    | (StatusCode::FORBIDDEN, Some("forbidden"))
            );
            let expected = allowed.contains(letter(role));
            ensure!(
                observed_allowed == expected && observed_denied != expected,
                "{method} {path} as {role}: {} {code:?}, table says allowed={expected}",
                reply.status
            );
            pairs += 1;
        }
    }

    let eng = server.login("engineer").await?;
    let audit = server
        .call(Method::GET, "/api/audit", Some(&eng), None)
        .await;
    ensure!(
        audit.status == StatusCode::FORBIDDEN,
        "engineer GET /api/audit: {}",
        audit.status
    );

    for (user, role) in USERS.iter().filter(|(_, r)| *r != Role::Administrator) {
        let token = server.login(user).await?;
        let mut doc = server.get_layout(Some(&token)).await?;
        let bottom = doc
            .instances
            .iter()
            .map(|i| i.placement.row + i.placement.height)
            .max()
            .unwrap_or(0);
        doc.instances.push(ComponentInstance {
            instance_id: "user-log-1".into(),
            component_id: "user-log".into(),
            placement: Placement::new(0, bottom, 6, 4),
            settings: Default::default(),
        });
        let reply = server.put_layout(&token, &doc).await;
        let body = reply.json();
        let codes: Vec<&str> = body["details"]["violations"]
            .as_array()
            .map(|v| v.iter().filter_map(|x| x["code"].as_str()).collect())
            .unwrap_or_default();
        ensure!(
            reply.status == StatusCode::UNPROCESSABLE_ENTITY && codes == ["RoleForbidden"],
            "{role} user-log layout: {} {codes:?}",
            reply.status
        );
    }
    Ok(format!("{pairs} (endpoint, role) pairs match the table; engineer audit 403; user-log 422 RoleForbidden for 4 roles"))
}

fn ac5_properties() -> Check {
    let reg = builtin_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(AC5_SEED);
    let mut edits_accepted = 0;
    for case in 0..AC5_CASES {
        let doc = random_doc(&mut rng, &reg);
        ensure!(
            decode(&encode(&doc)).as_ref() == Ok(&doc),
            "case {case}: round trip"
        );

        let index = |id: &str| {
            doc.instances
                .iter()
                .position(|i| i.instance_id == id)
                .unwrap()
        };
        let reported: BTreeSet<(usize, usize)> = validate(&doc, &reg)
            .violations
            .iter()
            .filter(|v| v.code == ViolationCode::Overlap)
            .map(|v| (index(v.related.as_deref().unwrap()), index(&v.subject)))
            .collect();
        ensure!(
            reported == brute_force_overlaps(&doc),
            "case {case}: overlap set"
        );

        let role = *Role::ALL.choose(&mut rng).unwrap();
        let grid = random_grid(&mut rng);
        let base = random_valid_doc(&mut rng, &reg, role, grid, "u");
        let edit = random_edit(&mut rng, &base, &reg);
        if let Ok(next) = apply_edit(&base, &edit, &reg) {
            ensure!(
                validate(&next, &reg).is_empty(),
                "case {case}: accepted edit left violations"
            );
            edits_accepted += 1;
        }

        let target = random_target(&mut rng, &base, &reg);
        let edits = diff(&base, &target).map_err(|e| format!("case {case}: diff {e}"))?;
        let patched = patch(&base, &edits, &reg).map_err(|e| format!("case {case}: patch {e}"))?;
        ensure!(patched == target, "case {case}: patch(diff(a, b), a) != b");

        let width = rng.random_range(1..=grid.columns);
        let height = rng.random_range(1..=6);
        let slot = find_free_slot(&base, width, height).ok();
        ensure!(
            slot == brute_force_free_slot(&base, width, height, AC5_MAX_ROWS),
            "case {case}: free slot {slot:?}"
        );
    }
    Ok(format!(
        "{AC5_CASES} cases (seed {AC5_SEED:#x}), {edits_accepted} accepted edits all valid"
    ))
}

async fn ac6_concurrent_puts() -> Check {
    let server = Server::start();
    let a = server.login("engineer").await?;
    let b = server.login("engineer").await?;
    for trial in 0..AC6_TRIALS {
        let current = server.get_layout(Some(&a)).await?;
        let mut doc_a = current.clone();
        doc_a.theme.font_size_pt = 9;
        let mut doc_b = current;
        doc_b.theme.font_size_pt = 20;
        let (ra, rb) = tokio::join!(server.put_layout(&a, &doc_a), server.put_layout(&b, &doc_b));
        let mut statuses = [ra.status.as_u16(), rb.status.as_u16()];
        statuses.sort();
        ensure!(statuses == [200, 409], "trial {trial}: {statuses:?}");
    }
    let last = server.get_layout(Some(&a)).await?;
    ensure!(
        last.revision == AC6_TRIALS as u64,
        "final revision {}",
        last.revision
    );
    Ok(format!(
        "{AC6_TRIALS}/{AC6_TRIALS} trials gave one 200 and one 409"
    ))
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

async fn ac7_latency() -> Check {
    let server = Server::start();
    let token = server.login("pm").await?;
    let mut doc = server.get_layout(Some(&token)).await?;
    let (mut gets, mut puts) = (Vec::new(), Vec::new());
    for i in 0..AC7_SAMPLES {
        doc.theme.font_size_pt = 9 + (i % 10) as u32;
        let started = Instant::now();
        let reply = server.put_layout(&token, &doc).await;
        puts.push(started.elapsed());
        ensure!(reply.status == StatusCode::OK, "PUT {i}: {}", reply.status);
        doc.revision += 1;

        let started = Instant::now();
        let reply = server
            .call(Method::GET, "/api/layout", Some(&token), None)
            .await;
        gets.push(started.elapsed());
        ensure!(reply.status == StatusCode::OK, "GET {i}: {}", reply.status);
    }
    let (get_ms, put_ms) = (median(gets), median(puts));
    let summary = format!(
        "median GET {:.2} ms, PUT {:.2} ms over {AC7_SAMPLES} round trips (budget {} ms)",
        get_ms.as_secs_f64() * 1e3,
        put_ms.as_secs_f64() * 1e3,
        AC7_BUDGET.as_millis()
    );
    ensure!(get_ms < AC7_BUDGET && put_ms < AC7_BUDGET, "{summary}");
    Ok(summary)
}

fn main() -> ExitCode {
    assert!(Path::new(env!("CARGO_BIN_EXE_flexpdm")).exists());
    let rt = tokio::runtime::Runtime::new().unwrap();
    let results: Vec<(&str, &str, Check)> = vec![
        (
            "AC1",
            "default layout per role",
            rt.block_on(ac1_default_layouts()),
        ),
        (
            "AC2",
            "saved layout survives re-login",
            rt.block_on(ac2_save_and_reuse()),
        ),
        (
            "AC3",
            "successive saves advance revision",
            rt.block_on(ac3_save_again()),
        ),
        (
            "AC4",
            "authorization matrix",
            rt.block_on(ac4_authorization()),
        ),
        ("AC5", "layout property suite", ac5_properties()),
        (
            "AC6",
            "concurrent PUT conflict",
            rt.block_on(ac6_concurrent_puts()),
        ),
        ("AC7", "layout GET/PUT latency", rt.block_on(ac7_latency())),
    ];
    let mut failed = 0;
    for (id, name, result) in &results {
        match result {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
