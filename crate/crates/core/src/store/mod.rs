//! Embedded persistence for users, layouts, the audit log, chat, sessions
//! and the minimal PDM catalog.
//!
//! Backed by a single redb database. Every mutation runs in one write
//! transaction, and redb admits one writer at a time, so read-check-write
//! sequences such as the layout revision check are atomic. Readers see the
//! last committed state.

use std::io::Write;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use chrono::{DateTime, Utc};
use redb::backends::InMemoryBackend;
use redb::{
    Database, ReadableDatabase, ReadableTable, ReadableTableMetadata, TableDefinition,
    WriteTransaction,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clock::{Clock, SystemClock};
use crate::layout::{
    decode, encode, validate, LayoutDocument, Theme, ValidationReport, ViolationCode,
};
use crate::registry::RegistrySnapshot;
use crate::role::Role;

mod password;
mod records;
mod seed;

pub use password::{verify as verify_password_hash, PasswordConfig};
pub use records::*;
pub use seed::{seed_password, SeedSummary, SEED_USERS};

const META: TableDefinition<&str, u64> = TableDefinition::new("meta");
const USERS: TableDefinition<&str, &[u8]> = TableDefinition::new("users");
const USERNAMES: TableDefinition<&str, &str> = TableDefinition::new("usernames");
const LAYOUTS: TableDefinition<&str, &[u8]> = TableDefinition::new("layouts");
/// Last revision issued per user; survives deletes so revisions never repeat.
const LAYOUT_REVISIONS: TableDefinition<&str, u64> = TableDefinition::new("layout_revisions");
const AUDIT: TableDefinition<u64, &[u8]> = TableDefinition::new("audit");
const CHAT: TableDefinition<u64, &[u8]> = TableDefinition::new("chat");
const PRODUCTS: TableDefinition<&str, &[u8]> = TableDefinition::new("products");
const PROJECTS: TableDefinition<&str, &[u8]> = TableDefinition::new("projects");
const SESSIONS: TableDefinition<&str, &[u8]> = TableDefinition::new("sessions");

const NEXT_USER: &str = "next_user";
const AUDIT_SEQ: &str = "audit_seq";
const CHAT_SEQ: &str = "chat_seq";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("username `{0}` is taken")]
    DuplicateUsername(String),
    #[error("invalid username: {0}")]
    InvalidUsername(String),
    #[error("password must not be empty")]
    EmptyPassword,
    #[error("invalid username or password")]
    Denied,
    #[error("expected revision {expected} but stored revision is {stored}")]
    RevisionConflict { expected: u64, stored: u64 },
    #[error("layout failed validation")]
    ValidationFailed(ValidationReport),
    #[error("store already contains data")]
    StoreNotEmpty,
    #[error("message body is empty")]
    EmptyBody,
    #[error("message body has {len} characters, limit is {max}")]
    BodyTooLong { len: usize, max: usize },
    #[error("bad filter: {0}")]
    BadFilter(String),
    #[error("corrupt record: {0}")]
    Corrupt(String),
    #[error("storage backend: {0}")]
    Backend(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

macro_rules! backend_errors {
    ($($ty:ty),*) => {$(
        impl From<$ty> for StoreError {
            fn from(e: $ty) -> Self {
                StoreError::Backend(e.to_string())
            }
        }
    )*};
}

backend_errors!(
    redb::DatabaseError,
    redb::TransactionError,
    redb::TableError,
    redb::StorageError,
    redb::CommitError
);

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

#[derive(Clone)]
pub struct StoreOptions {
    pub clock: Arc<dyn Clock>,
    pub passwords: PasswordConfig,
}

impl Default for StoreOptions {
    fn default() -> Self {
        StoreOptions {
            clock: Arc::new(SystemClock),
            passwords: PasswordConfig::default(),
        }
    }
}

/// Handle to the database. Cheap to clone; clones share the database.
#[derive(Clone)]
pub struct Store {
    db: Arc<Database>,
    clock: Arc<dyn Clock>,
    passwords: PasswordConfig,
    dummy_hash: Arc<OnceLock<String>>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").finish_non_exhaustive()
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("records always serialize")
}

fn from_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| StoreError::Corrupt(e.to_string()))
}

fn validate_username(username: &str) -> Result<()> {
    if username.trim().is_empty() {
        return Err(StoreError::InvalidUsername("must not be empty".into()));
    }
    let len = username.chars().count();
    if len > MAX_USERNAME_CHARS {
        return Err(StoreError::InvalidUsername(format!(
            "{len} characters exceeds the limit of {MAX_USERNAME_CHARS}"
        )));
    }
    Ok(())
}

/// Replaces payloads over the size cap with a marker object.
fn cap_payload(payload: Value) -> Value {
    let size = to_json(&payload).len();
    if size <= MAX_AUDIT_PAYLOAD_BYTES {
        return payload;
    }
    let text = payload.to_string();
    let preview: String = text.chars().take(512).collect();
    json!({ "truncated": true, "original_bytes": size, "preview": preview })
}

fn next_counter(txn: &WriteTransaction, name: &str) -> Result<u64> {
    let mut meta = txn.open_table(META)?;
    let next = meta.get(name)?.map_or(0, |v| v.value()) + 1;
    meta.insert(name, next)?;
    Ok(next)
}

fn append_audit_in(
    txn: &WriteTransaction,
    timestamp: DateTime<Utc>,
    user_id: &str,
    event_type: AuditEventType,
    payload: Value,
) -> Result<u64> {
    let seq = next_counter(txn, AUDIT_SEQ)?;
    let entry = AuditEntry {
        seq,
        timestamp,
        user_id: user_id.to_string(),
        event_type,
        payload: cap_payload(payload),
    };
    txn.open_table(AUDIT)?
        .insert(seq, to_json(&entry).as_slice())?;
    Ok(seq)
}

fn user_in(txn: &WriteTransaction, user_id: &str) -> Result<UserRecord> {
    let users = txn.open_table(USERS)?;
    let bytes = users
        .get(user_id)?
        .ok_or_else(|| StoreError::UnknownUser(user_id.to_string()))?;
    from_json(bytes.value())
}

impl Store {
    pub fn open(path: impl AsRef<Path>, options: StoreOptions) -> Result<Self> {
        let db = Database::create(path)?;
        Self::init(db, options)
    }

    pub fn in_memory(options: StoreOptions) -> Result<Self> {
        let db = Database::builder().create_with_backend(InMemoryBackend::new())?;
        Self::init(db, options)
    }

    fn init(db: Database, options: StoreOptions) -> Result<Self> {
        let txn = db.begin_write()?;
        txn.open_table(META)?;
        txn.open_table(USERS)?;
        txn.open_table(USERNAMES)?;
        txn.open_table(LAYOUTS)?;
        txn.open_table(LAYOUT_REVISIONS)?;
        txn.open_table(AUDIT)?;
        txn.open_table(CHAT)?;
        txn.open_table(PRODUCTS)?;
        txn.open_table(PROJECTS)?;
        txn.open_table(SESSIONS)?;
        txn.commit()?;
        Ok(Store {
            db: Arc::new(db),
            clock: options.clock,
            passwords: options.passwords,
            dummy_hash: Arc::new(OnceLock::new()),
        })
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    fn now(&self) -> DateTime<Utc> {
        self.clock.now()
    }

    /// True when the store holds no users and no PDM records.
    pub fn is_empty(&self) -> Result<bool> {
        let txn = self.db.begin_read()?;
        Ok(txn.open_table(USERS)?.is_empty()?
            && txn.open_table(PRODUCTS)?.is_empty()?
            && txn.open_table(PROJECTS)?.is_empty()?)
    }

    // ---------------------------------------------------------------------
    // Users
    // ---------------------------------------------------------------------

    pub fn create_user(
        &self,
        username: &str,
        password: &str,
        role: Role,
        details: UserDetails,
    ) -> Result<UserRecord> {
        validate_username(username)?;
        if password.is_empty() {
            return Err(StoreError::EmptyPassword);
        }
        let password_hash = self.passwords.hash(password);

        let txn = self.db.begin_write()?;
        let user = {
            let mut names = txn.open_table(USERNAMES)?;
            if names.get(username)?.is_some() {
                return Err(StoreError::DuplicateUsername(username.to_string()));
            }
            let user = UserRecord {
                user_id: format!("usr-{:04}", next_counter(&txn, NEXT_USER)?),
                username: username.to_string(),
                password_hash,
                role,
                details,
            };
            names.insert(username, user.user_id.as_str())?;
            txn.open_table(USERS)?
                .insert(user.user_id.as_str(), to_json(&user).as_slice())?;
            user
        };
        txn.commit()?;
        Ok(user)
    }

    pub fn get_user(&self, user_id: &str) -> Result<UserRecord> {
        let txn = self.db.begin_read()?;
        let users = txn.open_table(USERS)?;
        let bytes = users
            .get(user_id)?
            .ok_or_else(|| StoreError::UnknownUser(user_id.to_string()))?;
        from_json(bytes.value())
    }

    pub fn find_user(&self, username: &str) -> Result<Option<UserRecord>> {
        let txn = self.db.begin_read()?;
        let names = txn.open_table(USERNAMES)?;
        let Some(id) = names.get(username)? else {
            return Ok(None);
        };
        let users = txn.open_table(USERS)?;
        let bytes = users
            .get(id.value())?
            .ok_or_else(|| StoreError::Corrupt(format!("dangling username `{username}`")))?;
        from_json(bytes.value()).map(Some)
    }

    pub fn users(&self) -> Result<Vec<UserRecord>> {
        let txn = self.db.begin_read()?;
        let users = txn.open_table(USERS)?;
        users.iter()?.map(|row| from_json(row?.1.value())).collect()
    }

    pub fn count_users(&self) -> Result<u64> {
        Ok(self.db.begin_read()?.open_table(USERS)?.len()?)
    }

    pub fn update_details(&self, user_id: &str, details: UserDetails) -> Result<UserRecord> {
        let txn = self.db.begin_write()?;
        let mut user = user_in(&txn, user_id)?;
        user.details = details;
        txn.open_table(USERS)?
            .insert(user_id, to_json(&user).as_slice())?;
        append_audit_in(
            &txn,
            self.now(),
            user_id,
            AuditEventType::UserDetailsUpdate,
            json!({ "details": user.details }),
        )?;
        txn.commit()?;
        Ok(user)
    }

    /// Checks credentials. Unknown users still pay for one hash
    /// verification, and every failure is the same [`StoreError::Denied`].
    pub fn verify_password(&self, username: &str, password: &str) -> Result<UserRecord> {
        match self.find_user(username)? {
            Some(user) if password::verify(password, &user.password_hash) => Ok(user),
            Some(_) => Err(StoreError::Denied),
            None => {
                let dummy = self
                    .dummy_hash
                    .get_or_init(|| self.passwords.hash("placeholder password"));
                let _ = password::verify(password, dummy);
                Err(StoreError::Denied)
            }
        }
    }

    // ---------------------------------------------------------------------
    // Layouts
    // ---------------------------------------------------------------------

    /// Stores `doc` as the user's layout if `expected_revision` matches the
    /// stored one (0 when nothing is stored). Returns the new revision.
    pub fn save_layout(
        &self,
        user_id: &str,
        doc: &LayoutDocument,
        expected_revision: u64,
        registry: &RegistrySnapshot,
    ) -> Result<u64> {
        let now = self.now();
        let txn = self.db.begin_write()?;
        let user = user_in(&txn, user_id)?;
        let report = if doc.role != user.role {
            ValidationReport::single(
                ViolationCode::RoleForbidden,
                "role",
                format!("layout is for {} but the user is {}", doc.role, user.role),
            )
        } else {
            validate(doc, registry)
        };
        if !report.is_empty() {
            return Err(StoreError::ValidationFailed(report));
        }

        let (revision, previous_theme) = {
            let mut layouts = txn.open_table(LAYOUTS)?;
            let mut revisions = txn.open_table(LAYOUT_REVISIONS)?;
            let last_issued = revisions.get(user_id)?.map_or(0, |v| v.value());
            let previous = match layouts.get(user_id)? {
                Some(bytes) => {
                    Some(decode(bytes.value()).map_err(|e| StoreError::Corrupt(e.to_string()))?)
                }
                None => None,
            };
            let stored = previous.as_ref().map_or(0, |d| d.revision);
            if expected_revision != stored {
                return Err(StoreError::RevisionConflict {
                    expected: expected_revision,
                    stored,
                });
            }
            let revision = last_issued.max(stored) + 1;
            let mut to_store = doc.clone();
            to_store.revision = revision;
            layouts.insert(user_id, encode(&to_store).as_slice())?;
            revisions.insert(user_id, revision)?;
            (revision, previous.map_or_else(Theme::default, |d| d.theme))
        };

        append_audit_in(
            &txn,
            now,
            user_id,
            AuditEventType::LayoutSave,
            json!({ "revision": revision, "instances": doc.instances.len() }),
        )?;
        if previous_theme != doc.theme {
            append_audit_in(
                &txn,
                now,
                user_id,
                AuditEventType::ThemeChange,
                json!({ "theme": doc.theme }),
            )?;
        }
        txn.commit()?;
        Ok(revision)
    }

    /// The user's saved layout, or `None` when nothing is stored.
    pub fn load_layout(&self, user_id: &str) -> Result<Option<LayoutDocument>> {
        let txn = self.db.begin_read()?;
        if txn.open_table(USERS)?.get(user_id)?.is_none() {
            return Err(StoreError::UnknownUser(user_id.to_string()));
        }
        let layouts = txn.open_table(LAYOUTS)?;
        let Some(bytes) = layouts.get(user_id)? else {
            return Ok(None);
        };
        decode(bytes.value())
            .map(Some)
            .map_err(|e| StoreError::Corrupt(e.to_string()))
    }

    /// Forgets the user's layout. Idempotent; every call is audited.
    pub fn delete_layout(&self, user_id: &str) -> Result<()> {
        let txn = self.db.begin_write()?;
        user_in(&txn, user_id)?;
        let existed = txn.open_table(LAYOUTS)?.remove(user_id)?.is_some();
        append_audit_in(
            &txn,
            self.now(),
            user_id,
            AuditEventType::LayoutReset,
            json!({ "had_layout": existed }),
        )?;
        txn.commit()?;
        Ok(())
    }

    // ---------------------------------------------------------------------
    // Audit log
    // ---------------------------------------------------------------------

    pub fn append_audit(
        &self,
        user_id: &str,
        event_type: AuditEventType,
        payload: Value,
    ) -> Result<u64> {
        let txn = self.db.begin_write()?;
        let seq = append_audit_in(&txn, self.now(), user_id, event_type, payload)?;
        txn.commit()?;
        Ok(seq)
    }

    /// Matching entries with `seq > since_seq`, ascending, at most `limit`.
    pub fn query_audit(&self, filter: &AuditFilter, limit: usize) -> Result<Vec<AuditEntry>> {
        if limit > MAX_QUERY_LIMIT {
            return Err(StoreError::BadFilter(format!(
                "limit {limit} exceeds {MAX_QUERY_LIMIT}"
            )));
        }
        let start = filter.since_seq.unwrap_or(0).saturating_add(1);
        let txn = self.db.begin_read()?;
        let table = txn.open_table(AUDIT)?;
        let mut out = Vec::new();
        for row in table.range(start..)? {
            if out.len() >= limit {
                break;
            }
            let entry: AuditEntry = from_json(row?.1.value())?;
            let user_ok = filter.user_id.as_ref().is_none_or(|u| *u == entry.user_id);
            let type_ok = filter.event_type.is_none_or(|t| t == entry.event_type);
            if user_ok && type_ok {
                out.push(entry);
            }
        }
        Ok(out)
    }

    pub fn latest_audit_seq(&self) -> Result<u64> {
        let txn = self.db.begin_read()?;
        Ok(txn
            .open_table(META)?
            .get(AUDIT_SEQ)?
            .map_or(0, |v| v.value()))
    }

    // ---------------------------------------------------------------------
    // Chat
    // ---------------------------------------------------------------------

    pub fn post_chat(&self, from_user_id: &str, body: &str) -> Result<u64> {
        if body.trim().is_empty() {
            return Err(StoreError::EmptyBody);
        }
        let len = body.chars().count();
        if len > MAX_CHAT_CHARS {
            return Err(StoreError::BodyTooLong {
                len,
                max: MAX_CHAT_CHARS,
            });
        }
        let now = self.now();
        let txn = self.db.begin_write()?;
        user_in(&txn, from_user_id)?;
        let seq = next_counter(&txn, CHAT_SEQ)?;
        let message = ChatMessage {
            seq,
            timestamp: now,
            from_user_id: from_user_id.to_string(),
            body: body.to_string(),
        };
        txn.open_table(CHAT)?
            .insert(seq, to_json(&message).as_slice())?;
        append_audit_in(
            &txn,
            now,
            from_user_id,
            AuditEventType::ChatSend,
            json!({ "chat_seq": seq }),
        )?;
        txn.commit()?;
        Ok(seq)
    }

    /// Messages with `seq > since_seq`, ascending, at most `limit`.
    pub fn list_chat(&self, since_seq: u64, limit: usize) -> Result<Vec<ChatMessage>> {
        if limit > MAX_QUERY_LIMIT {
            return Err(StoreError::BadFilter(format!(
                "limit {limit} exceeds {MAX_QUERY_LIMIT}"
            )));
        }
        let txn = self.db.begin_read()?;
        let table = txn.open_table(CHAT)?;
        table
            .range(since_seq.saturating_add(1)..)?
            .take(limit)
            .map(|row| from_json(row?.1.value()))
            .collect()
    }

    // ---------------------------------------------------------------------
    // PDM records
    // ---------------------------------------------------------------------

    pub fn products(&self) -> Result<Vec<ProductRecord>> {
        let txn = self.db.begin_read()?;
        let table = txn.open_table(PRODUCTS)?;
        table.iter()?.map(|row| from_json(row?.1.value())).collect()
    }

    pub fn projects(&self) -> Result<Vec<ProjectRecord>> {
        let txn = self.db.begin_read()?;
        let table = txn.open_table(PROJECTS)?;
        table.iter()?.map(|row| from_json(row?.1.value())).collect()
    }

    pub fn put_product(&self, product: &ProductRecord) -> Result<()> {
        let txn = self.db.begin_write()?;
        txn.open_table(PRODUCTS)?
            .insert(product.id.as_str(), to_json(product).as_slice())?;
        txn.commit()?;
        Ok(())
    }

    pub fn put_project(&self, project: &ProjectRecord) -> Result<()> {
        let txn = self.db.begin_write()?;
        txn.open_table(PROJECTS)?
            .insert(project.id.as_str(), to_json(project).as_slice())?;
        txn.commit()?;
        Ok(())
    }

    // ---------------------------------------------------------------------
    // Sessions
    // ---------------------------------------------------------------------

    /// Records a session under `key` and audits the login.
    pub fn insert_session(&self, key: &str, record: &SessionRecord) -> Result<()> {
        let txn = self.db.begin_write()?;
        user_in(&txn, &record.user_id)?;
        txn.open_table(SESSIONS)?
            .insert(key, to_json(record).as_slice())?;
        append_audit_in(
            &txn,
            record.issued_at,
            &record.user_id,
            AuditEventType::Login,
            json!({ "expires_at": record.expires_at }),
        )?;
        txn.commit()?;
        Ok(())
    }

    pub fn session(&self, key: &str) -> Result<Option<SessionRecord>> {
        let txn = self.db.begin_read()?;
        let table = txn.open_table(SESSIONS)?;
        let Some(bytes) = table.get(key)? else {
            return Ok(None);
        };
        from_json(bytes.value()).map(Some)
    }

    /// Removes the session and audits the logout. Returns the user id when
    /// a session was actually removed.
    pub fn end_session(&self, key: &str) -> Result<Option<String>> {
        let txn = self.db.begin_write()?;
        let removed = match txn.open_table(SESSIONS)?.remove(key)? {
            Some(bytes) => Some(from_json::<SessionRecord>(bytes.value())?),
            None => None,
        };
        let Some(record) = removed else {
            return Ok(None);
        };
        append_audit_in(
            &txn,
            self.now(),
            &record.user_id,
            AuditEventType::Logout,
            json!({}),
        )?;
        txn.commit()?;
        Ok(Some(record.user_id))
    }

    // ---------------------------------------------------------------------
    // Export
    // ---------------------------------------------------------------------

    /// Writes one JSON object per line for every record of `kind`.
    /// Returns the number of lines written.
    pub fn export_jsonl(&self, kind: RecordKind, out: &mut dyn Write) -> Result<usize> {
        fn lines<T: Serialize>(items: &[T], out: &mut dyn Write) -> Result<usize> {
            for item in items {
                out.write_all(&to_json(item))?;
                out.write_all(b"\n")?;
            }
            Ok(items.len())
        }
        match kind {
            RecordKind::Users => lines(&self.users()?, out),
            RecordKind::Products => lines(&self.products()?, out),
            RecordKind::Projects => lines(&self.projects()?, out),
            RecordKind::Audit => {
                let mut n = 0;
                let mut since = 0;
                loop {
                    let filter = AuditFilter {
                        since_seq: Some(since),
                        ..AuditFilter::default()
                    };
                    let batch = self.query_audit(&filter, MAX_QUERY_LIMIT)?;
                    let Some(last) = batch.last() else { break };
                    since = last.seq;
                    n += lines(&batch, out)?;
                }
                Ok(n)
            }
            RecordKind::Chat => {
                let mut n = 0;
                let mut since = 0;
                loop {
                    let batch = self.list_chat(since, MAX_QUERY_LIMIT)?;
                    let Some(last) = batch.last() else { break };
                    since = last.seq;
                    n += lines(&batch, out)?;
                }
                Ok(n)
            }
            RecordKind::Layouts => {
                let txn = self.db.begin_read()?;
                let table = txn.open_table(LAYOUTS)?;
                let mut n = 0;
                for row in table.iter()? {
                    let (user_id, bytes) = row?;
                    let document: Value = from_json(bytes.value())?;
                    let line = json!({ "user_id": user_id.value(), "document": document });
                    n += lines(&[line], out)?;
                }
                Ok(n)
            }
        }
    }
}
