use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::role::Role;

pub const MAX_USERNAME_CHARS: usize = 64;
pub const MAX_CHAT_CHARS: usize = 2000;
pub const MAX_AUDIT_PAYLOAD_BYTES: usize = 4096;
pub const MAX_QUERY_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UserDetails {
    #[serde(default)]
    pub full_name: String,
    #[serde(default)]
    pub email: String,
    #[serde(default)]
    pub department: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub username: String,
    pub password_hash: String,
    pub role: Role,
    pub details: UserDetails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AuditEventType {
    Login,
    Logout,
    LayoutSave,
    LayoutReset,
    LayoutEditRejected,
    ThemeChange,
    ChatSend,
    UserDetailsUpdate,
}

impl std::str::FromStr for AuditEventType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown event type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub seq: u64,
    pub timestamp: DateTime<Utc>,
    pub user_id: String,
    pub event_type: AuditEventType,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditFilter {
    pub user_id: Option<String>,
    pub event_type: Option<AuditEventType>,
    pub since_seq: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub seq: u64,
    pub timestamp: DateTime<Utc>,
    pub from_user_id: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRecord {
    pub id: String,
    pub name: String,
    pub revision_label: String,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectStatus {
    Planned,
    Active,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub id: String,
    pub name: String,
    pub status: ProjectStatus,
    pub description: String,
}

/// Server-side record behind a bearer token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub user_id: String,
    pub issued_at: DateTime<Utc>,
    pub expires_at: DateTime<Utc>,
}

/// Record families that can be exported as JSON lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Users,
    Layouts,
    Audit,
    Chat,
    Products,
    Projects,
}

impl std::str::FromStr for RecordKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "users" => RecordKind::Users,
            "layouts" => RecordKind::Layouts,
            "audit" => RecordKind::Audit,
            "chat" => RecordKind::Chat,
            "products" => RecordKind::Products,
            "projects" => RecordKind::Projects,
            other => return Err(format!("unknown record kind `{other}`")),
        })
    }
}
