//! Bearer-token sessions.
//!
//! Tokens are 32 random bytes, handed out once and stored server-side only
//! as a SHA-256 digest, so logging out takes effect immediately and a
//! leaked database does not leak live tokens.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use chrono::{DateTime, Duration, Utc};
use rand::RngCore;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::clock::Clock;
use crate::role::{Right, Role};
use crate::store::{SessionRecord, Store, StoreError, UserRecord};

pub const DEFAULT_TTL: Duration = Duration::hours(8);
pub const MAX_FAILURES_PER_WINDOW: usize = 10;
pub const FAILURE_WINDOW: Duration = Duration::minutes(1);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionToken {
    pub token: String,
    pub user_id: String,
    pub role: Role,
    pub issued_at: DateTime<Utc>,
    pub expires_at: DateTime<Utc>,
}

/// Who is making a request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Principal {
    Guest,
    Authenticated { user_id: String, role: Role },
}

impl Principal {
    pub fn role(&self) -> Role {
        match self {
            Principal::Guest => Role::Guest,
            Principal::Authenticated { role, .. } => *role,
        }
    }

    pub fn user_id(&self) -> Option<&str> {
        match self {
            Principal::Guest => None,
            Principal::Authenticated { user_id, .. } => Some(user_id),
        }
    }

    pub fn has(&self, right: Right) -> bool {
        self.role().has(right)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AuthError {
    #[error("invalid username or password")]
    Denied,
    #[error("too many failed attempts, try again later")]
    RateLimited,
    #[error(transparent)]
    Store(StoreError),
}

pub struct SessionManager {
    store: Store,
    clock: Arc<dyn Clock>,
    ttl: Duration,
    failures: Mutex<HashMap<String, VecDeque<DateTime<Utc>>>>,
}

fn token_key(token: &str) -> String {
    URL_SAFE_NO_PAD.encode(Sha256::digest(token.as_bytes()))
}

impl SessionManager {
    /// Uses the store's clock.
    pub fn new(store: Store, ttl: Duration) -> Self {
        let clock = store.clock().clone();
        SessionManager {
            store,
            clock,
            ttl,
            failures: Mutex::new(HashMap::new()),
        }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    /// Issues a token for valid credentials. Unknown users and wrong
    /// passwords fail identically. More than ten failures for one username
    /// inside a minute lock that username until the window slides past.
    pub fn login(&self, username: &str, password: &str) -> Result<SessionToken, AuthError> {
        let now = self.clock.now();
        {
            let mut failures = self.failures.lock().unwrap();
            let recent = failures.entry(username.to_string()).or_default();
            while recent.front().is_some_and(|t| now - *t >= FAILURE_WINDOW) {
                recent.pop_front();
            }
            if recent.len() >= MAX_FAILURES_PER_WINDOW {
                return Err(AuthError::RateLimited);
            }
        }

        let user = match self.store.verify_password(username, password) {
            Ok(user) => user,
            Err(StoreError::Denied) => {
                self.failures
                    .lock()
                    .unwrap()
                    .entry(username.to_string())
                    .or_default()
                    .push_back(now);
                return Err(AuthError::Denied);
            }
            Err(e) => return Err(AuthError::Store(e)),
        };
        self.failures.lock().unwrap().remove(username);
        self.issue(&user, now).map_err(AuthError::Store)
    }

    fn issue(&self, user: &UserRecord, now: DateTime<Utc>) -> Result<SessionToken, StoreError> {
        let mut raw = [0u8; 32];
        rand::rng().fill_bytes(&mut raw);
        let token = URL_SAFE_NO_PAD.encode(raw);
        let record = SessionRecord {
            user_id: user.user_id.clone(),
            issued_at: now,
            expires_at: now + self.ttl,
        };
        self.store.insert_session(&token_key(&token), &record)?;
        Ok(SessionToken {
            token,
            user_id: record.user_id,
            role: user.role,
            issued_at: record.issued_at,
            expires_at: record.expires_at,
        })
    }

    /// Resolves a bearer token. Anything missing, unknown or expired is a
    /// guest; the session is valid strictly before `expires_at`.
    pub fn authenticate(&self, token: Option<&str>) -> Principal {
        let Some(token) = token else {
            return Principal::Guest;
        };
        let Ok(Some(record)) = self.store.session(&token_key(token)) else {
            return Principal::Guest;
        };
        if self.clock.now() >= record.expires_at {
            return Principal::Guest;
        }
        match self.store.get_user(&record.user_id) {
            Ok(user) => Principal::Authenticated {
                user_id: user.user_id,
                role: user.role,
            },
            Err(_) => Principal::Guest,
        }
    }

    /// Invalidates the token. Idempotent; only the first call is audited.
    pub fn logout(&self, token: &str) -> Result<(), StoreError> {
        self.store.end_session(&token_key(token)).map(|_| ())
    }
}
