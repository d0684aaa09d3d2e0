//! Core of the flexpdm dashboard server.
//!
//! `layout` is the pure document engine (validation, edits, diff, canonical
//! codec). `registry` holds the component catalog and composes per-role
//! default layouts. `store` is the embedded persistence layer for users,
//! layouts, the audit log and chat, and `session` issues and checks bearer
//! tokens on top of it.

pub mod canonical;
pub mod clock;
pub mod layout;
pub mod registry;
pub mod role;
pub mod session;
pub mod store;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use clock::{Clock, ManualClock, SystemClock};
pub use layout::{
    apply_edit, decode, diff, encode, find_free_slot, patch, validate, ComponentInstance,
    DecodeError, GridSpec, LayoutDocument, LayoutEdit, LayoutError, Placement, Theme,
    ValidationReport, Violation, ViolationCode,
};
pub use registry::{
    builtin_catalog, compose_default, list_visible, Category, ComponentDescriptor,
    RegistrySnapshot, Size,
};
pub use role::{Right, Rights, Role};
pub use session::{AuthError, Principal, SessionManager, SessionToken};
pub use store::{Store, StoreError, StoreOptions};
