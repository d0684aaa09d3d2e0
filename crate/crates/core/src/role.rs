use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Capabilities a role may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Right {
    ViewPDM,
    EditOwnLayout,
    ViewAuditLog,
    ManageUsers,
}

impl Right {
    pub const ALL: [Right; 4] = [
        Right::ViewPDM,
        Right::EditOwnLayout,
        Right::ViewAuditLog,
        Right::ManageUsers,
    ];

    const fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// A set of [`Right`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rights(u8);

impl Rights {
    pub const fn empty() -> Self {
        Rights(0)
    }

    pub const fn with(self, right: Right) -> Self {
        Rights(self.0 | right.bit())
    }

    pub const fn contains(self, right: Right) -> bool {
        self.0 & right.bit() != 0
    }

    pub const fn is_superset(self, other: Rights) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn iter(self) -> impl Iterator<Item = Right> {
        Right::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl Serialize for Rights {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// User categories. The role decides which components a user may place,
/// which endpoints they may call, and which default layout they start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Guest,
    StaffMember,
    Engineer,
    ProjectManager,
    Businessman,
    Administrator,
}

const MEMBER_RIGHTS: Rights = Rights::empty()
    .with(Right::ViewPDM)
    .with(Right::EditOwnLayout);

impl Role {
    pub const ALL: [Role; 6] = [
        Role::Guest,
        Role::StaffMember,
        Role::Engineer,
        Role::ProjectManager,
        Role::Businessman,
        Role::Administrator,
    ];

    pub const fn rights(self) -> Rights {
        match self {
            Role::Guest => Rights::empty().with(Right::ViewPDM),
            Role::StaffMember | Role::Engineer | Role::ProjectManager | Role::Businessman => {
                MEMBER_RIGHTS
            }
            Role::Administrator => MEMBER_RIGHTS
                .with(Right::ViewAuditLog)
                .with(Right::ManageUsers),
        }
    }

    pub const fn has(self, right: Right) -> bool {
        self.rights().contains(right)
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Role::Guest => "Guest",
            Role::StaffMember => "StaffMember",
            Role::Engineer => "Engineer",
            Role::ProjectManager => "ProjectManager",
            Role::Businessman => "Businessman",
            Role::Administrator => "Administrator",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown role `{0}`")]
pub struct UnknownRole(pub String);

impl FromStr for Role {
    type Err = UnknownRole;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| UnknownRole(s.to_string()))
    }
}
