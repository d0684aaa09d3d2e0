//! Who may call what.

use flexpdm_core::{Principal, Right};

use crate::error::{ApiError, ErrorCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Public,
    Authenticated,
    Requires(Right),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Login,
    Logout,
    GetLayout,
    PutLayout,
    DeleteLayout,
    Components,
    Theme,
    GetDetails,
    PutDetails,
    Audit,
    GetChat,
    PostChat,
    Products,
    Projects,
    CreateUser,
}

impl Endpoint {
    pub const ALL: [Endpoint; 15] = [
        Endpoint::Login,
        Endpoint::Logout,
        Endpoint::GetLayout,
        Endpoint::PutLayout,
        Endpoint::DeleteLayout,
        Endpoint::Components,
        Endpoint::Theme,
        Endpoint::GetDetails,
        Endpoint::PutDetails,
        Endpoint::Audit,
        Endpoint::GetChat,
        Endpoint::PostChat,
        Endpoint::Products,
        Endpoint::Projects,
        Endpoint::CreateUser,
    ];

    pub const fn method(self) -> &'static str {
        match self {
            Endpoint::Login | Endpoint::Logout | Endpoint::PostChat | Endpoint::CreateUser => {
                "POST"
            }
            Endpoint::PutLayout | Endpoint::PutDetails => "PUT",
            Endpoint::DeleteLayout => "DELETE",
            _ => "GET",
        }
    }

    pub const fn path(self) -> &'static str {
        match self {
            Endpoint::Login => "/api/login",
            Endpoint::Logout => "/api/logout",
            Endpoint::GetLayout | Endpoint::PutLayout | Endpoint::DeleteLayout => "/api/layout",
            Endpoint::Components => "/api/components",
            Endpoint::Theme => "/api/theme",
            Endpoint::GetDetails | Endpoint::PutDetails => "/api/user/details",
            Endpoint::Audit => "/api/audit",
            Endpoint::GetChat | Endpoint::PostChat => "/api/chat",
            Endpoint::Products => "/api/pdm/products",
            Endpoint::Projects => "/api/pdm/projects",
            Endpoint::CreateUser => "/api/users",
        }
    }

    /// The rights table.
    pub const fn access(self) -> Access {
        match self {
            Endpoint::Login
            | Endpoint::Logout
            | Endpoint::GetLayout
            | Endpoint::Components
            | Endpoint::Theme => Access::Public,
            Endpoint::PutLayout | Endpoint::DeleteLayout => Access::Requires(Right::EditOwnLayout),
            Endpoint::GetDetails
            | Endpoint::PutDetails
            | Endpoint::GetChat
            | Endpoint::PostChat => Access::Authenticated,
            Endpoint::Audit => Access::Requires(Right::ViewAuditLog),
            Endpoint::Products | Endpoint::Projects => Access::Requires(Right::ViewPDM),
            Endpoint::CreateUser => Access::Requires(Right::ManageUsers),
        }
    }

    pub fn allows(self, principal: &Principal) -> bool {
        match self.access() {
            Access::Public => true,
            Access::Authenticated => matches!(principal, Principal::Authenticated { .. }),
            Access::Requires(right) => principal.has(right),
        }
    }
}

/// Guests are told to log in (401); logged-in users lacking a right are
/// refused (403).
pub fn authorize(endpoint: Endpoint, principal: &Principal) -> Result<(), ApiError> {
    if endpoint.allows(principal) {
        return Ok(());
    }
    Err(match principal {
        Principal::Guest => ApiError::new(ErrorCode::Unauthenticated, "login required"),
        Principal::Authenticated { role, .. } => ApiError::new(
            ErrorCode::Forbidden,
            format!(
                "{role} may not call {} {}",
                endpoint.method(),
                endpoint.path()
            ),
        ),
    })
}
