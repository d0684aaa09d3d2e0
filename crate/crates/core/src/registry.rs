//! The catalog of placeable dashboard components.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::layout::{find_free_slot, ComponentInstance, LayoutDocument, Placement};
use crate::role::{Right, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    PdmOperations,
    Personal,
    Communication,
    System,
}

/// Width and height in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Size {
    pub width: u32,
    pub height: u32,
}

impl Size {
    pub const fn new(width: u32, height: u32) -> Self {
        Size { width, height }
    }

    fn fits_within(self, max: Size) -> bool {
        self.width <= max.width && self.height <= max.height
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDescriptor {
    pub component_id: String,
    pub display_name: String,
    pub category: Category,
    pub default_size: Size,
    pub min_size: Size,
    pub max_size: Size,
    /// `None` means every logged-in role may use it.
    pub required_right: Option<Right>,
    pub singleton: bool,
    pub guest_visible: bool,
}

impl ComponentDescriptor {
    pub fn visible_to(&self, role: Role) -> bool {
        let has_right = self.required_right.is_none_or(|r| role.has(r));
        has_right && (role != Role::Guest || self.guest_visible)
    }

    pub fn accepts_size(&self, width: u32, height: u32) -> bool {
        (self.min_size.width..=self.max_size.width).contains(&width)
            && (self.min_size.height..=self.max_size.height).contains(&height)
    }

    fn is_consistent(&self) -> bool {
        self.min_size.fits_within(self.default_size) && self.default_size.fits_within(self.max_size)
    }
}

/// An immutable, versioned view of the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistrySnapshot {
    pub version: u64,
    pub descriptors: BTreeMap<String, ComponentDescriptor>,
}

impl RegistrySnapshot {
    /// Builds a snapshot, rejecting duplicate ids and descriptors whose
    /// default size falls outside their own bounds.
    pub fn new(version: u64, descriptors: Vec<ComponentDescriptor>) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for d in descriptors {
            if !d.is_consistent() {
                return Err(format!("inconsistent size bounds for `{}`", d.component_id));
            }
            let id = d.component_id.clone();
            if map.insert(id.clone(), d).is_some() {
                return Err(format!("duplicate component id `{id}`"));
            }
        }
        Ok(RegistrySnapshot {
            version,
            descriptors: map,
        })
    }

    pub fn get(&self, component_id: &str) -> Option<&ComponentDescriptor> {
        self.descriptors.get(component_id)
    }
}

#[allow(clippy::too_many_arguments)]
fn descriptor(
    id: &str,
    name: &str,
    category: Category,
    default: (u32, u32),
    min: (u32, u32),
    max: (u32, u32),
    required_right: Option<Right>,
    singleton: bool,
    guest_visible: bool,
) -> ComponentDescriptor {
    ComponentDescriptor {
        component_id: id.to_string(),
        display_name: name.to_string(),
        category,
        default_size: Size::new(default.0, default.1),
        min_size: Size::new(min.0, min.1),
        max_size: Size::new(max.0, max.1),
        required_right,
        singleton,
        guest_visible,
    }
}

pub const BUILTIN_CATALOG_VERSION: u64 = 1;

/// The fixed catalog shipped with the server.
pub fn builtin_catalog() -> RegistrySnapshot {
    use Category::*;

    let descriptors = vec![
        descriptor(
            "product-search",
            "Product Search",
            PdmOperations,
            (8, 4),
            (4, 3),
            (12, 8),
            Some(Right::ViewPDM),
            false,
            true,
        ),
        descriptor(
            "project-list",
            "Project List",
            PdmOperations,
            (6, 4),
            (4, 3),
            (12, 8),
            Some(Right::ViewPDM),
            false,
            true,
        ),
        descriptor(
            "document-browser",
            "Document Browser",
            PdmOperations,
            (6, 4),
            (4, 3),
            (12, 8),
            Some(Right::ViewPDM),
            false,
            true,
        ),
        descriptor(
            "interface-setting",
            "Interface Setting",
            System,
            (4, 3),
            (3, 2),
            (6, 6),
            Some(Right::EditOwnLayout),
            true,
            false,
        ),
        descriptor(
            "user-log",
            "User Log",
            System,
            (6, 4),
            (4, 3),
            (12, 8),
            Some(Right::ViewAuditLog),
            true,
            false,
        ),
        descriptor(
            "user-details",
            "User Details",
            Personal,
            (4, 3),
            (3, 2),
            (6, 5),
            None,
            true,
            false,
        ),
        descriptor(
            "calendar",
            "Calendar",
            Personal,
            (4, 3),
            (3, 3),
            (6, 5),
            None,
            false,
            true,
        ),
        descriptor(
            "chat",
            "Chat",
            Communication,
            (4, 4),
            (3, 3),
            (6, 8),
            None,
            true,
            false,
        ),
    ];
    RegistrySnapshot::new(BUILTIN_CATALOG_VERSION, descriptors)
        .expect("built-in catalog is consistent")
}

/// Components `role` may place, ordered by (category, component_id).
pub fn list_visible(reg: &RegistrySnapshot, role: Role) -> Vec<ComponentDescriptor> {
    let mut visible: Vec<_> = reg
        .descriptors
        .values()
        .filter(|d| d.visible_to(role))
        .cloned()
        .collect();
    visible.sort_by(|a, b| {
        (a.category, a.component_id.as_str()).cmp(&(b.category, b.component_id.as_str()))
    });
    visible
}

/// Components each role starts with, in placement order.
pub fn default_seed(role: Role) -> &'static [&'static str] {
    match role {
        Role::Guest => &["product-search"],
        Role::StaffMember => &["user-details", "chat", "calendar"],
        Role::Engineer => &["product-search", "document-browser", "chat"],
        Role::ProjectManager => &["project-list", "product-search", "chat", "calendar"],
        Role::Businessman => &["project-list", "calendar"],
        Role::Administrator => &[
            "project-list",
            "product-search",
            "chat",
            "calendar",
            "user-log",
        ],
    }
}

/// The system-composed layout for `role`: each seed component at its
/// default size, placed first-fit in seed order.
pub fn compose_default(role: Role, reg: &RegistrySnapshot) -> LayoutDocument {
    let mut doc = LayoutDocument::empty(LayoutDocument::default_owner(role), role);
    let columns = doc.grid.columns;
    for &component_id in default_seed(role) {
        let Some(desc) = reg.get(component_id).filter(|d| d.visible_to(role)) else {
            continue;
        };
        let width = desc.default_size.width.min(columns);
        let height = desc.default_size.height;
        let placement: Placement =
            find_free_slot(&doc, width, height).expect("width clamped to the grid");
        let instance_id = doc.next_instance_id(component_id);
        doc.instances.push(ComponentInstance {
            instance_id,
            component_id: component_id.to_string(),
            placement,
            settings: BTreeMap::new(),
        });
    }
    doc
}
