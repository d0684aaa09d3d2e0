//! Layout documents: the complete description of one user's dashboard.
//!
//! Components sit on a discrete column grid as non-overlapping rectangles.
//! Everything here is a pure function of its inputs; the revision counter is
//! only ever advanced by the store.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::role::Role;

mod codec;
mod diff;
mod edit;
mod slot;
mod validate;

pub use codec::{decode, decode_value, encode, DecodeError};
pub use diff::diff;
pub use edit::{apply_edit, patch, LayoutEdit};
pub use slot::find_free_slot;
pub use validate::{validate, ValidationReport, Violation, ViolationCode};

/// The only document schema this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

pub const MIN_COLUMNS: u32 = 1;
pub const MAX_COLUMNS: u32 = 64;
pub const MIN_ROW_UNIT_PX: u32 = 8;
pub const MAX_ROW_UNIT_PX: u32 = 256;

/// Font families a theme may use.
pub const FONT_FAMILIES: &[&str] = &[
    "Arial",
    "Courier New",
    "Georgia",
    "Helvetica",
    "Tahoma",
    "Times New Roman",
    "Verdana",
];
pub const MIN_FONT_SIZE_PT: u32 = 8;
pub const MAX_FONT_SIZE_PT: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawGrid")]
pub struct GridSpec {
    pub columns: u32,
    /// Pixel height of one row. Only a rendering hint.
    pub row_unit_px: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    columns: u32,
    row_unit_px: u32,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = String;

    fn try_from(raw: RawGrid) -> Result<Self, Self::Error> {
        GridSpec::new(raw.columns, raw.row_unit_px)
    }
}

impl GridSpec {
    pub fn new(columns: u32, row_unit_px: u32) -> Result<Self, String> {
        if !(MIN_COLUMNS..=MAX_COLUMNS).contains(&columns) {
            return Err(format!(
                "columns must be within {MIN_COLUMNS}..={MAX_COLUMNS}, got {columns}"
            ));
        }
        if !(MIN_ROW_UNIT_PX..=MAX_ROW_UNIT_PX).contains(&row_unit_px) {
            return Err(format!(
                "row_unit_px must be within {MIN_ROW_UNIT_PX}..={MAX_ROW_UNIT_PX}, got {row_unit_px}"
            ));
        }
        Ok(GridSpec {
            columns,
            row_unit_px,
        })
    }

    pub fn is_valid(&self) -> bool {
        GridSpec::new(self.columns, self.row_unit_px).is_ok()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            columns: 12,
            row_unit_px: 40,
        }
    }
}

/// A rectangle of grid cells: columns `col..col+width`, rows `row..row+height`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawPlacement")]
pub struct Placement {
    pub col: u32,
    pub row: u32,
    pub width: u32,
    pub height: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlacement {
    col: u32,
    row: u32,
    width: u32,
    height: u32,
}

impl TryFrom<RawPlacement> for Placement {
    type Error = String;

    fn try_from(raw: RawPlacement) -> Result<Self, Self::Error> {
        if raw.width == 0 || raw.height == 0 {
            return Err(format!(
                "width and height must be positive, got {}x{}",
                raw.width, raw.height
            ));
        }
        Ok(Placement::new(raw.col, raw.row, raw.width, raw.height))
    }
}

impl Placement {
    pub const fn new(col: u32, row: u32, width: u32, height: u32) -> Self {
        Placement {
            col,
            row,
            width,
            height,
        }
    }

    /// One past the last occupied column.
    pub fn right(&self) -> u64 {
        u64::from(self.col) + u64::from(self.width)
    }

    /// One past the last occupied row.
    pub fn bottom(&self) -> u64 {
        u64::from(self.row) + u64::from(self.height)
    }

    pub fn intersects(&self, other: &Placement) -> bool {
        u64::from(self.col) < other.right()
            && u64::from(other.col) < self.right()
            && u64::from(self.row) < other.bottom()
            && u64::from(other.row) < self.bottom()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theme {
    pub background_color: String,
    pub accent_color: String,
    pub font_family: String,
    pub font_size_pt: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background_image: Option<String>,
}

impl Default for Theme {
    fn default() -> Self {
        Theme {
            background_color: "#F4F6F8".to_string(),
            accent_color: "#1F6FEB".to_string(),
            font_family: "Verdana".to_string(),
            font_size_pt: 11,
            background_image: None,
        }
    }
}

/// `#RRGGBB`, case-insensitive hex digits.
pub fn is_hex_color(s: &str) -> bool {
    let bytes = s.as_bytes();
    bytes.len() == 7 && bytes[0] == b'#' && bytes[1..].iter().all(u8::is_ascii_hexdigit)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentInstance {
    pub instance_id: String,
    pub component_id: String,
    pub placement: Placement,
    #[serde(default)]
    pub settings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDocument {
    pub schema_version: u32,
    /// A user id, or `default:<Role>` for a system-composed layout.
    pub owner: String,
    pub role: Role,
    pub grid: GridSpec,
    pub instances: Vec<ComponentInstance>,
    pub theme: Theme,
    pub revision: u64,
}

impl LayoutDocument {
    /// An empty document on the default grid and theme.
    pub fn empty(owner: impl Into<String>, role: Role) -> Self {
        LayoutDocument {
            schema_version: SCHEMA_VERSION,
            owner: owner.into(),
            role,
            grid: GridSpec::default(),
            instances: Vec::new(),
            theme: Theme::default(),
            revision: 0,
        }
    }

    pub fn default_owner(role: Role) -> String {
        format!("default:{role}")
    }

    pub fn instance(&self, instance_id: &str) -> Option<&ComponentInstance> {
        self.instances.iter().find(|i| i.instance_id == instance_id)
    }

    /// Structural equality ignoring the revision counter.
    pub fn same_content(&self, other: &LayoutDocument) -> bool {
        LayoutDocument {
            revision: other.revision,
            ..self.clone()
        } == *other
    }

    /// `<component_id>-<n>` with the smallest `n >= 1` not already in use.
    pub fn next_instance_id(&self, component_id: &str) -> String {
        (1u64..)
            .map(|n| format!("{component_id}-{n}"))
            .find(|id| self.instance(id).is_none())
            .expect("unbounded search always finds a free id")
    }
}

/// Errors from edit application, slot search and diffing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayoutError {
    #[error("edit rejected: {code:?}")]
    EditRejected {
        code: ViolationCode,
        report: ValidationReport,
    },
    #[error("no instance `{0}` in document")]
    UnknownInstance(String),
    #[error("requested width {width} exceeds grid of {columns} columns")]
    WidthExceedsGrid { width: u32, columns: u32 },
    #[error("requested size {width}x{height} is empty")]
    EmptySize { width: u32, height: u32 },
    #[error("documents use different grids")]
    GridMismatch,
    #[error("documents belong to different roles")]
    RoleMismatch,
}
