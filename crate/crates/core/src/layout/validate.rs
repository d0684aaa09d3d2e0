use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{is_hex_color, LayoutDocument, FONT_FAMILIES, MAX_FONT_SIZE_PT, MIN_FONT_SIZE_PT};
use crate::registry::RegistrySnapshot;

/// Violation kinds, declared in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    Overlap,
    OutOfBounds,
    UnknownComponent,
    RoleForbidden,
    SizeBounds,
    DuplicateInstanceId,
    SingletonViolation,
    BadTheme,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
    /// Instance id, or a field path such as `theme.font_family`.
    pub subject: String,
    /// For overlaps, the earlier instance the subject collides with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub related: Option<String>,
}

/// Every problem found in a document. Empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    pub fn contains(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub(crate) fn single(
        code: ViolationCode,
        subject: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        ValidationReport {
            violations: vec![Violation {
                code,
                detail: detail.into(),
                subject: subject.into(),
                related: None,
            }],
        }
    }
}

fn violation(code: ViolationCode, subject: &str, detail: String) -> Violation {
    Violation {
        code,
        detail,
        subject: subject.to_string(),
        related: None,
    }
}

/// Checks `doc` against the grid, the registry and the theme rules.
///
/// Instance findings come first, in instance order and then code order;
/// an overlap is reported once per pair, on the later instance. Grid and
/// theme findings follow.
pub fn validate(doc: &LayoutDocument, registry: &RegistrySnapshot) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut seen_singletons = HashSet::new();
    let columns = u64::from(doc.grid.columns);

    for (idx, inst) in doc.instances.iter().enumerate() {
        let id = inst.instance_id.as_str();
        let p = &inst.placement;
        let mut found = Vec::new();

        for earlier in &doc.instances[..idx] {
            if p.intersects(&earlier.placement) {
                found.push(Violation {
                    related: Some(earlier.instance_id.clone()),
                    ..violation(
                        ViolationCode::Overlap,
                        id,
                        format!("overlaps `{}`", earlier.instance_id),
                    )
                });
            }
        }
        if p.right() > columns {
            found.push(violation(
                ViolationCode::OutOfBounds,
                id,
                format!(
                    "spans columns {}..{} on a {columns}-column grid",
                    p.col,
                    p.right()
                ),
            ));
        }
        match registry.get(&inst.component_id) {
            None => found.push(violation(
                ViolationCode::UnknownComponent,
                id,
                format!("component `{}` is not in the registry", inst.component_id),
            )),
            Some(desc) => {
                if !desc.visible_to(doc.role) {
                    found.push(violation(
                        ViolationCode::RoleForbidden,
                        id,
                        format!("`{}` is not available to {}", desc.component_id, doc.role),
                    ));
                }
                if !desc.accepts_size(p.width, p.height) {
                    found.push(violation(
                        ViolationCode::SizeBounds,
                        id,
                        format!(
                            "size {}x{} outside {}x{}..={}x{}",
                            p.width,
                            p.height,
                            desc.min_size.width,
                            desc.min_size.height,
                            desc.max_size.width,
                            desc.max_size.height
                        ),
                    ));
                }
                if desc.singleton && !seen_singletons.insert(desc.component_id.as_str()) {
                    found.push(violation(
                        ViolationCode::SingletonViolation,
                        id,
                        format!("`{}` may appear only once", desc.component_id),
                    ));
                }
            }
        }
        if !seen_ids.insert(id) {
            found.push(violation(
                ViolationCode::DuplicateInstanceId,
                id,
                "instance id used more than once".to_string(),
            ));
        }

        found.sort_by_key(|v| v.code);
        violations.extend(found);
    }

    if !doc.grid.is_valid() {
        violations.push(violation(
            ViolationCode::OutOfBounds,
            "grid",
            format!(
                "grid {} columns x {} px rows is outside the supported range",
                doc.grid.columns, doc.grid.row_unit_px
            ),
        ));
    }

    let theme = &doc.theme;
    for (field, value) in [
        ("theme.background_color", &theme.background_color),
        ("theme.accent_color", &theme.accent_color),
    ] {
        if !is_hex_color(value) {
            violations.push(violation(
                ViolationCode::BadTheme,
                field,
                format!("`{value}` is not a #RRGGBB color"),
            ));
        }
    }
    if !FONT_FAMILIES.contains(&theme.font_family.as_str()) {
        violations.push(violation(
            ViolationCode::BadTheme,
            "theme.font_family",
            format!("font `{}` is not in the allowed list", theme.font_family),
        ));
    }
    if !(MIN_FONT_SIZE_PT..=MAX_FONT_SIZE_PT).contains(&theme.font_size_pt) {
        violations.push(violation(
            ViolationCode::BadTheme,
            "theme.font_size_pt",
            format!(
                "font size {} outside {MIN_FONT_SIZE_PT}..={MAX_FONT_SIZE_PT}",
                theme.font_size_pt
            ),
        ));
    }

    ValidationReport { violations }
}
