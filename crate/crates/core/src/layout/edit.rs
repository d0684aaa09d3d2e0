use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::validate::ValidationReport;
use super::{
    find_free_slot, validate, ComponentInstance, LayoutDocument, LayoutError, Placement, Theme,
    ViolationCode,
};
use crate::registry::RegistrySnapshot;

/// One user-level change to a layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", deny_unknown_fields)]
pub enum LayoutEdit {
    /// Places a new component. Without a placement the first free slot at
    /// the descriptor's default size is used; without an instance id the
    /// next free `<component_id>-<n>` is assigned.
    AddComponent {
        component_id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        instance_id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        placement: Option<Placement>,
        #[serde(default)]
        settings: BTreeMap<String, String>,
    },
    RemoveComponent {
        instance_id: String,
    },
    MoveResize {
        instance_id: String,
        placement: Placement,
    },
    SetTheme {
        theme: Theme,
    },
    /// Sets a component-local option; a `null` value removes the key.
    SetSetting {
        instance_id: String,
        key: String,
        value: Option<String>,
    },
}

/// Applies one edit and requires the result to validate.
///
/// The revision is left alone; only the store advances it.
pub fn apply_edit(
    doc: &LayoutDocument,
    edit: &LayoutEdit,
    registry: &RegistrySnapshot,
) -> Result<LayoutDocument, LayoutError> {
    patch(doc, std::slice::from_ref(edit), registry)
}

/// Applies `edits` in order and validates only the final document.
///
/// Intermediate states may overlap (two components swapping places cannot
/// be expressed otherwise); the result is all-or-nothing.
pub fn patch(
    doc: &LayoutDocument,
    edits: &[LayoutEdit],
    registry: &RegistrySnapshot,
) -> Result<LayoutDocument, LayoutError> {
    let mut next = doc.clone();
    for edit in edits {
        apply_unchecked(&mut next, edit, registry)?;
    }
    let report = validate(&next, registry);
    match report.violations.first() {
        None => Ok(next),
        Some(first) => Err(LayoutError::EditRejected {
            code: first.code,
            report,
        }),
    }
}

fn instance_mut<'a>(
    doc: &'a mut LayoutDocument,
    instance_id: &str,
) -> Result<&'a mut ComponentInstance, LayoutError> {
    doc.instances
        .iter_mut()
        .find(|i| i.instance_id == instance_id)
        .ok_or_else(|| LayoutError::UnknownInstance(instance_id.to_string()))
}

fn apply_unchecked(
    doc: &mut LayoutDocument,
    edit: &LayoutEdit,
    registry: &RegistrySnapshot,
) -> Result<(), LayoutError> {
    match edit {
        LayoutEdit::AddComponent {
            component_id,
            instance_id,
            placement,
            settings,
        } => {
            let placement = match placement {
                Some(p) => *p,
                None => {
                    let desc = registry.get(component_id).ok_or_else(|| {
                        let code = ViolationCode::UnknownComponent;
                        LayoutError::EditRejected {
                            code,
                            report: ValidationReport::single(
                                code,
                                component_id.clone(),
                                format!("component `{component_id}` is not in the registry"),
                            ),
                        }
                    })?;
                    find_free_slot(doc, desc.default_size.width, desc.default_size.height)?
                }
            };
            let instance_id = instance_id
                .clone()
                .unwrap_or_else(|| doc.next_instance_id(component_id));
            doc.instances.push(ComponentInstance {
                instance_id,
                component_id: component_id.clone(),
                placement,
                settings: settings.clone(),
            });
        }
        LayoutEdit::RemoveComponent { instance_id } => {
            let idx = doc
                .instances
                .iter()
                .position(|i| &i.instance_id == instance_id)
                .ok_or_else(|| LayoutError::UnknownInstance(instance_id.clone()))?;
            doc.instances.remove(idx);
        }
        LayoutEdit::MoveResize {
            instance_id,
            placement,
        } => instance_mut(doc, instance_id)?.placement = *placement,
        LayoutEdit::SetTheme { theme } => doc.theme = theme.clone(),
        LayoutEdit::SetSetting {
            instance_id,
            key,
            value,
        } => {
            let settings = &mut instance_mut(doc, instance_id)?.settings;
            match value {
                Some(v) => {
                    settings.insert(key.clone(), v.clone());
                }
                None => {
                    settings.remove(key);
                }
            }
        }
    }
    Ok(())
}
