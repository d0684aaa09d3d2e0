use std::collections::{BTreeSet, HashMap, HashSet};

use super::{LayoutDocument, LayoutEdit, LayoutError};

/// Edits that turn `base` into `target` when applied with [`patch`].
///
/// Order is removals, adds, moves, then theme and settings. Instances that
/// `target` keeps must appear as a prefix of its list in `base`'s relative
/// order; any other instance is removed and re-added so the final list
/// order matches `target`. Owner, schema version and revision come from
/// `base`.
///
/// [`patch`]: super::patch
pub fn diff(
    base: &LayoutDocument,
    target: &LayoutDocument,
) -> Result<Vec<LayoutEdit>, LayoutError> {
    if base.grid != target.grid {
        return Err(LayoutError::GridMismatch);
    }
    if base.role != target.role {
        return Err(LayoutError::RoleMismatch);
    }

    let mut base_pos = HashMap::new();
    for (pos, inst) in base.instances.iter().enumerate() {
        base_pos.entry(inst.instance_id.as_str()).or_insert(pos);
    }

    let mut kept = Vec::new();
    let mut last = None;
    for inst in &target.instances {
        let Some(&pos) = base_pos.get(inst.instance_id.as_str()) else {
            break;
        };
        let same_kind = base.instances[pos].component_id == inst.component_id;
        if !same_kind || last.is_some_and(|l| pos <= l) {
            break;
        }
        last = Some(pos);
        kept.push((pos, inst));
    }
    let kept_ids: HashSet<&str> = kept.iter().map(|(_, t)| t.instance_id.as_str()).collect();

    let mut edits = Vec::new();
    edits.extend(
        base.instances
            .iter()
            .filter(|b| !kept_ids.contains(b.instance_id.as_str()))
            .map(|b| LayoutEdit::RemoveComponent {
                instance_id: b.instance_id.clone(),
            }),
    );
    edits.extend(
        target.instances[kept.len()..]
            .iter()
            .map(|t| LayoutEdit::AddComponent {
                component_id: t.component_id.clone(),
                instance_id: Some(t.instance_id.clone()),
                placement: Some(t.placement),
                settings: t.settings.clone(),
            }),
    );
    for &(pos, t) in &kept {
        if base.instances[pos].placement != t.placement {
            edits.push(LayoutEdit::MoveResize {
                instance_id: t.instance_id.clone(),
                placement: t.placement,
            });
        }
    }
    if base.theme != target.theme {
        edits.push(LayoutEdit::SetTheme {
            theme: target.theme.clone(),
        });
    }
    for &(pos, t) in &kept {
        let from = &base.instances[pos].settings;
        let keys: BTreeSet<&String> = from.keys().chain(t.settings.keys()).collect();
        for key in keys {
            let want = t.settings.get(key);
            if from.get(key) != want {
                edits.push(LayoutEdit::SetSetting {
                    instance_id: t.instance_id.clone(),
                    key: key.clone(),
                    value: want.cloned(),
                });
            }
        }
    }
    Ok(edits)
}
