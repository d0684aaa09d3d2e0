//! Random document generators and brute-force oracles for property tests.
//!
//! The oracles work on explicit cell occupancy grids and never call the
//! rectangle arithmetic in `layout`, so they can check it independently.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::layout::{
    ComponentInstance, GridSpec, LayoutDocument, LayoutEdit, Placement, Theme, FONT_FAMILIES,
};
use crate::registry::{list_visible, RegistrySnapshot};
use crate::role::Role;

pub use rand_chacha::ChaCha8Rng;

fn random_color<R: Rng>(rng: &mut R) -> String {
    let v: u32 = rng.random_range(0..0x100_0000);
    if rng.random_bool(0.5) {
        format!("#{v:06x}")
    } else {
        format!("#{v:06X}")
    }
}

pub fn random_theme<R: Rng>(rng: &mut R) -> Theme {
    Theme {
        background_color: random_color(rng),
        accent_color: random_color(rng),
        font_family: FONT_FAMILIES.choose(rng).unwrap().to_string(),
        font_size_pt: rng.random_range(8..=24),
        background_image: rng
            .random_bool(0.3)
            .then(|| format!("img/{}.png", rng.random_range(0..5))),
    }
}

fn random_settings<R: Rng>(rng: &mut R) -> BTreeMap<String, String> {
    (0..rng.random_range(0..3))
        .map(|_| {
            (
                format!("k{}", rng.random_range(0..4)),
                format!("v{}", rng.random_range(0..100)),
            )
        })
        .collect()
}

/// Any document, valid or not: arbitrary components (including unknown
/// ones), placements that may overlap or overflow, sometimes a bad theme.
/// Instance ids are unique so overlap pairs can be named by id.
pub fn random_doc<R: Rng>(rng: &mut R, reg: &RegistrySnapshot) -> LayoutDocument {
    let role = *Role::ALL.choose(rng).unwrap();
    let columns = rng.random_range(1..=12);
    let mut doc = LayoutDocument::empty("user-1", role);
    doc.grid = GridSpec::new(columns, 40).unwrap();
    doc.theme = random_theme(rng);
    if rng.random_bool(0.1) {
        doc.theme.accent_color = "tomato".into();
    }
    if rng.random_bool(0.1) {
        doc.theme.font_size_pt = 30;
    }
    let ids: Vec<&String> = reg.descriptors.keys().collect();
    for n in 0..rng.random_range(0..8) {
        let component_id = if rng.random_bool(0.05) {
            "no-such-component".to_string()
        } else {
            ids.choose(rng).unwrap().to_string()
        };
        doc.instances.push(ComponentInstance {
            instance_id: format!("i{n}"),
            component_id,
            placement: Placement::new(
                rng.random_range(0..columns + 2),
                rng.random_range(0..12),
                rng.random_range(1..=columns.max(2)),
                rng.random_range(1..=6),
            ),
            settings: random_settings(rng),
        });
    }
    doc.revision = rng.random_range(0..5);
    doc
}

fn try_place<R: Rng>(
    rng: &mut R,
    doc: &LayoutDocument,
    width: u32,
    height: u32,
) -> Option<Placement> {
    let columns = doc.grid.columns;
    for _ in 0..20 {
        let p = Placement::new(
            rng.random_range(0..=columns - width),
            rng.random_range(0..=30),
            width,
            height,
        );
        if occupancy(doc).is_none_or(|cells| free_at(&cells, columns, p)) {
            return Some(p);
        }
    }
    None
}

/// A valid document for `role` on a grid of at most 12 columns, with all
/// instances inside the first 40 rows.
pub fn random_valid_doc<R: Rng>(
    rng: &mut R,
    reg: &RegistrySnapshot,
    role: Role,
    grid: GridSpec,
    owner: &str,
) -> LayoutDocument {
    let mut doc = LayoutDocument::empty(owner, role);
    doc.grid = grid;
    doc.theme = random_theme(rng);
    let visible = list_visible(reg, role);
    for _ in 0..rng.random_range(0..7) {
        let desc = visible.choose(rng).unwrap();
        if desc.min_size.width > grid.columns
            || (desc.singleton
                && doc
                    .instances
                    .iter()
                    .any(|i| i.component_id == desc.component_id))
        {
            continue;
        }
        let width = rng.random_range(desc.min_size.width..=desc.max_size.width.min(grid.columns));
        let height = rng.random_range(desc.min_size.height..=desc.max_size.height);
        if let Some(placement) = try_place(rng, &doc, width, height) {
            let instance_id = if rng.random_bool(0.5) {
                doc.next_instance_id(&desc.component_id)
            } else {
                format!("w{}", rng.random_range(0..1000))
            };
            if doc.instance(&instance_id).is_some() {
                continue;
            }
            doc.instances.push(ComponentInstance {
                instance_id,
                component_id: desc.component_id.clone(),
                placement,
                settings: random_settings(rng),
            });
        }
    }
    doc
}

/// A random grid of 4..=12 columns.
pub fn random_grid<R: Rng>(rng: &mut R) -> GridSpec {
    GridSpec::new(rng.random_range(4..=12), 40).unwrap()
}

/// A random edit against `doc`, frequently one that should be rejected.
pub fn random_edit<R: Rng>(
    rng: &mut R,
    doc: &LayoutDocument,
    reg: &RegistrySnapshot,
) -> LayoutEdit {
    let ids: Vec<&String> = reg.descriptors.keys().collect();
    let existing = doc.instances.choose(rng).map(|i| i.instance_id.clone());
    let target = existing.unwrap_or_else(|| "ghost".to_string());
    let placement = Placement::new(
        rng.random_range(0..doc.grid.columns + 1),
        rng.random_range(0..20),
        rng.random_range(1..=doc.grid.columns + 1),
        rng.random_range(1..=9),
    );
    match rng.random_range(0..5) {
        0 => LayoutEdit::AddComponent {
            component_id: ids.choose(rng).unwrap().to_string(),
            instance_id: None,
            placement: rng.random_bool(0.5).then_some(placement),
            settings: random_settings(rng),
        },
        1 => LayoutEdit::RemoveComponent {
            instance_id: target,
        },
        2 => LayoutEdit::MoveResize {
            instance_id: target,
            placement,
        },
        3 => {
            let mut theme = random_theme(rng);
            if rng.random_bool(0.2) {
                theme.font_family = "Wingdings".into();
            }
            LayoutEdit::SetTheme { theme }
        }
        _ => LayoutEdit::SetSetting {
            instance_id: target,
            key: format!("k{}", rng.random_range(0..4)),
            value: rng.random_bool(0.7).then(|| "x".to_string()),
        },
    }
}

/// A second valid document sharing `base`'s grid, role and owner: either
/// `base` after a few accepted edits and maybe a reshuffle, or an
/// unrelated random document.
pub fn random_target<R: Rng>(
    rng: &mut R,
    base: &LayoutDocument,
    reg: &RegistrySnapshot,
) -> LayoutDocument {
    if rng.random_bool(0.3) {
        let mut doc = random_valid_doc(rng, reg, base.role, base.grid, &base.owner);
        doc.revision = base.revision;
        return doc;
    }
    let mut doc = base.clone();
    for _ in 0..rng.random_range(0..6) {
        let edit = random_edit(rng, &doc, reg);
        if let Ok(next) = crate::layout::apply_edit(&doc, &edit, reg) {
            doc = next;
        }
    }
    if rng.random_bool(0.2) {
        doc.instances.shuffle(rng);
    }
    doc
}

/// Cells of the grid, row-major, holding the index of the occupying
/// instance. `None` when some instance leaves the grid horizontally.
fn occupancy(doc: &LayoutDocument) -> Option<Vec<Vec<Option<usize>>>> {
    let columns = doc.grid.columns as usize;
    let rows = doc
        .instances
        .iter()
        .map(|i| (i.placement.row + i.placement.height) as usize)
        .max()
        .unwrap_or(0);
    let mut cells = vec![vec![None; columns]; rows];
    for (idx, inst) in doc.instances.iter().enumerate() {
        let p = inst.placement;
        for r in p.row..p.row + p.height {
            for c in p.col..p.col + p.width {
                let slot = cells[r as usize].get_mut(c as usize)?;
                slot.get_or_insert(idx);
            }
        }
    }
    Some(cells)
}

fn free_at(cells: &[Vec<Option<usize>>], columns: u32, p: Placement) -> bool {
    if p.col + p.width > columns {
        return false;
    }
    (p.row..p.row + p.height).all(|r| {
        (p.col..p.col + p.width).all(|c| {
            cells
                .get(r as usize)
                .is_none_or(|row| row[c as usize].is_none())
        })
    })
}

/// Every pair of instance indices `(earlier, later)` that share at least
/// one cell, found by painting each instance cell by cell.
pub fn brute_force_overlaps(doc: &LayoutDocument) -> BTreeSet<(usize, usize)> {
    let mut painted: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (idx, inst) in doc.instances.iter().enumerate() {
        let p = inst.placement;
        for r in p.row..p.row + p.height {
            for c in p.col..p.col + p.width {
                painted.entry((r, c)).or_default().push(idx);
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for owners in painted.values() {
        for (a, &i) in owners.iter().enumerate() {
            for &j in &owners[a + 1..] {
                pairs.insert((i.min(j), i.max(j)));
            }
        }
    }
    pairs
}

/// Row-major exhaustive scan for the first free `width`x`height` slot,
/// checking rows `0..=max_rows`.
pub fn brute_force_free_slot(
    doc: &LayoutDocument,
    width: u32,
    height: u32,
    max_rows: u32,
) -> Option<Placement> {
    let cells = occupancy(doc)?;
    let columns = doc.grid.columns;
    (0..=max_rows)
        .flat_map(|row| (0..columns).map(move |col| Placement::new(col, row, width, height)))
        .find(|&p| free_at(&cells, columns, p))
}
