use super::{LayoutDocument, LayoutError, Placement};

/// First free `width`x`height` rectangle, scanning rows top to bottom and
/// columns left to right. Rows are unbounded, so a slot always exists once
/// the width fits the grid.
pub fn find_free_slot(
    doc: &LayoutDocument,
    width: u32,
    height: u32,
) -> Result<Placement, LayoutError> {
    let columns = doc.grid.columns;
    if width == 0 || height == 0 {
        return Err(LayoutError::EmptySize { width, height });
    }
    if width > columns {
        return Err(LayoutError::WidthExceedsGrid { width, columns });
    }
    // Any row at or below the lowest occupied edge is empty.
    let floor = doc
        .instances
        .iter()
        .map(|i| i.placement.bottom())
        .max()
        .unwrap_or(0);
    let floor = u32::try_from(floor).unwrap_or(u32::MAX);

    for row in 0..=floor {
        let mut col = 0;
        while col + width <= columns {
            let candidate = Placement::new(col, row, width, height);
            match doc
                .instances
                .iter()
                .filter(|i| i.placement.intersects(&candidate))
                .map(|i| i.placement.right())
                .max()
            {
                None => return Ok(candidate),
                // Every column before the blocker's right edge also collides.
                Some(blocker_right) => {
                    col = u32::try_from(blocker_right)
                        .unwrap_or(u32::MAX)
                        .max(col + 1)
                }
            }
        }
    }
    Ok(Placement::new(0, floor, width, height))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::layout::ComponentInstance;
    use crate::role::Role;

    fn doc_with(placements: &[Placement]) -> LayoutDocument {
        let mut doc = LayoutDocument::empty("u", Role::Engineer);
        for (n, p) in placements.iter().enumerate() {
            doc.instances.push(ComponentInstance {
                instance_id: format!("i{n}"),
                component_id: "calendar".into(),
                placement: *p,
                settings: BTreeMap::new(),
            });
        }
        doc
    }

    #[test]
    fn empty_grid_starts_at_origin() {
        assert_eq!(
            find_free_slot(&doc_with(&[]), 4, 2).unwrap(),
            Placement::new(0, 0, 4, 2)
        );
    }

    #[test]
    fn full_width_band_pushes_down() {
        let doc = doc_with(&[Placement::new(0, 0, 12, 2)]);
        assert_eq!(
            find_free_slot(&doc, 4, 2).unwrap(),
            Placement::new(0, 2, 4, 2)
        );
    }

    #[test]
    fn half_band_fills_right() {
        let doc = doc_with(&[Placement::new(0, 0, 6, 2)]);
        assert_eq!(
            find_free_slot(&doc, 6, 2).unwrap(),
            Placement::new(6, 0, 6, 2)
        );
    }

    #[test]
    fn too_wide_is_rejected() {
        assert_eq!(
            find_free_slot(&doc_with(&[]), 13, 1),
            Err(LayoutError::WidthExceedsGrid {
                width: 13,
                columns: 12
            })
        );
    }

    #[test]
    fn fits_into_a_hole() {
        let doc = doc_with(&[
            Placement::new(0, 0, 3, 3),
            Placement::new(5, 0, 7, 1),
            Placement::new(5, 1, 2, 5),
        ]);
        assert_eq!(
            find_free_slot(&doc, 2, 2).unwrap(),
            Placement::new(3, 0, 2, 2)
        );
        assert_eq!(
            find_free_slot(&doc, 3, 2).unwrap(),
            Placement::new(7, 1, 3, 2)
        );
    }
}
