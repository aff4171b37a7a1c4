use serde::Serialize;

use crate::model::{PlacementHints, Plane, SurfaceClass};

/// Advisory mismatch between a story's stated physical needs and the plane a
/// viewer picked. Warnings never block placement.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlacementWarning {
    SurfaceMismatch {
        expected: SurfaceClass,
        actual: SurfaceClass,
    },
    TooSmall {
        required: [f64; 2],
        actual: [f64; 2],
    },
}

/// A plane is large enough when the required rectangle fits in either
/// orientation, since the viewer can turn the anchor.
pub fn check_placement_hints(hints: &PlacementHints, plane: &Plane) -> Vec<PlacementWarning> {
    let mut out = Vec::new();
    if hints.surface_class() != SurfaceClass::Any && hints.surface_class() != plane.surface_class()
    {
        out.push(PlacementWarning::SurfaceMismatch {
            expected: hints.surface_class(),
            actual: plane.surface_class(),
        });
    }
    if let Some(req) = hints.min_extents() {
        let ext = plane.extents();
        let (w, d) = (ext.width(), ext.depth());
        let upright = w >= req.width() && d >= req.depth();
        let turned = w >= req.depth() && d >= req.width();
        if !upright && !turned {
            out.push(PlacementWarning::TooSmall {
                required: [req.width(), req.depth()],
                actual: [w, d],
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Extents;

    fn plane(class: SurfaceClass, w: f64, d: f64) -> Plane {
        Plane::new([0.0; 3], 0.0, Extents::new(w, d).unwrap(), class).unwrap()
    }

    #[test]
    fn matching_surface_is_silent() {
        let h = PlacementHints::new(SurfaceClass::Floor, None, "").unwrap();
        assert!(check_placement_hints(&h, &plane(SurfaceClass::Floor, 1.0, 1.0)).is_empty());
    }

    #[test]
    fn tub_edge_story_on_a_table() {
        let h = PlacementHints::new(SurfaceClass::TubEdge, None, "best placed on the bath tub")
            .unwrap();
        assert_eq!(
            check_placement_hints(&h, &plane(SurfaceClass::Table, 1.0, 1.0)),
            vec![PlacementWarning::SurfaceMismatch {
                expected: SurfaceClass::TubEdge,
                actual: SurfaceClass::Table
            }]
        );
    }

    #[test]
    fn any_surface_accepts_everything() {
        let h = PlacementHints::new(SurfaceClass::Any, None, "").unwrap();
        for c in SurfaceClass::ALL {
            assert!(check_placement_hints(&h, &plane(c, 1.0, 1.0)).is_empty());
        }
    }

    #[test]
    fn too_small_plane() {
        let h = PlacementHints::new(SurfaceClass::Any, Some(Extents::new(2.0, 2.0).unwrap()), "")
            .unwrap();
        assert_eq!(
            check_placement_hints(&h, &plane(SurfaceClass::Table, 1.0, 1.0)),
            vec![PlacementWarning::TooSmall {
                required: [2.0, 2.0],
                actual: [1.0, 1.0]
            }]
        );
    }

    #[test]
    fn either_orientation_counts() {
        let h = PlacementHints::new(SurfaceClass::Any, Some(Extents::new(2.0, 0.5).unwrap()), "")
            .unwrap();
        assert!(check_placement_hints(&h, &plane(SurfaceClass::Table, 0.6, 2.5)).is_empty());
    }
}
