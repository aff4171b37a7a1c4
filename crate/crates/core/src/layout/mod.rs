//! Scene reconstruction on physical planes, plus the checks a viewer runs
//! around placement: fit, placement hints, navigation, clutter, gestures and
//! draft caching.

mod anchor;
mod draft;
mod footprint;
mod gesture;
mod hints;
mod view;

pub use anchor::{compose, relative_to, yaw_rotation, AnchorPose, WorldPose};
pub use draft::{load_draft, save_draft, DraftError};
pub use footprint::{
    anchored_corners, fits_on_plane, object_footprint, scene_footprint, BoundsSource, FitReport,
    Footprint, UnitCubeBounds,
};
pub use gesture::{apply_gesture, Gesture};
pub use hints::{check_placement_hints, PlacementWarning};
pub use view::{
    clutter_ratio, is_crowded, navigation_hint, scene_centroid, NavigationHint, CLUTTER_GRID,
    CROWDED_THRESHOLD,
};
