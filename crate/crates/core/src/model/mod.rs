//! Domain types for stories, scenes, objects and the physical context they
//! are placed into.

mod ids;
mod physical;
mod story;
mod transform;
mod validate;

pub use ids::{GroupId, IdParseError, ObjectId, SceneId, StoryId};
pub use physical::{Aabb, CameraPose, Extents, Plane, SurfaceClass};
pub use story::{
    AssetRef, DialogBalloon, FormatVersion, Metadata, PlacedObject, PlacementHints, Scene, Story,
    MAX_DESCRIPTION_CHARS, MAX_DIALOG_CHARS, MAX_HINT_NOTE_CHARS, MAX_TITLE_CHARS, PRESET_DIALOGS,
};
pub use transform::{MicroVec3, Transform, MAX_COORDINATE_M, MAX_SCALE, MIN_SCALE};
pub use validate::{validate_story, Mode, Rule, Violation};

/// Rejection raised by a type constructor when an invariant would break.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("{0} has a non-finite component")]
    NonFinite(&'static str),
    #[error("{0} is out of range")]
    OutOfRange(&'static str),
    #[error("quaternion has zero norm")]
    ZeroQuaternion,
    #[error("quaternion is not unit length on the nano grid")]
    NotUnitQuaternion,
    #[error("scale must be positive")]
    NonPositiveScale,
    #[error("scale must lie in [0.01, 100]")]
    ScaleRange,
    #[error("extents must be strictly positive")]
    NonPositiveExtents,
    #[error("bounding box min exceeds max")]
    InvertedBounds,
    #[error("vertical field of view must lie in (0, 180) degrees")]
    FieldOfView,
    #[error("aspect ratio must be positive")]
    Aspect,
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("{field} exceeds {max} characters")]
    TooLong { field: &'static str, max: usize },
    #[error("unknown surface class {0:?}")]
    UnknownSurface(String),
}
