use serde::{Deserialize, Serialize};

use super::{
    Extents, GroupId, MicroVec3, ModelError, ObjectId, SceneId, StoryId, SurfaceClass, Transform,
};

pub const MAX_TITLE_CHARS: usize = 200;
pub const MAX_DESCRIPTION_CHARS: usize = 2000;
pub const MAX_DIALOG_CHARS: usize = 500;
pub const MAX_HINT_NOTE_CHARS: usize = 500;

/// Ready-made dialog lines offered by authoring clients.
pub const PRESET_DIALOGS: &[&str] = &[
    "VROOM",
    "Zzzz",
    "Raawr",
    "Hello!",
    "Help!",
    "Wow!",
    "Oops...",
    "Bzzz",
    "Meow",
    "Woof!",
    "Hmm?",
    "Let's go!",
    "Watch out!",
    "I'm hungry",
    "Stay home, stay safe",
    "To the moon!",
    "Ha ha ha",
    "Once upon a time...",
    "The end.",
    "Boom!",
];

/// Package format version. Readers accept any minor under the supported major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormatVersion {
    pub major: u32,
    pub minor: u32,
}

impl FormatVersion {
    pub const CURRENT: FormatVersion = FormatVersion { major: 1, minor: 0 };
    pub const SUPPORTED_MAJOR: u32 = 1;
}

impl Default for FormatVersion {
    fn default() -> Self {
        Self::CURRENT
    }
}

/// Physical requirements a creator attaches to a story for its viewers.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementHints {
    surface_class: SurfaceClass,
    min_extents: Option<Extents>,
    note: String,
}

impl PlacementHints {
    /// `min_extents` is rounded to the micrometer grid.
    pub fn new(
        surface_class: SurfaceClass,
        min_extents: Option<Extents>,
        note: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let note = note.into();
        if note.chars().count() > MAX_HINT_NOTE_CHARS {
            return Err(ModelError::TooLong {
                field: "placement note",
                max: MAX_HINT_NOTE_CHARS,
            });
        }
        let min_extents = match min_extents {
            Some(e) => {
                let w = (e.width() * 1e6).round() / 1e6;
                let d = (e.depth() * 1e6).round() / 1e6;
                Some(Extents::new(w, d)?)
            }
            None => None,
        };
        Ok(Self {
            surface_class,
            min_extents,
            note,
        })
    }

    pub fn surface_class(&self) -> SurfaceClass {
        self.surface_class
    }

    pub fn min_extents(&self) -> Option<Extents> {
        self.min_extents
    }

    pub fn note(&self) -> &str {
        &self.note
    }
}

/// Authored, immutable story metadata. Viewing statistics live server-side.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub creator: String,
    pub title: String,
    pub description: String,
    pub original_creator: String,
    /// UTC seconds since the Unix epoch.
    pub created_at: i64,
    pub parent_story: Option<StoryId>,
    pub placement_hints: Option<PlacementHints>,
    pub format_version: FormatVersion,
}

impl Metadata {
    /// Metadata for an original (non-remix) story.
    pub fn original(
        creator: impl Into<String>,
        title: impl Into<String>,
        description: impl Into<String>,
        created_at: i64,
    ) -> Self {
        let creator = creator.into();
        Self {
            original_creator: creator.clone(),
            creator,
            title: title.into(),
            description: description.into(),
            created_at,
            parent_story: None,
            placement_hints: None,
            format_version: FormatVersion::CURRENT,
        }
    }
}

/// Reference to a catalog asset by content key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssetRef {
    asset_key: String,
    display_name: String,
}

impl AssetRef {
    pub fn new(
        asset_key: impl Into<String>,
        display_name: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let asset_key = asset_key.into();
        let display_name = display_name.into();
        if asset_key.is_empty() {
            return Err(ModelError::Empty("asset key"));
        }
        if display_name.trim().is_empty() {
            return Err(ModelError::Empty("display name"));
        }
        Ok(Self {
            asset_key,
            display_name,
        })
    }

    pub fn asset_key(&self) -> &str {
        &self.asset_key
    }

    pub fn display_name(&self) -> &str {
        &self.display_name
    }
}

/// Text balloon attached to an object, offset from the object's origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DialogBalloon {
    text: String,
    offset: MicroVec3,
}

impl DialogBalloon {
    pub fn new(text: impl Into<String>, offset: MicroVec3) -> Result<Self, ModelError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(ModelError::Empty("dialog text"));
        }
        if text.chars().count() > MAX_DIALOG_CHARS {
            return Err(ModelError::TooLong {
                field: "dialog text",
                max: MAX_DIALOG_CHARS,
            });
        }
        Ok(Self { text, offset })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn offset(&self) -> MicroVec3 {
        self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedObject {
    pub object_id: ObjectId,
    pub asset: AssetRef,
    pub transform: Transform,
    pub group_id: Option<GroupId>,
    pub dialog: Option<DialogBalloon>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub scene_id: SceneId,
    pub index: u32,
    pub objects: Vec<PlacedObject>,
}

impl Scene {
    pub fn new(scene_id: SceneId, index: u32) -> Self {
        Self {
            scene_id,
            index,
            objects: Vec::new(),
        }
    }
}

/// An ordered sequence of scenes plus metadata: the unit of publishing and
/// remixing.
#[derive(Debug, Clone, PartialEq)]
pub struct Story {
    pub metadata: Metadata,
    pub scenes: Vec<Scene>,
}

impl Story {
    pub fn object_count(&self) -> usize {
        self.scenes.iter().map(|s| s.objects.len()).sum()
    }

    pub fn objects(&self) -> impl Iterator<Item = &PlacedObject> {
        self.scenes.iter().flat_map(|s| s.objects.iter())
    }

    /// Rewrites scene indices to `0..n` in their current order.
    pub fn reindex_scenes(&mut self) {
        for (i, scene) in self.scenes.iter_mut().enumerate() {
            scene.index = i as u32;
        }
    }
}
