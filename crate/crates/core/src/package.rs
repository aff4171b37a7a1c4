//! Micro AR packages (`.mar`): a stored ZIP holding `metadata.json`,
//! `content.json` and `layout.json`, each canonical JSON. Layout numbers are
//! scaled integers (micrometers, nano-units, parts per million), so no
//! floating-point text is ever written.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::canonical;
use crate::container::{self, ContainerError};
use crate::model::{
    validate_story, AssetRef, DialogBalloon, Extents, FormatVersion, GroupId, Metadata, MicroVec3,
    Mode, ModelError, ObjectId, PlacedObject, PlacementHints, Scene, SceneId, Story, StoryId,
    SurfaceClass, Transform, Violation,
};

pub const METADATA_PART: &str = "metadata.json";
pub const CONTENT_PART: &str = "content.json";
pub const LAYOUT_PART: &str = "layout.json";
/// Part names in their required archive order.
pub const PARTS: [&str; 3] = [METADATA_PART, CONTENT_PART, LAYOUT_PART];

pub const FILE_EXTENSION: &str = "mar";
pub const MEDIA_TYPE: &str = "application/vnd.microar+zip";

#[derive(Debug, Error)]
pub enum PackageError {
    #[error("container: {0}")]
    Container(#[from] ContainerError),
    #[error("missing part {0}")]
    MissingPart(&'static str),
    #[error("malformed {part}: {detail}")]
    Malformed { part: &'static str, detail: String },
    #[error("metadata.json declares no format_version")]
    MissingVersion,
    #[error("unsupported format version {major}.{minor}")]
    UnsupportedMajor { major: u32, minor: u32 },
    #[error("content and layout disagree: {0}")]
    Inconsistent(String),
    #[error("invalid field {path}: {source}")]
    InvalidField { path: String, source: ModelError },
    #[error("story violates {} rule(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl PackageError {
    /// Stable machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            PackageError::Container(_) => "container",
            PackageError::MissingPart(_) => "missing_part",
            PackageError::Malformed { .. } => "malformed_json",
            PackageError::MissingVersion => "missing_version",
            PackageError::UnsupportedMajor { .. } => "unsupported_major",
            PackageError::Inconsistent(_) => "inconsistent_parts",
            PackageError::InvalidField { .. } => "invalid_field",
            PackageError::Invalid(_) => "invariant_violation",
        }
    }
}

// ---- wire types -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MetadataWire {
    creator: String,
    title: String,
    #[serde(default)]
    description: String,
    original_creator: String,
    created_at: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent_story: Option<StoryId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    placement_hints: Option<HintsWire>,
    format_version: FormatVersion,
    #[serde(default, skip_serializing_if = "is_false")]
    draft: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct HintsWire {
    surface_class: SurfaceClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_extents: Option<ExtentsWire>,
    #[serde(default)]
    note: String,
}

#[derive(Serialize, Deserialize)]
struct ExtentsWire {
    width_um: i64,
    depth_um: i64,
}

#[derive(Serialize, Deserialize)]
struct ContentWire {
    scenes: Vec<ContentSceneWire>,
}

#[derive(Serialize, Deserialize)]
struct ContentSceneWire {
    scene_id: SceneId,
    index: u32,
    objects: Vec<ContentObjectWire>,
}

#[derive(Serialize, Deserialize)]
struct ContentObjectWire {
    object_id: ObjectId,
    asset: AssetWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dialog: Option<DialogTextWire>,
}

#[derive(Serialize, Deserialize)]
struct AssetWire {
    asset_key: String,
    display_name: String,
}

#[derive(Serialize, Deserialize)]
struct DialogTextWire {
    text: String,
}

#[derive(Serialize, Deserialize)]
struct LayoutWire {
    scenes: Vec<LayoutSceneWire>,
}

#[derive(Serialize, Deserialize)]
struct LayoutSceneWire {
    scene_id: SceneId,
    objects: Vec<LayoutObjectWire>,
}

#[derive(Serialize, Deserialize)]
struct LayoutObjectWire {
    object_id: ObjectId,
    position_um: [i64; 3],
    rotation_nano: [i64; 4],
    scale_ppm: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group_id: Option<GroupId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dialog_offset_um: Option<[i64; 3]>,
}

// ---- encode ---------------------------------------------------------------

fn metadata_wire(md: &Metadata, draft: bool) -> MetadataWire {
    MetadataWire {
        creator: md.creator.clone(),
        title: md.title.clone(),
        description: md.description.clone(),
        original_creator: md.original_creator.clone(),
        created_at: md.created_at,
        parent_story: md.parent_story,
        placement_hints: md.placement_hints.as_ref().map(|h| HintsWire {
            surface_class: h.surface_class(),
            min_extents: h.min_extents().map(|e| ExtentsWire {
                width_um: (e.width() * 1e6).round() as i64,
                depth_um: (e.depth() * 1e6).round() as i64,
            }),
            note: h.note().to_owned(),
        }),
        format_version: md.format_version,
        draft,
    }
}

fn content_wire(story: &Story) -> ContentWire {
    ContentWire {
        scenes: story
            .scenes
            .iter()
            .map(|s| ContentSceneWire {
                scene_id: s.scene_id,
                index: s.index,
                objects: s
                    .objects
                    .iter()
                    .map(|o| ContentObjectWire {
                        object_id: o.object_id,
                        asset: AssetWire {
                            asset_key: o.asset.asset_key().to_owned(),
                            display_name: o.asset.display_name().to_owned(),
                        },
                        dialog: o.dialog.as_ref().map(|d| DialogTextWire {
                            text: d.text().to_owned(),
                        }),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn layout_wire(story: &Story) -> LayoutWire {
    LayoutWire {
        scenes: story
            .scenes
            .iter()
            .map(|s| LayoutSceneWire {
                scene_id: s.scene_id,
                objects: s
                    .objects
                    .iter()
                    .map(|o| LayoutObjectWire {
                        object_id: o.object_id,
                        position_um: o.transform.position_um(),
                        rotation_nano: o.transform.rotation_nano(),
                        scale_ppm: o.transform.scale_ppm(),
                        group_id: o.group_id,
                        dialog_offset_um: o.dialog.as_ref().map(|d| d.offset().micros()),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn encode_with(story: &Story, draft: bool) -> Result<Vec<u8>, PackageError> {
    let violations = validate_story(story, Mode::Draft);
    if !violations.is_empty() {
        return Err(PackageError::Invalid(violations));
    }
    let ser = |part: &'static str, r: serde_json::Result<Vec<u8>>| {
        r.map_err(|e| PackageError::Malformed {
            part,
            detail: e.to_string(),
        })
    };
    let metadata = ser(
        METADATA_PART,
        canonical::to_vec(&metadata_wire(&story.metadata, draft)),
    )?;
    let content = ser(CONTENT_PART, canonical::to_vec(&content_wire(story)))?;
    let layout = ser(LAYOUT_PART, canonical::to_vec(&layout_wire(story)))?;
    Ok(container::write_archive([
        (METADATA_PART, metadata.as_slice()),
        (CONTENT_PART, content.as_slice()),
        (LAYOUT_PART, layout.as_slice()),
    ])?)
}

/// Encodes a draft-valid story as canonical package bytes. Equal stories
/// always produce identical bytes.
pub fn encode(story: &Story) -> Result<Vec<u8>, PackageError> {
    encode_with(story, false)
}

/// Like [`encode`], but marks the package as a draft in `metadata.json`.
pub fn encode_draft(story: &Story) -> Result<Vec<u8>, PackageError> {
    encode_with(story, true)
}

/// SHA-256 of the canonical package bytes.
pub fn story_id(story: &Story) -> Result<StoryId, PackageError> {
    Ok(StoryId::digest(&encode(story)?))
}

// ---- decode ---------------------------------------------------------------

/// A decoded package together with its draft marker.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedPackage {
    pub story: Story,
    pub draft: bool,
}

struct Parts {
    metadata: Vec<u8>,
    content: Vec<u8>,
    layout: Vec<u8>,
}

fn read_parts(bytes: &[u8]) -> Result<Parts, PackageError> {
    let mut entries = container::read_archive(bytes)?;
    let mut take = |name: &'static str| -> Result<Vec<u8>, PackageError> {
        let i = entries
            .iter()
            .position(|e| e.name == name)
            .ok_or(PackageError::MissingPart(name))?;
        Ok(entries.swap_remove(i).data)
    };
    Ok(Parts {
        metadata: take(METADATA_PART)?,
        content: take(CONTENT_PART)?,
        layout: take(LAYOUT_PART)?,
    })
}

fn parse_value(part: &'static str, bytes: &[u8]) -> Result<Value, PackageError> {
    serde_json::from_slice(bytes).map_err(|e| PackageError::Malformed {
        part,
        detail: e.to_string(),
    })
}

fn version_of(metadata: &Value) -> Result<FormatVersion, PackageError> {
    let v = metadata
        .get("format_version")
        .ok_or(PackageError::MissingVersion)?;
    let field = |name: &str| -> Result<u32, PackageError> {
        v.get(name)
            .and_then(Value::as_u64)
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| PackageError::Malformed {
                part: METADATA_PART,
                detail: format!("format_version.{name} must be a non-negative integer"),
            })
    };
    let version = FormatVersion {
        major: field("major")?,
        minor: field("minor")?,
    };
    if version.major != FormatVersion::SUPPORTED_MAJOR {
        return Err(PackageError::UnsupportedMajor {
            major: version.major,
            minor: version.minor,
        });
    }
    Ok(version)
}

/// Reads the declared format version. Any minor under major 1 is accepted.
pub fn check_version(bytes: &[u8]) -> Result<FormatVersion, PackageError> {
    let parts = read_parts(bytes)?;
    version_of(&parse_value(METADATA_PART, &parts.metadata)?)
}

fn from_value<T: serde::de::DeserializeOwned>(
    part: &'static str,
    v: Value,
) -> Result<T, PackageError> {
    serde_json::from_value(v).map_err(|e| PackageError::Malformed {
        part,
        detail: e.to_string(),
    })
}

fn field<T>(path: impl FnOnce() -> String, r: Result<T, ModelError>) -> Result<T, PackageError> {
    r.map_err(|source| PackageError::InvalidField {
        path: path(),
        source,
    })
}

fn build_metadata(w: MetadataWire) -> Result<Metadata, PackageError> {
    let placement_hints = match w.placement_hints {
        None => None,
        Some(h) => {
            let min_extents = match h.min_extents {
                None => None,
                Some(e) => Some(field(
                    || "metadata.placement_hints.min_extents".into(),
                    Extents::new(e.width_um as f64 / 1e6, e.depth_um as f64 / 1e6),
                )?),
            };
            Some(field(
                || "metadata.placement_hints".into(),
                PlacementHints::new(h.surface_class, min_extents, h.note),
            )?)
        }
    };
    Ok(Metadata {
        creator: w.creator,
        title: w.title,
        description: w.description,
        original_creator: w.original_creator,
        created_at: w.created_at,
        parent_story: w.parent_story,
        placement_hints,
        format_version: w.format_version,
    })
}

fn build_scenes(content: ContentWire, layout: LayoutWire) -> Result<Vec<Scene>, PackageError> {
    if content.scenes.len() != layout.scenes.len() {
        return Err(PackageError::Inconsistent(format!(
            "{} content scenes vs {} layout scenes",
            content.scenes.len(),
            layout.scenes.len()
        )));
    }
    let mut scenes = Vec::with_capacity(content.scenes.len());
    for (si, (cs, ls)) in content.scenes.into_iter().zip(layout.scenes).enumerate() {
        if cs.scene_id != ls.scene_id {
            return Err(PackageError::Inconsistent(format!(
                "scene {si} id differs between parts"
            )));
        }
        if cs.objects.len() != ls.objects.len() {
            return Err(PackageError::Inconsistent(format!(
                "scene {si} object count differs between parts"
            )));
        }
        let mut objects = Vec::with_capacity(cs.objects.len());
        for (oi, (co, lo)) in cs.objects.into_iter().zip(ls.objects).enumerate() {
            let path = |leaf: &str| format!("scenes[{si}].objects[{oi}].{leaf}");
            if co.object_id != lo.object_id {
                return Err(PackageError::Inconsistent(format!(
                    "{} differs between parts",
                    path("object_id")
                )));
            }
            let asset = field(
                || path("asset"),
                AssetRef::new(co.asset.asset_key, co.asset.display_name),
            )?;
            let transform = field(
                || path("transform"),
                Transform::from_units(lo.position_um, lo.rotation_nano, lo.scale_ppm),
            )?;
            let dialog = match (co.dialog, lo.dialog_offset_um) {
                (None, None) => None,
                (Some(d), Some(off)) => {
                    let offset = field(|| path("dialog.offset"), MicroVec3::from_micros(off))?;
                    Some(field(
                        || path("dialog"),
                        DialogBalloon::new(d.text, offset),
                    )?)
                }
                _ => {
                    return Err(PackageError::Inconsistent(format!(
                        "{} present in only one part",
                        path("dialog")
                    )))
                }
            };
            objects.push(PlacedObject {
                object_id: co.object_id,
                asset,
                transform,
                group_id: lo.group_id,
                dialog,
            });
        }
        scenes.push(Scene {
            scene_id: cs.scene_id,
            index: cs.index,
            objects,
        });
    }
    Ok(scenes)
}

/// Decodes a package, reporting whether it carries the draft marker.
///
/// Key order, whitespace and unknown fields in the parts are tolerated.
pub fn decode_package(bytes: &[u8]) -> Result<DecodedPackage, PackageError> {
    let parts = read_parts(bytes)?;
    let metadata = parse_value(METADATA_PART, &parts.metadata)?;
    version_of(&metadata)?;
    let content = parse_value(CONTENT_PART, &parts.content)?;
    let layout = parse_value(LAYOUT_PART, &parts.layout)?;
    decode_values(metadata, content, layout)
}

fn decode_values(
    metadata: Value,
    content: Value,
    layout: Value,
) -> Result<DecodedPackage, PackageError> {
    version_of(&metadata)?;
    let metadata: MetadataWire = from_value(METADATA_PART, metadata)?;
    let content: ContentWire = from_value(CONTENT_PART, content)?;
    let layout: LayoutWire = from_value(LAYOUT_PART, layout)?;

    let draft = metadata.draft;
    let story = Story {
        metadata: build_metadata(metadata)?,
        scenes: build_scenes(content, layout)?,
    };
    let violations = validate_story(&story, Mode::Draft);
    if !violations.is_empty() {
        return Err(PackageError::Invalid(violations));
    }
    Ok(DecodedPackage { story, draft })
}

pub fn decode(bytes: &[u8]) -> Result<Story, PackageError> {
    decode_package(bytes).map(|p| p.story)
}

/// True when `bytes` decode to a story whose canonical encoding is exactly
/// `bytes` (which also rules out the draft marker).
pub fn is_canonical(bytes: &[u8]) -> bool {
    match decode(bytes) {
        Ok(story) => encode(&story).map(|b| b == bytes).unwrap_or(false),
        Err(_) => false,
    }
}

/// Raw part bytes by name, for inspection and tests.
pub fn read_part(bytes: &[u8], name: &'static str) -> Result<Vec<u8>, PackageError> {
    let parts = read_parts(bytes)?;
    Ok(match name {
        METADATA_PART => parts.metadata,
        CONTENT_PART => parts.content,
        LAYOUT_PART => parts.layout,
        _ => return Err(PackageError::MissingPart(name)),
    })
}

// ---- JSON document form ---------------------------------------------------

/// The three parts as one JSON object keyed `metadata`, `content` and
/// `layout`, for clients that cannot handle the archive.
pub fn to_document(story: &Story) -> Result<Value, PackageError> {
    let violations = validate_story(story, Mode::Draft);
    if !violations.is_empty() {
        return Err(PackageError::Invalid(violations));
    }
    let to = |part: &'static str, r: serde_json::Result<Value>| {
        r.map_err(|e| PackageError::Malformed {
            part,
            detail: e.to_string(),
        })
    };
    Ok(serde_json::json!({
        "metadata": to(METADATA_PART, serde_json::to_value(metadata_wire(&story.metadata, false)))?,
        "content": to(CONTENT_PART, serde_json::to_value(content_wire(story)))?,
        "layout": to(LAYOUT_PART, serde_json::to_value(layout_wire(story)))?,
    }))
}

/// Inverse of [`to_document`], with the same checks as [`decode_package`].
pub fn from_document(doc: Value) -> Result<DecodedPackage, PackageError> {
    let Value::Object(mut map) = doc else {
        return Err(PackageError::Malformed {
            part: "document",
            detail: "expected an object".into(),
        });
    };
    let mut take = |name: &'static str, part: &'static str| {
        map.remove(name).ok_or(PackageError::MissingPart(part))
    };
    let metadata = take("metadata", METADATA_PART)?;
    let content = take("content", CONTENT_PART)?;
    let layout = take("layout", LAYOUT_PART)?;
    decode_values(metadata, content, layout)
}
