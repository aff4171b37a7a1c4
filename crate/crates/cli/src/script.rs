//! Scene scripts: YAML (or JSON) documents that compile to stories, and edit
//! scripts that turn a fetched story into a remix.

use std::str::FromStr;

use marked_yaml::{
    from_node, parse_yaml_with_options, LoadError, LoaderOptions, Marker, Node, Span, Spanned,
};
use microar_core::catalog::Catalog;
use microar_core::remix::derive_remix;
use microar_core::{
    validate_story, AssetRef, DialogBalloon, Extents, GroupId, Metadata, MicroVec3, Mode,
    ModelError, ObjectId, PlacedObject, PlacementHints, Scene, SceneId, Story, StoryId,
    SurfaceClass, Transform, MAX_TITLE_CHARS,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use crate::error::{CliError, Location};

/// Gap between the top of an asset's bounds and its default dialog anchor.
const DIALOG_CLEARANCE_M: f64 = 0.1;

/// Finds assets for script objects.
pub trait AssetResolver {
    /// Top search hit for `query`, with the asset's top height in meters.
    fn resolve_query(&self, query: &str) -> Result<Option<(AssetRef, f64)>, CliError>;
    /// Display name and top height of a known key.
    fn lookup_key(&self, key: &str) -> Option<(AssetRef, f64)>;
}

impl AssetResolver for Catalog {
    fn resolve_query(&self, query: &str) -> Result<Option<(AssetRef, f64)>, CliError> {
        let hits = self
            .search(query, 1)
            .map_err(|e| CliError::io("catalog", e.to_string()))?;
        Ok(hits
            .into_iter()
            .next()
            .map(|r| (r.asset_ref(), r.bounds.max()[1])))
    }

    fn lookup_key(&self, key: &str) -> Option<(AssetRef, f64)> {
        self.record(key).map(|r| (r.asset_ref(), r.bounds.max()[1]))
    }
}

// ---- document schema -------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptDoc {
    metadata: Spanned<MetadataDoc>,
    #[serde(default)]
    scenes: Vec<Spanned<SceneDoc>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataDoc {
    creator: Option<Spanned<String>>,
    title: Option<Spanned<String>>,
    description: Option<Spanned<String>>,
    created_at: Option<Spanned<i64>>,
    original_creator: Option<Spanned<String>>,
    parent_story: Option<Spanned<String>>,
    placement_hints: Option<Spanned<HintsDoc>>,
    id_seed: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HintsDoc {
    surface: Spanned<String>,
    min_extents: Option<Spanned<[f64; 2]>>,
    #[serde(default)]
    note: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    label: Option<String>,
    #[serde(default)]
    objects: Vec<Spanned<ObjectDoc>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDoc {
    label: Option<String>,
    asset: Option<Spanned<String>>,
    asset_key: Option<Spanned<String>>,
    name: Option<String>,
    position: Option<Spanned<[f64; 3]>>,
    rotation: Option<Spanned<RotationDoc>>,
    scale: Option<Spanned<f64>>,
    group: Option<String>,
    dialog: Option<Spanned<DialogDoc>>,
}

/// Either a yaw about +y in degrees or a full `[w, x, y, z]` quaternion.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RotationDoc {
    yaw: Option<f64>,
    quaternion: Option<[f64; 4]>,
}

/// A bare string, or `{text, offset}`.
#[derive(Debug)]
struct DialogDoc {
    text: String,
    offset: Option<[f64; 3]>,
}

impl<'de> Deserialize<'de> for DialogDoc {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;

        impl<'de> serde::de::Visitor<'de> for V {
            type Value = DialogDoc;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("dialog text or a mapping with text and offset")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<DialogDoc, E> {
                Ok(DialogDoc {
                    text: v.to_owned(),
                    offset: None,
                })
            }

            fn visit_map<A: serde::de::MapAccess<'de>>(
                self,
                mut map: A,
            ) -> Result<DialogDoc, A::Error> {
                use serde::de::Error;
                let (mut text, mut offset) = (None, None);
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "text" => text = Some(map.next_value::<String>()?),
                        "offset" => offset = Some(map.next_value::<[f64; 3]>()?),
                        other => return Err(A::Error::unknown_field(other, &["text", "offset"])),
                    }
                }
                Ok(DialogDoc {
                    text: text.ok_or_else(|| A::Error::missing_field("text"))?,
                    offset,
                })
            }
        }

        deserializer.deserialize_any(V)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EditsDoc {
    metadata: Option<Spanned<MetadataDoc>>,
    #[serde(default)]
    remove_objects: Vec<Spanned<String>>,
    #[serde(default)]
    remove_scenes: Vec<Spanned<usize>>,
    #[serde(default)]
    edit_dialogs: Vec<Spanned<DialogEditDoc>>,
    #[serde(default)]
    move_objects: Vec<Spanned<MoveDoc>>,
    #[serde(default)]
    add_objects: Vec<Spanned<AddObjectsDoc>>,
    #[serde(default)]
    add_scenes: Vec<Spanned<SceneDoc>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DialogEditDoc {
    object: Spanned<String>,
    text: Option<String>,
    offset: Option<[f64; 3]>,
    #[serde(default)]
    remove: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoveDoc {
    object: Spanned<String>,
    position: Option<Spanned<[f64; 3]>>,
    rotation: Option<Spanned<RotationDoc>>,
    scale: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AddObjectsDoc {
    scene: Spanned<usize>,
    objects: Vec<Spanned<ObjectDoc>>,
}

// ---- parsing ---------------------------------------------------------------

fn location(source: &str, span: &Span) -> Option<Location> {
    span.start().map(|m| Location {
        source: source.to_owned(),
        line: m.line(),
        column: m.column(),
    })
}

fn parse_doc<T: DeserializeOwned>(source: &str, text: &str) -> Result<T, CliError> {
    let options = LoaderOptions::default().error_on_duplicate_keys(true);
    let node = parse_yaml_with_options(0, text, options).map_err(|e| {
        let mark = match &e {
            LoadError::TopLevelMustBeMapping(m)
            | LoadError::TopLevelMustBeSequence(m)
            | LoadError::UnexpectedAnchor(m)
            | LoadError::MappingKeyMustBeScalar(m)
            | LoadError::UnexpectedTag(m)
            | LoadError::ScanError(m, _) => Some(*m),
            LoadError::DuplicateKey(d) => d.key.span().start().copied(),
        };
        CliError::validation("syntax", e.to_string()).at(mark.map(|m| Location {
            source: source.to_owned(),
            line: m.line(),
            column: m.column(),
        }))
    })?;
    from_node(&node).map_err(|e| {
        let mark = e
            .path()
            .and_then(|p| mark_at(&node, p))
            .or_else(|| e.start_mark());
        let loc = mark.map(|m| Location {
            source: source.to_owned(),
            line: m.line(),
            column: m.column(),
        });
        CliError::validation("schema", e.to_string()).at(loc)
    })
}

/// Start of the deepest node reached by a path like `a.b[2].c`. A final
/// mapping key resolves to the key itself.
fn mark_at(root: &Node, path: &str) -> Option<Marker> {
    let mut node = root;
    let mut mark = None;
    for part in path.split('.') {
        let (key, indices) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if !key.is_empty() {
            let map = node.as_mapping()?;
            let (k, v) = map.iter().find(|(k, _)| k.as_str() == key)?;
            mark = k.span().start().cloned().or(mark);
            node = v;
        }
        for idx in indices.split(['[', ']']).filter(|s| !s.is_empty()) {
            let i: usize = idx.parse().ok()?;
            node = node.as_sequence()?.get_node(i)?;
            mark = node.span().start().cloned().or(mark);
        }
    }
    mark
}

// ---- compilation -----------------------------------------------------------

/// Field paths of the compiled story mapped to where they came from.
struct Spans {
    source: String,
    entries: Vec<(String, Location)>,
}

impl Spans {
    fn new(source: &str) -> Self {
        Self {
            source: source.to_owned(),
            entries: Vec::new(),
        }
    }

    fn loc(&self, span: &Span) -> Option<Location> {
        location(&self.source, span)
    }

    fn record(&mut self, path: impl Into<String>, span: &Span) {
        if let Some(loc) = self.loc(span) {
            self.entries.push((path.into(), loc));
        }
    }

    /// Location of the longest recorded path that prefixes `path`.
    fn locate(&self, path: &str) -> Option<Location> {
        self.entries
            .iter()
            .filter(|(p, _)| {
                path == p
                    || (path.starts_with(p.as_str())
                        && matches!(path.as_bytes()[p.len()], b'.' | b'['))
            })
            .max_by_key(|(p, _)| p.len())
            .map(|(_, l)| l.clone())
    }

    fn check(&self, story: &Story, mode: Mode) -> Result<(), CliError> {
        let violations = validate_story(story, mode);
        let Some(first) = violations.first() else {
            return Ok(());
        };
        let details: Vec<_> = violations
            .iter()
            .map(|v| {
                let mut d = json!({"path": v.path, "rule": v.rule.describe()});
                if let Some(l) = self.locate(&v.path) {
                    d["location"] = json!(l.to_string());
                }
                d
            })
            .collect();
        Err(CliError::validation("invalid_story", first.to_string())
            .at(self.locate(&first.path))
            .with_details(json!(details)))
    }
}

fn model_err(e: ModelError, loc: Option<Location>) -> CliError {
    CliError::validation("invalid_field", e.to_string()).at(loc)
}

fn rotation_of(doc: &Spanned<RotationDoc>, spans: &Spans) -> Result<[f64; 4], CliError> {
    match (doc.yaw, doc.quaternion) {
        (Some(deg), None) => {
            let half = deg.to_radians() / 2.0;
            Ok([half.cos(), 0.0, half.sin(), 0.0])
        }
        (None, Some(q)) => Ok(q),
        _ => Err(
            CliError::validation("schema", "rotation needs exactly one of yaw or quaternion")
                .at(spans.loc(doc.span())),
        ),
    }
}

fn scale_of(doc: &Spanned<f64>, spans: &Spans) -> Result<f64, CliError> {
    let s = **doc;
    if !(microar_core::MIN_SCALE..=microar_core::MAX_SCALE).contains(&s) {
        return Err(CliError::validation(
            "invalid_field",
            format!(
                "scale {s} is outside [{}, {}]",
                microar_core::MIN_SCALE,
                microar_core::MAX_SCALE
            ),
        )
        .at(spans.loc(doc.span())));
    }
    Ok(s)
}

/// Deterministic ids: every id is a hash of the build seed and the labels
/// on the path to it.
struct Ids {
    seed: String,
}

impl Ids {
    fn scene(&self, scene_label: &str) -> SceneId {
        SceneId::derive(
            "microar.scene",
            format!("{}\n{}", self.seed, scene_label).as_bytes(),
        )
    }

    fn object(&self, scene_label: &str, object_label: &str) -> ObjectId {
        ObjectId::derive(
            "microar.object",
            format!("{}\n{}\n{}", self.seed, scene_label, object_label).as_bytes(),
        )
    }

    fn group(&self, label: &str) -> GroupId {
        GroupId::derive(
            "microar.group",
            format!("{}\n{}", self.seed, label).as_bytes(),
        )
    }
}

struct Compiler<'a> {
    spans: Spans,
    resolver: &'a dyn AssetResolver,
    ids: Ids,
}

impl Compiler<'_> {
    fn object(
        &mut self,
        doc: &Spanned<ObjectDoc>,
        scene_label: &str,
        default_label: String,
        path: &str,
    ) -> Result<PlacedObject, CliError> {
        let here = self.spans.loc(doc.span());
        self.spans.record(path, doc.span());
        let label = doc.label.clone().unwrap_or(default_label);

        let (asset, top) = match (&doc.asset, &doc.asset_key) {
            (Some(q), None) => self.resolver.resolve_query(q)?.ok_or_else(|| {
                CliError::validation(
                    "unresolved_asset",
                    format!("no asset matches query {:?}", q.as_str()),
                )
                .at(self.spans.loc(q.span()))
            })?,
            (None, Some(key)) => match (self.resolver.lookup_key(key), &doc.name) {
                (_, Some(name)) => {
                    let top = self.resolver.lookup_key(key).map_or(0.5, |(_, t)| t);
                    let r = AssetRef::new(key.as_str(), name.as_str())
                        .map_err(|e| model_err(e, self.spans.loc(key.span())))?;
                    (r, top)
                }
                (Some(found), None) => found,
                (None, None) => {
                    return Err(CliError::validation(
                        "unresolved_asset",
                        format!(
                            "asset key {:?} is not in the catalog; give a name",
                            key.as_str()
                        ),
                    )
                    .at(self.spans.loc(key.span())))
                }
            },
            _ => {
                return Err(CliError::validation(
                    "schema",
                    "object needs exactly one of asset or asset_key",
                )
                .at(here))
            }
        };

        let position = doc.position.as_ref().map_or([0.0; 3], |p| **p);
        let rotation = match &doc.rotation {
            Some(r) => rotation_of(r, &self.spans)?,
            None => [1.0, 0.0, 0.0, 0.0],
        };
        let scale = match &doc.scale {
            Some(s) => scale_of(s, &self.spans)?,
            None => 1.0,
        };
        let transform = Transform::quantize(position, rotation, scale).map_err(|e| {
            model_err(
                e,
                doc.position
                    .as_ref()
                    .and_then(|p| self.spans.loc(p.span()))
                    .or(here.clone()),
            )
        })?;

        let dialog = match &doc.dialog {
            None => None,
            Some(d) => {
                let text = d.text.clone();
                let offset = d.offset.unwrap_or([0.0, top + DIALOG_CLEARANCE_M, 0.0]);
                let loc = self.spans.loc(d.span());
                let offset =
                    MicroVec3::from_meters(offset).map_err(|e| model_err(e, loc.clone()))?;
                Some(DialogBalloon::new(text, offset).map_err(|e| model_err(e, loc))?)
            }
        };

        Ok(PlacedObject {
            object_id: self.ids.object(scene_label, &label),
            asset,
            transform,
            group_id: doc.group.as_deref().map(|g| self.ids.group(g)),
            dialog,
        })
    }

    fn scene(
        &mut self,
        doc: &Spanned<SceneDoc>,
        index: usize,
        default_label: String,
    ) -> Result<Scene, CliError> {
        let path = format!("scenes[{index}]");
        self.spans.record(&path, doc.span());
        let label = doc.label.clone().unwrap_or(default_label);
        let mut scene = Scene::new(self.ids.scene(&label), index as u32);
        for (j, o) in doc.objects.iter().enumerate() {
            let obj = self.object(o, &label, format!("#{j}"), &format!("{path}.objects[{j}]"))?;
            scene.objects.push(obj);
        }
        Ok(scene)
    }

    fn record_metadata(&mut self, md: &Spanned<MetadataDoc>) {
        self.spans.record("metadata", md.span());
        let fields: [(&str, Option<&Span>); 6] = [
            ("creator", md.creator.as_ref().map(|s| s.span())),
            ("title", md.title.as_ref().map(|s| s.span())),
            ("description", md.description.as_ref().map(|s| s.span())),
            ("created_at", md.created_at.as_ref().map(|s| s.span())),
            (
                "original_creator",
                md.original_creator.as_ref().map(|s| s.span()),
            ),
            ("parent_story", md.parent_story.as_ref().map(|s| s.span())),
        ];
        for (name, span) in fields {
            if let Some(span) = span {
                self.spans.record(format!("metadata.{name}"), span);
            }
        }
    }

    fn hints(&self, doc: &Spanned<HintsDoc>) -> Result<PlacementHints, CliError> {
        let surface = SurfaceClass::from_str(&doc.surface)
            .map_err(|e| model_err(e, self.spans.loc(doc.surface.span())))?;
        let extents = doc
            .min_extents
            .as_ref()
            .map(|e| {
                Extents::new(e[0], e[1]).map_err(|err| model_err(err, self.spans.loc(e.span())))
            })
            .transpose()?;
        PlacementHints::new(surface, extents, doc.note.clone())
            .map_err(|e| model_err(e, self.spans.loc(doc.span())))
    }
}

fn required<'a, T>(
    field: &'a Option<Spanned<T>>,
    name: &str,
    md: &Spanned<MetadataDoc>,
    spans: &Spans,
) -> Result<&'a T, CliError> {
    field.as_deref().ok_or_else(|| {
        CliError::validation("schema", format!("metadata.{name} is required"))
            .at(spans.loc(md.span()))
    })
}

fn parse_story_id(s: &Spanned<String>, spans: &Spans) -> Result<StoryId, CliError> {
    s.parse()
        .map_err(|e| CliError::validation("invalid_field", format!("{e}")).at(spans.loc(s.span())))
}

/// Compiles a scene script to a draft-valid story.
pub fn compile(source: &str, text: &str, resolver: &dyn AssetResolver) -> Result<Story, CliError> {
    compile_for(source, text, resolver, Mode::Draft)
}

/// Compiles a scene script and checks it against the rules of `mode`.
pub fn compile_for(
    source: &str,
    text: &str,
    resolver: &dyn AssetResolver,
    mode: Mode,
) -> Result<Story, CliError> {
    let doc: ScriptDoc = parse_doc(source, text)?;
    let spans = Spans::new(source);
    let md = &doc.metadata;
    let creator = required(&md.creator, "creator", md, &spans)?.clone();
    let created_at = *required(&md.created_at, "created_at", md, &spans)?;
    let seed = md
        .id_seed
        .clone()
        .unwrap_or_else(|| format!("{creator}/{created_at}"));

    let mut c = Compiler {
        spans,
        resolver,
        ids: Ids { seed },
    };
    c.record_metadata(md);

    let mut metadata = Metadata::original(
        creator,
        md.title.as_deref().cloned().unwrap_or_default(),
        md.description.as_deref().cloned().unwrap_or_default(),
        created_at,
    );
    if let Some(oc) = &md.original_creator {
        metadata.original_creator = (**oc).clone();
    }
    if let Some(p) = &md.parent_story {
        metadata.parent_story = Some(parse_story_id(p, &c.spans)?);
    }
    if let Some(h) = &md.placement_hints {
        metadata.placement_hints = Some(c.hints(h)?);
    }

    let mut scenes = Vec::with_capacity(doc.scenes.len());
    for (i, s) in doc.scenes.iter().enumerate() {
        scenes.push(c.scene(s, i, format!("#{i}"))?);
    }
    let story = Story { metadata, scenes };
    c.spans.check(&story, mode)?;
    Ok(story)
}

/// Command-line overrides for a remix.
#[derive(Debug, Clone, Default)]
pub struct RemixOptions {
    pub creator: Option<String>,
    pub created_at: Option<i64>,
}

fn find_object(
    story: &Story,
    id: &Spanned<String>,
    spans: &Spans,
) -> Result<(usize, usize), CliError> {
    let not_found = || {
        CliError::validation(
            "unknown_object",
            format!("no object {:?} in the parent story", id.as_str()),
        )
        .at(spans.loc(id.span()))
    };
    let oid: ObjectId = id.parse().map_err(|_| not_found())?;
    story
        .scenes
        .iter()
        .enumerate()
        .find_map(|(i, s)| {
            s.objects
                .iter()
                .position(|o| o.object_id == oid)
                .map(|j| (i, j))
        })
        .ok_or_else(not_found)
}

fn now_secs() -> i64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs() as i64)
}

/// Derives a remix of `parent` and applies an edit script to it.
///
/// Object and scene references in the script use the parent's ids and scene
/// indices. Edits apply in a fixed order: dialog edits, moves, removals,
/// additions to existing scenes, scene removals, then new scenes at the end.
pub fn apply_edits(
    parent: &Story,
    source: &str,
    text: &str,
    resolver: &dyn AssetResolver,
    options: &RemixOptions,
) -> Result<Story, CliError> {
    let doc: EditsDoc = parse_doc(source, text)?;
    let spans = Spans::new(source);
    let md = doc.metadata.as_ref();
    if let Some(md) = md {
        for (field, name) in [
            (&md.original_creator, "original_creator"),
            (&md.parent_story, "parent_story"),
        ] {
            if let Some(f) = field {
                return Err(CliError::validation(
                    "schema",
                    format!("metadata.{name} is set by the remix"),
                )
                .at(spans.loc(f.span())));
            }
        }
    }
    let creator = options
        .creator
        .clone()
        .or_else(|| md.and_then(|m| m.creator.as_deref().cloned()))
        .ok_or_else(|| {
            CliError::validation(
                "schema",
                "a remix needs a creator (metadata.creator or --creator)",
            )
        })?;
    let created_at = options
        .created_at
        .or_else(|| md.and_then(|m| m.created_at.as_deref().copied()))
        .unwrap_or_else(now_secs);

    let mut story = derive_remix(parent, &creator, created_at)
        .map_err(|e| CliError::validation("invalid_parent", e.to_string()))?;
    let parent_id = story.metadata.parent_story.expect("remix has a parent");
    let seed = md
        .and_then(|m| m.id_seed.clone())
        .unwrap_or_else(|| format!("{creator}/{created_at}/{parent_id}"));
    story.metadata.title = md
        .and_then(|m| m.title.as_deref().cloned())
        .unwrap_or_else(|| {
            format!("remix_{}", parent.metadata.title)
                .chars()
                .take(MAX_TITLE_CHARS)
                .collect()
        });
    story.metadata.description = md
        .and_then(|m| m.description.as_deref().cloned())
        .unwrap_or_else(|| parent.metadata.description.clone());

    let mut c = Compiler {
        spans,
        resolver,
        ids: Ids { seed },
    };
    if let Some(md) = md {
        c.record_metadata(md);
        if let Some(h) = &md.placement_hints {
            story.metadata.placement_hints = Some(c.hints(h)?);
        }
    }

    for e in &doc.edit_dialogs {
        let (i, j) = find_object(&story, &e.object, &c.spans)?;
        let loc = c.spans.loc(e.span());
        let obj = &mut story.scenes[i].objects[j];
        obj.dialog = if e.remove {
            None
        } else {
            let text = match (&e.text, &obj.dialog) {
                (Some(t), _) => t.clone(),
                (None, Some(d)) => d.text().to_owned(),
                (None, None) => {
                    return Err(CliError::validation("schema", "a new dialog needs text").at(loc))
                }
            };
            let offset = match (e.offset, &obj.dialog) {
                (Some(o), _) => {
                    MicroVec3::from_meters(o).map_err(|err| model_err(err, loc.clone()))?
                }
                (None, Some(d)) => d.offset(),
                (None, None) => {
                    let top = resolver
                        .lookup_key(obj.asset.asset_key())
                        .map_or(0.5, |(_, t)| t);
                    MicroVec3::from_meters([0.0, top + DIALOG_CLEARANCE_M, 0.0])
                        .map_err(|err| model_err(err, loc.clone()))?
                }
            };
            Some(DialogBalloon::new(text, offset).map_err(|err| model_err(err, loc))?)
        };
    }

    for m in &doc.move_objects {
        let (i, j) = find_object(&story, &m.object, &c.spans)?;
        let t = story.scenes[i].objects[j].transform;
        let position = m.position.as_ref().map_or(t.position(), |p| **p);
        let rotation = match &m.rotation {
            Some(r) => rotation_of(r, &c.spans)?,
            None => t.rotation(),
        };
        let scale = match &m.scale {
            Some(s) => scale_of(s, &c.spans)?,
            None => t.scale(),
        };
        story.scenes[i].objects[j].transform = Transform::quantize(position, rotation, scale)
            .map_err(|e| model_err(e, c.spans.loc(m.span())))?;
    }

    for r in &doc.remove_objects {
        let (i, j) = find_object(&story, r, &c.spans)?;
        story.scenes[i].objects.remove(j);
    }

    for (k, add) in doc.add_objects.iter().enumerate() {
        let i = *add.scene;
        if i >= story.scenes.len() {
            return Err(CliError::validation(
                "unknown_scene",
                format!(
                    "scene {i} does not exist; the parent has {}",
                    story.scenes.len()
                ),
            )
            .at(c.spans.loc(add.scene.span())));
        }
        let scene_label = format!("parent#{i}");
        for (j, o) in add.objects.iter().enumerate() {
            let path = format!("scenes[{i}].objects[{}]", story.scenes[i].objects.len());
            let obj = c.object(o, &scene_label, format!("add{k}#{j}"), &path)?;
            story.scenes[i].objects.push(obj);
        }
    }

    let mut removed: Vec<usize> = Vec::new();
    for r in &doc.remove_scenes {
        if **r >= story.scenes.len() {
            return Err(CliError::validation(
                "unknown_scene",
                format!("scene {} does not exist", **r),
            )
            .at(c.spans.loc(r.span())));
        }
        removed.push(**r);
    }
    removed.sort_unstable();
    removed.dedup();
    for i in removed.into_iter().rev() {
        story.scenes.remove(i);
    }
    story.reindex_scenes();

    for (k, s) in doc.add_scenes.iter().enumerate() {
        let index = story.scenes.len();
        let scene = c.scene(s, index, format!("new#{k}"))?;
        story.scenes.push(scene);
    }

    c.spans.check(&story, Mode::Draft)?;
    Ok(story)
}
