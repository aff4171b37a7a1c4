use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{Story, MAX_DESCRIPTION_CHARS, MAX_TITLE_CHARS};

/// Validation strictness. Publishing requires everything drafting does, plus
/// a title, a description and at least one object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Draft,
    Publish,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    SceneCount,
    SceneIndexContiguous,
    SceneIdUnique,
    ObjectIdUnique,
    CreatorRequired,
    OriginalCreatorRequired,
    RootCreatorMatchesOriginal,
    CreatedAtNonNegative,
    TitleRequired,
    TitleLength,
    DescriptionRequired,
    DescriptionLength,
    ObjectRequired,
}

impl Rule {
    pub fn describe(&self) -> &'static str {
        match self {
            Rule::SceneCount => "a story needs at least one scene",
            Rule::SceneIndexContiguous => "scene indices must run 0..n-1 in order",
            Rule::SceneIdUnique => "scene ids must be unique",
            Rule::ObjectIdUnique => "object ids must be unique across the story",
            Rule::CreatorRequired => "creator must be non-empty",
            Rule::OriginalCreatorRequired => "original creator must be non-empty",
            Rule::RootCreatorMatchesOriginal => {
                "a story without a parent must list its creator as original creator"
            }
            Rule::CreatedAtNonNegative => "creation timestamp must be >= 0",
            Rule::TitleRequired => "title must be non-empty",
            Rule::TitleLength => "title exceeds 200 characters",
            Rule::DescriptionRequired => "description must be non-empty",
            Rule::DescriptionLength => "description exceeds 2000 characters",
            Rule::ObjectRequired => "a published story needs at least one object",
        }
    }
}

/// A broken rule and the field path it applies to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    pub path: String,
    pub rule: Rule,
}

impl Violation {
    fn new(path: impl Into<String>, rule: Rule) -> Self {
        Self {
            path: path.into(),
            rule,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.rule.describe())
    }
}

/// Checks story-level invariants. Field-level invariants (transform ranges,
/// dialog text, ids) are already guaranteed by the types' constructors.
pub fn validate_story(story: &Story, mode: Mode) -> Vec<Violation> {
    let mut out = Vec::new();
    let md = &story.metadata;

    if md.creator.trim().is_empty() {
        out.push(Violation::new("metadata.creator", Rule::CreatorRequired));
    }
    if md.original_creator.trim().is_empty() {
        out.push(Violation::new(
            "metadata.original_creator",
            Rule::OriginalCreatorRequired,
        ));
    }
    if md.parent_story.is_none() && md.original_creator != md.creator {
        out.push(Violation::new(
            "metadata.original_creator",
            Rule::RootCreatorMatchesOriginal,
        ));
    }
    if md.created_at < 0 {
        out.push(Violation::new(
            "metadata.created_at",
            Rule::CreatedAtNonNegative,
        ));
    }
    if md.title.chars().count() > MAX_TITLE_CHARS {
        out.push(Violation::new("metadata.title", Rule::TitleLength));
    }
    if md.description.chars().count() > MAX_DESCRIPTION_CHARS {
        out.push(Violation::new(
            "metadata.description",
            Rule::DescriptionLength,
        ));
    }

    if story.scenes.is_empty() {
        out.push(Violation::new("scenes", Rule::SceneCount));
    }
    let mut scene_ids = HashSet::new();
    let mut object_ids = HashSet::new();
    for (i, scene) in story.scenes.iter().enumerate() {
        if scene.index as usize != i {
            out.push(Violation::new(
                format!("scenes[{i}].index"),
                Rule::SceneIndexContiguous,
            ));
        }
        if !scene_ids.insert(scene.scene_id) {
            out.push(Violation::new(
                format!("scenes[{i}].scene_id"),
                Rule::SceneIdUnique,
            ));
        }
        for (j, obj) in scene.objects.iter().enumerate() {
            if !object_ids.insert(obj.object_id) {
                out.push(Violation::new(
                    format!("scenes[{i}].objects[{j}].object_id"),
                    Rule::ObjectIdUnique,
                ));
            }
        }
    }

    if mode == Mode::Publish {
        if md.title.trim().is_empty() {
            out.push(Violation::new("metadata.title", Rule::TitleRequired));
        }
        if md.description.trim().is_empty() {
            out.push(Violation::new(
                "metadata.description",
                Rule::DescriptionRequired,
            ));
        }
        if story.object_count() == 0 {
            out.push(Violation::new("scenes", Rule::ObjectRequired));
        }
    }
    out
}
