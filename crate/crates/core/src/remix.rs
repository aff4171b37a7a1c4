//! Remix derivation, story diffs and lineage walking.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    validate_story, Metadata, Mode, ObjectId, PlacedObject, SceneId, Story, StoryId, Violation,
};
use crate::package::{self, PackageError};

#[derive(Debug, Error)]
pub enum RemixError {
    #[error("parent is not publishable: {0:?}")]
    InvalidParent(Vec<Violation>),
    #[error(transparent)]
    Package(#[from] PackageError),
}

/// Starts a remix draft: scenes are copied with their ids intact, lineage
/// points at the parent, and the title and description are left for the
/// remixer to fill in.
pub fn derive_remix(
    parent: &Story,
    new_creator: &str,
    created_at: i64,
) -> Result<Story, RemixError> {
    let violations = validate_story(parent, Mode::Publish);
    if !violations.is_empty() {
        return Err(RemixError::InvalidParent(violations));
    }
    let parent_id = package::story_id(parent)?;
    Ok(Story {
        metadata: Metadata {
            creator: new_creator.to_owned(),
            title: String::new(),
            description: String::new(),
            original_creator: parent.metadata.original_creator.clone(),
            created_at,
            parent_story: Some(parent_id),
            placement_hints: parent.metadata.placement_hints.clone(),
            format_version: parent.metadata.format_version,
        },
        scenes: parent.scenes.clone(),
    })
}

/// True when `story` is a remix of `parent` by the parent's own creator.
/// Comparison is against the immediate parent, not the lineage root.
pub fn is_self_remix(story: &Story, parent: Option<&Story>) -> bool {
    match (story.metadata.parent_story, parent) {
        (Some(_), Some(p)) => story.metadata.creator == p.metadata.creator,
        _ => false,
    }
}

/// Structural difference between two stories, matched by object and scene
/// ids. Metadata is not compared.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StoryDiff {
    pub objects_added: Vec<ObjectId>,
    pub objects_removed: Vec<ObjectId>,
    pub objects_transformed: Vec<ObjectId>,
    pub dialogs_edited: Vec<ObjectId>,
    pub scenes_added: usize,
    pub scenes_removed: usize,
    pub scenes_reordered: bool,
}

impl StoryDiff {
    pub fn is_empty(&self) -> bool {
        *self == StoryDiff::default()
    }
}

fn objects_by_id(story: &Story) -> HashMap<ObjectId, &PlacedObject> {
    story.objects().map(|o| (o.object_id, o)).collect()
}

/// Lists are in order of first appearance (child order for additions and
/// edits, parent order for removals).
pub fn diff(parent: &Story, child: &Story) -> StoryDiff {
    let before = objects_by_id(parent);
    let after = objects_by_id(child);
    let mut out = StoryDiff::default();

    for o in child.objects() {
        match before.get(&o.object_id) {
            None => out.objects_added.push(o.object_id),
            Some(prev) => {
                if prev.transform != o.transform {
                    out.objects_transformed.push(o.object_id);
                }
                if prev.dialog != o.dialog {
                    out.dialogs_edited.push(o.object_id);
                }
            }
        }
    }
    out.objects_removed = parent
        .objects()
        .map(|o| o.object_id)
        .filter(|id| !after.contains_key(id))
        .collect();

    let parent_scenes: Vec<SceneId> = parent.scenes.iter().map(|s| s.scene_id).collect();
    let child_scenes: Vec<SceneId> = child.scenes.iter().map(|s| s.scene_id).collect();
    let pset: HashSet<_> = parent_scenes.iter().copied().collect();
    let cset: HashSet<_> = child_scenes.iter().copied().collect();
    out.scenes_added = child_scenes.iter().filter(|s| !pset.contains(s)).count();
    out.scenes_removed = parent_scenes.iter().filter(|s| !cset.contains(s)).count();
    let shared_in_parent: Vec<_> = parent_scenes.iter().filter(|s| cset.contains(s)).collect();
    let shared_in_child: Vec<_> = child_scenes.iter().filter(|s| pset.contains(s)).collect();
    out.scenes_reordered = shared_in_parent != shared_in_child;
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineageError {
    #[error("story {0} is not available")]
    BrokenLineage(StoryId),
    #[error("lineage revisits story {0}")]
    CyclicLineage(StoryId),
}

/// Walks parent links from `id` to the root and returns the chain root
/// first. Each element's `parent_story` is the id of the element before it.
pub fn lineage<F>(mut lookup: F, id: StoryId) -> Result<Vec<(StoryId, Story)>, LineageError>
where
    F: FnMut(&StoryId) -> Option<Story>,
{
    let mut chain = Vec::new();
    let mut seen = HashSet::new();
    let mut next = Some(id);
    while let Some(current) = next {
        if !seen.insert(current) {
            return Err(LineageError::CyclicLineage(current));
        }
        let story = lookup(&current).ok_or(LineageError::BrokenLineage(current))?;
        next = story.metadata.parent_story;
        chain.push((current, story));
    }
    chain.reverse();
    Ok(chain)
}
