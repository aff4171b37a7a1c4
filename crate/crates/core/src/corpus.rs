//! Usage analytics over a set of published stories.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::canonical;
use crate::model::{Story, StoryId};
use crate::package::{self, PackageError};
use crate::remix::is_self_remix;

/// Scene-count distribution. The buckets count original (non-remix) stories
/// only; `max` is the largest scene count of any story in the corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SceneHistogram {
    pub one: usize,
    pub two: usize,
    pub three_plus: usize,
    pub max: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusStats {
    pub total_stories: usize,
    pub remix_count: usize,
    pub self_remix_count: usize,
    pub remix_ratio: f64,
    pub self_remix_share: f64,
    pub scene_count_histogram: SceneHistogram,
    pub unique_assets: usize,
    pub total_asset_instances: usize,
}

impl CorpusStats {
    pub fn to_canonical_json(&self) -> String {
        canonical::to_string(self).expect("stats serialize")
    }
}

/// Stats over stories whose ids are already known. Self-remixes are resolved
/// against parents present in the same corpus.
pub fn corpus_stats_indexed<'a, I>(entries: I) -> CorpusStats
where
    I: IntoIterator<Item = (StoryId, &'a Story)>,
{
    let by_id: HashMap<StoryId, &Story> = entries.into_iter().collect();
    let mut stats = CorpusStats {
        total_stories: by_id.len(),
        ..CorpusStats::default()
    };
    let mut assets = HashSet::new();
    for story in by_id.values() {
        let scenes = story.scenes.len();
        stats.scene_count_histogram.max = stats.scene_count_histogram.max.max(scenes);
        match story.metadata.parent_story {
            Some(parent_id) => {
                stats.remix_count += 1;
                if is_self_remix(story, by_id.get(&parent_id).copied()) {
                    stats.self_remix_count += 1;
                }
            }
            None => match scenes {
                0 => {}
                1 => stats.scene_count_histogram.one += 1,
                2 => stats.scene_count_histogram.two += 1,
                _ => stats.scene_count_histogram.three_plus += 1,
            },
        }
        for o in story.objects() {
            stats.total_asset_instances += 1;
            assets.insert(o.asset.asset_key());
        }
    }
    stats.unique_assets = assets.len();
    if stats.total_stories > 0 {
        stats.remix_ratio = stats.remix_count as f64 / stats.total_stories as f64;
    }
    if stats.remix_count > 0 {
        stats.self_remix_share = stats.self_remix_count as f64 / stats.remix_count as f64;
    }
    stats
}

/// Stats over a list of stories, hashing each to resolve lineage.
pub fn corpus_stats(stories: &[Story]) -> Result<CorpusStats, PackageError> {
    let ids = stories
        .iter()
        .map(package::story_id)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(corpus_stats_indexed(ids.into_iter().zip(stories)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AssetRef, Metadata, ObjectId, PlacedObject, Scene, SceneId, Transform};
    use crate::remix::derive_remix;

    fn story(creator: &str, scenes: usize, keys: &[&str]) -> Story {
        let mut out = Story {
            metadata: Metadata::original(creator, "t", "d", 1),
            scenes: (0..scenes)
                .map(|i| Scene::new(SceneId::from_u128(i as u128 + 1), i as u32))
                .collect(),
        };
        for (i, k) in keys.iter().enumerate() {
            out.scenes[0].objects.push(PlacedObject {
                object_id: ObjectId::from_u128(i as u128 + 1),
                asset: AssetRef::new(*k, "thing").unwrap(),
                transform: Transform::IDENTITY,
                group_id: None,
                dialog: None,
            });
        }
        out
    }

    #[test]
    fn empty_corpus_is_all_zero() {
        assert_eq!(corpus_stats(&[]).unwrap(), CorpusStats::default());
    }

    #[test]
    fn counts_remixes_and_assets() {
        let a = story("P1", 1, &["x", "y"]);
        let b = story("P2", 3, &["y", "z"]);
        let mut self_remix = derive_remix(&a, "P1", 2).unwrap();
        self_remix.metadata.title = "again".into();
        let other = derive_remix(&b, "P1", 3).unwrap();
        let stats = corpus_stats(&[a, b, self_remix, other]).unwrap();
        assert_eq!(stats.total_stories, 4);
        assert_eq!(stats.remix_count, 2);
        assert_eq!(stats.self_remix_count, 1);
        assert_eq!(stats.remix_ratio, 0.5);
        assert_eq!(stats.self_remix_share, 0.5);
        assert_eq!(
            stats.scene_count_histogram,
            SceneHistogram {
                one: 1,
                two: 0,
                three_plus: 1,
                max: 3
            }
        );
        assert_eq!(stats.unique_assets, 3);
        assert_eq!(stats.total_asset_instances, 8);
    }

    #[test]
    fn report_is_canonical_json() {
        let json = corpus_stats(&[story("P1", 2, &["k"])])
            .unwrap()
            .to_canonical_json();
        assert!(canonical::is_canonical(json.as_bytes()));
        assert!(json.starts_with(r#"{"remix_count":0,"remix_ratio":0.0,"#));
    }
}
