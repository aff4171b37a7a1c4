//! Deterministic synthetic stories, for property tests and for corpora that
//! match the published study figures.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    AssetRef, DialogBalloon, Extents, GroupId, Metadata, MicroVec3, ObjectId, PlacedObject,
    PlacementHints, Scene, SceneId, Story, StoryId, SurfaceClass, Transform, PRESET_DIALOGS,
};
use crate::package;
use crate::remix::derive_remix;

const TEXT_POOL: &[&str] = &[
    "a", "b", "Z", "0", "7", " ", "-", "_", "\"", "\\", "/", "\n", "\t", "\u{1}", "é", "ü", "ß",
    "日", "本", "🐝", "🎹", "{", "}", ":", ",",
];

fn random_text<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    let mut s: String = "Ab".chars().take(rng.gen_range(1..=2)).collect();
    for _ in 0..len {
        s.push_str(TEXT_POOL.choose(rng).expect("pool is non-empty"));
    }
    s
}

/// A random transform covering small and large positions, arbitrary
/// rotations and the full scale range.
pub fn random_transform<R: Rng + ?Sized>(rng: &mut R) -> Transform {
    let reach = if rng.gen_bool(0.1) { 1e5 } else { 2.0 };
    let position = [(); 3].map(|_| rng.gen_range(-reach..=reach));
    let rotation = loop {
        let q = [(); 4].map(|_| rng.gen_range(-1.0..=1.0f64));
        if q.iter().map(|c| c * c).sum::<f64>() > 1e-3 {
            break q;
        }
    };
    let scale = 10f64.powf(rng.gen_range(-2.0..=2.0));
    Transform::quantize(position, rotation, scale).expect("sampled values are in range")
}

fn random_object<R: Rng + ?Sized>(rng: &mut R, groups: &[GroupId]) -> PlacedObject {
    let key: [u8; 32] = rng.gen();
    let dialog = rng.gen_bool(0.4).then(|| {
        let offset = [(); 3].map(|_| rng.gen_range(-2_000_000..=2_000_000i64));
        DialogBalloon::new(
            random_text(rng, 12),
            MicroVec3::from_micros(offset).expect("offset in range"),
        )
        .expect("text is non-blank")
    });
    PlacedObject {
        object_id: ObjectId::random(rng),
        asset: AssetRef::new(hex::encode(key), random_text(rng, 8)).expect("non-empty asset"),
        transform: random_transform(rng),
        group_id: if rng.gen_bool(0.3) {
            groups.choose(rng).copied()
        } else {
            None
        },
        dialog,
    }
}

/// A random publish-valid story exercising every optional field and awkward
/// string content.
pub fn random_story<R: Rng + ?Sized>(rng: &mut R) -> Story {
    let creator = random_text(rng, 6);
    let parent_story = rng.gen_bool(0.5).then(|| StoryId::from_bytes(rng.gen()));
    let original_creator = match parent_story {
        Some(_) if rng.gen_bool(0.5) => random_text(rng, 6),
        _ => creator.clone(),
    };
    let placement_hints = rng.gen_bool(0.3).then(|| {
        let class = *SurfaceClass::ALL.choose(rng).expect("classes exist");
        let extents = rng.gen_bool(0.5).then(|| {
            Extents::new(rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0))
                .expect("positive extents")
        });
        PlacementHints::new(class, extents, random_text(rng, 10)).expect("short note")
    });
    let mut metadata = Metadata::original(
        creator,
        random_text(rng, 20),
        random_text(rng, 40),
        rng.gen_range(0..2_000_000_000),
    );
    metadata.original_creator = original_creator;
    metadata.parent_story = parent_story;
    metadata.placement_hints = placement_hints;

    let groups: Vec<GroupId> = (0..3).map(|_| GroupId::random(rng)).collect();
    let scene_count = rng.gen_range(1..=4);
    let scenes = (0..scene_count)
        .map(|i| {
            let mut scene = Scene::new(SceneId::random(rng), i as u32);
            let n = rng.gen_range(usize::from(i == 0)..=4);
            scene.objects = (0..n).map(|_| random_object(rng, &groups)).collect();
            scene
        })
        .collect();
    Story { metadata, scenes }
}

/// Usage figures from the SceneAR field study (Table 2 and the results text).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StudyFigures {
    pub participants: usize,
    pub stories: usize,
    pub remixes: usize,
    pub self_remixes: usize,
    pub originals_one_scene: usize,
    pub originals_two_scenes: usize,
    pub originals_three_plus: usize,
    pub max_scenes: usize,
    pub unique_assets: usize,
    pub total_objects: usize,
}

pub const STUDY: StudyFigures = StudyFigures {
    participants: 18,
    stories: 194,
    remixes: 48,
    self_remixes: 11,
    originals_one_scene: 38,
    originals_two_scenes: 47,
    originals_three_plus: 61,
    max_scenes: 10,
    unique_assets: 325,
    total_objects: 1204,
};

const ASSET_NAMES: &[&str] = &[
    "person",
    "old man",
    "girl",
    "black woman",
    "athlete",
    "drummer",
    "artist",
    "knight",
    "astronaut",
    "bee",
    "penguin",
    "cat",
    "robot cat",
    "dog",
    "horse",
    "lamb",
    "tortoise",
    "hare",
    "piano",
    "guitar",
    "drum kit",
    "windmill",
    "castle",
    "rocket",
    "planet",
    "moon",
    "car",
    "virus",
    "mask",
    "tree",
    "house",
    "bath tub",
    "duck",
    "table",
    "cake",
    "trophy",
];

/// Asset pool for the corpus: index 0 is "person".
fn asset(i: usize) -> AssetRef {
    let name = ASSET_NAMES[i % ASSET_NAMES.len()];
    let key = StoryId::digest(format!("synthetic asset {i}").as_bytes()).to_hex();
    AssetRef::new(key, name).expect("non-empty asset")
}

struct Builder {
    rng: ChaCha8Rng,
    next_asset: usize,
    unique_target: usize,
    next_id: u64,
}

impl Builder {
    fn derive_seed(&mut self) -> Vec<u8> {
        self.next_id += 1;
        self.next_id.to_be_bytes().to_vec()
    }

    fn scene_id(&mut self) -> SceneId {
        let seed = self.derive_seed();
        SceneId::derive("corpus scene", &seed)
    }

    /// Fresh assets until the unique target is reached, then reuse with a
    /// bias toward "person".
    fn pick_asset(&mut self, prefer_fresh: bool) -> AssetRef {
        if prefer_fresh && self.next_asset < self.unique_target {
            self.next_asset += 1;
            return asset(self.next_asset - 1);
        }
        if self.rng.gen_bool(0.12) {
            asset(0)
        } else {
            asset(self.rng.gen_range(0..self.next_asset.max(1)))
        }
    }

    fn object(&mut self, prefer_fresh: bool) -> PlacedObject {
        let seed = self.derive_seed();
        let yaw = self
            .rng
            .gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let position = [
            self.rng.gen_range(-0.5..0.5),
            0.0,
            self.rng.gen_range(-0.5..0.5),
        ];
        let (s, c) = (yaw / 2.0).sin_cos();
        let scale = self.rng.gen_range(0.5..2.0);
        let dialog = self.rng.gen_bool(0.3).then(|| {
            let text = PRESET_DIALOGS.choose(&mut self.rng).expect("presets exist");
            DialogBalloon::new(
                *text,
                MicroVec3::from_micros([0, 300_000, 0]).expect("offset in range"),
            )
            .expect("preset text")
        });
        PlacedObject {
            object_id: ObjectId::derive("corpus object", &seed),
            asset: self.pick_asset(prefer_fresh),
            transform: Transform::quantize(position, [c, 0.0, s, 0.0], scale).expect("in range"),
            group_id: None,
            dialog,
        }
    }

    fn scene(&mut self, index: usize, objects: usize) -> Scene {
        let mut scene = Scene::new(self.scene_id(), index as u32);
        scene.objects = (0..objects).map(|_| self.object(true)).collect();
        scene
    }
}

fn creator(n: usize) -> String {
    format!("P{n}")
}

/// Generates a corpus in publish order (every parent precedes its remixes)
/// whose statistics equal [`STUDY`] exactly. The same seed always yields
/// the same stories.
pub fn study_corpus(seed: u64) -> Vec<Story> {
    let f = STUDY;
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        next_asset: 0,
        unique_target: f.unique_assets,
        next_id: 0,
    };
    let originals = f.originals_one_scene + f.originals_two_scenes + f.originals_three_plus;
    let clock = |i: usize| 1_593_561_600 + 900 * i as i64;

    // Scene counts of the originals. Index 0 is the ten-scene story, 1 the
    // eight-scene one and 2 the five-scene story that receives the longest
    // remix; remaining three-plus stories have 3 to 7 scenes.
    let mut scene_counts = vec![f.max_scenes, 8, 5];
    scene_counts.extend((3..f.originals_three_plus).map(|_| b.rng.gen_range(3..=7)));
    scene_counts.extend(std::iter::repeat_n(2, f.originals_two_scenes));
    scene_counts.extend(std::iter::repeat_n(1, f.originals_one_scene));
    let mut order: Vec<usize> = (3..originals).collect();
    order.shuffle(&mut b.rng);
    let order: Vec<usize> = [0, 1, 2].into_iter().chain(order).collect();

    let mut stories: Vec<Story> = Vec::with_capacity(f.stories);
    for (i, &slot) in order.iter().enumerate() {
        let (who, title) = match slot {
            0 => (17, "Mary had a little lamb".to_owned()),
            1 => (5, "Lonely_Cat".to_owned()),
            2 => (5, "don_quixote".to_owned()),
            _ => (b.rng.gen_range(1..=f.participants), format!("story {i}")),
        };
        let scenes = (0..scene_counts[slot]).map(|s| b.scene(s, 1)).collect();
        stories.push(Story {
            metadata: Metadata::original(
                creator(who),
                title,
                format!("a micro narrative by P{who}"),
                clock(i),
            ),
            scenes,
        });
    }

    // Remix parents: the first remix is the six-scene don_quixote remix by
    // P14; others pick among earlier stories of at most five scenes.
    let mut parents = vec![2usize];
    for r in 1..f.remixes {
        let candidates: Vec<usize> = (2..originals + r)
            .filter(|&p| p >= originals || scene_counts[order[p]] <= 5)
            .collect();
        parents.push(*candidates.choose(&mut b.rng).expect("candidates exist"));
    }
    let mut self_flags = vec![false; f.remixes];
    let mut picks: Vec<usize> = (1..f.remixes).collect();
    picks.shuffle(&mut b.rng);
    for &r in picks.iter().take(f.self_remixes) {
        self_flags[r] = true;
    }

    // Fill in extra objects on originals that nobody remixes, so copies do
    // not multiply them. Counts are settled before any remix is derived.
    let remix_parent_set: std::collections::HashSet<usize> = parents.iter().copied().collect();
    let childless: Vec<usize> = (0..originals)
        .filter(|i| !remix_parent_set.contains(i))
        .collect();
    let remix_new_objects = |r: usize| usize::from(r == 0 || r % 3 != 2);
    let mut object_totals: Vec<usize> = stories.iter().map(Story::object_count).collect();
    for (r, &p) in parents.iter().enumerate() {
        let parent_total = object_totals[p];
        object_totals.push(parent_total + remix_new_objects(r));
    }
    let base: usize = object_totals.iter().sum();
    let extra = f
        .total_objects
        .checked_sub(base)
        .expect("base layout fits the object budget");
    for k in 0..extra {
        let target = childless[k % childless.len()];
        let story = &mut stories[target];
        let scene = b.rng.gen_range(0..story.scenes.len());
        let fresh = b.object(true);
        story.scenes[scene].objects.push(fresh);
    }
    assert_eq!(b.next_asset, f.unique_assets, "every pooled asset is used");

    for (r, &p) in parents.iter().enumerate() {
        let parent = &stories[p];
        let parent_creator: usize = parent.metadata.creator[1..].parse().expect("P<n> creator");
        let who = if r == 0 {
            14
        } else if self_flags[r] {
            parent_creator
        } else {
            let mut n = b.rng.gen_range(1..f.participants);
            if n >= parent_creator {
                n += 1;
            }
            n
        };
        let mut remix = derive_remix(parent, &creator(who), clock(originals + r))
            .expect("parent is publishable");
        remix.metadata.title = if r == 0 {
            "remix_don_quixote".to_owned()
        } else {
            format!("remix {r}")
        };
        remix.metadata.description = format!("remixed by P{who}");
        match (r, remix_new_objects(r)) {
            (0, _) => {
                let mut scene = Scene::new(b.scene_id(), remix.scenes.len() as u32);
                let mut cat = b.object(false);
                cat.asset = asset(12);
                scene.objects.push(cat);
                remix.scenes.push(scene);
            }
            (_, 1) if r % 3 == 0 && remix.scenes.len() < 5 => {
                let mut scene = Scene::new(b.scene_id(), remix.scenes.len() as u32);
                scene.objects.push(b.object(false));
                remix.scenes.push(scene);
            }
            (_, 1) => {
                let obj = b.object(false);
                remix.scenes[0].objects.push(obj);
            }
            _ => {
                let target = &mut remix.scenes[0].objects[0];
                let text = PRESET_DIALOGS[r % PRESET_DIALOGS.len()];
                target.dialog = Some(
                    DialogBalloon::new(
                        text,
                        MicroVec3::from_micros([0, 250_000, 0]).expect("in range"),
                    )
                    .expect("text"),
                );
                target.transform = Transform::from_position([0.25, 0.0, -0.25]).expect("in range");
            }
        }
        stories.push(remix);
    }
    debug_assert!(stories.iter().all(|s| package::encode(s).is_ok()));
    stories
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_stats;
    use crate::model::{validate_story, Mode};

    #[test]
    fn random_stories_are_publishable() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = random_story(&mut rng);
            assert_eq!(validate_story(&s, Mode::Publish), vec![]);
        }
    }

    #[test]
    fn study_corpus_matches_figures() {
        let stories = study_corpus(2020);
        let stats = corpus_stats(&stories).unwrap();
        assert_eq!(stats.total_stories, 194);
        assert_eq!(stats.remix_count, 48);
        assert_eq!(stats.self_remix_count, 11);
        assert_eq!(
            (
                stats.scene_count_histogram.one,
                stats.scene_count_histogram.two,
                stats.scene_count_histogram.three_plus
            ),
            (38, 47, 61)
        );
        assert_eq!(stats.scene_count_histogram.max, 10);
        assert_eq!(stats.unique_assets, 325);
        assert_eq!(stats.total_asset_instances, 1204);
    }

    #[test]
    fn study_corpus_is_deterministic_and_seed_dependent() {
        assert_eq!(study_corpus(1), study_corpus(1));
        assert_ne!(study_corpus(1), study_corpus(2));
    }

    #[test]
    fn longest_remix_has_six_scenes() {
        let stories = study_corpus(3);
        let remixes: Vec<_> = stories
            .iter()
            .filter(|s| s.metadata.parent_story.is_some())
            .collect();
        let longest = remixes.iter().max_by_key(|s| s.scenes.len()).unwrap();
        assert_eq!(longest.scenes.len(), 6);
        assert_eq!(remixes[0].metadata.title, "remix_don_quixote");
        assert_eq!(remixes[0].metadata.creator, "P14");
        assert_eq!(remixes[0].metadata.original_creator, "P5");
    }
}
