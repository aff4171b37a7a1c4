use crate::canonical;
use crate::model::{Aabb, ModelError};

/// A placeholder asset shipped for offline use.
#[derive(Debug, Clone, Copy)]
pub struct BuiltinAsset {
    pub name: &'static str,
    pub tags: &'static [&'static str],
    /// Width, height, depth in meters; boxes sit on the plane (min y = 0).
    pub size: [f64; 3],
}

impl BuiltinAsset {
    pub fn bounds(&self) -> Result<Aabb, ModelError> {
        let [w, h, d] = self.size;
        Aabb::from_meters([-w / 2.0, 0.0, -d / 2.0], [w / 2.0, h, d / 2.0])
    }

    /// Minimal glTF document standing in for the real mesh.
    pub fn blob(&self) -> Vec<u8> {
        let doc = serde_json::json!({
            "asset": {"version": "2.0", "generator": "microar placeholder"},
            "extras": {"name": self.name, "size": self.size},
        });
        canonical::to_vec(&doc).expect("placeholder serializes")
    }
}

pub static BUILTIN_ASSETS: &[BuiltinAsset] = &[
    BuiltinAsset {
        name: "person",
        tags: &["human", "people", "character"],
        size: [0.5, 1.7, 0.3],
    },
    BuiltinAsset {
        name: "old man",
        tags: &["elder", "character"],
        size: [0.5, 1.65, 0.3],
    },
    BuiltinAsset {
        name: "girl",
        tags: &["child", "character"],
        size: [0.4, 1.3, 0.25],
    },
    BuiltinAsset {
        name: "athlete",
        tags: &["sport", "character"],
        size: [0.5, 1.8, 0.3],
    },
    BuiltinAsset {
        name: "drummer",
        tags: &["music", "character"],
        size: [0.6, 1.7, 0.6],
    },
    BuiltinAsset {
        name: "knight",
        tags: &["armor", "character", "medieval"],
        size: [0.6, 1.8, 0.4],
    },
    BuiltinAsset {
        name: "astronaut",
        tags: &["space", "character"],
        size: [0.7, 1.9, 0.5],
    },
    BuiltinAsset {
        name: "bee",
        tags: &["insect", "animal"],
        size: [0.02, 0.015, 0.03],
    },
    BuiltinAsset {
        name: "penguin",
        tags: &["bird", "animal"],
        size: [0.3, 0.6, 0.3],
    },
    BuiltinAsset {
        name: "cat",
        tags: &["animal", "pet"],
        size: [0.25, 0.3, 0.5],
    },
    BuiltinAsset {
        name: "robot cat",
        tags: &["robot", "animal"],
        size: [0.3, 0.35, 0.5],
    },
    BuiltinAsset {
        name: "dog",
        tags: &["animal", "pet"],
        size: [0.3, 0.5, 0.7],
    },
    BuiltinAsset {
        name: "horse",
        tags: &["animal"],
        size: [0.6, 1.6, 2.2],
    },
    BuiltinAsset {
        name: "lamb",
        tags: &["sheep", "animal"],
        size: [0.35, 0.6, 0.8],
    },
    BuiltinAsset {
        name: "tortoise",
        tags: &["turtle", "animal"],
        size: [0.3, 0.15, 0.4],
    },
    BuiltinAsset {
        name: "hare",
        tags: &["rabbit", "animal"],
        size: [0.2, 0.4, 0.5],
    },
    BuiltinAsset {
        name: "piano",
        tags: &["music", "instrument"],
        size: [1.5, 1.0, 1.9],
    },
    BuiltinAsset {
        name: "guitar",
        tags: &["music", "instrument"],
        size: [0.4, 1.0, 0.1],
    },
    BuiltinAsset {
        name: "drum kit",
        tags: &["music", "instrument"],
        size: [1.5, 1.2, 1.2],
    },
    BuiltinAsset {
        name: "windmill",
        tags: &["building"],
        size: [3.0, 8.0, 3.0],
    },
    BuiltinAsset {
        name: "castle",
        tags: &["building", "medieval"],
        size: [6.0, 8.0, 6.0],
    },
    BuiltinAsset {
        name: "rocket",
        tags: &["space", "vehicle"],
        size: [1.0, 6.0, 1.0],
    },
    BuiltinAsset {
        name: "planet",
        tags: &["space"],
        size: [2.0, 2.0, 2.0],
    },
    BuiltinAsset {
        name: "car",
        tags: &["vehicle"],
        size: [1.8, 1.4, 4.3],
    },
    BuiltinAsset {
        name: "virus",
        tags: &["covid", "germ"],
        size: [0.2, 0.2, 0.2],
    },
    BuiltinAsset {
        name: "tree",
        tags: &["plant", "nature"],
        size: [2.0, 4.0, 2.0],
    },
    BuiltinAsset {
        name: "house",
        tags: &["building"],
        size: [6.0, 5.0, 8.0],
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_bounds_valid() {
        let mut names: Vec<_> = BUILTIN_ASSETS.iter().map(|a| a.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), BUILTIN_ASSETS.len());
        for a in BUILTIN_ASSETS {
            a.bounds().unwrap();
        }
    }
}
