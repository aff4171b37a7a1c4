//! Content-addressed 3D asset storage with keyword search.
//!
//! On disk a catalog is `blobs/<first2>/<key>` plus an append-only
//! `index.log` of canonical-JSON records, replayed at startup. A catalog can
//! also live purely in memory.

mod builtin;
mod search;

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical;
use crate::layout::BoundsSource;
use crate::model::{Aabb, AssetRef, ModelError, Story, StoryId};

pub use builtin::BUILTIN_ASSETS;
pub use search::tokenize;

const INDEX_FILE: &str = "index.log";
const BLOB_DIR: &str = "blobs";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("asset blob is empty")]
    EmptyBlob,
    #[error("asset {0} not found")]
    NotFound(String),
    #[error("asset {0} failed its integrity check")]
    Integrity(String),
    #[error("search limit must be positive")]
    BadLimit,
    #[error("invalid asset metadata: {0}")]
    Model(#[from] ModelError),
    #[error("index.log line {line} is corrupt: {detail}")]
    Corrupt { line: usize, detail: String },
    #[error("catalog io: {0}")]
    Io(#[from] std::io::Error),
}

/// Catalog entry for one asset blob.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetRecord {
    pub asset_key: String,
    pub display_name: String,
    pub tags: Vec<String>,
    pub blob_size: u64,
    pub bounds: Aabb,
}

impl AssetRecord {
    pub fn asset_ref(&self) -> AssetRef {
        AssetRef::new(self.asset_key.clone(), self.display_name.clone())
            .expect("records hold non-empty names")
    }
}

#[derive(Serialize, Deserialize)]
struct BoundsWire {
    min_um: [i64; 3],
    max_um: [i64; 3],
}

/// Journal line and HTTP wire form of a record.
#[derive(Serialize, Deserialize)]
pub struct AssetRecordWire {
    pub asset_key: String,
    pub display_name: String,
    pub tags: Vec<String>,
    pub blob_size: u64,
    bounds: BoundsWire,
}

impl From<&AssetRecord> for AssetRecordWire {
    fn from(r: &AssetRecord) -> Self {
        Self {
            asset_key: r.asset_key.clone(),
            display_name: r.display_name.clone(),
            tags: r.tags.clone(),
            blob_size: r.blob_size,
            bounds: BoundsWire {
                min_um: r.bounds.min_um(),
                max_um: r.bounds.max_um(),
            },
        }
    }
}

impl TryFrom<AssetRecordWire> for AssetRecord {
    type Error = ModelError;

    fn try_from(w: AssetRecordWire) -> Result<Self, Self::Error> {
        if w.display_name.trim().is_empty() {
            return Err(ModelError::Empty("display name"));
        }
        Ok(Self {
            asset_key: w.asset_key,
            display_name: w.display_name,
            tags: w.tags,
            blob_size: w.blob_size,
            bounds: Aabb::from_micros(w.bounds.min_um, w.bounds.max_um)?,
        })
    }
}

/// Lowercase hex SHA-256 of a blob.
pub fn asset_key_for(blob: &[u8]) -> String {
    StoryId::digest(blob).to_hex()
}

#[derive(Default)]
struct State {
    records: BTreeMap<String, AssetRecord>,
    memory_blobs: HashMap<String, Arc<Vec<u8>>>,
}

pub struct Catalog {
    root: Option<PathBuf>,
    state: RwLock<State>,
    journal: Mutex<Option<File>>,
}

impl std::fmt::Debug for Catalog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Catalog")
            .field("root", &self.root)
            .field("len", &self.len())
            .finish()
    }
}

impl Catalog {
    pub fn in_memory() -> Self {
        Self {
            root: None,
            state: RwLock::new(State::default()),
            journal: Mutex::new(None),
        }
    }

    /// In-memory catalog preloaded with the placeholder assets.
    pub fn builtin() -> Self {
        let c = Self::in_memory();
        c.seed_builtin().expect("in-memory seeding cannot fail");
        c
    }

    /// Opens (creating if needed) an on-disk catalog and replays its index.
    /// A torn final line, left by a crash mid-append, is ignored.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, CatalogError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(root.join(BLOB_DIR))?;
        let index_path = root.join(INDEX_FILE);
        let mut state = State::default();
        if index_path.exists() {
            let reader = BufReader::new(File::open(&index_path)?);
            let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
            let count = lines.len();
            for (i, line) in lines.into_iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = serde_json::from_str::<AssetRecordWire>(&line)
                    .map_err(|e| e.to_string())
                    .and_then(|w| AssetRecord::try_from(w).map_err(|e| e.to_string()));
                match parsed {
                    Ok(rec) => {
                        state.records.entry(rec.asset_key.clone()).or_insert(rec);
                    }
                    Err(_) if i + 1 == count => break,
                    Err(detail) => {
                        return Err(CatalogError::Corrupt {
                            line: i + 1,
                            detail,
                        })
                    }
                }
            }
        }
        let journal = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&index_path)?;
        Ok(Self {
            root: Some(root),
            state: RwLock::new(state),
            journal: Mutex::new(Some(journal)),
        })
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn len(&self) -> usize {
        self.state.read().expect("catalog lock").records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn blob_path(root: &Path, key: &str) -> PathBuf {
        root.join(BLOB_DIR).join(&key[..2.min(key.len())]).join(key)
    }

    /// Stores a blob and its metadata, returning the content key. Putting the
    /// same bytes again returns the same key and keeps the first record.
    pub fn put_asset(
        &self,
        blob: &[u8],
        display_name: &str,
        tags: &[String],
        bounds: Option<Aabb>,
    ) -> Result<String, CatalogError> {
        if blob.is_empty() {
            return Err(CatalogError::EmptyBlob);
        }
        if display_name.trim().is_empty() {
            return Err(ModelError::Empty("display name").into());
        }
        let key = asset_key_for(blob);
        let mut journal = self.journal.lock().expect("catalog journal lock");
        if self
            .state
            .read()
            .expect("catalog lock")
            .records
            .contains_key(&key)
        {
            return Ok(key);
        }
        let mut tags: Vec<String> = tags
            .iter()
            .map(|t| t.trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        tags.dedup();
        let record = AssetRecord {
            asset_key: key.clone(),
            display_name: display_name.to_owned(),
            tags,
            blob_size: blob.len() as u64,
            bounds: bounds.unwrap_or_default(),
        };

        match (&self.root, journal.as_mut()) {
            (Some(root), Some(file)) => {
                let path = Self::blob_path(root, &key);
                fs::create_dir_all(path.parent().expect("blob path has parent"))?;
                let tmp = path.with_extension("tmp");
                fs::write(&tmp, blob)?;
                fs::rename(&tmp, &path)?;
                let mut line =
                    canonical::to_vec(&AssetRecordWire::from(&record)).expect("record serializes");
                line.push(b'\n');
                file.write_all(&line)?;
                file.sync_data()?;
            }
            _ => {
                self.state
                    .write()
                    .expect("catalog lock")
                    .memory_blobs
                    .insert(key.clone(), Arc::new(blob.to_vec()));
            }
        }
        self.state
            .write()
            .expect("catalog lock")
            .records
            .insert(key.clone(), record);
        Ok(key)
    }

    /// Returns the exact stored bytes after re-checking them against the key.
    pub fn get_asset(&self, key: &str) -> Result<Vec<u8>, CatalogError> {
        if !self
            .state
            .read()
            .expect("catalog lock")
            .records
            .contains_key(key)
        {
            return Err(CatalogError::NotFound(key.to_owned()));
        }
        let bytes = match &self.root {
            Some(root) => match fs::read(Self::blob_path(root, key)) {
                Ok(b) => b,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                    return Err(CatalogError::NotFound(key.to_owned()))
                }
                Err(e) => return Err(e.into()),
            },
            None => self
                .state
                .read()
                .expect("catalog lock")
                .memory_blobs
                .get(key)
                .map(|b| b.as_ref().clone())
                .ok_or_else(|| CatalogError::NotFound(key.to_owned()))?,
        };
        if asset_key_for(&bytes) != key {
            return Err(CatalogError::Integrity(key.to_owned()));
        }
        Ok(bytes)
    }

    pub fn record(&self, key: &str) -> Option<AssetRecord> {
        self.state
            .read()
            .expect("catalog lock")
            .records
            .get(key)
            .cloned()
    }

    /// All records ordered by key.
    pub fn records(&self) -> Vec<AssetRecord> {
        self.state
            .read()
            .expect("catalog lock")
            .records
            .values()
            .cloned()
            .collect()
    }

    /// Case-insensitive token search over names and tags, ranked by matched
    /// token count, then display name, then key.
    pub fn search(&self, query: &str, limit: usize) -> Result<Vec<AssetRecord>, CatalogError> {
        if limit == 0 {
            return Err(CatalogError::BadLimit);
        }
        let state = self.state.read().expect("catalog lock");
        Ok(search::rank(state.records.values(), query, limit))
    }

    /// Adds the placeholder assets; safe to call repeatedly.
    pub fn seed_builtin(&self) -> Result<Vec<String>, CatalogError> {
        BUILTIN_ASSETS
            .iter()
            .map(|a| {
                let tags: Vec<String> = a.tags.iter().map(|t| t.to_string()).collect();
                self.put_asset(&a.blob(), a.name, &tags, Some(a.bounds()?))
            })
            .collect()
    }
}

impl BoundsSource for Catalog {
    /// Unknown assets fall back to the unit cube.
    fn bounds(&self, asset: &AssetRef) -> Aabb {
        self.record(asset.asset_key())
            .map(|r| r.bounds)
            .unwrap_or_default()
    }
}

/// Asset keys in first-use order: scenes ascending, objects in scene order,
/// duplicates dropped.
pub fn prefetch_plan(story: &Story) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    story
        .objects()
        .map(|o| o.asset.asset_key())
        .filter(|k| seen.insert(*k))
        .map(str::to_owned)
        .collect()
}
