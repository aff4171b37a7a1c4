//! Story storage: content-addressed package files plus an append-only
//! journal of publish and view events, replayed at startup.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use microar_core::catalog::{Catalog, CatalogError};
use microar_core::corpus::{corpus_stats_indexed, CorpusStats};
use microar_core::package::{self, PackageError};
use microar_core::remix::{self, is_self_remix, LineageError, StoryDiff};
use microar_core::{canonical, validate_story, Mode, Story, StoryId, Violation};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const JOURNAL_FILE: &str = "journal.log";
const PACKAGE_DIR: &str = "packages";
const ASSET_DIR: &str = "assets";

/// Package bytes and the story they decode to.
pub type Fetched = (Arc<Vec<u8>>, Arc<Story>);

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("journal line {line} is corrupt: {detail}")]
    Corrupt { line: usize, detail: String },
    #[error("stored package {0} is missing or does not match its id")]
    Integrity(StoryId),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("storage io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum PublishError {
    #[error("package rejected: {0}")]
    Package(#[from] PackageError),
    #[error("package is a draft")]
    Draft,
    #[error("package is not in canonical form; re-encode it before publishing")]
    NotCanonical,
    #[error("story is not publishable")]
    Violations(Vec<Violation>),
    #[error("creator header {header:?} does not match metadata creator {metadata:?}")]
    CreatorMismatch { header: String, metadata: String },
    #[error("parent story {0} has not been published")]
    BrokenLineage(StoryId),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Error)]
pub enum LineageLookupError {
    #[error("story {0} not found")]
    NotFound(StoryId),
    #[error(transparent)]
    Lineage(#[from] LineageError),
}

/// Browse-level view of a published story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoryListing {
    pub story_id: StoryId,
    pub title: String,
    pub creator: String,
    pub original_creator: String,
    pub description: String,
    pub scene_count: usize,
    pub created_at: i64,
    pub parent_story: Option<StoryId>,
    pub self_remix: bool,
    pub view_count: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ListingPage {
    pub page: usize,
    pub page_size: usize,
    pub total: usize,
    pub stories: Vec<StoryListing>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PublishOutcome {
    pub story_id: StoryId,
    pub created: bool,
    pub self_remix: bool,
    /// Structural changes against the parent, for remixes.
    pub diff: Option<StoryDiff>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum JournalRecord {
    Publish { story_id: StoryId, self_remix: bool },
    View { story_id: StoryId },
}

struct Entry {
    id: StoryId,
    story: Arc<Story>,
    bytes: Arc<Vec<u8>>,
    self_remix: bool,
    views: AtomicU64,
}

impl Entry {
    fn listing(&self) -> StoryListing {
        let md = &self.story.metadata;
        StoryListing {
            story_id: self.id,
            title: md.title.clone(),
            creator: md.creator.clone(),
            original_creator: md.original_creator.clone(),
            description: md.description.clone(),
            scene_count: self.story.scenes.len(),
            created_at: md.created_at,
            parent_story: md.parent_story,
            self_remix: self.self_remix,
            view_count: self.views.load(Ordering::SeqCst),
        }
    }
}

#[derive(Default)]
struct Index {
    entries: HashMap<StoryId, Arc<Entry>>,
    order: BTreeSet<(Reverse<i64>, StoryId)>,
}

impl Index {
    fn insert(&mut self, entry: Entry) {
        self.order
            .insert((Reverse(entry.story.metadata.created_at), entry.id));
        self.entries.insert(entry.id, Arc::new(entry));
    }
}

pub struct Store {
    root: PathBuf,
    catalog: Catalog,
    index: RwLock<Index>,
    journal: Mutex<File>,
}

fn package_path(root: &Path, id: &StoryId) -> PathBuf {
    let hex = id.to_hex();
    root.join(PACKAGE_DIR)
        .join(&hex[..2])
        .join(format!("{hex}.{}", package::FILE_EXTENSION))
}

impl Store {
    /// Opens or creates a data directory and rebuilds the index by replaying
    /// the journal. A torn final journal line is ignored.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(root.join(PACKAGE_DIR))?;
        let catalog = Catalog::open(root.join(ASSET_DIR))?;
        let journal_path = root.join(JOURNAL_FILE);
        let mut index = Index::default();
        if journal_path.exists() {
            let lines: Vec<String> = BufReader::new(File::open(&journal_path)?)
                .lines()
                .collect::<Result<_, _>>()?;
            let count = lines.len();
            for (i, line) in lines.iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let record = match serde_json::from_str::<JournalRecord>(line) {
                    Ok(r) => r,
                    Err(_) if i + 1 == count => break,
                    Err(e) => {
                        return Err(StoreError::Corrupt {
                            line: i + 1,
                            detail: e.to_string(),
                        })
                    }
                };
                match record {
                    JournalRecord::Publish {
                        story_id,
                        self_remix,
                    } => {
                        if index.entries.contains_key(&story_id) {
                            continue;
                        }
                        let bytes = fs::read(package_path(&root, &story_id))
                            .map_err(|_| StoreError::Integrity(story_id))?;
                        if StoryId::digest(&bytes) != story_id {
                            return Err(StoreError::Integrity(story_id));
                        }
                        let story =
                            package::decode(&bytes).map_err(|_| StoreError::Integrity(story_id))?;
                        index.insert(Entry {
                            id: story_id,
                            story: Arc::new(story),
                            bytes: Arc::new(bytes),
                            self_remix,
                            views: AtomicU64::new(0),
                        });
                    }
                    JournalRecord::View { story_id } => {
                        if let Some(e) = index.entries.get(&story_id) {
                            e.views.fetch_add(1, Ordering::SeqCst);
                        }
                    }
                }
            }
        }
        let journal = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&journal_path)?;
        Ok(Self {
            root,
            catalog,
            index: RwLock::new(index),
            journal: Mutex::new(journal),
        })
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn len(&self) -> usize {
        self.index.read().expect("index lock").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn append(file: &mut File, record: &JournalRecord) -> Result<(), StoreError> {
        let mut line = canonical::to_vec(record).expect("journal records serialize");
        line.push(b'\n');
        file.write_all(&line)?;
        file.sync_data()?;
        Ok(())
    }

    fn entry(&self, id: &StoryId) -> Option<Arc<Entry>> {
        self.index
            .read()
            .expect("index lock")
            .entries
            .get(id)
            .cloned()
    }

    /// Publishes canonical package bytes on behalf of `creator`. Identical
    /// bytes published again return the existing id with `created = false`.
    pub fn publish(&self, bytes: &[u8], creator: &str) -> Result<PublishOutcome, PublishError> {
        let decoded = package::decode_package(bytes)?;
        if decoded.draft {
            return Err(PublishError::Draft);
        }
        let story = decoded.story;
        if package::encode(&story)? != bytes {
            return Err(PublishError::NotCanonical);
        }
        let violations = validate_story(&story, Mode::Publish);
        if !violations.is_empty() {
            return Err(PublishError::Violations(violations));
        }
        if story.metadata.creator != creator {
            return Err(PublishError::CreatorMismatch {
                header: creator.to_owned(),
                metadata: story.metadata.creator.clone(),
            });
        }
        let id = StoryId::digest(bytes);

        // The journal lock serializes writers; readers only wait for the
        // brief index insert.
        let mut journal = self.journal.lock().expect("journal lock");
        let parent = match story.metadata.parent_story {
            Some(pid) => Some(self.entry(&pid).ok_or(PublishError::BrokenLineage(pid))?),
            None => None,
        };
        let self_remix = is_self_remix(&story, parent.as_ref().map(|p| p.story.as_ref()));
        let diff = parent.as_ref().map(|p| remix::diff(&p.story, &story));
        if self.entry(&id).is_some() {
            return Ok(PublishOutcome {
                story_id: id,
                created: false,
                self_remix,
                diff,
            });
        }

        let path = package_path(&self.root, &id);
        fs::create_dir_all(path.parent().expect("package path has a parent"))
            .map_err(StoreError::from)?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, bytes).map_err(StoreError::from)?;
        fs::rename(&tmp, &path).map_err(StoreError::from)?;
        Self::append(
            &mut journal,
            &JournalRecord::Publish {
                story_id: id,
                self_remix,
            },
        )?;
        self.index.write().expect("index lock").insert(Entry {
            id,
            story: Arc::new(story),
            bytes: Arc::new(bytes.to_vec()),
            self_remix,
            views: AtomicU64::new(0),
        });
        Ok(PublishOutcome {
            story_id: id,
            created: true,
            self_remix,
            diff,
        })
    }

    /// Newest first, ties by id. `page` counts from 1.
    pub fn list(&self, page: usize, page_size: usize, creator: Option<&str>) -> ListingPage {
        let index = self.index.read().expect("index lock");
        let matching: Vec<&Arc<Entry>> = index
            .order
            .iter()
            .map(|(_, id)| &index.entries[id])
            .filter(|e| creator.is_none_or(|c| e.story.metadata.creator == c))
            .collect();
        let stories = matching
            .iter()
            .skip(page.saturating_sub(1).saturating_mul(page_size))
            .take(page_size)
            .map(|e| e.listing())
            .collect();
        ListingPage {
            page,
            page_size,
            total: matching.len(),
            stories,
        }
    }

    /// Returns the published bytes and decoded story, counting one view.
    pub fn fetch(&self, id: &StoryId) -> Result<Option<Fetched>, StoreError> {
        let Some(entry) = self.entry(id) else {
            return Ok(None);
        };
        {
            let mut journal = self.journal.lock().expect("journal lock");
            Self::append(&mut journal, &JournalRecord::View { story_id: *id })?;
        }
        entry.views.fetch_add(1, Ordering::SeqCst);
        Ok(Some((Arc::clone(&entry.bytes), Arc::clone(&entry.story))))
    }

    pub fn meta(&self, id: &StoryId) -> Option<StoryListing> {
        self.entry(id).map(|e| e.listing())
    }

    /// Listings from the root to `id`.
    pub fn lineage(&self, id: &StoryId) -> Result<Vec<StoryListing>, LineageLookupError> {
        if self.entry(id).is_none() {
            return Err(LineageLookupError::NotFound(*id));
        }
        let chain = remix::lineage(|sid| self.entry(sid).map(|e| e.story.as_ref().clone()), *id)?;
        Ok(chain
            .iter()
            .filter_map(|(sid, _)| self.entry(sid).map(|e| e.listing()))
            .collect())
    }

    pub fn stats(&self) -> CorpusStats {
        let index = self.index.read().expect("index lock");
        corpus_stats_indexed(index.entries.values().map(|e| (e.id, e.story.as_ref())))
    }
}
