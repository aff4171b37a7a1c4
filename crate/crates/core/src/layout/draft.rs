use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::model::Story;
use crate::package::{self, PackageError};

#[derive(Debug, Error)]
pub enum DraftError {
    #[error("draft io: {0}")]
    Io(#[from] std::io::Error),
    #[error("draft package: {0}")]
    Package(#[from] PackageError),
}

/// Persists an in-progress story as a draft-marked package. The file is
/// written to a sibling temp file and renamed into place, so a crash never
/// leaves a half-written draft behind.
pub fn save_draft(story: &Story, path: &Path) -> Result<(), DraftError> {
    let bytes = package::encode_draft(story)?;
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_draft(path: &Path) -> Result<Story, DraftError> {
    let bytes = fs::read(path)?;
    Ok(package::decode(&bytes)?)
}
