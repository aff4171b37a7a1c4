use std::collections::BTreeSet;

use super::AssetRecord;

/// Lowercased alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub(super) fn rank<'a>(
    records: impl Iterator<Item = &'a AssetRecord>,
    query: &str,
    limit: usize,
) -> Vec<AssetRecord> {
    let wanted: BTreeSet<String> = tokenize(query).into_iter().collect();
    if wanted.is_empty() {
        return Vec::new();
    }
    let mut scored: Vec<(usize, &AssetRecord)> = records
        .filter_map(|r| {
            let mut have: BTreeSet<String> = tokenize(&r.display_name).into_iter().collect();
            have.extend(r.tags.iter().flat_map(|t| tokenize(t)));
            let matched = wanted.iter().filter(|t| have.contains(*t)).count();
            (matched > 0).then_some((matched, r))
        })
        .collect();
    scored.sort_by(|(ma, a), (mb, b)| {
        mb.cmp(ma)
            .then_with(|| a.display_name.cmp(&b.display_name))
            .then_with(|| a.asset_key.cmp(&b.asset_key))
    });
    scored
        .into_iter()
        .take(limit)
        .map(|(_, r)| r.clone())
        .collect()
}
