//! Durable per-collection snapshot storage and timeline derivation.
//!
//! On disk a collection is a directory holding `collection.json` (the
//! manifest) and one `snapshots/<YYYY-MM-DD>.json` document per day. Every
//! write goes to a temporary file that is renamed into place, so readers
//! only ever observe fully committed documents.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};
use crate::model::{CollectionManifest, Observation, SerpSnapshot, StoryTimeline, Vertical};

pub const MANIFEST_FILE: &str = "collection.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Snapshots of one topic on one vertical, keyed by date.
#[derive(Debug, Clone)]
pub struct CollectionStore {
    manifest: CollectionManifest,
    snapshots: BTreeMap<NaiveDate, SerpSnapshot>,
    root: Option<PathBuf>,
}

/// Totals reported by [`collection_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectionStats {
    pub total_links: usize,
    pub unique_uris: usize,
    pub duration_days: usize,
}

/// Serializes a snapshot exactly as it is stored on disk.
pub fn snapshot_document(snapshot: &SerpSnapshot) -> Result<String> {
    let mut doc = serde_json::to_string_pretty(snapshot)?;
    doc.push('\n');
    Ok(doc)
}

pub fn parse_snapshot_document(doc: &str) -> Result<SerpSnapshot> {
    Ok(serde_json::from_str(doc)?)
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("doc");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn topics_match(a: &str, b: &str) -> bool {
    a.trim().eq_ignore_ascii_case(b.trim())
}

impl CollectionStore {
    /// A store that lives only in memory.
    pub fn in_memory(topic: impl Into<String>, vertical: Vertical) -> Self {
        CollectionStore {
            manifest: CollectionManifest::new(topic, vertical),
            snapshots: BTreeMap::new(),
            root: None,
        }
    }

    /// Creates an empty store directory and writes its manifest.
    pub fn create(
        dir: impl AsRef<Path>,
        topic: impl Into<String>,
        vertical: Vertical,
    ) -> Result<Self> {
        let root = dir.as_ref().to_path_buf();
        fs::create_dir_all(root.join(SNAPSHOT_DIR))?;
        let store = CollectionStore {
            manifest: CollectionManifest::new(topic, vertical),
            snapshots: BTreeMap::new(),
            root: Some(root),
        };
        store.write_manifest()?;
        Ok(store)
    }

    /// Opens an existing store directory.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let root = dir.as_ref().to_path_buf();
        let manifest_path = root.join(MANIFEST_FILE);
        if !manifest_path.is_file() {
            return Err(Error::StoreMissing(root));
        }
        let manifest: CollectionManifest =
            serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
        let mut snapshots = BTreeMap::new();
        for date in &manifest.dates {
            let path = root.join(SNAPSHOT_DIR).join(format!("{date}.json"));
            let snap = parse_snapshot_document(&fs::read_to_string(&path)?)?;
            if snap.date != *date {
                return Err(Error::invalid(
                    "store",
                    format!("{} holds a snapshot dated {}", path.display(), snap.date),
                ));
            }
            snapshots.insert(*date, snap);
        }
        Ok(CollectionStore {
            manifest,
            snapshots,
            root: Some(root),
        })
    }

    /// Opens `dir` if it holds a store, otherwise creates one there.
    pub fn open_or_create(dir: impl AsRef<Path>, topic: &str, vertical: Vertical) -> Result<Self> {
        match Self::open(dir.as_ref()) {
            Err(Error::StoreMissing(_)) => Self::create(dir, topic, vertical),
            other => other,
        }
    }

    pub fn manifest(&self) -> &CollectionManifest {
        &self.manifest
    }

    pub fn topic(&self) -> &str {
        &self.manifest.topic
    }

    pub fn vertical(&self) -> Vertical {
        self.manifest.vertical
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshot(&self, date: NaiveDate) -> Option<&SerpSnapshot> {
        self.snapshots.get(&date)
    }

    /// Snapshots in ascending date order.
    pub fn snapshots(&self) -> impl Iterator<Item = &SerpSnapshot> {
        self.snapshots.values()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.snapshots.keys().next().copied()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.snapshots.keys().next_back().copied()
    }

    /// Adds `snapshot`, replacing any snapshot already stored for its date.
    pub fn ingest(&mut self, snapshot: SerpSnapshot) -> Result<()> {
        if !topics_match(&snapshot.query, &self.manifest.topic) {
            return Err(Error::Mismatch {
                field: "topic",
                expected: self.manifest.topic.clone(),
                found: snapshot.query.clone(),
            });
        }
        if snapshot.vertical != self.manifest.vertical {
            return Err(Error::Mismatch {
                field: "vertical",
                expected: self.manifest.vertical.to_string(),
                found: snapshot.vertical.to_string(),
            });
        }
        snapshot.validate(None)?;

        if let Some(root) = &self.root {
            let path = root
                .join(SNAPSHOT_DIR)
                .join(format!("{}.json", snapshot.date));
            write_atomic(&path, snapshot_document(&snapshot)?.as_bytes())?;
        }
        self.snapshots.insert(snapshot.date, snapshot);
        self.refresh_manifest();
        self.write_manifest()
    }

    /// Writes every snapshot document into `dir/<date>.json`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.snapshots.len());
        for snap in self.snapshots.values() {
            let path = dir.join(format!("{}.json", snap.date));
            write_atomic(&path, snapshot_document(snap)?.as_bytes())?;
            written.push(path);
        }
        Ok(written)
    }

    /// Persists an in-memory store into `dir`, returning the on-disk store.
    pub fn save_to(&self, dir: impl AsRef<Path>) -> Result<Self> {
        let mut disk = Self::create(dir, self.manifest.topic.clone(), self.manifest.vertical)?;
        for snap in self.snapshots.values() {
            disk.ingest(snap.clone())?;
        }
        Ok(disk)
    }

    fn refresh_manifest(&mut self) {
        let dates: Vec<NaiveDate> = self.snapshots.keys().copied().collect();
        let mut gaps = Vec::new();
        if let (Some(&first), Some(&last)) = (dates.first(), dates.last()) {
            gaps.extend(
                first
                    .iter_days()
                    .take_while(|d| *d <= last)
                    .filter(|d| !self.snapshots.contains_key(d)),
            );
        }
        self.manifest.start_date = dates.first().copied();
        self.manifest.dates = dates;
        self.manifest.gaps = gaps;
    }

    fn write_manifest(&self) -> Result<()> {
        if let Some(root) = &self.root {
            let mut doc = serde_json::to_string_pretty(&self.manifest)?;
            doc.push('\n');
            write_atomic(&root.join(MANIFEST_FILE), doc.as_bytes())?;
        }
        Ok(())
    }
}

/// Derives one timeline per canonical URI ever observed in `store`.
pub fn build_timelines(store: &CollectionStore) -> Result<BTreeMap<String, StoryTimeline>> {
    let (first, last) = match (store.first_date(), store.last_date()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::EmptyStore),
    };
    let span = (last - first).num_days() as usize + 1;
    let day_kind: Vec<Observation> = first
        .iter_days()
        .take(span)
        .map(|d| {
            if store.snapshot(d).is_some() {
                Observation::Absent
            } else {
                Observation::Missing
            }
        })
        .collect();

    let mut timelines: BTreeMap<String, StoryTimeline> = BTreeMap::new();
    for snap in store.snapshots() {
        let day = (snap.date - first).num_days() as usize;
        for r in &snap.results {
            let timeline =
                timelines
                    .entry(r.canonical_uri.clone())
                    .or_insert_with(|| StoryTimeline {
                        canonical_uri: r.canonical_uri.clone(),
                        first_seen: snap.date,
                        observations: day_kind[day..].to_vec(),
                    });
            let offset = (snap.date - timeline.first_seen).num_days() as usize;
            timeline.observations[offset] = Observation::Page(r.page);
        }
    }
    Ok(timelines)
}

/// Total links, distinct canonical URIs, and calendar span in days.
pub fn collection_stats(store: &CollectionStore) -> CollectionStats {
    let total_links = store.snapshots().map(SerpSnapshot::len).sum();
    let unique_uris = store
        .snapshots()
        .flat_map(|s| s.canonical_uris(None))
        .collect::<HashSet<_>>()
        .len();
    let duration_days = match (store.first_date(), store.last_date()) {
        (Some(f), Some(l)) => (l - f).num_days() as usize + 1,
        _ => 0,
    };
    CollectionStats {
        total_links,
        unique_uris,
        duration_days,
    }
}

pub(crate) fn add_days(date: NaiveDate, days: u64) -> Option<NaiveDate> {
    date.checked_add_days(Days::new(days))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SerpResult;

    pub(crate) fn day(n: u64) -> NaiveDate {
        add_days("2017-05-25".parse().unwrap(), n).unwrap()
    }

    pub(crate) fn snap(n: u64, links: &[(&str, u8)]) -> SerpSnapshot {
        let mut s = SerpSnapshot::new("toy", Vertical::General, day(n));
        for (i, (uri, page)) in links.iter().enumerate() {
            s.results
                .push(SerpResult::new(*uri, "", *page, i as u32 + 1).unwrap());
        }
        s
    }

    fn store_of(snaps: Vec<SerpSnapshot>) -> CollectionStore {
        let mut store = CollectionStore::in_memory("toy", Vertical::General);
        for s in snaps {
            store.ingest(s).unwrap();
        }
        store
    }

    #[test]
    fn ingest_first_snapshot_sets_start_date() {
        let store = store_of(vec![snap(0, &[("http://a.org", 1)])]);
        assert_eq!(store.len(), 1);
        assert_eq!(store.manifest().start_date, Some(day(0)));
        assert!(store.manifest().gaps.is_empty());
    }

    #[test]
    fn ingest_same_date_last_write_wins() {
        let store = store_of(vec![
            snap(0, &[("http://a.org", 1)]),
            snap(0, &[("http://b.org", 2)]),
        ]);
        assert_eq!(store.len(), 1);
        assert_eq!(
            store.snapshot(day(0)).unwrap().results[0].canonical_uri,
            "b.org"
        );
    }

    #[test]
    fn ingest_records_gaps() {
        let store = store_of(vec![
            snap(0, &[("http://a.org", 1)]),
            snap(2, &[("http://a.org", 1)]),
        ]);
        assert_eq!(store.manifest().gaps, vec![day(1)]);
        assert_eq!(store.manifest().dates, vec![day(0), day(2)]);
    }

    #[test]
    fn ingest_rejects_mismatches() {
        let mut store = CollectionStore::in_memory("toy", Vertical::News);
        match store.ingest(snap(0, &[])) {
            Err(Error::Mismatch {
                field,
                expected,
                found,
            }) => {
                assert_eq!(
                    (field, expected.as_str(), found.as_str()),
                    ("vertical", "news", "general")
                );
            }
            other => panic!("{other:?}"),
        }
        let mut store = CollectionStore::in_memory("travel ban", Vertical::General);
        match store.ingest(snap(0, &[])) {
            Err(Error::Mismatch {
                field,
                expected,
                found,
            }) => {
                assert_eq!(
                    (field, expected.as_str(), found.as_str()),
                    ("topic", "travel ban", "toy")
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn timeline_from_worked_example() {
        let store = store_of(vec![
            snap(0, &[("http://s0.org", 4)]),
            snap(1, &[("http://s0.org", 2)]),
            snap(2, &[]),
            snap(3, &[]),
        ]);
        let tl = build_timelines(&store).unwrap();
        assert_eq!(tl["s0.org"].to_string(), "{4, 2, 0, 0}");
    }

    #[test]
    fn timeline_single_snapshot() {
        let store = store_of(vec![snap(0, &[("http://a.org", 1)])]);
        assert_eq!(build_timelines(&store).unwrap()["a.org"].to_string(), "{1}");
    }

    #[test]
    fn timeline_marks_missing_days() {
        let store = store_of(vec![
            snap(0, &[("http://a.org", 1)]),
            snap(2, &[("http://a.org", 1)]),
        ]);
        let tl = &build_timelines(&store).unwrap()["a.org"];
        assert_eq!(
            tl.observations,
            vec![
                Observation::Page(1),
                Observation::Missing,
                Observation::Page(1)
            ]
        );
    }

    #[test]
    fn timelines_of_empty_store() {
        let store = CollectionStore::in_memory("toy", Vertical::General);
        assert!(matches!(build_timelines(&store), Err(Error::EmptyStore)));
    }

    #[test]
    fn stats() {
        assert_eq!(
            collection_stats(&CollectionStore::in_memory("toy", Vertical::General)),
            CollectionStats {
                total_links: 0,
                unique_uris: 0,
                duration_days: 0
            }
        );
        let page = |offset: usize| -> Vec<String> {
            (offset..offset + 10)
                .map(|i| format!("http://u{i}.org"))
                .collect()
        };
        let mk = |n: u64, uris: Vec<String>| {
            let links: Vec<(&str, u8)> = uris.iter().map(|u| (u.as_str(), 1)).collect();
            snap(n, &links)
        };
        // days share 8 URIs with their predecessor: 10 + 1 + 1 distinct
        let store = store_of(vec![mk(0, page(0)), mk(1, page(1)), mk(2, page(2))]);
        assert_eq!(
            collection_stats(&store),
            CollectionStats {
                total_links: 30,
                unique_uris: 12,
                duration_days: 3
            }
        );
    }

    #[test]
    fn deduped_snapshot_total_equals_unique() {
        let raw = snap(0, &[("http://a.org/x", 1), ("http://b.org", 1)]);
        let mut dup = raw.clone();
        dup.results
            .push(SerpResult::new("https://a.org/x?utm=1", "", 2, 3).unwrap());
        let store = store_of(vec![crate::canonical::dedup_snapshot(dup)]);
        let stats = collection_stats(&store);
        assert_eq!(stats.total_links, stats.unique_uris);
    }

    #[test]
    fn disk_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let original = snap(0, &[("http://a.org/x?y=1", 1), ("https://b.org/", 2)]);
        let doc = snapshot_document(&original).unwrap();

        let mut store =
            CollectionStore::create(dir.path().join("c"), "toy", Vertical::General).unwrap();
        store
            .ingest(parse_snapshot_document(&doc).unwrap())
            .unwrap();
        store.ingest(snap(2, &[("http://a.org/x", 3)])).unwrap();

        let reopened = CollectionStore::open(dir.path().join("c")).unwrap();
        assert_eq!(reopened.manifest().gaps, vec![day(1)]);
        let out = reopened.export(dir.path().join("out")).unwrap();
        assert_eq!(fs::read_to_string(&out[0]).unwrap(), doc);
    }

    #[test]
    fn open_missing_store() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            CollectionStore::open(dir.path().join("nope")),
            Err(Error::StoreMissing(_))
        ));
    }
}
