//! File-backed map store: one canonical document per map plus `index.json`.
//!
//! Readers clone an `Arc` snapshot and never observe a half-applied write.
//! Writes to the same map id are serialized; every file is replaced by
//! write-then-rename.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use sedmap_core::format::{load_map, render_document, save_map, write_atomic, FormatError, FORMAT_VERSION};
use sedmap_core::CognitiveMap;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("map `{0}` not found")]
    NotFound(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("store i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt store index: {0}")]
    Index(String),
}

#[derive(Debug)]
pub struct StoredMap {
    pub id: String,
    pub revision: u64,
    /// Canonical document bytes, exactly as served.
    pub document: Vec<u8>,
    pub map: CognitiveMap,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct IndexEntry {
    id: String,
    revision: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct IndexFile {
    format_version: String,
    next_id: u64,
    maps: Vec<IndexEntry>,
}

pub struct MapStore {
    dir: PathBuf,
    maps: RwLock<HashMap<String, Arc<StoredMap>>>,
    id_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    index_lock: Mutex<()>,
    next_id: AtomicU64,
}

impl MapStore {
    /// Opens (or initializes) a store rooted at `dir`.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        std::fs::create_dir_all(dir.join("maps"))?;
        let index_path = dir.join("index.json");
        let mut maps = HashMap::new();
        let mut next_id = 1;
        if index_path.exists() {
            let index: IndexFile = serde_json::from_slice(&std::fs::read(&index_path)?)
                .map_err(|e| StoreError::Index(e.to_string()))?;
            next_id = index.next_id;
            for entry in index.maps {
                let document = std::fs::read(doc_path(&dir, &entry.id))?;
                let map = load_map(&document)?;
                maps.insert(
                    entry.id.clone(),
                    Arc::new(StoredMap { id: entry.id, revision: entry.revision, document, map }),
                );
            }
        }
        Ok(Self {
            dir,
            maps: RwLock::new(maps),
            id_locks: Mutex::new(HashMap::new()),
            index_lock: Mutex::new(()),
            next_id: AtomicU64::new(next_id),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn get(&self, id: &str) -> Option<Arc<StoredMap>> {
        self.maps.read().get(id).cloned()
    }

    /// Snapshot of every stored map, ordered by id.
    pub fn list(&self) -> Vec<Arc<StoredMap>> {
        let mut all: Vec<_> = self.maps.read().values().cloned().collect();
        all.sort_by(|a, b| natural_id(&a.id).cmp(&natural_id(&b.id)));
        all
    }

    pub fn create(&self, map: CognitiveMap) -> Result<Arc<StoredMap>, StoreError> {
        let id = format!("m{}", self.next_id.fetch_add(1, Ordering::SeqCst));
        let lock = self.id_lock(&id);
        let _guard = lock.lock();
        self.commit(id, 1, map)
    }

    /// Replaces an existing map, bumping its revision.
    pub fn put(&self, id: &str, map: CognitiveMap) -> Result<Arc<StoredMap>, StoreError> {
        let lock = self.id_lock(id);
        let _guard = lock.lock();
        let current = self.get(id).ok_or_else(|| StoreError::NotFound(id.into()))?;
        self.commit(id.to_string(), current.revision + 1, map)
    }

    /// Idempotent; returns whether a map was removed.
    pub fn delete(&self, id: &str) -> Result<bool, StoreError> {
        let lock = self.id_lock(id);
        let _guard = lock.lock();
        let removed = self.maps.write().remove(id).is_some();
        if removed {
            self.write_index()?;
            match std::fs::remove_file(doc_path(&self.dir, id)) {
                Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
                _ => {}
            }
        }
        Ok(removed)
    }

    fn commit(&self, id: String, revision: u64, map: CognitiveMap) -> Result<Arc<StoredMap>, StoreError> {
        let document = save_map(&map);
        write_atomic(&doc_path(&self.dir, &id), &document)?;
        let stored = Arc::new(StoredMap { id: id.clone(), revision, document, map });
        self.maps.write().insert(id, stored.clone());
        self.write_index()?;
        Ok(stored)
    }

    fn write_index(&self) -> Result<(), StoreError> {
        let _guard = self.index_lock.lock();
        let maps = self
            .list()
            .into_iter()
            .map(|m| IndexEntry { id: m.id.clone(), revision: m.revision })
            .collect();
        let index = IndexFile {
            format_version: FORMAT_VERSION.into(),
            next_id: self.next_id.load(Ordering::SeqCst),
            maps,
        };
        write_atomic(&self.dir.join("index.json"), &render_document(&index))?;
        Ok(())
    }

    fn id_lock(&self, id: &str) -> Arc<Mutex<()>> {
        self.id_locks.lock().entry(id.to_string()).or_default().clone()
    }
}

fn doc_path(dir: &Path, id: &str) -> PathBuf {
    dir.join("maps").join(format!("{id}.json"))
}

/// Sort key so `m2` precedes `m10`.
fn natural_id(id: &str) -> (usize, &str) {
    (id.len(), id)
}

/// Ids are server-assigned `m<digits>` tokens.
pub fn is_valid_id(id: &str) -> bool {
    id.len() > 1 && id.starts_with('m') && id[1..].bytes().all(|b| b.is_ascii_digit())
}
