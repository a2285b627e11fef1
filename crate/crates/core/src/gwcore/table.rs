//! Memo table of primary invariants and its JSON cache file.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gwcore::InvariantKey;
use crate::modspace::Target;
use crate::rational::{fmt_q, parse_q, Q};
use crate::schubert::Grass;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Oracle,
    Recursion,
    Provider,
    Axiom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub value: Q,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Record {
    schema_version: u32,
    target: String,
    degree: u32,
    insertions: Vec<Vec<u32>>,
    value: String,
    provenance: Provenance,
}

pub fn target_string(g: Grass) -> String {
    if g.k == 1 {
        format!("pr:{}", g.n - 1)
    } else {
        format!("g:{},{}", g.k, g.n)
    }
}

#[derive(Clone, Debug, Default)]
pub struct InvariantTable {
    entries: BTreeMap<InvariantKey, Entry>,
}

impl InvariantTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &InvariantKey) -> Option<&Entry> {
        self.entries.get(key)
    }

    /// Idempotent for equal values; a different value is an integrity error.
    pub fn insert(&mut self, key: InvariantKey, value: Q, provenance: Provenance) -> Result<()> {
        if let Some(old) = self.entries.get(&key) {
            if old.value != value {
                return Err(Error::Integrity(format!(
                    "{key:?} already bound to {} ({:?}), refusing {} ({provenance:?})",
                    fmt_q(&old.value),
                    old.provenance,
                    fmt_q(&value)
                )));
            }
            return Ok(());
        }
        self.entries.insert(key, Entry { value, provenance });
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InvariantKey, &Entry)> {
        self.entries.iter()
    }

    pub fn counts_by_provenance(&self) -> BTreeMap<Provenance, usize> {
        let mut out = BTreeMap::new();
        for e in self.entries.values() {
            *out.entry(e.provenance).or_default() += 1;
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let records: Vec<Record> = self
            .entries
            .iter()
            .map(|(k, e)| Record {
                schema_version: SCHEMA_VERSION,
                target: target_string(k.target),
                degree: k.degree,
                insertions: k.insertions.clone(),
                value: fmt_q(&e.value),
                provenance: e.provenance,
            })
            .collect();
        serde_json::to_string_pretty(&records).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<Record> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("cache: {e}")))?;
        let mut t = InvariantTable::new();
        for r in records {
            if r.schema_version != SCHEMA_VERSION {
                return Err(Error::Parse(format!("cache schema version {} (expected {SCHEMA_VERSION})", r.schema_version)));
            }
            let target = Target::parse(&r.target)?
                .grass()
                .ok_or_else(|| Error::Parse(format!("cache target {} is not a Grassmannian", r.target)))?;
            t.insert(InvariantKey::new(target, r.degree, r.insertions), parse_q(&r.value)?, r.provenance)?;
        }
        Ok(t)
    }

    /// Missing file means an empty table.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(source) => Err(Error::Io { path: path.display().to_string(), source }),
        }
    }

    /// Write through a temp file in the same directory, then rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io { path: path.display().to_string(), source };
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(self.to_json()?.as_bytes()).map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Add every entry of `other`, checking consistency.
    pub fn merge(&mut self, other: &InvariantTable) -> Result<()> {
        for (k, e) in other.iter() {
            self.insert(k.clone(), e.value.clone(), e.provenance)?;
        }
        Ok(())
    }
}
