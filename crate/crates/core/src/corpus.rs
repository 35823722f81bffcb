//! Documents, their origin, and the ordered collection they live in.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::clean::{clean_text, CleanError};

/// Origin identity of a document. Two documents from the same host (or the
/// same local file stem) share a source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceId(String);

impl SourceId {
    /// Normalizes `value` (trim + lowercase). Idempotent.
    pub fn new(value: &str) -> Result<Self, SourceError> {
        let norm = value.trim().to_lowercase();
        if norm.is_empty() {
            return Err(SourceError::Empty);
        }
        Ok(SourceId(norm))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("empty source locator")]
    Empty,
    #[error("cannot derive a source from locator {0:?}")]
    Unparseable(String),
}

/// Derives the [`SourceId`] of a locator: the lowercased host for
/// `scheme://` locators, the file stem for anything else.
pub fn normalize_source(uri: &str) -> Result<SourceId, SourceError> {
    let uri = uri.trim();
    if uri.is_empty() {
        return Err(SourceError::Empty);
    }
    let unparseable = || SourceError::Unparseable(uri.to_string());
    match uri.split_once("://") {
        Some((scheme, rest)) => {
            if scheme.is_empty() || !scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c)) {
                return Err(unparseable());
            }
            if scheme.eq_ignore_ascii_case("file") {
                return file_stem(rest).ok_or_else(unparseable).and_then(SourceId::new);
            }
            let authority = rest.split(['/', '?', '#']).next().unwrap_or("");
            let host_port = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
            let host = match host_port.strip_prefix('[') {
                // IPv6 literal
                Some(v6) => v6.split_once(']').map(|(h, _)| h).ok_or_else(unparseable)?,
                None => host_port.split(':').next().unwrap_or(""),
            };
            if host.is_empty() || host.chars().any(char::is_whitespace) {
                return Err(unparseable());
            }
            SourceId::new(host).map_err(|_| unparseable())
        }
        None => file_stem(uri).ok_or_else(unparseable).and_then(SourceId::new),
    }
}

fn file_stem(path: &str) -> Option<&str> {
    let name = path.rsplit(['/', '\\']).next().filter(|c| !c.is_empty())?;
    let stem = match name.rfind('.') {
        Some(0) | None => name,
        Some(dot) => &name[..dot],
    };
    (!stem.is_empty() && stem != "." && stem != "..").then_some(stem)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DocumentKind {
    Plain,
    Markup,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Plain => "plain",
            DocumentKind::Markup => "markup",
        }
    }
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DocumentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(DocumentKind::Plain),
            "markup" => Ok(DocumentKind::Markup),
            other => Err(alloc::format!("unknown document kind {other:?} (expected plain or markup)")),
        }
    }
}

/// One corpus document.
///
/// `raw` is only present while a document is fresh from a fetch; stored
/// corpora keep the cleaned text alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub source: SourceId,
    pub uri: String,
    pub raw: Option<String>,
    pub clean: String,
    pub kind: DocumentKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Clean(#[from] CleanError),
}

impl Document {
    /// Builds a document from fetched bytes, deriving the source from `uri`
    /// and cleaning according to `kind`.
    pub fn from_raw(id: &str, uri: &str, raw: &[u8], kind: DocumentKind) -> Result<Self, DocumentError> {
        let source = normalize_source(uri)?;
        let clean = clean_text(raw, kind)?;
        let raw = core::str::from_utf8(raw).map_err(|e| CleanError::InvalidUtf8 { offset: e.valid_up_to() })?;
        Ok(Document {
            id: id.to_string(),
            source,
            uri: uri.to_string(),
            raw: Some(raw.to_string()),
            clean,
            kind,
        })
    }

    /// Builds a document whose text is already clean (e.g. read back from a
    /// stored corpus).
    pub fn from_clean(id: &str, source: SourceId, uri: &str, kind: DocumentKind, clean: &str) -> Self {
        Document {
            id: id.to_string(),
            source,
            uri: uri.to_string(),
            raw: None,
            clean: crate::clean::normalize_newlines(clean),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("duplicate document uri {0:?}")]
    DuplicateUri(String),
}

/// The documents gathered for one entity class, ordered by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    class_label: String,
    documents: Vec<Document>,
}

impl CorpusManifest {
    pub fn new(class_label: &str, documents: Vec<Document>) -> Result<Self, ManifestError> {
        let mut manifest = CorpusManifest { class_label: class_label.to_string(), documents: Vec::new() };
        for doc in documents {
            manifest.insert(doc)?;
        }
        Ok(manifest)
    }

    pub fn class_label(&self) -> &str {
        &self.class_label
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn contains_uri(&self, uri: &str) -> bool {
        self.documents.iter().any(|d| d.uri == uri)
    }

    /// Inserts `doc` at its id-sorted position.
    pub fn insert(&mut self, doc: Document) -> Result<(), ManifestError> {
        if self.contains_uri(&doc.uri) {
            return Err(ManifestError::DuplicateUri(doc.uri));
        }
        match self.documents.binary_search_by(|d| d.id.as_str().cmp(&doc.id)) {
            Ok(_) => Err(ManifestError::DuplicateId(doc.id)),
            Err(pos) => {
                self.documents.insert(pos, doc);
                Ok(())
            }
        }
    }

    pub fn distinct_sources(&self) -> BTreeSet<&SourceId> {
        self.documents.iter().map(|d| &d.source).collect()
    }
}
