//! On-disk corpus layout.
//!
//! ```text
//! corpus/
//!   manifest.tsv   id  source  uri  kind  file   (header required)
//!   class.txt      class label (optional)
//!   docs/<id>.txt  cleaned text, UTF-8
//! ```
//!
//! Only cleaned text is stored, so loaded documents have no raw body.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nerctx_core::{CorpusManifest, Document, DocumentKind, ManifestError, SourceId};
use thiserror::Error;

use crate::tsv::{read_file, FormatError, Rows};

pub const MANIFEST_FILE: &str = "manifest.tsv";
pub const CLASS_FILE: &str = "class.txt";
pub const DOCS_DIR: &str = "docs";
pub const MANIFEST_HEADER: [&str; 5] = ["id", "source", "uri", "kind", "file"];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no corpus manifest at {}", .0.display())]
    MissingManifest(PathBuf),
    #[error("document file {} listed in the manifest does not exist", .0.display())]
    MissingFile(PathBuf),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{}: {source}", path.display())]
    Manifest { path: PathBuf, source: ManifestError },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("document id {0:?} cannot be used as a file name")]
    UnsafeId(String),
}

fn malformed(path: &Path, line: usize, reason: impl Into<String>) -> StoreError {
    FormatError::Malformed { path: path.to_path_buf(), line, reason: reason.into() }.into()
}

/// Ids become file names, so they must be plain and tab-free.
fn check_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id != "."
        && id != ".."
        && !id.contains(['/', '\\', '\t', '\n', '\r'])
        && !id.starts_with(char::is_whitespace)
        && !id.ends_with(char::is_whitespace);
    if ok {
        Ok(())
    } else {
        Err(StoreError::UnsafeId(id.to_string()))
    }
}

pub fn load_corpus(dir: &Path) -> Result<CorpusManifest, StoreError> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        return Err(StoreError::MissingManifest(manifest_path));
    }
    let text = read_file(&manifest_path)?;
    let class_path = dir.join(CLASS_FILE);
    let class_label = if class_path.is_file() { read_file(&class_path)?.trim().to_string() } else { String::new() };
    let rows = if text.trim().is_empty() { Vec::new() } else { Rows::parse(&manifest_path, &text, &MANIFEST_HEADER, true)?.fixed(5)? };

    let mut manifest = CorpusManifest::new(&class_label, Vec::new()).expect("empty manifest is valid");
    for (n, f) in rows {
        let [id, source, uri, kind, file] = [f[0], f[1], f[2], f[3], f[4]];
        check_id(id).map_err(|e| malformed(&manifest_path, n, e.to_string()))?;
        let source = SourceId::new(source).map_err(|e| malformed(&manifest_path, n, e.to_string()))?;
        let kind: DocumentKind = kind.parse().map_err(|_| malformed(&manifest_path, n, format!("unknown kind {kind:?}")))?;
        if uri.trim().is_empty() || file.trim().is_empty() {
            return Err(malformed(&manifest_path, n, "uri and file must be non-empty"));
        }
        let doc_path = dir.join(file);
        if !doc_path.is_file() {
            return Err(StoreError::MissingFile(doc_path));
        }
        let clean = read_file(&doc_path)?;
        manifest
            .insert(Document::from_clean(id, source, uri, kind, &clean))
            .map_err(|source| StoreError::Manifest { path: manifest_path.clone(), source })?;
    }
    Ok(manifest)
}

fn write(path: &Path, contents: &[u8]) -> Result<(), StoreError> {
    fs::write(path, contents).map_err(|source| StoreError::Write { path: path.to_path_buf(), source })
}

/// Writes every document file, then replaces the manifest in one rename.
pub fn save_corpus(dir: &Path, manifest: &CorpusManifest) -> Result<(), StoreError> {
    let docs_dir = dir.join(DOCS_DIR);
    fs::create_dir_all(&docs_dir).map_err(|source| StoreError::Write { path: docs_dir.clone(), source })?;
    let mut table = MANIFEST_HEADER.join("\t");
    table.push('\n');
    for doc in manifest.documents() {
        check_id(&doc.id)?;
        let file = format!("{DOCS_DIR}/{}.txt", doc.id);
        let row = [doc.id.as_str(), doc.source.as_str(), doc.uri.as_str(), doc.kind.as_str(), file.as_str()];
        if let Some(bad) = row.iter().find(|f| f.contains(['\t', '\n', '\r'])) {
            return Err(StoreError::Write {
                path: dir.join(MANIFEST_FILE),
                source: io::Error::new(io::ErrorKind::InvalidData, format!("field contains a tab or newline: {bad:?}")),
            });
        }
        table.push_str(&row.join("\t"));
        table.push('\n');
        write(&dir.join(&file), doc.clean.as_bytes())?;
    }
    if !manifest.class_label().is_empty() {
        write(&dir.join(CLASS_FILE), format!("{}\n", manifest.class_label()).as_bytes())?;
    }
    let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
    write(&tmp, table.as_bytes())?;
    let target = dir.join(MANIFEST_FILE);
    fs::rename(&tmp, &target).map_err(|source| StoreError::Write { path: target, source })
}
