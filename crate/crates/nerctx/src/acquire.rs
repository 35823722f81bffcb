//! Corpus acquisition through a search-and-fetch backend.
//!
//! [`SearchClient`] is the extension point for real search engines. The crate
//! ships [`MockClient`], which answers from a fixture directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use log::warn;
use nerctx_core::{CorpusManifest, Document, DocumentKind, LinkResult, SearchQuery};
use thiserror::Error;

use crate::tsv::{read_file, FormatError, Rows};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("search for {query:?} failed: {reason}")]
    Search { query: String, reason: String },
    #[error("fetching {uri} failed: {reason}")]
    Fetch { uri: String, reason: String },
}

/// A web search backend. Implementations must be usable from several
/// threads at once.
pub trait SearchClient: Sync {
    /// Ranked links for `query`, at most `query.max_results` of them.
    fn search(&self, query: &SearchQuery) -> Result<Vec<LinkResult>, ClientError>;
    /// The raw body behind `uri` and how to clean it.
    fn fetch(&self, uri: &str) -> Result<(Vec<u8>, DocumentKind), ClientError>;
}

/// Fixture-backed client. `queries.tsv` (columns `query, uri, file`, header
/// optional) lists the results of each query in rank order; `file` is
/// relative to the fixture directory. Unlisted queries return no results.
#[derive(Debug, Clone)]
pub struct MockClient {
    root: PathBuf,
    results: BTreeMap<String, Vec<String>>,
    files: BTreeMap<String, PathBuf>,
}

pub const QUERIES_FILE: &str = "queries.tsv";

impl MockClient {
    pub fn from_dir(dir: &Path) -> Result<Self, FormatError> {
        let path = dir.join(QUERIES_FILE);
        let text = read_file(&path)?;
        let rows = Rows::parse(&path, &text, &["query", "uri", "file"], false)?.fixed(3)?;
        let mut results: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut files = BTreeMap::new();
        for (n, f) in rows {
            let (query, uri, file) = (f[0].trim(), f[1].trim(), f[2].trim());
            if query.is_empty() || uri.is_empty() || file.is_empty() {
                return Err(FormatError::Malformed { path: path.clone(), line: n, reason: "empty field".to_string() });
            }
            if let Some(previous) = files.insert(uri.to_string(), PathBuf::from(file)) {
                if previous != Path::new(file) {
                    return Err(FormatError::Malformed {
                        path: path.clone(),
                        line: n,
                        reason: format!("{uri} is mapped to two different files"),
                    });
                }
            }
            results.entry(query.to_string()).or_default().push(uri.to_string());
        }
        Ok(MockClient { root: dir.to_path_buf(), results, files })
    }
}

fn kind_of(path: &Path) -> DocumentKind {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("html" | "htm" | "xhtml" | "xml") => DocumentKind::Markup,
        _ => DocumentKind::Plain,
    }
}

impl SearchClient for MockClient {
    fn search(&self, query: &SearchQuery) -> Result<Vec<LinkResult>, ClientError> {
        let uris = self.results.get(&query.query_string()).map(Vec::as_slice).unwrap_or_default();
        Ok(uris
            .iter()
            .take(query.max_results)
            .enumerate()
            .map(|(i, uri)| LinkResult { uri: uri.clone(), rank: i + 1 })
            .collect())
    }

    fn fetch(&self, uri: &str) -> Result<(Vec<u8>, DocumentKind), ClientError> {
        let file = self.files.get(uri).ok_or_else(|| ClientError::Fetch { uri: uri.to_string(), reason: "unknown uri".to_string() })?;
        let path = self.root.join(file);
        let body = fs::read(&path).map_err(|e| ClientError::Fetch { uri: uri.to_string(), reason: e.to_string() })?;
        Ok((body, kind_of(&path)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AcquireError {
    #[error("all {count} searches failed; first error: {first}")]
    AllSearchesFailed { count: usize, first: ClientError },
}

/// A URI that was found but could not be turned into a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub uri: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AcquireReport {
    /// Ids of the documents added, in merge order.
    pub added: Vec<String>,
    /// Result links already present in the corpus or seen earlier in this run.
    pub duplicates: usize,
    pub search_failures: Vec<ClientError>,
    pub fetch_failures: Vec<Failure>,
}

/// Searches every query, fetches each new URI with at most `concurrency`
/// requests in flight, and adds the documents to `manifest`.
///
/// New documents are merged in query order, then rank order, whatever order
/// the fetches complete in. Ids continue the `doc-NNNNN` sequence.
pub fn acquire(
    client: &dyn SearchClient,
    queries: &[SearchQuery],
    manifest: &mut CorpusManifest,
    concurrency: usize,
) -> Result<AcquireReport, AcquireError> {
    let mut report = AcquireReport::default();
    let mut pending: Vec<String> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for query in queries {
        match client.search(query) {
            Ok(mut links) => {
                links.sort_by_key(|l| l.rank);
                for link in links {
                    if manifest.contains_uri(&link.uri) || !seen.insert(link.uri.clone()) {
                        report.duplicates += 1;
                    } else {
                        pending.push(link.uri);
                    }
                }
            }
            Err(e) => {
                warn!("{e}");
                report.search_failures.push(e);
            }
        }
    }
    if !queries.is_empty() && report.search_failures.len() == queries.len() {
        return Err(AcquireError::AllSearchesFailed { count: queries.len(), first: report.search_failures[0].clone() });
    }

    let mut next_id = manifest.len() + 1;
    for (uri, fetched) in pending.iter().zip(fetch_all(client, &pending, concurrency)) {
        let doc = fetched.map_err(|e| e.to_string()).and_then(|(body, kind)| {
            let id = loop {
                let id = format!("doc-{next_id:05}");
                next_id += 1;
                if manifest.documents().iter().all(|d| d.id != id) {
                    break id;
                }
            };
            Document::from_raw(&id, uri, &body, kind).map_err(|e| e.to_string())
        });
        match doc {
            Ok(doc) => {
                report.added.push(doc.id.clone());
                manifest.insert(doc).expect("fresh id and uri");
            }
            Err(reason) => {
                warn!("skipping {uri}: {reason}");
                report.fetch_failures.push(Failure { uri: uri.clone(), reason });
            }
        }
    }
    Ok(report)
}

type Fetched = Result<(Vec<u8>, DocumentKind), ClientError>;

/// Fetches `uris` on up to `concurrency` threads; results are in input order.
fn fetch_all(client: &dyn SearchClient, uris: &[String], concurrency: usize) -> Vec<Fetched> {
    let workers = concurrency.clamp(1, uris.len().max(1));
    let next = AtomicUsize::new(0);
    let mut indexed: Vec<(usize, Fetched)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(uri) = uris.get(i) else { break done };
                        done.push((i, client.fetch(uri)));
                    }
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("fetch worker panicked")).collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    indexed.into_iter().map(|(_, r)| r).collect()
}
