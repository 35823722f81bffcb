//! Context statistics and weights.
//!
//! For every context the corpus yields five raw counts:
//!
//! | field               | meaning                                                        |
//! |---------------------|----------------------------------------------------------------|
//! | `example_hits`      | occurrences right next to a learning-example instance          |
//! | `other_hits`        | occurrences next to any other phrase                           |
//! | `distinct_examples` | distinct learning examples seen next to the context            |
//! | `documents`         | documents in which the context occurs                          |
//! | `distinct_sources`  | distinct sources among those documents                         |
//!
//! and the weight is the product of four ratios:
//!
//! ```text
//! cf  = example_hits / total example hits over all contexts
//! lef = distinct_examples / number of learning examples
//! df  = distinct_sources / documents
//! icf = example_hits / max(other_hits, 1)
//! w   = cf * lef * df * icf
//! ```
//!
//! The classic `tf`, `idf` and `tf * idf` are provided as a baseline.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::corpus::{Document, SourceId};
use crate::extract::{visit_context_occurrences, AnalyzedDocument, ContextConfig, ContextKey, ExampleSet};
use crate::query::LearningExample;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("no contexts were extracted; check that the learning examples actually occur in the corpus")]
    EmptyExtraction,
    #[error("the corpus has no documents")]
    EmptyCorpus,
    #[error("no learning examples given")]
    NoLearningExamples,
    #[error("learning examples belong to several classes ({0:?} and {1:?})")]
    MixedClasses(String, String),
    #[error("context length must be at least 1")]
    ZeroContextLength,
    #[error("context is not contained in any document")]
    NoContainingDocuments,
    #[error("context has no occurrences next to learning examples")]
    ZeroContextCount,
    #[error("document has no terms")]
    ZeroDocumentTotal,
    #[error("term occurs in no document")]
    ZeroTermDocuments,
    #[error("{what}: count {count} exceeds total {total}")]
    CountExceedsTotal { what: &'static str, count: u64, total: u64 },
}

fn ratio(what: &'static str, count: u64, total: u64) -> Result<f64, WeightError> {
    if count > total {
        return Err(WeightError::CountExceedsTotal { what, count, total });
    }
    Ok(count as f64 / total as f64)
}

/// Share of all example-adjacent context occurrences taken by one context.
pub fn context_frequency(example_hits: u64, total_example_hits: u64) -> Result<f64, WeightError> {
    if total_example_hits == 0 {
        return Err(WeightError::EmptyExtraction);
    }
    ratio("context frequency", example_hits, total_example_hits)
}

/// Fraction of the learning examples seen with the context.
pub fn learning_example_frequency(distinct_examples: u64, learning_examples: u64) -> Result<f64, WeightError> {
    if learning_examples == 0 {
        return Err(WeightError::NoLearningExamples);
    }
    ratio("learning example frequency", distinct_examples, learning_examples)
}

/// Fraction of the context's documents that come from distinct sources.
pub fn document_frequency(distinct_sources: u64, documents: u64) -> Result<f64, WeightError> {
    if documents == 0 {
        return Err(WeightError::NoContainingDocuments);
    }
    ratio("document frequency", distinct_sources, documents)
}

/// Example-adjacent over other-phrase-adjacent occurrences. The denominator
/// is floored at 1 so contexts never seen elsewhere keep a finite value.
pub fn inverse_context_frequency(example_hits: u64, other_hits: u64) -> Result<f64, WeightError> {
    if example_hits == 0 {
        return Err(WeightError::ZeroContextCount);
    }
    Ok(example_hits as f64 / other_hits.max(1) as f64)
}

pub fn context_weight(cf: f64, lef: f64, df: f64, icf: f64) -> f64 {
    cf * lef * df * icf
}

/// Term frequency within one document.
pub fn tf(frequency: u64, doc_total: u64) -> Result<f64, WeightError> {
    if doc_total == 0 {
        return Err(WeightError::ZeroDocumentTotal);
    }
    ratio("term frequency", frequency, doc_total)
}

/// `log10(documents / documents_with_term)`.
pub fn idf(documents: u64, documents_with_term: u64) -> Result<f64, WeightError> {
    if documents_with_term == 0 {
        return Err(WeightError::ZeroTermDocuments);
    }
    if documents_with_term > documents {
        return Err(WeightError::CountExceedsTotal { what: "idf", count: documents_with_term, total: documents });
    }
    Ok(libm::log10(documents as f64 / documents_with_term as f64))
}

pub fn tfidf(tf: f64, idf: f64) -> f64 {
    tf * idf
}

/// Raw counts of one term for the tf-idf baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TfIdfStats {
    pub frequency: u64,
    pub doc_total: u64,
    pub documents: u64,
    pub documents_with_term: u64,
}

impl TfIdfStats {
    pub fn weight(&self) -> Result<f64, WeightError> {
        Ok(tfidf(tf(self.frequency, self.doc_total)?, idf(self.documents, self.documents_with_term)?))
    }
}

/// Raw counts for one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextStats {
    pub context: ContextKey,
    pub example_hits: u64,
    pub other_hits: u64,
    pub distinct_examples: u64,
    pub distinct_sources: u64,
    pub documents: u64,
}

/// Corpus-wide quantities shared by every row of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalStats {
    /// Example-adjacent occurrences summed over every extracted context,
    /// before any `min_count` filtering.
    pub total_example_hits: u64,
    pub learning_examples: u64,
    pub class_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedContext {
    pub stats: ContextStats,
    pub cf: f64,
    pub lef: f64,
    pub df: f64,
    pub icf: f64,
    pub w: f64,
}

impl WeightedContext {
    pub fn new(stats: ContextStats, global: &GlobalStats) -> Result<Self, WeightError> {
        let cf = context_frequency(stats.example_hits, global.total_example_hits)?;
        let lef = learning_example_frequency(stats.distinct_examples, global.learning_examples)?;
        let df = document_frequency(stats.distinct_sources, stats.documents)?;
        let icf = inverse_context_frequency(stats.example_hits, stats.other_hits)?;
        Ok(WeightedContext { stats, cf, lef, df, icf, w: context_weight(cf, lef, df, icf) })
    }

    pub fn context(&self) -> &ContextKey {
        &self.stats.context
    }
}

/// Weight descending, then example hits descending, then context words.
fn rank_order(a: &WeightedContext, b: &WeightedContext) -> Ordering {
    b.w.total_cmp(&a.w)
        .then(b.stats.example_hits.cmp(&a.stats.example_hits))
        .then_with(|| a.stats.context.cmp(&b.stats.context))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightConfig {
    pub context: ContextConfig,
    /// Contexts with fewer example hits are left out of the table.
    pub min_count: u64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig { context: ContextConfig::default(), min_count: 1 }
    }
}

/// Ranked weights for one entity class.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    rows: Vec<WeightedContext>,
    global: GlobalStats,
}

impl WeightTable {
    /// Weighs and ranks `stats`.
    pub fn from_stats(stats: impl IntoIterator<Item = ContextStats>, global: GlobalStats) -> Result<Self, WeightError> {
        let mut rows = stats.into_iter().map(|s| WeightedContext::new(s, &global)).collect::<Result<Vec<_>, _>>()?;
        rows.sort_by(rank_order);
        Ok(WeightTable { rows, global })
    }

    pub fn rows(&self) -> &[WeightedContext] {
        &self.rows
    }

    pub fn global(&self) -> &GlobalStats {
        &self.global
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, context: &ContextKey) -> Option<&WeightedContext> {
        self.rows.iter().find(|r| r.context() == context)
    }

    /// Context → weight, the form the recognizer consumes.
    pub fn weights(&self) -> BTreeMap<ContextKey, f64> {
        self.rows.iter().map(|r| (r.context().clone(), r.w)).collect()
    }
}

/// Raw context counts over a set of documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextCensus {
    pub stats: BTreeMap<ContextKey, ContextStats>,
    pub total_example_hits: u64,
}

#[derive(Default)]
struct Tally<'a> {
    example_hits: u64,
    other_hits: u64,
    examples: BTreeSet<usize>,
    documents: BTreeSet<usize>,
    sources: BTreeSet<&'a SourceId>,
}

impl ContextCensus {
    /// Extracts contexts around every instance, then counts every place
    /// those contexts occur in the corpus.
    pub fn take(docs: &[Document], examples: &ExampleSet, config: ContextConfig) -> Self {
        let analyzed: Vec<AnalyzedDocument<'_>> = docs.iter().map(|d| AnalyzedDocument::new(&d.clean, examples)).collect();
        let contexts: BTreeSet<ContextKey> =
            analyzed.iter().flat_map(|d| d.contexts(config).map(|(k, _)| k)).collect();

        let mut tallies: BTreeMap<&ContextKey, Tally<'_>> = BTreeMap::new();
        visit_context_occurrences(&analyzed, &contexts, |doc, key, _anchor, example| {
            let t = tallies.entry(key).or_default();
            match example {
                Some(e) => {
                    t.example_hits += 1;
                    t.examples.insert(e);
                }
                None => t.other_hits += 1,
            }
            t.documents.insert(doc);
            t.sources.insert(&docs[doc].source);
        });

        let mut census = ContextCensus::default();
        for (key, t) in tallies {
            census.total_example_hits += t.example_hits;
            census.stats.insert(
                key.clone(),
                ContextStats {
                    context: key.clone(),
                    example_hits: t.example_hits,
                    other_hits: t.other_hits,
                    distinct_examples: t.examples.len() as u64,
                    distinct_sources: t.sources.len() as u64,
                    documents: t.documents.len() as u64,
                },
            );
        }
        census
    }

    /// Contexts with at least `min_count` example hits.
    pub fn retained(&self, min_count: u64) -> impl Iterator<Item = &ContextStats> {
        self.stats.values().filter(move |s| s.example_hits >= min_count.max(1))
    }
}

/// The single class label shared by `examples`.
pub(crate) fn class_of(examples: &[LearningExample]) -> Result<&str, WeightError> {
    let first = examples.first().ok_or(WeightError::NoLearningExamples)?.class_label();
    match examples.iter().find(|e| e.class_label() != first) {
        Some(other) => Err(WeightError::MixedClasses(first.to_string(), other.class_label().to_string())),
        None => Ok(first),
    }
}

/// Builds the ranked weight table for one class.
pub fn build_weight_table(
    docs: &[Document],
    examples: &[LearningExample],
    config: &WeightConfig,
) -> Result<WeightTable, WeightError> {
    if docs.is_empty() {
        return Err(WeightError::EmptyCorpus);
    }
    if config.context.length == 0 {
        return Err(WeightError::ZeroContextLength);
    }
    let class_label = class_of(examples)?.to_string();
    let example_set = ExampleSet::new(examples);
    let census = ContextCensus::take(docs, &example_set, config.context);
    if census.total_example_hits == 0 {
        return Err(WeightError::EmptyExtraction);
    }
    let global = GlobalStats {
        total_example_hits: census.total_example_hits,
        learning_examples: example_set.len() as u64,
        class_label,
    };
    let table = WeightTable::from_stats(census.retained(config.min_count).cloned(), global)?;
    if table.is_empty() {
        return Err(WeightError::EmptyExtraction);
    }
    Ok(table)
}
