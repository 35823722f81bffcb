//! Learning which word contexts announce a named-entity class, and using them
//! to recognize entities in new text.
//!
//! The pipeline has three stages:
//!
//! 1. A corpus of [`Document`]s is gathered for a set of seed
//!    [`LearningExample`]s (see [`query`] for the search side; fetching lives
//!    in the `nerctx` companion crate).
//! 2. [`extract`] tokenizes every document, finds seed instances and the
//!    n-word contexts next to them, and [`weighting`] turns the raw counts into
//!    a ranked [`WeightTable`].
//! 3. [`recognizer`] reads unseen text, accumulates per-class votes from
//!    matching contexts and decides by threshold and margin. [`evaluation`]
//!    scores the output against gold spans.
//!
//! The crate is `no_std` and only needs `alloc`. All collections are ordered
//! (`BTreeMap`/`BTreeSet`) so every result is deterministic.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clean;
pub mod corpus;
pub mod evaluation;
pub mod extract;
pub mod query;
pub mod recognizer;
pub mod token;
pub mod weighting;

pub use clean::{clean_text, CleanError};
pub use corpus::{normalize_source, CorpusManifest, Document, DocumentKind, ManifestError, SourceError, SourceId};
pub use evaluation::{evaluate, growth_curve, EvalReport, GoldAnnotation, GoldCorpus, GrowthError, GrowthPoint};
pub use extract::{
    extract_context, find_instances, scan_context_occurrences, AnalyzedDocument, ContextConfig, ContextKey,
    ContextOccurrence, ExampleSet, InstanceOccurrence, Side,
};
pub use query::{build_queries, LearningExample, LinkResult, SearchQuery};
pub use recognizer::{classify, detect_candidates, recognize_document, Annotation, Decision, RecognitionModel, VoteState};
pub use token::{tokenize, Span, Token};
pub use weighting::{build_weight_table, ContextStats, GlobalStats, WeightConfig, WeightError, WeightTable, WeightedContext};
