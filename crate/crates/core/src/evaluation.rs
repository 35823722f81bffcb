//! Precision/recall scoring and corpus-growth statistics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::corpus::Document;
use crate::extract::{AnalyzedDocument, ContextKey, ExampleSet};
use crate::query::LearningExample;
use crate::recognizer::Annotation;
use crate::token::Span;
use crate::weighting::WeightConfig;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GoldAnnotation {
    pub doc: String,
    pub span: Span,
    pub class_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoldError {
    #[error("gold spans {first:?} and {second:?} of class {class:?} overlap in document {doc:?}")]
    Overlap { doc: String, class: String, first: Span, second: Span },
}

/// Reference annotations. Spans of one class never overlap within a document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldCorpus {
    annotations: Vec<GoldAnnotation>,
}

impl GoldCorpus {
    pub fn new(mut annotations: Vec<GoldAnnotation>) -> Result<Self, GoldError> {
        annotations.sort_by(|a, b| (&a.doc, &a.class_label, a.span).cmp(&(&b.doc, &b.class_label, b.span)));
        for pair in annotations.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.doc == b.doc && a.class_label == b.class_label && a.span.overlaps(&b.span) {
                return Err(GoldError::Overlap {
                    doc: a.doc.clone(),
                    class: a.class_label.clone(),
                    first: a.span,
                    second: b.span,
                });
            }
        }
        Ok(GoldCorpus { annotations })
    }

    pub fn annotations(&self) -> &[GoldAnnotation] {
        &self.annotations
    }

    pub fn len(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty()
    }
}

/// Exact-span scores. A ratio with a zero denominator is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl EvalReport {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        EvalReport {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
        }
    }
}

/// Scores system output against gold annotations.
///
/// A system annotation counts as found unless its class is `unknown`; it is
/// correct when a gold annotation has the same document, span and class.
/// Matching is one-to-one, so duplicated system output is not credited twice.
pub fn evaluate(system: &[Annotation], gold: &GoldCorpus) -> EvalReport {
    let mut remaining: BTreeMap<(&str, Span, &str), u64> = BTreeMap::new();
    for g in gold.annotations() {
        *remaining.entry((g.doc.as_str(), g.span, g.class_label.as_str())).or_default() += 1;
    }
    let mut found = 0;
    let mut tp = 0;
    for a in system.iter().filter(|a| a.decision.is_known()) {
        found += 1;
        if let Some(n) = remaining.get_mut(&(a.doc.as_str(), a.span, a.decision.label())) {
            if *n > 0 {
                *n -= 1;
                tp += 1;
            }
        }
    }
    EvalReport::from_counts(tp, found - tp, gold.len() as u64 - tp)
}

/// Corpus statistics after the first `doc_count` documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthPoint {
    pub doc_count: usize,
    /// Instance occurrences that have a context.
    pub example_occurrences: u64,
    /// Distinct contexts with at least `min_count` occurrences.
    pub context_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("step sizes must be strictly increasing ({previous} is followed by {next})")]
    NotIncreasing { previous: usize, next: usize },
    #[error("step {step} exceeds the corpus size {size}")]
    StepTooLarge { step: usize, size: usize },
    #[error("context length must be at least 1")]
    ZeroContextLength,
}

/// Context statistics over growing prefixes of `docs` (in the given order).
pub fn growth_curve(
    docs: &[Document],
    examples: &[LearningExample],
    steps: &[usize],
    config: &WeightConfig,
) -> Result<Vec<GrowthPoint>, GrowthError> {
    if config.context.length == 0 {
        return Err(GrowthError::ZeroContextLength);
    }
    for pair in steps.windows(2) {
        if pair[1] <= pair[0] {
            return Err(GrowthError::NotIncreasing { previous: pair[0], next: pair[1] });
        }
    }
    if let Some(&step) = steps.iter().find(|&&s| s > docs.len()) {
        return Err(GrowthError::StepTooLarge { step, size: docs.len() });
    }

    let example_set = ExampleSet::new(examples);
    let min_count = config.min_count.max(1);
    let mut counts: BTreeMap<ContextKey, u64> = BTreeMap::new();
    let mut occurrences = 0;
    let mut processed = 0;
    let mut points = Vec::with_capacity(steps.len());
    for &step in steps {
        for doc in &docs[processed..step] {
            let analyzed = AnalyzedDocument::new(&doc.clean, &example_set);
            for (key, _) in analyzed.contexts(config.context) {
                *counts.entry(key).or_default() += 1;
                occurrences += 1;
            }
        }
        processed = step;
        points.push(GrowthPoint {
            doc_count: step,
            example_occurrences: occurrences,
            context_count: counts.values().filter(|&&n| n >= min_count).count(),
        });
    }
    Ok(points)
}
