//! Vote-based recognition of entities in unseen text.
//!
//! Every phrase that sits next to a known context becomes a candidate. Each
//! context around the candidate adds its class-specific weight to that
//! class's vote, and the candidate is labelled with the leading class when
//! the vote clears the threshold and beats the runner-up by the margin.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::corpus::Document;
use crate::extract::{window_is_context, ContextKey, Side};
use crate::token::{tokenize, Span, Token};

pub const UNKNOWN_LABEL: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("class label must be non-empty and must not be {UNKNOWN_LABEL:?}: {0:?}")]
    InvalidLabel(String),
    #[error("class {0:?} is already present")]
    DuplicateClass(String),
    #[error("class {class:?}: context {context:?} has non-positive weight {weight}")]
    InvalidWeight { class: String, context: String, weight: f64 },
    #[error("threshold must be a finite non-negative number, got {0}")]
    InvalidThreshold(f64),
    #[error("margin must be a finite non-negative number, got {0}")]
    InvalidMargin(f64),
    #[error("max_entity_tokens must be at least 1")]
    ZeroEntityTokens,
}

/// Per-class context weights plus the decision parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionModel {
    tables: BTreeMap<String, BTreeMap<ContextKey, f64>>,
    threshold: f64,
    margin: f64,
    max_entity_tokens: usize,
}

impl Default for RecognitionModel {
    fn default() -> Self {
        RecognitionModel { tables: BTreeMap::new(), threshold: 0.0, margin: 0.0, max_entity_tokens: 4 }
    }
}

impl RecognitionModel {
    pub fn new(threshold: f64, margin: f64, max_entity_tokens: usize) -> Result<Self, ModelError> {
        if !(threshold.is_finite() && threshold >= 0.0) {
            return Err(ModelError::InvalidThreshold(threshold));
        }
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(ModelError::InvalidMargin(margin));
        }
        if max_entity_tokens == 0 {
            return Err(ModelError::ZeroEntityTokens);
        }
        Ok(RecognitionModel { tables: BTreeMap::new(), threshold, margin, max_entity_tokens })
    }

    pub fn add_class(&mut self, label: &str, weights: BTreeMap<ContextKey, f64>) -> Result<(), ModelError> {
        let label = label.trim();
        if label.is_empty() || label == UNKNOWN_LABEL {
            return Err(ModelError::InvalidLabel(label.to_string()));
        }
        if self.tables.contains_key(label) {
            return Err(ModelError::DuplicateClass(label.to_string()));
        }
        if let Some((context, &weight)) = weights.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(ModelError::InvalidWeight { class: label.to_string(), context: context.to_string(), weight });
        }
        self.tables.insert(label.to_string(), weights);
        Ok(())
    }

    pub fn with_class(mut self, label: &str, weights: BTreeMap<ContextKey, f64>) -> Result<Self, ModelError> {
        self.add_class(label, weights)?;
        Ok(self)
    }

    pub fn tables(&self) -> &BTreeMap<String, BTreeMap<ContextKey, f64>> {
        &self.tables
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn max_entity_tokens(&self) -> usize {
        self.max_entity_tokens
    }

    /// Every context in any table, grouped by (side, length).
    fn context_groups(&self) -> BTreeMap<(Side, usize), BTreeSet<&str>> {
        let mut groups: BTreeMap<(Side, usize), BTreeSet<&str>> = BTreeMap::new();
        for key in self.tables.values().flat_map(|t| t.keys()) {
            groups.entry((key.side(), key.len())).or_default().insert(key.as_str());
        }
        groups
    }
}

/// Accumulated votes, with the contributions that produced them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VoteState {
    votes: BTreeMap<String, f64>,
    contributions: BTreeMap<String, Vec<(ContextKey, f64)>>,
}

impl VoteState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `weight` to `class`'s vote.
    ///
    /// # Panics
    ///
    /// If `weight` is not a positive finite number.
    pub fn vote(&mut self, class: &str, context: ContextKey, weight: f64) {
        assert!(weight.is_finite() && weight > 0.0, "vote weight must be positive, got {weight}");
        *self.votes.entry(class.to_string()).or_insert(0.0) += weight;
        self.contributions.entry(class.to_string()).or_default().push((context, weight));
    }

    pub fn votes(&self) -> &BTreeMap<String, f64> {
        &self.votes
    }

    pub fn get(&self, class: &str) -> f64 {
        self.votes.get(class).copied().unwrap_or(0.0)
    }

    pub fn contributions(&self, class: &str) -> &[(ContextKey, f64)] {
        self.contributions.get(class).map_or(&[], Vec::as_slice)
    }

    /// Best and second-best vote values (0 when absent).
    pub fn top_two(&self) -> (f64, f64) {
        let mut best = 0.0_f64;
        let mut second = 0.0_f64;
        for &v in self.votes.values() {
            if v > best {
                second = best;
                best = v;
            } else if v > second {
                second = v;
            }
        }
        (best, second)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decision {
    Class(String),
    Unknown,
}

impl Decision {
    pub fn label(&self) -> &str {
        match self {
            Decision::Class(c) => c,
            Decision::Unknown => UNKNOWN_LABEL,
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, Decision::Class(_))
    }

    pub fn from_label(label: &str) -> Self {
        if label == UNKNOWN_LABEL {
            Decision::Unknown
        } else {
            Decision::Class(label.to_string())
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The leading class when its vote reaches `threshold` and exceeds every
/// other class by at least `margin`. A tie for first place is `Unknown`.
pub fn classify(state: &VoteState, threshold: f64, margin: f64) -> Decision {
    let mut ranked: Vec<(&String, f64)> = state.votes.iter().map(|(c, &v)| (c, v)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    let Some(&(leader, best)) = ranked.first() else {
        return Decision::Unknown;
    };
    let second = ranked.get(1).map_or(0.0, |r| r.1);
    if ranked.len() > 1 && second == best {
        return Decision::Unknown;
    }
    if best >= threshold && best - second >= margin {
        Decision::Class(leader.clone())
    } else {
        Decision::Unknown
    }
}

fn starts_lowercase(token: &Token<'_>) -> bool {
    token.text.chars().next().is_some_and(char::is_lowercase)
}

fn window_text(tokens: &[Token<'_>], start: usize, length: usize, buf: &mut String) {
    buf.clear();
    for (i, t) in tokens[start..start + length].iter().enumerate() {
        if i > 0 {
            buf.push(' ');
        }
        buf.push_str(t.text);
    }
}

/// The phrase a matched context points at: up to `max` tokens starting at
/// `anchor` and growing away from the context, stopping at a sentence
/// boundary or a lowercase-initial token.
fn candidate_from(tokens: &[Token<'_>], anchor: usize, side: Side, max: usize) -> Span {
    match side {
        Side::Left => {
            let mut last = anchor;
            while last + 1 < tokens.len()
                && last + 1 - anchor < max
                && !tokens[last].ends_sentence
                && !starts_lowercase(&tokens[last + 1])
            {
                last += 1;
            }
            Span::new(anchor, last)
        }
        Side::Right => {
            let mut first = anchor;
            while first >= 1
                && anchor - first + 1 < max
                && !tokens[first - 1].ends_sentence
                && !starts_lowercase(&tokens[first - 1])
            {
                first -= 1;
            }
            Span::new(first, anchor)
        }
    }
}

/// Spans adjacent to any context of any class table, sorted and deduplicated.
pub fn detect_candidates(tokens: &[Token<'_>], model: &RecognitionModel) -> Vec<Span> {
    let groups = model.context_groups();
    let mut spans = BTreeSet::new();
    let mut buf = String::new();
    for start in 0..tokens.len() {
        for (&(side, length), keys) in &groups {
            if !window_is_context(tokens, start, length, side) {
                continue;
            }
            window_text(tokens, start, length, &mut buf);
            if keys.contains(buf.as_str()) {
                let anchor = match side {
                    Side::Left => start + length,
                    Side::Right => start - 1,
                };
                spans.insert(candidate_from(tokens, anchor, side, model.max_entity_tokens));
            }
        }
    }
    spans.into_iter().collect()
}

/// Votes from every context adjacent to `span`, one per matching context per
/// class table.
pub fn collect_votes(tokens: &[Token<'_>], span: Span, model: &RecognitionModel) -> VoteState {
    let mut state = VoteState::new();
    let mut lengths: BTreeSet<(Side, usize)> = BTreeSet::new();
    for key in model.tables.values().flat_map(|t| t.keys()) {
        lengths.insert((key.side(), key.len()));
    }
    for (side, length) in lengths {
        let start = match side {
            Side::Left => match span.first.checked_sub(length) {
                Some(s) => s,
                None => continue,
            },
            Side::Right => span.last + 1,
        };
        if !window_is_context(tokens, start, length, side) {
            continue;
        }
        let Some(key) = ContextKey::new(tokens[start..start + length].iter().map(|t| t.text), side) else {
            continue;
        };
        for (class, table) in &model.tables {
            if let Some(&w) = table.get(&key) {
                state.vote(class, key.clone(), w);
            }
        }
    }
    state
}

/// One recognized (or undecided) entity phrase.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub doc: String,
    pub span: Span,
    pub surface: String,
    pub decision: Decision,
    /// The leading vote.
    pub score: f64,
    /// The second-best vote, 0 when only one class voted.
    pub runner_up: f64,
}

/// Annotates clean text.
pub fn recognize_text(doc: &str, text: &str, model: &RecognitionModel) -> Vec<Annotation> {
    let tokens = tokenize(text);
    detect_candidates(&tokens, model)
        .into_iter()
        .map(|span| {
            let state = collect_votes(&tokens, span, model);
            let (score, runner_up) = state.top_two();
            Annotation {
                doc: doc.to_string(),
                span,
                surface: text[tokens[span.first].start..tokens[span.last].end].to_string(),
                decision: classify(&state, model.threshold, model.margin),
                score,
                runner_up,
            }
        })
        .collect()
}

/// Annotates a document's clean text; results are sorted by span.
pub fn recognize_document(doc: &Document, model: &RecognitionModel) -> Vec<Annotation> {
    recognize_text(&doc.id, &doc.clean, model)
}
