//! Finding seed instances in text and the word contexts around them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::query::LearningExample;
use crate::token::{tokenize, Span, Token};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    #[default]
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(alloc::format!("unknown side {other:?} (expected left or right)")),
        }
    }
}

/// A case-sensitive word sequence on one side of an entity.
///
/// Words are stored joined by single spaces; ordering is lexicographic over
/// the words, then side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextKey {
    text: String,
    side: Side,
    len: usize,
}

impl ContextKey {
    /// Returns `None` if `words` is empty or any word is empty or contains
    /// whitespace.
    pub fn new<'a>(words: impl IntoIterator<Item = &'a str>, side: Side) -> Option<Self> {
        let mut text = String::new();
        let mut len = 0;
        for w in words {
            if w.is_empty() || w.contains(char::is_whitespace) {
                return None;
            }
            if len > 0 {
                text.push(' ');
            }
            text.push_str(w);
            len += 1;
        }
        (len > 0).then_some(ContextKey { text, side, len })
    }

    /// Parses space-separated words.
    pub fn parse(words: &str, side: Side) -> Option<Self> {
        ContextKey::new(words.split_whitespace(), side)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.text.split(' ')
    }

    /// The words joined by single spaces.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Display for ContextKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextConfig {
    pub length: usize,
    pub side: Side,
}

impl Default for ContextConfig {
    fn default() -> Self {
        ContextConfig { length: 2, side: Side::Left }
    }
}

/// Distinct learning examples, indexed for longest-match lookup.
#[derive(Debug, Clone)]
pub struct ExampleSet {
    examples: Vec<LearningExample>,
    // first word -> example indices, longest surface first
    by_first: BTreeMap<String, Vec<usize>>,
    word_counts: Vec<usize>,
}

impl ExampleSet {
    /// Keeps the first example of every distinct surface form.
    pub fn new(examples: &[LearningExample]) -> Self {
        let mut seen = BTreeSet::new();
        let examples: Vec<LearningExample> =
            examples.iter().filter(|e| seen.insert(e.surface().to_string())).cloned().collect();
        let word_counts: Vec<usize> = examples.iter().map(|e| e.words().count()).collect();
        let mut by_first: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, e) in examples.iter().enumerate() {
            let first = e.words().next().unwrap_or_default();
            by_first.entry(first.to_string()).or_default().push(i);
        }
        for ids in by_first.values_mut() {
            ids.sort_by(|&a, &b| word_counts[b].cmp(&word_counts[a]).then(a.cmp(&b)));
        }
        ExampleSet { examples, by_first, word_counts }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn get(&self, index: usize) -> &LearningExample {
        &self.examples[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &LearningExample> {
        self.examples.iter()
    }
}

/// An example surface matched in a token stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct InstanceOccurrence {
    /// Index into the [`ExampleSet`].
    pub example: usize,
    pub span: Span,
}

/// Left-to-right, longest-match-first, non-overlapping instance matching.
/// Case-sensitive; a match never spans a sentence boundary.
pub fn find_instances(tokens: &[Token<'_>], examples: &ExampleSet) -> Vec<InstanceOccurrence> {
    let mut found = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let hit = examples.by_first.get(tokens[i].text).and_then(|ids| {
            ids.iter().copied().find(|&id| {
                let n = examples.word_counts[id];
                i + n <= tokens.len()
                    && examples.examples[id].words().zip(&tokens[i..i + n]).all(|(w, t)| w == t.text)
                    && tokens[i..i + n - 1].iter().all(|t| !t.ends_sentence)
            })
        });
        match hit {
            Some(id) => {
                let n = examples.word_counts[id];
                found.push(InstanceOccurrence { example: id, span: Span::new(i, i + n - 1) });
                i += n;
            }
            None => i += 1,
        }
    }
    found
}

/// Whether the `length` tokens starting at `start` form a usable context on
/// `side`: the neighbouring phrase exists and no sentence boundary falls
/// inside the window or between it and that phrase.
pub(crate) fn window_is_context(tokens: &[Token<'_>], start: usize, length: usize, side: Side) -> bool {
    if length == 0 || start + length > tokens.len() {
        return false;
    }
    match side {
        Side::Left => {
            start + length < tokens.len() && tokens[start..start + length].iter().all(|t| !t.ends_sentence)
        }
        Side::Right => start >= 1 && tokens[start - 1..start + length - 1].iter().all(|t| !t.ends_sentence),
    }
}

/// Token index of the phrase next to a context window.
fn anchor_of(start: usize, length: usize, side: Side) -> usize {
    match side {
        Side::Left => start + length,
        Side::Right => start - 1,
    }
}

/// The `length` words immediately on `side` of an occurrence, if they exist
/// within the same sentence.
pub fn extract_context(
    occurrence: &InstanceOccurrence,
    tokens: &[Token<'_>],
    length: usize,
    side: Side,
) -> Option<ContextKey> {
    let start = match side {
        Side::Left => occurrence.span.first.checked_sub(length)?,
        Side::Right => occurrence.span.last + 1,
    };
    if !window_is_context(tokens, start, length, side) {
        return None;
    }
    ContextKey::new(tokens[start..start + length].iter().map(|t| t.text), side)
}

/// A document's tokens and the instances found in them.
#[derive(Debug, Clone)]
pub struct AnalyzedDocument<'a> {
    pub tokens: Vec<Token<'a>>,
    pub instances: Vec<InstanceOccurrence>,
}

impl<'a> AnalyzedDocument<'a> {
    pub fn new(text: &'a str, examples: &ExampleSet) -> Self {
        let tokens = tokenize(text);
        let instances = find_instances(&tokens, examples);
        AnalyzedDocument { tokens, instances }
    }

    /// Every defined context of every instance, in token order.
    pub fn contexts(&self, config: ContextConfig) -> impl Iterator<Item = (ContextKey, &InstanceOccurrence)> + '_ {
        self.instances
            .iter()
            .filter_map(move |o| extract_context(o, &self.tokens, config.length, config.side).map(|k| (k, o)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextOccurrence {
    pub context: ContextKey,
    /// Index of the document in the scanned slice.
    pub doc: usize,
    /// Token index of the phrase next to the context.
    pub anchor: usize,
    /// The instance next to the context, when the phrase is a learning
    /// example (index into the [`ExampleSet`]).
    pub example: Option<usize>,
}

impl ContextOccurrence {
    pub fn with_example(&self) -> bool {
        self.example.is_some()
    }
}

/// Calls `visit(doc, key, anchor, example)` for every place where one of
/// `contexts` appears next to some phrase, documents in slice order and
/// positions in token order.
pub(crate) fn visit_context_occurrences<'k, F>(
    docs: &[AnalyzedDocument<'_>],
    contexts: &'k BTreeSet<ContextKey>,
    mut visit: F,
) where
    F: FnMut(usize, &'k ContextKey, usize, Option<usize>),
{
    let mut groups: BTreeMap<(Side, usize), BTreeMap<&str, &'k ContextKey>> = BTreeMap::new();
    for key in contexts {
        groups.entry((key.side(), key.len())).or_default().insert(key.as_str(), key);
    }
    let mut window = String::new();
    for (doc_index, doc) in docs.iter().enumerate() {
        let n = doc.tokens.len();
        // Instance lookup by the token that touches a context on each side.
        let mut by_first = vec![None; n];
        let mut by_last = vec![None; n];
        for o in &doc.instances {
            by_first[o.span.first] = Some(o.example);
            by_last[o.span.last] = Some(o.example);
        }
        for start in 0..n {
            for (&(side, length), keys) in &groups {
                if !window_is_context(&doc.tokens, start, length, side) {
                    continue;
                }
                window.clear();
                for (i, t) in doc.tokens[start..start + length].iter().enumerate() {
                    if i > 0 {
                        window.push(' ');
                    }
                    window.push_str(t.text);
                }
                if let Some(key) = keys.get(window.as_str()) {
                    let anchor = anchor_of(start, length, side);
                    let example = match side {
                        Side::Left => by_first[anchor],
                        Side::Right => by_last[anchor],
                    };
                    visit(doc_index, key, anchor, example);
                }
            }
        }
    }
}

/// Every occurrence of the given contexts across `docs`, flagged by whether
/// the adjacent phrase is a learning-example instance.
pub fn scan_context_occurrences(
    docs: &[AnalyzedDocument<'_>],
    contexts: &BTreeSet<ContextKey>,
) -> Vec<ContextOccurrence> {
    let mut out = Vec::new();
    visit_context_occurrences(docs, contexts, |doc, key, anchor, example| {
        out.push(ContextOccurrence { context: key.clone(), doc, anchor, example });
    });
    out
}
