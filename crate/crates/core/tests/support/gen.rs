//! Random corpora for property tests.

#![allow(dead_code)]

use nerctx_core::{Document, DocumentKind, LearningExample};
use proptest::prelude::*;

pub const WORDS: &[&str] = &[
    "in", "of", "to", "the", "visit", "map", "Hotels", "hotels", "Map", "Visit", "near", "and", "Mr.", "York", "New",
];
pub const SURFACES: &[&str] = &["Paris", "Tunis", "New York", "York", "Cairo", "Nicolas Sarkozy", "Sarkozy"];
pub const PUNCT: &[&str] = &[".", ",", "!", "?"];

#[derive(Debug, Clone)]
pub enum Atom {
    Word(usize),
    Surface(usize),
    Punct(usize),
}

fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        6 => (0..WORDS.len()).prop_map(Atom::Word),
        3 => (0..SURFACES.len()).prop_map(Atom::Surface),
        1 => (0..PUNCT.len()).prop_map(Atom::Punct),
    ]
}

pub fn render(atoms: &[Atom]) -> String {
    let mut out = String::new();
    for a in atoms {
        match a {
            Atom::Punct(p) => out.push_str(PUNCT[*p]),
            Atom::Word(w) => {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(WORDS[*w]);
            }
            Atom::Surface(s) => {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(SURFACES[*s]);
            }
        }
    }
    out
}

pub fn make_docs(texts: &[(String, usize)]) -> Vec<Document> {
    texts
        .iter()
        .enumerate()
        .map(|(i, (t, host))| {
            Document::from_raw(
                &format!("doc{i:03}"),
                &format!("http://host{host}.example/page{i}"),
                t.as_bytes(),
                DocumentKind::Plain,
            )
            .unwrap()
        })
        .collect()
}

/// Up to 10 documents of up to 25 atoms each, drawn from 4 hosts. An atom is
/// at most two tokens, so a corpus never exceeds 500 tokens.
pub fn corpus() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec((prop::collection::vec(atom(), 0..=25), 0usize..4), 1..=10)
        .prop_map(|docs| make_docs(&docs.into_iter().map(|(a, h)| (render(&a), h)).collect::<Vec<_>>()))
}

/// A non-empty subset of the seed surfaces, all of one class.
pub fn examples() -> impl Strategy<Value = Vec<LearningExample>> {
    prop::sample::subsequence((0..SURFACES.len()).collect::<Vec<_>>(), 1..=SURFACES.len())
        .prop_map(|ids| ids.into_iter().map(|i| LearningExample::new(SURFACES[i], "city").unwrap()).collect())
}
