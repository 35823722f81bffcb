//! Seed examples and the search queries built from them.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// One surface form of an entity class, e.g. `"Paris"` for `capital`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LearningExample {
    surface: String,
    class_label: String,
}

impl LearningExample {
    /// Trims the surface and collapses inner whitespace. Returns `None` for
    /// an empty surface.
    pub fn new(surface: &str, class_label: &str) -> Option<Self> {
        let surface = surface.split_whitespace().collect::<Vec<_>>().join(" ");
        if surface.is_empty() {
            return None;
        }
        Some(LearningExample { surface, class_label: class_label.trim().to_string() })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn class_label(&self) -> &str {
        &self.class_label
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.surface.split(' ')
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchQuery {
    pub instance: String,
    pub max_results: usize,
    /// Extra text appended to the instance. Unused unless set explicitly.
    pub suffix: Option<String>,
}

impl SearchQuery {
    /// The string sent to the search backend.
    pub fn query_string(&self) -> String {
        match &self.suffix {
            Some(s) if !s.trim().is_empty() => alloc::format!("{} {}", self.instance, s.trim()),
            _ => self.instance.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkResult {
    pub uri: String,
    /// 1-based position in the result list.
    pub rank: usize,
}

/// One query per distinct surface form, in first-seen order. Returns `None`
/// when there are no examples or `max_results` is zero.
pub fn build_queries(examples: &[LearningExample], max_results: usize) -> Option<Vec<SearchQuery>> {
    if examples.is_empty() || max_results == 0 {
        return None;
    }
    let mut seen = BTreeSet::new();
    Some(
        examples
            .iter()
            .filter(|e| seen.insert(e.surface()))
            .map(|e| SearchQuery { instance: e.surface().to_string(), max_results, suffix: None })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str) -> LearningExample {
        LearningExample::new(s, "capital").unwrap()
    }

    #[test]
    fn one_query_per_instance() {
        let q = build_queries(&[ex("Paris"), ex("Tunis")], 10).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q[1].query_string(), "Tunis");
    }

    #[test]
    fn duplicate_surfaces_collapse() {
        assert_eq!(build_queries(&[ex("Paris"), ex("Paris")], 10).unwrap().len(), 1);
    }

    #[test]
    fn thirteen_capitals() {
        let names = [
            "Paris", "Tunis", "Cairo", "Athens", "Abuja", "Berlin", "Bucharest", "Budapest", "Brasilia", "Freetown",
            "Dublin", "Vienna", "Doha",
        ];
        let examples: Vec<_> = names.iter().map(|n| ex(n)).collect();
        assert_eq!(build_queries(&examples, 50).unwrap().len(), 13);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(build_queries(&[], 10).is_none());
        assert!(build_queries(&[ex("Paris")], 0).is_none());
    }

    #[test]
    fn surfaces_are_trimmed() {
        assert_eq!(ex("  George  W. Bush ").surface(), "George W. Bush");
        assert!(LearningExample::new("   ", "x").is_none());
    }

    #[test]
    fn suffix_extends_query() {
        let q = SearchQuery { instance: "Paris".into(), max_results: 5, suffix: Some("hotels".into()) };
        assert_eq!(q.query_string(), "Paris hotels");
    }
}
