//! Brute-force recount of context statistics.
//!
//! Shares only the tokenizer with the library. Instance matching, context
//! windows, adjacency and all five counts are recomputed here the slow way:
//! every example is tried at every position, and every window of every
//! document is compared word by word against every context.

#![allow(dead_code, clippy::needless_range_loop, clippy::type_complexity)]

use std::collections::{BTreeMap, BTreeSet};

use nerctx_core::{tokenize, Document, LearningExample, Side, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCounts {
    pub example_hits: u64,
    pub other_hits: u64,
    pub distinct_examples: u64,
    pub distinct_sources: u64,
    pub documents: u64,
}

#[derive(Debug, Clone)]
pub struct OracleRow {
    pub words: Vec<String>,
    pub counts: OracleCounts,
    pub cf: f64,
    pub lef: f64,
    pub df: f64,
    pub icf: f64,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub struct OracleTable {
    pub rows: BTreeMap<Vec<String>, OracleRow>,
    pub total_example_hits: u64,
    pub learning_examples: u64,
}

/// (first token, last token, surface) of every instance, longest match first,
/// consumed left to right.
pub fn naive_instances(tokens: &[Token<'_>], surfaces: &[Vec<String>]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut best: Option<(usize, usize)> = None;
        for (s, words) in surfaces.iter().enumerate() {
            let n = words.len();
            if i + n > tokens.len() {
                continue;
            }
            let mut ok = true;
            for k in 0..n {
                if tokens[i + k].text != words[k] {
                    ok = false;
                }
                if k + 1 < n && tokens[i + k].ends_sentence {
                    ok = false;
                }
            }
            if ok && best.is_none_or(|(_, len)| n > len) {
                best = Some((s, n));
            }
        }
        match best {
            Some((s, n)) => {
                out.push((i, i + n - 1, s));
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

/// Window `[start, start+len)` is a context on `side` next to the phrase at
/// the returned anchor, if any.
fn anchor(tokens: &[Token<'_>], start: usize, len: usize, side: Side) -> Option<usize> {
    if start + len > tokens.len() {
        return None;
    }
    match side {
        Side::Left => {
            let a = start + len;
            if a >= tokens.len() {
                return None;
            }
            for t in start..a {
                if tokens[t].ends_sentence {
                    return None;
                }
            }
            Some(a)
        }
        Side::Right => {
            if start == 0 {
                return None;
            }
            let a = start - 1;
            for t in a..start + len - 1 {
                if tokens[t].ends_sentence {
                    return None;
                }
            }
            Some(a)
        }
    }
}

pub fn distinct_surfaces(examples: &[LearningExample]) -> Vec<Vec<String>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in examples {
        if seen.insert(e.surface().to_string()) {
            out.push(e.surface().split(' ').map(str::to_string).collect());
        }
    }
    out
}

/// One context occurrence found by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOccurrence {
    pub doc: usize,
    pub words: Vec<String>,
    pub anchor: usize,
    /// Surface of the adjacent learning example, if the neighbour is one.
    pub example: Option<String>,
}

/// Every occurrence of every extracted context, by document then position.
pub fn oracle_occurrences(docs: &[Document], examples: &[LearningExample], len: usize, side: Side) -> Vec<OracleOccurrence> {
    let surfaces = distinct_surfaces(examples);
    let tokenized: Vec<Vec<Token<'_>>> = docs.iter().map(|d| tokenize(&d.clean)).collect();
    let instances: Vec<Vec<(usize, usize, usize)>> =
        tokenized.iter().map(|t| naive_instances(t, &surfaces)).collect();

    // Contexts: the window touching each instance on `side`.
    let mut contexts: BTreeSet<Vec<String>> = BTreeSet::new();
    for (tokens, inst) in tokenized.iter().zip(&instances) {
        for &(first, last, _) in inst {
            let start = match side {
                Side::Left => match first.checked_sub(len) {
                    Some(s) => s,
                    None => continue,
                },
                Side::Right => last + 1,
            };
            let expected_anchor = match side {
                Side::Left => first,
                Side::Right => last,
            };
            if anchor(tokens, start, len, side) == Some(expected_anchor) {
                contexts.insert(tokens[start..start + len].iter().map(|t| t.text.to_string()).collect());
            }
        }
    }

    let mut out = Vec::new();
    for (d, tokens) in tokenized.iter().enumerate() {
        for start in 0..tokens.len() {
            let Some(a) = anchor(tokens, start, len, side) else { continue };
            for ctx in &contexts {
                if (0..len).all(|k| tokens[start + k].text == ctx[k]) {
                    let adjacent = instances[d].iter().find(|&&(first, last, _)| match side {
                        Side::Left => first == a,
                        Side::Right => last == a,
                    });
                    out.push(OracleOccurrence {
                        doc: d,
                        words: ctx.clone(),
                        anchor: a,
                        example: adjacent.map(|&(_, _, s)| surfaces[s].join(" ")),
                    });
                }
            }
        }
    }
    out
}

/// Raw counts per context, keyed by the context's words.
pub fn oracle_counts(
    docs: &[Document],
    examples: &[LearningExample],
    len: usize,
    side: Side,
) -> BTreeMap<Vec<String>, OracleCounts> {
    let mut hits: BTreeMap<Vec<String>, (u64, u64, BTreeSet<String>, BTreeSet<usize>, BTreeSet<String>)> =
        BTreeMap::new();
    for o in oracle_occurrences(docs, examples, len, side) {
        let e = hits.entry(o.words).or_default();
        match o.example {
            Some(s) => {
                e.0 += 1;
                e.2.insert(s);
            }
            None => e.1 += 1,
        }
        e.3.insert(o.doc);
        e.4.insert(docs[o.doc].source.as_str().to_string());
    }
    hits.into_iter()
        .map(|(k, (nc, c, ex, ds, src))| {
            (
                k,
                OracleCounts {
                    example_hits: nc,
                    other_hits: c,
                    distinct_examples: ex.len() as u64,
                    distinct_sources: src.len() as u64,
                    documents: ds.len() as u64,
                },
            )
        })
        .collect()
}

pub fn oracle_table(docs: &[Document], examples: &[LearningExample], len: usize, side: Side, min_count: u64) -> OracleTable {
    let counts = oracle_counts(docs, examples, len, side);
    let total: u64 = counts.values().map(|c| c.example_hits).sum();
    let nle = distinct_surfaces(examples).len() as u64;
    let rows = counts
        .into_iter()
        .filter(|(_, c)| c.example_hits >= min_count.max(1))
        .map(|(words, c)| {
            let cf = c.example_hits as f64 / total as f64;
            let lef = c.distinct_examples as f64 / nle as f64;
            let df = c.distinct_sources as f64 / c.documents as f64;
            let icf = c.example_hits as f64 / (if c.other_hits == 0 { 1 } else { c.other_hits }) as f64;
            let w = cf * lef * df * icf;
            (words.clone(), OracleRow { words, counts: c, cf, lef, df, icf, w })
        })
        .collect();
    OracleTable { rows, total_example_hits: total, learning_examples: nle }
}

/// Distance in units in the last place between two finite non-negative doubles.
pub fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

/// Builds the library table and the oracle table for the same input and
/// reports the first disagreement. Counts must match exactly, weights within
/// 4 ulps.
pub fn compare_with_library(
    docs: &[Document],
    examples: &[LearningExample],
    len: usize,
    side: Side,
    min_count: u64,
) -> Result<(), String> {
    use nerctx_core::{build_weight_table, ContextConfig, WeightConfig, WeightError};

    let oracle = oracle_table(docs, examples, len, side, min_count);
    let config = WeightConfig { context: ContextConfig { length: len, side }, min_count };
    let table = match build_weight_table(docs, examples, &config) {
        Ok(t) => t,
        Err(WeightError::EmptyExtraction) if oracle.rows.is_empty() => return Ok(()),
        Err(e) => return Err(format!("library failed ({e}) but oracle has {} rows", oracle.rows.len())),
    };
    if table.global().total_example_hits != oracle.total_example_hits {
        return Err(format!("total hits {} vs oracle {}", table.global().total_example_hits, oracle.total_example_hits));
    }
    if table.global().learning_examples != oracle.learning_examples {
        return Err(format!("NLE {} vs oracle {}", table.global().learning_examples, oracle.learning_examples));
    }
    if table.len() != oracle.rows.len() {
        return Err(format!("{} rows vs oracle {}", table.len(), oracle.rows.len()));
    }
    for row in table.rows() {
        let words: Vec<String> = row.context().words().map(str::to_string).collect();
        let o = oracle.rows.get(&words).ok_or_else(|| format!("context {words:?} missing from oracle"))?;
        let s = &row.stats;
        let got = OracleCounts {
            example_hits: s.example_hits,
            other_hits: s.other_hits,
            distinct_examples: s.distinct_examples,
            distinct_sources: s.distinct_sources,
            documents: s.documents,
        };
        if got != o.counts {
            return Err(format!("context {words:?}: counts {got:?} vs oracle {:?}", o.counts));
        }
        for (name, a, b) in [("cf", row.cf, o.cf), ("lef", row.lef, o.lef), ("df", row.df, o.df), ("icf", row.icf, o.icf), ("w", row.w, o.w)] {
            if ulps(a, b) > 4 {
                return Err(format!("context {words:?}: {name} {a:e} vs oracle {b:e}"));
            }
        }
    }
    Ok(())
}
