//! Tab-separated file formats shared by the subcommands.
//!
//! Every reader reports the 1-based line of the first bad row. Fields never
//! contain tabs or newlines; writers refuse values that would.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use nerctx_core::weighting::WeightTable;
use nerctx_core::{
    Annotation, ContextKey, ContextOccurrence, Decision, EvalReport, ExampleSet, GoldAnnotation, GrowthPoint,
    LearningExample, Side, Span,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {reason}", path.display())]
    Malformed { path: PathBuf, line: usize, reason: String },
}

impl FormatError {
    fn malformed(path: &Path, line: usize, reason: impl Into<String>) -> Self {
        FormatError::Malformed { path: path.to_path_buf(), line, reason: reason.into() }
    }
}

pub const WEIGHT_HEADER: [&str; 6] = ["context", "cf", "df", "lef", "icf", "w"];
pub const MODEL_HEADER: [&str; 4] = ["class", "table_file", "threshold", "margin"];
pub const ANNOTATION_HEADER: [&str; 7] = ["doc", "start_token", "end_token", "surface", "class", "score", "runner_up"];
pub const GOLD_HEADER: [&str; 4] = ["doc", "start_token", "end_token", "class"];
pub const GROWTH_HEADER: [&str; 3] = ["docs", "occurrences", "contexts"];
pub const EXTRACTION_HEADER: [&str; 5] = ["doc", "context_words", "side", "with_example", "example_surface"];
pub const EXAMPLES_HEADER: [&str; 2] = ["surface", "class"];
pub const REPORT_HEADER: [&str; 5] = ["true_positives", "false_positives", "false_negatives", "precision", "recall"];

/// Non-empty data rows of a TSV file with their line numbers.
pub struct Rows<'a> {
    path: &'a Path,
    lines: Vec<(usize, Vec<&'a str>)>,
}

impl<'a> Rows<'a> {
    /// Splits `text`. With `required`, the first non-empty line must equal
    /// `header`; otherwise a matching first line is skipped if present.
    pub fn parse(path: &'a Path, text: &'a str, header: &[&str], required: bool) -> Result<Self, FormatError> {
        let mut lines: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| (n, l.split('\t').collect()))
            .collect();
        match lines.first() {
            Some((_, first)) if first.as_slice() == header => {
                lines.remove(0);
            }
            Some((n, _)) if required => {
                return Err(FormatError::malformed(path, *n, format!("expected header {:?}", header.join("\t"))));
            }
            None if required => return Err(FormatError::malformed(path, 1, "missing header")),
            _ => {}
        }
        Ok(Rows { path, lines })
    }

    /// Rows checked to have exactly `width` fields.
    pub fn fixed(self, width: usize) -> Result<Vec<(usize, Vec<&'a str>)>, FormatError> {
        for (n, fields) in &self.lines {
            if fields.len() != width {
                return Err(FormatError::malformed(self.path, *n, format!("expected {width} fields, found {}", fields.len())));
            }
        }
        Ok(self.lines)
    }
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

fn parse_num<T: std::str::FromStr>(path: &Path, line: usize, what: &str, field: &str) -> Result<T, FormatError> {
    field.trim().parse().map_err(|_| FormatError::malformed(path, line, format!("{what}: cannot parse {field:?}")))
}

/// Formats `x` with 7 significant digits, `%g` style: fixed notation for
/// exponents in -4..7, scientific otherwise, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let sci = format!("{x:.6e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..7).contains(&exp) {
        let decimals = (6 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn check_field(value: &str) -> io::Result<&str> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("field contains a tab or newline: {value:?}")));
    }
    Ok(value)
}

fn write_row(out: &mut dyn Write, fields: &[&str]) -> io::Result<()> {
    let mut line = String::new();
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            line.push('\t');
        }
        line.push_str(check_field(f)?);
    }
    line.push('\n');
    out.write_all(line.as_bytes())
}

/// Learning examples, `surface<TAB>class`, header optional.
pub fn read_examples(path: &Path) -> Result<Vec<LearningExample>, FormatError> {
    let text = read_file(path)?;
    let rows = Rows::parse(path, &text, &EXAMPLES_HEADER, false)?.fixed(2)?;
    rows.into_iter()
        .map(|(n, f)| {
            LearningExample::new(f[0], f[1].trim())
                .filter(|e| !e.class_label().is_empty())
                .ok_or_else(|| FormatError::malformed(path, n, "surface and class must be non-empty"))
        })
        .collect()
}

pub fn write_weight_table(out: &mut dyn Write, table: &WeightTable) -> io::Result<()> {
    write_row(out, &WEIGHT_HEADER)?;
    for r in table.rows() {
        let (cf, df, lef, icf, w) = (fmt_sig(r.cf), fmt_sig(r.df), fmt_sig(r.lef), fmt_sig(r.icf), fmt_sig(r.w));
        write_row(out, &[r.context().as_str(), &cf, &df, &lef, &icf, &w])?;
    }
    Ok(())
}

/// Context weights from a weight-table file, keyed for `side`.
pub fn read_weight_table(path: &Path, side: Side) -> Result<BTreeMap<ContextKey, f64>, FormatError> {
    let text = read_file(path)?;
    let rows = Rows::parse(path, &text, &WEIGHT_HEADER, true)?.fixed(6)?;
    let mut weights = BTreeMap::new();
    for (n, f) in rows {
        let key = ContextKey::parse(f[0], side).ok_or_else(|| FormatError::malformed(path, n, "empty context"))?;
        let w: f64 = parse_num(path, n, "w", f[5])?;
        if !(w.is_finite() && w > 0.0) {
            return Err(FormatError::malformed(path, n, format!("weight must be positive, got {w}")));
        }
        if weights.insert(key, w).is_some() {
            return Err(FormatError::malformed(path, n, format!("duplicate context {:?}", f[0])));
        }
    }
    Ok(weights)
}

/// One row of `model.tsv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEntry {
    pub class: String,
    pub table_file: String,
    pub threshold: f64,
    pub margin: f64,
}

/// Rows of `model.tsv` with their line numbers.
pub fn read_model_entries(path: &Path) -> Result<Vec<(usize, ModelEntry)>, FormatError> {
    let text = read_file(path)?;
    let rows = Rows::parse(path, &text, &MODEL_HEADER, true)?.fixed(4)?;
    rows.into_iter()
        .map(|(n, f)| {
            if f[0].trim().is_empty() || f[1].trim().is_empty() {
                return Err(FormatError::malformed(path, n, "class and table_file must be non-empty"));
            }
            let entry = ModelEntry {
                class: f[0].trim().to_string(),
                table_file: f[1].trim().to_string(),
                threshold: parse_num(path, n, "threshold", f[2])?,
                margin: parse_num(path, n, "margin", f[3])?,
            };
            Ok((n, entry))
        })
        .collect()
}

pub fn write_model_entries(out: &mut dyn Write, entries: &[ModelEntry]) -> io::Result<()> {
    write_row(out, &MODEL_HEADER)?;
    for e in entries {
        write_row(out, &[&e.class, &e.table_file, &fmt_sig(e.threshold), &fmt_sig(e.margin)])?;
    }
    Ok(())
}

/// Token spans are written as inclusive `start_token`/`end_token` indices.
pub fn write_annotations(out: &mut dyn Write, annotations: &[Annotation]) -> io::Result<()> {
    write_row(out, &ANNOTATION_HEADER)?;
    for a in annotations {
        let (start, end) = (a.span.first.to_string(), a.span.last.to_string());
        let (score, runner_up) = (fmt_sig(a.score), fmt_sig(a.runner_up));
        write_row(out, &[&a.doc, &start, &end, &a.surface, a.decision.label(), &score, &runner_up])?;
    }
    Ok(())
}

fn parse_span(path: &Path, line: usize, start: &str, end: &str) -> Result<Span, FormatError> {
    let first: usize = parse_num(path, line, "start_token", start)?;
    let last: usize = parse_num(path, line, "end_token", end)?;
    if last < first {
        return Err(FormatError::malformed(path, line, format!("end_token {last} precedes start_token {first}")));
    }
    Ok(Span::new(first, last))
}

pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>, FormatError> {
    let text = read_file(path)?;
    let rows = Rows::parse(path, &text, &ANNOTATION_HEADER, true)?.fixed(7)?;
    rows.into_iter()
        .map(|(n, f)| {
            Ok(Annotation {
                doc: f[0].to_string(),
                span: parse_span(path, n, f[1], f[2])?,
                surface: f[3].to_string(),
                decision: Decision::from_label(f[4].trim()),
                score: parse_num(path, n, "score", f[5])?,
                runner_up: parse_num(path, n, "runner_up", f[6])?,
            })
        })
        .collect()
}

pub fn read_gold(path: &Path) -> Result<Vec<GoldAnnotation>, FormatError> {
    let text = read_file(path)?;
    let rows = Rows::parse(path, &text, &GOLD_HEADER, true)?.fixed(4)?;
    rows.into_iter()
        .map(|(n, f)| {
            if f[3].trim().is_empty() {
                return Err(FormatError::malformed(path, n, "empty class"));
            }
            Ok(GoldAnnotation { doc: f[0].to_string(), span: parse_span(path, n, f[1], f[2])?, class_label: f[3].trim().to_string() })
        })
        .collect()
}

pub fn write_gold(out: &mut dyn Write, gold: &[GoldAnnotation]) -> io::Result<()> {
    write_row(out, &GOLD_HEADER)?;
    for g in gold {
        write_row(out, &[&g.doc, &g.span.first.to_string(), &g.span.last.to_string(), &g.class_label])?;
    }
    Ok(())
}

pub fn write_growth(out: &mut dyn Write, points: &[GrowthPoint]) -> io::Result<()> {
    write_row(out, &GROWTH_HEADER)?;
    for p in points {
        write_row(out, &[&p.doc_count.to_string(), &p.example_occurrences.to_string(), &p.context_count.to_string()])?;
    }
    Ok(())
}

/// `doc_ids[o.doc]` names the document of each occurrence. The surface column
/// is empty for contexts not next to a learning example.
pub fn write_extraction(
    out: &mut dyn Write,
    occurrences: &[ContextOccurrence],
    doc_ids: &[&str],
    examples: &ExampleSet,
) -> io::Result<()> {
    write_row(out, &EXTRACTION_HEADER)?;
    for o in occurrences {
        let surface = o.example.map(|e| examples.get(e).surface()).unwrap_or("");
        let with = if o.with_example() { "true" } else { "false" };
        write_row(out, &[doc_ids[o.doc], o.context.as_str(), o.context.side().as_str(), with, surface])?;
    }
    Ok(())
}

fn ratio_field(r: Option<f64>) -> String {
    r.map(fmt_sig).unwrap_or_else(|| "NA".to_string())
}

pub fn write_report_tsv(out: &mut dyn Write, report: &EvalReport) -> io::Result<()> {
    write_row(out, &REPORT_HEADER)?;
    write_row(
        out,
        &[
            &report.true_positives.to_string(),
            &report.false_positives.to_string(),
            &report.false_negatives.to_string(),
            &ratio_field(report.precision),
            &ratio_field(report.recall),
        ],
    )
}

/// Human-readable report with aligned columns.
pub fn report_text(report: &EvalReport) -> String {
    let rows = [
        ("matching", "exact span and class".to_string()),
        ("true positives", report.true_positives.to_string()),
        ("false positives", report.false_positives.to_string()),
        ("false negatives", report.false_negatives.to_string()),
        ("precision", ratio_field(report.precision)),
        ("recall", ratio_field(report.recall)),
    ];
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut text = String::new();
    for (k, v) in rows {
        let _ = writeln!(text, "{k:<width$}  {v}");
    }
    text
}
