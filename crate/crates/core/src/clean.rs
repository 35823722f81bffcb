//! Markup stripping and text normalization.
//!
//! This is a tolerant scanner rather than an HTML parser: it drops tags,
//! comments and the bodies of `script`/`style` elements, decodes character
//! references and collapses whitespace.

use alloc::string::String;

use thiserror::Error;

use crate::corpus::DocumentKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CleanError {
    #[error("input is not valid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },
}

/// Turns raw document bytes into the text that tokenization runs on.
///
/// Plain text only has its line endings normalized to `\n`. Markup is
/// stripped, entity-decoded and whitespace-collapsed into a single line.
pub fn clean_text(raw: &[u8], kind: DocumentKind) -> Result<String, CleanError> {
    let text = core::str::from_utf8(raw).map_err(|e| CleanError::InvalidUtf8 { offset: e.valid_up_to() })?;
    Ok(match kind {
        DocumentKind::Plain => normalize_newlines(text),
        DocumentKind::Markup => collapse_whitespace(&decode_entities(&strip_markup(text))),
    })
}

pub(crate) fn normalize_newlines(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\r' {
            if chars.peek() == Some(&'\n') {
                chars.next();
            }
            out.push('\n');
        } else {
            out.push(c);
        }
    }
    out
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split(char::is_whitespace).filter(|w| !w.is_empty()) {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

// Tags that render inline; removing them must not split a word.
const INLINE_TAGS: &[&str] = &[
    "a", "abbr", "b", "bdi", "bdo", "cite", "code", "data", "dfn", "em", "font", "i", "kbd", "mark", "q", "s",
    "samp", "small", "span", "strong", "sub", "sup", "time", "tt", "u", "var", "wbr",
];

const RAW_TEXT_TAGS: &[&str] = &["script", "style", "noscript", "template"];

fn strip_markup(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        if bytes[i] != b'<' {
            let next = rest.find('<').map_or(text.len(), |p| i + p);
            out.push_str(&text[i..next]);
            i = next;
            continue;
        }
        if let Some(body) = rest.strip_prefix("<!--") {
            i = body.find("-->").map_or(text.len(), |p| i + 4 + p + 3);
            out.push(' ');
            continue;
        }
        let after = rest[1..].chars().next();
        let is_tag = matches!(after, Some(c) if c.is_ascii_alphabetic() || c == '/' || c == '!' || c == '?');
        if !is_tag {
            out.push('<');
            i += 1;
            continue;
        }
        let end = match tag_end(rest) {
            Some(e) => i + e,
            // Unterminated tag: drop the remainder.
            None => text.len(),
        };
        let name = tag_name(&text[i + 1..end]);
        let closing = rest[1..].starts_with('/');
        i = end;
        if !closing && RAW_TEXT_TAGS.iter().any(|t| name.eq_ignore_ascii_case(t)) {
            i = find_closing(text, i, &name).unwrap_or(text.len());
        }
        if !INLINE_TAGS.iter().any(|t| name.eq_ignore_ascii_case(t)) {
            out.push(' ');
        }
    }
    out
}

/// Byte offset just past the `>` closing the tag that starts `s`, honouring
/// quoted attribute values.
fn tag_end(s: &str) -> Option<usize> {
    let mut quote = None;
    for (pos, c) in s.char_indices().skip(1) {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '"' || c == '\'' => quote = Some(c),
            None if c == '>' => return Some(pos + 1),
            None => {}
        }
    }
    None
}

fn tag_name(inner: &str) -> String {
    inner
        .trim_start_matches(['/', '!', '?'])
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == '-')
        .collect()
}

/// Offset just past `</name ...>` at or after `from`.
fn find_closing(text: &str, from: usize, name: &str) -> Option<usize> {
    let lower = text[from..].to_ascii_lowercase();
    let needle = alloc::format!("</{}", name.to_ascii_lowercase());
    let mut search = 0;
    while let Some(p) = lower[search..].find(&needle) {
        let start = from + search + p;
        let follow = text[start + needle.len()..].chars().next();
        if matches!(follow, None | Some('>') | Some('/')) || follow.is_some_and(char::is_whitespace) {
            return Some(tag_end(&text[start..]).map_or(text.len(), |e| start + e));
        }
        search += p + needle.len();
    }
    None
}

const NAMED_ENTITIES: &[(&str, char)] = &[
    ("amp", '&'),
    ("lt", '<'),
    ("gt", '>'),
    ("quot", '"'),
    ("apos", '\''),
    ("nbsp", ' '),
    ("ndash", '\u{2013}'),
    ("mdash", '\u{2014}'),
    ("lsquo", '\u{2018}'),
    ("rsquo", '\u{2019}'),
    ("ldquo", '\u{201C}'),
    ("rdquo", '\u{201D}'),
    ("laquo", '\u{AB}'),
    ("raquo", '\u{BB}'),
    ("hellip", '\u{2026}'),
    ("middot", '\u{B7}'),
    ("bull", '\u{2022}'),
    ("copy", '\u{A9}'),
    ("reg", '\u{AE}'),
    ("trade", '\u{2122}'),
    ("euro", '\u{20AC}'),
    ("pound", '\u{A3}'),
    ("deg", '\u{B0}'),
    ("agrave", 'à'),
    ("aacute", 'á'),
    ("acirc", 'â'),
    ("auml", 'ä'),
    ("ccedil", 'ç'),
    ("egrave", 'è'),
    ("eacute", 'é'),
    ("ecirc", 'ê'),
    ("euml", 'ë'),
    ("icirc", 'î'),
    ("iuml", 'ï'),
    ("ocirc", 'ô'),
    ("ouml", 'ö'),
    ("ugrave", 'ù'),
    ("ucirc", 'û'),
    ("uuml", 'ü'),
    ("szlig", 'ß'),
    ("Eacute", 'É'),
    ("Agrave", 'À'),
    ("Ccedil", 'Ç'),
];

fn decode_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        match decode_one(rest) {
            Some((c, used)) => {
                out.push(c);
                rest = &rest[used..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Decodes the reference at the start of `s` (which begins with `&`).
fn decode_one(s: &str) -> Option<(char, usize)> {
    let (semi, _) = s.char_indices().take_while(|(i, _)| *i < 12).find(|(_, c)| *c == ';')?;
    let body = &s[1..semi];
    let c = if let Some(num) = body.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse::<u32>().ok()?,
        };
        char::from_u32(code)?
    } else {
        NAMED_ENTITIES.iter().find(|(n, _)| *n == body)?.1
    };
    Some((c, semi + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn markup(s: &str) -> String {
        clean_text(s.as_bytes(), DocumentKind::Markup).unwrap()
    }

    #[test]
    fn strips_tags() {
        assert_eq!(markup("<p>Hotels in Paris</p>"), "Hotels in Paris");
    }

    #[test]
    fn plain_is_identity() {
        assert_eq!(clean_text(b"Hotels in Paris", DocumentKind::Plain).unwrap(), "Hotels in Paris");
    }

    #[test]
    fn plain_normalizes_newlines_only() {
        assert_eq!(clean_text(b"a\r\nb\rc\n  d", DocumentKind::Plain).unwrap(), "a\nb\nc\n  d");
    }

    #[test]
    fn decodes_entities() {
        assert_eq!(markup("&amp; sons"), "& sons");
        assert_eq!(markup("caf&eacute; &#233;&#xE9; &bogus; a & b"), "café éé &bogus; a & b");
        assert_eq!(markup("&lt;p&gt;"), "<p>");
    }

    #[test]
    fn drops_script_style_and_comments() {
        let html = "<html><head><style>p { color: red }</style><script type=\"x\">if (a < b) { go() }</script></head>\
                    <body><!-- nav --><h1>Map of</h1><p>Tunis&nbsp;and <b>Cai</b>ro</p></body></html>";
        assert_eq!(markup(html), "Map of Tunis and Cairo");
    }

    #[test]
    fn quoted_gt_inside_attribute() {
        assert_eq!(markup("<a title=\"x > y\">Doha</a> hotels"), "Doha hotels");
    }

    #[test]
    fn bare_less_than_is_text() {
        assert_eq!(markup("3 < 4"), "3 < 4");
    }

    #[test]
    fn reports_invalid_utf8_offset() {
        assert_eq!(clean_text(b"abc\xffdef", DocumentKind::Plain), Err(CleanError::InvalidUtf8 { offset: 3 }));
    }

    #[test]
    fn output_is_stable_under_plain_recleaning() {
        for s in ["<p>a\r\n b</p>", "x &amp;&lt;b&gt; y", "<div>one</div><div>two</div>"] {
            let once = markup(s);
            assert_eq!(clean_text(once.as_bytes(), DocumentKind::Plain).unwrap(), once);
        }
    }
}
