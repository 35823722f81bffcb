//! Word tokenization with sentence-boundary marks.

use alloc::vec::Vec;

/// A word of the clean text. `text` is always `&clean[start..end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
    /// A sentence ends right after this token.
    pub ends_sentence: bool,
}

/// Inclusive token index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub first: usize,
    pub last: usize,
}

impl Span {
    pub fn new(first: usize, last: usize) -> Self {
        debug_assert!(first <= last);
        Span { first, last }
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.first <= other.last && other.first <= self.last
    }
}

// Abbreviations that keep their period and never end a sentence.
const TITLES: &[&str] = &[
    "Mr", "Mrs", "Ms", "Dr", "Prof", "St", "Mt", "Jr", "Sr", "Gen", "Sen", "Rep", "Gov", "Pres", "Lt", "Col",
    "Capt", "Sgt", "Rev", "Hon", "Mme", "Mlle", "vs",
];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '.' | '-')
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Single letters joined by periods ("W", "U.S") or a known title.
fn takes_period(word: &str) -> bool {
    TITLES.contains(&word) || word.split('.').all(|seg| {
        let mut cs = seg.chars();
        matches!((cs.next(), cs.next()), (Some(c), None) if c.is_alphabetic())
    })
}

/// Splits clean text into words.
///
/// A word is a maximal run of letters and digits, where an apostrophe,
/// period or hyphen may join two such runs ("Bush's", "U.S", "Saint-Denis").
/// A trailing period is kept only on abbreviations ("W.", "Mr."). Everything
/// else is dropped, except that `.`, `!` or `?` followed by whitespace and an
/// uppercase word (or by the end of the text) marks the preceding token as
/// ending a sentence.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let offset = |j: usize| chars.get(j).map_or(text.len(), |&(b, _)| b);
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_word_char(chars[i].1) {
            i += 1;
            continue;
        }
        let start = chars[i].0;
        let mut j = i + 1;
        while j < chars.len() {
            let c = chars[j].1;
            if is_word_char(c) {
                j += 1;
            } else if is_joiner(c) && chars.get(j + 1).is_some_and(|&(_, n)| is_word_char(n)) {
                j += 2;
            } else {
                break;
            }
        }
        let mut end = offset(j);
        if chars.get(j).is_some_and(|&(_, c)| c == '.') && takes_period(&text[start..end]) {
            j += 1;
            end = offset(j);
        }
        tokens.push(Token { text: &text[start..end], start, end, ends_sentence: false });
        i = j;
    }

    for k in 0..tokens.len() {
        let gap_end = tokens.get(k + 1).map_or(text.len(), |t| t.start);
        let gap = &text[tokens[k].end..gap_end];
        let Some(term) = gap.find(is_terminal) else { continue };
        tokens[k].ends_sentence = match tokens.get(k + 1) {
            None => true,
            Some(next) => {
                gap[term..].contains(char::is_whitespace) && next.text.chars().next().is_some_and(char::is_uppercase)
            }
        };
    }
    tokens
}
