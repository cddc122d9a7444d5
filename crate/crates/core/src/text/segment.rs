//! Rule-based sentence segmentation.
//!
//! A boundary is placed after `.`, `!` or `?` (plus any closing quotes or
//! brackets) when whitespace follows and the next word does not start with a
//! lowercase letter. A period that closes a listed abbreviation or a dotted
//! initialism (`E.C.B.`) never ends a sentence. Blank lines always do.

use std::collections::HashSet;
use std::sync::OnceLock;

use super::RawArticle;

const ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

fn abbreviations() -> &'static HashSet<String> {
    static SET: OnceLock<HashSet<String>> = OnceLock::new();
    SET.get_or_init(|| {
        ABBREVIATIONS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect()
    })
}

fn is_initialism(word: &str) -> bool {
    // "U.S." / "E.C.B." : alternating single letters and periods.
    let bytes = word.as_bytes();
    bytes.len() >= 2
        && bytes.len() % 2 == 0
        && bytes
            .chunks(2)
            .all(|c| c[0].is_ascii_alphabetic() && c[1] == b'.')
}

fn is_guarded(word: &str) -> bool {
    let w = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    if w.is_empty() {
        return false;
    }
    abbreviations().contains(&w.to_lowercase()) || is_initialism(w)
}

/// Splits an article's body into sentences.
pub fn segment_sentences(article: &RawArticle) -> Vec<String> {
    segment_text(&article.body)
}

pub fn segment_text(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    let push = |out: &mut Vec<String>, s: &str| {
        let t = s.trim();
        if !t.is_empty() {
            out.push(t.to_string());
        }
    };
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' {
            // blank line = paragraph break
            let mut j = i + 1;
            while j < chars.len() && chars[j].1 != '\n' && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j].1 == '\n' {
                push(&mut out, &text[start..pos]);
                start = chars[j].0;
                i = j;
                continue;
            }
        }
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '.' | '!' | '?' | '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}') {
                j += 1;
            }
            let end = if j < chars.len() { chars[j].0 } else { text.len() };
            let at_end = j >= chars.len();
            let followed_by_space = at_end || chars[j].1.is_whitespace();
            if followed_by_space {
                let mut k = j;
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                let next_lower = k < chars.len() && chars[k].1.is_lowercase();
                let word_start = text[..end]
                    .rfind(char::is_whitespace)
                    .map(|p| p + 1)
                    .unwrap_or(0);
                let word = &text[word_start..end];
                let guarded = c == '.' && is_guarded(word.trim_end_matches(['"', '\'', ')', ']']));
                if !next_lower && !guarded {
                    push(&mut out, &text[start..end]);
                    start = end;
                }
            }
            i = j;
            continue;
        }
        i += 1;
    }
    push(&mut out, &text[start..]);
    out
}
