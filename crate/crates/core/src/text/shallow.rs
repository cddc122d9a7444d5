//! Deterministic rule-based tagger and dependency parser.
//!
//! Tags come from closed-class word lists and suffix rules. Heads are
//! assigned so the tree is projective:
//!
//! * noun phrases are maximal runs of determiners, adjectives, numbers and
//!   nouns ending in a noun; determiners and adjectives attach to the nearest
//!   following noun (`amod` / `dep`), noun modifiers to the next noun (`amod`);
//! * phrase heads and pronouns attach to the nearest verb, as `nsubj` when
//!   they precede it and `dobj` when they follow;
//! * adverbs (`advmod`) and negators (`neg`) attach to the nearest verb, or to
//!   an immediately following adjective or adverb;
//! * the first verb is the root and later verbs attach to it. Without a verb,
//!   auxiliaries play that role; without either, the first phrase head is the
//!   root.

use super::lemma::lemmatize;
use super::{Pos, RawArticle, Sentence, TextError, Token};
use crate::diag::Diagnostic;

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "its", "their", "his", "her", "our",
    "my", "your", "some", "any", "each", "every", "all", "both", "another", "such", "many",
    "much", "several", "few", "most", "more", "less",
];
const NEGATORS: &[&str] = &["not", "n't", "never", "no", "neither", "nor", "without"];
const PRONOUNS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "them", "us", "who", "whom",
    "which", "what", "itself", "themselves", "himself", "herself", "one",
];
const ADPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "onto", "since",
    "during", "after", "before", "over", "under", "above", "below", "between", "among",
    "through", "against", "about", "amid", "despite", "toward", "towards", "across", "per",
    "than", "like", "within", "via", "upon", "around",
];
const CONJUNCTIONS: &[&str] = &["and", "or", "but", "yet", "so"];
const SUBORDINATORS: &[&str] = &[
    "while", "whereas", "although", "though", "because", "if", "when", "as", "whether",
    "unless", "until", "where",
];
const AUXILIARIES: &[&str] = &[
    "be", "is", "are", "was", "were", "been", "being", "am", "has", "have", "had", "having",
    "will", "would", "shall", "should", "can", "could", "may", "might", "must", "do", "does",
    "did", "'s",
];
const COMMON_ADJECTIVES: &[&str] = &[
    "good", "bad", "high", "low", "strong", "weak", "best", "worst", "better", "worse", "big",
    "small", "large", "new", "old", "major", "deep", "sharp", "solid", "steady", "slow", "fast",
    "poor", "rich", "full", "firm", "robust", "stable", "weaker", "stronger", "higher", "lower",
    "bleak", "grim", "dire", "bright", "upbeat", "gloomy", "tight", "loose", "easy", "hard",
    "huge", "modest", "mild", "severe", "healthy", "sluggish", "brisk", "flat", "sound",
    "fragile", "buoyant", "resilient", "subdued", "muted", "soft", "hot", "cold", "key",
    "main", "central", "european", "monetary", "financial", "industrial", "commercial",
];
const IRREGULAR_VERBS: &[&str] = &[
    "rose", "risen", "fell", "fallen", "grew", "grown", "shrank", "shrunk", "sank", "sunk",
    "went", "gone", "came", "took", "taken", "gave", "given", "made", "kept", "held", "led",
    "paid", "said", "told", "thought", "brought", "bought", "sold", "began", "begun", "became",
    "struck", "spent", "stood", "won", "lost", "met", "saw", "seen", "fought", "slid", "rise",
    "fall", "grow", "shrink", "remain", "remains", "seem", "seems", "appear", "appears",
];
const ADVERBS: &[&str] = &[
    "very", "too", "quite", "rather", "also", "still", "already", "just", "even", "further",
    "again", "only", "almost", "nearly", "now", "then", "soon", "here", "there", "however",
    "somewhat", "well", "up", "down", "back", "ago", "once", "twice",
];
const NOT_ADVERB_LY: &[&str] = &[
    "supply", "apply", "reply", "family", "italy", "july", "rally", "ally", "assembly",
    "monopoly", "anomaly", "butterfly", "jelly", "belly", "bully", "sully", "fly", "only",
];
const NOUN_SUFFIXES: &[&str] = &[
    "tion", "sion", "ment", "ness", "ity", "ism", "ance", "ence", "ship", "ure", "dom", "ist",
];
const ADJ_SUFFIXES: &[&str] = &[
    "ous", "ful", "ive", "able", "ible", "al", "ic", "ical", "ish", "less", "ary", "est",
];

/// Splits a sentence into word and punctuation tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = chunk;
        let mut leading = Vec::new();
        while let Some(c) = word.chars().next() {
            if c.is_alphanumeric() {
                break;
            }
            leading.push(c.to_string());
            word = &word[c.len_utf8()..];
        }
        let mut trailing = Vec::new();
        loop {
            let Some(c) = word.chars().last() else { break };
            if c.is_alphanumeric() {
                break;
            }
            // keep the final period of an initialism like "E.C.B."
            if c == '.' && word.len() >= 2 && is_dotted(word) {
                break;
            }
            if c == '%' || !c.is_alphanumeric() {
                trailing.push(c.to_string());
                word = &word[..word.len() - c.len_utf8()];
            }
        }
        out.extend(leading);
        if !word.is_empty() {
            let lower = word.to_lowercase();
            if lower.ends_with("n't") && word.len() > 3 {
                out.push(word[..word.len() - 3].to_string());
                out.push(word[word.len() - 3..].to_string());
            } else if lower.ends_with("'s") && word.len() > 2 {
                out.push(word[..word.len() - 2].to_string());
                out.push(word[word.len() - 2..].to_string());
            } else {
                out.push(word.to_string());
            }
        }
        trailing.reverse();
        out.extend(trailing);
    }
    out
}

fn is_dotted(word: &str) -> bool {
    let b = word.as_bytes();
    b.len() % 2 == 0 && b.chunks(2).all(|c| c[0].is_ascii_alphabetic() && c[1] == b'.')
}

fn has_suffix(word: &str, suffixes: &[&str]) -> bool {
    suffixes
        .iter()
        .any(|s| word.len() > s.len() + 2 && word.ends_with(s))
}

/// First-pass tag from the word alone. The flag marks open-class defaults
/// that context may still turn into verbs.
fn tag_word(word: &str, sentence_initial: bool) -> (Pos, bool) {
    let lower = word.to_lowercase();
    let w = lower.as_str();
    if word.chars().all(|c| !c.is_alphanumeric()) {
        return (Pos::Punct, false);
    }
    if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return (Pos::Num, false);
    }
    if NEGATORS.contains(&w) {
        return (Pos::Part, false);
    }
    if w == "'s" {
        return (Pos::Part, false);
    }
    if DETERMINERS.contains(&w) {
        return (Pos::Det, false);
    }
    if PRONOUNS.contains(&w) {
        return (Pos::Pron, false);
    }
    if ADPOSITIONS.contains(&w) {
        return (Pos::Adp, false);
    }
    if CONJUNCTIONS.contains(&w) {
        return (Pos::Cconj, false);
    }
    if SUBORDINATORS.contains(&w) {
        return (Pos::Sconj, false);
    }
    if AUXILIARIES.contains(&w) {
        return (Pos::Aux, false);
    }
    let is_upper_initial = word.chars().next().is_some_and(char::is_uppercase);
    let all_caps = word.len() >= 2
        && word.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase);
    if all_caps || is_dotted(word) || (is_upper_initial && !sentence_initial) {
        return (Pos::Propn, false);
    }
    if ADVERBS.contains(&w) {
        return (Pos::Adv, false);
    }
    if COMMON_ADJECTIVES.contains(&w) {
        return (Pos::Adj, false);
    }
    if IRREGULAR_VERBS.contains(&w) {
        return (Pos::Verb, false);
    }
    if w.ends_with("ly") && w.len() > 4 && !NOT_ADVERB_LY.contains(&w) {
        return (Pos::Adv, false);
    }
    if has_suffix(w, NOUN_SUFFIXES) {
        return (Pos::Noun, false);
    }
    if (w.ends_with("ing") && w.len() > 5) || (w.ends_with("ed") && w.len() > 4) {
        return (Pos::Verb, false);
    }
    if has_suffix(w, ADJ_SUFFIXES) {
        return (Pos::Adj, false);
    }
    (Pos::Noun, true)
}

fn tag(words: &[String]) -> Vec<Pos> {
    let first_word = words
        .iter()
        .position(|w| w.chars().any(char::is_alphanumeric))
        .unwrap_or(0);
    let mut tags = Vec::with_capacity(words.len());
    let mut convertible = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let (t, c) = tag_word(w, i == first_word);
        tags.push(t);
        convertible.push(c);
    }
    // -ing/-ed between a determiner and a noun is adjectival: "its growing economy"
    for i in 1..tags.len().saturating_sub(1) {
        if tags[i] == Pos::Verb
            && matches!(tags[i - 1], Pos::Det | Pos::Adj)
            && matches!(tags[i + 1], Pos::Noun | Pos::Propn)
            && !IRREGULAR_VERBS.contains(&words[i].to_lowercase().as_str())
        {
            tags[i] = Pos::Adj;
        }
    }
    // A clause without a verb: the first default-noun after a nominal is a verb.
    let mut start = 0;
    while start < tags.len() {
        let mut end = start;
        while end < tags.len() && !is_clause_break(tags[end]) {
            end += 1;
        }
        let has_verb = tags[start..end]
            .iter()
            .any(|t| matches!(t, Pos::Verb | Pos::Aux));
        if !has_verb {
            for i in start + 1..end {
                if convertible[i] && matches!(tags[i - 1], Pos::Noun | Pos::Propn | Pos::Pron) {
                    tags[i] = Pos::Verb;
                    break;
                }
            }
        }
        start = end + 1;
    }
    tags
}

fn is_clause_break(t: Pos) -> bool {
    matches!(t, Pos::Punct | Pos::Cconj | Pos::Sconj)
}

fn nearest(candidates: &[usize], i: usize) -> Option<usize> {
    // ties go to the left candidate
    candidates
        .iter()
        .copied()
        .min_by_key(|&v| (v.abs_diff(i), v > i))
}

/// Segments and parses an article: the title (when included) is sentence 0
/// and body sentences follow in order. Sentences the parser rejects are
/// skipped with a diagnostic and keep their index slot.
pub fn parse_article(article: &RawArticle, include_title: bool) -> (Vec<Sentence>, Vec<Diagnostic>) {
    let mut sentences = Vec::new();
    let mut diagnostics = Vec::new();
    let mut index = 0;
    for part in article.scoring_text(include_title) {
        for text in super::segment_text(part) {
            match parse_with_ids(&text, &article.article_id, index) {
                Ok(s) => sentences.push(s),
                Err(e) => diagnostics.push(Diagnostic::new(
                    format!("{} sentence {index}", article.article_id),
                    e.to_string(),
                )),
            }
            index += 1;
        }
    }
    (sentences, diagnostics)
}

/// Parses one sentence string with the built-in rules.
pub fn shallow_parse(text: &str) -> Result<Sentence, TextError> {
    parse_with_ids(text, "", 0)
}

/// As [`shallow_parse`], stamping the sentence with its article and position.
pub fn parse_with_ids(text: &str, article_id: &str, sentence_index: usize) -> Result<Sentence, TextError> {
    let words = tokenize(text);
    if words.is_empty() {
        return Err(TextError::EmptySentence);
    }
    let tags = tag(&words);
    let n = words.len();
    // 0-based heads; usize::MAX marks root.
    let mut heads = vec![usize::MAX; n];
    let mut rels = vec!["dep"; n];

    // noun phrases: maximal runs of DET/ADJ/NUM/NOUN/PROPN (+ADV before ADJ),
    // kept only up to the last nominal in the run
    let mut in_phrase = vec![false; n];
    let mut phrase_heads = Vec::new();
    let mut i = 0;
    while i < n {
        let starts = |t: Pos| matches!(t, Pos::Det | Pos::Adj | Pos::Num | Pos::Noun | Pos::Propn);
        if !(starts(tags[i]) || (tags[i] == Pos::Adv && i + 1 < n && tags[i + 1] == Pos::Adj)) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < n
            && (starts(tags[j]) || (tags[j] == Pos::Adv && j + 1 < n && tags[j + 1] == Pos::Adj))
        {
            j += 1;
        }
        let last_nominal = (i..j).rev().find(|&k| matches!(tags[k], Pos::Noun | Pos::Propn));
        if let Some(h) = last_nominal {
            for k in i..=h {
                in_phrase[k] = true;
            }
            for k in i..h {
                match tags[k] {
                    Pos::Adv => {
                        heads[k] = k + 1;
                        rels[k] = "advmod";
                    }
                    Pos::Noun | Pos::Propn => {
                        heads[k] = k + 1 + (k + 1..=h)
                            .position(|m| matches!(tags[m], Pos::Noun | Pos::Propn))
                            .unwrap_or(h - k - 1);
                        rels[k] = "amod";
                    }
                    t => {
                        let noun = (k + 1..=h)
                            .find(|&m| matches!(tags[m], Pos::Noun | Pos::Propn))
                            .unwrap_or(h);
                        heads[k] = noun;
                        rels[k] = if t == Pos::Adj { "amod" } else { "dep" };
                    }
                }
            }
            phrase_heads.push(h);
            i = h + 1;
        } else {
            i = j;
        }
    }

    let mut verbs: Vec<usize> = (0..n).filter(|&k| tags[k] == Pos::Verb).collect();
    if verbs.is_empty() {
        verbs = (0..n).filter(|&k| tags[k] == Pos::Aux).collect();
    }
    let root = verbs
        .first()
        .copied()
        .or_else(|| phrase_heads.first().copied())
        .or_else(|| (0..n).find(|&k| tags[k].is_nominal()))
        .unwrap_or(0);

    for k in 0..n {
        if k == root || in_phrase[k] && !phrase_heads.contains(&k) {
            continue;
        }
        if verbs.contains(&k) {
            heads[k] = root;
            rels[k] = "dep";
            continue;
        }
        let is_verbal_aux = tags[k] == Pos::Aux && !verbs.contains(&k);
        let target = if tags[k] == Pos::Adv || tags[k] == Pos::Part {
            if k + 1 < n && matches!(tags[k + 1], Pos::Adj | Pos::Adv) && !in_phrase[k + 1] {
                Some(k + 1)
            } else {
                nearest(&verbs, k)
            }
        } else {
            nearest(&verbs, k)
        };
        let target = target.unwrap_or(root);
        heads[k] = target;
        rels[k] = match tags[k] {
            Pos::Part if NEGATORS.contains(&words[k].to_lowercase().as_str()) => "neg",
            Pos::Adv => "advmod",
            Pos::Noun | Pos::Propn | Pos::Pron if target != root || !verbs.is_empty() => {
                if !verbs.contains(&target) {
                    "dep"
                } else if k < target {
                    "nsubj"
                } else {
                    "dobj"
                }
            }
            _ if is_verbal_aux => "dep",
            _ => "dep",
        };
    }
    heads[root] = usize::MAX;
    rels[root] = "root";

    let tokens = (0..n)
        .map(|k| Token {
            index: k + 1,
            surface: words[k].clone(),
            lemma: lemmatize(&words[k], tags[k]),
            pos: tags[k],
            head: if heads[k] == usize::MAX { 0 } else { heads[k] + 1 },
            deprel: rels[k].to_string(),
        })
        .collect();
    let sentence = Sentence {
        article_id: article_id.to_string(),
        sentence_index,
        tokens,
    };
    sentence.validate().map_err(TextError::InvalidSentence)?;
    Ok(sentence)
}
