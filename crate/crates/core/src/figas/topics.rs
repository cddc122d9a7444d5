//! Topic keyword lists.
//!
//! ```text
//! [finsector]
//! tone = 1
//! terms = bank; derivative; lending
//! cross = banking, financial | sector, commercial, investment
//! ```
//!
//! `terms` holds `;`-separated phrases; each `cross` line pairs a set of
//! single-word modifiers with a set of single-word heads.

use std::path::Path;

use super::{read_file, FigasError};
use crate::text::lemma::lemmatize;
use crate::text::Pos;

const SHIPPED: &str = include_str!("../../data/topics.txt");

pub const TOPIC_NAMES: [&str; 6] = [
    "economy",
    "finsector",
    "inflation",
    "manuf",
    "monpol",
    "unemployment",
];

/// A phrase word in surface and lemmatized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseWord {
    pub word: String,
    pub lemma: String,
}

impl PhraseWord {
    fn new(word: &str) -> Self {
        let word = word.to_lowercase();
        PhraseWord {
            lemma: lemmatize(&word, Pos::Noun),
            word,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicSpec {
    pub name: String,
    pub single_terms: Vec<Vec<PhraseWord>>,
    pub cross_products: Vec<(Vec<PhraseWord>, Vec<PhraseWord>)>,
    /// +1 or -1.
    pub keyword_tone: f64,
}

impl TopicSpec {
    pub fn new(name: &str, keyword_tone: f64) -> Self {
        TopicSpec {
            name: name.to_string(),
            single_terms: Vec::new(),
            cross_products: Vec::new(),
            keyword_tone,
        }
    }

    pub fn add_term(&mut self, phrase: &str) {
        let words: Vec<PhraseWord> = phrase.split_whitespace().map(PhraseWord::new).collect();
        if !words.is_empty() {
            self.single_terms.push(words);
        }
    }

    pub fn add_cross(&mut self, modifiers: &[&str], heads: &[&str]) {
        self.cross_products.push((
            modifiers.iter().map(|w| PhraseWord::new(w)).collect(),
            heads.iter().map(|w| PhraseWord::new(w)).collect(),
        ));
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TopicSet {
    pub topics: Vec<TopicSpec>,
}

impl TopicSet {
    pub fn shipped() -> TopicSet {
        TopicSet::parse(SHIPPED).expect("bundled topic file is valid")
    }

    pub fn load(path: &Path) -> Result<TopicSet, FigasError> {
        TopicSet::parse(&read_file(path)?)
    }

    pub fn get(&self, name: &str) -> Option<&TopicSpec> {
        self.topics.iter().find(|t| t.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.topics.iter().map(|t| t.name.as_str()).collect()
    }

    pub fn parse(text: &str) -> Result<TopicSet, FigasError> {
        let mut set = TopicSet::default();
        let mut current: Option<TopicSpec> = None;
        let finish = |cur: Option<TopicSpec>, set: &mut TopicSet, line: usize| -> Result<(), FigasError> {
            if let Some(t) = cur {
                if t.single_terms.is_empty() && t.cross_products.is_empty() {
                    return Err(FigasError::Topics {
                        line,
                        message: format!("topic `{}` has no terms", t.name),
                    });
                }
                set.topics.push(t);
            }
            Ok(())
        };
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| FigasError::Topics {
                line: line_no,
                message,
            };
            if line.starts_with('[') && line.ends_with(']') {
                finish(current.take(), &mut set, line_no)?;
                let name = line[1..line.len() - 1].trim().to_lowercase();
                if !TOPIC_NAMES.contains(&name.as_str()) {
                    return Err(err(format!(
                        "unknown topic `{name}` (expected one of {})",
                        TOPIC_NAMES.join(", ")
                    )));
                }
                if set.get(&name).is_some() {
                    return Err(err(format!("duplicate topic `{name}`")));
                }
                current = Some(TopicSpec::new(&name, 1.0));
                continue;
            }
            let Some(topic) = current.as_mut() else {
                return Err(err("entry before the first [topic] header".into()));
            };
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(format!("expected `key = value`, found `{line}`")));
            };
            let value = value.trim();
            match key.trim() {
                "tone" => {
                    topic.keyword_tone = match value {
                        "1" | "+1" => 1.0,
                        "-1" => -1.0,
                        _ => return Err(err(format!("tone must be +1 or -1, found `{value}`"))),
                    };
                }
                "terms" => {
                    for phrase in value.split(';') {
                        topic.add_term(phrase);
                    }
                }
                "cross" => {
                    let Some((mods, heads)) = value.split_once('|') else {
                        return Err(err("cross product needs `modifiers | heads`".into()));
                    };
                    let split = |s: &str| -> Result<Vec<String>, FigasError> {
                        let words: Vec<String> = s
                            .split(',')
                            .map(|w| w.trim().to_lowercase())
                            .filter(|w| !w.is_empty())
                            .collect();
                        if words.is_empty() || words.iter().any(|w| w.contains(char::is_whitespace)) {
                            return Err(err("cross product sets need single words".into()));
                        }
                        Ok(words)
                    };
                    let mods = split(mods)?;
                    let heads = split(heads)?;
                    let m: Vec<&str> = mods.iter().map(String::as_str).collect();
                    let h: Vec<&str> = heads.iter().map(String::as_str).collect();
                    topic.add_cross(&m, &h);
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        finish(current, &mut set, text.lines().count())?;
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_topics() {
        let set = TopicSet::shipped();
        assert_eq!(set.names(), TOPIC_NAMES.to_vec());
        for t in &set.topics {
            let expected = if t.name == "unemployment" { -1.0 } else { 1.0 };
            assert_eq!(t.keyword_tone, expected, "{}", t.name);
        }
        let monpol = set.get("monpol").unwrap();
        assert_eq!(monpol.single_terms.len(), 11);
        let manuf = set.get("manuf").unwrap();
        assert_eq!(manuf.cross_products[0].0.len(), 5);
        assert_eq!(manuf.cross_products[0].1.len(), 4);
        let fin = set.get("finsector").unwrap();
        assert_eq!(fin.single_terms.len(), 4);
        assert_eq!(fin.cross_products[0].1.len(), 3);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(TopicSet::parse("[weather]\nterms = rain").is_err());
        assert!(TopicSet::parse("[economy]\nterms = economy\n[economy]\nterms = x").is_err());
        assert!(TopicSet::parse("terms = economy").is_err());
        assert!(TopicSet::parse("[economy]\ntone = 2\nterms = economy").is_err());
        assert!(TopicSet::parse("[economy]\ntone = 1").is_err());
        assert!(TopicSet::parse("[manuf]\ncross = big factory | output").is_err());
    }
}
