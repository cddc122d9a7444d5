//! Place names, demonyms and cities mapped to country codes.

use std::collections::HashMap;
use std::path::Path;

use super::{read_file, FigasError};
use crate::text::Sentence;

const SHIPPED: &str = include_str!("../../data/gazetteer.csv");

pub const SUPPORTED_COUNTRIES: &[&str] = &[
    "AT", "BE", "DE", "ES", "FI", "FR", "GB", "GR", "IE", "IT", "LU", "NL", "PT", "US",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gazetteer {
    /// Lowercase name, split into words, to country code.
    names: HashMap<Vec<String>, String>,
    max_words: usize,
}

/// A gazetteer hit: 1-based inclusive token span and its country.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationHit {
    pub start: usize,
    pub end: usize,
    pub country: String,
}

impl Gazetteer {
    pub fn shipped() -> Gazetteer {
        Gazetteer::parse(SHIPPED).expect("bundled gazetteer is valid")
    }

    pub fn load(path: &Path) -> Result<Gazetteer, FigasError> {
        Gazetteer::parse(&read_file(path)?)
    }

    pub fn parse(text: &str) -> Result<Gazetteer, FigasError> {
        let mut gaz = Gazetteer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line == "name,country" {
                continue;
            }
            let err = |message: String| FigasError::Gazetteer {
                line: i + 1,
                message,
            };
            let Some((name, code)) = line.rsplit_once(',') else {
                return Err(err(format!("expected `name,country`, found `{line}`")));
            };
            gaz.insert(name, code).map_err(err)?;
        }
        Ok(gaz)
    }

    pub fn insert(&mut self, name: &str, country: &str) -> Result<(), String> {
        let code = country.trim().to_uppercase();
        if !SUPPORTED_COUNTRIES.contains(&code.as_str()) {
            return Err(format!("unsupported country code `{code}`"));
        }
        let words: Vec<String> = name.split_whitespace().map(str::to_lowercase).collect();
        if words.is_empty() {
            return Err("empty name".into());
        }
        self.max_words = self.max_words.max(words.len());
        self.names.insert(words, code);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&str> {
        let words: Vec<String> = name.split_whitespace().map(str::to_lowercase).collect();
        self.names.get(&words).map(String::as_str)
    }

    /// Longest-first, left-to-right, non-overlapping matches on token surfaces.
    pub fn find(&self, sentence: &Sentence) -> Vec<LocationHit> {
        let words: Vec<String> = sentence.tokens.iter().map(|t| t.surface.to_lowercase()).collect();
        let mut hits = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let mut matched = None;
            for len in (1..=self.max_words.min(words.len() - i)).rev() {
                if let Some(code) = self.names.get(&words[i..i + len]) {
                    matched = Some((len, code.clone()));
                    break;
                }
            }
            match matched {
                Some((len, country)) => {
                    hits.push(LocationHit {
                        start: i + 1,
                        end: i + len,
                        country,
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
        hits
    }
}
