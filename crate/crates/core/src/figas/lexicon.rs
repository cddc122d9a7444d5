//! Word polarity scores, negators and intensifiers.
//!
//! File format: CSV rows `lemma,score`, then an optional `[negators]` section
//! with one lemma per line and an `[intensifiers]` section of
//! `lemma,multiplier` rows. `#` starts a comment line and `lemma,...` header
//! rows are skipped.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::{read_file, FigasError};

const SHIPPED: &str = include_str!("../../data/lexicon.csv");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
    negators: HashSet<String>,
    intensifiers: HashMap<String, f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Entries,
    Negators,
    Intensifiers,
}

impl Lexicon {
    /// The lexicon bundled with the library.
    pub fn shipped() -> Lexicon {
        Lexicon::parse(SHIPPED).expect("bundled lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Lexicon, FigasError> {
        Lexicon::parse(&read_file(path)?)
    }

    pub fn parse(text: &str) -> Result<Lexicon, FigasError> {
        let mut lex = Lexicon::default();
        let mut section = Section::Entries;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| FigasError::Lexicon {
                line: line_no,
                message,
            };
            if line.starts_with('[') && line.ends_with(']') {
                section = match line[1..line.len() - 1].trim().to_lowercase().as_str() {
                    "entries" | "scores" => Section::Entries,
                    "negators" => Section::Negators,
                    "intensifiers" => Section::Intensifiers,
                    other => return Err(err(format!("unknown section `{other}`"))),
                };
                continue;
            }
            if section == Section::Negators {
                lex.negators.insert(line.to_lowercase());
                continue;
            }
            let Some((lemma, value)) = line.split_once(',') else {
                return Err(err(format!("expected `lemma,value`, found `{line}`")));
            };
            let lemma = lemma.trim().to_lowercase();
            if lemma == "lemma" {
                continue;
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("`{}` is not a number", value.trim())))?;
            match section {
                Section::Entries => lex.insert(&lemma, value).map_err(err)?,
                Section::Intensifiers => lex.insert_intensifier(&lemma, value).map_err(err)?,
                Section::Negators => unreachable!(),
            }
        }
        Ok(lex)
    }

    pub fn insert(&mut self, lemma: &str, score: f64) -> Result<(), String> {
        if !(-1.0..=1.0).contains(&score) {
            return Err(format!("score {score} for `{lemma}` outside [-1, 1]"));
        }
        self.entries.insert(lemma.to_lowercase(), score);
        Ok(())
    }

    pub fn insert_negator(&mut self, lemma: &str) {
        self.negators.insert(lemma.to_lowercase());
    }

    pub fn insert_intensifier(&mut self, lemma: &str, multiplier: f64) -> Result<(), String> {
        if !(multiplier > 0.0 && multiplier <= 4.0) {
            return Err(format!("multiplier {multiplier} for `{lemma}` outside (0, 4]"));
        }
        self.intensifiers.insert(lemma.to_lowercase(), multiplier);
        Ok(())
    }

    pub fn score(&self, lemma: &str) -> Option<f64> {
        self.entries.get(&lemma.to_lowercase()).copied()
    }

    pub fn is_negator(&self, lemma: &str) -> bool {
        self.negators.contains(&lemma.to_lowercase())
    }

    pub fn intensifier(&self, lemma: &str) -> Option<f64> {
        self.intensifiers.get(&lemma.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
