//! Article ingestion and dependency-annotated sentences.
//!
//! Articles come from a JSONL corpus ([`corpus`]). Sentences come either from
//! an external CoNLL-U parse file ([`conllu`]) or from the built-in
//! rule-based parser ([`shallow`]) applied to segmented text ([`segment`]).

pub mod conllu;
pub mod corpus;
pub mod lemma;
pub mod segment;
pub mod shallow;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use conllu::{load_parsed, read_parsed, write_conllu, ParsedCorpus};
pub use corpus::{ingest_corpus, CorpusReader, Ingested};
pub use segment::{segment_sentences, segment_text};
pub use shallow::{parse_article, shallow_parse};

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("empty sentence")]
    EmptySentence,
    #[error("invalid sentence: {0}")]
    InvalidSentence(String),
}

/// One news article as delivered by the corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArticle {
    pub article_id: String,
    pub outlet: String,
    /// ISO 3166 alpha-2 code of the country the outlet publishes in.
    pub outlet_country: String,
    pub publish_date: NaiveDate,
    pub title: String,
    pub body: String,
    pub language: String,
}

impl RawArticle {
    /// Text to score: optionally the title, then the body.
    pub fn scoring_text(&self, include_title: bool) -> Vec<&str> {
        let mut parts = Vec::with_capacity(2);
        if include_title && !self.title.trim().is_empty() {
            parts.push(self.title.as_str());
        }
        parts.push(self.body.as_str());
        parts
    }
}

/// Coarse part-of-speech tag (universal tag set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Pos {
    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Adj => "ADJ",
            Pos::Adp => "ADP",
            Pos::Adv => "ADV",
            Pos::Aux => "AUX",
            Pos::Cconj => "CCONJ",
            Pos::Det => "DET",
            Pos::Intj => "INTJ",
            Pos::Noun => "NOUN",
            Pos::Num => "NUM",
            Pos::Part => "PART",
            Pos::Pron => "PRON",
            Pos::Propn => "PROPN",
            Pos::Punct => "PUNCT",
            Pos::Sconj => "SCONJ",
            Pos::Sym => "SYM",
            Pos::Verb => "VERB",
            Pos::X => "X",
        }
    }

    pub fn parse(tag: &str) -> Pos {
        match tag.to_ascii_uppercase().as_str() {
            "ADJ" => Pos::Adj,
            "ADP" => Pos::Adp,
            "ADV" => Pos::Adv,
            "AUX" => Pos::Aux,
            "CCONJ" | "CONJ" => Pos::Cconj,
            "DET" => Pos::Det,
            "INTJ" => Pos::Intj,
            "NOUN" => Pos::Noun,
            "NUM" => Pos::Num,
            "PART" => Pos::Part,
            "PRON" => Pos::Pron,
            "PROPN" => Pos::Propn,
            "PUNCT" => Pos::Punct,
            "SCONJ" => Pos::Sconj,
            "SYM" => Pos::Sym,
            "VERB" => Pos::Verb,
            _ => Pos::X,
        }
    }

    pub fn is_nominal(self) -> bool {
        matches!(self, Pos::Noun | Pos::Propn | Pos::Pron)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    /// 0 for the root, else the index of the governing token.
    pub head: usize,
    pub deprel: String,
}

impl Token {
    /// Lowercased lemma, falling back to the surface form when the lemma is
    /// missing (`_` in CoNLL-U).
    pub fn norm_lemma(&self) -> String {
        if self.lemma.is_empty() || self.lemma == "_" {
            self.surface.to_lowercase()
        } else {
            self.lemma.to_lowercase()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub article_id: String,
    /// 0-based position within the article.
    pub sentence_index: usize,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Checks contiguous 1-based indices, a single root and acyclic head links.
    pub fn validate(&self) -> Result<(), String> {
        if self.tokens.is_empty() {
            return Err("sentence has no tokens".into());
        }
        let n = self.tokens.len();
        let mut roots = 0;
        for (i, tok) in self.tokens.iter().enumerate() {
            if tok.index != i + 1 {
                return Err(format!(
                    "token indices not contiguous: expected {}, found {}",
                    i + 1,
                    tok.index
                ));
            }
            if tok.head == tok.index {
                return Err(format!("token {} is its own head", tok.index));
            }
            if tok.head > n {
                return Err(format!(
                    "token {} has head {} outside the sentence",
                    tok.index, tok.head
                ));
            }
            if tok.head == 0 {
                roots += 1;
            }
        }
        if roots != 1 {
            return Err(format!("expected exactly one root, found {roots}"));
        }
        for start in 1..=n {
            let mut cur = start;
            let mut steps = 0;
            while cur != 0 {
                cur = self.tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(format!("cycle in head links reachable from token {start}"));
                }
            }
        }
        Ok(())
    }

    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    pub fn root(&self) -> Option<&Token> {
        self.tokens.iter().find(|t| t.head == 0)
    }

    /// Indices of the direct dependents of `index`.
    pub fn children(&self, index: usize) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    /// Number of dependency edges between two tokens (undirected tree distance).
    pub fn tree_distance(&self, a: usize, b: usize) -> usize {
        let path_a = self.path_to_root(a);
        let path_b = self.path_to_root(b);
        for (da, node) in path_a.iter().enumerate() {
            if let Some(db) = path_b.iter().position(|x| x == node) {
                return da + db;
            }
        }
        // Disconnected only if the sentence is invalid.
        usize::MAX
    }

    fn path_to_root(&self, index: usize) -> Vec<usize> {
        let mut path = vec![index];
        let mut cur = index;
        while cur != 0 && path.len() <= self.tokens.len() {
            cur = self.tokens[cur - 1].head;
            if cur != 0 {
                path.push(cur);
            }
        }
        path
    }

    /// True when no two arcs cross.
    pub fn is_projective(&self) -> bool {
        let arcs: Vec<(usize, usize)> = self
            .tokens
            .iter()
            .filter(|t| t.head != 0)
            .map(|t| (t.index.min(t.head), t.index.max(t.head)))
            .collect();
        for (i, &(a, b)) in arcs.iter().enumerate() {
            for &(c, d) in &arcs[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(index: usize, head: usize) -> Token {
        Token {
            index,
            surface: format!("w{index}"),
            lemma: format!("w{index}"),
            pos: Pos::Noun,
            head,
            deprel: "dep".into(),
        }
    }

    fn sent(tokens: Vec<Token>) -> Sentence {
        Sentence {
            article_id: "a".into(),
            sentence_index: 0,
            tokens,
        }
    }

    #[test]
    fn validate_accepts_tree() {
        assert!(sent(vec![tok(1, 2), tok(2, 0), tok(3, 2)]).validate().is_ok());
    }

    #[test]
    fn validate_rejects_cycle_and_self_loop() {
        assert!(sent(vec![tok(1, 2), tok(2, 1), tok(3, 0)]).validate().is_err());
        assert!(sent(vec![tok(1, 1)]).validate().is_err());
        assert!(sent(vec![tok(1, 0), tok(2, 0)]).validate().is_err());
    }

    #[test]
    fn tree_distance_counts_edges() {
        let s = sent(vec![tok(1, 2), tok(2, 0), tok(3, 4), tok(4, 2)]);
        assert_eq!(s.tree_distance(1, 3), 3);
        assert_eq!(s.tree_distance(2, 2), 0);
        assert_eq!(s.tree_distance(4, 2), 1);
    }

    #[test]
    fn projectivity() {
        assert!(sent(vec![tok(1, 2), tok(2, 0), tok(3, 2)]).is_projective());
        assert!(!sent(vec![tok(1, 3), tok(2, 0), tok(3, 2), tok(4, 2), tok(5, 2)])
            .with_head(4, 1)
            .is_projective());
    }

    impl Sentence {
        fn with_head(mut self, index: usize, head: usize) -> Self {
            self.tokens[index - 1].head = head;
            self
        }
    }
}
