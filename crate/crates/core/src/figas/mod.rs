//! Aspect-based sentence scoring.
//!
//! A sentence is scored once per topic mention: the mention's grammatical
//! neighbourhood is collected from the dependency tree and its lexicon scores
//! are averaged, with negation, intensification and the topic's keyword tone
//! applied on top.

pub mod engine;
pub mod gazetteer;
pub mod lexicon;
pub mod topics;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use engine::{
    extract_dependents, match_topics, resolve_location, score_article, score_chunk, Chunk,
    ChunkScore, ChunkTerm, Engine, TopicMention,
};
pub use gazetteer::Gazetteer;
pub use lexicon::Lexicon;
pub use topics::{TopicSet, TopicSpec, TOPIC_NAMES};

#[derive(Debug, thiserror::Error)]
pub enum FigasError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("topic file line {line}: {message}")]
    Topics { line: usize, message: String },
    #[error("gazetteer line {line}: {message}")]
    Gazetteer { line: usize, message: String },
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, FigasError> {
    std::fs::read_to_string(path).map_err(|source| FigasError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// One (sentence, topic mention) observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub article_id: String,
    pub sentence_index: usize,
    pub date: NaiveDate,
    pub topic: String,
    pub country: String,
    pub score: f64,
    pub n_terms: usize,
}
