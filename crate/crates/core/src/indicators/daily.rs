use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::figas::SentenceScore;
use crate::stats::sorted_sum;

/// Mean sentence score for one (country, topic, date).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySentiment {
    pub country: String,
    pub topic: String,
    pub date: NaiveDate,
    pub mean_score: f64,
    pub n_sentences: usize,
}

/// How sentences are weighted within a day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Every sentence counts once.
    #[default]
    Sentence,
    /// Sentences are first averaged within their article.
    ArticleMean,
}

pub fn aggregate_daily(scores: &[SentenceScore]) -> Vec<DailySentiment> {
    aggregate_daily_with(scores, Weighting::Sentence)
}

/// One record per (country, topic, date), sorted by that key. The result is
/// bit-identical under any permutation of `scores`.
pub fn aggregate_daily_with(scores: &[SentenceScore], weighting: Weighting) -> Vec<DailySentiment> {
    type Key = (String, String, NaiveDate);
    let mut groups: BTreeMap<Key, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for s in scores {
        groups
            .entry((s.country.clone(), s.topic.clone(), s.date))
            .or_default()
            .entry(s.article_id.as_str())
            .or_default()
            .push(s.score);
    }
    groups
        .into_iter()
        .map(|((country, topic, date), by_article)| {
            let n_sentences = by_article.values().map(Vec::len).sum();
            let mut values: Vec<f64> = match weighting {
                Weighting::Sentence => by_article.into_values().flatten().collect(),
                Weighting::ArticleMean => by_article
                    .into_values()
                    .map(|mut v| {
                        let n = v.len() as f64;
                        sorted_sum(&mut v) / n
                    })
                    .collect(),
            };
            let n = values.len() as f64;
            DailySentiment {
                country,
                topic,
                date,
                mean_score: sorted_sum(&mut values) / n,
                n_sentences,
            }
        })
        .collect()
}
