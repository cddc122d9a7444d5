//! JSONL corpus reader.
//!
//! Each line holds one object with exactly the keys
//! `id, outlet, country, date, title, body, language`. Malformed lines and
//! duplicate ids produce a [`Diagnostic`] and are skipped; the first record
//! with a given id wins.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use super::{RawArticle, TextError};
use crate::diag::Diagnostic;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusRecord {
    id: String,
    outlet: String,
    country: String,
    date: String,
    title: String,
    body: String,
    language: String,
}

/// Articles in file order plus the per-record diagnostics.
#[derive(Debug, Default, Clone)]
pub struct Ingested {
    pub articles: Vec<RawArticle>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Streams articles from any buffered reader.
pub struct CorpusReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    seen: HashSet<String>,
    today: NaiveDate,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R) -> Self {
        CorpusReader {
            lines: reader.lines(),
            line_no: 0,
            seen: HashSet::new(),
            today: chrono::Local::now().date_naive(),
        }
    }

    fn parse_line(&mut self, line: &str) -> Result<RawArticle, String> {
        let rec: CorpusRecord =
            serde_json::from_str(line).map_err(|e| format!("malformed record: {e}"))?;
        let id = rec.id.trim().to_string();
        if id.is_empty() {
            return Err("empty id".into());
        }
        let date = NaiveDate::parse_from_str(rec.date.trim(), "%Y-%m-%d")
            .map_err(|_| format!("article {id}: date `{}` is not YYYY-MM-DD", rec.date))?;
        let earliest = NaiveDate::from_ymd_opt(1900, 1, 1).expect("valid date");
        if date < earliest || date > self.today {
            return Err(format!("article {id}: date {date} outside [1900-01-01, today]"));
        }
        let country = rec.country.trim().to_ascii_uppercase();
        if country.len() != 2 || !country.bytes().all(|b| b.is_ascii_uppercase()) {
            return Err(format!(
                "article {id}: country `{}` is not an ISO alpha-2 code",
                rec.country
            ));
        }
        if rec.body.trim().is_empty() {
            return Err(format!("article {id}: empty body"));
        }
        if !self.seen.insert(id.clone()) {
            return Err(format!("duplicate article id `{id}` (first record kept)"));
        }
        Ok(RawArticle {
            article_id: id,
            outlet: rec.outlet,
            outlet_country: country,
            publish_date: date,
            title: rec.title,
            body: rec.body,
            language: rec.language,
        })
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    /// `Err` carries a per-record diagnostic; iteration continues after it.
    type Item = Result<RawArticle, Diagnostic>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line_no += 1;
            let line = match line {
                Ok(l) => l,
                Err(e) => return Some(Err(Diagnostic::at_line(self.line_no, e.to_string()))),
            };
            if line.trim().is_empty() {
                continue;
            }
            let line_no = self.line_no;
            return Some(
                self.parse_line(&line)
                    .map_err(|msg| Diagnostic::at_line(line_no, msg)),
            );
        }
    }
}

/// Reads a whole JSONL corpus. Only an unreadable file is fatal.
pub fn ingest_corpus(path: &Path) -> Result<Ingested, TextError> {
    let file = File::open(path).map_err(|source| TextError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(collect(CorpusReader::new(BufReader::new(file))))
}

pub(crate) fn collect<R: BufRead>(reader: CorpusReader<R>) -> Ingested {
    let mut out = Ingested::default();
    for item in reader {
        match item {
            Ok(a) => out.articles.push(a),
            Err(d) => out.diagnostics.push(d),
        }
    }
    out
}

/// Serializes an article back to the corpus line format.
pub fn to_jsonl_line(article: &RawArticle) -> String {
    serde_json::json!({
        "id": article.article_id,
        "outlet": article.outlet,
        "country": article.outlet_country,
        "date": article.publish_date.format("%Y-%m-%d").to_string(),
        "title": article.title,
        "body": article.body,
        "language": article.language,
    })
    .to_string()
}
