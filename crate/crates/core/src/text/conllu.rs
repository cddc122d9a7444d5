//! CoNLL-U parse files.
//!
//! Ten tab-separated columns per token, a blank line between sentences and
//! `# article_id = ...` / `# sentence_index = ...` comments before each
//! sentence. Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are
//! skipped.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Pos, Sentence, TextError, Token};
use crate::diag::Diagnostic;

#[derive(Debug, Default, Clone)]
pub struct ParsedCorpus {
    /// Valid sentences in file order.
    pub sentences: Vec<Sentence>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedCorpus {
    /// Sentences grouped by article, each group ordered by sentence index.
    pub fn by_article(&self) -> BTreeMap<String, Vec<Sentence>> {
        let mut map: BTreeMap<String, Vec<Sentence>> = BTreeMap::new();
        for s in &self.sentences {
            map.entry(s.article_id.clone()).or_default().push(s.clone());
        }
        for group in map.values_mut() {
            group.sort_by_key(|s| s.sentence_index);
        }
        map
    }
}

/// Reads a parse file. When `known_ids` is given, sentences whose article is
/// not in the set are skipped with a diagnostic.
pub fn load_parsed(path: &Path, known_ids: Option<&HashSet<String>>) -> Result<ParsedCorpus, TextError> {
    let text = fs::read_to_string(path).map_err(|source| TextError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(read_parsed(&text, known_ids))
}

struct Block {
    start_line: usize,
    article_id: Option<String>,
    sentence_index: Option<usize>,
    tokens: Vec<Token>,
    error: Option<String>,
}

impl Block {
    fn new(start_line: usize) -> Self {
        Block {
            start_line,
            article_id: None,
            sentence_index: None,
            tokens: Vec::new(),
            error: None,
        }
    }

    fn is_empty(&self) -> bool {
        self.tokens.is_empty() && self.article_id.is_none() && self.error.is_none()
    }
}

pub fn read_parsed(text: &str, known_ids: Option<&HashSet<String>>) -> ParsedCorpus {
    let mut out = ParsedCorpus::default();
    let mut block = Block::new(1);

    let finish = |block: Block, out: &mut ParsedCorpus| {
        if block.is_empty() {
            return;
        }
        let loc = format!("line {}", block.start_line);
        if let Some(err) = block.error {
            out.diagnostics.push(Diagnostic::new(loc, err));
            return;
        }
        let (Some(article_id), Some(sentence_index)) = (block.article_id, block.sentence_index)
        else {
            out.diagnostics.push(Diagnostic::new(
                loc,
                "sentence lacks `# article_id` or `# sentence_index` metadata",
            ));
            return;
        };
        if let Some(ids) = known_ids {
            if !ids.contains(&article_id) {
                out.diagnostics.push(Diagnostic::new(
                    loc,
                    format!("unknown article_id `{article_id}`, sentence skipped"),
                ));
                return;
            }
        }
        let sentence = Sentence {
            article_id,
            sentence_index,
            tokens: block.tokens,
        };
        match sentence.validate() {
            Ok(()) => out.sentences.push(sentence),
            Err(e) => out.diagnostics.push(Diagnostic::new(
                loc,
                format!(
                    "sentence {}#{} rejected: {e}",
                    sentence.article_id, sentence.sentence_index
                ),
            )),
        }
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            let done = std::mem::replace(&mut block, Block::new(line_no + 1));
            finish(done, &mut out);
            continue;
        }
        if block.is_empty() {
            block.start_line = line_no;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "article_id" => block.article_id = Some(value.trim().to_string()),
                    "sentence_index" => match value.trim().parse() {
                        Ok(v) => block.sentence_index = Some(v),
                        Err(_) => {
                            block.error = Some(format!("line {line_no}: bad sentence_index"))
                        }
                    },
                    _ => {}
                }
            }
            continue;
        }
        if block.error.is_some() {
            continue;
        }
        match parse_token(line) {
            Ok(Some(tok)) => block.tokens.push(tok),
            Ok(None) => {}
            Err(e) => block.error = Some(format!("line {line_no}: {e}")),
        }
    }
    finish(block, &mut out);
    out
}

fn parse_token(line: &str) -> Result<Option<Token>, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(format!("expected 10 columns, found {}", cols.len()));
    }
    if cols[0].contains('-') || cols[0].contains('.') {
        return Ok(None);
    }
    let index: usize = cols[0]
        .parse()
        .map_err(|_| format!("bad token id `{}`", cols[0]))?;
    let head: usize = cols[6]
        .parse()
        .map_err(|_| format!("bad head `{}`", cols[6]))?;
    Ok(Some(Token {
        index,
        surface: cols[1].to_string(),
        lemma: cols[2].to_string(),
        pos: Pos::parse(cols[3]),
        head,
        deprel: cols[7].to_string(),
    }))
}

/// Renders sentences as CoNLL-U with the metadata comments `load_parsed` expects.
pub fn write_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        let _ = writeln!(out, "# article_id = {}", s.article_id);
        let _ = writeln!(out, "# sentence_index = {}", s.sentence_index);
        for t in &s.tokens {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
                t.index,
                t.surface,
                t.lemma,
                t.pos.as_str(),
                t.head,
                t.deprel
            );
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "# article_id = a1\n# sentence_index = 0\n\
1\tPrices\tprice\tNOUN\t_\t_\t2\tnsubj\t_\t_\n\
2\trose\trise\tVERB\t_\t_\t0\troot\t_\t_\n\
\n\
# article_id = a1\n# sentence_index = 1\n\
1\tWages\twage\tNOUN\t_\t_\t2\tnsubj\t_\t_\n\
2\tfell\tfall\tVERB\t_\t_\t0\troot\t_\t_\n";

    #[test]
    fn single_token_sentence() {
        let text = "# article_id = a\n# sentence_index = 0\n1\tUp\tup\tADV\t_\t_\t0\troot\t_\t_\n";
        let out = read_parsed(text, None);
        assert_eq!(out.sentences.len(), 1);
        assert_eq!(out.sentences[0].root().unwrap().surface, "Up");
        assert!(out.diagnostics.is_empty());
    }

    #[test]
    fn self_headed_token_rejected() {
        let text = "# article_id = a\n# sentence_index = 0\n1\tUp\tup\tADV\t_\t_\t1\troot\t_\t_\n";
        let out = read_parsed(text, None);
        assert!(out.sentences.is_empty());
        assert_eq!(out.diagnostics.len(), 1);
        assert!(out.diagnostics[0].message.contains("own head"));
    }

    #[test]
    fn two_sentence_block() {
        let out = read_parsed(TWO, None);
        assert_eq!(out.sentences.len(), 2);
        assert_eq!(out.sentences[0].sentence_index, 0);
        assert_eq!(out.sentences[1].sentence_index, 1);
        assert_eq!(out.by_article()["a1"].len(), 2);
    }

    #[test]
    fn cycle_rejected_and_unknown_article_skipped() {
        let cyc = "# article_id = a\n# sentence_index = 0\n\
1\tx\tx\tNOUN\t_\t_\t2\tdep\t_\t_\n2\ty\ty\tNOUN\t_\t_\t1\tdep\t_\t_\n3\tz\tz\tVERB\t_\t_\t0\troot\t_\t_\n";
        let out = read_parsed(cyc, None);
        assert_eq!(out.diagnostics.len(), 1);

        let known: HashSet<String> = ["other".to_string()].into_iter().collect();
        let out = read_parsed(TWO, Some(&known));
        assert!(out.sentences.is_empty());
        assert_eq!(out.diagnostics.len(), 2);
        assert!(out.diagnostics[0].message.contains("unknown article_id"));
    }

    #[test]
    fn multiword_ranges_skipped() {
        let text = "# article_id = a\n# sentence_index = 0\n\
1-2\tisn't\t_\t_\t_\t_\t_\t_\t_\t_\n1\tis\tbe\tAUX\t_\t_\t0\troot\t_\t_\n2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n";
        let out = read_parsed(text, None);
        assert_eq!(out.sentences[0].tokens.len(), 2);
    }

    #[test]
    fn write_then_read() {
        let out = read_parsed(TWO, None);
        let again = read_parsed(&write_conllu(&out.sentences), None);
        assert_eq!(out.sentences, again.sentences);
    }
}
