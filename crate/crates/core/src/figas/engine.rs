//! Mention detection, location resolution, dependent traversal and scoring.

use std::collections::BTreeMap;

use super::gazetteer::Gazetteer;
use super::lexicon::Lexicon;
use super::topics::{PhraseWord, TopicSet, TopicSpec};
use super::SentenceScore;
use crate::text::{Pos, RawArticle, Sentence, Token};

/// Maximum dependency hops between the mention head and a chunk term.
pub const MAX_HOPS: usize = 3;

const OBJECT_RELS: &[&str] = &["obj", "dobj", "iobj", "attr", "acomp", "oprd"];
const PREDICATE_RELS: &[&str] = &["dep", "xcomp", "ccomp"];
const MODIFIER_RELS: &[&str] = &["amod", "advmod", "neg", "compound"];
const LINK_RELS: &[&str] = &["amod", "compound", "nmod", "nn"];

/// A topic keyword occurrence: 1-based inclusive token span plus the span's
/// syntactic head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicMention {
    pub topic: String,
    pub start: usize,
    pub end: usize,
    pub head: usize,
}

impl TopicMention {
    pub fn contains(&self, index: usize) -> bool {
        (self.start..=self.end).contains(&index)
    }

    fn len(&self) -> usize {
        self.end - self.start + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkTerm {
    pub index: usize,
    pub lemma: String,
    /// Index of the governing token, 0 for the root.
    pub head: usize,
}

/// Terms tied to a mention, in sentence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Chunk {
    pub terms: Vec<ChunkTerm>,
}

impl Chunk {
    pub fn lemmas(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.lemma.as_str()).collect()
    }

    /// A chunk of unrelated terms (every head outside the chunk).
    pub fn from_lemmas(lemmas: &[&str]) -> Chunk {
        Chunk {
            terms: lemmas
                .iter()
                .enumerate()
                .map(|(i, l)| ChunkTerm {
                    index: i + 1,
                    lemma: l.to_string(),
                    head: 0,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkScore {
    pub score: f64,
    /// Chunk terms found in the lexicon.
    pub n_terms: usize,
}

fn word_matches(tok: &Token, pw: &PhraseWord) -> bool {
    let lemma = tok.norm_lemma();
    tok.surface.to_lowercase() == pw.word || lemma == pw.word || lemma == pw.lemma
}

fn span_head(sentence: &Sentence, start: usize, end: usize) -> usize {
    (start..=end)
        .rev()
        .find(|&i| {
            let h = sentence.token(i).head;
            h == 0 || h < start || h > end
        })
        .unwrap_or(end)
}

fn topic_candidates(sentence: &Sentence, topic: &TopicSpec) -> Vec<(usize, usize)> {
    let n = sentence.tokens.len();
    let mut spans = Vec::new();
    for phrase in &topic.single_terms {
        let len = phrase.len();
        for start in 1..=n.saturating_sub(len - 1) {
            if phrase
                .iter()
                .enumerate()
                .all(|(k, pw)| word_matches(sentence.token(start + k), pw))
            {
                spans.push((start, start + len - 1));
            }
        }
    }
    for (mods, heads) in &topic.cross_products {
        for m in &sentence.tokens {
            if !mods.iter().any(|pw| word_matches(m, pw)) {
                continue;
            }
            for h in &sentence.tokens {
                if h.index == m.index || !heads.iter().any(|pw| word_matches(h, pw)) {
                    continue;
                }
                let linked = m.head == h.index && LINK_RELS.contains(&m.deprel.as_str());
                if h.index == m.index + 1 || linked {
                    spans.push((m.index.min(h.index), m.index.max(h.index)));
                }
            }
        }
    }
    spans
}

/// Topic mentions, overlapping candidates resolved in favour of the longest
/// span (then the leftmost, then topic order).
pub fn match_topics(sentence: &Sentence, topics: &TopicSet) -> Vec<TopicMention> {
    let mut candidates = Vec::new();
    for (order, topic) in topics.topics.iter().enumerate() {
        for (start, end) in topic_candidates(sentence, topic) {
            candidates.push((order, TopicMention {
                topic: topic.name.clone(),
                start,
                end,
                head: span_head(sentence, start, end),
            }));
        }
    }
    candidates.sort_by_key(|(order, m)| (std::cmp::Reverse(m.len()), m.start, *order));
    let mut kept: Vec<TopicMention> = Vec::new();
    for (_, m) in candidates {
        if kept.iter().all(|k| m.end < k.start || m.start > k.end) {
            kept.push(m);
        }
    }
    kept.sort_by_key(|m| m.start);
    kept
}

/// Country of the gazetteer hit nearest to the mention in the dependency
/// tree, ties to the leftmost; the outlet country when there is no hit.
pub fn resolve_location(
    sentence: &Sentence,
    mention: &TopicMention,
    article: &RawArticle,
    gazetteer: &Gazetteer,
) -> String {
    gazetteer
        .find(sentence)
        .into_iter()
        .map(|hit| {
            let d = (hit.start..=hit.end)
                .map(|i| sentence.tree_distance(i, mention.head))
                .min()
                .unwrap_or(usize::MAX);
            (d, hit.start, hit.country)
        })
        .min_by_key(|(d, start, _)| (*d, *start))
        .map(|(_, _, c)| c)
        .unwrap_or_else(|| article.outlet_country.clone())
}

fn is_governor(pos: Pos) -> bool {
    matches!(pos, Pos::Verb | Pos::Aux | Pos::Adj)
}

/// The governing predicate of the mention, its object or predicate
/// complement, and the modifiers and negators of everything collected, all
/// within [`MAX_HOPS`] of the mention head. Mention tokens are never part of
/// the chunk.
pub fn extract_dependents(sentence: &Sentence, mention: &TopicMention) -> Chunk {
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    let add = |i: usize, d: usize, depth: &mut BTreeMap<usize, usize>| {
        if d <= MAX_HOPS && !mention.contains(i) {
            let e = depth.entry(i).or_insert(d);
            *e = (*e).min(d);
        }
    };

    let mut cur = mention.head;
    for hop in 1..=MAX_HOPS {
        let h = sentence.token(cur).head;
        if h == 0 {
            break;
        }
        if is_governor(sentence.token(h).pos) && !mention.contains(h) {
            add(h, hop, &mut depth);
            for c in sentence.children(h) {
                let rel = c.deprel.as_str();
                let complement = PREDICATE_RELS.contains(&rel)
                    && matches!(c.pos, Pos::Adj | Pos::Noun | Pos::Propn);
                if OBJECT_RELS.contains(&rel) || complement {
                    add(c.index, hop + 1, &mut depth);
                }
            }
            break;
        }
        cur = h;
    }

    let mut frontier: Vec<(usize, usize)> = depth.iter().map(|(&i, &d)| (i, d)).collect();
    frontier.push((mention.head, 0));
    while let Some((t, d)) = frontier.pop() {
        if d >= MAX_HOPS {
            continue;
        }
        for c in sentence.children(t) {
            if mention.contains(c.index) || !MODIFIER_RELS.contains(&c.deprel.as_str()) {
                continue;
            }
            let better = depth.get(&c.index).map_or(true, |&old| d + 1 < old);
            if better {
                add(c.index, d + 1, &mut depth);
                frontier.push((c.index, d + 1));
            }
        }
    }

    Chunk {
        terms: depth
            .keys()
            .map(|&i| {
                let t = sentence.token(i);
                ChunkTerm {
                    index: i,
                    lemma: t.norm_lemma(),
                    head: t.head,
                }
            })
            .collect(),
    }
}

/// Mean lexicon score of the chunk, with intensifiers scaling the term they
/// modify, an odd count of negators flipping the sign, and the topic tone
/// applied last. Clipped to [-1, 1].
pub fn score_chunk(chunk: &Chunk, topic: &TopicSpec, lexicon: &Lexicon) -> ChunkScore {
    let mut scored: Vec<(usize, f64)> = chunk
        .terms
        .iter()
        .filter_map(|t| lexicon.score(&t.lemma).map(|s| (t.index, s)))
        .collect();
    if scored.is_empty() {
        return ChunkScore {
            score: 0.0,
            n_terms: 0,
        };
    }
    for t in &chunk.terms {
        if let Some(m) = lexicon.intensifier(&t.lemma) {
            if let Some(target) = scored.iter_mut().find(|(i, _)| *i == t.head) {
                target.1 *= m;
            }
        }
    }
    let mut base = scored.iter().map(|(_, s)| s).sum::<f64>() / scored.len() as f64;
    let negators = chunk.terms.iter().filter(|t| lexicon.is_negator(&t.lemma)).count();
    if negators % 2 == 1 {
        base = -base;
    }
    ChunkScore {
        score: (base * topic.keyword_tone).clamp(-1.0, 1.0),
        n_terms: scored.len(),
    }
}

/// Scoring resources plus the zero-retention switch.
#[derive(Debug, Clone)]
pub struct Engine {
    pub lexicon: Lexicon,
    pub topics: TopicSet,
    pub gazetteer: Gazetteer,
    /// Keep mentions whose chunk has no lexicon term (score 0, `n_terms` 0).
    pub keep_zero: bool,
}

impl Engine {
    pub fn shipped() -> Engine {
        Engine {
            lexicon: Lexicon::shipped(),
            topics: TopicSet::shipped(),
            gazetteer: Gazetteer::shipped(),
            keep_zero: false,
        }
    }

    pub fn score_sentence(&self, sentence: &Sentence, article: &RawArticle) -> Vec<SentenceScore> {
        let mut out = Vec::new();
        for mention in match_topics(sentence, &self.topics) {
            let topic = self.topics.get(&mention.topic).expect("mention topic exists");
            let chunk = extract_dependents(sentence, &mention);
            let cs = score_chunk(&chunk, topic, &self.lexicon);
            if cs.n_terms == 0 && !self.keep_zero {
                continue;
            }
            out.push(SentenceScore {
                article_id: article.article_id.clone(),
                sentence_index: sentence.sentence_index,
                date: article.publish_date,
                topic: mention.topic.clone(),
                country: resolve_location(sentence, &mention, article, &self.gazetteer),
                score: cs.score,
                n_terms: cs.n_terms,
            });
        }
        out
    }

    pub fn score_article(&self, article: &RawArticle, sentences: &[Sentence]) -> Vec<SentenceScore> {
        sentences
            .iter()
            .flat_map(|s| self.score_sentence(s, article))
            .collect()
    }
}

/// Scores every sentence of an article, dropping mentions without lexicon terms.
pub fn score_article(
    article: &RawArticle,
    sentences: &[Sentence],
    topics: &TopicSet,
    lexicon: &Lexicon,
    gazetteer: &Gazetteer,
) -> Vec<SentenceScore> {
    let engine = Engine {
        lexicon: lexicon.clone(),
        topics: topics.clone(),
        gazetteer: gazetteer.clone(),
        keep_zero: false,
    };
    engine.score_article(article, sentences)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::shallow::parse_with_ids;
    use crate::text::shallow_parse;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    const LA_TRIBUNE: &str = "The French economy has been experiencing its worst recession since 1968, while Italy entered into recession with a GDP drop.";

    fn article(country: &str, body: &str) -> RawArticle {
        RawArticle {
            article_id: "a1".into(),
            outlet: "La Tribune".into(),
            outlet_country: country.into(),
            publish_date: NaiveDate::from_ymd_opt(2009, 3, 2).unwrap(),
            title: String::new(),
            body: body.into(),
            language: "en".into(),
        }
    }

    fn lemma_sentence(lemmas: &[&str]) -> Sentence {
        // flat tree: every token attached to the last one
        let n = lemmas.len();
        Sentence {
            article_id: "a".into(),
            sentence_index: 0,
            tokens: lemmas
                .iter()
                .enumerate()
                .map(|(i, l)| Token {
                    index: i + 1,
                    surface: l.to_string(),
                    lemma: l.to_string(),
                    pos: Pos::Noun,
                    head: if i + 1 == n { 0 } else { n },
                    deprel: "dep".into(),
                })
                .collect(),
        }
    }

    fn spans(ms: &[TopicMention]) -> Vec<(&str, usize, usize)> {
        ms.iter().map(|m| (m.topic.as_str(), m.start, m.end)).collect()
    }

    #[test]
    fn single_term_mention() {
        let s = lemma_sentence(&["the", "economy", "grow"]);
        assert_eq!(spans(&match_topics(&s, &TopicSet::shipped())), vec![("economy", 2, 2)]);
    }

    #[test]
    fn cross_product_mention() {
        let s = lemma_sentence(&["industrial", "production", "fall"]);
        assert_eq!(spans(&match_topics(&s, &TopicSet::shipped())), vec![("manuf", 1, 2)]);
    }

    #[test]
    fn longest_span_wins_across_topics() {
        let s = lemma_sentence(&["european", "central", "bank", "cut", "rate"]);
        assert_eq!(spans(&match_topics(&s, &TopicSet::shipped())), vec![("monpol", 1, 3)]);
        let s = shallow_parse("The Bank of England raised interest rates.").unwrap();
        assert_eq!(
            spans(&match_topics(&s, &TopicSet::shipped())),
            vec![("monpol", 2, 4), ("monpol", 6, 7)]
        );
    }

    #[test]
    fn cross_product_linked_by_modifier_relation() {
        let mut s = lemma_sentence(&["sector", "x", "financial"]);
        s.tokens[2].head = 1;
        s.tokens[2].deprel = "amod".into();
        s.tokens[0].head = 0;
        s.tokens[1].head = 1;
        assert_eq!(spans(&match_topics(&s, &TopicSet::shipped())), vec![("finsector", 1, 3)]);
    }

    #[test]
    fn location_from_adjacent_demonym() {
        let s = shallow_parse(LA_TRIBUNE).unwrap();
        let ms = match_topics(&s, &TopicSet::shipped());
        assert_eq!(ms.len(), 1);
        let a = article("DE", LA_TRIBUNE);
        assert_eq!(resolve_location(&s, &ms[0], &a, &Gazetteer::shipped()), "FR");
    }

    #[test]
    fn location_fallback_and_tie() {
        let g = Gazetteer::shipped();
        let s = shallow_parse("The economy is growing.").unwrap();
        let m = &match_topics(&s, &TopicSet::shipped())[0];
        assert_eq!(resolve_location(&s, m, &article("DE", ""), &g), "DE");

        // "Spain" and "Italy" both attach to the mention head: equal distance.
        let mut s = lemma_sentence(&["Spain", "Italy", "economy"]);
        s.tokens[0].surface = "Spain".into();
        s.tokens[1].surface = "Italy".into();
        let m = &match_topics(&s, &TopicSet::shipped())[0];
        assert_eq!(s.tree_distance(1, 3), s.tree_distance(2, 3));
        assert_eq!(resolve_location(&s, m, &article("DE", ""), &g), "ES");
    }

    #[test]
    fn dependents_of_example_sentence() {
        let s = shallow_parse(LA_TRIBUNE).unwrap();
        let m = &match_topics(&s, &TopicSet::shipped())[0];
        let chunk = extract_dependents(&s, m);
        let lemmas = chunk.lemmas();
        for l in ["experience", "worst", "recession"] {
            assert!(lemmas.contains(&l), "{l} missing from {lemmas:?}");
        }
        let lex = Lexicon::shipped();
        let scored: Vec<&str> = lemmas.into_iter().filter(|l| lex.score(l).is_some()).collect();
        assert_eq!(scored, vec!["experience", "worst", "recession"]);
    }

    #[test]
    fn dependents_with_negation() {
        let s = shallow_parse("the economy is not growing").unwrap();
        let m = &match_topics(&s, &TopicSet::shipped())[0];
        let chunk = extract_dependents(&s, m);
        let mut lemmas = chunk.lemmas();
        lemmas.sort();
        assert_eq!(lemmas, vec!["grow", "not"]);
    }

    #[test]
    fn determiner_only_mention_is_empty() {
        let s = shallow_parse("The economy.").unwrap();
        let m = &match_topics(&s, &TopicSet::shipped())[0];
        let chunk = extract_dependents(&s, m);
        assert!(chunk.terms.is_empty());
        let topic = TopicSet::shipped();
        let cs = score_chunk(&chunk, topic.get("economy").unwrap(), &Lexicon::shipped());
        assert_eq!((cs.score, cs.n_terms), (0.0, 0));
    }

    #[test]
    fn hop_cap() {
        // economy <- a <- b <- c <- verb: the verb is four hops away.
        let mut s = lemma_sentence(&["economy", "a", "b", "c", "grow"]);
        for (i, t) in s.tokens.iter_mut().enumerate() {
            t.head = if i == 4 { 0 } else { i + 2 };
        }
        s.tokens[4].pos = Pos::Verb;
        let m = &match_topics(&s, &TopicSet::shipped())[0];
        assert!(extract_dependents(&s, m).terms.is_empty());
    }

    #[test]
    fn chunk_scores() {
        let lex = Lexicon::shipped();
        let topics = TopicSet::shipped();
        let economy = topics.get("economy").unwrap();
        let unemployment = topics.get("unemployment").unwrap();

        let cs = score_chunk(&Chunk::from_lemmas(&["experience", "worst", "recession"]), economy, &lex);
        let expected = (-0.2 - 0.95 - 0.8) / 3.0;
        assert!((cs.score - expected).abs() < 1e-12);
        assert_eq!(cs.n_terms, 3);

        let cs = score_chunk(&Chunk::from_lemmas(&["increase"]), unemployment, &lex);
        assert_eq!(cs.score, -0.5);
        let cs = score_chunk(&Chunk::from_lemmas(&["grow", "not"]), economy, &lex);
        assert_eq!(cs.score, -0.6);
        let cs = score_chunk(&Chunk::from_lemmas(&["interest", "rate", "raise"]), topics.get("monpol").unwrap(), &lex);
        assert!(cs.score > 0.0);
    }

    #[test]
    fn intensifier_scales_its_head_only() {
        let lex = Lexicon::shipped();
        let topics = TopicSet::shipped();
        let s = shallow_parse("Unemployment rose sharply.").unwrap();
        let m = &match_topics(&s, &topics)[0];
        let chunk = extract_dependents(&s, m);
        let cs = score_chunk(&chunk, topics.get("unemployment").unwrap(), &lex);
        assert!((cs.score - (0.4 * 1.5 * -1.0)).abs() < 1e-12);
        // clipped when the product leaves [-1, 1]
        let mut chunk = Chunk::from_lemmas(&["worst", "extremely"]);
        chunk.terms[1].head = 1;
        let cs = score_chunk(&chunk, topics.get("economy").unwrap(), &lex);
        assert_eq!(cs.score, -1.0);
    }

    #[test]
    fn article_scores() {
        let engine = Engine::shipped();
        let a = article("FR", LA_TRIBUNE);
        let s = shallow_parse(LA_TRIBUNE).unwrap();
        let scores = engine.score_article(&a, &[s]);
        assert_eq!(scores.len(), 1);
        assert_eq!((scores[0].topic.as_str(), scores[0].country.as_str()), ("economy", "FR"));
        assert!(scores[0].score <= -0.5);

        let none = parse_with_ids("Markets were calm.", "a1", 0).unwrap();
        assert!(engine.score_article(&a, &[none]).is_empty());

        let s0 = parse_with_ids("The economy is growing strongly.", "a1", 0).unwrap();
        let s1 = parse_with_ids("Unemployment fell sharply.", "a1", 1).unwrap();
        let scores = engine.score_article(&a, &[s0, s1]);
        assert_eq!(scores.len(), 2);
        assert_eq!((scores[0].sentence_index, scores[1].sentence_index), (0, 1));
        assert!(scores.iter().all(|s| s.score > 0.0));
    }

    #[test]
    fn zero_retention_switch() {
        let mut engine = Engine::shipped();
        let a = article("FR", "");
        let s = shallow_parse("The economy.").unwrap();
        assert!(engine.score_sentence(&s, &a).is_empty());
        engine.keep_zero = true;
        let out = engine.score_sentence(&s, &a);
        assert_eq!((out[0].score, out[0].n_terms), (0.0, 0));
    }

    fn arb_lexicon() -> impl Strategy<Value = (Lexicon, Vec<String>)> {
        prop::collection::vec((-1.0f64..=1.0, 0.05f64..=4.0), 1..12).prop_map(|vals| {
            let mut lex = Lexicon::default();
            let mut words = Vec::new();
            for (i, (s, m)) in vals.iter().enumerate() {
                let w = format!("w{i}");
                lex.insert(&w, *s).unwrap();
                let iw = format!("i{i}");
                lex.insert_intensifier(&iw, *m).unwrap();
                words.push(w);
                words.push(iw);
            }
            lex.insert_negator("not");
            (lex, words)
        })
    }

    proptest! {
        #[test]
        fn score_in_range_and_sign_rules(
            (lex, words) in arb_lexicon(),
            picks in prop::collection::vec((0usize..100, 0usize..8), 1..10),
        ) {
            let mut chunk = Chunk::default();
            for (k, (w, h)) in picks.iter().enumerate() {
                chunk.terms.push(ChunkTerm { index: k + 1, lemma: words[w % words.len()].clone(), head: *h });
            }
            let topics = TopicSet::shipped();
            let econ = topics.get("economy").unwrap();
            let unemp = topics.get("unemployment").unwrap();
            let base = score_chunk(&chunk, econ, &lex);
            prop_assert!((-1.0..=1.0).contains(&base.score));
            prop_assert_eq!(score_chunk(&chunk, unemp, &lex).score, -base.score);

            let mut one = chunk.clone();
            one.terms.push(ChunkTerm { index: 100, lemma: "not".into(), head: 0 });
            prop_assert_eq!(score_chunk(&one, econ, &lex).score, -base.score);
            let mut two = one.clone();
            two.terms.push(ChunkTerm { index: 101, lemma: "not".into(), head: 0 });
            prop_assert_eq!(score_chunk(&two, econ, &lex).score, base.score);
        }

        #[test]
        fn fallback_without_locations(words in prop::collection::vec(prop::sample::select(vec![
            "the", "economy", "grew", "strongly", "inflation", "rose", "banks", "are", "weak", "."
        ]), 1..15)) {
            let text = words.join(" ");
            let s = shallow_parse(&text).unwrap();
            let a = article("PT", &text);
            for m in match_topics(&s, &TopicSet::shipped()) {
                prop_assert_eq!(resolve_location(&s, &m, &a, &Gazetteer::shipped()), "PT");
            }
        }
    }
}
