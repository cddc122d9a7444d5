//! Synthetic economy and news corpus with a planted sentiment signal.
//!
//! A latent monthly AR(1) factor `f` leads GDP: quarterly annualized growth
//! is `mean + snr·f̄_{T−lead} + ḡ_T + ε_T`, where `f̄` is the quarterly mean
//! of `f` and `ḡ` that of a coincident activity factor `g`. Macro series and
//! surveys track `g` only. News sentences about the planted topic are
//! positive with probability `logistic(slope·f)`; every other topic follows
//! its own independent AR(1) factor and carries no information about GDP.
//!
//! Output files: `corpus.jsonl`, `vintages.csv`, `regimes.csv` and a
//! `config.toml` that runs the full pipeline on them.

use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::calendar::{Frequency, Period};
use crate::config::{ExperimentConfig, MacroSeries, Paths};
use crate::figas::TOPIC_NAMES;
use crate::indicators::{Regime, RegimeCalendar, RegimeSpan};
use crate::text::corpus::to_jsonl_line;
use crate::text::RawArticle;
use crate::vintage::csv::write_vintages;
use crate::vintage::{Observation, StylizedCalendar, TransformKind, VintageSeries, VintageStore};

pub const MACRO_IDS: [&str; 3] = ["ip", "retail", "employment"];
pub const SURVEY_IDS: [&str; 6] = ["sv_industry", "sv_consumer", "sv_services", "sv_retail", "sv_construction", "sv_esi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub countries: Vec<String>,
    /// First month of data.
    pub start: String,
    /// Last GDP quarter.
    pub end: String,
    pub planted_topic: String,
    /// Quarters by which the planted factor leads GDP.
    pub lead_quarters: i64,
    /// Loading of GDP growth on the lagged planted factor.
    pub snr: f64,
    pub persistence: f64,
    /// Slope of the logistic link from factor to sentence polarity.
    pub polarity_slope: f64,
    pub min_articles_per_day: usize,
    pub max_articles_per_day: usize,
    pub topic_sentences_per_article: usize,
    pub gdp_noise_sd: f64,
    /// Relative size of the single GDP revision.
    pub revision_sd: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            countries: vec!["FR".into()],
            start: "1995-01".into(),
            end: "2019Q4".into(),
            planted_topic: "economy".into(),
            lead_quarters: 2,
            snr: 2.0,
            persistence: 0.95,
            polarity_slope: 2.0,
            min_articles_per_day: 2,
            max_articles_per_day: 4,
            topic_sentences_per_article: 4,
            gdp_noise_sd: 1.0,
            revision_sd: 0.0005,
        }
    }
}

/// Name used in sentences for each supported country.
pub fn country_name(code: &str) -> Option<&'static str> {
    Some(match code {
        "FR" => "France",
        "DE" => "Germany",
        "IT" => "Italy",
        "ES" => "Spain",
        "GB" => "the United Kingdom",
        "NL" => "the Netherlands",
        _ => return None,
    })
}

/// Sentences for a topic with the intended sign of their score; `{c}` is
/// replaced by the country name.
pub fn templates(topic: &str, positive: bool) -> &'static [&'static str] {
    match (topic, positive) {
        ("economy", true) => &[
            "The economy in {c} is growing strongly.",
            "Analysts expect the economy in {c} to expand.",
            "The economy in {c} is recovering.",
        ],
        ("economy", false) => &[
            "The economy in {c} is shrinking.",
            "Analysts expect the economy in {c} to contract.",
            "The economy in {c} is weakening.",
        ],
        ("finsector", true) => &["The banking sector in {c} is growing.", "The financial sector in {c} is recovering."],
        ("finsector", false) => &["The banking sector in {c} is shrinking.", "The financial sector in {c} is weakening."],
        ("inflation", true) => &["Inflation in {c} is rising.", "Inflation in {c} is accelerating."],
        ("inflation", false) => &["Inflation in {c} is falling.", "Inflation in {c} is slowing."],
        ("manuf", true) => &["Industrial production in {c} is expanding.", "Factory output in {c} is improving."],
        ("manuf", false) => &["Industrial production in {c} is contracting.", "Factory output in {c} is declining."],
        ("monpol", true) => &["The interest rate in {c} is rising.", "The base rate in {c} is increasing."],
        ("monpol", false) => &["The interest rate in {c} is falling.", "The base rate in {c} is declining."],
        ("unemployment", true) => &["Unemployment in {c} is falling.", "Unemployment in {c} is declining."],
        ("unemployment", false) => &["Unemployment in {c} is rising.", "Unemployment in {c} is increasing."],
        _ => &[],
    }
}

const FILLERS: &[&str] = &[
    "Officials met in {c} on Monday.",
    "The report was published in {c} this week.",
    "Reporters gathered in {c} for the briefing.",
];

const TITLES: &[&str] = &["News from {c}", "Briefing from {c}", "Market notes from {c}"];

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Unit-variance AR(1) path started from its stationary law.
fn ar1(n: usize, phi: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let innovation = (1.0 - phi * phi).sqrt();
    let mut x = Vec::with_capacity(n);
    let mut cur = normal(rng);
    for _ in 0..n {
        x.push(cur);
        cur = phi * cur + innovation * normal(rng);
    }
    x
}

/// Everything the generator produces, before it is written to disk.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub articles: Vec<RawArticle>,
    pub store: VintageStore,
    pub regimes: RegimeCalendar,
    pub config: ExperimentConfig,
    /// True annualized growth per country and quarter.
    pub growth: Vec<(String, Period, f64)>,
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid synthetic config: {0}")]
    Invalid(String),
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

struct Months {
    first: Period,
    /// Monthly factor values from `first` on.
    values: Vec<f64>,
}

impl Months {
    fn at(&self, m: Period) -> f64 {
        self.values[self.first.distance(m) as usize]
    }

    fn quarter_mean(&self, q: Period) -> f64 {
        let m0 = Period::containing(q.start_date(), Frequency::Monthly);
        (0..3).map(|k| self.at(m0.offset(k))).sum::<f64>() / 3.0
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<(Period, Period), SynthError> {
        let start = Period::parse(&self.start, Frequency::Monthly).map_err(|e| SynthError::Invalid(e.to_string()))?;
        let end = Period::parse(&self.end, Frequency::Quarterly).map_err(|e| SynthError::Invalid(e.to_string()))?;
        if end.start_date() <= start.start_date() {
            return Err(SynthError::Invalid("end precedes start".into()));
        }
        if !TOPIC_NAMES.contains(&self.planted_topic.as_str()) {
            return Err(SynthError::Invalid(format!("unknown topic `{}`", self.planted_topic)));
        }
        for c in &self.countries {
            if country_name(c).is_none() {
                return Err(SynthError::Invalid(format!("unsupported country `{c}`")));
            }
        }
        if !(0.0..1.0).contains(&self.persistence) {
            return Err(SynthError::Invalid("persistence must lie in [0, 1)".into()));
        }
        if self.lead_quarters < 0 || self.min_articles_per_day > self.max_articles_per_day {
            return Err(SynthError::Invalid("negative lead or empty article range".into()));
        }
        Ok((start, end))
    }
}

fn obs(value: f64, release_date: NaiveDate) -> Observation {
    Observation {
        value,
        release_date,
        pseudo: false,
    }
}

/// Generates the economy and corpus for all countries.
pub fn generate(cfg: &SynthConfig, seed: u64) -> Result<SynthOutput, SynthError> {
    let (start, end) = cfg.validate()?;
    let calendar = StylizedCalendar {
        surveys: SURVEY_IDS.iter().map(|s| s.to_string()).collect(),
        ..StylizedCalendar::default()
    };
    // Monthly data run until every GDP release in the sample is out.
    let last_month = Period::containing(calendar.gdp_release(end), Frequency::Monthly).offset(1);
    // Burn-in so the lagged factor exists for the first quarter.
    let lead_months = 3 * cfg.lead_quarters + 3;
    let first = start.offset(-lead_months);
    let n_months = (first.distance(last_month) + 1) as usize;
    let first_quarter = Period::containing(start.start_date(), Frequency::Quarterly);
    let first_quarter = if Period::containing(first_quarter.start_date(), Frequency::Monthly) < start {
        first_quarter.next()
    } else {
        first_quarter
    };

    let mut store = VintageStore::default();
    let mut articles = Vec::new();
    let mut growth_out = Vec::new();
    let mut regime_quarters: Vec<(Period, bool)> = Vec::new();

    for (ci, country) in cfg.countries.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ci as u64);
        let factors: Vec<Months> = TOPIC_NAMES
            .iter()
            .map(|_| Months {
                first,
                values: ar1(n_months, cfg.persistence, &mut rng),
            })
            .collect();
        let planted = TOPIC_NAMES.iter().position(|t| *t == cfg.planted_topic).expect("validated");
        let activity = Months {
            first,
            values: ar1(n_months, 0.5, &mut rng),
        };

        // GDP: levels from growth, flash at the stylized date, one revision
        // a quarter later.
        let mut gdp = VintageSeries::new("gdp", country, Frequency::Quarterly);
        let mut level = 100.0;
        let mut q = first_quarter;
        let mut first_level = true;
        while q <= end {
            let f = factors[planted].quarter_mean(q.offset(-cfg.lead_quarters));
            let y = 1.5 + cfg.snr * f + activity.quarter_mean(q) + cfg.gdp_noise_sd * normal(&mut rng);
            if first_level {
                first_level = false;
            } else {
                level *= (1.0 + y / 100.0).powf(0.25);
                growth_out.push((country.clone(), q, y));
                if ci == 0 {
                    regime_quarters.push((q, y < 0.0));
                }
            }
            let flash_date = calendar.gdp_release(q);
            let flash = level * (1.0 + cfg.revision_sd * normal(&mut rng));
            gdp.insert(q, obs(flash, flash_date)).expect("ordered releases");
            gdp.insert(q, obs(level, flash_date + Duration::days(91))).expect("ordered releases");
            q = q.next();
        }
        store.insert_series(gdp);

        // Macro levels grow with the activity factor; surveys are levels
        // around 100.
        let months: Vec<Period> = Period::range_inclusive(first, last_month).collect();
        for (k, id) in MACRO_IDS.iter().enumerate() {
            let mut s = VintageSeries::new(id, country, Frequency::Monthly);
            let mut level = 100.0 + 10.0 * k as f64;
            for &m in &months {
                let g = 0.2 + 0.5 * activity.at(m) + 0.5 * normal(&mut rng);
                level *= 1.0 + g / 100.0;
                s.insert(m, obs(level, calendar.monthly_release(m))).expect("ordered releases");
            }
            store.insert_series(s);
        }
        for id in SURVEY_IDS {
            let mut s = VintageSeries::new(id, country, Frequency::Monthly);
            s.early_release_allowed = true;
            for &m in &months {
                let v = 100.0 + 10.0 * (0.6 * activity.at(m) + 0.8 * normal(&mut rng));
                s.insert(m, obs(v, calendar.survey_release(m))).expect("ordered releases");
            }
            store.insert_series(s);
        }

        // Corpus.
        let name = country_name(country).expect("validated");
        let mut day = start.start_date();
        let last_day = last_month.end_date();
        let mut serial = 0usize;
        while day <= last_day {
            let month = Period::containing(day, Frequency::Monthly);
            let count = rng.gen_range(cfg.min_articles_per_day..=cfg.max_articles_per_day);
            for _ in 0..count {
                serial += 1;
                let mut body = Vec::new();
                for _ in 0..cfg.topic_sentences_per_article {
                    let ti = rng.gen_range(0..TOPIC_NAMES.len());
                    let p = logistic(cfg.polarity_slope * factors[ti].at(month));
                    let positive = rng.gen::<f64>() < p;
                    let t = templates(TOPIC_NAMES[ti], positive).choose(&mut rng).expect("templates exist");
                    body.push(t.replace("{c}", name));
                }
                let filler = FILLERS.choose(&mut rng).expect("fillers exist").replace("{c}", name);
                let at = rng.gen_range(0..=body.len());
                body.insert(at, filler);
                let title = TITLES.choose(&mut rng).expect("titles exist").replace("{c}", name);
                articles.push(RawArticle {
                    article_id: format!("{country}-{}-{serial:06}", day.year()),
                    outlet: format!("Synthetic {name} Daily"),
                    outlet_country: country.clone(),
                    publish_date: day,
                    title,
                    body: body.join(" "),
                    language: "en".into(),
                });
            }
            day += Duration::days(1);
        }
    }

    let regimes = regime_calendar(&regime_quarters);
    let config = ExperimentConfig {
        seed: Some(seed),
        countries: cfg.countries.clone(),
        paths: Paths {
            corpus: Some("corpus.jsonl".into()),
            vintages: Some("vintages.csv".into()),
            regimes: Some("regimes.csv".into()),
            output: Some("output".into()),
            ..Paths::default()
        },
        series: crate::config::SeriesConfig {
            macro_series: MACRO_IDS
                .iter()
                .map(|id| MacroSeries {
                    id: id.to_string(),
                    transform: TransformKind::PctGrowth,
                })
                .collect(),
            surveys: SURVEY_IDS.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        },
        calendar,
        ..ExperimentConfig::default()
    };
    Ok(SynthOutput {
        articles,
        store,
        regimes,
        config,
        growth: growth_out,
    })
}

/// Recession spans: runs of at least two quarters of negative growth.
fn regime_calendar(quarters: &[(Period, bool)]) -> RegimeCalendar {
    let mut labels: Vec<Regime> = quarters
        .iter()
        .map(|&(_, neg)| if neg { Regime::Recession } else { Regime::Expansion })
        .collect();
    let mut i = 0;
    while i < labels.len() {
        let mut j = i;
        while j < labels.len() && labels[j] == Regime::Recession {
            j += 1;
        }
        if j - i == 1 {
            labels[i] = Regime::Expansion;
        }
        i = j.max(i + 1);
    }
    let mut spans: Vec<RegimeSpan> = Vec::new();
    for (&(q, _), &label) in quarters.iter().zip(&labels) {
        match spans.last_mut() {
            Some(last) if last.label == label => last.end = q.end_date(),
            _ => spans.push(RegimeSpan {
                start: q.start_date(),
                end: q.end_date(),
                label,
            }),
        }
    }
    RegimeCalendar::new(spans).expect("contiguous spans")
}

/// Writes the fixture files into `dir`; `header` starts every file except
/// the corpus and the config.
pub fn write_fixture(out: &SynthOutput, dir: &Path, header: &str) -> Result<(), SynthError> {
    let err = |path: &Path, e: std::io::Error| SynthError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| err(dir, e))?;
    let corpus = dir.join("corpus.jsonl");
    let mut text = String::new();
    for a in &out.articles {
        text.push_str(&to_jsonl_line(a));
        text.push('\n');
    }
    std::fs::write(&corpus, text).map_err(|e| err(&corpus, e))?;
    let vintages = dir.join("vintages.csv");
    let mut buf = Vec::new();
    write_vintages(&mut buf, header, &out.store).map_err(|e| err(&vintages, e))?;
    std::fs::write(&vintages, buf).map_err(|e| err(&vintages, e))?;
    let regimes = dir.join("regimes.csv");
    out.regimes.write(&regimes, header).map_err(|e| err(&regimes, e))?;
    let config = dir.join("config.toml");
    std::fs::write(&config, out.config.to_toml()).map_err(|e| err(&config, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figas::Engine;
    use crate::text::shallow::parse_with_ids;

    fn article(country: &str) -> RawArticle {
        RawArticle {
            article_id: "a".into(),
            outlet: "o".into(),
            // The location must come from the sentence, not the outlet.
            outlet_country: if country == "US" { "FR" } else { "US" }.into(),
            publish_date: NaiveDate::from_ymd_opt(2010, 1, 1).unwrap(),
            title: String::new(),
            body: String::new(),
            language: "en".into(),
        }
    }

    #[test]
    fn every_template_scores_its_topic_sign_and_country() {
        let engine = Engine::shipped();
        let mut failures = Vec::new();
        for country in ["FR", "DE", "IT", "ES", "GB", "NL"] {
            let name = country_name(country).unwrap();
            for topic in TOPIC_NAMES {
                for positive in [true, false] {
                    for t in templates(topic, positive) {
                        let text = t.replace("{c}", name);
                        let s = parse_with_ids(&text, "a", 0).unwrap();
                        let scores = engine.score_sentence(&s, &article(country));
                        let ok = scores.len() == 1
                            && scores[0].topic == topic
                            && scores[0].country == country
                            && scores[0].score != 0.0
                            && (scores[0].score > 0.0) == positive;
                        if !ok {
                            failures.push(format!("{text}: {scores:?}"));
                        }
                    }
                }
            }
            for t in FILLERS.iter().chain(TITLES) {
                let s = parse_with_ids(&t.replace("{c}", name), "a", 0).unwrap();
                if !engine.score_sentence(&s, &article(country)).is_empty() {
                    failures.push(format!("filler scored: {t}"));
                }
            }
        }
        assert!(failures.is_empty(), "{}", failures.join("\n"));
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let cfg = SynthConfig {
            start: "2005-01".into(),
            end: "2007Q4".into(),
            ..SynthConfig::default()
        };
        let a = generate(&cfg, 1).unwrap();
        let b = generate(&cfg, 1).unwrap();
        let c = generate(&cfg, 2).unwrap();
        assert_eq!(a.articles, b.articles);
        assert_eq!(a.store, b.store);
        assert_ne!(a.articles, c.articles);
    }

    #[test]
    fn releases_follow_the_calendar() {
        let cfg = SynthConfig {
            start: "2005-01".into(),
            end: "2007Q4".into(),
            ..SynthConfig::default()
        };
        let out = generate(&cfg, 3).unwrap();
        let gdp = out.store.get("FR", "gdp").unwrap();
        for (q, o) in gdp.releases() {
            assert!(o.release_date > q.end_date());
        }
        assert_eq!(gdp.releases_of(Period::quarter(2007, 4)).len(), 2);
        let sv = out.store.get("FR", "sv_esi").unwrap();
        let o = sv.first_release(Period::month(2006, 3)).unwrap();
        assert_eq!(o.release_date, NaiveDate::from_ymd_opt(2006, 3, 20).unwrap());
        let targets = crate::vintage::target_releases(gdp).unwrap();
        assert!(targets.iter().any(|t| t.quarter == Period::quarter(2007, 4)));
    }

    #[test]
    fn regimes_need_two_negative_quarters() {
        let q = |i| Period::quarter(2000, 1).offset(i);
        let cal = regime_calendar(&[(q(0), false), (q(1), true), (q(2), false), (q(3), true), (q(4), true), (q(5), false)]);
        let labels: Vec<Regime> = cal.spans().iter().map(|s| s.label).collect();
        assert_eq!(labels, vec![Regime::Expansion, Regime::Recession, Regime::Expansion]);
        assert_eq!(cal.spans()[1].start, q(3).start_date());
    }
}
