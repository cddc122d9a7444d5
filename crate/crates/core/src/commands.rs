//! Pipeline stages behind the command-line subcommands.
//!
//! Every stage reads its inputs from the experiment config, writes its
//! outputs under the configured output directory and returns an outcome.
//! Stages recompute what they need from the raw inputs, so each can run on
//! its own and the outputs depend only on the config file and the seed.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::calendar::{Frequency, Period};
use crate::config::{hash_text, ConfigError, LoadedConfig};
use crate::diag::Diagnostic;
use crate::eval::oos::{build_panels, run_oos_on};
use crate::eval::{
    aspa_test, fluctuation_test, in_sample, msfe_ratio, pa_test, AspaOptions, EvalError, ForecastRecord,
    LossPanel, ARX,
};
use crate::figas::{Engine, FigasError, Gazetteer, Lexicon, SentenceScore, TopicSet};
use crate::indicators::{
    aggregate_daily_with, cross_correlations, regime_density, resample_all, standardize, DailySentiment, IndicatorError, IndicatorSeries,
    RegimeCalendar,
};
use crate::output::{self, *};
use crate::synth::{self, SynthConfig, SynthError};
use crate::text::conllu::{load_parsed, write_conllu};
use crate::text::corpus::ingest_corpus;
use crate::text::{parse_article, RawArticle, Sentence, TextError};
use crate::vintage::csv::{read_vintages, write_vintages};
use crate::vintage::{target_releases, Observation, TargetRelease, VintageError, VintageStore};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Figas(#[from] FigasError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error(transparent)]
    Vintage(#[from] VintageError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Output(#[from] output::OutputError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("config has no paths.{0}")]
    MissingPath(&'static str),
    #[error("look-ahead audit failed with {count} violation(s); first: {first}")]
    Audit { count: usize, first: String },
    #[error("{0}")]
    Fatal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    /// Some records or cells were skipped; see the diagnostics file.
    Partial,
}

#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub status: Status,
    /// One line per fact worth printing.
    pub summary: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
    pub files: Vec<PathBuf>,
}

impl CommandOutcome {
    fn new(status: Status) -> Self {
        CommandOutcome {
            status,
            summary: Vec::new(),
            diagnostics: Vec::new(),
            files: Vec::new(),
        }
    }
}

pub fn meta(cfg: &LoadedConfig) -> RunMeta {
    RunMeta::new(&cfg.hash, cfg.seed)
}

/// A seed for one named stochastic computation, stable across runs and
/// independent of the order in which computations are performed.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

fn require<'a>(path: &'a Option<PathBuf>, name: &'static str) -> Result<&'a Path, CommandError> {
    path.as_deref().ok_or(CommandError::MissingPath(name))
}

fn write_diagnostics(dir: &Path, meta: &RunMeta, stage: &str, diags: &[Diagnostic]) -> Result<PathBuf, CommandError> {
    let path = dir.join(format!("diagnostics_{stage}.txt"));
    let mut body = String::new();
    for d in diags {
        let _ = writeln!(body, "{d}");
    }
    write_text(&path, meta, &body)?;
    Ok(path)
}

fn finish(cfg: &LoadedConfig, stage: &str, mut outcome: CommandOutcome) -> Result<CommandOutcome, CommandError> {
    let path = write_diagnostics(&cfg.output_dir(), &meta(cfg), stage, &outcome.diagnostics)?;
    outcome.files.push(path);
    if !outcome.diagnostics.is_empty() {
        outcome.summary.push(format!("{} diagnostic(s) written", outcome.diagnostics.len()));
    }
    Ok(outcome)
}

pub fn engine(cfg: &LoadedConfig) -> Result<Engine, CommandError> {
    let p = &cfg.config.paths;
    let mut topics = match &p.topics {
        Some(path) => TopicSet::load(path)?,
        None => TopicSet::shipped(),
    };
    topics.topics.retain(|t| cfg.config.topics.contains(&t.name));
    Ok(Engine {
        lexicon: match &p.lexicon {
            Some(path) => Lexicon::load(path)?,
            None => Lexicon::shipped(),
        },
        topics,
        gazetteer: match &p.gazetteer {
            Some(path) => Gazetteer::load(path)?,
            None => Gazetteer::shipped(),
        },
        keep_zero: cfg.config.tuning.keep_zero,
    })
}

/// Sentences of every article, from the parse file when configured and from
/// the built-in parser otherwise. Aligned with `articles`.
fn sentences_for(cfg: &LoadedConfig, articles: &[RawArticle]) -> Result<(Vec<Vec<Sentence>>, Vec<Diagnostic>), CommandError> {
    let include_title = cfg.config.tuning.include_titles;
    match &cfg.config.paths.parses {
        Some(path) => {
            let ids: HashSet<String> = articles.iter().map(|a| a.article_id.clone()).collect();
            let parsed = load_parsed(path, Some(&ids))?;
            let mut by_article = parsed.by_article();
            let mut diags = parsed.diagnostics;
            let sentences = articles
                .iter()
                .map(|a| {
                    by_article.remove(&a.article_id).unwrap_or_else(|| {
                        diags.push(Diagnostic::new(&a.article_id, "no parsed sentences"));
                        Vec::new()
                    })
                })
                .collect();
            Ok((sentences, diags))
        }
        None => {
            let parts: Vec<(Vec<Sentence>, Vec<Diagnostic>)> = articles.par_iter().map(|a| parse_article(a, include_title)).collect();
            let mut diags = Vec::new();
            let sentences = parts
                .into_iter()
                .map(|(s, d)| {
                    diags.extend(d);
                    s
                })
                .collect();
            Ok((sentences, diags))
        }
    }
}

/// Every sentence score of the corpus, in article then sentence order.
pub struct Scored {
    pub articles: Vec<RawArticle>,
    pub scores: Vec<SentenceScore>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn score_corpus(cfg: &LoadedConfig) -> Result<Scored, CommandError> {
    let corpus = ingest_corpus(require(&cfg.config.paths.corpus, "corpus")?)?;
    let engine = engine(cfg)?;
    let (sentences, parse_diags) = sentences_for(cfg, &corpus.articles)?;
    let scores: Vec<SentenceScore> = corpus
        .articles
        .par_iter()
        .zip(sentences.par_iter())
        .flat_map_iter(|(a, s)| engine.score_article(a, s))
        .collect();
    let mut diagnostics = corpus.diagnostics;
    diagnostics.extend(parse_diags);
    Ok(Scored {
        articles: corpus.articles,
        scores,
        diagnostics,
    })
}

fn in_countries(cfg: &LoadedConfig, country: &str) -> bool {
    cfg.config.countries.is_empty() || cfg.config.countries.iter().any(|c| c == country)
}

/// Daily records and monthly series of the configured countries.
pub fn monthly_indicators(cfg: &LoadedConfig, scores: &[SentenceScore]) -> (Vec<DailySentiment>, Vec<IndicatorSeries>) {
    let kept: Vec<SentenceScore> = scores.iter().filter(|s| in_countries(cfg, &s.country)).cloned().collect();
    let daily = aggregate_daily_with(&kept, cfg.config.tuning.weighting);
    let monthly = resample_all(&daily, Frequency::Monthly);
    (daily, monthly)
}

pub fn ingest(cfg: &LoadedConfig) -> Result<CommandOutcome, CommandError> {
    let corpus = ingest_corpus(require(&cfg.config.paths.corpus, "corpus")?)?;
    let include_title = cfg.config.tuning.include_titles;
    let parts: Vec<(Vec<Sentence>, Vec<Diagnostic>)> = corpus.articles.par_iter().map(|a| parse_article(a, include_title)).collect();
    let mut outcome = CommandOutcome::new(if corpus.diagnostics.is_empty() { Status::Clean } else { Status::Partial });
    outcome.diagnostics = corpus.diagnostics;
    let mut sentences = Vec::new();
    for (s, d) in parts {
        sentences.extend(s);
        outcome.diagnostics.extend(d);
    }
    let path = cfg.output_dir().join("parses.conllu");
    let body = format!("\n{}", write_conllu(&sentences));
    write_text(&path, &meta(cfg), &body)?;
    outcome.summary.push(format!("{} articles, {} sentences", corpus.articles.len(), sentences.len()));
    outcome.files.push(path);
    finish(cfg, "ingest", outcome)
}

pub fn sentiment(cfg: &LoadedConfig) -> Result<CommandOutcome, CommandError> {
    let scored = score_corpus(cfg)?;
    let rows: Vec<ScoreRow> = scored
        .scores
        .iter()
        .map(|s| ScoreRow {
            article_id: s.article_id.clone(),
            sentence_index: s.sentence_index,
            topic: s.topic.clone(),
            country: s.country.clone(),
            score: s.score,
            n_terms: s.n_terms,
        })
        .collect();
    let path = cfg.output_dir().join("scores.csv");
    write_csv(&path, &meta(cfg), SCORE_COLUMNS, &rows)?;
    let mut counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for s in &scored.scores {
        *counts.entry((s.country.as_str(), s.topic.as_str())).or_default() += 1;
    }
    let status = if scored.diagnostics.is_empty() { Status::Clean } else { Status::Partial };
    let mut outcome = CommandOutcome::new(status);
    outcome.summary.push(format!("{} articles, {} scored mentions", scored.articles.len(), rows.len()));
    for ((country, topic), n) in counts {
        outcome.summary.push(format!("{country} {topic}: {n}"));
    }
    outcome.diagnostics = scored.diagnostics;
    outcome.files.push(path);
    finish(cfg, "sentiment", outcome)
}

pub fn indicators(cfg: &LoadedConfig) -> Result<CommandOutcome, CommandError> {
    let scored = score_corpus(cfg)?;
    let (daily, monthly) = monthly_indicators(cfg, &scored.scores);
    let meta = meta(cfg);
    let dir = cfg.output_dir();
    let mut rows: Vec<IndicatorRow> = daily
        .iter()
        .map(|d| IndicatorRow {
            country: d.country.clone(),
            name: d.topic.clone(),
            frequency: Frequency::Daily.to_string(),
            period: d.date.to_string(),
            value: Some(d.mean_score),
        })
        .collect();
    for s in &monthly {
        for (p, v) in s.periods().zip(&s.values) {
            rows.push(IndicatorRow {
                country: s.country.clone(),
                name: s.name.clone(),
                frequency: Frequency::Monthly.to_string(),
                period: p.to_string(),
                value: *v,
            });
        }
    }
    let mut outcome = CommandOutcome::new(Status::Clean);
    let path = dir.join("indicators.csv");
    write_csv(&path, &meta, INDICATOR_COLUMNS, &rows)?;
    outcome.files.push(path);
    outcome.summary.push(format!("{} daily records, {} monthly series", daily.len(), monthly.len()));
    outcome.diagnostics = scored.diagnostics;

    let mut standardized = Vec::new();
    for s in &monthly {
        match standardize(s) {
            Ok(z) => standardized.push(z),
            Err(e) => outcome.diagnostics.push(Diagnostic::new(format!("{}/{}", s.country, s.name), e.to_string())),
        }
    }
    let corr = cross_correlations(&standardized);
    let mut body = String::from("row_country,row_name,col_country,col_name,correlation\n");
    for (i, a) in corr.keys.iter().enumerate() {
        for (j, b) in corr.keys.iter().enumerate() {
            let v = corr.values[i][j].map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(body, "{},{},{},{},{v}", a.0, a.1, b.0, b.1);
        }
    }
    outcome.diagnostics.extend(corr.diagnostics);
    let path = dir.join("correlations.csv");
    write_text(&path, &meta, &body)?;
    outcome.files.push(path);

    if let Some(regimes) = &cfg.config.paths.regimes {
        let calendar = RegimeCalendar::load(regimes)?;
        let mut body = String::from("country,name,regime,n_obs,bandwidth,x,density\n");
        for s in &standardized {
            let (curves, diags) = regime_density(s, &calendar);
            outcome.diagnostics.extend(diags);
            for c in curves {
                for (x, y) in c.grid.iter().zip(&c.density) {
                    let _ = writeln!(body, "{},{},{},{},{},{x},{y}", s.country, s.name, c.regime, c.n_obs(), c.bandwidth);
                }
            }
        }
        let path = dir.join("densities.csv");
        write_text(&path, &meta, &body)?;
        outcome.files.push(path);
    }
    if !outcome.diagnostics.is_empty() {
        outcome.status = Status::Partial;
    }
    finish(cfg, "indicators", outcome)
}

pub fn load_store(cfg: &LoadedConfig) -> Result<VintageStore, CommandError> {
    Ok(read_vintages(require(&cfg.config.paths.vintages, "vintages")?, &cfg.config.calendar)?)
}

/// First-release GDP growth targets per configured country.
pub fn targets(cfg: &LoadedConfig, store: &VintageStore) -> Result<BTreeMap<String, Vec<TargetRelease>>, CommandError> {
    let mut out = BTreeMap::new();
    for country in &cfg.config.countries {
        let gdp = store
            .get(country, &cfg.config.series.gdp)
            .ok_or_else(|| CommandError::Fatal(format!("no `{}` series for {country} in the vintages", cfg.config.series.gdp)))?;
        out.insert(country.clone(), target_releases(gdp)?);
    }
    Ok(out)
}

/// Adds each monthly sentiment series to the store, released at the end of
/// its month.
pub fn add_sentiment(cfg: &LoadedConfig, store: &mut VintageStore, monthly: &[IndicatorSeries]) -> Result<(), CommandError> {
    for s in monthly {
        let id = cfg.sentiment_id(&s.name);
        let series = store.entry(&s.country, &id, Frequency::Monthly);
        for (p, v) in s.observed() {
            series.insert(
                p,
                Observation {
                    value: v,
                    release_date: cfg.config.calendar.sentiment_release(p),
                    pseudo: false,
                },
            )?;
        }
    }
    Ok(())
}

pub fn vintages(cfg: &LoadedConfig) -> Result<CommandOutcome, CommandError> {
    let store = load_store(cfg)?;
    let meta = meta(cfg);
    let dir = cfg.output_dir();
    let path = dir.join("vintages_normalized.csv");
    let mut buf = Vec::new();
    write_vintages(&mut buf, &meta.header_line(), &store).map_err(|e| output::OutputError::new(&path, e))?;
    write_bytes(&path, &buf)?;
    let mut outcome = CommandOutcome::new(Status::Clean);
    outcome.files.push(path);
    let pseudo: usize = store.iter().map(|s| s.pseudo_count()).sum();
    outcome.summary.push(format!("{} series, {pseudo} imputed release dates", store.len()));
    let mut rows = Vec::new();
    for (country, t) in targets(cfg, &store)? {
        outcome.summary.push(format!("{country}: {} GDP targets", t.len()));
        rows.extend(t.into_iter().map(|r| TargetRow {
            country: r.country,
            quarter: r.quarter.to_string(),
            release_date: r.release_date.to_string(),
            value: r.value,
        }));
    }
    let path = dir.join("targets.csv");
    write_csv(&path, &meta, TARGET_COLUMNS, &rows)?;
    outcome.files.push(path);
    finish(cfg, "vintages", outcome)
}

/// Evaluation tables computed from forecast records.
#[derive(Debug, Clone, Default)]
pub struct EvalTables {
    pub msfe: Vec<MsfeRow>,
    pub aspa: Vec<EvaluationRow>,
    pub fluctuation: Vec<FluctuationRow>,
    pub pa: Vec<PaRow>,
    pub diagnostics: Vec<Diagnostic>,
}

/// `ARXS:<id>` models appear under their indicator id.
fn sentiment_label(model: &str) -> &str {
    model.strip_prefix("ARXS:").unwrap_or(model)
}

pub fn evaluate_records(cfg: &LoadedConfig, records: &[ForecastRecord]) -> EvalTables {
    let grid = cfg.config.horizons.grid();
    let tuning = &cfg.config.tuning;
    let subsets: Vec<(&str, Vec<u32>)> = [("nowcast", grid.nowcast()), ("forecast", grid.forecast())]
        .into_iter()
        .filter(|(_, h)| !h.is_empty())
        .collect();
    let mut out = EvalTables::default();
    let countries: Vec<&String> = cfg.config.countries.iter().collect();
    let models: Vec<String> = {
        let set: std::collections::BTreeSet<&str> = records.iter().map(|r| r.model.as_str()).filter(|m| *m != ARX).collect();
        set.into_iter().map(str::to_string).collect()
    };
    for country in countries {
        for model in &models {
            for &h in &grid.horizons {
                match msfe_ratio(records, model, ARX, country, h) {
                    Ok(r) => out.msfe.push(MsfeRow {
                        country: country.clone(),
                        model: model.clone(),
                        horizon: h,
                        msfe_ratio: r,
                    }),
                    Err(e) => out.diagnostics.push(Diagnostic::new(format!("msfe {country} {model} h={h}"), e.to_string())),
                }
                let pa = LossPanel::build(records, model, ARX, country, &[h])
                    .and_then(|p| pa_test(&p.differentials[0], crate::eval::pa::steps_for_horizon(h)));
                match pa {
                    Ok(p) => out.pa.push(PaRow {
                        country: country.clone(),
                        model: model.clone(),
                        horizon: h,
                        p_value: p,
                    }),
                    Err(e) => out.diagnostics.push(Diagnostic::new(format!("pa {country} {model} h={h}"), e.to_string())),
                }
            }
            for (subset, horizons) in &subsets {
                let here = format!("{country} {model} {subset}");
                let panel = match LossPanel::build(records, model, ARX, country, horizons) {
                    Ok(p) => p,
                    Err(e) => {
                        out.diagnostics.push(Diagnostic::new(&here, e.to_string()));
                        continue;
                    }
                };
                let opts = AspaOptions {
                    block_length: (tuning.block_length > 0).then_some(tuning.block_length),
                    bootstrap: tuning.bootstrap,
                    weights: tuning.aspa_weights,
                    seed: derive_seed(cfg.seed, &format!("aspa/{here}")),
                };
                match aspa_test(&panel.differentials, subset, &opts) {
                    Ok(r) => out.aspa.push(EvaluationRow {
                        country: country.clone(),
                        sentiment: sentiment_label(model).to_string(),
                        subset: subset.to_string(),
                        p_value: r.p_value,
                    }),
                    Err(e) => out.diagnostics.push(Diagnostic::new(format!("aspa {here}"), e.to_string())),
                }
                // Equal-weight mean differential across the subset's horizons.
                let t = panel.len();
                let k = panel.differentials.len() as f64;
                let mean_d: Vec<f64> = (0..t).map(|i| panel.differentials.iter().map(|d| d[i]).sum::<f64>() / k).collect();
                match fluctuation_test(&mean_d, tuning.fluctuation_mu, tuning.fluctuation_alpha, cfg.seed) {
                    Ok(f) => {
                        for (m, s) in f.midpoints.iter().zip(&f.statistics) {
                            out.fluctuation.push(FluctuationRow {
                                country: country.clone(),
                                model: model.clone(),
                                subset: subset.to_string(),
                                midpoint: *m,
                                target: panel.targets[m.floor() as usize].to_string(),
                                statistic: *s,
                                critical_value: f.critical_value,
                            });
                        }
                    }
                    Err(e) => out.diagnostics.push(Diagnostic::new(format!("fluctuation {here}"), e.to_string())),
                }
            }
        }
    }
    out
}

fn write_eval_tables(cfg: &LoadedConfig, tables: &EvalTables, outcome: &mut CommandOutcome) -> Result<(), CommandError> {
    let meta = meta(cfg);
    let dir = cfg.output_dir();
    let path = dir.join("msfe_ratios.csv");
    write_csv(&path, &meta, MSFE_COLUMNS, &tables.msfe)?;
    outcome.files.push(path);
    let path = dir.join("evaluation.csv");
    write_csv(&path, &meta, EVALUATION_COLUMNS, &tables.aspa)?;
    outcome.files.push(path);
    let path = dir.join("fluctuation.csv");
    write_csv(&path, &meta, FLUCTUATION_COLUMNS, &tables.fluctuation)?;
    outcome.files.push(path);
    let path = dir.join("pa_tests.csv");
    write_csv(&path, &meta, PA_COLUMNS, &tables.pa)?;
    outcome.files.push(path);
    outcome.summary.push(format!(
        "{} MSFE ratios, {} aSPA tests, {} fluctuation points, {} PA tests",
        tables.msfe.len(),
        tables.aspa.len(),
        tables.fluctuation.len(),
        tables.pa.len()
    ));
    Ok(())
}

/// The look-ahead audit report of the last forecast run.
#[derive(Debug, Clone)]
pub struct ForecastArtifacts {
    pub records: Vec<ForecastRecord>,
    pub cells_checked: usize,
    pub violations: Vec<String>,
}

/// Scores, vintages, panels and the expanding-window experiment, without
/// writing anything.
pub fn run_forecast(cfg: &LoadedConfig) -> Result<(ForecastArtifacts, Vec<crate::eval::InSampleRow>, Vec<Diagnostic>, usize), CommandError> {
    let mut store = load_store(cfg)?;
    let scored = score_corpus(cfg)?;
    let (_, monthly) = monthly_indicators(cfg, &scored.scores);
    add_sentiment(cfg, &mut store, &monthly)?;
    forecast_on_store(cfg, &store, scored.diagnostics)
}

/// The forecasting experiment on a store that already holds the sentiment
/// series.
pub fn forecast_on_store(
    cfg: &LoadedConfig,
    store: &VintageStore,
    mut diagnostics: Vec<Diagnostic>,
) -> Result<(ForecastArtifacts, Vec<crate::eval::InSampleRow>, Vec<Diagnostic>, usize), CommandError> {
    let spec = cfg.oos_spec();
    spec.validate()?;
    let targets = targets(cfg, store)?;
    let panels = build_panels(store, &targets, &spec)?;
    let (insample, diags) = in_sample(&panels, &spec, cfg.config.tuning.fdr_q);
    diagnostics.extend(diags);
    let oos = run_oos_on(store, &panels, &spec);
    diagnostics.extend(oos.diagnostics);
    Ok((
        ForecastArtifacts {
            records: oos.records,
            cells_checked: oos.audit.cells_checked,
            violations: oos.audit.violations,
        },
        insample,
        diagnostics,
        oos.failed_cells,
    ))
}

fn forecast_rows(records: &[ForecastRecord]) -> Vec<ForecastRow> {
    records
        .iter()
        .map(|r| ForecastRow {
            model: r.model.clone(),
            country: r.country.clone(),
            target: r.target.to_string(),
            horizon: r.horizon,
            forecast_date: r.forecast_date.to_string(),
            prediction: r.prediction,
            realized: r.realized,
        })
        .collect()
}

fn parse_forecast_row(row: &ForecastRow) -> Result<ForecastRecord, String> {
    Ok(ForecastRecord {
        model: row.model.clone(),
        country: row.country.clone(),
        target: Period::parse(&row.target, Frequency::Quarterly).map_err(|e| e.to_string())?,
        horizon: row.horizon,
        forecast_date: NaiveDate::parse_from_str(&row.forecast_date, "%Y-%m-%d").map_err(|e| format!("forecast_date: {e}"))?,
        prediction: row.prediction,
        realized: row.realized,
    })
}

pub fn forecast(cfg: &LoadedConfig) -> Result<CommandOutcome, CommandError> {
    let (artifacts, insample, diagnostics, failed_cells) = run_forecast(cfg)?;
    let meta = meta(cfg);
    let dir = cfg.output_dir();
    let mut outcome = CommandOutcome::new(if failed_cells == 0 { Status::Clean } else { Status::Partial });
    outcome.diagnostics = diagnostics;

    let mut audit = format!("cells_checked={}\nviolations={}\n", artifacts.cells_checked, artifacts.violations.len());
    for v in &artifacts.violations {
        let _ = writeln!(audit, "{v}");
    }
    let path = dir.join("audit.txt");
    write_text(&path, &meta, &audit)?;
    outcome.files.push(path);
    if let Some(first) = artifacts.violations.first() {
        write_diagnostics(&dir, &meta, "forecast", &outcome.diagnostics)?;
        return Err(CommandError::Audit {
            count: artifacts.violations.len(),
            first: first.clone(),
        });
    }

    let spec = cfg.oos_spec();
    for country in &spec.countries {
        for &h in &spec.grid.horizons {
            if !artifacts.records.iter().any(|r| &r.country == country && r.horizon == h) {
                write_diagnostics(&dir, &meta, "forecast", &outcome.diagnostics)?;
                return Err(CommandError::Fatal(format!("no forecasts at all for {country} h={h}; see diagnostics_forecast.txt")));
            }
        }
    }

    let rows: Vec<InSampleCsvRow> = insample
        .iter()
        .map(|r| InSampleCsvRow {
            country: r.country.clone(),
            indicator: r.indicator.clone(),
            horizon: r.horizon,
            eta_hat: r.eta_hat,
            std_err: r.std_err,
            p_raw: r.p_raw,
            p_adjusted: r.p_adjusted,
        })
        .collect();
    let path = dir.join("insample.csv");
    write_csv(&path, &meta, INSAMPLE_COLUMNS, &rows)?;
    outcome.files.push(path);
    let path = dir.join("forecasts.csv");
    write_csv(&path, &meta, FORECAST_COLUMNS, &forecast_rows(&artifacts.records))?;
    outcome.files.push(path);
    outcome.summary.push(format!(
        "{} forecasts, {} failed cells, audit checked {} cells",
        artifacts.records.len(),
        failed_cells,
        artifacts.cells_checked
    ));

    let tables = evaluate_records(cfg, &artifacts.records);
    write_eval_tables(cfg, &tables, &mut outcome)?;
    outcome.diagnostics.extend(tables.diagnostics);
    finish(cfg, "forecast", outcome)
}

pub fn evaluate(cfg: &LoadedConfig) -> Result<CommandOutcome, CommandError> {
    let path = cfg.output_dir().join("forecasts.csv");
    let rows: Vec<ForecastRow> = read_csv(&path)?;
    let records = rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_forecast_row(r).map_err(|e| CommandError::Fatal(format!("{} record {}: {e}", path.display(), i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    let tables = evaluate_records(cfg, &records);
    let mut outcome = CommandOutcome::new(Status::Clean);
    write_eval_tables(cfg, &tables, &mut outcome)?;
    outcome.diagnostics = tables.diagnostics;
    finish(cfg, "evaluate", outcome)
}

/// A plain-text digest of the evaluation and in-sample tables.
pub fn report(cfg: &LoadedConfig) -> Result<CommandOutcome, CommandError> {
    let dir = cfg.output_dir();
    let msfe: Vec<MsfeRow> = read_csv(&dir.join("msfe_ratios.csv"))?;
    let aspa: Vec<EvaluationRow> = read_csv(&dir.join("evaluation.csv"))?;
    let insample: Vec<InSampleCsvRow> = read_csv(&dir.join("insample.csv"))?;
    let grid = cfg.config.horizons.grid();
    let q = cfg.config.tuning.fdr_q;
    let mut body = String::new();
    for country in &cfg.config.countries {
        let _ = writeln!(body, "== {country}");
        let models: std::collections::BTreeSet<&str> = msfe.iter().filter(|r| &r.country == country).map(|r| r.model.as_str()).collect();
        for model in models {
            let ratios = |nowcast: bool| -> Vec<f64> {
                msfe.iter()
                    .filter(|r| &r.country == country && r.model == model && grid.is_nowcast(r.horizon) == nowcast)
                    .map(|r| r.msfe_ratio)
                    .collect()
            };
            let span = |v: Vec<f64>| match (v.iter().copied().reduce(f64::min), v.iter().copied().reduce(f64::max)) {
                (Some(a), Some(b)) => format!("[{a:.3}, {b:.3}]"),
                _ => "n/a".into(),
            };
            let label = sentiment_label(model);
            let p = |subset: &str| {
                aspa.iter()
                    .find(|r| &r.country == country && r.sentiment == label && r.subset == subset)
                    .map(|r| format!("{:.3}", r.p_value))
                    .unwrap_or_else(|| "n/a".into())
            };
            let significant = insample
                .iter()
                .filter(|r| &r.country == country && r.indicator == label && r.p_adjusted <= q)
                .count();
            let _ = writeln!(
                body,
                "{model}: MSFE ratio nowcast {} forecast {}; aSPA p nowcast {} forecast {}; in-sample significant horizons {significant}",
                span(ratios(true)),
                span(ratios(false)),
                p("nowcast"),
                p("forecast"),
            );
        }
    }
    let path = dir.join("report.txt");
    write_text(&path, &meta(cfg), &body)?;
    let mut outcome = CommandOutcome::new(Status::Clean);
    outcome.summary.extend(body.lines().map(str::to_string));
    outcome.files.push(path);
    finish(cfg, "report", outcome)
}

/// Writes a synthetic fixture and its config into `dir`.
pub fn synth(dir: &Path, config_text: Option<&str>, seed: u64) -> Result<CommandOutcome, CommandError> {
    let text = config_text.unwrap_or("");
    let cfg: SynthConfig = toml::from_str(text).map_err(|e| {
        CommandError::Config(ConfigError::Parse {
            path: "synthetic config".into(),
            message: e.to_string(),
        })
    })?;
    let out = synth::generate(&cfg, seed)?;
    let meta = RunMeta::new(&hash_text(text), seed);
    synth::write_fixture(&out, dir, &meta.header_line())?;
    let mut outcome = CommandOutcome::new(Status::Clean);
    outcome.summary.push(format!(
        "{} articles, {} vintage series, countries {}",
        out.articles.len(),
        out.store.len(),
        cfg.countries.join(",")
    ));
    outcome.files.extend(["corpus.jsonl", "vintages.csv", "regimes.csv", "config.toml"].map(|f| dir.join(f)));
    Ok(outcome)
}
