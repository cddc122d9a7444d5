//! Experiment configuration file.
//!
//! A TOML document whose defaults reproduce the standard experiment, so a
//! minimal file names only the seed, the countries and the data paths.
//! Relative paths are resolved against the directory of the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calendar::Period;
use crate::eval::aspa::{HorizonWeights, DEFAULT_BOOTSTRAP};
use crate::eval::fluctuation::{DEFAULT_ALPHA, DEFAULT_MU};
use crate::eval::OosSpec;
use crate::figas::TOPIC_NAMES;
use crate::indicators::Weighting;
use crate::midas::{DesignSpec, SeriesSpec, MIN_ROWS};
use crate::vintage::{HorizonGrid, StylizedCalendar, TransformKind};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    /// CoNLL-U parses; without it sentences are parsed with the built-in rules.
    pub parses: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub topics: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub vintages: Option<PathBuf>,
    pub regimes: Option<PathBuf>,
    /// Directory receiving every output file.
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sample {
    pub estimation_start: String,
    pub oos_start: String,
    pub oos_end: String,
}

impl Default for Sample {
    fn default() -> Self {
        Sample {
            estimation_start: "1997Q1".into(),
            oos_start: "2007Q1".into(),
            oos_end: "2019Q4".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Horizons {
    /// Spacing and first horizon, in days.
    pub step: u32,
    pub max: u32,
    pub nowcast_threshold: u32,
}

impl Default for Horizons {
    fn default() -> Self {
        Horizons {
            step: 15,
            max: 495,
            nowcast_threshold: 165,
        }
    }
}

impl Horizons {
    pub fn grid(&self) -> HorizonGrid {
        HorizonGrid {
            horizons: (1..=self.max / self.step.max(1)).map(|k| k * self.step).collect(),
            nowcast_threshold: self.nowcast_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroSeries {
    pub id: String,
    #[serde(default = "default_macro_transform")]
    pub transform: TransformKind,
}

fn default_macro_transform() -> TransformKind {
    TransformKind::PctGrowth
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesConfig {
    /// Quarterly GDP level series.
    pub gdp: String,
    pub macro_series: Vec<MacroSeries>,
    /// Survey indicators, entered in levels.
    pub surveys: Vec<String>,
    /// Monthly lags per control series.
    pub lags: usize,
    pub y_lags: usize,
    /// Prefix of the sentiment series ids (`<prefix><topic>`).
    pub sentiment_prefix: String,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            gdp: "gdp".into(),
            macro_series: Vec::new(),
            surveys: Vec::new(),
            lags: 3,
            y_lags: 2,
            sentiment_prefix: "sent_".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tuning {
    pub penalty_c: f64,
    pub fdr_q: f64,
    /// Bootstrap block length; 0 selects `⌈T^{1/3}⌉`.
    pub block_length: usize,
    pub bootstrap: usize,
    pub aspa_weights: HorizonWeights,
    pub fluctuation_mu: f64,
    pub fluctuation_alpha: f64,
    pub include_titles: bool,
    pub weighting: Weighting,
    /// Keep topic mentions with no scored term.
    pub keep_zero: bool,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            penalty_c: crate::midas::penalty::DEFAULT_C,
            fdr_q: 0.05,
            block_length: 0,
            bootstrap: DEFAULT_BOOTSTRAP,
            aspa_weights: HorizonWeights::InverseSd,
            fluctuation_mu: DEFAULT_MU,
            fluctuation_alpha: DEFAULT_ALPHA,
            include_titles: true,
            weighting: Weighting::Sentence,
            keep_zero: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub countries: Vec<String>,
    #[serde(default = "default_topics")]
    pub topics: Vec<String>,
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub sample: Sample,
    #[serde(default)]
    pub horizons: Horizons,
    #[serde(default)]
    pub series: SeriesConfig,
    #[serde(default)]
    pub tuning: Tuning,
    #[serde(default)]
    pub calendar: StylizedCalendar,
}

fn default_topics() -> Vec<String> {
    TOPIC_NAMES.iter().map(|s| s.to_string()).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: None,
            countries: Vec::new(),
            topics: default_topics(),
            paths: Paths::default(),
            sample: Sample::default(),
            horizons: Horizons::default(),
            series: SeriesConfig::default(),
            tuning: Tuning::default(),
            calendar: StylizedCalendar::default(),
        }
    }
}

/// A validated configuration with absolute paths.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub seed: u64,
    /// First 12 hex digits of the SHA-256 of the file contents.
    pub hash: String,
    pub estimation_start: Period,
    pub oos_start: Period,
    pub oos_end: Period,
}

pub fn hash_text(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str, label: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: label.to_string(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads, resolves and validates a config file. `seed` overrides the
    /// file's seed.
    pub fn load(path: &Path, seed: Option<u64>) -> Result<LoadedConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut config = ExperimentConfig::parse(&text, &path.display().to_string())?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let p = &mut config.paths;
        for slot in [
            &mut p.corpus,
            &mut p.parses,
            &mut p.lexicon,
            &mut p.topics,
            &mut p.gazetteer,
            &mut p.vintages,
            &mut p.regimes,
            &mut p.output,
        ] {
            resolve(&base, slot);
        }
        if p.output.is_none() {
            p.output = Some(base.join("output"));
        }
        config.validated(hash_text(&text), seed)
    }

    /// Checks every field; fails before any output is written.
    pub fn validated(mut self, hash: String, seed: Option<u64>) -> Result<LoadedConfig, ConfigError> {
        if let Some(s) = seed {
            self.seed = Some(s);
        }
        let seed = self
            .seed
            .ok_or_else(|| ConfigError::Invalid("a seed is required (`seed = N` or --seed)".into()))?;
        let quarter = |field: &str, s: &str| {
            Period::parse(s, crate::calendar::Frequency::Quarterly)
                .map_err(|e| ConfigError::Invalid(format!("sample.{field}: {e}")))
        };
        let estimation_start = quarter("estimation_start", &self.sample.estimation_start)?;
        let oos_start = quarter("oos_start", &self.sample.oos_start)?;
        let oos_end = quarter("oos_end", &self.sample.oos_end)?;
        if oos_start <= estimation_start {
            return Err(ConfigError::Invalid(format!(
                "out-of-sample start {oos_start} must come after estimation start {estimation_start}"
            )));
        }
        if oos_end < oos_start {
            return Err(ConfigError::Invalid(format!("out-of-sample end {oos_end} precedes start {oos_start}")));
        }
        for t in &self.topics {
            if !TOPIC_NAMES.contains(&t.as_str()) {
                return Err(ConfigError::Invalid(format!("unknown topic `{t}`")));
            }
        }
        for c in &self.countries {
            if c.len() != 2 || !c.chars().all(|ch| ch.is_ascii_uppercase()) {
                return Err(ConfigError::Invalid(format!("country `{c}` is not a two-letter code")));
            }
        }
        if self.horizons.step == 0 || self.horizons.max < self.horizons.step {
            return Err(ConfigError::Invalid("horizons.step must be positive and at most horizons.max".into()));
        }
        let t = &self.tuning;
        if !(t.fdr_q > 0.0 && t.fdr_q < 1.0) {
            return Err(ConfigError::Invalid(format!("tuning.fdr_q {} outside (0, 1)", t.fdr_q)));
        }
        if !(t.penalty_c > 0.0) {
            return Err(ConfigError::Invalid(format!("tuning.penalty_c {} must be positive", t.penalty_c)));
        }
        if t.bootstrap < DEFAULT_BOOTSTRAP {
            return Err(ConfigError::Invalid(format!("tuning.bootstrap {} below {DEFAULT_BOOTSTRAP}", t.bootstrap)));
        }
        if !(t.fluctuation_mu > 0.0 && t.fluctuation_mu < 1.0) || !(t.fluctuation_alpha > 0.0 && t.fluctuation_alpha < 1.0) {
            return Err(ConfigError::Invalid("tuning.fluctuation_mu and fluctuation_alpha must lie in (0, 1)".into()));
        }
        let p = &self.paths;
        for (name, path) in [
            ("corpus", &p.corpus),
            ("parses", &p.parses),
            ("lexicon", &p.lexicon),
            ("topics", &p.topics),
            ("gazetteer", &p.gazetteer),
            ("vintages", &p.vintages),
            ("regimes", &p.regimes),
        ] {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(ConfigError::Invalid(format!("paths.{name}: {} does not exist", path.display())));
                }
            }
        }
        Ok(LoadedConfig {
            config: self,
            seed,
            hash,
            estimation_start,
            oos_start,
            oos_end,
        })
    }
}

impl LoadedConfig {
    pub fn output_dir(&self) -> PathBuf {
        self.config.paths.output.clone().unwrap_or_else(|| PathBuf::from("output"))
    }

    pub fn sentiment_id(&self, topic: &str) -> String {
        format!("{}{topic}", self.config.series.sentiment_prefix)
    }

    pub fn design_spec(&self) -> DesignSpec {
        let s = &self.config.series;
        let controls = s
            .macro_series
            .iter()
            .map(|m| SeriesSpec::new(&m.id, m.transform, s.lags))
            .chain(s.surveys.iter().map(|id| SeriesSpec::new(id, TransformKind::Level, s.lags)))
            .collect();
        let focals = self
            .config
            .topics
            .iter()
            .map(|t| SeriesSpec::new(&self.sentiment_id(t), TransformKind::Level, 1))
            .collect();
        DesignSpec {
            gdp_id: s.gdp.clone(),
            y_lags: s.y_lags,
            controls,
            focals,
            min_rows: MIN_ROWS,
        }
    }

    pub fn oos_spec(&self) -> OosSpec {
        OosSpec {
            countries: self.config.countries.clone(),
            design: self.design_spec(),
            grid: self.config.horizons.grid(),
            estimation_start: self.estimation_start,
            oos_start: self.oos_start,
            oos_end: self.oos_end,
            penalty_c: self.config.tuning.penalty_c,
        }
    }
}
