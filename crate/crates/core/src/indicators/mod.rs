//! Sentiment indicators: daily aggregation, resampling, standardization and
//! descriptive statistics.

pub mod correlation;
pub mod daily;
pub mod density;
pub mod regimes;
pub mod series;

pub use correlation::{cross_correlations, CorrelationMatrix, MIN_OVERLAP};
pub use daily::{aggregate_daily, aggregate_daily_with, DailySentiment, Weighting};
pub use density::{regime_density, DensityCurve};
pub use regimes::{Regime, RegimeCalendar, RegimeSpan};
pub use series::{resample, resample_all, standardize, IndicatorSeries};

#[derive(Debug, thiserror::Error)]
pub enum IndicatorError {
    #[error("series {name}: zero variance, cannot standardize")]
    ZeroVariance { name: String },
    #[error("series {name}: needs at least {needed} observed values, found {found}")]
    TooFewValues {
        name: String,
        needed: usize,
        found: usize,
    },
    #[error("series {name}: periods are not regular at {period}")]
    Irregular { name: String, period: String },
    #[error("regime calendar: {0}")]
    Calendar(String),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
}
