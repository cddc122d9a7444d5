//! Out-of-sample forecasting experiment and forecast-comparison tests.

pub mod aspa;
pub mod average;
pub mod fluctuation;
pub mod hac;
pub mod insample;
pub mod msfe;
pub mod oos;
pub mod pa;
pub mod records;

pub use aspa::{aspa_test, AspaOptions, AspaResult, HorizonWeights};
pub use average::average_forecasts;
pub use fluctuation::{fluctuation_test, FluctuationResult};
pub use insample::{in_sample, InSampleRow};
pub use msfe::{msfe_ratio, msfe_ratio_from_errors};
pub use oos::{run_oos, OosOutput, OosSpec};
pub use pa::pa_test;
pub use records::{arxs_name, ForecastRecord, LossPanel, ARX, AVERAGE};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("need at least {needed} observations, found {found}")]
    TooFewObservations { needed: usize, found: usize },
    #[error("benchmark MSFE is zero")]
    ZeroBenchmark,
    #[error("loss differential has zero variance")]
    ZeroVariance,
    #[error("non-finite loss differential")]
    NonFinite,
    #[error("misaligned inputs: {0}")]
    Misaligned(String),
    #[error("block length {block} too long for {t} observations")]
    BlockTooLong { t: usize, block: usize },
    #[error("rolling window of {window} too small or too large for {t} observations")]
    WindowTooSmall { t: usize, window: usize },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Midas(#[from] crate::midas::MidasError),
}
