//! U-MIDAS designs, lasso, post-double-selection inference and adaptive
//! multiple-testing correction.

pub mod design;
pub mod double_lasso;
pub mod fdr;
pub mod lasso;
pub mod ols;
pub mod penalty;
pub mod testutil;

pub use design::{audit_design, audit_row, build_design, AuditReport, Cell, DesignSpec, EstimationData, SeriesSpec, Source, UmidasDesign, UmidasRow, MIN_ROWS};
pub use double_lasso::{double_lasso, select_controls, standardize_columns, DoubleLassoOptions, DoubleLassoResult};
pub use fdr::{adjust_pvalues, MultiTestReport};
pub use lasso::{kkt_violation, lambda_max, lasso_fit, soft_threshold, LassoFit, LassoOptions};
pub use ols::{ols, OlsFit};
pub use penalty::{penalty_level, plugin_penalty};

#[derive(Debug, thiserror::Error)]
pub enum MidasError {
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular design")]
    Singular,
    #[error("post-lasso model saturated: {selected} controls for {n} rows")]
    Saturated { selected: usize, n: usize },
    #[error("p-value or level {0} outside [0, 1]")]
    InvalidPValue(f64),
    #[error("only {rows} complete rows, need {needed}")]
    TooFewRows { rows: usize, needed: usize },
    #[error("missing series {0}")]
    MissingSeries(String),
    #[error(transparent)]
    Vintage(#[from] crate::vintage::VintageError),
}
