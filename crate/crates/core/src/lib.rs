//! News-based nowcasting: sentence-level sentiment scoring, daily indicators,
//! real-time vintages, lasso-based inference and forecast evaluation.

pub mod calendar;
pub mod commands;
pub mod config;
pub mod diag;
pub mod eval;
pub mod text;
pub mod figas;
pub mod indicators;
pub mod midas;
pub mod output;
pub mod stats;
pub mod synth;
pub mod vintage;
