//! Quarterly time-series econometrics workbench.
//!
//! The crate covers a complete single-equation and small-system pipeline on
//! quarterly data: locale-aware dataset ingestion, an EViews-style equation
//! mini-language, OLS with the full summary panel and residual diagnostics,
//! Phillips-Perron unit-root and Engle-Granger cointegration tests with
//! Bartlett-kernel HAC variances, regression with AR errors by nonlinear
//! least squares, and VAR estimation with lag selection, stability, Granger
//! causality, Cholesky impulse responses and variance decomposition.

pub mod arfit;
pub mod diagnostics;
pub mod dist;
pub mod eqspec;
pub mod error;
pub mod linalg;
pub mod loader;
pub mod mackinnon;
pub mod ols;
pub mod period;
pub mod recursive;
pub mod series;
pub mod unitroot;
pub mod var;

pub use error::{EconoError, Result};
pub use period::QuarterPeriod;
pub use series::{step_dummy, Dataset, QuarterlySeries};
