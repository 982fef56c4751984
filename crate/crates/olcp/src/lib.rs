//! Online selection among competing predictors ("arms") with conformal
//! prediction intervals.
//!
//! Each arm is a regression model whose per-round reward is tracked by a
//! bootstrap ensemble. Leave-one-out residuals feed a sliding window of
//! empirical quantiles that yields a prediction interval per arm per round;
//! a gap-based rule then picks which arm to play and, after the budget is
//! spent, which arm to recommend.
//!
//! Module map:
//! - [`config`] / [`rng`] / [`features`] — experiment configuration,
//!   deterministic seed substreams, and the shared context-vector type.
//! - [`learners`] — built-in regressors (ridge, k-NN, regression tree) and
//!   ensemble aggregation.
//! - [`enbpi`] — bootstrap ensembles, leave-one-out residuals, sliding
//!   residual windows, quantile-offset optimization, prediction intervals.
//! - [`bayesgap`] — Bayesian linear-Gaussian baseline: design factorization,
//!   posterior updates, per-arm marginals, Gaussian confidence bounds.
//! - [`selector`] — the round loop: intervals → gaps → arm choice → reward
//!   observation → state update, plus the final recommendation.
//! - [`metrics`] — regret series, coverage, AUROC/AUPRC, confusion metrics,
//!   and the normalized clinical utility score.
//! - [`data`] — pipe-separated clinical record ingestion, imputation, cohort
//!   splitting, and synthetic stream generation.
//! - [`labeled`] — glue for labeled cohorts: fits per-arm predictors, scores
//!   them into reward streams, and runs the selector over them.

pub mod bayesgap;
pub mod config;
pub mod data;
pub mod enbpi;
pub mod features;
pub mod labeled;
pub mod learners;
pub mod metrics;
pub mod rng;
pub mod selector;

pub use config::{ExperimentConfig, FeedbackMode, RewardMode};
pub use features::FeatureVector;
pub use rng::RngSeed;
