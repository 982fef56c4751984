//! Experiment configuration and its validation.
//!
//! Configs come from a TOML file or are assembled by the CLI from flags; both
//! paths produce the same [`ExperimentConfig`]. Unknown keys in the file are
//! an error. [`ExperimentConfig::validate`] is total: it never aborts and
//! returns every violated constraint.

use crate::learners::PredictorSpec;
use crate::rng::RngSeed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config:\n{}", violations.join("\n"))]
    Invalid { violations: Vec<String> },
}

/// How rewards feed back into per-arm state each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackMode {
    /// Every arm observes its reward each round.
    Full,
    /// Only the chosen arm observes its reward.
    Bandit,
}

/// How per-round rewards are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardMode {
    /// `1 - |prediction - label|` on a [0, 1] prediction of a binary label.
    NegAbsError,
    /// Normalized per-hour clinical utility weight of the thresholded
    /// prediction.
    UtilityIncrement,
    /// Rewards are supplied directly by the stream.
    External,
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Significance level of the prediction intervals, in (0, 1).
    pub alpha: f64,
    /// Number of arms K.
    pub num_arms: usize,
    /// Online round budget T.
    pub budget: u64,
    /// Bootstrap models per arm, B.
    pub bootstrap_count: usize,
    /// Residual window capacity n.
    pub window_size: usize,
    /// Rounds between ensemble refits, when enabled.
    pub refit_step: u64,
    /// Whether ensembles are periodically refit on recent data.
    pub is_refit: bool,
    pub feedback_mode: FeedbackMode,
    /// Grid resolution for the quantile-offset search over [0, alpha].
    pub beta_grid_step: f64,
    /// Master seed; every random draw derives from it.
    pub seed: u64,
    /// Learner spec per arm; length must equal `num_arms`.
    pub arms: Vec<PredictorSpec>,
    pub reward_mode: RewardMode,
}

impl ExperimentConfig {
    pub fn master_seed(&self) -> RngSeed {
        RngSeed(self.seed)
    }

    /// Collect every violated constraint. Empty means the config is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha < 1.0) {
            out.push("alpha out of (0,1)".to_string());
        }
        if self.num_arms < 1 {
            out.push("num_arms must be ≥ 1".to_string());
        }
        if self.budget < 1 {
            out.push("budget must be ≥ 1".to_string());
        }
        if self.bootstrap_count < 1 {
            out.push("bootstrap_count must be ≥ 1".to_string());
        }
        if self.window_size < 2 {
            out.push("window_size must be ≥ 2".to_string());
        }
        if self.refit_step < 1 {
            out.push("refit_step must be ≥ 1".to_string());
        }
        if !(self.beta_grid_step.is_finite() && self.beta_grid_step > 0.0) {
            out.push("beta_grid_step must be a positive real".to_string());
        }
        if self.arms.len() != self.num_arms {
            out.push(format!(
                "num_arms is {} but {} arm specs were given",
                self.num_arms,
                self.arms.len()
            ));
        }
        for (k, spec) in self.arms.iter().enumerate() {
            if let Err(e) = spec.validate() {
                out.push(format!("arm {}: {e}", k + 1));
            }
        }
        out
    }

    /// Ok iff every invariant holds; otherwise all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { violations })
        }
    }

    /// Parse from TOML text. Unknown keys anywhere are an error.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut arms = Vec::with_capacity(raw.arms.len());
        for (k, arm) in raw.arms.iter().enumerate() {
            let mut params = BTreeMap::new();
            for (key, value) in &arm.params {
                let rendered = match value {
                    toml::Value::Float(f) => f.to_string(),
                    toml::Value::Integer(i) => i.to_string(),
                    toml::Value::Boolean(b) => b.to_string(),
                    toml::Value::String(s) => s.clone(),
                    other => {
                        return Err(ConfigError::Parse(format!(
                            "arm {}: unsupported value for {key:?}: {other}",
                            k + 1
                        )))
                    }
                };
                params.insert(key.clone(), rendered);
            }
            let spec = PredictorSpec::from_kind_and_params(&arm.kind, &params)
                .map_err(|e| ConfigError::Parse(format!("arm {}: {e}", k + 1)))?;
            arms.push(spec);
        }
        Ok(Self {
            alpha: raw.alpha,
            num_arms: raw.num_arms,
            budget: raw.budget,
            bootstrap_count: raw.bootstrap_count,
            window_size: raw.window_size,
            refit_step: raw.refit_step,
            is_refit: raw.is_refit,
            feedback_mode: raw.feedback_mode,
            beta_grid_step: raw.beta_grid_step,
            seed: raw.seed,
            arms,
            reward_mode: raw.reward_mode,
        })
    }

    /// Render as TOML that round-trips through [`Self::from_toml_str`].
    pub fn to_toml_string(&self) -> String {
        let mut table = toml::value::Table::new();
        table.insert("alpha".into(), self.alpha.into());
        table.insert("num_arms".into(), (self.num_arms as i64).into());
        table.insert("budget".into(), (self.budget as i64).into());
        table.insert(
            "bootstrap_count".into(),
            (self.bootstrap_count as i64).into(),
        );
        table.insert("window_size".into(), (self.window_size as i64).into());
        table.insert("refit_step".into(), (self.refit_step as i64).into());
        table.insert("is_refit".into(), self.is_refit.into());
        table.insert(
            "feedback_mode".into(),
            match self.feedback_mode {
                FeedbackMode::Full => "full",
                FeedbackMode::Bandit => "bandit",
            }
            .into(),
        );
        table.insert("beta_grid_step".into(), self.beta_grid_step.into());
        table.insert("seed".into(), (self.seed as i64).into());
        table.insert(
            "reward_mode".into(),
            match self.reward_mode {
                RewardMode::NegAbsError => "neg-abs-error",
                RewardMode::UtilityIncrement => "utility-increment",
                RewardMode::External => "external",
            }
            .into(),
        );
        let arms: Vec<toml::Value> = self
            .arms
            .iter()
            .map(|spec| {
                let mut arm = toml::value::Table::new();
                match spec {
                    PredictorSpec::Ridge { lambda, intercept } => {
                        arm.insert("kind".into(), "ridge".into());
                        arm.insert("lambda".into(), (*lambda).into());
                        arm.insert("intercept".into(), (*intercept).into());
                    }
                    PredictorSpec::Knn { k } => {
                        arm.insert("kind".into(), "knn".into());
                        arm.insert("k".into(), (*k as i64).into());
                    }
                    PredictorSpec::Tree { max_depth } => {
                        arm.insert("kind".into(), "tree".into());
                        arm.insert("max_depth".into(), (*max_depth as i64).into());
                    }
                }
                toml::Value::Table(arm)
            })
            .collect();
        table.insert("arms".into(), toml::Value::Array(arms));
        toml::to_string(&toml::Value::Table(table)).expect("table serializes")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    alpha: f64,
    num_arms: usize,
    budget: u64,
    bootstrap_count: usize,
    window_size: usize,
    refit_step: u64,
    is_refit: bool,
    feedback_mode: FeedbackMode,
    beta_grid_step: f64,
    seed: u64,
    reward_mode: RewardMode,
    arms: Vec<RawArm>,
}

#[derive(Deserialize)]
struct RawArm {
    kind: String,
    #[serde(flatten)]
    params: BTreeMap<String, toml::Value>,
}
