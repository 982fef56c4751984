//! The online selection loop: per-arm conformal intervals, gap quantities,
//! arm choice, reward observation, state updates, and the final
//! recommendation.
//!
//! Arm choice follows the gap-based rule: `best` (J) is the arm minimizing
//! the gap `B_k = max_{i != k} U_i - L_k`, `runner_up` (j) is the arm with
//! the highest upper bound among the rest, and the round plays whichever of
//! the two carries more uncertainty. When `best`'s own upper bound already
//! tops every rival's, playing the runner-up for its width cannot be
//! justified by optimism, so `best` is played; this keeps the played arm's
//! gap below its width on every round.

use crate::config::{ConfigError, ExperimentConfig, FeedbackMode, RewardMode};
use crate::enbpi::{
    self, BootstrapEnsemble, EnbpiError, IntervalParams, PredictionInterval, ResidualWindow,
};
use crate::features::{FeatureError, FeatureVector};
use crate::learners::{Aggregator, LearnError, PredictorSpec, TrainingSet};
use crate::rng::{derive_substream, RngSeed};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SelectorError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Enbpi(#[from] EnbpiError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("gap quantities need at least two arms, got {0}")]
    TooFewArms(usize),
    #[error("arm {arm}: upper bound {upper} below lower bound {lower}")]
    InvertedBounds { arm: usize, upper: f64, lower: f64 },
    #[error("bound for arm {arm} is not finite")]
    NonFiniteBound { arm: usize },
    #[error("recommendation needs a nonempty history")]
    EmptyHistory,
    #[error("round supplies {got} rewards for {expected} arms")]
    RewardCountMismatch { got: usize, expected: usize },
    #[error("experiment stream has no rounds")]
    EmptyStream,
    #[error("training data covers {got} arms, config expects {expected}")]
    TrainArmMismatch { got: usize, expected: usize },
    #[error("prediction {0} outside [0, 1]")]
    PredictionOutOfRange(f64),
    #[error("reward mode {0:?} does not define a prediction/label reward")]
    UnsupportedRewardMode(RewardMode),
}

/// Gap-rule quantities for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct GapQuantities {
    /// `B_k = max_{i != k} U_i - L_k`.
    pub gaps: Vec<f64>,
    /// Interval widths `s_k = U_k - L_k`.
    pub widths: Vec<f64>,
    pub uppers: Vec<f64>,
    pub lowers: Vec<f64>,
    /// J: the arm minimizing the gap (lowest index on ties).
    pub best: usize,
    /// j: the arm with the highest upper bound excluding `best` (lowest
    /// index on ties).
    pub runner_up: usize,
}

/// Compute gaps, widths, and the two candidate arms from per-arm bounds.
pub fn gap_quantities(uppers: &[f64], lowers: &[f64]) -> Result<GapQuantities, SelectorError> {
    let k = uppers.len();
    if k < 2 {
        return Err(SelectorError::TooFewArms(k));
    }
    if lowers.len() != k {
        return Err(SelectorError::RewardCountMismatch {
            got: lowers.len(),
            expected: k,
        });
    }
    for arm in 0..k {
        if !(uppers[arm].is_finite() && lowers[arm].is_finite()) {
            return Err(SelectorError::NonFiniteBound { arm });
        }
        if uppers[arm] < lowers[arm] {
            return Err(SelectorError::InvertedBounds {
                arm,
                upper: uppers[arm],
                lower: lowers[arm],
            });
        }
    }

    // Top-2 upper bounds so max_{i != k} U_i reuses the same floats.
    let mut top = 0;
    for i in 1..k {
        if uppers[i] > uppers[top] {
            top = i;
        }
    }
    let mut second = usize::MAX;
    for i in 0..k {
        if i != top && (second == usize::MAX || uppers[i] > uppers[second]) {
            second = i;
        }
    }

    let gaps: Vec<f64> = (0..k)
        .map(|i| {
            let rival_max = if i == top {
                uppers[second]
            } else {
                uppers[top]
            };
            rival_max - lowers[i]
        })
        .collect();
    let widths: Vec<f64> = (0..k).map(|i| uppers[i] - lowers[i]).collect();

    let mut best = 0;
    for i in 1..k {
        if gaps[i] < gaps[best] {
            best = i;
        }
    }
    let mut runner_up = usize::MAX;
    for i in 0..k {
        if i != best && (runner_up == usize::MAX || uppers[i] > uppers[runner_up]) {
            runner_up = i;
        }
    }

    Ok(GapQuantities {
        gaps,
        widths,
        uppers: uppers.to_vec(),
        lowers: lowers.to_vec(),
        best,
        runner_up,
    })
}

/// Pick the arm to play from `{best, runner_up}`.
///
/// When `best` holds the globally highest upper bound (lowest index on
/// ties), it is played outright; otherwise the wider of the two candidates
/// is played, with width ties going to `best`.
pub fn choose_arm(g: &GapQuantities) -> usize {
    let mut highest = 0;
    for i in 1..g.uppers.len() {
        if g.uppers[i] > g.uppers[highest] {
            highest = i;
        }
    }
    if highest == g.best {
        return g.best;
    }
    debug_assert_eq!(highest, g.runner_up);
    if g.widths[g.runner_up] > g.widths[g.best] {
        g.runner_up
    } else {
        g.best
    }
}

/// Final recommendation: the round with the smallest recorded `B_{J_t}`
/// (earliest on ties) contributes its `J_t`.
///
/// History entries are `(round, best_arm, gap_of_best)`.
pub fn recommend(history: &[(u64, usize, f64)]) -> Result<usize, SelectorError> {
    let mut winner: Option<(usize, f64)> = None;
    for &(_, best, gap) in history {
        match winner {
            None => winner = Some((best, gap)),
            Some((_, smallest)) if gap < smallest => winner = Some((best, gap)),
            _ => {}
        }
    }
    winner.map(|(arm, _)| arm).ok_or(SelectorError::EmptyHistory)
}

/// Score a [0, 1] prediction of a binary label: `1 - |prediction - label|`.
///
/// Only [`RewardMode::NegAbsError`] defines a prediction/label reward; the
/// other modes derive rewards elsewhere (stream-supplied or utility-based).
pub fn reward_of(prediction: f64, label: bool, mode: RewardMode) -> Result<f64, SelectorError> {
    match mode {
        RewardMode::NegAbsError => {
            if !(0.0..=1.0).contains(&prediction) {
                return Err(SelectorError::PredictionOutOfRange(prediction));
            }
            Ok(1.0 - (prediction - if label { 1.0 } else { 0.0 }).abs())
        }
        other => Err(SelectorError::UnsupportedRewardMode(other)),
    }
}

/// One round of input: the shared context, realized per-arm rewards, and,
/// when the generator knows them, the noiseless per-arm means.
#[derive(Debug, Clone)]
pub struct RoundInput {
    pub context: FeatureVector,
    pub rewards: Vec<f64>,
    pub mean_rewards: Option<Vec<f64>>,
}

/// Offline training data plus the online rounds.
#[derive(Debug, Clone)]
pub struct ExperimentStream {
    pub train_contexts: Vec<FeatureVector>,
    /// `train_rewards[k][i]` is arm k's reward on training context i.
    pub train_rewards: Vec<Vec<f64>>,
    pub rounds: Vec<RoundInput>,
}

/// Per-arm state of one round, as logged.
#[derive(Debug, Clone)]
pub struct ArmRound {
    /// Ensemble point prediction of the arm's reward.
    pub prediction: f64,
    pub lower: f64,
    pub upper: f64,
    /// `B_k`; absent in single-arm runs.
    pub gap: Option<f64>,
    /// `s_k = upper - lower`.
    pub width: f64,
    pub beta_hat: f64,
    /// Realized reward this round.
    pub reward: f64,
    /// Did this arm's residual seeding ever need the all-models fallback?
    pub loo_fallback: bool,
}

/// Complete log of one round.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    /// 1-based online round index.
    pub t: u64,
    pub chosen: usize,
    pub chosen_reward: f64,
    /// `max_k reward_k - chosen_reward` (realized simple regret).
    pub realized_regret: f64,
    /// `max_k mean_k - mean_chosen` when noiseless means are known.
    pub expected_regret: Option<f64>,
    /// J; equals `chosen` in single-arm runs.
    pub best: usize,
    /// j; absent in single-arm runs.
    pub runner_up: Option<usize>,
    pub arms: Vec<ArmRound>,
}

/// Result of a full run.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub records: Vec<RoundRecord>,
    pub recommended: usize,
}

struct ArmState {
    spec: PredictorSpec,
    ensemble: BootstrapEnsemble,
    window: ResidualWindow,
    pull_count: u64,
    /// Most recent (context, reward) pairs this arm observed; refits train
    /// on these.
    recent: VecDeque<(FeatureVector, f64)>,
    loo_fallback: bool,
}

/// Driving state of an experiment.
pub struct Selector {
    alpha: f64,
    beta_grid_step: f64,
    feedback: FeedbackMode,
    refit_step: u64,
    is_refit: bool,
    window_size: usize,
    bootstrap_count: usize,
    master: RngSeed,
    arms: Vec<ArmState>,
    train_size: u64,
    round: u64,
    gap_history: Vec<(u64, usize, f64)>,
}

impl Selector {
    /// Fit every arm's ensemble offline and seed the residual windows from
    /// leave-one-out residuals.
    pub fn new(
        config: &ExperimentConfig,
        train_contexts: &[FeatureVector],
        train_rewards: &[Vec<f64>],
    ) -> Result<Self, SelectorError> {
        config.validate()?;
        if train_rewards.len() != config.num_arms {
            return Err(SelectorError::TrainArmMismatch {
                got: train_rewards.len(),
                expected: config.num_arms,
            });
        }
        let master = config.master_seed();
        let mut arms = Vec::with_capacity(config.num_arms);
        for (k, spec) in config.arms.iter().enumerate() {
            let train = TrainingSet::new(train_contexts.to_vec(), train_rewards[k].clone())?;
            let seed = derive_substream(master, &[("arm", k as u64), ("fit", 0)]);
            let ensemble = BootstrapEnsemble::fit(
                &train,
                spec,
                config.bootstrap_count,
                Aggregator::Mean,
                seed,
            )?;
            let loo = ensemble.loo_residuals(&train)?;
            let mut window = ResidualWindow::new(config.window_size);
            for &r in &loo.residuals {
                window.push(r)?;
            }
            let keep = train.len().saturating_sub(config.window_size);
            let recent: VecDeque<(FeatureVector, f64)> = train.features[keep..]
                .iter()
                .cloned()
                .zip(train.targets[keep..].iter().copied())
                .collect();
            arms.push(ArmState {
                spec: spec.clone(),
                ensemble,
                window,
                pull_count: 0,
                recent,
                loo_fallback: loo.fallback_count > 0,
            });
        }
        Ok(Self {
            alpha: config.alpha,
            beta_grid_step: config.beta_grid_step,
            feedback: config.feedback_mode,
            refit_step: config.refit_step,
            is_refit: config.is_refit,
            window_size: config.window_size,
            bootstrap_count: config.bootstrap_count,
            master,
            arms,
            train_size: train_contexts.len() as u64,
            round: 0,
            gap_history: Vec::new(),
        })
    }

    pub fn pull_counts(&self) -> Vec<u64> {
        self.arms.iter().map(|a| a.pull_count).collect()
    }

    pub fn window_lens(&self) -> Vec<usize> {
        self.arms.iter().map(|a| a.window.len()).collect()
    }

    /// Run one round: intervals for every arm, gap quantities, arm choice,
    /// reward observation, residual/pair updates, and any due refit.
    pub fn step(&mut self, input: &RoundInput) -> Result<RoundRecord, SelectorError> {
        let k = self.arms.len();
        if input.rewards.len() != k {
            return Err(SelectorError::RewardCountMismatch {
                got: input.rewards.len(),
                expected: k,
            });
        }
        self.round += 1;
        let t = self.round;

        let mut predictions = Vec::with_capacity(k);
        let mut intervals: Vec<PredictionInterval> = Vec::with_capacity(k);
        let mut params: Vec<IntervalParams> = Vec::with_capacity(k);
        for arm in &self.arms {
            let f_hat = arm.ensemble.predict(&input.context)?;
            let p = enbpi::optimize_beta(&arm.window, self.alpha, self.beta_grid_step)?;
            let interval = enbpi::prediction_interval(f_hat, &arm.window, &p)?;
            predictions.push(f_hat);
            intervals.push(interval);
            params.push(p);
        }
        let uppers: Vec<f64> = intervals.iter().map(|iv| iv.upper).collect();
        let lowers: Vec<f64> = intervals.iter().map(|iv| iv.lower).collect();

        // Single-arm runs degenerate to pure conformal tracking: no gaps,
        // the only arm is always played.
        let (chosen, best, runner_up, gaps) = if k == 1 {
            (0, 0, None, None)
        } else {
            let gq = gap_quantities(&uppers, &lowers)?;
            let chosen = choose_arm(&gq);
            self.gap_history.push((t, gq.best, gq.gaps[gq.best]));
            (chosen, gq.best, Some(gq.runner_up), Some(gq.gaps))
        };

        let chosen_reward = input.rewards[chosen];
        let best_reward = input.rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let realized_regret = best_reward - chosen_reward;
        let expected_regret = input.mean_rewards.as_ref().map(|means| {
            let top = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            top - means[chosen]
        });

        // Feedback: which arms observe their reward this round.
        for (idx, arm) in self.arms.iter_mut().enumerate() {
            let observes = match self.feedback {
                FeedbackMode::Full => true,
                FeedbackMode::Bandit => idx == chosen,
            };
            if observes {
                arm.window.push(input.rewards[idx] - predictions[idx])?;
                if arm.recent.len() == self.window_size {
                    arm.recent.pop_front();
                }
                arm.recent
                    .push_back((input.context.clone(), input.rewards[idx]));
                arm.pull_count += 1;
            }
        }

        // Periodic refit on each arm's recent pairs with fresh bootstrap
        // draws. Windows are kept; only the models change.
        let absolute_round = self.train_size + t;
        if enbpi::refit_due(absolute_round, self.train_size, self.refit_step, self.is_refit) {
            for (idx, arm) in self.arms.iter_mut().enumerate() {
                let contexts: Vec<FeatureVector> =
                    arm.recent.iter().map(|(x, _)| x.clone()).collect();
                let targets: Vec<f64> = arm.recent.iter().map(|(_, y)| *y).collect();
                let train = TrainingSet::new(contexts, targets)?;
                let seed = derive_substream(
                    self.master,
                    &[("arm", idx as u64), ("refit", absolute_round)],
                );
                let mut ensemble = BootstrapEnsemble::fit(
                    &train,
                    &arm.spec,
                    self.bootstrap_count,
                    Aggregator::Mean,
                    seed,
                )?;
                ensemble.fitted_at_round = absolute_round;
                arm.ensemble = ensemble;
            }
        }

        let arms = (0..k)
            .map(|idx| ArmRound {
                prediction: predictions[idx],
                lower: intervals[idx].lower,
                upper: intervals[idx].upper,
                gap: gaps.as_ref().map(|g| g[idx]),
                width: intervals[idx].upper - intervals[idx].lower,
                beta_hat: params[idx].beta_hat,
                reward: input.rewards[idx],
                loo_fallback: self.arms[idx].loo_fallback,
            })
            .collect();

        Ok(RoundRecord {
            t,
            chosen,
            chosen_reward,
            realized_regret,
            expected_regret,
            best,
            runner_up,
            arms,
        })
    }

    /// The recommendation so far. Single-arm runs recommend their only arm.
    pub fn recommend(&self) -> Result<usize, SelectorError> {
        if self.arms.len() == 1 {
            return Ok(0);
        }
        recommend(&self.gap_history)
    }
}

/// Drive a full experiment over a stream. Deterministic given the config
/// seed.
pub fn run_experiment(
    config: &ExperimentConfig,
    stream: &ExperimentStream,
) -> Result<ExperimentResult, SelectorError> {
    if stream.rounds.is_empty() {
        return Err(SelectorError::EmptyStream);
    }
    let mut selector = Selector::new(config, &stream.train_contexts, &stream.train_rewards)?;
    let mut records = Vec::with_capacity(stream.rounds.len());
    for input in &stream.rounds {
        records.push(selector.step(input)?);
    }
    let recommended = selector.recommend()?;
    Ok(ExperimentResult {
        records,
        recommended,
    })
}
