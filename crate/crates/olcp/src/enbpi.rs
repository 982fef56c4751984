//! Bootstrap-ensemble conformal interval machinery.
//!
//! An arm's reward model is a bag of B bootstrap-fitted learners. Leave-one-out
//! aggregation over the models that never saw a training point yields
//! residuals that calibrate a sliding window of empirical quantiles; the
//! window plus a width-minimizing quantile offset turns any point prediction
//! into a prediction interval.

use crate::features::FeatureVector;
use crate::learners::{self, Aggregator, LearnError, Model, PredictorSpec, TrainingSet};
use crate::rng::{self, RngSeed};
use rayon::prelude::*;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnbpiError {
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("residual window is empty")]
    EmptyWindow,
    #[error("residual {0} is not finite")]
    NonFiniteResidual(f64),
    #[error("training index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("quantile level {0} outside [0, 1]")]
    BadQuantileLevel(f64),
    #[error("alpha {0} outside (0, 1)")]
    BadAlpha(f64),
    #[error("grid step {0} must be a positive real")]
    BadGridStep(f64),
}

/// FIFO multiset of the most recent residuals for one arm.
#[derive(Debug, Clone)]
pub struct ResidualWindow {
    capacity: usize,
    entries: VecDeque<f64>,
}

impl ResidualWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "window capacity must be positive");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    /// Append a residual, evicting the oldest entry once full.
    pub fn push(&mut self, residual: f64) -> Result<(), EnbpiError> {
        if !residual.is_finite() {
            return Err(EnbpiError::NonFiniteResidual(residual));
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(residual);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().copied()
    }

    /// Entries sorted ascending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
        v
    }
}

/// Lower empirical quantile over a sorted ascending slice: the
/// `max(1, ceil(q*m))`-th order statistic, clamped to the sample.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    debug_assert!(m > 0);
    // Tiny slack so grid levels like 0.95 * 100 hit exact order statistics.
    let rank = (q * m as f64 - 1e-9).ceil() as isize;
    let rank = rank.clamp(1, m as isize) as usize;
    sorted[rank - 1]
}

/// Inverse empirical CDF of the window at level `q` in [0, 1].
pub fn empirical_quantile(window: &ResidualWindow, q: f64) -> Result<f64, EnbpiError> {
    if window.is_empty() {
        return Err(EnbpiError::EmptyWindow);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(EnbpiError::BadQuantileLevel(q));
    }
    Ok(quantile_sorted(&window.sorted(), q))
}

/// Interval parameters: significance level, chosen quantile offset, and the
/// grid resolution the offset was searched on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalParams {
    pub alpha: f64,
    pub beta_hat: f64,
    pub grid_step: f64,
}

/// The offset grid `{0, step, 2*step, ...} ∩ [0, alpha]`. Degenerates to
/// `{0}` when the step exceeds alpha.
pub fn beta_grid(alpha: f64, grid_step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut j = 0u32;
    loop {
        let beta = f64::from(j) * grid_step;
        if beta > alpha + 1e-12 {
            break;
        }
        grid.push(beta.min(alpha));
        j += 1;
    }
    grid
}

/// Pick the offset in `[0, alpha]` minimizing the interval width
/// `q(1 - alpha + beta) - q(beta)` over the grid; ties go to the smallest
/// offset.
pub fn optimize_beta(
    window: &ResidualWindow,
    alpha: f64,
    grid_step: f64,
) -> Result<IntervalParams, EnbpiError> {
    if window.is_empty() {
        return Err(EnbpiError::EmptyWindow);
    }
    if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
        return Err(EnbpiError::BadAlpha(alpha));
    }
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(EnbpiError::BadGridStep(grid_step));
    }
    let sorted = window.sorted();
    let mut beta_hat = 0.0;
    let mut best_width = f64::INFINITY;
    for beta in beta_grid(alpha, grid_step) {
        let width = quantile_sorted(&sorted, 1.0 - alpha + beta) - quantile_sorted(&sorted, beta);
        if width < best_width {
            best_width = width;
            beta_hat = beta;
        }
    }
    Ok(IntervalParams {
        alpha,
        beta_hat,
        grid_step,
    })
}

/// A conformal prediction interval around a point prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionInterval {
    pub center: f64,
    pub lower: f64,
    pub upper: f64,
    /// True when the leave-one-out fallback fed the residuals behind this
    /// interval.
    pub fallback_used: bool,
}

impl PredictionInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Shift the residual-window quantiles by the point prediction:
/// `[f + q(beta), f + q(1 - alpha + beta)]`.
pub fn prediction_interval(
    f_hat: f64,
    window: &ResidualWindow,
    params: &IntervalParams,
) -> Result<PredictionInterval, EnbpiError> {
    if window.is_empty() {
        return Err(EnbpiError::EmptyWindow);
    }
    let sorted = window.sorted();
    let lower = f_hat + quantile_sorted(&sorted, params.beta_hat);
    let upper = f_hat + quantile_sorted(&sorted, 1.0 - params.alpha + params.beta_hat);
    debug_assert!(lower <= upper);
    Ok(PredictionInterval {
        center: f_hat,
        lower,
        upper,
        fallback_used: false,
    })
}

/// Draw B index multisets of size m, uniform with replacement over `0..m`.
pub fn sample_bootstrap_indices(m: usize, b: usize, seed: RngSeed) -> Vec<Vec<usize>> {
    assert!(m >= 1 && b >= 1);
    let mut stream = seed.stream();
    (0..b)
        .map(|_| (0..m).map(|_| rng::uniform_index(&mut stream, m)).collect())
        .collect()
}

/// B learners fitted on bootstrap resamples of one arm's training pairs.
#[derive(Debug, Clone)]
pub struct BootstrapEnsemble {
    models: Vec<Model>,
    index_sets: Vec<Vec<usize>>,
    /// membership[b][i]: did resample b include training index i?
    membership: Vec<Vec<bool>>,
    pub phi: Aggregator,
    pub fitted_at_round: u64,
    train_len: usize,
}

impl BootstrapEnsemble {
    /// Fit with freshly sampled bootstrap index sets.
    pub fn fit(
        train: &TrainingSet,
        spec: &PredictorSpec,
        bootstrap_count: usize,
        phi: Aggregator,
        seed: RngSeed,
    ) -> Result<Self, EnbpiError> {
        let index_sets = sample_bootstrap_indices(train.len(), bootstrap_count, seed);
        Self::fit_with_index_sets(train, spec, index_sets, phi)
    }

    /// Fit with caller-supplied index multisets (each over `0..train.len()`).
    pub fn fit_with_index_sets(
        train: &TrainingSet,
        spec: &PredictorSpec,
        index_sets: Vec<Vec<usize>>,
        phi: Aggregator,
    ) -> Result<Self, EnbpiError> {
        let m = train.len();
        for set in &index_sets {
            if let Some(&bad) = set.iter().find(|&&i| i >= m) {
                return Err(EnbpiError::IndexOutOfRange { index: bad, len: m });
            }
        }
        let models: Vec<Model> = index_sets
            .par_iter()
            .map(|set| learners::fit(spec, &train.subset(set)?))
            .collect::<Result<_, LearnError>>()?;
        let membership = index_sets
            .iter()
            .map(|set| {
                let mut seen = vec![false; m];
                for &i in set {
                    seen[i] = true;
                }
                seen
            })
            .collect();
        Ok(Self {
            models,
            index_sets,
            membership,
            phi,
            fitted_at_round: 0,
            train_len: m,
        })
    }

    pub fn bootstrap_count(&self) -> usize {
        self.models.len()
    }

    pub fn train_len(&self) -> usize {
        self.train_len
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.index_sets
    }

    pub fn models(&self) -> &[Model] {
        &self.models
    }

    /// Aggregate over all B models at a context.
    pub fn predict(&self, x: &FeatureVector) -> Result<f64, EnbpiError> {
        let predictions = self
            .models
            .iter()
            .map(|m| learners::predict(m, x))
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(learners::aggregate(&predictions, self.phi)?)
    }

    /// Aggregate over exactly the models whose resample excluded training
    /// index `i`. Falls back to all B models (flagged) when every resample
    /// included `i`.
    pub fn loo_aggregate(
        &self,
        i: usize,
        x: &FeatureVector,
    ) -> Result<(f64, bool), EnbpiError> {
        if i >= self.train_len {
            return Err(EnbpiError::IndexOutOfRange {
                index: i,
                len: self.train_len,
            });
        }
        let mut predictions = Vec::new();
        for (b, model) in self.models.iter().enumerate() {
            if !self.membership[b][i] {
                predictions.push(learners::predict(model, x)?);
            }
        }
        if predictions.is_empty() {
            return Ok((self.predict(x)?, true));
        }
        Ok((learners::aggregate(&predictions, self.phi)?, false))
    }

    /// Leave-one-out residuals `y_i - f_loo(x_i)` over the training set
    /// (observed minus predicted), plus the number of fallback entries.
    pub fn loo_residuals(&self, train: &TrainingSet) -> Result<LooResiduals, EnbpiError> {
        let per_point: Vec<(f64, bool)> = (0..train.len())
            .into_par_iter()
            .map(|i| {
                let (pred, fallback) = self.loo_aggregate(i, &train.features[i])?;
                Ok((train.targets[i] - pred, fallback))
            })
            .collect::<Result<_, EnbpiError>>()?;
        Ok(LooResiduals {
            residuals: per_point.iter().map(|&(r, _)| r).collect(),
            fallback_count: per_point.iter().filter(|&&(_, f)| f).count(),
        })
    }
}

/// Output of [`BootstrapEnsemble::loo_residuals`].
#[derive(Debug, Clone)]
pub struct LooResiduals {
    pub residuals: Vec<f64>,
    pub fallback_count: usize,
}

/// Is an ensemble refit due at online round `t` (1-based rounds counted from
/// the end of training; `train_size` is the offline sample count)?
pub fn refit_due(t: u64, train_size: u64, refit_step: u64, is_refit: bool) -> bool {
    debug_assert!(t > train_size);
    is_refit && refit_step > 0 && (t - train_size) % refit_step == 0
}
