//! Regret series, coverage, and binary-classification metrics.
//!
//! AUROC is the Mann-Whitney statistic (ties count one half); AUPRC is the
//! area under the precision-recall step curve with descending-score sweep and
//! rectangle integration, processing tied scores as one block.

use crate::enbpi::PredictionInterval;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("series have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("input is empty")]
    Empty,
    #[error("need at least one positive and one negative label")]
    DegenerateClasses,
    #[error("need at least one positive label")]
    NoPositives,
    #[error("utility normalization is degenerate: optimal equals inaction")]
    DegenerateUtility,
    #[error("patient {patient}: predictions and labels have different lengths")]
    PatientLengthMismatch { patient: usize },
}

/// Scores with binary labels.
#[derive(Debug, Clone)]
pub struct ScoredSet {
    pub scores: Vec<f64>,
    pub labels: Vec<bool>,
}

impl ScoredSet {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self, MetricsError> {
        if scores.len() != labels.len() {
            return Err(MetricsError::LengthMismatch {
                left: scores.len(),
                right: labels.len(),
            });
        }
        Ok(Self { scores, labels })
    }

    fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }
}

/// Per-round instantaneous regret and its running average.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretSeries {
    pub instantaneous: Vec<f64>,
    pub running_average: Vec<f64>,
}

impl RegretSeries {
    pub fn final_average(&self) -> f64 {
        self.running_average.last().copied().unwrap_or(0.0)
    }
}

/// Instantaneous regret `best - chosen` per round with its prefix mean.
pub fn average_regret(
    chosen_rewards: &[f64],
    best_rewards: &[f64],
) -> Result<RegretSeries, MetricsError> {
    if chosen_rewards.len() != best_rewards.len() {
        return Err(MetricsError::LengthMismatch {
            left: chosen_rewards.len(),
            right: best_rewards.len(),
        });
    }
    let instantaneous: Vec<f64> = best_rewards
        .iter()
        .zip(chosen_rewards)
        .map(|(b, c)| b - c)
        .collect();
    let mut running_average = Vec::with_capacity(instantaneous.len());
    let mut sum = 0.0;
    for (i, r) in instantaneous.iter().enumerate() {
        sum += r;
        running_average.push(sum / (i + 1) as f64);
    }
    Ok(RegretSeries {
        instantaneous,
        running_average,
    })
}

/// Area under the ROC curve: over all positive/negative pairs, the fraction
/// where the positive scores higher, ties counting one half.
pub fn auroc(data: &ScoredSet) -> Result<f64, MetricsError> {
    let p = data.positives();
    let n = data.labels.len() - p;
    if p == 0 || n == 0 {
        return Err(MetricsError::DegenerateClasses);
    }
    // Rank-sum form with average ranks for ties.
    let mut order: Vec<usize> = (0..data.scores.len()).collect();
    order.sort_by(|&a, &b| {
        data.scores[a]
            .partial_cmp(&data.scores[b])
            .expect("finite scores")
    });
    let mut rank_sum_positive = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && data.scores[order[j]] == data.scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j share the average rank.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if data.labels[idx] {
                rank_sum_positive += avg_rank;
            }
        }
        i = j;
    }
    let p_f = p as f64;
    Ok((rank_sum_positive - p_f * (p_f + 1.0) / 2.0) / (p_f * n as f64))
}

/// Area under the precision-recall step curve, descending-score sweep with
/// rectangle integration; tied scores are one block.
pub fn auprc(data: &ScoredSet) -> Result<f64, MetricsError> {
    let p = data.positives();
    if p == 0 {
        return Err(MetricsError::NoPositives);
    }
    let mut order: Vec<usize> = (0..data.scores.len()).collect();
    order.sort_by(|&a, &b| {
        data.scores[b]
            .partial_cmp(&data.scores[a])
            .expect("finite scores")
    });
    let mut area = 0.0;
    let mut tp = 0usize;
    let mut predicted = 0usize;
    let mut prev_recall = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && data.scores[order[j]] == data.scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..j] {
            if data.labels[idx] {
                tp += 1;
            }
        }
        predicted += j - i;
        let recall = tp as f64 / p as f64;
        let precision = tp as f64 / predicted as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    Ok(area)
}

/// Accuracy, precision, recall, and F-measure at a score threshold
/// (prediction = score >= threshold). Precision is 0 with no positive
/// predictions, recall is 0 with no positives, and F is 0 when P + R = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

pub fn confusion_metrics(data: &ScoredSet, threshold: f64) -> ConfusionMetrics {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut tn = 0usize;
    let mut fn_ = 0usize;
    for (&score, &label) in data.scores.iter().zip(&data.labels) {
        let predicted = score >= threshold;
        match (predicted, label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let total = (tp + fp + tn + fn_) as f64;
    let accuracy = if total > 0.0 {
        (tp + tn) as f64 / total
    } else {
        0.0
    };
    let precision = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall = if tp + fn_ > 0 {
        tp as f64 / (tp + fn_) as f64
    } else {
        0.0
    };
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    ConfusionMetrics {
        accuracy,
        precision,
        recall,
        f_measure,
    }
}

/// Fraction of realized values inside their intervals.
pub fn coverage_rate(
    intervals: &[PredictionInterval],
    realized: &[f64],
) -> Result<f64, MetricsError> {
    if intervals.is_empty() {
        return Err(MetricsError::Empty);
    }
    if intervals.len() != realized.len() {
        return Err(MetricsError::LengthMismatch {
            left: intervals.len(),
            right: realized.len(),
        });
    }
    let inside = intervals
        .iter()
        .zip(realized)
        .filter(|(iv, &r)| iv.contains(r))
        .count();
    Ok(inside as f64 / intervals.len() as f64)
}

/// Piecewise per-hour weights for the clinical utility score, all
/// configurable. Positive predictions near onset earn a ramped reward; late
/// or spurious positives pay the false-positive penalty; missed septic hours
/// pay the false-negative penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams {
    /// Hours before onset where a positive prediction earns a ramping reward.
    pub early_window: u32,
    /// Hours after onset over which the true-positive reward decays to zero.
    pub late_window: u32,
    /// Peak per-hour reward for a positive prediction at onset.
    pub max_tp_reward: f64,
    /// Per-hour penalty for a positive prediction outside the reward windows.
    pub fp_penalty: f64,
    /// Per-hour penalty for a negative prediction on a septic hour.
    pub fn_penalty: f64,
    /// Per-hour reward for a correct negative.
    pub tn_reward: f64,
}

impl Default for UtilityParams {
    fn default() -> Self {
        Self {
            early_window: 12,
            late_window: 3,
            max_tp_reward: 1.0,
            fp_penalty: -0.05,
            fn_penalty: -2.0,
            tn_reward: 0.0,
        }
    }
}

impl UtilityParams {
    /// Weight of one patient-hour given the binary prediction, the hour's
    /// label, the hour index, and the patient's onset hour (first labeled
    /// hour), if any.
    pub fn hour_weight(
        &self,
        predicted: bool,
        label: bool,
        hour: usize,
        onset: Option<usize>,
    ) -> f64 {
        match (predicted, label) {
            (true, true) => {
                let onset = onset.expect("labeled hour implies an onset");
                let since = (hour - onset) as f64;
                if self.late_window == 0 {
                    if hour == onset {
                        self.max_tp_reward
                    } else {
                        0.0
                    }
                } else {
                    self.max_tp_reward * (1.0 - since / f64::from(self.late_window)).max(0.0)
                }
            }
            (true, false) => {
                if let Some(onset) = onset {
                    let early = self.early_window as usize;
                    if hour < onset && onset - hour <= early && early > 0 {
                        // Early detection: ramp from zero at the window edge
                        // to the peak at onset.
                        let toward = (early - (onset - hour)) as f64;
                        return self.max_tp_reward * toward / early as f64;
                    }
                }
                self.fp_penalty
            }
            (false, true) => self.fn_penalty,
            (false, false) => self.tn_reward,
        }
    }
}

/// One patient's aligned hourly predictions and labels.
#[derive(Debug, Clone)]
pub struct PatientSeries {
    pub predictions: Vec<bool>,
    pub labels: Vec<bool>,
}

impl PatientSeries {
    fn onset(&self) -> Option<usize> {
        self.labels.iter().position(|&l| l)
    }
}

fn raw_utility_with(
    patients: &[PatientSeries],
    params: &UtilityParams,
    predict: impl Fn(&PatientSeries, usize) -> bool,
) -> f64 {
    let mut total = 0.0;
    for patient in patients {
        let onset = patient.onset();
        for hour in 0..patient.labels.len() {
            total += params.hour_weight(
                predict(patient, hour),
                patient.labels[hour],
                hour,
                onset,
            );
        }
    }
    total
}

/// Raw (unnormalized) utility of the given predictions.
pub fn raw_clinical_utility(
    patients: &[PatientSeries],
    params: &UtilityParams,
) -> Result<f64, MetricsError> {
    for (i, p) in patients.iter().enumerate() {
        if p.predictions.len() != p.labels.len() {
            return Err(MetricsError::PatientLengthMismatch { patient: i });
        }
    }
    Ok(raw_utility_with(patients, params, |p, h| p.predictions[h]))
}

/// Normalized clinical utility: 0 for the all-negative predictor, 1 for the
/// label-matching predictor.
pub fn clinical_utility(
    patients: &[PatientSeries],
    params: &UtilityParams,
) -> Result<f64, MetricsError> {
    let observed = raw_clinical_utility(patients, params)?;
    let inaction = raw_utility_with(patients, params, |_, _| false);
    let optimal = raw_utility_with(patients, params, |p, h| p.labels[h]);
    let denom = optimal - inaction;
    if denom.abs() < 1e-12 {
        return Err(MetricsError::DegenerateUtility);
    }
    Ok((observed - inaction) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{uniform01, uniform_index, RngSeed};

    fn set(scores: &[f64], labels: &[u8]) -> ScoredSet {
        ScoredSet::new(scores.to_vec(), labels.iter().map(|&l| l == 1).collect()).unwrap()
    }

    /// Explicit pairwise oracle for AUROC.
    fn auroc_pairwise(data: &ScoredSet) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in data.labels.iter().enumerate() {
            if !li {
                continue;
            }
            for (j, &lj) in data.labels.iter().enumerate() {
                if lj {
                    continue;
                }
                pairs += 1.0;
                if data.scores[i] > data.scores[j] {
                    wins += 1.0;
                } else if data.scores[i] == data.scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    /// Independent AUPRC oracle: recount the confusion table from scratch at
    /// every distinct threshold, then step-integrate.
    fn auprc_recount(data: &ScoredSet) -> f64 {
        let mut thresholds = data.scores.clone();
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        thresholds.dedup();
        let p = data.labels.iter().filter(|&&l| l).count() as f64;
        let mut area = 0.0;
        let mut prev_recall = 0.0;
        for &thr in &thresholds {
            let tp = data
                .scores
                .iter()
                .zip(&data.labels)
                .filter(|(&s, &l)| s >= thr && l)
                .count() as f64;
            let predicted = data.scores.iter().filter(|&&s| s >= thr).count() as f64;
            let recall = tp / p;
            let precision = tp / predicted;
            area += (recall - prev_recall) * precision;
            prev_recall = recall;
        }
        area
    }

    #[test]
    fn regret_of_optimal_policy_is_zero() {
        let r = average_regret(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.instantaneous.iter().all(|&x| x == 0.0));
        assert!(r.running_average.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn constant_gap_gives_constant_average() {
        let chosen = [0.0, 1.0, 2.0];
        let best = [0.5, 1.5, 2.5];
        let r = average_regret(&chosen, &best).unwrap();
        assert!(r.running_average.iter().all(|&x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn prefix_means_of_a_single_spike() {
        let r = average_regret(&[0.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = [1.0, 0.5, 1.0 / 3.0, 0.25];
        for (got, want) in r.running_average.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn auroc_separated_and_tied() {
        let perfect = set(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]);
        assert_eq!(auroc(&perfect).unwrap(), 1.0);
        let all_tied = set(&[0.5, 0.5, 0.5, 0.5], &[1, 1, 0, 0]);
        assert_eq!(auroc(&all_tied).unwrap(), 0.5);
        let degenerate = set(&[0.5, 0.5], &[1, 1]);
        assert!(auroc(&degenerate).is_err());
    }

    #[test]
    fn auroc_matches_pairwise_oracle_on_random_sets() {
        let mut stream = RngSeed(55).stream();
        for trial in 0..100 {
            let n = 5 + uniform_index(&mut stream, 196);
            // Quantized scores so ties actually occur.
            let scores: Vec<f64> = (0..n)
                .map(|_| (uniform01(&mut stream) * 20.0).round() / 20.0)
                .collect();
            let mut labels: Vec<bool> = (0..n).map(|_| uniform01(&mut stream) < 0.4).collect();
            labels[0] = true;
            labels[1] = false;
            let data = ScoredSet::new(scores, labels).unwrap();
            let fast = auroc(&data).unwrap();
            let oracle = auroc_pairwise(&data);
            assert!(
                (fast - oracle).abs() < 1e-12,
                "trial {trial}: {fast} vs {oracle}"
            );
        }
    }

    #[test]
    fn auroc_is_invariant_under_increasing_transforms() {
        let data = set(&[0.1, 0.4, 0.35, 0.8, 0.7], &[0, 0, 1, 1, 0]);
        let transformed = ScoredSet::new(
            data.scores.iter().map(|s| (3.0 * s).exp()).collect(),
            data.labels.clone(),
        )
        .unwrap();
        assert!((auroc(&data).unwrap() - auroc(&transformed).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn auroc_of_negated_scores_complements_for_tie_free_sets() {
        let data = set(&[0.1, 0.45, 0.3, 0.8, 0.7, 0.2], &[0, 1, 1, 1, 0, 0]);
        let negated = ScoredSet::new(
            data.scores.iter().map(|s| -s).collect(),
            data.labels.clone(),
        )
        .unwrap();
        let sum = auroc(&data).unwrap() + auroc(&negated).unwrap();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auprc_perfect_and_worst_single_positive() {
        let perfect = set(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]);
        assert_eq!(auprc(&perfect).unwrap(), 1.0);
        // Single positive ranked last among n.
        let n = 8;
        let scores: Vec<f64> = (0..n).map(|i| 1.0 - i as f64 / n as f64).collect();
        let mut labels = vec![0u8; n];
        labels[n - 1] = 1;
        let worst = set(&scores, &labels);
        assert!((auprc(&worst).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        assert!(auprc(&set(&[0.1], &[0])).is_err());
    }

    #[test]
    fn auprc_matches_recount_oracle_on_random_sets() {
        let mut stream = RngSeed(56).stream();
        for trial in 0..100 {
            let n = 5 + uniform_index(&mut stream, 196);
            let scores: Vec<f64> = (0..n)
                .map(|_| (uniform01(&mut stream) * 10.0).round() / 10.0)
                .collect();
            let mut labels: Vec<bool> = (0..n).map(|_| uniform01(&mut stream) < 0.3).collect();
            labels[0] = true;
            let data = ScoredSet::new(scores, labels).unwrap();
            let fast = auprc(&data).unwrap();
            let oracle = auprc_recount(&data);
            assert!(
                (fast - oracle).abs() < 1e-12,
                "trial {trial}: {fast} vs {oracle}"
            );
        }
    }

    #[test]
    fn auprc_of_uniform_scores_tracks_prevalence() {
        let mut stream = RngSeed(57).stream();
        let n = 10_000;
        let prevalence = 0.2;
        let scores: Vec<f64> = (0..n).map(|_| uniform01(&mut stream)).collect();
        let labels: Vec<bool> = (0..n)
            .map(|_| uniform01(&mut stream) < prevalence)
            .collect();
        let data = ScoredSet::new(scores, labels).unwrap();
        let value = auprc(&data).unwrap();
        assert!(
            (value - prevalence).abs() < 0.03,
            "auprc {value} vs prevalence {prevalence}"
        );
    }

    #[test]
    fn confusion_conventions() {
        let all_right = set(&[0.9, 0.1], &[1, 0]);
        let m = confusion_metrics(&all_right, 0.5);
        assert_eq!((m.accuracy, m.f_measure), (1.0, 1.0));

        // No positive predictions.
        let none = confusion_metrics(&set(&[0.1, 0.2], &[1, 0]), 0.5);
        assert_eq!((none.precision, none.recall, none.f_measure), (0.0, 0.0, 0.0));

        // TP=1, FP=1, FN=1, TN=1.
        let balanced = confusion_metrics(&set(&[0.9, 0.9, 0.1, 0.1], &[1, 0, 1, 0]), 0.5);
        assert_eq!(balanced.accuracy, 0.5);
        assert_eq!(balanced.precision, 0.5);
        assert_eq!(balanced.recall, 0.5);
        assert_eq!(balanced.f_measure, 0.5);
    }

    #[test]
    fn coverage_rate_counts_containment() {
        let iv = |lo: f64, hi: f64| PredictionInterval {
            center: (lo + hi) / 2.0,
            lower: lo,
            upper: hi,
            fallback_used: false,
        };
        let intervals = vec![iv(0.0, 1.0), iv(0.0, 1.0), iv(0.0, 1.0), iv(0.0, 1.0)];
        assert_eq!(
            coverage_rate(&intervals, &[0.5, 0.5, 0.5, 0.5]).unwrap(),
            1.0
        );
        assert_eq!(
            coverage_rate(&intervals, &[2.0, 2.0, 2.0, 2.0]).unwrap(),
            0.0
        );
        assert_eq!(
            coverage_rate(&intervals, &[0.5, 2.0, 0.0, -1.0]).unwrap(),
            0.5
        );
        assert!(coverage_rate(&[], &[]).is_err());
    }

    fn sick(predictions: &[u8], labels: &[u8]) -> PatientSeries {
        PatientSeries {
            predictions: predictions.iter().map(|&p| p == 1).collect(),
            labels: labels.iter().map(|&l| l == 1).collect(),
        }
    }

    #[test]
    fn utility_normalization_anchors() {
        let patients = vec![
            sick(&[0, 0, 1, 1], &[0, 0, 1, 1]),
            sick(&[0, 0, 0, 0], &[0, 1, 1, 1]),
            sick(&[0, 0, 0], &[0, 0, 0]),
        ];
        let params = UtilityParams::default();
        // Label-matching predictor.
        let optimal: Vec<PatientSeries> = patients
            .iter()
            .map(|p| PatientSeries {
                predictions: p.labels.clone(),
                labels: p.labels.clone(),
            })
            .collect();
        assert!((clinical_utility(&optimal, &params).unwrap() - 1.0).abs() < 1e-12);
        // All-negative predictor.
        let inaction: Vec<PatientSeries> = patients
            .iter()
            .map(|p| PatientSeries {
                predictions: vec![false; p.labels.len()],
                labels: p.labels.clone(),
            })
            .collect();
        assert!(clinical_utility(&inaction, &params).unwrap().abs() < 1e-12);
    }

    #[test]
    fn utility_toy_cohort_by_direct_summation() {
        let params = UtilityParams {
            early_window: 2,
            late_window: 2,
            max_tp_reward: 1.0,
            fp_penalty: -0.1,
            fn_penalty: -1.0,
            tn_reward: 0.0,
        };
        // Patient A: onset at hour 2 of 4. Predictions: early positive at
        // hour 1 (ramp 0.5), TP at onset (1.0), miss at hour 3 (-1.0).
        let a = sick(&[0, 1, 1, 0], &[0, 0, 1, 1]);
        // Patient B: never septic, one false positive (-0.1), three TNs (0).
        let b = sick(&[0, 1, 0, 0], &[0, 0, 0, 0]);
        // Patient C: onset hour 1 of 3; all negative: two misses (-1 each).
        let c = sick(&[0, 0, 0], &[0, 1, 1]);
        let patients = vec![a, b, c];
        let raw = raw_clinical_utility(&patients, &params).unwrap();
        let expected = (0.5 + 1.0 - 1.0) + (-0.1) + (-2.0);
        assert!((raw - expected).abs() < 1e-12, "raw {raw} vs {expected}");

        // Hand-computed normalization: optimal = TP(onset)+TP(onset+1) per
        // septic patient; inaction = fn_penalty per labeled hour.
        let optimal = (1.0 + 0.5) + 0.0 + (1.0 + 0.5);
        let inaction = -2.0 + 0.0 + -2.0;
        let expected_norm = (raw - inaction) / (optimal - inaction);
        let norm = clinical_utility(&patients, &params).unwrap();
        assert!((norm - expected_norm).abs() < 1e-12);
    }

    #[test]
    fn flipping_a_missed_hour_to_positive_never_hurts() {
        let mut stream = RngSeed(91).stream();
        let params = UtilityParams::default();
        for _ in 0..50 {
            let len = 6 + uniform_index(&mut stream, 20);
            let onset = 2 + uniform_index(&mut stream, len - 3);
            let labels: Vec<bool> = (0..len).map(|h| h >= onset).collect();
            let predictions: Vec<bool> =
                (0..len).map(|_| uniform01(&mut stream) < 0.5).collect();
            let base = vec![PatientSeries {
                predictions: predictions.clone(),
                labels: labels.clone(),
            }];
            let raw = raw_clinical_utility(&base, &params).unwrap();
            for hour in 0..len {
                if labels[hour] && !predictions[hour] {
                    let mut flipped = predictions.clone();
                    flipped[hour] = true;
                    let cohort = vec![PatientSeries {
                        predictions: flipped,
                        labels: labels.clone(),
                    }];
                    let after = raw_clinical_utility(&cohort, &params).unwrap();
                    assert!(after >= raw - 1e-12, "flip at {hour} hurt: {raw} -> {after}");
                }
            }
        }
    }

    #[test]
    fn utility_errors_when_optimal_equals_inaction() {
        let patients = vec![sick(&[0, 0], &[0, 0])];
        let params = UtilityParams {
            tn_reward: 0.0,
            ..UtilityParams::default()
        };
        assert_eq!(
            clinical_utility(&patients, &params),
            Err(MetricsError::DegenerateUtility)
        );
    }
}
