//! Built-in regressors standing in for arbitrary per-arm predictors, plus the
//! ensemble aggregation functions.
//!
//! Three learner families cover heterogeneous error profiles: closed-form
//! ridge regression, k-nearest-neighbours with Euclidean distance, and a
//! greedy SSE-minimizing binary regression tree. Fitting is pure and models
//! are immutable, so they can be shared freely across threads.

use crate::features::{FeatureError, FeatureVector};
use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("features and targets have different lengths ({features} vs {targets})")]
    LengthMismatch { features: usize, targets: usize },
    #[error("inconsistent feature dimension at row {row}: {got} vs {expected}")]
    InconsistentDimension {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("target at row {row} is not finite")]
    NonFiniteTarget { row: usize },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("invalid predictor spec: {0}")]
    BadSpec(String),
    #[error("cannot aggregate an empty value list")]
    EmptyAggregate,
}

/// Offline training pairs: `targets[i]` is the response for `features[i]`.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub features: Vec<FeatureVector>,
    pub targets: Vec<f64>,
}

impl TrainingSet {
    pub fn new(features: Vec<FeatureVector>, targets: Vec<f64>) -> Result<Self, LearnError> {
        if features.is_empty() {
            return Err(LearnError::EmptyTrainingSet);
        }
        if features.len() != targets.len() {
            return Err(LearnError::LengthMismatch {
                features: features.len(),
                targets: targets.len(),
            });
        }
        let d = features[0].dim();
        for (row, x) in features.iter().enumerate() {
            if x.dim() != d {
                return Err(LearnError::InconsistentDimension {
                    row,
                    got: x.dim(),
                    expected: d,
                });
            }
        }
        if let Some(row) = targets.iter().position(|t| !t.is_finite()) {
            return Err(LearnError::NonFiniteTarget { row });
        }
        Ok(Self { features, targets })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].dim()
    }

    /// Restriction to an index multiset (with multiplicity).
    pub fn subset(&self, indices: &[usize]) -> Result<Self, LearnError> {
        let features = indices.iter().map(|&i| self.features[i].clone()).collect();
        let targets = indices.iter().map(|&i| self.targets[i]).collect();
        Self::new(features, targets)
    }
}

/// Which learner to fit for an arm, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PredictorSpec {
    Ridge {
        lambda: f64,
        /// Fit an unpenalized intercept term. Defaults to true; turn off for
        /// the pure penalized closed form.
        #[serde(default = "default_true")]
        intercept: bool,
    },
    Knn {
        k: usize,
    },
    Tree {
        max_depth: usize,
    },
}

fn default_true() -> bool {
    true
}

impl PredictorSpec {
    pub fn validate(&self) -> Result<(), LearnError> {
        match self {
            PredictorSpec::Ridge { lambda, .. } => {
                if !lambda.is_finite() || *lambda < 0.0 {
                    return Err(LearnError::BadSpec(format!(
                        "ridge lambda must be finite and >= 0, got {lambda}"
                    )));
                }
            }
            PredictorSpec::Knn { k } => {
                if *k == 0 {
                    return Err(LearnError::BadSpec("knn k must be >= 1".into()));
                }
            }
            PredictorSpec::Tree { .. } => {}
        }
        Ok(())
    }

    /// Parse the flat `kind:key=value,...` form used on command lines.
    /// Unknown keys are an error.
    pub fn parse_flat(text: &str) -> Result<Self, LearnError> {
        let mut parts = text.split(':');
        let kind = parts.next().unwrap_or("").trim();
        let mut kv = BTreeMap::new();
        if let Some(rest) = parts.next() {
            if parts.next().is_some() {
                return Err(LearnError::BadSpec(format!(
                    "expected kind[:key=value;...], got {text:?}"
                )));
            }
            for pair in rest.split(';').filter(|p| !p.trim().is_empty()) {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| LearnError::BadSpec(format!("expected key=value in {pair:?}")))?;
                kv.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Self::from_kind_and_params(kind, &kv)
    }

    /// Build from a kind name and flat hyperparameter keys, rejecting unknown
    /// or missing keys.
    pub fn from_kind_and_params(
        kind: &str,
        params: &BTreeMap<String, String>,
    ) -> Result<Self, LearnError> {
        fn num<T: std::str::FromStr>(
            params: &BTreeMap<String, String>,
            key: &str,
        ) -> Result<Option<T>, LearnError> {
            match params.get(key) {
                None => Ok(None),
                Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                    LearnError::BadSpec(format!("cannot parse {key}={raw:?}"))
                }),
            }
        }
        fn reject_unknown(
            params: &BTreeMap<String, String>,
            allowed: &[&str],
        ) -> Result<(), LearnError> {
            for key in params.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(LearnError::BadSpec(format!("unknown key {key:?}")));
                }
            }
            Ok(())
        }

        let spec = match kind {
            "ridge" => {
                reject_unknown(params, &["lambda", "intercept"])?;
                PredictorSpec::Ridge {
                    lambda: num::<f64>(params, "lambda")?.unwrap_or(1.0),
                    intercept: num::<bool>(params, "intercept")?.unwrap_or(true),
                }
            }
            "knn" => {
                reject_unknown(params, &["k"])?;
                PredictorSpec::Knn {
                    k: num::<usize>(params, "k")?
                        .ok_or_else(|| LearnError::BadSpec("knn requires k".into()))?,
                }
            }
            "tree" => {
                reject_unknown(params, &["max_depth"])?;
                PredictorSpec::Tree {
                    max_depth: num::<usize>(params, "max_depth")?
                        .ok_or_else(|| LearnError::BadSpec("tree requires max_depth".into()))?,
                }
            }
            other => {
                return Err(LearnError::BadSpec(format!(
                    "unknown learner kind {other:?} (expected ridge, knn, or tree)"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Short display form, `kind:key=value;...`.
    pub fn flat_name(&self) -> String {
        match self {
            PredictorSpec::Ridge { lambda, intercept } => {
                if *intercept {
                    format!("ridge:lambda={lambda}")
                } else {
                    format!("ridge:lambda={lambda};intercept=false")
                }
            }
            PredictorSpec::Knn { k } => format!("knn:k={k}"),
            PredictorSpec::Tree { max_depth } => format!("tree:max_depth={max_depth}"),
        }
    }
}

/// Ensemble aggregation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    Mean,
    Median,
}

/// Aggregate a nonempty list of finite values.
///
/// Median of an even count is the average of the two middle order statistics.
pub fn aggregate(values: &[f64], phi: Aggregator) -> Result<f64, LearnError> {
    if values.is_empty() {
        return Err(LearnError::EmptyAggregate);
    }
    Ok(match phi {
        Aggregator::Mean => values.iter().sum::<f64>() / values.len() as f64,
        Aggregator::Median => {
            let mut sorted = values.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
            let n = sorted.len();
            if n % 2 == 1 {
                sorted[n / 2]
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
            }
        }
    })
}

#[derive(Debug, Clone)]
struct TreeNode {
    /// Split on `feature < threshold`; leaves predict `value`.
    feature: usize,
    threshold: f64,
    left: Option<Box<TreeNode>>,
    right: Option<Box<TreeNode>>,
    value: f64,
}

impl TreeNode {
    fn is_leaf(&self) -> bool {
        self.left.is_none()
    }
}

/// A fitted, immutable model.
#[derive(Debug, Clone)]
pub enum Model {
    Ridge {
        intercept: f64,
        coefficients: Vec<f64>,
    },
    Knn {
        points: Vec<FeatureVector>,
        targets: Vec<f64>,
        k: usize,
    },
    Tree {
        root: TreeNodeHandle,
        dim: usize,
    },
}

/// Opaque handle so tree internals stay private.
#[derive(Debug, Clone)]
pub struct TreeNodeHandle(TreeNode);

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Ridge { coefficients, .. } => coefficients.len(),
            Model::Knn { points, .. } => points[0].dim(),
            Model::Tree { dim, .. } => *dim,
        }
    }
}

/// Fit a model of the requested kind on the training set.
pub fn fit(spec: &PredictorSpec, data: &TrainingSet) -> Result<Model, LearnError> {
    spec.validate()?;
    match spec {
        PredictorSpec::Ridge { lambda, intercept } => fit_ridge(data, *lambda, *intercept),
        PredictorSpec::Knn { k } => Ok(Model::Knn {
            points: data.features.clone(),
            targets: data.targets.clone(),
            k: *k,
        }),
        PredictorSpec::Tree { max_depth } => {
            let indices: Vec<usize> = (0..data.len()).collect();
            let root = grow_tree(data, &indices, *max_depth);
            Ok(Model::Tree {
                root: TreeNodeHandle(root),
                dim: data.dim(),
            })
        }
    }
}

/// Evaluate a fitted model at a context of matching dimension.
pub fn predict(model: &Model, x: &FeatureVector) -> Result<f64, LearnError> {
    match model {
        Model::Ridge {
            intercept,
            coefficients,
        } => {
            x.check_dim(coefficients.len())?;
            Ok(intercept + x.dot(coefficients))
        }
        Model::Knn { points, targets, k } => {
            x.check_dim(points[0].dim())?;
            Ok(knn_predict(points, targets, *k, x))
        }
        Model::Tree { root, dim } => {
            x.check_dim(*dim)?;
            Ok(tree_predict(&root.0, x))
        }
    }
}

fn fit_ridge(data: &TrainingSet, lambda: f64, intercept: bool) -> Result<Model, LearnError> {
    let m = data.len();
    let d = data.dim();
    let cols = if intercept { d + 1 } else { d };

    // Normal equations on the (optionally intercept-augmented) design, with
    // the intercept column left unpenalized.
    let mut design = DMatrix::<f64>::zeros(m, cols);
    for (i, x) in data.features.iter().enumerate() {
        let mut j = 0;
        if intercept {
            design[(i, 0)] = 1.0;
            j = 1;
        }
        for (offset, &v) in x.as_slice().iter().enumerate() {
            design[(i, j + offset)] = v;
        }
    }
    let y = DVector::from_column_slice(&data.targets);
    let mut gram = design.transpose() * &design;
    let start = usize::from(intercept);
    for j in start..cols {
        gram[(j, j)] += lambda;
    }
    let rhs = design.transpose() * y;

    let solution = match Cholesky::new(gram.clone()) {
        Some(chol) => chol.solve(&rhs),
        // Singular normal equations (lambda = 0 on degenerate data): fall
        // back to the minimum-norm least-squares solution.
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| LearnError::BadSpec(format!("ridge solve failed: {e}")))?,
    };

    let (b0, coefs) = if intercept {
        (solution[0], solution.as_slice()[1..].to_vec())
    } else {
        (0.0, solution.as_slice().to_vec())
    };
    Ok(Model::Ridge {
        intercept: b0,
        coefficients: coefs,
    })
}

fn knn_predict(points: &[FeatureVector], targets: &[f64], k: usize, x: &FeatureVector) -> f64 {
    // Distance ties break on the lowest training index; k is capped at the
    // number of stored points.
    let mut order: Vec<usize> = (0..points.len()).collect();
    let dist = |i: usize| -> f64 {
        points[i]
            .as_slice()
            .iter()
            .zip(x.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    };
    order.sort_by(|&a, &b| {
        dist(a)
            .partial_cmp(&dist(b))
            .expect("finite distances")
            .then(a.cmp(&b))
    });
    let k = k.min(points.len());
    order[..k].iter().map(|&i| targets[i]).sum::<f64>() / k as f64
}

fn tree_predict(node: &TreeNode, x: &FeatureVector) -> f64 {
    if node.is_leaf() {
        node.value
    } else if x[node.feature] < node.threshold {
        tree_predict(node.left.as_ref().unwrap(), x)
    } else {
        tree_predict(node.right.as_ref().unwrap(), x)
    }
}

fn mean_of(data: &TrainingSet, indices: &[usize]) -> f64 {
    indices.iter().map(|&i| data.targets[i]).sum::<f64>() / indices.len() as f64
}

/// Greedy binary splits minimizing total child SSE. SSE ties break on the
/// lowest (dimension, threshold); thresholds are midpoints between
/// consecutive distinct sorted feature values.
fn grow_tree(data: &TrainingSet, indices: &[usize], depth_left: usize) -> TreeNode {
    let leaf = |value: f64| TreeNode {
        feature: 0,
        threshold: 0.0,
        left: None,
        right: None,
        value,
    };

    let value = mean_of(data, indices);
    if depth_left == 0 || indices.len() < 2 {
        return leaf(value);
    }
    let first = data.targets[indices[0]];
    if indices.iter().all(|&i| data.targets[i] == first) {
        return leaf(value);
    }

    let mut best: Option<(f64, usize, f64)> = None; // (sse, dim, threshold)
    let d = data.dim();
    for dim in 0..d {
        let mut sorted = indices.to_vec();
        sorted.sort_by(|&a, &b| {
            data.features[a][dim]
                .partial_cmp(&data.features[b][dim])
                .expect("finite features")
                .then(a.cmp(&b))
        });
        // Prefix sums of y and y^2 in sorted order.
        let n = sorted.len();
        let mut sum = vec![0.0; n + 1];
        let mut sumsq = vec![0.0; n + 1];
        for (pos, &i) in sorted.iter().enumerate() {
            let y = data.targets[i];
            sum[pos + 1] = sum[pos] + y;
            sumsq[pos + 1] = sumsq[pos] + y * y;
        }
        let sse = |lo: usize, hi: usize| -> f64 {
            // Sum of squared deviations over sorted[lo..hi].
            let count = (hi - lo) as f64;
            let s = sum[hi] - sum[lo];
            let sq = sumsq[hi] - sumsq[lo];
            (sq - s * s / count).max(0.0)
        };
        for split in 1..n {
            let prev = data.features[sorted[split - 1]][dim];
            let next = data.features[sorted[split]][dim];
            if prev == next {
                continue;
            }
            let threshold = (prev + next) / 2.0;
            let total = sse(0, split) + sse(split, n);
            let candidate = (total, dim, threshold);
            best = Some(match best {
                None => candidate,
                Some(current) => {
                    let (cur_sse, cur_dim, cur_thr) = current;
                    if total < cur_sse
                        || (total == cur_sse
                            && (dim < cur_dim || (dim == cur_dim && threshold < cur_thr)))
                    {
                        candidate
                    } else {
                        current
                    }
                }
            });
        }
    }

    let Some((_, dim, threshold)) = best else {
        // Every feature is constant across the node; nothing to split on.
        return leaf(value);
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .iter()
        .partition(|&&i| data.features[i][dim] < threshold);
    TreeNode {
        feature: dim,
        threshold,
        left: Some(Box::new(grow_tree(data, &left_idx, depth_left - 1))),
        right: Some(Box::new(grow_tree(data, &right_idx, depth_left - 1))),
        value,
    }
}
