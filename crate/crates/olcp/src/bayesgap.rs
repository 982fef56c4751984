//! Bayesian linear-Gaussian baseline for producing per-arm confidence bounds.
//!
//! Arms share a latent parameter vector with a Gaussian prior; observed
//! rewards at chosen arm features update a conjugate posterior in closed
//! form. Per-arm marginals then give Gaussian upper/lower bounds that can be
//! fed to the same gap machinery as the conformal intervals.
//!
//! The posterior is computed through a symmetric positive-definite solve of
//! the precision matrix; no explicit inversion happens on the hot path.

use crate::features::{FeatureError, FeatureVector};
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BayesError {
    #[error("kernel matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("kernel matrix is asymmetric: |G - G'| reaches {0:e}")]
    Asymmetric(f64),
    #[error("kernel eigenvalue {0} is below the PSD tolerance")]
    NegativeEigenvalue(f64),
    #[error("prior variances must be positive: sigma2={sigma2}, tau2={tau2}")]
    BadPrior { sigma2: f64, tau2: f64 },
    #[error("contexts and rewards have different lengths ({contexts} vs {rewards})")]
    LengthMismatch { contexts: usize, rewards: usize },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("posterior precision matrix is not positive definite")]
    NotPositiveDefinite,
}

/// Observation noise and prior scale, with an optional arm-covariance kernel.
#[derive(Debug, Clone)]
pub struct PriorSpec {
    /// Observation noise variance, > 0.
    pub sigma2: f64,
    /// Prior variance of the shared parameter, > 0.
    pub tau2: f64,
    /// Optional K x K arm-covariance kernel; identity when absent.
    pub kernel: Option<DMatrix<f64>>,
}

impl PriorSpec {
    pub fn new(sigma2: f64, tau2: f64) -> Result<Self, BayesError> {
        if !(sigma2.is_finite() && sigma2 > 0.0 && tau2.is_finite() && tau2 > 0.0) {
            return Err(BayesError::BadPrior { sigma2, tau2 });
        }
        Ok(Self {
            sigma2,
            tau2,
            kernel: None,
        })
    }
}

/// Per-arm feature vectors (rows of the factored design matrix).
#[derive(Debug, Clone)]
pub struct ArmFeatures {
    pub vectors: Vec<FeatureVector>,
}

/// Gaussian posterior over the shared parameter.
#[derive(Debug, Clone)]
pub struct GaussianPosterior {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

/// Marginal reward distribution of one arm under the posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmMarginal {
    pub nu_hat: f64,
    pub var_hat: f64,
}

/// Factor a symmetric PSD kernel `G` into per-arm features with
/// `C C' = G`: eigendecompose, clip small negative eigenvalues to zero,
/// order by descending eigenvalue, canonicalize each eigenvector's sign so
/// its largest-magnitude entry is positive, and scale by the eigenvalue
/// square roots.
pub fn factor_design(kernel: &DMatrix<f64>) -> Result<ArmFeatures, BayesError> {
    let (rows, cols) = kernel.shape();
    if rows != cols {
        return Err(BayesError::NotSquare { rows, cols });
    }
    let mut worst = 0.0f64;
    for i in 0..rows {
        for j in (i + 1)..rows {
            worst = worst.max((kernel[(i, j)] - kernel[(j, i)]).abs());
        }
    }
    if worst > 1e-12 {
        return Err(BayesError::Asymmetric(worst));
    }

    let eigen = SymmetricEigen::new(kernel.clone());
    let k = rows;
    let mut order: Vec<usize> = (0..k).collect();
    // Stable descending sort keeps nalgebra's order for tied eigenvalues.
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let mut scaled = DMatrix::<f64>::zeros(k, k);
    for (col, &src) in order.iter().enumerate() {
        let value = eigen.eigenvalues[src];
        if value < -1e-6 {
            return Err(BayesError::NegativeEigenvalue(value));
        }
        let scale = value.max(0.0).sqrt();
        let vector = eigen.eigenvectors.column(src);
        // Sign canonicalization: largest-magnitude entry positive, earliest
        // such entry deciding ties.
        let mut lead = 0;
        for i in 1..k {
            if vector[i].abs() > vector[lead].abs() {
                lead = i;
            }
        }
        let sign = if vector[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..k {
            scaled[(i, col)] = sign * vector[i] * scale;
        }
    }

    let vectors = (0..k)
        .map(|i| {
            FeatureVector::new(scaled.row(i).iter().copied().collect())
                .expect("finite factorization")
        })
        .collect();
    Ok(ArmFeatures { vectors })
}

/// Closed-form conjugate posterior after observing `rewards[i]` at
/// `contexts[i]`. An empty history returns the prior.
pub fn posterior_update(
    prior: &PriorSpec,
    contexts: &[FeatureVector],
    rewards: &[f64],
) -> Result<GaussianPosterior, BayesError> {
    if !(prior.sigma2 > 0.0 && prior.tau2 > 0.0) {
        return Err(BayesError::BadPrior {
            sigma2: prior.sigma2,
            tau2: prior.tau2,
        });
    }
    if contexts.len() != rewards.len() {
        return Err(BayesError::LengthMismatch {
            contexts: contexts.len(),
            rewards: rewards.len(),
        });
    }
    let d = contexts.first().map(|c| c.dim()).unwrap_or(0);
    for c in contexts {
        c.check_dim(d)?;
    }
    if d == 0 {
        // No observations and no dimension hint: a posterior needs a
        // dimension, so callers must pass at least one context. Treat the
        // truly empty call as dimension zero.
        return Ok(GaussianPosterior {
            mean: DVector::zeros(0),
            covariance: DMatrix::zeros(0, 0),
        });
    }

    let t = contexts.len();
    let mut design = DMatrix::<f64>::zeros(t, d);
    for (i, c) in contexts.iter().enumerate() {
        for (j, &v) in c.as_slice().iter().enumerate() {
            design[(i, j)] = v;
        }
    }
    let y = DVector::from_column_slice(rewards);

    let mut precision = design.transpose() * &design / prior.sigma2;
    for j in 0..d {
        precision[(j, j)] += 1.0 / prior.tau2;
    }
    let chol = Cholesky::new(precision).ok_or(BayesError::NotPositiveDefinite)?;
    let mean = chol.solve(&(design.transpose() * y / prior.sigma2));
    let covariance = chol.inverse();
    Ok(GaussianPosterior { mean, covariance })
}

/// Same posterior with an explicit dimension for empty histories: returns the
/// prior `(0, tau2 * I)` when no observations are given.
pub fn posterior_with_dim(
    prior: &PriorSpec,
    dim: usize,
    contexts: &[FeatureVector],
    rewards: &[f64],
) -> Result<GaussianPosterior, BayesError> {
    if contexts.is_empty() {
        if rewards.is_empty() {
            return Ok(GaussianPosterior {
                mean: DVector::zeros(dim),
                covariance: DMatrix::identity(dim, dim) * prior.tau2,
            });
        }
        return Err(BayesError::LengthMismatch {
            contexts: 0,
            rewards: rewards.len(),
        });
    }
    contexts[0].check_dim(dim)?;
    posterior_update(prior, contexts, rewards)
}

/// Marginal mean and variance of an arm's expected reward.
pub fn arm_marginal(
    posterior: &GaussianPosterior,
    arm_features: &FeatureVector,
) -> Result<ArmMarginal, BayesError> {
    if arm_features.dim() != posterior.mean.len() {
        return Err(FeatureError::DimensionMismatch {
            got: arm_features.dim(),
            expected: posterior.mean.len(),
        }
        .into());
    }
    let c = DVector::from_column_slice(arm_features.as_slice());
    let nu_hat = c.dot(&posterior.mean);
    // Quadratic form of a PSD matrix; clamp the rounding dust.
    let var_hat = (&posterior.covariance * &c).dot(&c).max(0.0);
    Ok(ArmMarginal { nu_hat, var_hat })
}

/// Symmetric Gaussian confidence bounds `nu_hat ± beta * sqrt(var_hat)`.
pub fn gauss_bounds(marginal: &ArmMarginal, beta_explore: f64) -> (f64, f64) {
    assert!(
        beta_explore >= 0.0,
        "exploration multiplier must be nonnegative"
    );
    let half = beta_explore * marginal.var_hat.sqrt();
    (marginal.nu_hat - half, marginal.nu_hat + half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{standard_normal, uniform_index, RngSeed};

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    /// Independent oracle: assemble the precision matrix and invert it with
    /// the general LU-based inverse.
    fn posterior_oracle(
        prior: &PriorSpec,
        contexts: &[FeatureVector],
        rewards: &[f64],
    ) -> GaussianPosterior {
        let d = contexts[0].dim();
        let t = contexts.len();
        let mut design = DMatrix::<f64>::zeros(t, d);
        for (i, c) in contexts.iter().enumerate() {
            for (j, &v) in c.as_slice().iter().enumerate() {
                design[(i, j)] = v;
            }
        }
        let y = DVector::from_column_slice(rewards);
        let mut precision = design.transpose() * &design / prior.sigma2;
        for j in 0..d {
            precision[(j, j)] += 1.0 / prior.tau2;
        }
        let covariance = precision.try_inverse().expect("invertible precision");
        let mean = &covariance * design.transpose() * y / prior.sigma2;
        GaussianPosterior { mean, covariance }
    }

    #[test]
    fn identity_kernel_factors_to_identity() {
        let arms = factor_design(&DMatrix::identity(4, 4)).unwrap();
        for (i, c) in arms.vectors.iter().enumerate() {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((c[j] - expected).abs() < 1e-12, "row {i}: {c:?}");
            }
        }
    }

    #[test]
    fn diagonal_kernel_factors_to_root_diagonal() {
        let g = DMatrix::from_diagonal(&DVector::from_column_slice(&[4.0, 1.0]));
        let arms = factor_design(&g).unwrap();
        assert!((arms.vectors[0][0] - 2.0).abs() < 1e-12);
        assert!(arms.vectors[0][1].abs() < 1e-12);
        assert!(arms.vectors[1][0].abs() < 1e-12);
        assert!((arms.vectors[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_psd_kernels_reconstruct() {
        let mut stream = RngSeed(41).stream();
        for trial in 0..100 {
            let k = 2 + uniform_index(&mut stream, 5);
            let m = DMatrix::from_fn(k, k, |_, _| standard_normal(&mut stream));
            let g = &m * m.transpose() + DMatrix::identity(k, k) * 1e-6;
            let arms = factor_design(&g).unwrap();
            for i in 0..k {
                for j in 0..k {
                    let dot = arms.vectors[i].dot(arms.vectors[j].as_slice());
                    assert!(
                        (dot - g[(i, j)]).abs() < 1e-9,
                        "trial {trial}: ({i},{j}) {dot} vs {}",
                        g[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn rank_deficient_kernels_keep_zero_directions() {
        // Rank-1 kernel: one positive eigenvalue, one clipped at zero.
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let arms = factor_design(&g).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let dot = arms.vectors[i].dot(arms.vectors[j].as_slice());
                assert!((dot - g[(i, j)]).abs() < 1e-9);
            }
        }
        assert!(arms.vectors[0][1].abs() < 1e-9);
        assert!(arms.vectors[1][1].abs() < 1e-9);
    }

    #[test]
    fn asymmetric_and_indefinite_kernels_are_rejected() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(matches!(
            factor_design(&g),
            Err(BayesError::Asymmetric(_))
        ));
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            factor_design(&g),
            Err(BayesError::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn empty_history_returns_the_prior() {
        let prior = PriorSpec::new(1.0, 2.5).unwrap();
        let post = posterior_with_dim(&prior, 3, &[], &[]).unwrap();
        assert_eq!(post.mean, DVector::zeros(3));
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 2.5 } else { 0.0 };
                assert_eq!(post.covariance[(i, j)], expected);
            }
        }
    }

    #[test]
    fn single_observation_closed_form() {
        // d=1, sigma2=tau2=1, one observation (c=1, y=2):
        // precision = 1 + 1 = 2, covariance = 0.5, mean = 0.5 * 1 * 2 = 1.
        let prior = PriorSpec::new(1.0, 1.0).unwrap();
        let post = posterior_update(&prior, &[fv(&[1.0])], &[2.0]).unwrap();
        assert!((post.covariance[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((post.mean[0] - 1.0).abs() < 1e-12);

        let marginal = arm_marginal(&post, &fv(&[1.0])).unwrap();
        assert!((marginal.nu_hat - 1.0).abs() < 1e-12);
        assert!((marginal.var_hat - 0.5).abs() < 1e-12);
    }

    #[test]
    fn matches_explicit_inverse_oracle_on_random_instances() {
        let mut stream = RngSeed(4242).stream();
        for trial in 0..200 {
            let d = 1 + uniform_index(&mut stream, 5);
            let t = 1 + uniform_index(&mut stream, 50);
            let prior = PriorSpec::new(
                0.25 + 2.0 * crate::rng::uniform01(&mut stream),
                0.25 + 2.0 * crate::rng::uniform01(&mut stream),
            )
            .unwrap();
            let contexts: Vec<FeatureVector> = (0..t)
                .map(|_| {
                    FeatureVector::new(
                        (0..d).map(|_| standard_normal(&mut stream)).collect(),
                    )
                    .unwrap()
                })
                .collect();
            let rewards: Vec<f64> = (0..t).map(|_| standard_normal(&mut stream)).collect();

            let fast = posterior_update(&prior, &contexts, &rewards).unwrap();
            let oracle = posterior_oracle(&prior, &contexts, &rewards);

            let mean_err = (&fast.mean - &oracle.mean).norm() / (1.0 + oracle.mean.norm());
            let cov_err = (&fast.covariance - &oracle.covariance).norm()
                / (1.0 + oracle.covariance.norm());
            assert!(mean_err < 1e-9, "trial {trial}: mean error {mean_err:e}");
            assert!(cov_err < 1e-9, "trial {trial}: cov error {cov_err:e}");
        }
    }

    #[test]
    fn repeated_context_shrinks_directional_variance() {
        let prior = PriorSpec::new(1.0, 1.0).unwrap();
        let c = fv(&[0.8, -0.3]);
        let mut contexts = Vec::new();
        let mut rewards = Vec::new();
        let mut last = f64::INFINITY;
        for step in 0..20 {
            contexts.push(c.clone());
            rewards.push(0.5);
            let post = posterior_update(&prior, &contexts, &rewards).unwrap();
            let var = arm_marginal(&post, &c).unwrap().var_hat;
            assert!(var <= last + 1e-12, "variance grew at step {step}");
            last = var;
        }
    }

    #[test]
    fn posterior_covariance_never_exceeds_prior_scale() {
        let mut stream = RngSeed(8).stream();
        let tau2 = 1.7;
        let prior = PriorSpec::new(0.6, tau2).unwrap();
        let contexts: Vec<FeatureVector> = (0..30)
            .map(|_| fv(&[standard_normal(&mut stream), standard_normal(&mut stream)]))
            .collect();
        let rewards: Vec<f64> = (0..30).map(|_| standard_normal(&mut stream)).collect();
        let post = posterior_update(&prior, &contexts, &rewards).unwrap();
        let eigen = SymmetricEigen::new(post.covariance.clone());
        for i in 0..eigen.eigenvalues.len() {
            assert!(eigen.eigenvalues[i] <= tau2 + 1e-9);
        }
    }

    #[test]
    fn infinite_noise_limit_recovers_the_prior() {
        let prior = PriorSpec::new(1e12, 1.0).unwrap();
        let contexts = vec![fv(&[1.0, 0.0]), fv(&[0.0, 1.0]), fv(&[1.0, 1.0])];
        let rewards = vec![5.0, -3.0, 2.0];
        let post = posterior_update(&prior, &contexts, &rewards).unwrap();
        for i in 0..2 {
            assert!(post.mean[i].abs() < 1e-6);
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((post.covariance[(i, j)] - expected).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn zero_feature_vector_has_degenerate_marginal() {
        let prior = PriorSpec::new(1.0, 1.0).unwrap();
        let post = posterior_with_dim(&prior, 2, &[], &[]).unwrap();
        let marginal = arm_marginal(&post, &fv(&[0.0, 0.0])).unwrap();
        assert_eq!(marginal, ArmMarginal { nu_hat: 0.0, var_hat: 0.0 });

        let unit = arm_marginal(&post, &fv(&[1.0, 0.0])).unwrap();
        assert_eq!(unit, ArmMarginal { nu_hat: 0.0, var_hat: 1.0 });
    }

    #[test]
    fn gauss_bounds_arithmetic() {
        let m = ArmMarginal {
            nu_hat: 1.0,
            var_hat: 4.0,
        };
        assert_eq!(gauss_bounds(&m, 0.0), (1.0, 1.0));
        assert_eq!(gauss_bounds(&m, 1.0), (-1.0, 3.0));
        let (lo, hi) = gauss_bounds(&m, 2.5);
        assert!((hi - lo - 2.0 * 2.5 * 2.0).abs() < 1e-12);
    }
}
