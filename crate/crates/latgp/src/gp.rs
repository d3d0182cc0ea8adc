//! Exact Gaussian-process regression with a pluggable mean function.
//!
//! The mean function can be zero (the usual agnostic choice) or the
//! closed-form layer latency model, in which case the GP only has to learn
//! the residual between measurements and the analytic estimate. With no
//! training data at all the posterior collapses to the mean function, so
//! the model degrades gracefully to the plain analytic method.
//!
//! For training features `X`, targets `y`, kernel `k` and noise variance
//! `s2`, predictions at `x` are
//!
//! ```text
//! mean(x) = m(x) + k(x, X) (k(X, X) + s2 I)^-1 (y - m(X))
//! var(x)  = k(x, x) - k(x, X) (k(X, X) + s2 I)^-1 k(X, x)
//! ```
//!
//! computed through a Cholesky factorization of `k(X, X) + s2 I`. The
//! kernel sees standardized features; the analytic mean sees the raw ones,
//! because the latency formulas are dimensional.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::analytic::{layer_breakdown, LayerPosition};
use crate::dataset::{self, FeatureStats, FEATURE_DIM};
use crate::error::{LatGpError, Result};
use crate::kernels::{gram_sym, KernelSpec, RowBlock};

/// How the analytic mean function learns each row's network position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionPolicy {
    /// Every row is evaluated at this position; feature matrices carry the
    /// plain 14 columns.
    Fixed(LayerPosition),
    /// Feature matrices carry one extra trailing column holding the
    /// position code (0 first, 1 middle, 2 last). The kernel ignores it.
    Column,
}

/// The GP prior mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeanFn {
    Zero,
    /// Closed-form layer latency evaluated from each row's raw features;
    /// the layer shape comes from columns 0..7 and the hardware constants
    /// from columns 7..14.
    Analytic { position: PositionPolicy },
}

impl MeanFn {
    pub fn analytic_with_position_column() -> Self {
        MeanFn::Analytic { position: PositionPolicy::Column }
    }

    pub fn analytic_at(position: LayerPosition) -> Self {
        MeanFn::Analytic { position: PositionPolicy::Fixed(position) }
    }

    /// Number of leading columns the kernel consumes, after checking that
    /// the matrix width matches what this mean function needs.
    pub fn kernel_cols(&self, width: usize) -> Result<usize> {
        match self {
            MeanFn::Zero => {
                if width == 0 {
                    Err(LatGpError::Validation("feature matrices need at least one column".into()))
                } else {
                    Ok(width)
                }
            }
            MeanFn::Analytic { position: PositionPolicy::Fixed(_) } => {
                if width != FEATURE_DIM {
                    Err(LatGpError::DimensionMismatch { expected: FEATURE_DIM, got: width })
                } else {
                    Ok(FEATURE_DIM)
                }
            }
            MeanFn::Analytic { position: PositionPolicy::Column } => {
                if width != FEATURE_DIM + 1 {
                    Err(LatGpError::DimensionMismatch { expected: FEATURE_DIM + 1, got: width })
                } else {
                    Ok(FEATURE_DIM)
                }
            }
        }
    }

    /// Mean value for one raw feature row.
    pub fn eval_row(&self, row: &[f64]) -> Result<f64> {
        match self {
            MeanFn::Zero => Ok(0.0),
            MeanFn::Analytic { position } => {
                let layer = dataset::layer_from_features(row)?;
                let hw = dataset::hardware_from_features(row)?;
                let pos = match position {
                    PositionPolicy::Fixed(p) => *p,
                    PositionPolicy::Column => {
                        let code = row.get(FEATURE_DIM).ok_or(LatGpError::DimensionMismatch {
                            expected: FEATURE_DIM + 1,
                            got: row.len(),
                        })?;
                        LayerPosition::from_code(*code)?
                    }
                };
                Ok(layer_breakdown(&layer, &hw, pos).t_layer)
            }
        }
    }

    fn eval_matrix(&self, x: &DMatrix<f64>) -> Result<DVector<f64>> {
        let mut out = DVector::zeros(x.nrows());
        if matches!(self, MeanFn::Zero) {
            return Ok(out);
        }
        let mut row = vec![0.0; x.ncols()];
        for i in 0..x.nrows() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = x[(i, j)];
            }
            out[i] = self.eval_row(&row)?;
        }
        Ok(out)
    }
}

/// Mean and variance of one prediction, in ms and ms².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

/// Predictions plus diagnostics.
#[derive(Debug, Clone)]
pub struct PredictOutput {
    pub predictions: Vec<Prediction>,
    /// How many variances came out slightly negative from floating-point
    /// cancellation and were clamped to zero.
    pub variance_clamp_count: usize,
}

/// A fitted GP posterior. Immutable; safe to share across threads for
/// concurrent prediction.
#[derive(Debug, Clone)]
pub struct GpModel {
    kernel: KernelSpec,
    mean: MeanFn,
    noise_variance: f64,
    stats: FeatureStats,
    train_raw: DMatrix<f64>,
    train_std: RowBlock,
    targets: DVector<f64>,
    residuals: DVector<f64>,
    chol_l: DMatrix<f64>,
    alpha: DVector<f64>,
    jitter: f64,
}

fn check_finite_matrix(x: &DMatrix<f64>) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LatGpError::Validation("feature matrix contains non-finite values".into()));
    }
    Ok(())
}

/// Cholesky with escalating diagonal jitter: starting at 1e-10 of the max
/// diagonal and doubling up to 1e-4 of it, after which the failure is a
/// hard error rather than silent regularization.
fn cholesky_with_jitter(k: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    if let Some(chol) = nalgebra::Cholesky::new(k.clone()) {
        return Ok((chol.unpack(), 0.0));
    }
    let max_diag = k.diagonal().iter().fold(0.0f64, |a, b| a.max(*b));
    let mut jitter = 1e-10 * max_diag;
    let limit = 1e-4 * max_diag;
    while jitter <= limit && jitter > 0.0 {
        let mut kj = k.clone();
        for i in 0..kj.nrows() {
            kj[(i, i)] += jitter;
        }
        if let Some(chol) = nalgebra::Cholesky::new(kj) {
            return Ok((chol.unpack(), jitter));
        }
        jitter *= 2.0;
    }
    Err(LatGpError::NotPositiveDefinite)
}

/// Fits an exact GP. `x_raw` is P×M raw features (M = 14, or 15 when the
/// mean function takes a position column); an empty training set is legal
/// and yields a prior-only model.
pub fn fit(
    x_raw: &DMatrix<f64>,
    y: &DVector<f64>,
    kernel: KernelSpec,
    mean: MeanFn,
    noise_variance: f64,
) -> Result<GpModel> {
    let kernel_cols = mean.kernel_cols(x_raw.ncols())?;
    let stats = FeatureStats::fit(x_raw, kernel_cols);
    fit_with_stats(x_raw, y, kernel, mean, noise_variance, stats)
}

/// Fit with externally supplied standardization statistics. Kept internal:
/// the public contract always derives the stats from the training rows.
fn fit_with_stats(
    x_raw: &DMatrix<f64>,
    y: &DVector<f64>,
    kernel: KernelSpec,
    mean: MeanFn,
    noise_variance: f64,
    stats: FeatureStats,
) -> Result<GpModel> {
    kernel.validate()?;
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(LatGpError::Validation(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    if y.len() != x_raw.nrows() {
        return Err(LatGpError::DimensionMismatch { expected: x_raw.nrows(), got: y.len() });
    }
    check_finite_matrix(x_raw)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(LatGpError::Validation("targets contain non-finite values".into()));
    }

    mean.kernel_cols(x_raw.ncols())?;
    let train_std = RowBlock::from_matrix(&stats.apply(x_raw));
    let mean_values = mean.eval_matrix(x_raw)?;
    let residuals = y - &mean_values;

    let mut k = gram_sym(&kernel, &train_std);
    for i in 0..k.nrows() {
        k[(i, i)] += noise_variance;
    }
    let (chol_l, jitter) = cholesky_with_jitter(&k)?;

    let alpha = if x_raw.nrows() == 0 {
        DVector::zeros(0)
    } else {
        let tmp = chol_l
            .solve_lower_triangular(&residuals)
            .ok_or(LatGpError::NotPositiveDefinite)?;
        chol_l
            .tr_solve_lower_triangular(&tmp)
            .ok_or(LatGpError::NotPositiveDefinite)?
    };

    Ok(GpModel {
        kernel,
        mean,
        noise_variance,
        stats,
        train_raw: x_raw.clone(),
        train_std,
        targets: y.clone(),
        residuals,
        chol_l,
        alpha,
        jitter,
    })
}

impl GpModel {
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn mean(&self) -> &MeanFn {
        &self.mean
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn stats(&self) -> &FeatureStats {
        &self.stats
    }

    pub fn train_raw(&self) -> &DMatrix<f64> {
        &self.train_raw
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }

    pub fn residuals(&self) -> &DVector<f64> {
        &self.residuals
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn cholesky_factor(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    /// Diagonal jitter that was needed to factorize, 0 when none.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.len() == 0
    }

    /// Posterior mean and variance per row of `x_raw`, plus diagnostics.
    pub fn predict_full(&self, x_raw: &DMatrix<f64>) -> Result<PredictOutput> {
        if x_raw.ncols() != self.train_raw.ncols() {
            return Err(LatGpError::DimensionMismatch {
                expected: self.train_raw.ncols(),
                got: x_raw.ncols(),
            });
        }
        check_finite_matrix(x_raw)?;
        let test_std = RowBlock::from_matrix(&self.stats.apply(x_raw));
        let p = self.len();
        let mut predictions = Vec::with_capacity(x_raw.nrows());
        let mut clamps = 0usize;
        let mut raw_row = vec![0.0; x_raw.ncols()];

        for q in 0..x_raw.nrows() {
            for (j, slot) in raw_row.iter_mut().enumerate() {
                *slot = x_raw[(q, j)];
            }
            let prior_mean = self.mean.eval_row(&raw_row)?;
            let k_star = DVector::from_fn(p, |i, _| {
                self.kernel.eval_slices(self.train_std.row(i), test_std.row(q))
            });
            let mean = prior_mean + k_star.dot(&self.alpha);

            let k_self = self.kernel.eval_slices(test_std.row(q), test_std.row(q));
            let variance = if p == 0 {
                k_self
            } else {
                let v = self
                    .chol_l
                    .solve_lower_triangular(&k_star)
                    .ok_or(LatGpError::NotPositiveDefinite)?;
                k_self - v.norm_squared()
            };
            let variance = if variance < 0.0 {
                clamps += 1;
                0.0
            } else {
                variance
            };
            predictions.push(Prediction { mean, variance });
        }
        Ok(PredictOutput { predictions, variance_clamp_count: clamps })
    }

    pub fn predict(&self, x_raw: &DMatrix<f64>) -> Result<Vec<Prediction>> {
        Ok(self.predict_full(x_raw)?.predictions)
    }

    /// Log evidence of the training targets under the prior:
    /// `-r' a / 2 - sum(log L_ii) - P log(2 pi) / 2` with `r` the residuals
    /// and `a` the precomputed `(K + s2 I)^-1 r`.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let p = self.len() as f64;
        let data_fit = -0.5 * self.residuals.dot(&self.alpha);
        let log_det: f64 = (0..self.len()).map(|i| self.chol_l[(i, i)].ln()).sum();
        data_fit - log_det - 0.5 * p * (2.0 * std::f64::consts::PI).ln()
    }
}
