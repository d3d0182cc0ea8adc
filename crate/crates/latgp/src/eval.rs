//! Leave-one-out cross-validation, hyperparameter grid search and the
//! method comparison report.
//!
//! Every estimator is scored the same way: for each sample, train on the
//! remaining P−1 samples, predict the held-out one and record the absolute
//! error; the mean of those errors is the method's LOOCV MAE in ms.
//! Hyperparameters for the GP methods come from a deterministic grid
//! search over the same criterion (or, optionally, the log marginal
//! likelihood). Folds may run in parallel; per-sample errors are stored in
//! dataset order and reduced in fixed order, so reports are reproducible
//! regardless of thread scheduling.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::layer_breakdown;
use crate::dataset::{feature_matrix, feature_matrix_with_position, targets, Sample};
use crate::error::{LatGpError, Result};
use crate::gp::{self, MeanFn};
use crate::kernels::{KernelKind, KernelSpec};
use crate::linreg;

/// Floor for the residual-variance scale so grid signal/noise variances
/// stay positive even when the analytic mean fits the data exactly.
const VARIANCE_SCALE_FLOOR: f64 = 1e-12;

/// The estimators under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodId {
    #[serde(rename = "analytic")]
    AnalyticOnly,
    #[serde(rename = "gp-zero")]
    GpZeroMean,
    #[serde(rename = "gp-analytic")]
    GpAnalyticMean,
    #[serde(rename = "linreg")]
    LinearRegression,
}

impl MethodId {
    pub const ALL: [MethodId; 4] = [
        MethodId::AnalyticOnly,
        MethodId::GpZeroMean,
        MethodId::GpAnalyticMean,
        MethodId::LinearRegression,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::AnalyticOnly => "analytic",
            MethodId::GpZeroMean => "gp-zero",
            MethodId::GpAnalyticMean => "gp-analytic",
            MethodId::LinearRegression => "linreg",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(MethodId::AnalyticOnly),
            "gp-zero" => Ok(MethodId::GpZeroMean),
            "gp-analytic" => Ok(MethodId::GpAnalyticMean),
            "linreg" => Ok(MethodId::LinearRegression),
            other => Err(LatGpError::Validation(format!(
                "unknown method {other:?}; expected analytic, gp-zero, gp-analytic or linreg"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MethodId::AnalyticOnly => "analytic model",
            MethodId::GpZeroMean => "GP (zero mean)",
            MethodId::GpAnalyticMean => "GP (analytic mean)",
            MethodId::LinearRegression => "linear regression",
        }
    }

    fn gp_mean(self) -> Option<MeanFn> {
        match self {
            MethodId::GpZeroMean => Some(MeanFn::Zero),
            MethodId::GpAnalyticMean => Some(MeanFn::analytic_with_position_column()),
            _ => None,
        }
    }
}

/// Concrete GP hyperparameters: a kernel plus the observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpHypers {
    pub kernel: KernelSpec,
    pub noise_variance: f64,
}

/// Grid of candidate hyperparameters. Signal-variance and noise factors
/// are multiples of the residual variance of the dataset under the mean
/// function, which keeps the grid scale-free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub lengthscales: Vec<f64>,
    pub signal_variance_factors: Vec<f64>,
    pub noise_factors: Vec<f64>,
    pub kernels: Vec<KernelKind>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            lengthscales: vec![0.1, 0.3, 1.0, 3.0, 10.0],
            signal_variance_factors: vec![0.1, 1.0, 10.0],
            noise_factors: vec![1e-4, 1e-3, 1e-2, 1e-1],
            kernels: vec![KernelKind::Linear, KernelKind::Rbf, KernelKind::Matern32],
        }
    }
}

impl HyperGrid {
    pub fn validate(&self) -> Result<()> {
        if self.lengthscales.is_empty()
            || self.signal_variance_factors.is_empty()
            || self.noise_factors.is_empty()
            || self.kernels.is_empty()
        {
            return Err(LatGpError::Validation("hyperparameter grid has an empty axis".into()));
        }
        let positive = |vs: &[f64]| vs.iter().all(|v| *v > 0.0 && v.is_finite());
        if !positive(&self.lengthscales)
            || !positive(&self.signal_variance_factors)
            || !positive(&self.noise_factors)
        {
            return Err(LatGpError::Validation(
                "hyperparameter grid values must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Restricts the kernel menu to one kind.
    pub fn with_kernel(mut self, kind: KernelKind) -> Self {
        self.kernels = vec![kind];
        self
    }

    /// Candidate (kernel, noise) pairs in fixed enumeration order. The
    /// linear kernel ignores the lengthscale, so it is enumerated only at
    /// the smallest one; the tie-break rule would select that anyway.
    fn candidates(&self, variance_scale: f64) -> Vec<GpHypers> {
        let mut smallest = self.lengthscales[0];
        for l in &self.lengthscales {
            smallest = smallest.min(*l);
        }
        let mut out = Vec::new();
        for kind in &self.kernels {
            let lengthscales: &[f64] = if kind.is_stationary() {
                &self.lengthscales
            } else {
                std::slice::from_ref(&smallest)
            };
            for l in lengthscales {
                for svf in &self.signal_variance_factors {
                    for nf in &self.noise_factors {
                        out.push(GpHypers {
                            kernel: KernelSpec {
                                kind: *kind,
                                signal_variance: svf * variance_scale,
                                lengthscale: *l,
                                bias_variance: 0.0,
                            },
                            noise_variance: nf * variance_scale,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Which objective the grid search optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionCriterion {
    /// Minimize the LOOCV mean absolute error.
    LoocvMae,
    /// Maximize the log marginal likelihood of the full dataset.
    LogMarginalLikelihood,
}

impl SelectionCriterion {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "loocv" => Ok(SelectionCriterion::LoocvMae),
            "lml" => Ok(SelectionCriterion::LogMarginalLikelihood),
            other => Err(LatGpError::Validation(format!(
                "unknown selection criterion {other:?}; expected loocv or lml"
            ))),
        }
    }
}

/// One method's LOOCV outcome. `error` is set (and `mae_ms` unset) when the
/// method failed; comparison reports keep going so partial results survive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: MethodId,
    pub mae_ms: Option<f64>,
    pub chosen: Option<GpHypers>,
    pub per_sample_abs_errors: Vec<f64>,
    pub error: Option<String>,
}

impl MethodReport {
    fn from_errors(method: MethodId, errors: Vec<f64>, chosen: Option<GpHypers>) -> MethodReport {
        let mae = errors.iter().sum::<f64>() / errors.len() as f64;
        MethodReport {
            method,
            mae_ms: Some(mae),
            chosen,
            per_sample_abs_errors: errors,
            error: None,
        }
    }

    fn failed(method: MethodId, err: &LatGpError) -> MethodReport {
        MethodReport {
            method,
            mae_ms: None,
            chosen: None,
            per_sample_abs_errors: Vec::new(),
            error: Some(err.to_string()),
        }
    }

    fn configuration(&self) -> String {
        match &self.chosen {
            Some(h) => format!(
                "{}, lengthscale {}, signal variance {:.3e}, noise variance {:.3e}",
                h.kernel.kind.as_str(),
                h.kernel.lengthscale,
                h.kernel.signal_variance,
                h.noise_variance
            ),
            None => "none".to_string(),
        }
    }
}

/// Ranked per-method results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub sample_count: usize,
    /// Sorted by MAE ascending; failed methods last.
    pub methods: Vec<MethodReport>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        // serde_json cannot fail on this plain data type
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Aligned plain-text table with one row per method.
    pub fn text_table(&self) -> String {
        let mut out = format!("LOOCV comparison over {} samples\n", self.sample_count);
        out.push_str(&format!(
            "{:<22} {:>14}   {}\n",
            "method", "LOOCV MAE [ms]", "configuration"
        ));
        for m in &self.methods {
            let mae = match m.mae_ms {
                Some(v) => format!("{v:.6}"),
                None => "failed".to_string(),
            };
            let config = match &m.error {
                Some(e) => format!("error: {e}"),
                None => m.configuration(),
            };
            out.push_str(&format!("{:<22} {:>14}   {}\n", m.method.label(), mae, config));
        }
        out
    }

    /// Long-format CSV of the per-sample absolute errors.
    pub fn per_sample_csv(&self) -> String {
        let mut out = String::from("method,sample_index,abs_error_ms\n");
        for m in &self.methods {
            for (i, e) in m.per_sample_abs_errors.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", m.method.as_str(), i, e));
            }
        }
        out
    }
}

fn analytic_errors(samples: &[Sample]) -> Vec<f64> {
    samples
        .iter()
        .map(|s| (layer_breakdown(&s.layer, &s.hw, s.position).t_layer - s.latency_ms).abs())
        .collect()
}

fn gp_design_matrix(mean: &MeanFn, samples: &[Sample]) -> DMatrix<f64> {
    match mean {
        MeanFn::Zero => feature_matrix(samples),
        MeanFn::Analytic { .. } => feature_matrix_with_position(samples),
    }
}

fn gp_loocv_errors(
    samples: &[Sample],
    mean: MeanFn,
    hypers: &GpHypers,
) -> Result<Vec<f64>> {
    let x = gp_design_matrix(&mean, samples);
    let y = targets(samples);
    let p = samples.len();
    let fold_results: Vec<Result<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let x_train = x.clone().remove_row(i);
            let y_train = y.clone().remove_row(i);
            let model = gp::fit(&x_train, &y_train, hypers.kernel, mean, hypers.noise_variance)
                .map_err(|e| LatGpError::FoldFitFailure { fold: i, source: Box::new(e) })?;
            let x_test = x.rows(i, 1).into_owned();
            let pred = model.predict(&x_test)?;
            Ok((pred[0].mean - y[i]).abs())
        })
        .collect();
    // scan in fold order so any reported failure index is deterministic
    let mut errors = Vec::with_capacity(p);
    for r in fold_results {
        errors.push(r?);
    }
    Ok(errors)
}

fn linreg_loocv_errors(samples: &[Sample]) -> Result<Vec<f64>> {
    let x = feature_matrix(samples);
    let y = targets(samples);
    let p = samples.len();
    let fold_results: Vec<Result<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let x_train = x.clone().remove_row(i);
            let y_train = y.clone().remove_row(i);
            let model = linreg::fit_linear(&x_train, &y_train)
                .map_err(|e| LatGpError::FoldFitFailure { fold: i, source: Box::new(e) })?;
            let pred = linreg::predict_linear(&model, &x.rows(i, 1).into_owned())?;
            Ok((pred[0] - y[i]).abs())
        })
        .collect();
    let mut errors = Vec::with_capacity(p);
    for r in fold_results {
        errors.push(r?);
    }
    Ok(errors)
}

/// LOOCV mean absolute error for one method. GP methods need concrete
/// hyperparameters; pass the result of [`select_hyperparameters`] or use
/// [`compare_methods`], which nests the selection.
pub fn loocv_mae(
    method: MethodId,
    samples: &[Sample],
    hypers: Option<&GpHypers>,
) -> Result<MethodReport> {
    if samples.is_empty() {
        return Err(LatGpError::NoSamples);
    }
    if method != MethodId::AnalyticOnly && samples.len() < 2 {
        return Err(LatGpError::Validation(format!(
            "{} needs at least 2 samples for LOOCV, got {}",
            method.as_str(),
            samples.len()
        )));
    }
    match method {
        MethodId::AnalyticOnly => {
            // no training dependence: each held-out prediction is the
            // closed-form estimate itself
            Ok(MethodReport::from_errors(method, analytic_errors(samples), None))
        }
        MethodId::LinearRegression => {
            Ok(MethodReport::from_errors(method, linreg_loocv_errors(samples)?, None))
        }
        MethodId::GpZeroMean | MethodId::GpAnalyticMean => {
            let hypers = hypers.ok_or_else(|| {
                LatGpError::Validation(format!(
                    "{} needs kernel hyperparameters; run hyperparameter selection first",
                    method.as_str()
                ))
            })?;
            let mean = method.gp_mean().expect("gp method");
            let errors = gp_loocv_errors(samples, mean, hypers)?;
            Ok(MethodReport::from_errors(method, errors, Some(*hypers)))
        }
    }
}

fn population_variance(values: &DVector<f64>) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64
}

/// True when `(score, lengthscale, noise)` beats the incumbent; exact score
/// ties go to the smaller lengthscale, then the smaller noise.
fn better_candidate(
    score: f64,
    candidate: &GpHypers,
    best_score: f64,
    best: &GpHypers,
) -> bool {
    if score != best_score {
        return score < best_score;
    }
    if candidate.kernel.lengthscale != best.kernel.lengthscale {
        return candidate.kernel.lengthscale < best.kernel.lengthscale;
    }
    candidate.noise_variance < best.noise_variance
}

/// Grid search over kernels and hyperparameters for a GP with the given
/// mean function. Returns the candidate minimizing the LOOCV MAE (or
/// maximizing the log marginal likelihood).
pub fn select_hyperparameters(
    samples: &[Sample],
    grid: &HyperGrid,
    mean: MeanFn,
    criterion: SelectionCriterion,
) -> Result<GpHypers> {
    grid.validate()?;
    if samples.len() < 2 {
        return Err(LatGpError::Validation(format!(
            "hyperparameter selection needs at least 2 samples, got {}",
            samples.len()
        )));
    }

    let x = gp_design_matrix(&mean, samples);
    let y = targets(samples);
    let mut residuals = y.clone();
    for i in 0..samples.len() {
        let row: Vec<f64> = (0..x.ncols()).map(|j| x[(i, j)]).collect();
        residuals[i] -= mean.eval_row(&row)?;
    }
    let variance_scale = population_variance(&residuals).max(VARIANCE_SCALE_FLOOR);

    let candidates = grid.candidates(variance_scale);
    let mut best: Option<(f64, GpHypers)> = None;
    let mut failures: Vec<String> = Vec::new();

    for candidate in &candidates {
        let score = match criterion {
            SelectionCriterion::LoocvMae => gp_loocv_errors(samples, mean, candidate)
                .map(|errors| errors.iter().sum::<f64>() / errors.len() as f64),
            SelectionCriterion::LogMarginalLikelihood => {
                gp::fit(&x, &y, candidate.kernel, mean, candidate.noise_variance)
                    .map(|model| -model.log_marginal_likelihood())
            }
        };
        match score {
            Ok(score) if score.is_finite() => match &best {
                Some((best_score, best_hypers))
                    if !better_candidate(score, candidate, *best_score, best_hypers) => {}
                _ => best = Some((score, *candidate)),
            },
            Ok(score) => failures.push(format!("{candidate:?}: non-finite score {score}")),
            Err(e) => failures.push(format!("{candidate:?}: {e}")),
        }
    }

    match best {
        Some((_, hypers)) => Ok(hypers),
        None => Err(LatGpError::GridSearchFailed {
            count: candidates.len(),
            first: failures.first().cloned().unwrap_or_else(|| "empty grid".into()),
        }),
    }
}

/// Runs every method through LOOCV (selecting GP hyperparameters on the
/// full dataset first, as the comparison methodology prescribes) and ranks
/// them by MAE. Method failures become per-method error entries rather
/// than aborting the report.
pub fn compare_methods(samples: &[Sample], grid: &HyperGrid) -> Result<EvalReport> {
    if samples.len() < 2 {
        return Err(LatGpError::Validation(format!(
            "method comparison needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut methods = Vec::with_capacity(MethodId::ALL.len());
    for method in MethodId::ALL {
        let outcome = match method.gp_mean() {
            Some(mean) => select_hyperparameters(samples, grid, mean, SelectionCriterion::LoocvMae)
                .and_then(|hypers| loocv_mae(method, samples, Some(&hypers))),
            None => loocv_mae(method, samples, None),
        };
        methods.push(outcome.unwrap_or_else(|e| MethodReport::failed(method, &e)));
    }
    // rank by MAE ascending, failed methods last; the sort is stable so
    // equal methods keep enumeration order
    methods.sort_by(|a, b| match (a.mae_ms, b.mae_ms) {
        (Some(x), Some(y)) => x.partial_cmp(&y).expect("finite MAE"),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(EvalReport { sample_count: samples.len(), methods })
}
