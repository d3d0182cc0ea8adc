//! Ordinary least squares with intercept, the non-GP baseline.
//!
//! The system is solved on standardized features via the normal equations,
//! with a small ridge fallback when the Gram matrix is rank deficient, then
//! folded back into raw-space weights so that predictions are a plain
//! `X w + b`.

use nalgebra::{DMatrix, DVector};

use crate::dataset::FeatureStats;
use crate::error::{LatGpError, Result};

const RIDGE_FALLBACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    /// Raw-space weights, length M.
    pub weights: DVector<f64>,
    /// Raw-space intercept.
    pub intercept: f64,
    /// Standardization statistics of the training features.
    pub stats: FeatureStats,
}

/// Least-squares fit of `y ~ X w + b`.
pub fn fit_linear(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LinearModel> {
    let p = x.nrows();
    let m = x.ncols();
    if p == 0 {
        return Err(LatGpError::NoSamples);
    }
    if y.len() != p {
        return Err(LatGpError::DimensionMismatch { expected: p, got: y.len() });
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(LatGpError::Validation("non-finite values in regression inputs".into()));
    }

    let stats = FeatureStats::fit(x, m);
    let z = stats.apply(x);

    // design matrix [Z 1]
    let mut a = DMatrix::zeros(p, m + 1);
    a.view_mut((0, 0), (p, m)).copy_from(&z);
    a.column_mut(m).fill(1.0);

    let gram = a.transpose() * &a;
    let rhs = a.transpose() * y;
    let solution = match nalgebra::Cholesky::new(gram.clone()) {
        Some(chol) => chol.solve(&rhs),
        None => {
            // rank deficient: ridge fallback on the feature block only,
            // leaving the intercept unpenalized
            let mut ridged = gram;
            for i in 0..m {
                ridged[(i, i)] += RIDGE_FALLBACK;
            }
            nalgebra::Cholesky::new(ridged)
                .ok_or(LatGpError::NotPositiveDefinite)?
                .solve(&rhs)
        }
    };

    // fold the standardization into raw-space coefficients:
    // w_raw = w_std / std, b_raw = b_std - sum(w_std * mean / std)
    let mut weights = DVector::zeros(m);
    let mut intercept = solution[m];
    for d in 0..m {
        weights[d] = solution[d] / stats.std[d];
        intercept -= solution[d] * stats.mean[d] / stats.std[d];
    }

    Ok(LinearModel { weights, intercept, stats })
}

/// Evaluates `X w + b` row-wise.
pub fn predict_linear(model: &LinearModel, x: &DMatrix<f64>) -> Result<DVector<f64>> {
    if x.ncols() != model.weights.len() {
        return Err(LatGpError::DimensionMismatch {
            expected: model.weights.len(),
            got: x.ncols(),
        });
    }
    Ok(x * &model.weights + DVector::from_element(x.nrows(), model.intercept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_exact_line() {
        let x = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0]);
        let model = fit_linear(&x, &y).unwrap();
        assert_relative_eq!(model.weights[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(model.intercept, 1.0, max_relative = 1e-12);

        let at_ten = predict_linear(&model, &DMatrix::from_row_slice(1, 1, &[10.0])).unwrap();
        assert_relative_eq!(at_ten[0], 21.0, max_relative = 1e-9);
    }

    #[test]
    fn constant_targets_give_zero_weights() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let y = DVector::from_element(4, 3.5);
        let model = fit_linear(&x, &y).unwrap();
        for w in model.weights.iter() {
            assert!(w.abs() < 1e-9, "weight {w}");
        }
        assert_relative_eq!(model.intercept, 3.5, max_relative = 1e-12);
    }

    #[test]
    fn zero_weight_model_predicts_intercept() {
        let model = LinearModel {
            weights: DVector::zeros(2),
            intercept: 3.0,
            stats: FeatureStats { mean: vec![0.0; 2], std: vec![1.0; 2] },
        };
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let preds = predict_linear(&model, &x).unwrap();
        assert!(preds.iter().all(|p| *p == 3.0));
    }

    #[test]
    fn identity_feature_passes_through() {
        let model = LinearModel {
            weights: DVector::from_vec(vec![1.0]),
            intercept: 0.0,
            stats: FeatureStats { mean: vec![0.0], std: vec![1.0] },
        };
        let x = DMatrix::from_row_slice(3, 1, &[1.5, -2.0, 7.0]);
        let preds = predict_linear(&model, &x).unwrap();
        assert_eq!(preds.as_slice(), &[1.5, -2.0, 7.0]);
    }

    fn random_system(seed: u64, p: usize, m: usize) -> (DMatrix<f64>, DVector<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(p, m, |_, _| rng.gen_range(-3.0..3.0));
        let y = DVector::from_fn(p, |_, _| rng.gen_range(-5.0..5.0));
        (x, y)
    }

    #[test]
    fn matches_independent_least_squares_solver() {
        for seed in 0..5 {
            let (x, y) = random_system(seed, 20, 5);
            let model = fit_linear(&x, &y).unwrap();

            // independent route: QR-based least squares on the raw design
            let mut a = DMatrix::zeros(20, 6);
            a.view_mut((0, 0), (20, 5)).copy_from(&x);
            a.column_mut(5).fill(1.0);
            let qr = a.qr();
            let mut rhs = qr.q().transpose() * &y;
            let solution = qr
                .r()
                .solve_upper_triangular_mut(&mut rhs)
                .then_some(rhs)
                .expect("full-rank system");

            for d in 0..5 {
                assert_relative_eq!(model.weights[d], solution[d], max_relative = 1e-6);
            }
            assert_relative_eq!(model.intercept, solution[5], max_relative = 1e-6);
        }
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design() {
        let (x, y) = random_system(11, 30, 4);
        let model = fit_linear(&x, &y).unwrap();
        let preds = predict_linear(&model, &x).unwrap();
        let resid = &y - &preds;

        let ones = DVector::from_element(30, 1.0);
        let cos = resid.dot(&ones) / (resid.norm() * ones.norm());
        assert!(cos.abs() < 1e-6, "constant column cosine {cos}");
        for d in 0..4 {
            let col = x.column(d).into_owned();
            let cos = resid.dot(&col) / (resid.norm() * col.norm());
            assert!(cos.abs() < 1e-6, "column {d} cosine {cos}");
        }
    }

    #[test]
    fn collinear_features_fall_back_to_ridge() {
        // second column is an exact copy of the first
        let x = DMatrix::from_fn(10, 2, |i, _| i as f64);
        let y = DVector::from_fn(10, |i, _| 3.0 * i as f64 + 1.0);
        let model = fit_linear(&x, &y).unwrap();
        let preds = predict_linear(&model, &x).unwrap();
        for (p, t) in preds.iter().zip(y.iter()) {
            assert_relative_eq!(p, t, epsilon = 1e-4);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let (x, y) = random_system(1, 10, 3);
        let model = fit_linear(&x, &y).unwrap();
        let narrow = DMatrix::zeros(2, 2);
        assert!(predict_linear(&model, &narrow).is_err());
    }
}
