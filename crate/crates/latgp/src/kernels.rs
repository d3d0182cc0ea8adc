//! Covariance functions for the latency GP.
//!
//! Three kernels are provided: linear, RBF (squared exponential) and
//! Matérn 3/2. The stationary kernels share one isotropic lengthscale,
//! applied after feature standardization.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LatGpError, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
    Matern32,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Rbf => "rbf",
            KernelKind::Matern32 => "matern32",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(KernelKind::Linear),
            "rbf" => Ok(KernelKind::Rbf),
            "matern32" => Ok(KernelKind::Matern32),
            other => Err(LatGpError::Validation(format!(
                "unknown kernel {other:?}; expected linear, rbf or matern32"
            ))),
        }
    }

    /// Whether the kernel depends only on the distance between inputs.
    pub fn is_stationary(self) -> bool {
        !matches!(self, KernelKind::Linear)
    }
}

/// A kernel with its hyperparameters.
///
/// `signal_variance` scales the whole kernel (output units squared).
/// `lengthscale` is in standardized-feature units and is ignored by the
/// linear kernel; `bias_variance` is used only by the linear kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub signal_variance: f64,
    pub lengthscale: f64,
    #[serde(default)]
    pub bias_variance: f64,
}

impl KernelSpec {
    pub fn matern32(signal_variance: f64, lengthscale: f64) -> Self {
        KernelSpec { kind: KernelKind::Matern32, signal_variance, lengthscale, bias_variance: 0.0 }
    }

    pub fn rbf(signal_variance: f64, lengthscale: f64) -> Self {
        KernelSpec { kind: KernelKind::Rbf, signal_variance, lengthscale, bias_variance: 0.0 }
    }

    pub fn linear(signal_variance: f64, bias_variance: f64) -> Self {
        KernelSpec { kind: KernelKind::Linear, signal_variance, lengthscale: 1.0, bias_variance }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_variance > 0.0 && self.signal_variance.is_finite()) {
            return Err(LatGpError::Validation(format!(
                "signal_variance must be positive, got {}",
                self.signal_variance
            )));
        }
        if self.kind.is_stationary() && !(self.lengthscale > 0.0 && self.lengthscale.is_finite()) {
            return Err(LatGpError::Validation(format!(
                "lengthscale must be positive, got {}",
                self.lengthscale
            )));
        }
        if !(self.bias_variance >= 0.0 && self.bias_variance.is_finite()) {
            return Err(LatGpError::Validation(format!(
                "bias_variance must be nonnegative, got {}",
                self.bias_variance
            )));
        }
        Ok(())
    }

    /// Covariance between two feature vectors of the same dimension.
    pub fn eval(&self, x: &[f64], x2: &[f64]) -> Result<f64> {
        if x.len() != x2.len() {
            return Err(LatGpError::DimensionMismatch { expected: x.len(), got: x2.len() });
        }
        Ok(self.eval_slices(x, x2))
    }

    /// Covariance between equal-length slices; callers guarantee the
    /// dimensions. This is the hot path of every Gram-matrix build.
    #[inline]
    pub(crate) fn eval_slices(&self, x: &[f64], x2: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Linear => {
                let dot: f64 = x.iter().zip(x2).map(|(a, b)| a * b).sum();
                self.signal_variance * dot + self.bias_variance
            }
            KernelKind::Rbf => {
                let r2: f64 = x.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
                self.signal_variance * (-r2 / (2.0 * self.lengthscale * self.lengthscale)).exp()
            }
            KernelKind::Matern32 => {
                let r2: f64 = x.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
                let z = SQRT_3 * r2.sqrt() / self.lengthscale;
                self.signal_variance * (1.0 + z) * (-z).exp()
            }
        }
    }
}

/// Sample vectors stored contiguously row by row, so kernel evaluation
/// runs on plain slices instead of strided matrix rows.
#[derive(Debug, Clone)]
pub(crate) struct RowBlock {
    dim: usize,
    data: Vec<f64>,
}

impl RowBlock {
    pub fn from_matrix(m: &DMatrix<f64>) -> RowBlock {
        let (nrows, dim) = (m.nrows(), m.ncols());
        let mut data = Vec::with_capacity(nrows * dim);
        for i in 0..nrows {
            for j in 0..dim {
                data.push(m[(i, j)]);
            }
        }
        RowBlock { dim, data }
    }

    pub fn nrows(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

pub(crate) fn gram_sym(spec: &KernelSpec, rows: &RowBlock) -> DMatrix<f64> {
    let n = rows.nrows();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = spec.eval_slices(rows.row(i), rows.row(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Cross-covariance matrix between the rows of `a` (P×M) and `b` (Q×M).
pub fn kernel_matrix(spec: &KernelSpec, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.ncols() != b.ncols() {
        return Err(LatGpError::DimensionMismatch { expected: a.ncols(), got: b.ncols() });
    }
    let a_rows = RowBlock::from_matrix(a);
    let b_rows = RowBlock::from_matrix(b);
    Ok(DMatrix::from_fn(a.nrows(), b.nrows(), |i, j| {
        spec.eval_slices(a_rows.row(i), b_rows.row(j))
    }))
}

/// Self-covariance matrix of the rows of `a`. Each unordered pair is
/// evaluated once and mirrored, so the result is exactly symmetric.
pub fn kernel_matrix_sym(spec: &KernelSpec, a: &DMatrix<f64>) -> DMatrix<f64> {
    gram_sym(spec, &RowBlock::from_matrix(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matern_at_zero_distance_is_signal_variance() {
        let spec = KernelSpec::matern32(1.0, 1.0);
        let x = [0.3, -0.7, 2.0];
        assert_eq!(spec.eval(&x, &x).unwrap(), 1.0);
        let scaled = KernelSpec::matern32(2.5, 1.0);
        assert_eq!(scaled.eval(&x, &x).unwrap(), 2.5);
    }

    #[test]
    fn matern_at_unit_distance() {
        let spec = KernelSpec::matern32(1.0, 1.0);
        let v = spec.eval(&[0.0], &[1.0]).unwrap();
        let expected = (1.0 + SQRT_3) * (-SQRT_3).exp();
        assert_relative_eq!(v, expected, max_relative = 1e-12);
        assert_relative_eq!(v, 0.483_357_7, max_relative = 1e-6);
    }

    #[test]
    fn rbf_at_unit_distance() {
        let spec = KernelSpec::rbf(1.0, 1.0);
        let v = spec.eval(&[0.0], &[1.0]).unwrap();
        assert_relative_eq!(v, (-0.5f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(v, 0.606_531, max_relative = 1e-6);
    }

    #[test]
    fn linear_is_dot_product_plus_bias() {
        let spec = KernelSpec::linear(2.0, 0.5);
        let v = spec.eval(&[1.0, 2.0], &[3.0, -1.0]).unwrap();
        assert_eq!(v, 2.0 * (3.0 - 2.0) + 0.5);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let spec = KernelSpec::matern32(1.0, 1.0);
        assert!(spec.eval(&[1.0, 2.0], &[1.0]).is_err());
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let b = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
        assert!(kernel_matrix(&spec, &a, &b).is_err());
    }

    #[test]
    fn single_row_matrix_equals_eval() {
        let spec = KernelSpec::rbf(1.3, 0.8);
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
        let b = DMatrix::from_row_slice(1, 3, &[0.0, 2.0, 4.0]);
        let k = kernel_matrix(&spec, &a, &b).unwrap();
        assert_eq!(k.nrows(), 1);
        assert_eq!(k.ncols(), 1);
        assert_eq!(k[(0, 0)], spec.eval(&[1.0, 2.0, 3.0], &[0.0, 2.0, 4.0]).unwrap());
    }

    fn random_points(n: usize, m: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, m, |_, _| {
            // Box-Muller from two uniforms
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
    }

    #[test]
    fn gram_matrices_factorize_with_jitter() {
        let pts = random_points(50, 5, 7);
        for spec in [
            KernelSpec::matern32(1.0, 1.0),
            KernelSpec::rbf(1.0, 1.0),
            KernelSpec::linear(1.0, 0.1),
        ] {
            let mut k = kernel_matrix_sym(&spec, &pts);
            let max_diag = (0..k.nrows()).map(|i| k[(i, i)]).fold(f64::MIN, f64::max);
            for i in 0..k.nrows() {
                k[(i, i)] += 1e-8 * max_diag;
            }
            assert!(
                nalgebra::Cholesky::new(k).is_some(),
                "{:?} gram matrix failed to factorize",
                spec.kind
            );
        }
    }

    #[test]
    fn diagonal_is_signal_variance_for_stationary_kernels() {
        let pts = random_points(10, 4, 3);
        for spec in [KernelSpec::matern32(1.7, 0.5), KernelSpec::rbf(1.7, 0.5)] {
            let k = kernel_matrix_sym(&spec, &pts);
            for i in 0..10 {
                assert_eq!(k[(i, i)], 1.7);
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_spec() -> impl Strategy<Value = KernelSpec> {
            (
                prop::sample::select(vec![KernelKind::Linear, KernelKind::Rbf, KernelKind::Matern32]),
                0.01f64..100.0,
                0.05f64..20.0,
                0.0f64..5.0,
            )
                .prop_map(|(kind, sv, l, bias)| KernelSpec {
                    kind,
                    signal_variance: sv,
                    lengthscale: l,
                    bias_variance: bias,
                })
        }

        fn arb_vec() -> impl Strategy<Value = Vec<f64>> {
            prop::collection::vec(-50.0f64..50.0, 4)
        }

        proptest! {
            #[test]
            fn symmetry_is_exact(spec in arb_spec(), x in arb_vec(), y in arb_vec()) {
                prop_assert_eq!(spec.eval(&x, &y).unwrap(), spec.eval(&y, &x).unwrap());
            }

            #[test]
            fn stationary_kernels_are_translation_invariant(
                spec in arb_spec(),
                x in arb_vec(),
                y in arb_vec(),
                shift in arb_vec(),
            ) {
                prop_assume!(spec.kind.is_stationary());
                let xs: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + s).collect();
                let ys: Vec<f64> = y.iter().zip(&shift).map(|(a, s)| a + s).collect();
                let before = spec.eval(&x, &y).unwrap();
                let after = spec.eval(&xs, &ys).unwrap();
                prop_assert!((before - after).abs() <= 1e-12 * before.abs().max(1.0));
            }

            #[test]
            fn power_of_two_signal_scaling_is_exact(
                spec in arb_spec(),
                x in prop::collection::vec(-3.0f64..3.0, 4),
                y in prop::collection::vec(-3.0f64..3.0, 4),
                exp in 1u32..4,
            ) {
                // scale by powers of two so the product is exact in f64;
                // the linear kernel's bias term is excluded from scaling,
                // and inputs are kept close so kernel values stay out of
                // the subnormal range where scaling loses bits
                prop_assume!(spec.kind.is_stationary() || spec.bias_variance == 0.0);
                let mut spec = spec;
                spec.lengthscale = spec.lengthscale.max(1.0);
                let factor = f64::from(2u32.pow(exp));
                let mut scaled = spec;
                scaled.signal_variance *= factor;
                prop_assert_eq!(
                    scaled.eval(&x, &y).unwrap(),
                    factor * spec.eval(&x, &y).unwrap()
                );
            }

            #[test]
            fn gram_psd_with_relative_jitter(seed in 0u64..1000, n in 2usize..40) {
                let pts = super::random_points(n, 3, seed);
                let spec = KernelSpec::matern32(1.0, 1.0);
                let mut k = kernel_matrix_sym(&spec, &pts);
                let max_diag = (0..n).map(|i| k[(i, i)]).fold(f64::MIN, f64::max);
                for i in 0..n {
                    k[(i, i)] += 1e-8 * max_diag;
                }
                prop_assert!(nalgebra::Cholesky::new(k).is_some());
            }
        }

        #[test]
        fn bias_breaks_pure_scaling_for_linear() {
            // documents why the scaling law above excludes a linear bias
            let spec = KernelSpec::linear(1.0, 1.0);
            let mut scaled = spec;
            scaled.signal_variance = 2.0;
            let x = [1.0, 0.0];
            let v = spec.eval(&x, &x).unwrap();
            let sv = scaled.eval(&x, &x).unwrap();
            assert_ne!(sv, 2.0 * v);
        }
    }
}
