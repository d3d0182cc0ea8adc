//! Latency estimation for FPGA-based CNN accelerators.
//!
//! The toolkit combines two estimators and the harness to compare them:
//!
//! * a closed-form analytic model of per-layer 2D-convolution latency,
//!   splitting each layer into weight/input loading, compute and output
//!   storing paths ([`analytic`]);
//! * exact Gaussian-process regression whose prior mean *is* that analytic
//!   model, so the GP only learns the residual misestimation observed in
//!   profiling data ([`gp`]). With no data the posterior falls back to the
//!   analytic estimate; with data it corrects the analytic optimism.
//!
//! Around those sit the kernel menu ([`kernels`]), a linear-regression
//! baseline ([`linreg`]), dataset handling with a deterministic synthetic
//! generator ([`dataset`]), a leave-one-out cross-validation harness with
//! grid search ([`eval`]) and versioned model persistence ([`persist`]).
//!
//! # Example
//!
//! ```
//! use latgp::analytic::HardwareConfig;
//! use latgp::dataset::{self, DistortionSpec};
//! use latgp::gp::{self, MeanFn};
//! use latgp::kernels::KernelSpec;
//!
//! // deterministic stand-in for a profiling run
//! let hw = HardwareConfig::reference();
//! let samples = dataset::generate_synthetic(42, 30, &hw, &DistortionSpec::default());
//!
//! // GP with the analytic model as its mean function
//! let x = dataset::feature_matrix_with_position(&samples);
//! let y = dataset::targets(&samples);
//! let model = gp::fit(
//!     &x,
//!     &y,
//!     KernelSpec::matern32(1.0, 1.0),
//!     MeanFn::analytic_with_position_column(),
//!     1e-3,
//! )
//! .unwrap();
//!
//! let predictions = model.predict(&x).unwrap();
//! assert_eq!(predictions.len(), 30);
//! ```
//!
//! The `latgp` binary exposes the same pipeline as batch subcommands
//! (`estimate`, `synth`, `fit`, `predict`, `loocv`, `compare`); see
//! [`cli`]. Runnable walkthroughs live in the crate's `examples/`
//! directory.

pub mod analytic;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod gp;
pub mod kernels;
pub mod linreg;
pub mod persist;

pub use analytic::{
    compute_counts, generic_layer_latency, layer_breakdown, network_latency, ConvCounts,
    HardwareConfig, LatencyBreakdown, LayerConfig, LayerPosition, NetworkLatency,
};
pub use dataset::{DistortionSpec, FeatureStats, Sample, FEATURE_DIM};
pub use error::{LatGpError, Result};
pub use eval::{
    compare_methods, loocv_mae, select_hyperparameters, EvalReport, GpHypers, HyperGrid,
    MethodId, MethodReport, SelectionCriterion,
};
pub use gp::{GpModel, MeanFn, PositionPolicy, Prediction};
pub use kernels::{kernel_matrix, kernel_matrix_sym, KernelKind, KernelSpec};
pub use linreg::{fit_linear, predict_linear, LinearModel};
