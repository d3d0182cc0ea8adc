//! Deterministic hyperparameter selection: grid search under the LOOCV
//! MAE, or under the log marginal likelihood.
//!
//! ```bash
//! cargo run --example grid_search
//! ```

use latgp::analytic::HardwareConfig;
use latgp::dataset::{generate_synthetic, DistortionSpec};
use latgp::eval::{select_hyperparameters, HyperGrid, SelectionCriterion};
use latgp::gp::MeanFn;

fn main() {
    let hw = HardwareConfig::reference();
    let samples = generate_synthetic(42, 48, &hw, &DistortionSpec::default());
    let grid = HyperGrid::default();
    let mean = MeanFn::analytic_with_position_column();

    println!(
        "grid: {} lengthscales x {} signal factors x {} noise factors x {} kernels",
        grid.lengthscales.len(),
        grid.signal_variance_factors.len(),
        grid.noise_factors.len(),
        grid.kernels.len()
    );

    for (name, criterion) in [
        ("LOOCV MAE", SelectionCriterion::LoocvMae),
        ("log marginal likelihood", SelectionCriterion::LogMarginalLikelihood),
    ] {
        let start = std::time::Instant::now();
        let chosen = select_hyperparameters(&samples, &grid, mean, criterion).unwrap();
        println!(
            "\nselected by {name} in {:.2?}:\n  kernel {} | lengthscale {} | signal variance {:.4e} | noise variance {:.4e}",
            start.elapsed(),
            chosen.kernel.kind.as_str(),
            chosen.kernel.lengthscale,
            chosen.kernel.signal_variance,
            chosen.noise_variance
        );
    }
}
