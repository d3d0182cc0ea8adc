//! Fit a GP with the analytic latency model as its mean function and
//! predict held-out layers with uncertainty.
//!
//! ```bash
//! cargo run --example gp_fit_predict
//! ```

use latgp::analytic::HardwareConfig;
use latgp::dataset::{feature_matrix_with_position, generate_synthetic, targets, DistortionSpec};
use latgp::gp::{self, MeanFn};
use latgp::kernels::KernelSpec;

fn main() {
    let hw = HardwareConfig::reference();
    let train = generate_synthetic(5, 60, &hw, &DistortionSpec::default());
    let test = generate_synthetic(6, 8, &hw, &DistortionSpec::default());

    let model = gp::fit(
        &feature_matrix_with_position(&train),
        &targets(&train),
        KernelSpec::matern32(1.0, 1.0),
        MeanFn::analytic_with_position_column(),
        1e-3,
    )
    .unwrap();

    let x_test = feature_matrix_with_position(&test);
    let predictions = model.predict(&x_test).unwrap();

    println!(
        "{:>4} {:>12} {:>12} {:>12} {:>10}",
        "row", "measured", "predicted", "+-2 sigma", "analytic"
    );
    for (i, (pred, sample)) in predictions.iter().zip(&test).enumerate() {
        let analytic =
            latgp::analytic::layer_breakdown(&sample.layer, &sample.hw, sample.position).t_layer;
        println!(
            "{:>4} {:>12.4} {:>12.4} {:>12.4} {:>10.4}",
            i,
            sample.latency_ms,
            pred.mean,
            2.0 * pred.variance.sqrt(),
            analytic
        );
    }
    println!("\nlog marginal likelihood: {:.3}", model.log_marginal_likelihood());

    // with no training data the GP falls back to the analytic estimate
    let empty = gp::fit(
        &nalgebra::DMatrix::zeros(0, latgp::FEATURE_DIM + 1),
        &nalgebra::DVector::zeros(0),
        KernelSpec::matern32(1.0, 1.0),
        MeanFn::analytic_with_position_column(),
        1e-3,
    )
    .unwrap();
    let prior = empty.predict(&x_test).unwrap();
    println!("\nprior-only predictions (no training data) equal the analytic estimate:");
    for (pred, sample) in prior.iter().zip(&test).take(3) {
        let analytic =
            latgp::analytic::layer_breakdown(&sample.layer, &sample.hw, sample.position).t_layer;
        println!("  predicted {:.6} ms vs analytic {:.6} ms", pred.mean, analytic);
    }
}
