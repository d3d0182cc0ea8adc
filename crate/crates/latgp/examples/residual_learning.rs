//! The algebra that makes an analytic mean function work: predicting with
//! mean m is exactly m plus a zero-mean GP trained on the residuals
//! y − m(X). This is the core identity behind anchoring the GP to the
//! closed-form latency model.
//!
//! ```bash
//! cargo run --example residual_learning
//! ```

use latgp::analytic::HardwareConfig;
use latgp::dataset::{
    feature_matrix_with_position, generate_synthetic, targets, DistortionSpec, FEATURE_DIM,
};
use latgp::gp::{self, MeanFn};
use latgp::kernels::KernelSpec;

fn main() {
    let hw = HardwareConfig::reference();
    let train = generate_synthetic(21, 40, &hw, &DistortionSpec::default());
    let test = generate_synthetic(22, 10, &hw, &DistortionSpec::default());

    let x = feature_matrix_with_position(&train);
    let y = targets(&train);
    let x_test = feature_matrix_with_position(&test);

    let kernel = KernelSpec::matern32(0.5, 2.0);
    let mean = MeanFn::analytic_with_position_column();

    // route 1: GP with the analytic mean, all in one model
    let direct = gp::fit(&x, &y, kernel, mean, 1e-3).unwrap();

    // route 2: evaluate the analytic model, fit a zero-mean GP on what is
    // left over, and add the two predictions back together
    let x14 = x.columns(0, FEATURE_DIM).into_owned();
    let residual_gp = gp::fit(&x14, direct.residuals(), kernel, MeanFn::Zero, 1e-3).unwrap();

    let direct_preds = direct.predict(&x_test).unwrap();
    let residual_preds = residual_gp
        .predict(&x_test.columns(0, FEATURE_DIM).into_owned())
        .unwrap();

    let mut worst = 0.0f64;
    println!("{:>4} {:>14} {:>14} {:>12}", "row", "direct", "mean+residual", "deviation");
    for (i, (a, b)) in direct_preds.iter().zip(&residual_preds).enumerate() {
        let row: Vec<f64> = (0..x_test.ncols()).map(|j| x_test[(i, j)]).collect();
        let m = mean.eval_row(&row).unwrap();
        let reconstructed = m + b.mean;
        let deviation = (a.mean - reconstructed).abs();
        worst = worst.max(deviation);
        println!("{:>4} {:>14.8} {:>14.8} {:>12.2e}", i, a.mean, reconstructed, deviation);
    }
    println!("\nlargest deviation between the two routes: {worst:.2e} ms");
    assert!(worst < 1e-10);
}
