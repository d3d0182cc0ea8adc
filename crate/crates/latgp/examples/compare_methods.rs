//! Leave-one-out comparison of all four estimators on a synthetic
//! profiling dataset, ranked by mean absolute error.
//!
//! The analytic-mean GP combines the closed-form model with the observed
//! data, so it sits above both the pure analytic estimate and the
//! data-only regressors.
//!
//! ```bash
//! cargo run --example compare_methods
//! ```

use latgp::analytic::HardwareConfig;
use latgp::dataset::{generate_synthetic, DistortionSpec};
use latgp::eval::{compare_methods, HyperGrid};

fn main() {
    let hw = HardwareConfig::reference();
    // 60 samples keep every per-fold refit quick in a demo
    let samples = generate_synthetic(42, 60, &hw, &DistortionSpec::default());

    let start = std::time::Instant::now();
    let report = compare_methods(&samples, &HyperGrid::default()).unwrap();
    println!("{}", report.text_table());
    println!("completed in {:.2?}", start.elapsed());

    let best = &report.methods[0];
    let baseline = report
        .methods
        .iter()
        .find(|m| m.method == latgp::MethodId::AnalyticOnly)
        .unwrap();
    println!(
        "\nbest method improves on the plain analytic model by {:.1}%",
        100.0 * (1.0 - best.mae_ms.unwrap() / baseline.mae_ms.unwrap())
    );
}
