//! Save a fitted GP model to its versioned JSON envelope and load it back.
//!
//! The file stores only the fitting inputs; the posterior factorization is
//! recomputed on load, so loaded models predict bit-identically.
//!
//! ```bash
//! cargo run --example model_persistence
//! ```

use latgp::analytic::HardwareConfig;
use latgp::dataset::{feature_matrix_with_position, generate_synthetic, targets, DistortionSpec};
use latgp::gp::{self, MeanFn};
use latgp::kernels::KernelSpec;
use latgp::persist::{load_gp_model, save_gp_model, GP_MODEL_VERSION};

fn main() {
    let hw = HardwareConfig::reference();
    let samples = generate_synthetic(3, 30, &hw, &DistortionSpec::default());
    let x = feature_matrix_with_position(&samples);
    let y = targets(&samples);

    let model = gp::fit(
        &x,
        &y,
        KernelSpec::matern32(0.8, 1.5),
        MeanFn::analytic_with_position_column(),
        1e-3,
    )
    .unwrap();

    let path = std::env::temp_dir().join("latgp_model.json");
    save_gp_model(&path, &model).unwrap();
    let size = std::fs::metadata(&path).unwrap().len();
    println!("saved {GP_MODEL_VERSION} model ({size} bytes) to {}", path.display());

    let loaded = load_gp_model(&path).unwrap();
    let a = model.predict(&x).unwrap();
    let b = loaded.predict(&x).unwrap();
    let identical = a
        .iter()
        .zip(&b)
        .all(|(p, q)| p.mean == q.mean && p.variance == q.variance);
    println!(
        "loaded model predictions are {} the originals",
        if identical { "bit-identical to" } else { "DIFFERENT from" }
    );
    assert!(identical);

    println!(
        "first prediction: mean {:.6} ms, variance {:.3e} ms^2",
        b[0].mean, b[0].variance
    );
}
