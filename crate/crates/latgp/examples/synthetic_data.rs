//! Generate a synthetic profiling dataset and inspect its shape and
//! latency statistics.
//!
//! The generator stands in for measurements collected from real hardware:
//! layer shapes cover the documented parameter ranges, and targets deviate
//! from the analytic model through a size-dependent bias, a constant
//! overhead and multiplicative noise.
//!
//! ```bash
//! cargo run --example synthetic_data
//! ```

use latgp::analytic::HardwareConfig;
use latgp::dataset::{generate_synthetic, write_csv, DistortionSpec, Sample};

type Field = fn(&Sample) -> f64;

fn stat(samples: &[Sample], f: Field) -> (f64, f64, f64) {
    let values: Vec<f64> = samples.iter().map(f).collect();
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (min, mean, max)
}

fn main() {
    let hw = HardwareConfig::reference();
    let samples = generate_synthetic(42, 156, &hw, &DistortionSpec::default());

    println!("{:<14} {:>8} {:>8} {:>8}", "parameter", "min", "mean", "max");
    let rows: [(&str, Field); 6] = [
        ("h", |s| s.layer.h as f64),
        ("w", |s| s.layer.w as f64),
        ("k", |s| s.layer.k as f64),
        ("c", |s| s.layer.c as f64),
        ("f", |s| s.layer.f as f64),
        ("latency [ms]", |s| s.latency_ms),
    ];
    for (name, f) in rows {
        let (min, mean, max) = stat(&samples, f);
        println!("{name:<14} {min:>8.3} {mean:>8.3} {max:>8.3}");
    }

    // disabling the distortion makes targets equal the analytic model
    let exact = generate_synthetic(42, 156, &hw, &DistortionSpec::none());
    let worst = exact
        .iter()
        .map(|s| {
            let t =
                latgp::analytic::layer_breakdown(&s.layer, &s.hw, s.position).t_layer;
            (s.latency_ms - t).abs()
        })
        .fold(0.0f64, f64::max);
    println!("\nwith distortion disabled, max |target - analytic| = {worst:.2e} ms");

    let path = std::env::temp_dir().join("latgp_synthetic.csv");
    write_csv(&path, &samples).unwrap();
    println!("wrote {} rows to {}", samples.len(), path.display());
}
