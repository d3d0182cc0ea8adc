//! The covariance function menu: linear, RBF and Matérn 3/2.
//!
//! Prints each kernel's profile over distance and verifies that a random
//! Gram matrix factorizes once a tiny diagonal jitter is added.
//!
//! ```bash
//! cargo run --example kernels_tour
//! ```

use latgp::kernels::{kernel_matrix_sym, KernelSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let specs = [
        ("linear", KernelSpec::linear(1.0, 0.0)),
        ("rbf", KernelSpec::rbf(1.0, 1.0)),
        ("matern32", KernelSpec::matern32(1.0, 1.0)),
    ];

    println!("kernel value against distance (unit hyperparameters):");
    print!("{:>10}", "r");
    for (name, _) in &specs {
        print!("{name:>12}");
    }
    println!();
    for r in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        print!("{r:>10.2}");
        for (_, spec) in &specs {
            // place the pair r apart along the first axis
            let v = spec.eval(&[0.0, 0.0], &[r, 0.0]).unwrap();
            print!("{v:>12.6}");
        }
        println!();
    }

    // positive semi-definiteness: Cholesky succeeds with relative jitter
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points = DMatrix::from_fn(50, 4, |_, _| rng.gen_range(-2.0..2.0));
    println!("\nCholesky of a 50-point Gram matrix with 1e-8 relative jitter:");
    for (name, spec) in &specs {
        let mut k = kernel_matrix_sym(spec, &points);
        let max_diag = (0..50).map(|i| k[(i, i)]).fold(f64::MIN, f64::max);
        for i in 0..50 {
            k[(i, i)] += 1e-8 * max_diag;
        }
        let ok = nalgebra::Cholesky::new(k).is_some();
        println!("  {name:>10}: {}", if ok { "factorizes" } else { "FAILED" });
    }
}
