//! Closed-form latency estimate for a small convolutional network.
//!
//! Builds a three-layer network, prints the per-layer load/compute/store
//! breakdown under the reference accelerator, and shows the generic
//! slowest-path heuristic for comparison.
//!
//! ```bash
//! cargo run --example estimate_network
//! ```

use latgp::analytic::{
    compute_counts, generic_layer_latency, network_latency, HardwareConfig, LayerConfig,
};

fn main() {
    let hw = HardwareConfig::reference();
    let layers = vec![
        LayerConfig::new(56, 56, 56, 56, 3, 64, 64).unwrap(),
        LayerConfig::new(56, 56, 56, 56, 3, 64, 64).unwrap(),
        LayerConfig::new(56, 56, 28, 28, 3, 128, 64).unwrap(),
    ];

    let net = network_latency(&layers, &hw).unwrap();
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "layer", "t_weights", "t_data", "t_compute", "t_store", "t_layer"
    );
    for (i, b) in net.per_layer.iter().enumerate() {
        println!(
            "{:>5} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            i + 1,
            b.t_weights,
            b.t_data,
            b.t_compute,
            b.t_store,
            b.t_layer
        );
    }
    println!("\ntotal network latency: {:.6} ms", net.total);

    // the generic max-of-three heuristic on the first layer, with the
    // memory system expressed as elements per second
    let counts = compute_counts(&layers[0]);
    let bytes_per_elem = hw.dw_bits as f64 / 8.0;
    let memory_bandwidth =
        hw.m_clk_mhz * 1e6 * hw.s_bits as f64 * hw.m_eff * hw.pf as f64 / 8.0 / bytes_per_elem;
    let clock = hw.l_clk_mhz * 1e6;
    let parallelism = (hw.pf * hw.pc) as f64;
    let generic = generic_layer_latency(
        counts.input_size as f64,
        counts.output_size as f64,
        counts.ops as f64,
        memory_bandwidth,
        clock,
        parallelism,
    );
    println!("generic slowest-path estimate for layer 1: {generic:.6} ms");
}
