//! Closed-form latency estimates for 2D convolution layers on an
//! FPGA-style accelerator.
//!
//! A layer's runtime is split into weight loading, input loading, compute
//! and output storing. Each term is a ratio of a work count to the hardware
//! throughput that serves it; the per-layer latency then depends on where
//! the layer sits in the network, because intermediate feature maps stay in
//! on-chip memory:
//!
//! * first layer: `t_load + t_compute`
//! * interior layer: `max(t_weights, t_compute)`
//! * last layer: `max(t_weights, t_compute) + t_store`
//!
//! Clocks are given in MHz and converted to Hz internally; all returned
//! times are milliseconds.

use serde::{Deserialize, Serialize};

use crate::error::{LatGpError, Result};

const MS_PER_S: f64 = 1e3;
const HZ_PER_MHZ: f64 = 1e6;

/// Shape parameters of one 2D convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerConfig {
    /// Input feature map height (pixels).
    pub h: u64,
    /// Input feature map width (pixels).
    pub w: u64,
    /// Output feature map height (pixels).
    pub h_o: u64,
    /// Output feature map width (pixels).
    pub w_o: u64,
    /// Kernel size (square).
    pub k: u64,
    /// Number of filters.
    pub f: u64,
    /// Number of input channels.
    pub c: u64,
}

impl LayerConfig {
    pub fn new(h: u64, w: u64, h_o: u64, w_o: u64, k: u64, f: u64, c: u64) -> Result<Self> {
        let layer = LayerConfig { h, w, h_o, w_o, k, f, c };
        layer.validate()?;
        Ok(layer)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("h", self.h),
            ("w", self.w),
            ("h_o", self.h_o),
            ("w_o", self.w_o),
            ("k", self.k),
            ("f", self.f),
            ("c", self.c),
        ] {
            if value == 0 {
                return Err(LatGpError::Validation(format!(
                    "layer field {name} must be a positive integer"
                )));
            }
        }
        Ok(())
    }
}

/// Accelerator and memory-system constants.
///
/// `m_eff` is kept as a fraction in (0, 1]; file formats carry it as a
/// percentage (see [`crate::dataset`] and [`crate::persist`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HardwareConfigRepr", into = "HardwareConfigRepr")]
pub struct HardwareConfig {
    /// Parallelism in the filter dimension.
    pub pf: u64,
    /// Parallelism in the channel dimension.
    pub pc: u64,
    /// Memory clock in MHz.
    pub m_clk_mhz: f64,
    /// Logic clock in MHz.
    pub l_clk_mhz: f64,
    /// Memory transfer efficiency as a fraction in (0, 1].
    pub m_eff: f64,
    /// Memory transfer size in bits.
    pub s_bits: u64,
    /// Processing data width in bits.
    pub dw_bits: u64,
}

/// On-disk form of [`HardwareConfig`]: efficiency as percent, clocks in MHz.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct HardwareConfigRepr {
    pf: u64,
    pc: u64,
    m_clk_mhz: f64,
    l_clk_mhz: f64,
    m_eff_pct: f64,
    s_bits: u64,
    dw_bits: u64,
}

impl From<HardwareConfig> for HardwareConfigRepr {
    fn from(hw: HardwareConfig) -> Self {
        HardwareConfigRepr {
            pf: hw.pf,
            pc: hw.pc,
            m_clk_mhz: hw.m_clk_mhz,
            l_clk_mhz: hw.l_clk_mhz,
            m_eff_pct: hw.m_eff * 100.0,
            s_bits: hw.s_bits,
            dw_bits: hw.dw_bits,
        }
    }
}

impl TryFrom<HardwareConfigRepr> for HardwareConfig {
    type Error = LatGpError;

    fn try_from(repr: HardwareConfigRepr) -> Result<Self> {
        HardwareConfig::new(
            repr.pf,
            repr.pc,
            repr.m_clk_mhz,
            repr.l_clk_mhz,
            repr.m_eff_pct / 100.0,
            repr.s_bits,
            repr.dw_bits,
        )
    }
}

impl HardwareConfig {
    pub fn new(
        pf: u64,
        pc: u64,
        m_clk_mhz: f64,
        l_clk_mhz: f64,
        m_eff: f64,
        s_bits: u64,
        dw_bits: u64,
    ) -> Result<Self> {
        let hw = HardwareConfig { pf, pc, m_clk_mhz, l_clk_mhz, m_eff, s_bits, dw_bits };
        hw.validate()?;
        Ok(hw)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("pf", self.pf),
            ("pc", self.pc),
            ("s_bits", self.s_bits),
            ("dw_bits", self.dw_bits),
        ] {
            if value == 0 {
                return Err(LatGpError::Validation(format!(
                    "hardware field {name} must be a positive integer"
                )));
            }
        }
        if !(self.m_clk_mhz > 0.0 && self.m_clk_mhz.is_finite()) {
            return Err(LatGpError::Validation("m_clk_mhz must be > 0".into()));
        }
        if !(self.l_clk_mhz > 0.0 && self.l_clk_mhz.is_finite()) {
            return Err(LatGpError::Validation("l_clk_mhz must be > 0".into()));
        }
        if !(self.m_eff > 0.0 && self.m_eff <= 1.0) {
            return Err(LatGpError::Validation(format!(
                "m_eff must be in (0, 1], got {}",
                self.m_eff
            )));
        }
        Ok(())
    }

    /// The reference accelerator configuration used throughout the examples:
    /// PF = PC = 64, both clocks 200 MHz, 70% memory efficiency, 64-bit
    /// transfers, 8-bit data.
    pub fn reference() -> Self {
        HardwareConfig {
            pf: 64,
            pc: 64,
            m_clk_mhz: 200.0,
            l_clk_mhz: 200.0,
            m_eff: 0.7,
            s_bits: 64,
            dw_bits: 8,
        }
    }
}

/// Where a layer sits in the network. A single-layer network is treated as
/// first-and-last; see [`network_latency`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerPosition {
    First,
    Middle,
    Last,
}

impl LayerPosition {
    /// Stable numeric code used in feature vectors: 0, 1, 2.
    pub fn code(self) -> f64 {
        match self {
            LayerPosition::First => 0.0,
            LayerPosition::Middle => 1.0,
            LayerPosition::Last => 2.0,
        }
    }

    pub fn from_code(code: f64) -> Result<Self> {
        if (code - 0.0).abs() < 1e-9 {
            Ok(LayerPosition::First)
        } else if (code - 1.0).abs() < 1e-9 {
            Ok(LayerPosition::Middle)
        } else if (code - 2.0).abs() < 1e-9 {
            Ok(LayerPosition::Last)
        } else {
            Err(LatGpError::Validation(format!(
                "invalid layer position code {code}; expected 0, 1 or 2"
            )))
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayerPosition::First => "first",
            LayerPosition::Middle => "middle",
            LayerPosition::Last => "last",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(LayerPosition::First),
            "middle" => Ok(LayerPosition::Middle),
            "last" => Ok(LayerPosition::Last),
            other => Err(LatGpError::Validation(format!(
                "invalid position {other:?}; expected first, middle or last"
            ))),
        }
    }
}

/// Work counts of one 2D convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvCounts {
    /// Multiply-accumulate operations: F·C·H·W·K·K.
    pub ops: u64,
    /// Input feature map elements: H·W·C.
    pub input_size: u64,
    /// Weight elements: F·C·K·K.
    pub weights_size: u64,
    /// Output feature map elements: H_O·W_O·F.
    pub output_size: u64,
}

/// Exact integer work counts for a layer. 64-bit arithmetic covers the
/// documented shape ranges (H, W up to 418, K up to 7, C and F up to 2048).
pub fn compute_counts(layer: &LayerConfig) -> ConvCounts {
    ConvCounts {
        ops: layer.f * layer.c * layer.h * layer.w * layer.k * layer.k,
        input_size: layer.h * layer.w * layer.c,
        weights_size: layer.f * layer.c * layer.k * layer.k,
        output_size: layer.h_o * layer.w_o * layer.f,
    }
}

/// Per-layer latency split. All fields are milliseconds and nonnegative;
/// `t_load = t_weights + t_data`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    pub t_weights: f64,
    pub t_data: f64,
    pub t_load: f64,
    pub t_compute: f64,
    pub t_store: f64,
    pub t_layer: f64,
}

fn raw_terms(layer: &LayerConfig, hw: &HardwareConfig) -> (f64, f64, f64, f64) {
    let counts = compute_counts(layer);
    let mem_denom = hw.pf as f64 * (hw.m_clk_mhz * HZ_PER_MHZ) * hw.s_bits as f64 * hw.m_eff;
    let compute_denom = hw.pf as f64 * hw.pc as f64 * (hw.l_clk_mhz * HZ_PER_MHZ);
    let dw = hw.dw_bits as f64;

    let t_weights = (counts.weights_size as f64 * dw) / mem_denom * MS_PER_S;
    let t_data = (counts.input_size as f64 * dw) / mem_denom * MS_PER_S;
    let t_compute = counts.ops as f64 / compute_denom * MS_PER_S;
    let t_store = (counts.output_size as f64 * dw) / mem_denom * MS_PER_S;
    (t_weights, t_data, t_compute, t_store)
}

/// Latency breakdown of a layer at a given network position.
pub fn layer_breakdown(
    layer: &LayerConfig,
    hw: &HardwareConfig,
    position: LayerPosition,
) -> LatencyBreakdown {
    let (t_weights, t_data, t_compute, t_store) = raw_terms(layer, hw);
    let t_load = t_weights + t_data;
    let t_layer = match position {
        LayerPosition::First => t_load + t_compute,
        LayerPosition::Middle => t_weights.max(t_compute),
        LayerPosition::Last => t_weights.max(t_compute) + t_store,
    };
    LatencyBreakdown { t_weights, t_data, t_load, t_compute, t_store, t_layer }
}

/// Breakdown for a network consisting of this single layer: the input must
/// be loaded and the output stored, so `t_layer = t_load + t_compute +
/// t_store`.
pub fn single_layer_breakdown(layer: &LayerConfig, hw: &HardwareConfig) -> LatencyBreakdown {
    let (t_weights, t_data, t_compute, t_store) = raw_terms(layer, hw);
    let t_load = t_weights + t_data;
    LatencyBreakdown {
        t_weights,
        t_data,
        t_load,
        t_compute,
        t_store,
        t_layer: t_load + t_compute + t_store,
    }
}

/// Generic slowest-path heuristic for a pipelined design: the layer runs at
/// the pace of the slowest of loading, computing and storing.
///
/// Sizes are in elements, `memory_bandwidth` in elements per second, `clock`
/// in cycles per second and `parallelism` in operations per cycle. All
/// arguments must be positive. Returns milliseconds.
pub fn generic_layer_latency(
    input_size: f64,
    output_size: f64,
    ops: f64,
    memory_bandwidth: f64,
    clock: f64,
    parallelism: f64,
) -> f64 {
    let t_load = input_size / memory_bandwidth;
    let t_compute = ops / (clock * parallelism);
    let t_store = output_size / memory_bandwidth;
    t_load.max(t_compute).max(t_store) * MS_PER_S
}

/// Per-layer breakdowns and total latency of a feed-forward network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkLatency {
    pub per_layer: Vec<LatencyBreakdown>,
    pub total: f64,
}

/// Estimates every layer at its position (first, interior, last; a single
/// layer is first-and-last) and sums the per-layer latencies in order.
pub fn network_latency(layers: &[LayerConfig], hw: &HardwareConfig) -> Result<NetworkLatency> {
    if layers.is_empty() {
        return Err(LatGpError::EmptyNetwork);
    }
    let n = layers.len();
    let per_layer: Vec<LatencyBreakdown> = layers
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            if n == 1 {
                single_layer_breakdown(layer, hw)
            } else if i == 0 {
                layer_breakdown(layer, hw, LayerPosition::First)
            } else if i == n - 1 {
                layer_breakdown(layer, hw, LayerPosition::Last)
            } else {
                layer_breakdown(layer, hw, LayerPosition::Middle)
            }
        })
        .collect();
    let total = per_layer.iter().map(|b| b.t_layer).sum();
    Ok(NetworkLatency { per_layer, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_layer() -> LayerConfig {
        LayerConfig::new(56, 56, 56, 56, 3, 64, 64).unwrap()
    }

    /// Memory latency term from exact integer scaling, assuming whole-MHz
    /// clocks and whole-percent efficiency:
    /// `elems·dw / (pf · m_clk · s · m_eff)` seconds, in ms.
    fn memory_term_oracle(elems: u64, hw: &HardwareConfig) -> f64 {
        let m_eff_pct = (hw.m_eff * 100.0).round() as u128;
        let m_clk_hz = (hw.m_clk_mhz.round() as u128) * 1_000_000;
        let num = elems as u128 * hw.dw_bits as u128 * 100 * 1000;
        let den = hw.pf as u128 * m_clk_hz * hw.s_bits as u128 * m_eff_pct;
        num as f64 / den as f64
    }

    fn compute_term_oracle(ops: u64, hw: &HardwareConfig) -> f64 {
        let l_clk_hz = (hw.l_clk_mhz.round() as u128) * 1_000_000;
        let den = hw.pf as u128 * hw.pc as u128 * l_clk_hz;
        (ops as u128 * 1000) as f64 / den as f64
    }

    #[test]
    fn counts_reference_shape() {
        let counts = compute_counts(&reference_layer());
        assert_eq!(counts.ops, 64 * 64 * 56 * 56 * 3 * 3);
        assert_eq!(counts.ops, 115_605_504);
        assert_eq!(counts.input_size, 200_704);
        assert_eq!(counts.weights_size, 36_864);
        assert_eq!(counts.output_size, 200_704);
    }

    #[test]
    fn counts_all_ones() {
        let layer = LayerConfig::new(1, 1, 1, 1, 1, 1, 1).unwrap();
        let counts = compute_counts(&layer);
        assert_eq!(counts.ops, 1);
        assert_eq!(counts.input_size, 1);
        assert_eq!(counts.weights_size, 1);
        assert_eq!(counts.output_size, 1);
    }

    #[test]
    fn counts_at_dataset_maxima_fit_in_64_bits() {
        let layer = LayerConfig::new(418, 418, 416, 416, 7, 2048, 2048).unwrap();
        let counts = compute_counts(&layer);
        let expected: u64 = 418 * 418 * 49 * 2048 * 2048;
        assert_eq!(counts.ops, expected);
        assert_eq!(counts.ops, 35_909_433_032_704);
        assert!(counts.ops < u64::MAX / 2);
    }

    #[test]
    fn zero_field_rejected() {
        assert!(LayerConfig::new(0, 1, 1, 1, 1, 1, 1).is_err());
        assert!(HardwareConfig::new(64, 0, 200.0, 200.0, 0.7, 64, 8).is_err());
        assert!(HardwareConfig::new(64, 64, 200.0, 200.0, 1.5, 64, 8).is_err());
        assert!(HardwareConfig::new(64, 64, 200.0, 200.0, 0.0, 64, 8).is_err());
    }

    #[test]
    fn breakdown_middle_matches_oracle() {
        let hw = HardwareConfig::reference();
        let b = layer_breakdown(&reference_layer(), &hw, LayerPosition::Middle);
        assert_relative_eq!(b.t_compute, 0.14112, max_relative = 1e-9);
        assert_relative_eq!(b.t_weights, 5.142857142857143e-4, max_relative = 1e-9);
        assert_relative_eq!(b.t_layer, 0.14112, max_relative = 1e-9);
        assert_relative_eq!(
            b.t_weights,
            memory_term_oracle(36_864, &hw),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            b.t_compute,
            compute_term_oracle(115_605_504, &hw),
            max_relative = 1e-12
        );
    }

    #[test]
    fn breakdown_first_matches_oracle() {
        let hw = HardwareConfig::reference();
        let b = layer_breakdown(&reference_layer(), &hw, LayerPosition::First);
        assert_relative_eq!(b.t_data, 0.0028, max_relative = 1e-9);
        assert_relative_eq!(b.t_load, 0.003314285714285714, max_relative = 1e-9);
        assert_relative_eq!(b.t_layer, 0.1444342857142857, max_relative = 1e-9);
        assert_relative_eq!(b.t_data, memory_term_oracle(200_704, &hw), max_relative = 1e-12);
    }

    #[test]
    fn breakdown_last_matches_oracle() {
        let hw = HardwareConfig::reference();
        let b = layer_breakdown(&reference_layer(), &hw, LayerPosition::Last);
        assert_relative_eq!(b.t_store, 0.0028, max_relative = 1e-9);
        assert_relative_eq!(b.t_layer, 0.14392, max_relative = 1e-9);
    }

    #[test]
    fn generic_latency_compute_bound() {
        let ms = generic_layer_latency(1.0, 1.0, 1e9, 1e12, 2e8, 1.0);
        assert_relative_eq!(ms, 5000.0, max_relative = 1e-12);
    }

    #[test]
    fn generic_latency_load_bound() {
        let ms = generic_layer_latency(1e12, 1.0, 1.0, 1e9, 1e9, 1.0);
        assert_relative_eq!(ms, 1_000_000.0, max_relative = 1e-12);
    }

    #[test]
    fn generic_latency_symmetric() {
        // all three paths take exactly one second
        let ms = generic_layer_latency(1e9, 1e9, 1e9, 1e9, 1e9, 1.0);
        assert_relative_eq!(ms, 1000.0, max_relative = 1e-12);
    }

    #[test]
    fn network_three_identical_layers() {
        let hw = HardwareConfig::reference();
        let layers = vec![reference_layer(); 3];
        let net = network_latency(&layers, &hw).unwrap();
        assert_eq!(net.per_layer.len(), 3);
        assert_relative_eq!(net.total, 0.4294742857142857, max_relative = 1e-9);
        let sum: f64 = net.per_layer.iter().map(|b| b.t_layer).sum();
        assert_eq!(net.total, sum);
    }

    #[test]
    fn network_empty_is_error() {
        let hw = HardwareConfig::reference();
        let err = network_latency(&[], &hw).unwrap_err();
        assert_eq!(err.to_string(), "empty network");
    }

    #[test]
    fn network_single_layer_is_first_and_last() {
        let hw = HardwareConfig::reference();
        let layer = reference_layer();
        let net = network_latency(&[layer], &hw).unwrap();
        let b = single_layer_breakdown(&layer, &hw);
        assert_eq!(net.total, b.t_layer);
        assert_eq!(b.t_layer, b.t_load + b.t_compute + b.t_store);
    }

    #[test]
    fn network_total_increases_with_depth() {
        let hw = HardwareConfig::reference();
        let layer = reference_layer();
        let mut prev = 0.0;
        for n in 1..8 {
            let net = network_latency(&vec![layer; n], &hw).unwrap();
            assert!(net.total > prev);
            prev = net.total;
        }
    }

    #[test]
    fn position_rule_ordering() {
        let hw = HardwareConfig::reference();
        let layer = reference_layer();
        let middle = layer_breakdown(&layer, &hw, LayerPosition::Middle).t_layer;
        let last = layer_breakdown(&layer, &hw, LayerPosition::Last).t_layer;
        let single = single_layer_breakdown(&layer, &hw).t_layer;
        assert!(middle <= last);
        assert!(last <= single);
    }

    #[test]
    fn hardware_serde_uses_percent() {
        let hw = HardwareConfig::reference();
        let json = serde_json::to_string(&hw).unwrap();
        assert!(json.contains("\"m_eff_pct\":70.0"), "{json}");
        let back: HardwareConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, hw);
        assert_eq!(back.m_eff, 0.7);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_layer() -> impl Strategy<Value = LayerConfig> {
            (
                1u64..=418,
                1u64..=418,
                1u64..=416,
                1u64..=416,
                prop::sample::select(vec![1u64, 3, 5, 7]),
                64u64..=2048,
                3u64..=2048,
            )
                .prop_map(|(h, w, h_o, w_o, k, f, c)| LayerConfig { h, w, h_o, w_o, k, f, c })
        }

        fn arb_hw() -> impl Strategy<Value = HardwareConfig> {
            (
                prop::sample::select(vec![1u64, 2, 4, 16, 64, 128]),
                prop::sample::select(vec![1u64, 2, 4, 16, 64, 128]),
                // whole-MHz clocks and whole-percent efficiency keep the
                // integer-scaled oracle exact
                50u64..=500,
                50u64..=500,
                1u64..=100,
                prop::sample::select(vec![8u64, 32, 64, 128]),
                prop::sample::select(vec![1u64, 8, 16, 32]),
            )
                .prop_map(|(pf, pc, m_clk, l_clk, m_eff_pct, s, dw)| HardwareConfig {
                    pf,
                    pc,
                    m_clk_mhz: m_clk as f64,
                    l_clk_mhz: l_clk as f64,
                    m_eff: m_eff_pct as f64 / 100.0,
                    s_bits: s,
                    dw_bits: dw,
                })
        }

        proptest! {
            #[test]
            fn doubling_pf_halves_every_term(layer in arb_layer(), hw in arb_hw()) {
                let mut hw2 = hw;
                hw2.pf *= 2;
                for pos in [LayerPosition::First, LayerPosition::Middle, LayerPosition::Last] {
                    let a = layer_breakdown(&layer, &hw, pos);
                    let b = layer_breakdown(&layer, &hw2, pos);
                    // doubling an f64 factor is exact, so these hold bit-for-bit
                    prop_assert_eq!(b.t_weights, a.t_weights / 2.0);
                    prop_assert_eq!(b.t_data, a.t_data / 2.0);
                    prop_assert_eq!(b.t_compute, a.t_compute / 2.0);
                    prop_assert_eq!(b.t_store, a.t_store / 2.0);
                }
            }

            #[test]
            fn doubling_pc_halves_only_compute(layer in arb_layer(), hw in arb_hw()) {
                let mut hw2 = hw;
                hw2.pc *= 2;
                let a = layer_breakdown(&layer, &hw, LayerPosition::Middle);
                let b = layer_breakdown(&layer, &hw2, LayerPosition::Middle);
                prop_assert_eq!(b.t_compute, a.t_compute / 2.0);
                prop_assert_eq!(b.t_weights, a.t_weights);
                prop_assert_eq!(b.t_data, a.t_data);
                prop_assert_eq!(b.t_store, a.t_store);
            }

            #[test]
            fn position_rule_is_ordered(layer in arb_layer(), hw in arb_hw()) {
                let middle = layer_breakdown(&layer, &hw, LayerPosition::Middle).t_layer;
                let last = layer_breakdown(&layer, &hw, LayerPosition::Last).t_layer;
                let single = single_layer_breakdown(&layer, &hw).t_layer;
                prop_assert!(middle <= last);
                prop_assert!(last <= single);
            }

            #[test]
            fn interior_permutation_keeps_total(
                mut layers in prop::collection::vec(arb_layer(), 4..8),
                hw in arb_hw(),
                swap in (1usize..3, 1usize..3),
            ) {
                let before = network_latency(&layers, &hw).unwrap().total;
                let n = layers.len();
                let (i, j) = (1 + swap.0 % (n - 2), 1 + swap.1 % (n - 2));
                layers.swap(i, j);
                let after = network_latency(&layers, &hw).unwrap().total;
                // summation order changes, so allow rounding slack
                prop_assert!((before - after).abs() <= 1e-12 * before.abs().max(1.0));
            }

            #[test]
            fn breakdown_matches_exact_rational_oracle(layer in arb_layer(), hw in arb_hw()) {
                let counts = compute_counts(&layer);
                let b = layer_breakdown(&layer, &hw, LayerPosition::Middle);
                let tol = 1e-12;
                let t_w = super::memory_term_oracle(counts.weights_size, &hw);
                let t_d = super::memory_term_oracle(counts.input_size, &hw);
                let t_c = super::compute_term_oracle(counts.ops, &hw);
                let t_s = super::memory_term_oracle(counts.output_size, &hw);
                prop_assert!((b.t_weights - t_w).abs() <= tol * t_w);
                prop_assert!((b.t_data - t_d).abs() <= tol * t_d);
                prop_assert!((b.t_compute - t_c).abs() <= tol * t_c);
                prop_assert!((b.t_store - t_s).abs() <= tol * t_s);
            }
        }
    }
}
