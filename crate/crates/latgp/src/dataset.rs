//! Profiling-dataset handling: the CSV sample schema, feature extraction,
//! per-feature standardization and a deterministic synthetic generator.
//!
//! A sample is one profiled 2D convolution: its shape, the hardware it ran
//! on, its position in the network and the measured latency in ms. The raw
//! feature vector is the fixed 14-column projection
//! `[h, w, h_o, w_o, k, f, c, pf, pc, m_clk_mhz, l_clk_mhz, m_eff, s_bits,
//! dw_bits]`; models that need the layer position consume it as an extra
//! trailing column (see [`crate::gp::PositionPolicy`]).

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    compute_counts, layer_breakdown, HardwareConfig, LayerConfig, LayerPosition,
};
use crate::error::{LatGpError, Result};

/// Number of raw model features.
pub const FEATURE_DIM: usize = 14;

/// Column order of the raw feature vector.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "h", "w", "h_o", "w_o", "k", "f", "c", "pf", "pc", "m_clk_mhz", "l_clk_mhz", "m_eff",
    "s_bits", "dw_bits",
];

/// CSV header, fixed for interchange with other tooling.
pub const CSV_HEADER: &str =
    "h,w,h_o,w_o,k,f,c,pf,pc,m_clk_mhz,l_clk_mhz,m_eff_pct,s_bits,dw_bits,position,latency_ms";

/// One profiled convolution layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub layer: LayerConfig,
    pub hw: HardwareConfig,
    pub position: LayerPosition,
    /// Measured latency in milliseconds; strictly positive.
    pub latency_ms: f64,
}

/// Raw feature vector of a sample, in [`FEATURE_NAMES`] order.
pub fn featurize(sample: &Sample) -> [f64; FEATURE_DIM] {
    let l = &sample.layer;
    let hw = &sample.hw;
    [
        l.h as f64,
        l.w as f64,
        l.h_o as f64,
        l.w_o as f64,
        l.k as f64,
        l.f as f64,
        l.c as f64,
        hw.pf as f64,
        hw.pc as f64,
        hw.m_clk_mhz,
        hw.l_clk_mhz,
        hw.m_eff,
        hw.s_bits as f64,
        hw.dw_bits as f64,
    ]
}

fn positive_int(value: f64, name: &str) -> Result<u64> {
    let rounded = value.round();
    if !value.is_finite() || (value - rounded).abs() > 1e-6 || rounded < 1.0 {
        return Err(LatGpError::Validation(format!(
            "feature {name} must be a positive integer, got {value}"
        )));
    }
    Ok(rounded as u64)
}

/// Rebuilds the layer shape from feature columns 0..7.
pub fn layer_from_features(row: &[f64]) -> Result<LayerConfig> {
    if row.len() < FEATURE_DIM {
        return Err(LatGpError::DimensionMismatch { expected: FEATURE_DIM, got: row.len() });
    }
    LayerConfig::new(
        positive_int(row[0], "h")?,
        positive_int(row[1], "w")?,
        positive_int(row[2], "h_o")?,
        positive_int(row[3], "w_o")?,
        positive_int(row[4], "k")?,
        positive_int(row[5], "f")?,
        positive_int(row[6], "c")?,
    )
}

/// Rebuilds the hardware constants from feature columns 7..14.
pub fn hardware_from_features(row: &[f64]) -> Result<HardwareConfig> {
    if row.len() < FEATURE_DIM {
        return Err(LatGpError::DimensionMismatch { expected: FEATURE_DIM, got: row.len() });
    }
    HardwareConfig::new(
        positive_int(row[7], "pf")?,
        positive_int(row[8], "pc")?,
        row[9],
        row[10],
        row[11],
        positive_int(row[12], "s_bits")?,
        positive_int(row[13], "dw_bits")?,
    )
}

/// P×14 raw feature matrix.
pub fn feature_matrix(samples: &[Sample]) -> DMatrix<f64> {
    DMatrix::from_row_iterator(
        samples.len(),
        FEATURE_DIM,
        samples.iter().flat_map(|s| featurize(s).into_iter()),
    )
}

/// P×15 raw feature matrix with the position code appended as the last
/// column, for mean functions that need the layer position per row.
pub fn feature_matrix_with_position(samples: &[Sample]) -> DMatrix<f64> {
    DMatrix::from_row_iterator(
        samples.len(),
        FEATURE_DIM + 1,
        samples.iter().flat_map(|s| {
            featurize(s)
                .into_iter()
                .chain(std::iter::once(s.position.code()))
        }),
    )
}

/// Latency targets in ms.
pub fn targets(samples: &[Sample]) -> DVector<f64> {
    DVector::from_iterator(samples.len(), samples.iter().map(|s| s.latency_ms))
}

/// Per-feature mean and standard deviation over training rows.
///
/// Population statistics; constant columns get a standard deviation of 1 so
/// standardization never divides by zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureStats {
    /// Statistics over the first `ncols` columns of `x`.
    pub fn fit(x: &DMatrix<f64>, ncols: usize) -> FeatureStats {
        let p = x.nrows();
        let mut mean = vec![0.0; ncols];
        let mut std = vec![1.0; ncols];
        if p == 0 {
            return FeatureStats { mean, std };
        }
        for c in 0..ncols {
            let col = x.column(c);
            let first = col[0];
            if col.iter().all(|v| *v == first) {
                // constant column: center exactly, clamp the scale to 1.
                // A computed mean would carry accumulated rounding and turn
                // the column into spurious O(1) values after standardizing.
                mean[c] = first;
                std[c] = 1.0;
                continue;
            }
            let m: f64 = col.iter().sum::<f64>() / p as f64;
            let var: f64 = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / p as f64;
            mean[c] = m;
            let s = var.sqrt();
            std[c] = if s > 0.0 { s } else { 1.0 };
        }
        FeatureStats { mean, std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Standardizes the first `dim()` columns of `x` into a new matrix of
    /// width `dim()`. Extra trailing columns of `x` are dropped.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(x.nrows(), n, |i, j| (x[(i, j)] - self.mean[j]) / self.std[j])
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct CsvRow {
    h: u64,
    w: u64,
    h_o: u64,
    w_o: u64,
    k: u64,
    f: u64,
    c: u64,
    pf: u64,
    pc: u64,
    m_clk_mhz: f64,
    l_clk_mhz: f64,
    m_eff_pct: f64,
    s_bits: u64,
    dw_bits: u64,
    position: String,
    latency_ms: f64,
}

impl CsvRow {
    fn into_sample(self, row: usize) -> Result<Sample> {
        let convert = |e: LatGpError| LatGpError::CsvRow { row, message: e.to_string() };
        let layer =
            LayerConfig::new(self.h, self.w, self.h_o, self.w_o, self.k, self.f, self.c)
                .map_err(convert)?;
        let hw = HardwareConfig::new(
            self.pf,
            self.pc,
            self.m_clk_mhz,
            self.l_clk_mhz,
            self.m_eff_pct / 100.0,
            self.s_bits,
            self.dw_bits,
        )
        .map_err(convert)?;
        let position = LayerPosition::parse(&self.position).map_err(convert)?;
        if !(self.latency_ms > 0.0 && self.latency_ms.is_finite()) {
            return Err(LatGpError::CsvRow {
                row,
                message: format!("latency_ms must be positive, got {}", self.latency_ms),
            });
        }
        Ok(Sample { layer, hw, position, latency_ms: self.latency_ms })
    }

    fn from_sample(s: &Sample) -> CsvRow {
        CsvRow {
            h: s.layer.h,
            w: s.layer.w,
            h_o: s.layer.h_o,
            w_o: s.layer.w_o,
            k: s.layer.k,
            f: s.layer.f,
            c: s.layer.c,
            pf: s.hw.pf,
            pc: s.hw.pc,
            m_clk_mhz: s.hw.m_clk_mhz,
            l_clk_mhz: s.hw.l_clk_mhz,
            m_eff_pct: s.hw.m_eff * 100.0,
            s_bits: s.hw.s_bits,
            dw_bits: s.hw.dw_bits,
            position: s.position.as_str().to_string(),
            latency_ms: s.latency_ms,
        }
    }
}

fn check_header(headers: &csv::StringRecord) -> Result<()> {
    let expected: Vec<&str> = CSV_HEADER.split(',').collect();
    let got: Vec<&str> = headers.iter().collect();
    for col in &expected {
        if !got.contains(col) {
            return Err(LatGpError::Validation(format!("missing column {col:?} in CSV header")));
        }
    }
    for col in &got {
        if !expected.contains(col) {
            return Err(LatGpError::Validation(format!("unknown column {col:?} in CSV header")));
        }
    }
    Ok(())
}

/// Reads samples from a CSV file. Errors name the offending 1-based data
/// row; an empty data section is an error.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let file = std::fs::File::open(path.as_ref())?;
    load_csv_reader(file)
}

pub fn load_csv_reader(reader: impl std::io::Read) -> Result<Vec<Sample>> {
    let mut rdr = csv::Reader::from_reader(reader);
    check_header(rdr.headers()?)?;
    let mut samples = Vec::new();
    for (idx, record) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = idx + 1;
        let parsed = record.map_err(|e| LatGpError::CsvRow {
            row,
            message: match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
                _ => e.to_string(),
            },
        })?;
        samples.push(parsed.into_sample(row)?);
    }
    if samples.is_empty() {
        return Err(LatGpError::NoSamples);
    }
    Ok(samples)
}

/// Writes samples with full double precision so that a load round-trips
/// exactly.
pub fn write_csv(path: impl AsRef<Path>, samples: &[Sample]) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_csv_writer(file, samples)
}

pub fn write_csv_writer(writer: impl Write, samples: &[Sample]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for sample in samples {
        wtr.serialize(CsvRow::from_sample(sample))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Returns a warning when rows of a profiling file disagree on the hardware
/// configuration. Mixed hardware is legal, just unusual for a single run.
pub fn mixed_hardware_warning(samples: &[Sample]) -> Option<String> {
    let first = samples.first()?.hw;
    let differing = samples.iter().filter(|s| s.hw != first).count();
    (differing > 0).then(|| {
        format!("{differing} of {} rows use a different hardware configuration than row 1", samples.len())
    })
}

/// How synthetic targets deviate from the analytic model:
/// `latency = (t_analytic · bias(ops) + overhead_ms) · exp(noise_sigma_log · z)`
/// with `bias(ops) = 1 + bias_amplitude · (1 − exp(−ops / bias_ops_scale))`
/// and `z` standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionSpec {
    pub bias_amplitude: f64,
    pub bias_ops_scale: f64,
    pub overhead_ms: f64,
    pub noise_sigma_log: f64,
}

impl Default for DistortionSpec {
    fn default() -> Self {
        DistortionSpec {
            bias_amplitude: 0.3,
            bias_ops_scale: 1e8,
            overhead_ms: 0.02,
            noise_sigma_log: 0.05,
        }
    }
}

impl DistortionSpec {
    /// Identity distortion: targets equal the analytic model exactly.
    pub fn none() -> Self {
        DistortionSpec {
            bias_amplitude: 0.0,
            bias_ops_scale: 1e8,
            overhead_ms: 0.0,
            noise_sigma_log: 0.0,
        }
    }
}

fn log_uniform_int(rng: &mut impl Rng, lo: u64, hi: u64) -> u64 {
    if lo == hi {
        return lo;
    }
    let v = rng.gen_range((lo as f64).ln()..=(hi as f64).ln()).exp().round() as u64;
    v.clamp(lo, hi)
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Largest op count the generator will produce. Keeps drawn layers in the
/// regime real CNN workloads occupy: spatially large layers carry few
/// channels and vice versa, and per-layer latencies stay in the documented
/// 0.018 to 11.7 ms band instead of the multi-second latencies that
/// unconstrained joint maxima of H, W, C and F would imply.
const OPS_BUDGET: f64 = 5e9;

/// Deterministic synthetic profiling data standing in for a real
/// measurement run.
///
/// Layer shapes are drawn log-uniformly from the documented dataset ranges
/// (H, W in [1, 418]; K in {1, 3, 5, 7}; C in [3, 2048]; F in [64, 2048]),
/// with the channel and filter draws upper-bounded so the layer's op count
/// stays under [`OPS_BUDGET`]. Output sizes follow valid convolution with
/// stride 1 or 2; positions are drawn uniformly. The same seed always
/// produces the same samples, and the drawn shapes do not depend on the
/// distortion settings.
pub fn generate_synthetic(
    seed: u64,
    count: usize,
    hw: &HardwareConfig,
    distortion: &DistortionSpec,
) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let h = log_uniform_int(&mut rng, 1, 418);
        let w = log_uniform_int(&mut rng, 1, 418);
        let k = [1u64, 3, 5, 7][rng.gen_range(0..4)];
        let spatial = (h * w * k * k) as f64;
        let c_cap = ((OPS_BUDGET / (spatial * 64.0)) as u64).clamp(3, 2048);
        let c = log_uniform_int(&mut rng, 3, c_cap);
        let f_cap = ((OPS_BUDGET / (spatial * c as f64)) as u64).clamp(64, 2048);
        let f = log_uniform_int(&mut rng, 64, f_cap);
        let stride = if rng.gen_bool(0.5) { 1 } else { 2 };
        let h_o = (h.saturating_sub(k) / stride + 1).max(1);
        let w_o = (w.saturating_sub(k) / stride + 1).max(1);
        let position = match rng.gen_range(0..3) {
            0 => LayerPosition::First,
            1 => LayerPosition::Middle,
            _ => LayerPosition::Last,
        };
        // draw the noise sample unconditionally so shapes and noise stay
        // aligned across distortion settings for a given seed
        let z = standard_normal(&mut rng);

        let layer = LayerConfig { h, w, h_o, w_o, k, f, c };
        let t = layer_breakdown(&layer, hw, position).t_layer;
        let ops = compute_counts(&layer).ops as f64;
        let bias = 1.0 + distortion.bias_amplitude * (1.0 - (-ops / distortion.bias_ops_scale).exp());
        let latency_ms = (t * bias + distortion.overhead_ms) * (distortion.noise_sigma_log * z).exp();

        samples.push(Sample { layer, hw: *hw, position, latency_ms });
    }
    samples
}
