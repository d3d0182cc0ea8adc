//! Versioned JSON persistence for models and the network/hardware input
//! files.
//!
//! Model files store only the fitting inputs (kernel, mean, noise,
//! standardization stats, raw training data); the Cholesky factor is
//! recomputed on load, which keeps files small and guarantees the loaded
//! model is bit-identical to refitting.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::analytic::{HardwareConfig, LayerConfig};
use crate::dataset::FeatureStats;
use crate::error::{LatGpError, Result};
use crate::gp::{self, GpModel, MeanFn};
use crate::kernels::KernelSpec;
use crate::linreg::LinearModel;

pub const GP_MODEL_VERSION: &str = "latgp-model/1";
pub const LINEAR_MODEL_VERSION: &str = "latgp-linear/1";

#[derive(Debug, Serialize, Deserialize)]
struct GpModelFile {
    version: String,
    kernel: KernelSpec,
    mean: MeanFn,
    noise_variance: f64,
    standardization: FeatureStats,
    train_features_raw: Vec<Vec<f64>>,
    train_targets: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinearModelFile {
    version: String,
    weights: Vec<f64>,
    intercept: f64,
    standardization: FeatureStats,
}

fn check_version(expected: &str, found: &str) -> Result<()> {
    if expected != found {
        return Err(LatGpError::ModelVersion {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn save_gp_model(path: impl AsRef<Path>, model: &GpModel) -> Result<()> {
    let file = GpModelFile {
        version: GP_MODEL_VERSION.to_string(),
        kernel: *model.kernel(),
        mean: *model.mean(),
        noise_variance: model.noise_variance(),
        standardization: model.stats().clone(),
        train_features_raw: matrix_rows(model.train_raw()),
        train_targets: model.targets().iter().copied().collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_gp_model(path: impl AsRef<Path>) -> Result<GpModel> {
    let text = std::fs::read_to_string(path)?;
    let file: GpModelFile = serde_json::from_str(&text)?;
    check_version(GP_MODEL_VERSION, &file.version)?;

    let p = file.train_targets.len();
    if file.train_features_raw.len() != p {
        return Err(LatGpError::DimensionMismatch {
            expected: p,
            got: file.train_features_raw.len(),
        });
    }
    let width = file.train_features_raw.first().map_or(file.standardization.dim(), Vec::len);
    if file.train_features_raw.iter().any(|r| r.len() != width) {
        return Err(LatGpError::Validation("ragged training feature rows".into()));
    }
    let x = DMatrix::from_row_iterator(
        p,
        width,
        file.train_features_raw.iter().flat_map(|r| r.iter().copied()),
    );
    let y = DVector::from_vec(file.train_targets);
    gp::fit(&x, &y, file.kernel, file.mean, file.noise_variance)
}

pub fn save_linear_model(path: impl AsRef<Path>, model: &LinearModel) -> Result<()> {
    let file = LinearModelFile {
        version: LINEAR_MODEL_VERSION.to_string(),
        weights: model.weights.iter().copied().collect(),
        intercept: model.intercept,
        standardization: model.stats.clone(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_linear_model(path: impl AsRef<Path>) -> Result<LinearModel> {
    let text = std::fs::read_to_string(path)?;
    let file: LinearModelFile = serde_json::from_str(&text)?;
    check_version(LINEAR_MODEL_VERSION, &file.version)?;
    Ok(LinearModel {
        weights: DVector::from_vec(file.weights),
        intercept: file.intercept,
        stats: file.standardization,
    })
}

/// A network description file: an ordered JSON array of layer objects.
pub fn load_network_json(path: impl AsRef<Path>) -> Result<Vec<LayerConfig>> {
    let text = std::fs::read_to_string(path)?;
    let layers: Vec<LayerConfig> = serde_json::from_str(&text)?;
    for (i, layer) in layers.iter().enumerate() {
        layer.validate().map_err(|e| {
            LatGpError::Validation(format!("network layer {i}: {e}"))
        })?;
    }
    Ok(layers)
}

/// A hardware description file: one JSON object with the accelerator
/// constants, efficiency given in percent.
pub fn load_hardware_json(path: impl AsRef<Path>) -> Result<HardwareConfig> {
    let text = std::fs::read_to_string(path)?;
    let hw: HardwareConfig = serde_json::from_str(&text)?;
    Ok(hw)
}
