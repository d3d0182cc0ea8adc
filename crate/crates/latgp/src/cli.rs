//! Batch command-line surface over the library.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 numerical failure.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use crate::analytic::{network_latency, HardwareConfig};
use crate::dataset::{self, Sample};
use crate::error::{LatGpError, Result};
use crate::eval::{
    compare_methods, loocv_mae, select_hyperparameters, EvalReport, HyperGrid, MethodId,
    SelectionCriterion,
};
use crate::gp::MeanFn;
use crate::kernels::KernelKind;
use crate::persist;

#[derive(Parser)]
#[command(
    name = "latgp",
    version,
    about = "Latency estimation for FPGA-based CNN accelerators: analytic model, GP regression and LOOCV comparison"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Linear,
    Rbf,
    Matern32,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> KernelKind {
        match k {
            KernelArg::Linear => KernelKind::Linear,
            KernelArg::Rbf => KernelKind::Rbf,
            KernelArg::Matern32 => KernelKind::Matern32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeanArg {
    Zero,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectArg {
    Loocv,
    Lml,
}

impl From<SelectArg> for SelectionCriterion {
    fn from(s: SelectArg) -> SelectionCriterion {
        match s {
            SelectArg::Loocv => SelectionCriterion::LoocvMae,
            SelectArg::Lml => SelectionCriterion::LogMarginalLikelihood,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Analytic,
    GpZero,
    GpAnalytic,
    Linreg,
}

impl From<MethodArg> for MethodId {
    fn from(m: MethodArg) -> MethodId {
        match m {
            MethodArg::Analytic => MethodId::AnalyticOnly,
            MethodArg::GpZero => MethodId::GpZeroMean,
            MethodArg::GpAnalytic => MethodId::GpAnalyticMean,
            MethodArg::Linreg => MethodId::LinearRegression,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Per-layer analytic latency breakdown and total for a network file
    Estimate {
        /// Network description: JSON array of layer objects
        #[arg(long)]
        network: PathBuf,
        /// Hardware description: JSON object with accelerator constants
        #[arg(long)]
        hw: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        /// Write output here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a deterministic synthetic profiling dataset (CSV)
    Synth {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 156)]
        count: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Hardware description JSON; defaults to the reference accelerator
        #[arg(long)]
        hw: Option<PathBuf>,
    },
    /// Grid-select hyperparameters and fit a GP latency model
    Fit {
        /// Training dataset CSV
        #[arg(long)]
        data: PathBuf,
        /// Output model path (JSON)
        #[arg(long)]
        model: PathBuf,
        /// Restrict the kernel menu to one kind
        #[arg(long, value_enum)]
        kernel: Option<KernelArg>,
        #[arg(long, value_enum, default_value_t = MeanArg::Analytic)]
        mean: MeanArg,
        /// Hyperparameter selection criterion
        #[arg(long, value_enum, default_value_t = SelectArg::Loocv)]
        select: SelectArg,
    },
    /// Predict latency mean and variance for each row of a dataset
    Predict {
        /// Input dataset CSV (the latency column is ignored)
        #[arg(long)]
        data: PathBuf,
        /// Fitted model path
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// LOOCV mean absolute error for one method
    Loocv {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Restrict the kernel menu for GP methods
        #[arg(long, value_enum)]
        kernel: Option<KernelArg>,
        #[arg(long, value_enum, default_value_t = SelectArg::Loocv)]
        select: SelectArg,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// LOOCV comparison of every method, ranked by MAE
    Compare {
        #[arg(long)]
        data: PathBuf,
        /// Restrict the kernel menu for GP methods
        #[arg(long, value_enum)]
        kernel: Option<KernelArg>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_samples(path: &PathBuf) -> Result<Vec<Sample>> {
    let samples = dataset::load_csv(path)?;
    if let Some(warning) = dataset::mixed_hardware_warning(&samples) {
        eprintln!("warning: {warning}");
    }
    Ok(samples)
}

fn grid_for(kernel: Option<KernelArg>) -> HyperGrid {
    match kernel {
        Some(k) => HyperGrid::default().with_kernel(k.into()),
        None => HyperGrid::default(),
    }
}

fn cmd_estimate(
    network: &PathBuf,
    hw: &PathBuf,
    format: OutputFormat,
    out: Option<&PathBuf>,
) -> Result<()> {
    let layers = persist::load_network_json(network)?;
    let hw = persist::load_hardware_json(hw)?;
    let net = network_latency(&layers, &hw)?;
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&net)? + "\n",
        OutputFormat::Csv => {
            let mut s =
                String::from("layer,t_weights_ms,t_data_ms,t_load_ms,t_compute_ms,t_store_ms,t_layer_ms\n");
            for (i, b) in net.per_layer.iter().enumerate() {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    i + 1,
                    b.t_weights,
                    b.t_data,
                    b.t_load,
                    b.t_compute,
                    b.t_store,
                    b.t_layer
                ));
            }
            s.push_str(&format!("total,,,,,,{}\n", net.total));
            s
        }
        OutputFormat::Text => {
            let mut s = format!(
                "{:>5} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
                "layer", "t_weights", "t_data", "t_load", "t_compute", "t_store", "t_layer"
            );
            for (i, b) in net.per_layer.iter().enumerate() {
                s.push_str(&format!(
                    "{:>5} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}\n",
                    i + 1,
                    b.t_weights,
                    b.t_data,
                    b.t_load,
                    b.t_compute,
                    b.t_store,
                    b.t_layer
                ));
            }
            s.push_str(&format!("total latency: {:.6} ms\n", net.total));
            s
        }
    };
    emit(&text, out)
}

fn cmd_synth(seed: u64, count: usize, out: &PathBuf, hw: Option<&PathBuf>) -> Result<()> {
    if count == 0 {
        return Err(LatGpError::Validation("count must be at least 1".into()));
    }
    let hw = match hw {
        Some(path) => persist::load_hardware_json(path)?,
        None => HardwareConfig::reference(),
    };
    let samples = dataset::generate_synthetic(seed, count, &hw, &Default::default());
    dataset::write_csv(out, &samples)?;
    println!("wrote {} samples to {}", samples.len(), out.display());
    Ok(())
}

fn cmd_fit(
    data: &PathBuf,
    model_path: &PathBuf,
    kernel: Option<KernelArg>,
    mean: MeanArg,
    select: SelectArg,
) -> Result<()> {
    let samples = load_samples(data)?;
    let mean_fn = match mean {
        MeanArg::Zero => MeanFn::Zero,
        MeanArg::Analytic => MeanFn::analytic_with_position_column(),
    };
    let grid = grid_for(kernel);
    let hypers = select_hyperparameters(&samples, &grid, mean_fn, select.into())?;

    let x = match mean_fn {
        MeanFn::Zero => dataset::feature_matrix(&samples),
        MeanFn::Analytic { .. } => dataset::feature_matrix_with_position(&samples),
    };
    let y = dataset::targets(&samples);
    let model = crate::gp::fit(&x, &y, hypers.kernel, mean_fn, hypers.noise_variance)?;
    persist::save_gp_model(model_path, &model)?;
    println!(
        "fitted {} samples; kernel {} lengthscale {} signal variance {:.6e} noise variance {:.6e}",
        samples.len(),
        hypers.kernel.kind.as_str(),
        hypers.kernel.lengthscale,
        hypers.kernel.signal_variance,
        hypers.noise_variance
    );
    println!("model written to {}", model_path.display());
    Ok(())
}

fn cmd_predict(
    data: &PathBuf,
    model_path: &PathBuf,
    format: OutputFormat,
    out: Option<&PathBuf>,
) -> Result<()> {
    let samples = load_samples(data)?;
    let model = persist::load_gp_model(model_path)?;
    let x: DMatrix<f64> = match model.mean() {
        MeanFn::Zero => dataset::feature_matrix(&samples),
        MeanFn::Analytic { .. } => dataset::feature_matrix_with_position(&samples),
    };
    let predictions = model.predict(&x)?;
    let text = match format {
        OutputFormat::Json => serde_json::to_string_pretty(&predictions)? + "\n",
        OutputFormat::Csv => {
            let mut s = String::from("row,mean_ms,variance_ms2\n");
            for (i, p) in predictions.iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", i, p.mean, p.variance));
            }
            s
        }
        OutputFormat::Text => {
            let mut s = format!("{:>5} {:>14} {:>14}\n", "row", "mean [ms]", "variance [ms2]");
            for (i, p) in predictions.iter().enumerate() {
                s.push_str(&format!("{:>5} {:>14.6} {:>14.6e}\n", i, p.mean, p.variance));
            }
            s
        }
    };
    emit(&text, out)
}

fn report_text(report: &EvalReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json() + "\n",
        OutputFormat::Csv => report.per_sample_csv(),
        OutputFormat::Text => report.text_table(),
    }
}

fn cmd_loocv(
    data: &PathBuf,
    method: MethodArg,
    kernel: Option<KernelArg>,
    select: SelectArg,
    format: OutputFormat,
    out: Option<&PathBuf>,
) -> Result<()> {
    let samples = load_samples(data)?;
    let method: MethodId = method.into();
    let entry = match method {
        MethodId::GpZeroMean => {
            let hypers =
                select_hyperparameters(&samples, &grid_for(kernel), MeanFn::Zero, select.into())?;
            loocv_mae(method, &samples, Some(&hypers))?
        }
        MethodId::GpAnalyticMean => {
            let hypers = select_hyperparameters(
                &samples,
                &grid_for(kernel),
                MeanFn::analytic_with_position_column(),
                select.into(),
            )?;
            loocv_mae(method, &samples, Some(&hypers))?
        }
        _ => loocv_mae(method, &samples, None)?,
    };
    let report = EvalReport { sample_count: samples.len(), methods: vec![entry] };
    emit(&report_text(&report, format), out)
}

fn cmd_compare(
    data: &PathBuf,
    kernel: Option<KernelArg>,
    format: OutputFormat,
    out: Option<&PathBuf>,
) -> Result<()> {
    let samples = load_samples(data)?;
    let report = compare_methods(&samples, &grid_for(kernel))?;
    emit(&report_text(&report, format), out)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate { network, hw, format, out } => {
            cmd_estimate(&network, &hw, format, out.as_ref())
        }
        Command::Synth { seed, count, out, hw } => cmd_synth(seed, count, &out, hw.as_ref()),
        Command::Fit { data, model, kernel, mean, select } => {
            cmd_fit(&data, &model, kernel, mean, select)
        }
        Command::Predict { data, model, format, out } => {
            cmd_predict(&data, &model, format, out.as_ref())
        }
        Command::Loocv { data, method, kernel, select, format, out } => {
            cmd_loocv(&data, method, kernel, select, format, out.as_ref())
        }
        Command::Compare { data, kernel, format, out } => {
            cmd_compare(&data, kernel, format, out.as_ref())
        }
    }
}

/// Parses arguments from the environment, runs the selected command and
/// returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}
