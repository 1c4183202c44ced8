use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qsvm::anneal::{export_qubo, AnnealSchedule};
use qsvm::data::{load_wdbc, Dataset, Preprocessor};
use qsvm::experiment::{
    prepare_data, rank_kernels, run_grid, run_train, ExperimentConfig, GridRow, KernelCell,
    KernelChoice,
};
use qsvm::featuremaps::FeatureMapKind;
use qsvm::qubo::build_qubo;
use qsvm::svm::{Metrics, SvmModel};

/// Qubit cap applied when `--allow-large` is given.
const LARGE_QUBIT_CAP: usize = 40;

#[derive(Parser)]
#[command(name = "qsvm", version, about = "Quantum-kernel SVMs trained as QUBO problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank kernel configurations by kernel-target alignment on the training split.
    Kta {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        allow_large: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train a model and write it with a JSON report.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value = "model.json")]
        model: PathBuf,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the training QUBO.
        #[arg(long)]
        export_qubo: Option<PathBuf>,
        /// Also write the training Gram matrix as CSV.
        #[arg(long)]
        kernel_csv: Option<PathBuf>,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Print decision values and labels for every row of a data file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "data/wdbc.csv")]
        data: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Confusion matrix, per-class scores and macro F1 of a saved model.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Rows to score, reproduced from the subsample/split flags.
        #[arg(long, value_enum, default_value_t = SplitChoice::All)]
        split: SplitChoice,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train and evaluate every kernel configuration and C value.
    Grid {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// `.csv` writes CSV, anything else JSON; stdout (JSON) when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Write the training QUBO without solving it.
    ExportQubo {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        kernel: KernelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, default_value = "data/wdbc.csv")]
    data: PathBuf,
    #[arg(long, default_value_t = 140)]
    subsample_size: usize,
    /// Number of prime seeds tried when drawing the subsample.
    #[arg(long, default_value_t = 10_000)]
    seeds_count: usize,
    #[arg(long, default_value_t = 0.25)]
    test_fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelKind::Quantum)]
    kernel: KernelKind,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    qubits: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "z")]
    feature_map: Vec<FeatureMapKind>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    reps: Vec<usize>,
    /// RBF width; defaults to 1/q.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_delimiter = ',', default_value = "63")]
    c_value: Vec<u64>,
    #[arg(long, default_value_t = 1.0)]
    penalty: f64,
    /// Drop the bias and its equality-constraint penalty.
    #[arg(long)]
    no_bias: bool,
    #[arg(long, default_value_t = 2000)]
    sa_sweeps: usize,
    #[arg(long, default_value_t = 8)]
    sa_restarts: usize,
    #[arg(long, default_value_t = 0.1)]
    sa_beta_start: f64,
    #[arg(long, default_value_t = 10.0)]
    sa_beta_end: f64,
    #[arg(long)]
    allow_large: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    Quantum,
    Linear,
    Rbf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SplitChoice {
    Train,
    Test,
    All,
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

impl KernelArgs {
    fn cells(&self) -> Vec<KernelCell> {
        match self.kernel {
            KernelKind::Quantum => KernelCell::quantum_grid(&self.qubits, &self.feature_map, &self.reps),
            KernelKind::Linear | KernelKind::Rbf => self
                .qubits
                .iter()
                .map(|&qubits| KernelCell {
                    qubits,
                    kernel: self.classical(),
                })
                .collect(),
        }
    }

    fn classical(&self) -> KernelChoice {
        match self.kernel {
            KernelKind::Rbf => KernelChoice::Rbf { gamma: self.gamma },
            _ => KernelChoice::Linear,
        }
    }

    fn single(&self) -> CliResult<KernelCell> {
        match self.cells().as_slice() {
            [cell] => Ok(*cell),
            cells => Err(usage(anyhow!(
                "expected a single kernel configuration, the qubit/feature-map/reps lists give {}",
                cells.len()
            ))),
        }
    }
}

fn config(data: &DataArgs, solver: Option<&SolverArgs>, allow_large: bool) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        subsample_size: data.subsample_size,
        seeds_count: data.seeds_count,
        seed: data.seed,
        test_fraction: data.test_fraction,
        schedule: AnnealSchedule::default().with_seed(data.seed),
        ..ExperimentConfig::default()
    };
    if let Some(s) = solver {
        cfg.c_value = s.c_value.first().copied().unwrap_or(cfg.c_value);
        cfg.penalty = s.penalty;
        cfg.use_bias = !s.no_bias;
        cfg.schedule = AnnealSchedule {
            sweeps: s.sa_sweeps,
            beta_start: s.sa_beta_start,
            beta_end: s.sa_beta_end,
            restarts: s.sa_restarts,
            seed: data.seed,
        };
    }
    if allow_large {
        cfg.max_qubits = LARGE_QUBIT_CAP;
    }
    cfg
}

fn with_cell(mut cfg: ExperimentConfig, cell: KernelCell) -> ExperimentConfig {
    cfg.qubits = cell.qubits;
    cfg.kernel = cell.kernel;
    cfg
}

fn load(path: &Path) -> CliResult<Dataset> {
    if !path.is_file() {
        return Err(usage(anyhow!("data file {} does not exist", path.display())));
    }
    load_wdbc(path)
        .with_context(|| format!("loading {}", path.display()))
        .map_err(Failure::Runtime)
}

fn validate(cfg: &ExperimentConfig) -> CliResult<()> {
    cfg.validate().map_err(usage)
}

/// Config errors in any sweep cell are usage errors; cells over the qubit
/// cap are left to the sweep, which records them as skipped.
fn validate_cells(cfg: &ExperimentConfig, cells: &[KernelCell], c_values: &[u64]) -> CliResult<()> {
    if cells.is_empty() || c_values.is_empty() {
        return Err(usage(anyhow!("sweep ranges must be nonempty")));
    }
    for cell in cells {
        for &c_value in c_values {
            let cell_cfg = ExperimentConfig {
                c_value,
                ..with_cell(cfg.clone(), *cell)
            };
            match cell_cfg.validate() {
                Ok(()) | Err(qsvm::Error::Resource(_)) => {}
                Err(e) => return Err(usage(e)),
            }
        }
    }
    Ok(())
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Runtime),
        None => {
            let mut out = io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    Err(Failure::Runtime(anyhow::Error::new(e).context("writing stdout")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("qubits,kernel,reps,c_value,qubo_vars,kta,macro_f1,accuracy,energy,constraint_residual,status\n");
    for r in rows {
        let (kernel, reps) = match r.kernel {
            KernelChoice::Quantum {
                feature_map,
                repetitions,
            } => (feature_map.to_string(), repetitions.to_string()),
            KernelChoice::Linear => ("linear".to_string(), String::new()),
            KernelChoice::Rbf { .. } => ("rbf".to_string(), String::new()),
        };
        let status: String = r.status.clone().into();
        out.push_str(&format!(
            "{},{kernel},{reps},{},{},{},{},{},{},{},{status}\n",
            r.qubits,
            r.c_value,
            r.qubo_vars,
            opt(r.kta),
            opt(r.macro_f1),
            opt(r.accuracy),
            opt(r.energy),
            opt(r.constraint_residual),
        ));
    }
    out
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Kta {
            data,
            kernel,
            allow_large,
            output,
        } => {
            let cfg = config(&data, None, allow_large);
            let cells = kernel.cells();
            validate_cells(&cfg, &cells, &[cfg.c_value])?;
            let full = load(&data.data)?;
            let (summary, rows) = rank_kernels(&full, &cfg, &cells).context("kernel alignment")?;
            emit(output.as_deref(), &to_json(&json!({ "data": summary, "rows": rows })))
        }
        Command::Train {
            data,
            kernel,
            solver,
            model,
            output,
            export_qubo: qubo_path,
            kernel_csv,
            no_timestamp,
        } => {
            if solver.c_value.len() != 1 {
                return Err(usage(anyhow!("train takes a single --c-value")));
            }
            let cfg = with_cell(config(&data, Some(&solver), solver.allow_large), kernel.single()?);
            validate(&cfg)?;
            let full = load(&data.data)?;
            let (trained, report) = run_train(&full, &cfg, !no_timestamp).context("training")?;
            trained
                .save(&model)
                .with_context(|| format!("writing model {}", model.display()))?;
            if qubo_path.is_some() || kernel_csv.is_some() {
                let gram = training_gram(&full, &cfg).context("training kernel")?;
                if let Some(path) = qubo_path {
                    write_qubo(&full, &cfg, &gram, &path)?;
                }
                if let Some(path) = kernel_csv {
                    fs::write(&path, gram.to_csv())
                        .with_context(|| format!("writing {}", path.display()))?;
                }
            }
            emit(output.as_deref(), &to_json(&report))
        }
        Command::Predict {
            model,
            data,
            output,
        } => {
            let model = SvmModel::load(&model).context("loading model")?;
            let ds = load(&data)?;
            let values = model
                .decision_values(ds.features().view())
                .context("prediction")?;
            let rows: Vec<_> = values
                .iter()
                .zip(ds.source_ids())
                .map(|(&f, id)| json!({ "id": id, "decision_value": f, "label": qsvm::svm::sign(f) }))
                .collect();
            emit(output.as_deref(), &to_json(&rows))
        }
        Command::Evaluate {
            model,
            data,
            split,
            output,
        } => {
            let model = SvmModel::load(&model).context("loading model")?;
            let full = load(&data.data)?;
            let rows = if split == SplitChoice::All {
                full
            } else {
                let cfg = config(&data, None, false);
                let prepared = prepare_data(&full, &cfg).context("subsample and split")?;
                if split == SplitChoice::Train {
                    prepared.train
                } else {
                    prepared.test
                }
            };
            let metrics: Metrics = model.evaluate(&rows).context("evaluation")?;
            emit(output.as_deref(), &to_json(&metrics))
        }
        Command::Grid {
            data,
            kernel,
            solver,
            output,
            no_timestamp: _,
        } => {
            let cfg = config(&data, Some(&solver), solver.allow_large);
            let cells = kernel.cells();
            validate_cells(&cfg, &cells, &solver.c_value)?;
            let full = load(&data.data)?;
            let (summary, rows) =
                run_grid(&full, &cfg, &cells, &solver.c_value).context("grid sweep")?;
            let text = match &output {
                Some(path) if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) => {
                    grid_csv(&rows)
                }
                _ => to_json(&json!({ "config": cfg, "data": summary, "rows": rows })),
            };
            emit(output.as_deref(), &text)
        }
        Command::ExportQubo {
            data,
            kernel,
            solver,
            output,
        } => {
            if solver.c_value.len() != 1 {
                return Err(usage(anyhow!("export-qubo takes a single --c-value")));
            }
            let cfg = with_cell(config(&data, Some(&solver), solver.allow_large), kernel.single()?);
            validate(&cfg)?;
            let full = load(&data.data)?;
            let gram = training_gram(&full, &cfg).context("training kernel")?;
            write_qubo(&full, &cfg, &gram, &output)
        }
    }
}

fn training_gram(full: &Dataset, cfg: &ExperimentConfig) -> qsvm::Result<qsvm::kernel::KernelMatrix> {
    let data = prepare_data(full, cfg)?;
    let pre = Preprocessor::fit(&data.train, cfg.qubits)?;
    let x = pre.transform(data.train.features().view())?;
    cfg.kernel.resolve(cfg.qubits)?.gram(x.view(), &cfg.simulator())
}

fn write_qubo(
    full: &Dataset,
    cfg: &ExperimentConfig,
    gram: &qsvm::kernel::KernelMatrix,
    path: &Path,
) -> CliResult<()> {
    let data = prepare_data(full, cfg).context("subsample and split")?;
    let penalty = if cfg.use_bias { cfg.penalty } else { 0.0 };
    let problem = build_qubo(gram, data.train.labels(), cfg.c_value, penalty).context("QUBO")?;
    export_qubo(&problem, path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Runtime)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
