use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use costblend::costgen;
use costblend::harness::{self, AlgorithmSpec, CostKind, ExperimentConfig, Format};
use costblend::io;
use costblend::par::{self, ExecMode};
use costblend::reductions::Algorithm;

#[derive(Parser)]
#[command(name = "costblend", version, about = "Soft cost-sensitive multiclass classification experiments")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    #[value(name = "json-like", alias = "json")]
    JsonLike,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Table => Format::Table,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::JsonLike => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenType {
    Inconsistent,
    Consistent,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Column to emphasize (1-based), overriding the config.
        #[arg(long)]
        emphasize_class: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random cost matrix from a dataset's class counts.
    GenCost {
        #[arg(long = "type", value_enum)]
        kind: GenType,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test cost and error of a soft algorithm for each alpha.
    SweepAlpha {
        #[arg(long)]
        algo: String,
        #[arg(long)]
        data: PathBuf,
        /// Base config for costs, grids and runs; the dataset and algorithm
        /// come from the flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Cost matrix file; otherwise the config's cost source.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
    },
}

fn emit_sweep(points: &[harness::AlphaPoint], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(points).expect("serializes") + "\n",
        Format::Csv => {
            let mut out = String::from("alpha,cost_mean,cost_stderr,error_mean,error_stderr\n");
            for p in points {
                out += &format!("{},{},{},{},{}\n", p.alpha, p.cost.mean, p.cost.stderr, p.error.mean, p.error.stderr);
            }
            out
        }
        Format::Table => {
            let mut out = format!("{:>6}  {:>22}  {:>22}\n", "alpha", "test cost", "test error");
            for p in points {
                out += &format!(
                    "{:>6.2}  {:>11.6} ± {:<8.6}  {:>11.6} ± {:<8.6}\n",
                    p.alpha, p.cost.mean, p.cost.stderr, p.error.mean, p.error.stderr
                );
            }
            out
        }
    }
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let format = Format::from(cli.format);
    match cli.command {
        Command::Run { config, emphasize_class, out } => {
            let mut config = ExperimentConfig::load(&config)?;
            if emphasize_class.is_some() {
                config.cost.emphasize_class = emphasize_class;
            }
            config.validate()?;
            let report = harness::run_experiment(&config)?;
            write_output(out.as_ref(), &harness::emit_report(&report, format))
        }
        Command::GenCost { kind, data, seed, out } => {
            let data = io::read_dataset(&data)?;
            let counts = data.class_counts();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let matrix = match kind {
                GenType::Inconsistent => costgen::gen_inconsistent(&counts, &mut rng)?,
                GenType::Consistent => {
                    let (m, w) = costgen::gen_consistent(&counts, &mut rng)?;
                    let weights: Vec<String> = w.as_slice().iter().map(|x| x.to_string()).collect();
                    println!("weights: {}", weights.join(","));
                    m
                }
            };
            io::write_cost_matrix(&out, &matrix)?;
            Ok(())
        }
        Command::SweepAlpha { algo, data, config, matrix, runs, seed, alphas } => {
            let algorithm = Algorithm::parse(&algo.to_ascii_lowercase())?;
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::new(&data, vec![AlgorithmSpec::soft(algorithm)]),
            };
            cfg.dataset = data;
            cfg.algorithms = vec![AlgorithmSpec::soft(algorithm)];
            if let Some(m) = matrix {
                cfg.cost.source = CostKind::Matrix;
                cfg.cost.matrix = Some(m);
            }
            if let Some(r) = runs {
                cfg.runs = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(a) = alphas {
                cfg.alpha_grid = a;
            }
            cfg.validate()?;
            let dataset = io::read_dataset(&cfg.dataset)?;
            let points = harness::sweep_alpha(&cfg, &dataset, algorithm, ExecMode::default())?;
            print!("{}", emit_sweep(&points, format));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    let threads = cli.threads;
    match par::with_threads(threads, || execute(cli).map_err(|e| format!("{e:#}"))) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
