use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spectral_precision::cglasso::Variant;
use spectral_precision::cli::{
    benchmark_classo, estimate_file, run_experiment, simulate_panel, write_panel_csv, EstimateOptions, ExperimentConfig,
    FrequencySpec, LambdaGrid, LambdaSelection, MRule, Method, DEFAULT_VARIANT,
};
use spectral_precision::simulate::{DgpFamily, DgpSpec};
use spectral_precision::Result;

/// Sparse spectral precision estimation for multivariate time series.
#[derive(Parser)]
#[command(name = "specprec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a panel from a built-in process and write it as CSV.
    Simulate {
        #[arg(long, default_value = "white_noise")]
        dgp: DgpFamily,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the spectral precision of a CSV panel (n rows, p named columns).
    Estimate(EstimateArgs),
    /// Run a replicated simulation study.
    Experiment(ExperimentArgs),
    /// Time the complex lasso on the runtime design.
    Benchmark {
        #[arg(long, default_value_t = 50)]
        p: usize,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EstimateArgs {
    /// Input CSV with a header row of series names.
    input: PathBuf,
    /// Frequency in radians (`0`, `pi/2`) or a Fourier index (`j=300`).
    #[arg(long, default_value = "0")]
    freq: FrequencySpec,
    #[arg(long, default_value = "floor_sqrt_n")]
    m_rule: MRule,
    #[arg(long, default_value_t = DEFAULT_VARIANT)]
    variant: Variant,
    /// `ebic`, or a fixed penalty value.
    #[arg(long, default_value = "ebic")]
    lambda: LambdaSelection,
    /// Path grid as COUNT:DECADES.
    #[arg(long, default_value = "50:3")]
    lambda_grid: LambdaGrid,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Use the series as given instead of subtracting column means.
    #[arg(long)]
    no_center: bool,
    #[arg(long, default_value = "estimate")]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config; flags given on the command line override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dgp: Option<DgpFamily>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Repeatable; radians or `j=INDEX`.
    #[arg(long)]
    freq: Vec<FrequencySpec>,
    #[arg(long)]
    m_rule: Option<MRule>,
    /// Repeatable: cglasso, cglasso_I, cglasso_II, nodewise, inverse_periodogram.
    #[arg(long)]
    method: Vec<Method>,
    /// Shorthand for `--method` with a CGLASSO variant.
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    lambda_grid: Option<LambdaGrid>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.dgp {
            c.dgp = v;
        }
        if let Some(v) = self.p {
            c.p = v;
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        if !self.freq.is_empty() {
            c.frequencies = self.freq;
        }
        if let Some(v) = self.m_rule {
            c.m_rule = v;
        }
        let mut methods = self.method;
        methods.extend(self.variant.map(Method::Cglasso));
        if !methods.is_empty() {
            c.methods = methods;
        }
        if let Some(v) = self.lambda_grid {
            c.lambda_grid = v;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        if let Some(v) = self.replicates {
            c.replicates = v;
        }
        if let Some(v) = self.seed {
            c.base_seed = v;
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        if let Some(v) = self.out {
            c.output_dir = v;
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { dgp, p, n, seed, out } => {
            let panel = simulate_panel(&DgpSpec { family: dgp, p, n, seed })?;
            write_panel_csv(&panel, &out)?;
            eprintln!("wrote {} x {} panel to {}", panel.n(), panel.p(), out.display());
        }
        Command::Estimate(a) => {
            let opts = EstimateOptions {
                frequency: a.freq,
                m_rule: a.m_rule,
                variant: a.variant,
                selection: a.lambda,
                grid: a.lambda_grid,
                gamma: a.gamma,
                center: !a.no_center,
            };
            let report = estimate_file(&a.input, &opts, &a.out)?;
            eprintln!(
                "frequency index {} (omega = {:.6}), m = {}, lambda = {:.6e}, {} edges; results in {}",
                report.frequency.index,
                report.frequency.omega,
                report.m,
                report.lambda_selected,
                report.edges.len(),
                a.out.display()
            );
        }
        Command::Experiment(a) => {
            let config = a.into_config()?;
            let report = run_experiment(&config)?;
            for s in &report.summary {
                let show = |m: &spectral_precision::cli::MeanSd| match (m.mean, m.sd) {
                    (Some(mean), Some(sd)) => format!("{:.2} ({:.2})", 100.0 * mean, 100.0 * sd),
                    (Some(mean), None) => format!("{:.2}", 100.0 * mean),
                    _ => "-".into(),
                };
                println!(
                    "j={:<5} {:<20} rmse oracle {:<16} rmse bic {:<16} auroc {:<16} available {}/{}",
                    s.frequency_index,
                    s.method,
                    show(&s.rmse_oracle),
                    show(&s.rmse_bic),
                    show(&s.auroc),
                    s.available,
                    s.replicates
                );
            }
            eprintln!("results in {}", config.output_dir.display());
        }
        Command::Benchmark {
            p,
            n,
            replicates,
            seed,
            out,
        } => {
            let r = benchmark_classo(p, n, replicates, seed)?;
            println!(
                "classo p={} n={} over {} fits: mean {:.6} s, median {:.6} s, sd {:.6} s; max gap to oracle {:.2e}",
                r.p, r.n, r.replicates, r.mean, r.median, r.sd, r.oracle_max_diff
            );
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&r)?)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
