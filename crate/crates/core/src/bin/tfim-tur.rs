use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use tfim_tur::error::{Error, Result};
use tfim_tur::experiment::{
    count_by_estimator, emit_plotdata_for, read_results, run_experiment, ConfigFile, ExperimentConfig, Family,
    Overrides, RESULTS_FILE,
};
use tfim_tur::lattice::{circuit_cost, graph_diameter, heavy_hex_fragment, heavy_hex_layout, N_LAYOUTS};
use tfim_tur::oracle::exact_tpm_distribution;
use tfim_tur::protocol::DriveParams;
use tfim_tur::workstats::{tur_check, EstimatorTag};

#[derive(Parser)]
#[command(name = "tfim-tur", version, about = "Work statistics and TUR checks for a driven transverse-field Ising model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write results.csv and manifest.json.
    Run(RunArgs),
    /// Turn a results.csv into per-panel plot data.
    Plotdata(PlotArgs),
    /// Print gate counts and depth of the drive circuit.
    Cost(CostArgs),
    /// Exact work moments of one small instance.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples_in: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<EstimatorTag>>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    max_statevector_qubits: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Run directory holding results.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "scan")]
    family: Family,
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<EstimatorTag>>,
}

#[derive(Args)]
struct CostArgs {
    /// Heavy-hex layout index.
    #[arg(long, default_value_t = N_LAYOUTS)]
    layout: usize,
    /// Trotter steps; defaults to the graph diameter.
    #[arg(long)]
    n_trotter: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 6)]
    n_spin: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 10)]
    n_trotter: usize,
    /// Use the continuum-time evolution instead of the Trotter circuit.
    #[arg(long)]
    continuum: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let ov = Overrides {
        family: args.family,
        seed: args.seed,
        shots: args.shots,
        out: args.out,
        samples_in: args.samples_in,
        estimators: args.estimators,
        delta: args.delta,
        max_statevector_qubits: args.max_statevector_qubits,
    };
    let cfg = ExperimentConfig::resolve(file, ov)?;
    let rows = run_experiment(&cfg)?;
    for (tag, n) in count_by_estimator(&rows) {
        info!("{tag}: {n} rows");
    }
    println!("{}", cfg.out.join(RESULTS_FILE).display());
    Ok(())
}

fn plotdata(args: PlotArgs) -> Result<()> {
    let rows = read_results(&args.out.join(RESULTS_FILE))?;
    let tags = args.estimators.unwrap_or_else(|| EstimatorTag::ALL.to_vec());
    for path in emit_plotdata_for(&rows, args.family, &args.out.join("plotdata"), &tags)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn cost(args: CostArgs) -> Result<()> {
    let g = heavy_hex_layout(args.layout)?;
    let n_trotter = match args.n_trotter {
        Some(n) => n,
        None => graph_diameter(&g)?,
    };
    let report = circuit_cost(&g, n_trotter)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let g = heavy_hex_fragment(args.n_spin)?;
    let p = DriveParams::new(args.beta, args.tau, args.gamma, args.n_trotter)?;
    let stats = exact_tpm_distribution(&g, &p, args.continuum)?.moments();
    let tur = tur_check(&stats, args.beta)?;
    let out = serde_json::json!({
        "n_spin": args.n_spin,
        "n_edges": g.n_edges(),
        "beta": args.beta,
        "tau": args.tau,
        "gamma": args.gamma,
        "n_T": args.n_trotter,
        "continuum": args.continuum,
        "mean_W": stats.mean,
        "var_W": stats.variance,
        "tur": tur,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_resource_cap() => 3,
        Error::Config(_) | Error::InvalidParameter(_) | Error::InvalidGraph(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Plotdata(a) => plotdata(a),
        Command::Cost(a) => cost(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
