//! `qpurify` — sweeps, HOM scans and tomography from the command line.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qpurify::experiment::{
    emit, parse_grid, run_endtoend, run_ideal, write_csv, write_json, Format, GridPoint, Mode,
    RunConfig, RunRecord, DEFAULT_COUNTS, DEFAULT_SEED, DEFAULT_TRIALS, SEED_ENV,
};
use qpurify::optics::{hom_scan, BeamSplitterSpec};
use qpurify::qubit::{resolve, to_density, MixedQubit};
use qpurify::streams::Streams;
use qpurify::tomo::{measure_all, reconstruct, xi_estimate};
use qpurify::channel::{DEFAULT_FREQUENCY, DEFAULT_FREQUENCY_RATIO};
use qpurify::NamedState;

#[derive(Parser, Debug)]
#[command(name = "qpurify", version, about = "Symmetric-subspace purification of depolarized qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form gain, purified length, success probability and entropy gain.
    Ideal(SweepArgs),
    /// Full Monte Carlo: Pockels depolarizers, beam splitter, tomography.
    Endtoend(EndToEndArgs),
    /// Bunching and coincidence probabilities versus temporal overlap.
    Hom(HomArgs),
    /// Simulated Stokes tomography of one depolarized qubit (JSON).
    Tomo(TomoArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Input state: H, V, L, E, E:<theta> or "are,aim,bre,bim".
    #[arg(long, default_value = "H")]
    state: NamedState,
    /// Symmetric grid ξ = ζ = κ as lo:hi:step or a comma list.
    #[arg(long, conflicts_with_all = ["zeta", "kappa", "nu_a", "nu_b"])]
    xi_grid: Option<String>,
    /// Bloch length of photon a.
    #[arg(long, conflicts_with_all = ["nu_a", "nu_b"])]
    zeta: Option<f64>,
    /// Bloch length of photon b (defaults to ζ).
    #[arg(long, conflicts_with_all = ["nu_a", "nu_b"])]
    kappa: Option<f64>,
    /// Pockels duty cycle of photon a; ζ = 1 − 2ν.
    #[arg(long)]
    nu_a: Option<f64>,
    /// Pockels duty cycle of photon b (defaults to ν_a).
    #[arg(long)]
    nu_b: Option<f64>,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Data file; a `<out>.manifest.json` is written next to it. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BsArgs {
    /// Transmittance for H.
    #[arg(long, default_value_t = 0.5)]
    th: f64,
    /// Transmittance for V.
    #[arg(long, default_value_t = 0.5)]
    tv: f64,
    /// Temporal overlap V of the two photons.
    #[arg(long, default_value_t = 1.0)]
    overlap: f64,
}

#[derive(Args, Debug)]
struct EndToEndArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    bs: BsArgs,
    /// Photon pairs per grid point.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Tomography counts per measurement setting.
    #[arg(long, default_value_t = DEFAULT_COUNTS)]
    counts: u64,
    /// Drive frequency of the first Pockels cell pair (Hz).
    #[arg(long, default_value_t = DEFAULT_FREQUENCY)]
    freq: f64,
    /// Ratio of the second drive frequency to the first.
    #[arg(long, default_value_t = DEFAULT_FREQUENCY_RATIO)]
    freq_ratio: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct HomArgs {
    #[arg(long, default_value = "H")]
    state: NamedState,
    #[arg(long, default_value_t = 1.0)]
    zeta: f64,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    th: f64,
    #[arg(long, default_value_t = 0.5)]
    tv: f64,
    /// Overlaps to scan, lo:hi:step or a comma list.
    #[arg(long, default_value = "0:1:0.1")]
    overlap_grid: String,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TomoArgs {
    #[arg(long, default_value = "H")]
    state: NamedState,
    /// Bloch length of the measured qubit.
    #[arg(long, default_value_t = 1.0)]
    zeta: f64,
    #[arg(long, default_value_t = DEFAULT_COUNTS)]
    counts: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn grid_points(g: &GridArgs) -> AnyResult<Vec<GridPoint>> {
    if let Some(spec) = &g.xi_grid {
        return Ok(parse_grid(spec)?.into_iter().map(GridPoint::symmetric).collect());
    }
    if let Some(zeta) = g.zeta {
        return Ok(vec![GridPoint {
            zeta,
            kappa: g.kappa.unwrap_or(zeta),
        }]);
    }
    if let Some(kappa) = g.kappa {
        return Ok(vec![GridPoint { zeta: kappa, kappa }]);
    }
    match (g.nu_a, g.nu_b) {
        (Some(a), b) => Ok(vec![GridPoint::from_duty_cycles(a, b.unwrap_or(a))]),
        (None, Some(b)) => Ok(vec![GridPoint::from_duty_cycles(b, b)]),
        (None, None) => Ok(RunConfig::default_grid()),
    }
}

fn write_records(records: &[RunRecord], output: &OutputArgs, config: &RunConfig) -> AnyResult<()> {
    match &output.out {
        Some(path) => emit(records, output.format, path, config)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match output.format {
                Format::Csv => write_csv(records, &mut lock)?,
                Format::Json => {
                    write_json(records, &mut lock)?;
                    writeln!(lock)?;
                }
            }
        }
    }
    Ok(())
}

fn ideal(args: SweepArgs) -> AnyResult<()> {
    let mut config = RunConfig::new(args.grid.state, grid_points(&args.grid)?, Mode::Ideal);
    config.seed = args.grid.seed;
    let records = run_ideal(&config)?;
    write_records(&records, &args.output, &config)
}

fn endtoend(args: EndToEndArgs) -> AnyResult<()> {
    let mut config = RunConfig::new(args.grid.state, grid_points(&args.grid)?, Mode::EndToEnd);
    config.seed = args.grid.seed;
    config.trials = args.trials;
    config.counts_per_setting = args.counts;
    config.t_h = args.bs.th;
    config.t_v = args.bs.tv;
    config.overlap = args.bs.overlap;
    config.frequency = args.freq;
    config.frequency_ratio = args.freq_ratio;
    let records = run_endtoend(&config)?;
    write_records(&records, &args.output, &config)
}

#[derive(Serialize)]
struct HomRow {
    overlap: f64,
    bunched_prob: f64,
    cross_coincidence: f64,
}

fn hom(args: HomArgs) -> AnyResult<()> {
    let phi = resolve(&args.state)?;
    let rho_a = to_density(&MixedQubit::new(phi, args.zeta)?)?;
    let rho_b = to_density(&MixedQubit::new(phi, args.kappa.unwrap_or(args.zeta))?)?;
    let bs = BeamSplitterSpec::new(args.th, args.tv, 1.0)?;
    let overlaps = parse_grid(&args.overlap_grid)?;
    let rows: Vec<HomRow> = hom_scan(&rho_a, &rho_b, &bs, &overlaps)?
        .into_iter()
        .map(|p| HomRow {
            overlap: p.overlap,
            bunched_prob: p.bunched_prob,
            cross_coincidence: p.cross_coincidence,
        })
        .collect();
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(sink);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, &rows)?;
            writeln!(sink)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TomoReport {
    state: String,
    zeta: f64,
    counts: u64,
    seed: u64,
    stokes: [f64; 3],
    raw_stokes: [f64; 3],
    std_errors: [f64; 3],
    /// Row-major `[re, im]` pairs.
    rho_hat: [[[f64; 2]; 2]; 2],
    xi_hat: f64,
    std_err: f64,
}

fn tomo(args: TomoArgs) -> AnyResult<()> {
    let phi = resolve(&args.state)?;
    let rho = to_density(&MixedQubit::new(phi, args.zeta)?)?;
    let records = measure_all(&rho, args.counts, &Streams::new(args.seed).child("tomo"))?;
    let result = reconstruct(&records)?;
    let (xi_hat, std_err) = xi_estimate(&result, &phi);
    let mut rho_hat = [[[0.0; 2]; 2]; 2];
    for (i, row) in rho_hat.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let z = result.rho_hat.get(i, j);
            *entry = [z.re, z.im];
        }
    }
    let report = TomoReport {
        state: args.state.label(),
        zeta: args.zeta,
        counts: args.counts,
        seed: args.seed,
        stokes: result.stokes,
        raw_stokes: result.raw_stokes,
        std_errors: result.std_errors,
        rho_hat,
        xi_hat,
        std_err,
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer_pretty(&mut lock, &report)?;
    writeln!(lock)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ideal(a) => ideal(a),
        Command::Endtoend(a) => endtoend(a),
        Command::Hom(a) => hom(a),
        Command::Tomo(a) => tomo(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qpurify: {e}");
            ExitCode::FAILURE
        }
    }
}
