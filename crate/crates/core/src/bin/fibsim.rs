use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fibsim_core::anyon::{check_consistency, CONSISTENCY_TOLERANCE};
use fibsim_core::decoder::{Decoder, DecoderParams};
use fibsim_core::lattice::{Lattice, OWNED_DIRECTIONS};
use fibsim_core::noise::Syndrome;
use fibsim_core::sim::{
    fit_powerlaw, mean_lifetimes, read_records, run_batch, run_sample_traced, sweep, write_aggregate_file,
    write_records, write_records_file, SimulationConfig, SweepConfig,
};
use fibsim_core::state::SystemState;
use fibsim_core::verifier::GrowthSchedule;
use fibsim_core::Result;

#[derive(Parser)]
#[command(name = "fibsim", version, about = "Fibonacci-anyon memory lifetimes under a cellular-automaton decoder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of samples at one parameter point.
    Run(RunArgs),
    /// Run a grid of batches described by a JSON file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit lifetime ~ p^(-a) to a per-sample CSV.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        pmax: f64,
    },
    /// Quick internal consistency checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long = "L", default_value_t = 9)]
    size: usize,
    #[arg(long = "Q", default_value_t = 3)]
    colony: usize,
    #[arg(long = "b", default_value_t = 7)]
    base: u64,
    #[arg(long = "fc", default_value_t = 0.7)]
    f_target: f64,
    #[arg(long = "fn", default_value_t = 0.2)]
    f_neighbor: f64,
    #[arg(long)]
    p: f64,
    /// Defaults to p.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "Delta", default_value_t = 1.0)]
    gap: f64,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-steps", default_value_t = 10_000_000)]
    max_steps: u64,
    #[arg(long = "max-group", default_value_t = 40)]
    max_group: usize,
    #[arg(long)]
    instantaneous: bool,
    /// Verifier growth schedule.
    #[arg(long, value_enum, default_value_t = Growth::Doubling)]
    growth: Growth,
    /// Per-sample CSV; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregate JSON; defaults to the CSV path with a .json extension.
    #[arg(long)]
    aggregate: Option<PathBuf>,
    /// Decoder trace of the first sample as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Growth {
    Doubling,
    Linear,
}

impl RunArgs {
    fn config(&self) -> SimulationConfig {
        SimulationConfig {
            size: self.size,
            colony: self.colony,
            base: self.base,
            f_target: self.f_target,
            f_neighbor: self.f_neighbor,
            p: self.p,
            q: self.q.unwrap_or(self.p),
            gap: self.gap,
            instantaneous: self.instantaneous,
            max_group: self.max_group,
            max_steps: self.max_steps,
            samples: self.samples,
            base_seed: self.seed,
            growth: match self.growth {
                Growth::Doubling => GrowthSchedule::Doubling,
                Growth::Linear => GrowthSchedule::Linear,
            },
            output: self.out.clone(),
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = args.config();
    cfg.validate()?;
    if let Some(path) = &args.trace {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        run_sample_traced(&cfg, cfg.base_seed, Some(&mut f))?;
        f.flush()?;
    }
    let batch = run_batch(&cfg)?;
    match &args.out {
        Some(path) => {
            write_records_file(path, &cfg, &batch.records)?;
            let json = args.aggregate.clone().unwrap_or_else(|| path.with_extension("json"));
            write_aggregate_file(&json, &batch.aggregate)?;
        }
        None => write_records(std::io::stdout().lock(), &cfg, &batch.records)?,
    }
    if let Some(path) = &args.aggregate {
        if args.out.is_none() {
            write_aggregate_file(path, &batch.aggregate)?;
        }
    }
    let a = &batch.aggregate;
    eprintln!(
        "L={} p={} q={} samples={} mean={:.3} stderr={:.3} censored={:.3} 1/p={:.1}",
        cfg.size, cfg.p, cfg.q, a.samples, a.mean, a.stderr, a.censored_fraction, a.t1_baseline
    );
    Ok(())
}

fn fit(input: PathBuf, pmax: f64) -> Result<()> {
    let rows = read_records(&input)?;
    for (size, points) in mean_lifetimes(&rows, pmax) {
        let fit = fit_powerlaw(&points)?;
        println!("{}", serde_json::json!({ "L": size, "points": points, "a": fit.exponent, "logPrefactor": fit.log_prefactor, "residuals": fit.residuals }));
    }
    Ok(())
}

fn selftest() -> Result<bool> {
    let mut ok = true;
    let mut report = |name: &str, pass: bool, detail: String| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };
    let c = check_consistency();
    report("algebra", c.passes(CONSISTENCY_TOLERANCE), format!("max residual {:.2e}", c.max_residual()));

    // every single pair-creation error on L = 9 is removed within one work period
    let lattice = Lattice::new(9, 3)?;
    let params = DecoderParams::default();
    let mut failures = 0;
    for tile in lattice.tiles() {
        for dir in OWNED_DIRECTIONS {
            let mut state = SystemState::new(lattice, 40);
            let mut decoder = Decoder::new(lattice, params)?;
            let mut rng = ChaCha8Rng::seed_from_u64(lattice.index(tile) as u64);
            state.create_pair(tile, dir, &mut rng)?;
            let mut cleared = false;
            for t in 1..=params.work_period() {
                let syndrome = Syndrome { reported: state.occupation() };
                if decoder.step(&mut state, &syndrome, t, &mut rng).is_err() {
                    break;
                }
                if state.is_vacuum() {
                    cleared = true;
                    break;
                }
            }
            failures += !cleared as usize;
        }
    }
    report("single-pair decoding", failures == 0, format!("{failures} of {} placements not cleared", lattice.edge_count()));
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Sweep { config } => SweepConfig::from_file(&config).and_then(|c| sweep(&c)).map(|rows| {
            eprintln!("{} sweep points written", rows.len());
            true
        }),
        Command::Fit { input, pmax } => fit(input, pmax).map(|_| true),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
