use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eustat::{parse_config, run, Command, ErrorRecord};

#[derive(Parser)]
#[command(name = "eustat", version, about = "Ensemble experiments for 2D Euler and Navier-Stokes vorticity")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, env = "EUSTAT_JOBS")]
    jobs: Option<usize>,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single trajectory plus a priori diagnostics.
    Simulate(Common),
    /// Push-forward ensemble, manifest and snapshots.
    Ensemble(Common),
    /// Statistical energy, vorticity and Foias-Liouville verdicts.
    Verify(Common),
    /// Foias-Liouville residual against save-time spacing.
    FoiasLiouville(Common),
    /// Distances of viscous ensembles to the Euler ensemble.
    InviscidLimit(Common),
    /// Cauchy gaps under mollification.
    UniquenessProbe(Common),
    /// Resolved configuration and derived constants.
    Info(Common),
}

fn fail(record: ErrorRecord) -> ExitCode {
    eprintln!("{}", record.to_json_line());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Ensemble(c) => (Command::Ensemble, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::FoiasLiouville(c) => (Command::FoiasLiouville, c),
        Cmd::InviscidLimit(c) => (Command::InviscidLimit, c),
        Cmd::UniquenessProbe(c) => (Command::UniquenessProbe, c),
        Cmd::Info(c) => (Command::Info, c),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => return fail((&eustat_core::Error::from(e)).into()),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail((&e).into()),
    };
    if let Some(seed) = common.seed {
        cfg.measure.master_seed = seed;
    }
    let out = common.out.unwrap_or_else(|| PathBuf::from(&cfg.io.output_dir));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = common.jobs {
        pool = pool.num_threads(k);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            return fail(ErrorRecord {
                code: "ThreadPool".into(),
                module: "experiment-cli".into(),
                message: e.to_string(),
            })
        }
    };
    match pool.install(|| run(&cfg, cmd, &out)) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail((&e).into()),
    }
}
