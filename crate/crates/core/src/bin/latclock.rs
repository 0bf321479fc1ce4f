use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use latclock::commands::{run, Command, RunOptions};
use latclock::scenario::load_scenario;
use latclock::stability::TauGrid;
use latclock::Error;

/// Optical lattice clock simulator.
#[derive(Parser)]
#[command(name = "latclock", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the preparation chain: slower, MOT stages, lattice loading, hold.
    Prep(Common),
    /// Scan the clock transition and write the spectrum.
    Scan(Common),
    /// Lock a noisy oscillator to the atoms.
    Lock(Common),
    /// Overlapping Allan deviation of a simulated or recorded trace.
    Allan(Common),
    /// Systematic shift and uncertainty budget.
    Budget(Common),
    /// Compare two clocks (simulated, or two recorded traces).
    Compare(Common),
    /// Search for the clock line with chirped probe sweeps.
    Search(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario name.
    #[arg(long, default_value = "sr-breadboard")]
    scenario: String,
    /// Scenario file; the built-in scenarios are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Averaging times: `octave` or a comma-separated list in seconds.
    #[arg(long, default_value = "octave")]
    taus: TauGrid,
    /// Input trace CSV (repeat for `compare`).
    #[arg(long)]
    input: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::Prep(c) => (Command::Prep, c),
        Cmd::Scan(c) => (Command::Scan, c),
        Cmd::Lock(c) => (Command::Lock, c),
        Cmd::Allan(c) => (Command::Allan, c),
        Cmd::Budget(c) => (Command::Budget, c),
        Cmd::Compare(c) => (Command::Compare, c),
        Cmd::Search(c) => (Command::Search, c),
    };
    match execute(cmd, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("latclock: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cmd: Command, c: Common) -> Result<(), Error> {
    let mut scenario = load_scenario(c.config.as_deref(), &c.scenario)?;
    if let Some(seed) = c.seed {
        scenario = scenario.with_seed(seed);
    }
    let opts = RunOptions {
        out: c.out,
        taus: c.taus,
        inputs: c.input,
    };
    let manifest = run(cmd, &scenario, &opts)?;
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    for f in &manifest.files {
        println!("{}", opts.out.join(f).display());
    }
    Ok(())
}
