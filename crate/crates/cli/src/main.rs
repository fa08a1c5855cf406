//! `diracwell`: reproducible sweeps over the Dirac square well.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_file, RunConfig};

#[derive(Parser)]
#[command(name = "diracwell", version, about = "Bound states, phase shifts, vacuum charge and pair emission for the 1D Dirac square well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bound states at V and level curves over [v_min, v_max].
    Spectrum,
    /// Critical depths and level transitions.
    Critical,
    /// Phase shifts δ±(ε) on a log grid.
    Phase,
    /// Transmission resonances in [e_lo, e_hi].
    Resonances,
    /// Time delay of resonance n.
    Delay,
    /// Levinson check on random subcritical wells.
    Levinson,
    /// Vacuum charge over a depth sweep.
    Charge,
    /// Delta-potential closed forms against the thin-well limit.
    Delta,
    /// Positron spectrum and charge ledger for a switch across criticality.
    Emit,
    /// Run the acceptance checks.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Critical => "critical",
            Command::Phase => "phase",
            Command::Resonances => "resonances",
            Command::Delay => "delay",
            Command::Levinson => "levinson",
            Command::Charge => "charge",
            Command::Delta => "delta",
            Command::Emit => "emit",
            Command::Verify => "verify",
        }
    }

    fn module(self) -> &'static str {
        match self {
            Command::Spectrum | Command::Critical => "spectrum",
            Command::Phase | Command::Resonances | Command::Delay => "scattering",
            Command::Levinson | Command::Charge => "levinson",
            Command::Delta => "delta_oracle",
            Command::Emit => "emission",
            Command::Verify => "acceptance",
        }
    }
}

#[derive(Args, Default, Clone)]
pub struct Flags {
    /// Plain-text `key = value` configuration; flags take precedence.
    #[arg(long, global = true)]
    config: Option<String>,
    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long = "V", global = true)]
    v: Option<f64>,
    #[arg(long, global = true)]
    v_min: Option<f64>,
    #[arg(long, global = true)]
    v_max: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    eps_max: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    e_lo: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    e_hi: Option<f64>,
    /// Resonance index.
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true)]
    draws: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Residual tolerance for the Levinson report.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Fractional distance of both depths from the critical one.
    #[arg(long, global = true)]
    band: Option<f64>,
    /// Box half-length.
    #[arg(long = "L", global = true)]
    half_length: Option<f64>,
    /// vacant or filled.
    #[arg(long, global = true)]
    occupation: Option<String>,
    /// Comma-separated couplings.
    #[arg(long, global = true)]
    lambdas: Option<String>,
    /// Comma-separated criterion numbers.
    #[arg(long, global = true)]
    criteria: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, short, global = true)]
    output: Option<String>,
    /// Also write a gnuplot script next to the output file.
    #[arg(long, global = true)]
    gnuplot: bool,
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.flags.config {
        Some(path) => match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| parse_file(&t)) {
            Ok(f) => f,
            Err(e) => return usage(&format!("{path}: {e}")),
        },
        None => Default::default(),
    };
    let cfg = match RunConfig::resolve(cli.command.name(), &cli.flags, &file) {
        Ok(c) => c,
        Err(e) => return usage(&e),
    };
    if let Some(n) = std::env::var("DIRACWELL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Critical => commands::critical(&cfg),
        Command::Phase => commands::phase(&cfg),
        Command::Resonances => commands::resonances(&cfg),
        Command::Delay => commands::delay(&cfg),
        Command::Levinson => commands::levinson(&cfg),
        Command::Charge => commands::charge(&cfg),
        Command::Delta => commands::delta(&cfg),
        Command::Emit => commands::emit(&cfg),
        Command::Verify => commands::verify(&cfg),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error[{}]: {e}", cli.command.module());
            return ExitCode::from(1);
        }
    };
    let text = output::render(&cfg, &report);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error[io]: {path}: {e}");
                return ExitCode::from(1);
            }
            if cfg.gnuplot {
                let script = output::gnuplot(&cfg, &report.table, path);
                if let Err(e) = std::fs::write(format!("{path}.gp"), script) {
                    eprintln!("error[io]: {path}.gp: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        None => print!("{text}"),
    }
    if report.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
