mod commands;
mod config;
mod output;
mod statefile;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{dd, discord, fit, prep, spinlock, state, werner};

/// Quantum discord of two-qubit NMR states: correlation curves, state
/// analysis, decoupling simulations and relaxation fits.
#[derive(Debug, Parser)]
#[command(name = "nmr-discord", version)]
struct Cli {
    /// TOML file whose keys override the flags of the chosen command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mutual information, classical correlation and discords of Werner states (CSV).
    WernerCurves(werner::WernerArgs),
    /// Fidelity and discord of the prepared state versus evolution angle (CSV).
    PrepScan(prep::PrepArgs),
    /// Fidelity, discord and purity under dephasing with optional decoupling (CSV).
    Dd(dd::DdArgs),
    /// Fidelities and discords during a spin-lock (CSV).
    Spinlock(spinlock::SpinlockArgs),
    /// Discord of a density matrix stored in a state file (JSON).
    Discord(discord::DiscordArgs),
    /// Fit of the relaxation rates to a fidelity series (JSON).
    Fit(fit::FitArgs),
    /// Writes a named state as a state file (JSON).
    State(state::StateArgs),
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.config.as_deref();
    let out = cli.output.as_deref();
    match cli.command {
        Command::WernerCurves(a) => werner::run(&config::merge(a, cfg)?, &mut output::sink(out)?),
        Command::PrepScan(a) => prep::run(&config::merge(a, cfg)?, &mut output::sink(out)?),
        Command::Dd(a) => dd::run(&config::merge(a, cfg)?, &mut output::sink(out)?),
        Command::Spinlock(a) => spinlock::run(&config::merge(a, cfg)?, &mut output::sink(out)?),
        Command::Discord(a) => discord::run(&config::merge(a, cfg)?, &mut output::sink(out)?),
        Command::Fit(a) => fit::run(&config::merge(a, cfg)?, &mut output::sink(out)?),
        Command::State(a) => state::run(&config::merge(a, cfg)?, &mut output::sink(out)?),
    }
}

/// 3 for numerical failures of a valid request, 2 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<nmr_discord::Error>()) {
        Some(e) if !e.is_validation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn numeric_failures_map_to_three() {
        let fit: Result<()> = Err(nmr_discord::Error::FitDivergence { residual: 1.0, noise_floor: 0.01 }.into());
        assert_eq!(exit_code(&fit.context("fit").unwrap_err()), 3);
        let bad = anyhow::Error::from(nmr_discord::Error::PurityOutOfRange(2.0));
        assert_eq!(exit_code(&bad), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), 2);
    }
}
