use std::f64::consts::LN_2;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{ensure, Context, Result};
use clap::{ArgAction, Args, ValueEnum};
use nmr_discord::correlations::discord_grid;
use nmr_discord::matcore::fidelity;
use nmr_discord::nmrsim::{simulate_dd, DdScheme, NoiseModel, SpinSystem};
use nmr_discord::states::{werner, DEFAULT_XI};
use serde::{Deserialize, Serialize};

use super::{check_xi, grid, linspace};
use crate::output::{comment_line, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    None,
    Cpmg,
    Udd,
    All,
}

/// Werner state stored under dephasing noise with and without decoupling.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::All)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 2.52)]
    pub total_s: f64,
    /// Number of evenly spaced sample times, 0 and the total included.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, default_value_t = 4.0)]
    pub cpmg_spacing_ms: f64,
    /// Standard deviation of the frequency noise on each spin.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_rad_s: f64,
    /// Correlation time of the frequency noise.
    #[arg(long, default_value_t = 4.0)]
    pub tau_c_ms: f64,
    /// Longitudinal relaxation toward the thermal state.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub t1: bool,
    #[arg(long, default_value_t = 512)]
    pub ensemble: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_XI)]
    pub xi: f64,
    #[arg(long, default_value_t = 219.0)]
    pub j_hz: f64,
    #[arg(long, default_value_t = 101)]
    pub grid_cos: usize,
    #[arg(long, default_value_t = 100)]
    pub grid_phi: usize,
    /// Also write the pulse times of every scheme to this CSV file.
    #[arg(long)]
    pub pulse_log: Option<PathBuf>,
}

fn schemes(args: &DdArgs) -> Vec<DdScheme> {
    let cpmg = DdScheme::Cpmg { spacing: args.cpmg_spacing_ms * 1e-3 };
    match args.scheme {
        SchemeArg::None => vec![DdScheme::None],
        SchemeArg::Cpmg => vec![cpmg],
        SchemeArg::Udd => vec![DdScheme::Udd],
        SchemeArg::All => vec![DdScheme::None, cpmg, DdScheme::Udd],
    }
}

pub fn run(args: &DdArgs, out: &mut dyn Write) -> Result<()> {
    ensure!(args.total_s > 0.0 && args.total_s.is_finite(), "total-s must be positive");
    ensure!(args.samples >= 2, "samples must be at least 2");
    ensure!(args.cpmg_spacing_ms > 0.0, "cpmg-spacing-ms must be positive");
    ensure!(args.j_hz > 0.0 && args.j_hz.is_finite(), "j-hz must be positive");
    check_xi(args.xi)?;
    let g = grid(args.grid_cos, args.grid_phi, false)?;
    let noise = NoiseModel {
        ou_sigma: args.sigma_rad_s,
        ou_tau_c: args.tau_c_ms * 1e-3,
        t1_channel: args.t1,
        ensemble_size: args.ensemble,
        seed: args.seed,
        thermal_xi: args.xi,
    };
    noise.validate()?;
    let sys = SpinSystem { j_coupling: args.j_hz, ..SpinSystem::chloroform() };
    let schemes = schemes(args);
    let mut pulses = Vec::new();
    for s in &schemes {
        pulses.push(s.pulse_times(args.total_s)?);
    }

    let eps = args.xi / 8.0;
    let unit = eps * eps / LN_2;
    let rho0 = werner(eps)?;
    let times = linspace(0.0, args.total_s, args.samples);
    let mut table = Table::new(&["scheme", "t_s", "fidelity", "discord_units", "purity"]);
    for scheme in &schemes {
        // every scheme reuses the same seed so the noise realizations are paired
        let states = simulate_dd(&rho0, scheme, args.total_s, &sys, &noise, &times)?;
        for (&t, rho) in times.iter().zip(&states) {
            table.push(vec![
                scheme.name().into(),
                t.into(),
                fidelity(rho, &rho0)?.into(),
                (discord_grid(rho, &g).discord / unit).into(),
                rho.purity().into(),
            ]);
        }
    }
    let header = comment_line("dd", args, &[("reference_epsilon", eps), ("time_step_s", noise.time_step())])?;
    table.write(out, &header)?;

    if let Some(path) = &args.pulse_log {
        let mut log = Table::new(&["scheme", "index", "t_ms"]);
        for (scheme, times) in schemes.iter().zip(&pulses) {
            for (k, t) in times.iter().enumerate() {
                log.push(vec![scheme.name().into(), ((k + 1) as f64).into(), (t * 1e3).into()]);
            }
        }
        let mut file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        log.write(&mut file, &header)?;
    }
    Ok(())
}
