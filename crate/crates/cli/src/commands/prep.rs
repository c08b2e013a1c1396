use std::f64::consts::{LN_2, TAU};
use std::io::Write;

use anyhow::{ensure, Result};
use clap::Args;
use nmr_discord::correlations::discord_grid;
use nmr_discord::matcore::fidelity;
use nmr_discord::nmrsim::{prepare_pseudopure, prepare_werner, SpinSystem};
use nmr_discord::states::{werner, DEFAULT_XI};
use serde::{Deserialize, Serialize};

use super::{check_xi, grid, linspace};
use crate::output::{comment_line, Table};

/// Ideal-pulse Werner preparation scanned over the evolution angle.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepArgs {
    /// Number of angles from 0 to 2 pi, both ends included.
    #[arg(long, default_value_t = 13)]
    pub theta_steps: usize,
    /// Thermal polarization.
    #[arg(long, default_value_t = DEFAULT_XI)]
    pub xi: f64,
    #[arg(long, default_value_t = 219.0)]
    pub j_hz: f64,
    #[arg(long, default_value_t = 101)]
    pub grid_cos: usize,
    #[arg(long, default_value_t = 100)]
    pub grid_phi: usize,
}

pub fn run(args: &PrepArgs, out: &mut dyn Write) -> Result<()> {
    ensure!(args.theta_steps >= 2, "theta-steps must be at least 2");
    check_xi(args.xi)?;
    ensure!(args.j_hz > 0.0 && args.j_hz.is_finite(), "j-hz must be positive");
    let g = grid(args.grid_cos, args.grid_phi, false)?;
    let sys = SpinSystem { j_coupling: args.j_hz, ..SpinSystem::chloroform() };

    let eps = args.xi / 8.0;
    let unit = eps * eps / LN_2;
    let target = werner(eps)?;
    let pp = prepare_pseudopure(args.xi)?;
    let mut table = Table::new(&["theta_rad", "fidelity", "discord_units"]);
    for theta in linspace(0.0, TAU, args.theta_steps) {
        let rho = prepare_werner(&pp, theta, &sys)?;
        table.push(vec![theta.into(), fidelity(&rho, &target)?.into(), (discord_grid(&rho, &g).discord / unit).into()]);
    }
    table.write(out, &comment_line("prep-scan", args, &[("reference_epsilon", eps)])?)
}
