use std::f64::consts::LN_2;
use std::io::Write;

use anyhow::{ensure, Result};
use clap::Args;
use nmr_discord::correlations::{bd_project, discord_bd, discord_grid, geometric_discord};
use nmr_discord::matcore::{attenuated_fidelity, fidelity, pauli_pair, validate_density, Axis, STATE_TOL};
use nmr_discord::nmrsim::{simulate_spinlock, SpinSystem};
use nmr_discord::relaxmodel::{power_of_two_times, RelaxModelParams};
use nmr_discord::states::{lls_state, singlet_triplet_initial, DEFAULT_XI};
use nmr_discord::DensityMatrix;
use serde::{Deserialize, Serialize};

use super::{check_xi, grid};
use crate::output::{comment_line, Table};

/// Singlet-triplet mixture held under spin-lock, sampled at 2^n ms.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinlockArgs {
    #[arg(long, default_value_t = DEFAULT_XI)]
    pub xi: f64,
    /// Triplet equilibration time 1/lambda1.
    #[arg(long, default_value_t = 0.75)]
    pub lambda1_inv_ms: f64,
    /// Long-lived state lifetime 1/lambda2.
    #[arg(long, default_value_t = 26.0)]
    pub lambda2_inv_s: f64,
    /// Amplitude, in units of xi/4, of a sigma_x sigma_z term added to the
    /// initial state to mimic tomography artifacts outside the Bell-diagonal form.
    #[arg(long, default_value_t = 0.0)]
    pub artifact_coherence: f64,
    #[arg(long, default_value_t = 101)]
    pub grid_cos: usize,
    #[arg(long, default_value_t = 100)]
    pub grid_phi: usize,
}

fn initial_state(args: &SpinlockArgs) -> Result<DensityMatrix> {
    let rho = singlet_triplet_initial(args.xi)?;
    if args.artifact_coherence == 0.0 {
        return Ok(rho);
    }
    let extra = pauli_pair(Axis::X, Axis::Z).scale(args.artifact_coherence * args.xi / 4.0);
    Ok(validate_density(*rho.matrix() + extra, STATE_TOL)?)
}

pub fn run(args: &SpinlockArgs, out: &mut dyn Write) -> Result<()> {
    check_xi(args.xi)?;
    ensure!(
        args.lambda1_inv_ms > 0.0 && args.lambda2_inv_s > 0.0,
        "relaxation times must be positive"
    );
    ensure!(args.artifact_coherence.is_finite(), "artifact-coherence must be finite");
    let params = RelaxModelParams::new(args.xi, 1e3 / args.lambda1_inv_ms, 1.0 / args.lambda2_inv_s)?;
    let g = grid(args.grid_cos, args.grid_phi, false)?;
    let sys = SpinSystem::chlorothiophene();

    let eps = args.xi / 3.0;
    let d_unit = eps * eps / LN_2;
    let dg_unit = eps * eps / 2.0;
    let rho0 = initial_state(args)?;
    let target = lls_state(args.xi)?;
    let mut table = Table::new(&[
        "tau_s",
        "fidelity",
        "attenuated_fidelity",
        "discord_grid_units",
        "discord_bd_units",
        "geometric_discord_units",
    ]);
    for tau in power_of_two_times() {
        let rho = simulate_spinlock(&rho0, tau, &sys, &params)?;
        let d_bd = discord_bd(&bd_project(&rho)?.r);
        table.push(vec![
            tau.into(),
            fidelity(&rho, &target)?.into(),
            attenuated_fidelity(&rho, &rho0, &target)?.into(),
            (discord_grid(&rho, &g).discord / d_unit).into(),
            (d_bd / d_unit).into(),
            (geometric_discord(&rho) / dg_unit).into(),
        ]);
    }
    table.write(out, &comment_line("spinlock", args, &[("reference_epsilon", eps)])?)
}
