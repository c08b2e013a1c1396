use std::io::Write;

use anyhow::{ensure, Result};
use clap::Args;
use nmr_discord::correlations::{geometric_discord, mutual_information, werner_discord_analytic};
use nmr_discord::states::werner;
use serde::{Deserialize, Serialize};

use super::linspace;
use crate::output::{comment_line, Table};

/// Correlations of Werner states as functions of the purity.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WernerArgs {
    #[arg(long, default_value_t = 0.0)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps_max: f64,
    /// Number of rows, both ends included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

pub fn run(args: &WernerArgs, out: &mut dyn Write) -> Result<()> {
    ensure!(
        0.0 <= args.eps_min && args.eps_min < args.eps_max && args.eps_max <= 1.0,
        "need 0 <= eps-min < eps-max <= 1, got [{}, {}]",
        args.eps_min,
        args.eps_max
    );
    ensure!(args.steps >= 2, "steps must be at least 2");

    let mut table = Table::new(&["epsilon", "mutual_info_bits", "j_max_bits", "discord_bits", "geometric_discord"]);
    for eps in linspace(args.eps_min, args.eps_max, args.steps) {
        let rho = werner(eps)?;
        let i = mutual_information(&rho);
        let d = werner_discord_analytic(eps)?;
        table.push(vec![eps.into(), i.into(), (i - d).max(0.0).into(), d.into(), geometric_discord(&rho).into()]);
    }
    table.write(out, &comment_line("werner-curves", args, &[])?)
}
