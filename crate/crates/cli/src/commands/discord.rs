use std::io::Write;
use std::path::PathBuf;

use anyhow::{ensure, Result};
use clap::{Args, ValueEnum};
use nmr_discord::correlations::{
    bd_project, bloch_decompose, discord_bd, discord_grid, discord_swapped, geometric_discord,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::grid;
use crate::output::{round_sig, write_json};
use crate::statefile::StateFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Grid,
    Bd,
    Geometric,
}

/// Discarded norm, relative to the state's deviation, above which a
/// Bell-diagonal projection is flagged.
const BD_WARN_RELATIVE: f64 = 1e-6;

/// Correlation measures of a density matrix read from a state file.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscordArgs {
    /// State file (JSON with dims, re, im, metadata).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Grid)]
    pub method: Method,
    #[arg(long, default_value_t = 101)]
    pub grid_cos: usize,
    #[arg(long, default_value_t = 100)]
    pub grid_phi: usize,
    /// Polish the grid optimum with a local search.
    #[arg(long)]
    pub refine: bool,
    /// Measure spin B instead of spin A.
    #[arg(long)]
    pub measure_b: bool,
    /// Tolerance for Hermiticity, trace and positivity checks.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

pub fn run(args: &DiscordArgs, out: &mut dyn Write) -> Result<()> {
    ensure!(args.tol >= 0.0 && args.tol.is_finite(), "tol must be non-negative");
    let g = grid(args.grid_cos, args.grid_phi, args.refine)?;
    let file = StateFile::read(&args.input)?;
    let rho = file.decode(args.tol)?;

    let mut report = json!({
        "tool": env!("CARGO_BIN_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": args,
        "metadata": file.metadata,
        "purity": round_sig(rho.purity()),
    });
    let body = match args.method {
        Method::Grid => {
            let r = if args.measure_b { discord_swapped(&rho, &g) } else { discord_grid(&rho, &g) };
            let relative = if r.j_max > 0.0 { r.j_spread() / r.j_max } else { 0.0 };
            json!({
                "method": "grid",
                "mutual_info_bits": round_sig(r.mutual_info),
                "classical_correlation_bits": round_sig(r.j_max),
                "discord_bits": round_sig(r.discord),
                "argmax_theta_rad": round_sig(r.argmax_basis.theta),
                "argmax_phi_rad": round_sig(r.argmax_basis.phi),
                "j_min_bits": round_sig(r.j_min),
                "j_spread_bits": round_sig(r.j_spread()),
                "j_spread_relative": round_sig(relative),
                "degenerate_outcome": r.degenerate_outcome,
                "grid_points": g.total_points(),
            })
        }
        Method::Bd => {
            let p = bd_project(&rho)?;
            let f = bloch_decompose(&rho);
            let total = (f.x.iter().chain(&f.y).map(|v| v * v).sum::<f64>() + f.t_norm_sqr()).sqrt();
            let relative = if total > 0.0 { p.discarded_norm / total } else { 0.0 };
            let warning = (relative > BD_WARN_RELATIVE).then(|| {
                let msg = format!(
                    "state is not Bell-diagonal: projection discards {:.3e} of the deviation",
                    relative
                );
                eprintln!("warning: {msg}");
                msg
            });
            json!({
                "method": "bd",
                "discord_bits": round_sig(discord_bd(&p.r)),
                "bd_vector": p.r.components().map(round_sig),
                "discarded_norm": round_sig(p.discarded_norm),
                "discarded_relative": round_sig(relative),
                "warning": warning,
            })
        }
        Method::Geometric => {
            let r = if args.measure_b { rho.swapped() } else { rho.clone() };
            json!({
                "method": "geometric",
                "geometric_discord": round_sig(geometric_discord(&r)),
            })
        }
    };
    if let (Value::Object(dst), Value::Object(src)) = (&mut report, body) {
        dst.extend(src);
    }
    write_json(out, &report)
}
