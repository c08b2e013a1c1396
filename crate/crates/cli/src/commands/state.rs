use std::collections::BTreeMap;
use std::io::Write;

use anyhow::Result;
use clap::{Args, ValueEnum};
use nmr_discord::relaxmodel::RelaxModelParams;
use nmr_discord::states::{
    bell_diagonal, pseudopure_00, relaxation_model_state, thermal_equilibrium, werner, BdVector,
    CHLOROFORM_GAMMA_RATIO, DEFAULT_XI,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::statefile::StateFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum StateKind {
    Werner,
    BellDiagonal,
    Pseudopure,
    Thermal,
    SpinlockModel,
}

/// Writes a named two-qubit state as a state file.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub kind: StateKind,
    /// Werner purity.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Bell-diagonal correlation coefficients.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r3: f64,
    #[arg(long, default_value_t = DEFAULT_XI)]
    pub xi: f64,
    /// Gyromagnetic ratio of spin B relative to spin A.
    #[arg(long, default_value_t = CHLOROFORM_GAMMA_RATIO)]
    pub gamma_ratio: f64,
    /// Time into the spin-lock model.
    #[arg(long, default_value_t = 0.0)]
    pub tau_s: f64,
    #[arg(long, default_value_t = 0.75)]
    pub lambda1_inv_ms: f64,
    #[arg(long, default_value_t = 26.0)]
    pub lambda2_inv_s: f64,
}

pub fn run(args: &StateArgs, out: &mut dyn Write) -> Result<()> {
    let rho = match args.kind {
        StateKind::Werner => werner(args.epsilon)?,
        StateKind::BellDiagonal => bell_diagonal(&BdVector::new(args.r1, args.r2, args.r3)?)?,
        StateKind::Pseudopure => pseudopure_00(args.xi)?,
        StateKind::Thermal => thermal_equilibrium(args.xi, args.gamma_ratio)?,
        StateKind::SpinlockModel => {
            let p = RelaxModelParams::new(args.xi, 1e3 / args.lambda1_inv_ms, 1.0 / args.lambda2_inv_s)?;
            relaxation_model_state(args.tau_s, &p)?
        }
    };
    let mut metadata = BTreeMap::new();
    metadata.insert("generator".to_string(), json!(format!("{} {}", env!("CARGO_BIN_NAME"), env!("CARGO_PKG_VERSION"))));
    metadata.insert("config".to_string(), serde_json::to_value(args)?);
    let file = StateFile::from_density(&rho, metadata);
    writeln!(out, "{}", file.to_json()?)?;
    Ok(())
}
