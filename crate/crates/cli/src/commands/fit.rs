use std::io::Write;
use std::path::PathBuf;

use anyhow::{ensure, Context, Result};
use clap::{Args, ValueEnum};
use nmr_discord::relaxmodel::{fit_series, FidelitySeries, FitOptions, SeriesKind};
use nmr_discord::states::DEFAULT_XI;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::check_xi;
use crate::output::{round_sig, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Attenuated,
    Fidelity,
}

impl From<KindArg> for SeriesKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Attenuated => SeriesKind::Attenuated,
            KindArg::Fidelity => SeriesKind::Fidelity,
        }
    }
}

/// Fits the two relaxation rates to fidelity data.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitArgs {
    /// CSV with columns t_seconds,value.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Attenuated)]
    pub kind: KindArg,
    /// Plain-fidelity series fitted jointly with an attenuated input.
    #[arg(long)]
    pub fidelity_input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_XI)]
    pub xi: f64,
    /// Expected noise level of the data.
    #[arg(long, default_value_t = 0.01)]
    pub noise_floor: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
}

fn load(path: &PathBuf, kind: SeriesKind) -> Result<FidelitySeries> {
    FidelitySeries::read_csv_path(path, kind).with_context(|| format!("cannot load series {}", path.display()))
}

pub fn run(args: &FitArgs, out: &mut dyn Write) -> Result<()> {
    check_xi(args.xi)?;
    ensure!(args.noise_floor > 0.0 && args.noise_floor.is_finite(), "noise-floor must be positive");
    ensure!(args.max_iterations > 0, "max-iterations must be positive");
    let mut series = vec![load(&args.input, args.kind.into())?];
    if let Some(path) = &args.fidelity_input {
        ensure!(args.kind == KindArg::Attenuated, "a joint fit needs --kind attenuated for the main input");
        series.push(load(path, SeriesKind::Fidelity)?);
    }
    let opts = FitOptions { noise_floor: args.noise_floor, max_iterations: args.max_iterations, ..FitOptions::default() };
    let refs: Vec<&FidelitySeries> = series.iter().collect();
    let fit = fit_series(&refs, args.xi, &opts)?;

    if fit.lambda1.is_none() {
        eprintln!("warning: the data do not constrain lambda1; supply --fidelity-input for a joint fit");
    }
    let points: Vec<_> = series
        .iter()
        .flat_map(|s| s.points().iter().map(move |&(t, v)| (s.kind(), t, v)))
        .zip(&fit.residuals)
        .map(|((kind, t, v), &r)| {
            json!({
                "series": kind.to_string(),
                "t_s": round_sig(t),
                "value": round_sig(v),
                "model": round_sig(v + r),
                "residual": round_sig(r),
            })
        })
        .collect();
    let report = json!({
        "tool": env!("CARGO_BIN_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": args,
        "xi": fit.xi,
        "lambda1_per_s": fit.lambda1.map(round_sig),
        "lambda1_inv_ms": fit.lambda1.map(|l| round_sig(1e3 / l)),
        "lambda1_identifiable": fit.lambda1.is_some(),
        "lambda1_at_bound": fit.lambda1_at_bound,
        "lambda2_per_s": round_sig(fit.lambda2),
        "lambda2_inv_s": round_sig(1.0 / fit.lambda2),
        "lambda2_at_bound": fit.lambda2_at_bound,
        "residual_sum_squares": round_sig(fit.residual),
        "rms": round_sig(fit.rms),
        "starts": fit.starts,
        "points": points,
    });
    write_json(out, &report)
}
