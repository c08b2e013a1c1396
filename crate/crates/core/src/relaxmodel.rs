//! Two-rate relaxation model of a singlet/triplet spin-lock experiment and
//! the least-squares recovery of its rates.
//!
//! The model state is `1/4 + e^{-l2 t} (xi/4)(S0 - a T0 - (1 - a) T)` with
//! `a = e^{-l1 t}` and `T` the equal triplet mixture. Against a Werner target
//! its fidelity is `sqrt(2 / (2 + a^2))` and its attenuated fidelity is
//! `e^{-l2 t} sqrt(2/3)`. The latter does not involve `l1` at all, so
//! attenuated data alone cannot determine the triplet equilibration rate.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::correlations::{bd_project, discord_bd};
use crate::error::{Error, Result};
use crate::states::relaxation_model_state;

/// Polarization `xi` and the rates (1/s) of triplet equilibration and of
/// overall singlet decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxModelParams {
    pub xi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl RelaxModelParams {
    pub fn new(xi: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        let p = Self { xi, lambda1, lambda2 };
        p.validate()?;
        Ok(p)
    }

    /// Chloroform-like reference: 0.75 ms triplet equilibration, 26 s singlet lifetime.
    pub fn reference() -> Self {
        Self { xi: 8e-5, lambda1: 1.0 / 0.75e-3, lambda2: 1.0 / 26.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::InvalidParameter(format!("xi must lie in (0, 1], got {}", self.xi)));
        }
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be a non-negative rate, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Fidelity,
    Attenuated,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Fidelity => "fidelity",
            SeriesKind::Attenuated => "attenuated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Row {
    t_seconds: f64,
    value: f64,
}

/// Time series of fidelity values, times in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    kind: SeriesKind,
    points: Vec<(f64, f64)>,
}

impl FidelitySeries {
    pub fn new(kind: SeriesKind, points: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(t, v)) in points.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidParameter(format!("point {i}: time {t} must be finite and >= 0")));
            }
            if !v.is_finite() || v.abs() > 1.0 + 1e-9 {
                return Err(Error::InvalidParameter(format!("point {i}: value {v} outside [-1, 1]")));
            }
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter("times must be strictly increasing".into()));
        }
        Ok(Self { kind, points })
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Model curve sampled at `times`.
    pub fn from_model(kind: SeriesKind, times: &[f64], p: &RelaxModelParams) -> Result<Self> {
        let pts = times
            .iter()
            .map(|&t| Ok((t, model_value(kind, t, p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, pts)
    }

    pub fn read_csv<R: Read>(reader: R, kind: SeriesKind) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["t_seconds", "value"] {
            return Err(Error::Parse { line: 1, message: "expected header 't_seconds,value'".into() });
        }
        let mut points = Vec::new();
        for (i, rec) in rdr.deserialize::<Row>().enumerate() {
            let row = rec.map_err(|e| Error::Parse { line: i + 2, message: e.to_string() })?;
            points.push((row.t_seconds, row.value));
        }
        Self::new(kind, points)
    }

    pub fn read_csv_path(path: impl AsRef<Path>, kind: SeriesKind) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, kind)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for &(t_seconds, value) in &self.points {
            w.serialize(Row { t_seconds, value })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Spin-lock durations `2^n` ms for `n = 0..=16`.
pub fn power_of_two_times() -> Vec<f64> {
    (0..=16).map(|n| f64::from(1u32 << n) * 1e-3).collect()
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be finite and >= 0, got {t}")))
    }
}

fn fidelity_closed(t: f64, lambda1: f64) -> f64 {
    let a = (-lambda1 * t).exp();
    (2.0 / (2.0 + a * a)).sqrt()
}

fn attenuated_closed(t: f64, lambda2: f64) -> f64 {
    (-lambda2 * t).exp() * (2.0f64 / 3.0).sqrt()
}

/// Fidelity of the model state against a Werner target.
pub fn model_fidelity(t: f64, p: &RelaxModelParams) -> Result<f64> {
    check_time(t)?;
    p.validate()?;
    Ok(fidelity_closed(t, p.lambda1))
}

/// Attenuated fidelity (normalized by the initial deviation).
pub fn model_attenuated_fidelity(t: f64, p: &RelaxModelParams) -> Result<f64> {
    check_time(t)?;
    p.validate()?;
    Ok(attenuated_closed(t, p.lambda2))
}

pub fn model_value(kind: SeriesKind, t: f64, p: &RelaxModelParams) -> Result<f64> {
    match kind {
        SeriesKind::Fidelity => model_fidelity(t, p),
        SeriesKind::Attenuated => model_attenuated_fidelity(t, p),
    }
}

/// Discord of the model state in bits; the state is Bell-diagonal, so the
/// closed-form expression is exact.
pub fn model_discord(t: f64, p: &RelaxModelParams) -> Result<f64> {
    let rho = relaxation_model_state(t, p)?;
    Ok(discord_bd(&bd_project(&rho)?.r))
}

/// Knobs of the multistart simplex fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Expected noise level of the data; a fit whose RMS exceeds ten times
    /// this value without making progress is reported as divergent.
    pub noise_floor: f64,
    pub max_iterations: usize,
    /// Starting grid, per axis, in log10(rate / s^-1).
    pub start_range: (f64, f64),
    pub starts_per_axis: usize,
    /// Hard bounds on log10(rate) during the search.
    pub bounds: (f64, f64),
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            noise_floor: 0.01,
            max_iterations: 500,
            start_range: (-5.0, 2.0),
            starts_per_axis: 5,
            bounds: (-8.0, 6.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// `None` when the data carry no information about the triplet rate.
    pub lambda1: Option<f64>,
    pub lambda2: f64,
    pub xi: f64,
    /// Sum of squared residuals.
    pub residual: f64,
    pub rms: f64,
    pub residuals: Vec<f64>,
    pub lambda1_at_bound: bool,
    pub lambda2_at_bound: bool,
    pub starts: usize,
}

impl FitReport {
    pub fn params(&self) -> RelaxModelParams {
        RelaxModelParams { xi: self.xi, lambda1: self.lambda1.unwrap_or(f64::NAN), lambda2: self.lambda2 }
    }
}

/// Minimizes `f` with the Nelder-Mead simplex. Returns the best vertex, its
/// value and the iteration count.
fn nelder_mead<const N: usize>(
    f: impl Fn(&[f64; N]) -> f64,
    start: [f64; N],
    step: f64,
    max_iter: usize,
) -> ([f64; N], f64, usize) {
    let mut simplex: Vec<([f64; N], f64)> = (0..=N)
        .map(|k| {
            let mut v = start;
            if k > 0 {
                v[k - 1] += step;
            }
            (v, f(&v))
        })
        .collect();
    let mut iter = 0;
    while iter < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[N].1);
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= 1e-15 * best.abs() + 1e-32 && size < 1e-9 {
            break;
        }
        if size < 1e-12 {
            break;
        }
        iter += 1;
        let mut centroid = [0.0; N];
        for (v, _) in &simplex[..N] {
            for i in 0..N {
                centroid[i] += v[i] / N as f64;
            }
        }
        let along = |c: f64| -> [f64; N] {
            std::array::from_fn(|i| centroid[i] + c * (simplex[N].0[i] - centroid[i]))
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst {
                let x = along(-0.5);
                (x, f(&x))
            } else {
                let x = along(0.5);
                (x, f(&x))
            };
            if fc < worst.min(fr) {
                simplex[N] = (xc, fc);
            } else {
                let x0 = simplex[0].0;
                for (v, fv) in simplex.iter_mut().skip(1) {
                    *v = std::array::from_fn(|i| x0[i] + 0.5 * (v[i] - x0[i]));
                    *fv = f(v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, simplex[0].1, iter)
}

fn check_coverage(series: &[&FidelitySeries]) -> Result<()> {
    let times: Vec<f64> = series.iter().flat_map(|s| s.points().iter().map(|p| p.0)).collect();
    if times.len() < 4 {
        return Err(Error::InsufficientData(format!("need at least 4 points, got {}", times.len())));
    }
    let positive: Vec<f64> = times.iter().copied().filter(|&t| t > 0.0).collect();
    let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positive.iter().copied().fold(0.0, f64::max);
    if !(hi / lo >= 100.0 * (1.0 - 1e-12)) {
        return Err(Error::InsufficientData(format!(
            "times must span at least two decades, got {lo:e} .. {hi:e} s"
        )));
    }
    Ok(())
}

/// Least-squares fit of the model rates to one or more series. Rates are
/// searched as `log10(lambda)`.
pub fn fit_series(series: &[&FidelitySeries], xi: f64, opts: &FitOptions) -> Result<FitReport> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::InvalidParameter(format!("xi must lie in (0, 1], got {xi}")));
    }
    check_coverage(series)?;
    let (lo, hi) = opts.bounds;
    let eval = |u: &[f64; 2]| -> Vec<f64> {
        let l1 = 10f64.powf(u[0].clamp(lo, hi));
        let l2 = 10f64.powf(u[1].clamp(lo, hi));
        series
            .iter()
            .flat_map(|s| {
                s.points().iter().map(move |&(t, v)| match s.kind() {
                    SeriesKind::Fidelity => fidelity_closed(t, l1) - v,
                    SeriesKind::Attenuated => attenuated_closed(t, l2) - v,
                })
            })
            .collect()
    };
    let ssr = |u: &[f64; 2]| eval(u).iter().map(|r| r * r).sum::<f64>();

    let n = opts.starts_per_axis.max(1);
    let (s0, s1) = opts.start_range;
    let grid: Vec<f64> = (0..n)
        .map(|k| if n == 1 { 0.5 * (s0 + s1) } else { s0 + (s1 - s0) * k as f64 / (n - 1) as f64 })
        .collect();

    let mut best: Option<([f64; 2], f64)> = None;
    let mut progress = 0.0f64;
    for &u1 in &grid {
        for &u2 in &grid {
            let start = [u1, u2];
            let f0 = ssr(&start);
            let (u, fu, _) = nelder_mead(ssr, start, 0.5, opts.max_iterations);
            let u = u.map(|x| x.clamp(lo, hi));
            progress = progress.max(f0 - fu);
            let better = match best {
                None => true,
                Some((bu, bf)) => fu < bf || (fu == bf && (u[0], u[1]) < (bu[0], bu[1])),
            };
            if better {
                best = Some((u, fu));
            }
        }
    }
    let (u, fu) = best.expect("at least one start");
    let residuals = eval(&u);
    let rms = (fu / residuals.len() as f64).sqrt();
    if rms > 10.0 * opts.noise_floor && progress < 1e-12 {
        return Err(Error::FitDivergence { residual: rms, noise_floor: opts.noise_floor });
    }

    // the triplet rate is identifiable only if moving it changes the model
    let shifted = eval(&[u[0] + 0.1, u[1]]);
    let sensitivity = residuals.iter().zip(&shifted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let near = |x: f64| (x - lo).abs() < 1e-6 || (x - hi).abs() < 1e-6;
    let identifiable = sensitivity >= 1e-8;
    Ok(FitReport {
        lambda1: identifiable.then(|| 10f64.powf(u[0])),
        lambda2: 10f64.powf(u[1]),
        xi,
        residual: fu,
        rms,
        residuals,
        lambda1_at_bound: identifiable && near(u[0]),
        lambda2_at_bound: near(u[1]),
        starts: n * n,
    })
}

/// Fits attenuated-fidelity data.
pub fn fit_lambdas(data: &FidelitySeries, xi: f64) -> Result<FitReport> {
    fit_lambdas_with(data, xi, &FitOptions::default())
}

pub fn fit_lambdas_with(data: &FidelitySeries, xi: f64, opts: &FitOptions) -> Result<FitReport> {
    if data.kind() != SeriesKind::Attenuated {
        return Err(Error::InvalidParameter("fit_lambdas expects attenuated-fidelity data".into()));
    }
    fit_series(&[data], xi, opts)
}

/// Fits attenuated and plain fidelity data together, which pins down both rates.
pub fn fit_lambdas_joint(
    attenuated: &FidelitySeries,
    fidelity: &FidelitySeries,
    xi: f64,
    opts: &FitOptions,
) -> Result<FitReport> {
    if attenuated.kind() != SeriesKind::Attenuated || fidelity.kind() != SeriesKind::Fidelity {
        return Err(Error::InvalidParameter("joint fit needs one attenuated and one fidelity series".into()));
    }
    fit_series(&[attenuated, fidelity], xi, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::werner_discord_analytic;
    use crate::matcore::{attenuated_fidelity, fidelity};
    use crate::states::{singlet_triplet_initial, werner};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn reference() -> RelaxModelParams {
        RelaxModelParams::reference()
    }

    #[test]
    fn params_validation() {
        assert!(RelaxModelParams::new(8e-5, 10.0, 0.1).is_ok());
        assert!(RelaxModelParams::new(0.0, 10.0, 0.1).is_err());
        assert!(RelaxModelParams::new(1e-3, -1.0, 0.1).is_err());
        assert!(RelaxModelParams::new(1e-3, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn closed_forms_match_state_evaluation() {
        let p = reference();
        let target = werner(0.5).unwrap();
        let rho0 = singlet_triplet_initial(p.xi).unwrap();
        let mut t = 1e-4;
        while t <= 100.0 {
            let rho = relaxation_model_state(t, &p).unwrap();
            let f = fidelity(&rho, &target).unwrap();
            let fa = attenuated_fidelity(&rho, &rho0, &target).unwrap();
            assert_abs_diff_eq!(model_fidelity(t, &p).unwrap(), f, epsilon = 1e-10);
            assert_abs_diff_eq!(model_attenuated_fidelity(t, &p).unwrap(), fa, epsilon = 1e-10);
            t *= 1.7;
        }
    }

    #[test]
    fn fidelity_limits() {
        let p = reference();
        assert_abs_diff_eq!(model_fidelity(0.0, &p).unwrap(), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(model_attenuated_fidelity(0.0, &p).unwrap(), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(model_fidelity(1.0, &p).unwrap(), 1.0, epsilon = 1e-15);
        let mut prev = 0.0;
        for t in power_of_two_times() {
            let f = model_fidelity(t, &p).unwrap();
            assert!(f >= prev);
            prev = f;
            assert!(model_attenuated_fidelity(t, &p).unwrap() <= f);
        }
        assert!(model_fidelity(-1.0, &p).is_err());
    }

    #[test]
    fn attenuated_fidelity_ignores_triplet_rate() {
        let a = RelaxModelParams::new(1e-3, 5.0, 0.1).unwrap();
        let b = RelaxModelParams::new(1e-3, 5000.0, 0.1).unwrap();
        for t in [0.0, 1e-3, 0.2, 3.0] {
            assert_eq!(model_attenuated_fidelity(t, &a).unwrap(), model_attenuated_fidelity(t, &b).unwrap());
        }
    }

    #[test]
    fn discord_examples() {
        let p = reference();
        let d0 = model_discord(0.0, &p).unwrap();
        let bd = crate::states::BdVector::new(-p.xi / 2.0, -p.xi / 2.0, 0.0).unwrap();
        assert_relative_eq!(d0, discord_bd(&bd), max_relative = 1e-9);
        assert!(model_discord(1e4, &p).unwrap() < 1e-30);
        // deep in the Werner regime the two agree up to the e^{-l1 t} remainder
        let t = 20.0 / p.lambda1;
        let w = werner_discord_analytic(p.xi / 3.0 * (-p.lambda2 * t).exp()).unwrap();
        assert_relative_eq!(model_discord(t, &p).unwrap(), w, max_relative = 1e-8);
    }

    #[test]
    fn csv_round_trip() {
        let s = FidelitySeries::from_model(SeriesKind::Attenuated, &power_of_two_times(), &reference()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t_seconds,value\n"));
        let back = FidelitySeries::read_csv(buf.as_slice(), SeriesKind::Attenuated).unwrap();
        assert_eq!(back, s);
        assert!(FidelitySeries::read_csv("time,value\n1,0.5\n".as_bytes(), SeriesKind::Fidelity).is_err());
        match FidelitySeries::read_csv("t_seconds,value\n1,0.5\n2,abc\n".as_bytes(), SeriesKind::Fidelity) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(FidelitySeries::new(SeriesKind::Fidelity, vec![(1.0, 0.5), (1.0, 0.4)]).is_err());
    }

    #[test]
    fn noiseless_fit_recovers_singlet_rate() {
        let p = reference();
        let data = FidelitySeries::from_model(SeriesKind::Attenuated, &power_of_two_times(), &p).unwrap();
        let fit = fit_lambdas(&data, p.xi).unwrap();
        assert_relative_eq!(fit.lambda2, p.lambda2, max_relative = 1e-6);
        assert!(fit.lambda1.is_none());
        assert!(fit.rms < 1e-8);
    }

    #[test]
    fn joint_fit_recovers_both_rates() {
        let p = reference();
        let times = power_of_two_times();
        let att = FidelitySeries::from_model(SeriesKind::Attenuated, &times, &p).unwrap();
        let fid = FidelitySeries::from_model(SeriesKind::Fidelity, &times, &p).unwrap();
        let fit = fit_lambdas_joint(&att, &fid, p.xi, &FitOptions::default()).unwrap();
        assert_relative_eq!(fit.lambda1.unwrap(), p.lambda1, max_relative = 1e-3);
        assert_relative_eq!(fit.lambda2, p.lambda2, max_relative = 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        let few = FidelitySeries::new(SeriesKind::Attenuated, vec![(1e-3, 0.8), (1.0, 0.7), (10.0, 0.6)]).unwrap();
        assert!(matches!(fit_lambdas(&few, 1e-3), Err(Error::InsufficientData(_))));
        let narrow: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64, 0.5)).collect();
        let narrow = FidelitySeries::new(SeriesKind::Attenuated, narrow).unwrap();
        assert!(matches!(fit_lambdas(&narrow, 1e-3), Err(Error::InsufficientData(_))));

        let ones: Vec<(f64, f64)> = power_of_two_times().into_iter().map(|t| (t, 1.0)).collect();
        let ones = FidelitySeries::new(SeriesKind::Attenuated, ones).unwrap();
        match fit_lambdas(&ones, 1e-3) {
            Ok(fit) => assert!(fit.lambda2_at_bound),
            Err(e) => assert!(matches!(e, Error::FitDivergence { .. })),
        }
    }

    #[test]
    fn nelder_mead_finds_rosenbrock_minimum() {
        let f = |x: &[f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, fx, _) = nelder_mead(f, [-1.2, 1.0], 0.5, 2000);
        assert!(fx < 1e-12);
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-5);
    }
}
