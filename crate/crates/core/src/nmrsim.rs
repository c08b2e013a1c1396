//! Rotating-frame simulator for two coupled spins-1/2.
//!
//! Hamiltonians are in angular units: offsets `2 pi nu Iz`, coupling
//! `2 pi J Iz Iz` (weak coupling) or `2 pi J I.I` (isotropic). Rotations are
//! `exp(-i angle (cos phase Ix + sin phase Iy))`.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matcore::{
    eigh, identity2, pauli, spin_op, Axis, ComplexMatrix, DensityMatrix, Subsystem, C64, STATE_TOL,
    ZERO,
};
use crate::relaxmodel::RelaxModelParams;
use crate::states::{thermal_equilibrium, SpinPairState};

/// Default spacing between CPMG pulses (s).
pub const CPMG_SPACING: f64 = 4e-3;
/// Length of one UDD cycle (s).
pub const UDD_CYCLE: f64 = 28e-3;
/// Pulses per UDD cycle.
pub const UDD_PULSES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSystem {
    pub j_coupling: f64,
    pub offset_a: f64,
    pub offset_b: f64,
    pub t1_a: f64,
    pub t2_a: f64,
    pub t1_b: f64,
    pub t2_b: f64,
    pub gamma_ratio: f64,
}

impl SpinSystem {
    pub fn new(
        j_coupling: f64,
        offsets: (f64, f64),
        t1: (f64, f64),
        t2: (f64, f64),
        gamma_ratio: f64,
    ) -> Result<Self> {
        let s = Self {
            j_coupling,
            offset_a: offsets.0,
            offset_b: offsets.1,
            t1_a: t1.0,
            t2_a: t2.0,
            t1_b: t1.1,
            t2_b: t2.1,
            gamma_ratio,
        };
        s.validate()?;
        Ok(s)
    }

    /// 13C-labelled chloroform: 1H is spin A, 13C is spin B, both on resonance.
    pub fn chloroform() -> Self {
        Self {
            j_coupling: 219.0,
            offset_a: 0.0,
            offset_b: 0.0,
            t1_a: 14.5,
            t2_a: 5.7,
            t1_b: 21.0,
            t2_b: 0.25,
            gamma_ratio: 0.25,
        }
    }

    /// The two protons of 2-chloro-3-iodothiophene-like samples (270 Hz apart).
    pub fn chlorothiophene() -> Self {
        Self {
            j_coupling: 4.11,
            offset_a: 135.0,
            offset_b: -135.0,
            t1_a: 6.3,
            t2_a: 2.3,
            t1_b: 6.3,
            t2_b: 2.3,
            gamma_ratio: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.j_coupling, self.offset_a, self.offset_b, self.gamma_ratio];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spin system has non-finite entries".into()));
        }
        for (t1, t2, spin) in [(self.t1_a, self.t2_a, 'A'), (self.t1_b, self.t2_b, 'B')] {
            if !(t1 > 0.0 && t2 > 0.0 && t1.is_finite() && t2.is_finite()) {
                return Err(Error::InvalidParameter(format!("spin {spin}: T1 and T2 must be positive")));
            }
            if t2 > 2.0 * t1 {
                return Err(Error::InvalidParameter(format!("spin {spin}: T2 = {t2} exceeds 2 T1 = {}", 2.0 * t1)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingMode {
    #[default]
    Zz,
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceEvent {
    Pulse { target: Target, angle: f64, phase: f64 },
    Delay { duration: f64, mode: CouplingMode },
    Gradient,
    SpinLock { duration: f64 },
}

fn qubit_rotation(angle: f64, phase: f64) -> ComplexMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    let gen = pauli(Axis::X).scale(phase.cos()) + pauli(Axis::Y).scale(phase.sin());
    identity2().scale(c) + gen.scale_c(C64::new(0.0, -s))
}

/// `exp(-i angle (cos phase Ix + sin phase Iy))` on the targeted spins.
pub fn rotation_unitary(target: Target, angle: f64, phase: f64) -> ComplexMatrix {
    let r = qubit_rotation(angle, phase);
    let (ua, ub) = match target {
        Target::A => (r, identity2()),
        Target::B => (identity2(), r),
        Target::Both => (r, r),
    };
    ua.tensor(&ub).expect("qubit factors")
}

fn diagonal_unitary(energies: [f64; 4], t: f64) -> ComplexMatrix {
    let d = energies.map(|e| C64::from_polar(1.0, -e * t));
    ComplexMatrix::diagonal(&d).expect("dim 4")
}

/// Eigenvalues of the weak-coupling Hamiltonian, which is diagonal in the
/// computational basis, for extra frequency shifts `da`, `db` (rad/s).
fn zz_energies(sys: &SpinSystem, da: f64, db: f64) -> [f64; 4] {
    let wa = TAU * sys.offset_a + da;
    let wb = TAU * sys.offset_b + db;
    let j = PI * sys.j_coupling / 2.0;
    [
        (wa + wb) / 2.0 + j,
        (wa - wb) / 2.0 - j,
        (-wa + wb) / 2.0 - j,
        -(wa + wb) / 2.0 + j,
    ]
}

/// Free-evolution Hamiltonian in rad/s.
pub fn hamiltonian(sys: &SpinSystem, mode: CouplingMode) -> ComplexMatrix {
    let za = spin_op(Subsystem::A, Axis::Z);
    let zb = spin_op(Subsystem::B, Axis::Z);
    let zeeman = za.scale(TAU * sys.offset_a) + zb.scale(TAU * sys.offset_b);
    let coupling = match mode {
        CouplingMode::Zz => za.matmul(&zb),
        CouplingMode::Isotropic => Axis::ALL
            .into_iter()
            .map(|a| spin_op(Subsystem::A, a).matmul(&spin_op(Subsystem::B, a)))
            .fold(ComplexMatrix::zeros(4).expect("dim 4"), |acc, m| acc + m),
    };
    zeeman + coupling.scale(TAU * sys.j_coupling)
}

pub fn delay_unitary(t: f64, sys: &SpinSystem, mode: CouplingMode) -> ComplexMatrix {
    match mode {
        CouplingMode::Zz => diagonal_unitary(zz_energies(sys, 0.0, 0.0), t),
        CouplingMode::Isotropic => {
            let (vals, v) = eigh(&hamiltonian(sys, mode));
            let e = [vals[0], vals[1], vals[2], vals[3]];
            diagonal_unitary(e, t).conjugate_by(&v)
        }
    }
}

pub fn evolve_delay(
    rho: &DensityMatrix,
    t: f64,
    sys: &SpinSystem,
    mode: CouplingMode,
) -> Result<DensityMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("delay must be non-negative, got {t}")));
    }
    Ok(rho.evolve(&delay_unitary(t, sys, mode)))
}

/// Pulsed field gradient: keeps only the diagonal in the Zeeman basis.
pub fn gradient_crush(rho: &DensityMatrix) -> DensityMatrix {
    let m = rho.matrix();
    let d: Vec<C64> = (0..m.dim()).map(|k| m[(k, k)]).collect();
    DensityMatrix::validate(ComplexMatrix::diagonal(&d).expect("square"), STATE_TOL)
        .expect("diagonal of a state is a state")
}

fn pulse(rho: &DensityMatrix, target: Target, deg: f64, phase_deg: f64) -> DensityMatrix {
    rho.evolve(&rotation_unitary(target, deg.to_radians(), phase_deg.to_radians()))
}

/// Spatial-averaging preparation of the |00> pseudopure state from thermal
/// equilibrium, on the chloroform system.
pub fn prepare_pseudopure(xi: f64) -> Result<DensityMatrix> {
    let sys = SpinSystem::chloroform();
    let rho = thermal_equilibrium(xi, sys.gamma_ratio)?;
    let rho = pulse(&rho, Target::A, 15.0, 0.0);
    let rho = evolve_delay(&rho, 1.0 / (2.0 * sys.j_coupling), &sys, CouplingMode::Zz)?;
    let rho = pulse(&rho, Target::A, 75.0, -90.0);
    Ok(gradient_crush(&rho))
}

/// Turns a pseudopure state into a Bell-diagonal state whose character is set
/// by the delay `theta / (pi J)`; `theta = pi/2` gives a Werner state.
pub fn prepare_werner(rho_pp: &DensityMatrix, theta: f64, sys: &SpinSystem) -> Result<DensityMatrix> {
    if !(0.0..=TAU + 1e-12).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta must lie in [0, 2 pi], got {theta}")));
    }
    let rho = pulse(rho_pp, Target::A, 90.0, 0.0);
    let rho = pulse(&rho, Target::B, 90.0, 180.0);
    let rho = evolve_delay(&rho, theta / (PI * sys.j_coupling), sys, CouplingMode::Zz)?;
    let rho = pulse(&rho, Target::A, 180.0, 90.0);
    Ok(pulse(&rho, Target::B, 90.0, 90.0))
}

/// CPMG pulse times with pulse `k` at `(k - 1 + fraction) * spacing`;
/// `fraction = 0.5` is the symmetric echo placement.
pub fn cpmg_schedule_with(n_pulses: usize, spacing: f64, fraction: f64) -> Result<Vec<f64>> {
    if n_pulses == 0 {
        return Err(Error::InvalidParameter("CPMG needs at least one pulse".into()));
    }
    if !(spacing > 0.0) || !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter("CPMG spacing must be positive and fraction in [0, 1]".into()));
    }
    Ok((0..n_pulses).map(|k| (k as f64 + fraction) * spacing).collect())
}

/// Symmetric CPMG: one pulse centred in each window of length `spacing`.
pub fn cpmg_schedule(n_pulses: usize, spacing: f64) -> Result<Vec<f64>> {
    cpmg_schedule_with(n_pulses, spacing, 0.5)
}

/// Concatenated 7-pulse UDD cycles of 28 ms.
pub fn udd_schedule(n_cycles: usize) -> Result<Vec<f64>> {
    if n_cycles == 0 {
        return Err(Error::InvalidParameter("UDD needs at least one cycle".into()));
    }
    let denom = 2.0 * (UDD_PULSES as f64 + 1.0);
    let cycle: Vec<f64> = (1..=UDD_PULSES)
        .map(|j| {
            if 2 * j == UDD_PULSES + 1 {
                UDD_CYCLE / 2.0
            } else {
                UDD_CYCLE * (PI * j as f64 / denom).sin().powi(2)
            }
        })
        .collect();
    Ok((0..n_cycles)
        .flat_map(|c| cycle.iter().map(move |t| c as f64 * UDD_CYCLE + t))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum DdScheme {
    None,
    Cpmg { spacing: f64 },
    Udd,
    Custom(Vec<f64>),
}

impl DdScheme {
    pub fn cpmg() -> Self {
        DdScheme::Cpmg { spacing: CPMG_SPACING }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DdScheme::None => "none",
            DdScheme::Cpmg { .. } => "cpmg",
            DdScheme::Udd => "udd",
            DdScheme::Custom(_) => "custom",
        }
    }

    /// Pulse times filling complete windows (or cycles) within `total`.
    pub fn pulse_times(&self, total: f64) -> Result<Vec<f64>> {
        let whole = |len: f64| ((total / len) + 1e-9).floor() as usize;
        Ok(match self {
            DdScheme::None => Vec::new(),
            DdScheme::Cpmg { spacing } => match whole(*spacing) {
                0 => Vec::new(),
                n => cpmg_schedule(n, *spacing)?,
            },
            DdScheme::Udd => match whole(UDD_CYCLE) {
                0 => Vec::new(),
                n => udd_schedule(n)?,
            },
            DdScheme::Custom(t) => t.clone(),
        })
    }
}

impl FromStr for DdScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(DdScheme::None),
            "cpmg" => Ok(DdScheme::cpmg()),
            "udd" => Ok(DdScheme::Udd),
            other => Err(Error::InvalidParameter(format!("unknown DD scheme '{other}'"))),
        }
    }
}

/// Ensemble dephasing plus optional longitudinal relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Standard deviation of each spin's frequency noise (rad/s).
    pub ou_sigma: f64,
    /// Correlation time of the frequency noise (s); infinite means static.
    pub ou_tau_c: f64,
    pub t1_channel: bool,
    pub ensemble_size: usize,
    pub seed: u64,
    /// Polarization of the thermal state the T1 channel relaxes toward.
    pub thermal_xi: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            ou_sigma: 1.0,
            ou_tau_c: 4e-3,
            t1_channel: true,
            ensemble_size: 512,
            seed: 0,
            thermal_xi: crate::states::DEFAULT_XI,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self { ou_sigma: 0.0, t1_channel: false, ensemble_size: 1, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensemble_size == 0 {
            return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
        }
        if !(self.ou_tau_c > 0.0) {
            return Err(Error::InvalidParameter("noise correlation time must be positive".into()));
        }
        if !(self.ou_sigma >= 0.0 && self.ou_sigma.is_finite()) {
            return Err(Error::InvalidParameter("noise amplitude must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Integration step shared by every scheme.
    pub fn time_step(&self) -> f64 {
        (self.ou_tau_c / 10.0).min(CPMG_SPACING / 20.0)
    }
}

/// Partial-swap channel pulling one spin toward its thermal state:
/// `rho -> e rho + (1 - e) tau (x) Tr_spin rho`, with `tau` diagonal.
fn thermalize(m: &mut ComplexMatrix, spin: Subsystem, e: f64, z: f64) {
    let tau = [0.5 * (1.0 + z), 0.5 * (1.0 - z)];
    // index of basis state (spin value s, other value o)
    let idx = |s: usize, o: usize| match spin {
        Subsystem::A => 2 * s + o,
        Subsystem::B => 2 * o + s,
    };
    let mut rest = [[ZERO; 2]; 2];
    for (o, row) in rest.iter_mut().enumerate() {
        for (o2, r) in row.iter_mut().enumerate() {
            *r = m[(idx(0, o), idx(0, o2))] + m[(idx(1, o), idx(1, o2))];
        }
    }
    for s in 0..2 {
        for s2 in 0..2 {
            for o in 0..2 {
                for o2 in 0..2 {
                    let (i, j) = (idx(s, o), idx(s2, o2));
                    let fixed = if s == s2 { rest[o][o2] * tau[s] } else { ZERO };
                    m[(i, j)] = m[(i, j)] * e + fixed * (1.0 - e);
                }
            }
        }
    }
}

struct Member {
    rng: ChaCha8Rng,
    da: f64,
    db: f64,
}

impl Member {
    fn new(seed: u64, index: usize, sigma: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let na: f64 = StandardNormal.sample(&mut rng);
        let nb: f64 = StandardNormal.sample(&mut rng);
        let (da, db) = (sigma * na, sigma * nb);
        Self { rng, da, db }
    }

    fn advance(&mut self, a: f64, sigma: f64) {
        let kick = sigma * (1.0 - a * a).max(0.0).sqrt();
        let na: f64 = StandardNormal.sample(&mut self.rng);
        let nb: f64 = StandardNormal.sample(&mut self.rng);
        self.da = a * self.da + kick * na;
        self.db = a * self.db + kick * nb;
    }
}

enum Mark {
    Sample(usize),
    Pulse,
}

/// Ensemble-averaged states at `sample_times` under frequency noise, ideal
/// pi pulses about x on both spins, and the optional T1 channel. Free
/// evolution uses the weak-coupling Hamiltonian.
pub fn simulate_dd(
    rho0: &DensityMatrix,
    scheme: &DdScheme,
    total_time: f64,
    sys: &SpinSystem,
    noise: &NoiseModel,
    sample_times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    noise.validate()?;
    sys.validate()?;
    if !(total_time >= 0.0) || !total_time.is_finite() {
        return Err(Error::InvalidParameter(format!("total time must be non-negative, got {total_time}")));
    }
    let slack = 1e-12 * total_time.max(1.0);
    let pulses = scheme.pulse_times(total_time)?;
    for &p in &pulses {
        if !(p >= 0.0) || p > total_time + slack {
            return Err(Error::ScheduleOverrun { pulse_time: p, total_time });
        }
    }
    for &s in sample_times {
        if !(s >= 0.0) || s > total_time + slack {
            return Err(Error::InvalidParameter(format!("sample time {s} outside [0, {total_time}]")));
        }
    }

    let mut marks: Vec<(f64, Mark)> = sample_times
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, Mark::Sample(i)))
        .chain(pulses.iter().map(|&t| (t, Mark::Pulse)))
        .collect();
    // samples before pulses at equal times
    marks.sort_by(|x, y| {
        x.0.total_cmp(&y.0).then_with(|| matches!(x.1, Mark::Pulse).cmp(&matches!(y.1, Mark::Pulse)))
    });

    let dt = noise.time_step();
    let n_cells = ((total_time / dt) - 1e-9).ceil().max(0.0) as usize;
    let a = (-dt / noise.ou_tau_c).exp();
    let flip = rotation_unitary(Target::Both, PI, 0.0);
    let z_a = noise.thermal_xi / 2.0;
    let z_b = noise.thermal_xi * sys.gamma_ratio / 2.0;

    let mut sums = vec![ComplexMatrix::zeros(4)?; sample_times.len()];
    for member in 0..noise.ensemble_size {
        let mut st = Member::new(noise.seed, member, noise.ou_sigma);
        let mut m = *rho0.matrix();
        let mut t = 0.0;
        let mut next = 0;
        let free = |m: &mut ComplexMatrix, st: &Member, span: f64| {
            if span <= 0.0 {
                return;
            }
            let e = zz_energies(sys, st.da, st.db);
            let mut out = *m;
            for i in 0..4 {
                for j in (0..4).filter(|&j| j != i) {
                    out[(i, j)] *= C64::from_polar(1.0, -(e[i] - e[j]) * span);
                }
            }
            if noise.t1_channel {
                thermalize(&mut out, Subsystem::A, (-span / sys.t1_a).exp(), z_a);
                thermalize(&mut out, Subsystem::B, (-span / sys.t1_b).exp(), z_b);
            }
            *m = out;
        };
        for cell in 0..=n_cells {
            let cell_end = if cell == n_cells { total_time } else { ((cell + 1) as f64 * dt).min(total_time) };
            while next < marks.len() && marks[next].0 <= cell_end + slack {
                let te = marks[next].0.min(total_time);
                free(&mut m, &st, te - t);
                t = t.max(te);
                match marks[next].1 {
                    Mark::Sample(i) => sums[i] = sums[i] + m,
                    Mark::Pulse => m = m.conjugate_by(&flip),
                }
                next += 1;
            }
            if cell == n_cells {
                break;
            }
            free(&mut m, &st, cell_end - t);
            t = cell_end;
            st.advance(a, noise.ou_sigma);
        }
    }
    let inv = 1.0 / noise.ensemble_size as f64;
    sums.into_iter()
        .map(|s| DensityMatrix::validate(s.scale(inv), STATE_TOL))
        .collect()
}

/// Spin-lock for `tau` seconds: isotropic coupling, then triplet
/// equilibration at `lambda1` and decay of the whole deviation at `lambda2`.
pub fn simulate_spinlock(
    rho0: &DensityMatrix,
    tau: f64,
    sys: &SpinSystem,
    p: &RelaxModelParams,
) -> Result<DensityMatrix> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("spin-lock time must be non-negative, got {tau}")));
    }
    p.validate()?;
    // the rf lock suppresses the chemical shifts
    let locked = SpinSystem { offset_a: 0.0, offset_b: 0.0, ..*sys };
    let m = rho0.evolve(&delay_unitary(tau, &locked, CouplingMode::Isotropic));
    let m = *m.matrix();

    let ps = SpinPairState::S0.projector();
    let pt = SpinPairState::TPlus.projector() + SpinPairState::T0.projector()
        + SpinPairState::TMinus.projector();
    let e1 = (-p.lambda1 * tau).exp();
    let triplet_pop = pt.hs_inner(&m).re;
    let equilibrated = ps.matmul(&m).matmul(&ps) + pt.scale(triplet_pop / 3.0);
    let m = m.scale(e1) + equilibrated.scale(1.0 - e1);

    let e2 = (-p.lambda2 * tau).exp();
    let m = m.scale(e2) + ComplexMatrix::identity(4)?.scale((1.0 - e2) / 4.0);
    DensityMatrix::validate(m, STATE_TOL)
}

/// Runs a parsed sequence. Spin-lock events use `relax` when given and
/// otherwise evolve coherently under the isotropic coupling.
pub fn apply_sequence(
    rho: &DensityMatrix,
    events: &[SequenceEvent],
    sys: &SpinSystem,
    relax: Option<&RelaxModelParams>,
) -> Result<DensityMatrix> {
    let mut rho = *rho;
    for ev in events {
        rho = match *ev {
            SequenceEvent::Pulse { target, angle, phase } => {
                rho.evolve(&rotation_unitary(target, angle, phase))
            }
            SequenceEvent::Delay { duration, mode } => evolve_delay(&rho, duration, sys, mode)?,
            SequenceEvent::Gradient => gradient_crush(&rho),
            SequenceEvent::SpinLock { duration } => match relax {
                Some(p) => simulate_spinlock(&rho, duration, sys, p)?,
                None => {
                    let locked = SpinSystem { offset_a: 0.0, offset_b: 0.0, ..*sys };
                    evolve_delay(&rho, duration, &locked, CouplingMode::Isotropic)?
                }
            },
        };
    }
    Ok(rho)
}

fn parse_quantity(value: &str, unit: Option<&str>, line: usize, kind: &str) -> Result<f64> {
    let err = |message: String| Error::Parse { line, message };
    let v: f64 = value.parse().map_err(|_| err(format!("bad number '{value}'")))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite {kind}")));
    }
    let factor = match (kind, unit) {
        ("angle", Some("deg")) => PI / 180.0,
        ("angle", Some("rad")) => 1.0,
        ("time", Some("s")) => 1.0,
        ("time", Some("ms")) => 1e-3,
        ("time", Some("us")) => 1e-6,
        (_, Some(u)) => return Err(err(format!("unknown {kind} unit '{u}'"))),
        (_, None) => return Err(err(format!("missing {kind} unit"))),
    };
    Ok(v * factor)
}

fn parse_target(s: &str, line: usize) -> Result<Target> {
    match s.to_ascii_lowercase().as_str() {
        "a" => Ok(Target::A),
        "b" => Ok(Target::B),
        "both" | "ab" => Ok(Target::Both),
        other => Err(Error::Parse { line, message: format!("unknown pulse target '{other}'") }),
    }
}

fn parse_duration(tok: &[&str], line: usize) -> Result<f64> {
    let d = parse_quantity(
        tok.first().ok_or(Error::Parse { line, message: "missing duration".into() })?,
        tok.get(1).copied(),
        line,
        "time",
    )?;
    if d < 0.0 {
        return Err(Error::Parse { line, message: "negative duration".into() });
    }
    Ok(d)
}

/// Parses a sequence document, one event per line:
/// `pulse A 90 deg phase 270 deg`, `delay 2.283 ms zz`, `grad`, `spinlock 16.4 s`.
/// Blank lines and text after `#` are ignored.
pub fn parse_sequence(text: &str) -> Result<Vec<SequenceEvent>> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tok: Vec<&str> = body.split_whitespace().collect();
        let err = |message: &str| Error::Parse { line, message: message.to_string() };
        let ev = match tok[0].to_ascii_lowercase().as_str() {
            "pulse" => {
                if tok.len() < 4 {
                    return Err(err("expected 'pulse <A|B|both> <angle> <unit> [phase <angle> <unit>]'"));
                }
                let target = parse_target(tok[1], line)?;
                let angle = parse_quantity(tok[2], Some(tok[3]), line, "angle")?;
                let phase = match &tok[4..] {
                    [] => 0.0,
                    [kw, v, u] if kw.eq_ignore_ascii_case("phase") => {
                        parse_quantity(v, Some(u), line, "angle")?
                    }
                    _ => return Err(err("expected 'phase <angle> <unit>' after the pulse angle")),
                };
                SequenceEvent::Pulse { target, angle, phase }
            }
            "delay" => {
                let duration = parse_duration(&tok[1..], line)?;
                let mode = match tok.get(3).map(|s| s.to_ascii_lowercase()) {
                    None => CouplingMode::Zz,
                    Some(m) if m == "zz" => CouplingMode::Zz,
                    Some(m) if m == "iso" || m == "isotropic" => CouplingMode::Isotropic,
                    Some(m) => return Err(err(&format!("unknown coupling mode '{m}'"))),
                };
                if tok.len() > 4 {
                    return Err(err("trailing tokens after delay"));
                }
                SequenceEvent::Delay { duration, mode }
            }
            "grad" | "gradient" => {
                if tok.len() > 1 {
                    return Err(err("'grad' takes no arguments"));
                }
                SequenceEvent::Gradient
            }
            "spinlock" => {
                if tok.len() != 3 {
                    return Err(err("expected 'spinlock <duration> <unit>'"));
                }
                SequenceEvent::SpinLock { duration: parse_duration(&tok[1..], line)? }
            }
            other => return Err(err(&format!("unknown event '{other}'"))),
        };
        events.push(ev);
    }
    Ok(events)
}

/// Sum of the off-diagonal magnitudes in the Zeeman basis.
pub fn coherence_magnitude(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let mut s = 0.0;
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            if i != j && m[(i, j)] != ZERO {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}
