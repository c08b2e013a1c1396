//! Named two-qubit states: Bell basis, Werner and Bell-diagonal families,
//! NMR thermal and pseudopure states, and the singlet/triplet mixtures seen
//! during a spin-lock.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcore::{
    identity2, identity4, pauli, pauli_pair, spin_op, Axis, ComplexMatrix, DensityMatrix,
    Subsystem, C64, STATE_TOL, ZERO,
};
use crate::relaxmodel::RelaxModelParams;

/// Default high-temperature polarization of protons at 11.7 T, 300 K.
pub const DEFAULT_XI: f64 = 8e-5;

/// Carbon-to-proton Larmor frequency ratio in chloroform.
pub const CHLOROFORM_GAMMA_RATIO: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellKind {
    pub fn vector(self) -> [C64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b, c, d) = match self {
            BellKind::PsiMinus => (0.0, s, -s, 0.0),
            BellKind::PsiPlus => (0.0, s, s, 0.0),
            BellKind::PhiMinus => (s, 0.0, 0.0, -s),
            BellKind::PhiPlus => (s, 0.0, 0.0, s),
        };
        [C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0)]
    }
}

/// Singlet/triplet eigenbasis of the isotropic coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinPairState {
    S0,
    TPlus,
    T0,
    TMinus,
}

impl SpinPairState {
    pub const ALL: [SpinPairState; 4] =
        [SpinPairState::S0, SpinPairState::TPlus, SpinPairState::T0, SpinPairState::TMinus];

    pub fn vector(self) -> [C64; 4] {
        match self {
            SpinPairState::S0 => BellKind::PsiMinus.vector(),
            SpinPairState::T0 => BellKind::PsiPlus.vector(),
            SpinPairState::TPlus => [C64::new(1.0, 0.0), ZERO, ZERO, ZERO],
            SpinPairState::TMinus => [ZERO, ZERO, ZERO, C64::new(1.0, 0.0)],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.vector()).expect("dim 4")
    }
}

/// Equal mixture of the three triplet projectors.
pub fn triplet_mixture() -> ComplexMatrix {
    (SpinPairState::TPlus.projector() + SpinPairState::T0.projector()
        + SpinPairState::TMinus.projector())
    .scale(1.0 / 3.0)
}

/// Coefficients `r_j` of `(1/4)(1 + sum_j r_j sigma_j (x) sigma_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdVector {
    r: [f64; 3],
}

impl BdVector {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let v = Self { r: [r1, r2, r3] };
        for (index, value) in v.eigenvalues().into_iter().enumerate() {
            if !value.is_finite() || !(-STATE_TOL..=1.0 + STATE_TOL).contains(&value) {
                return Err(Error::InvalidBdVector { index: index + 1, value });
            }
        }
        Ok(v)
    }

    pub fn components(&self) -> [f64; 3] {
        self.r
    }

    /// Weights on |psi->, |phi->, |phi+>, |psi+> in that order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let [r1, r2, r3] = self.r;
        [
            (1.0 - r1 - r2 - r3) / 4.0,
            (1.0 - r1 + r2 + r3) / 4.0,
            (1.0 + r1 - r2 + r3) / 4.0,
            (1.0 + r1 + r2 - r3) / 4.0,
        ]
    }

    /// Largest |r_j|.
    pub fn max_abs(&self) -> f64 {
        self.r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Thermal polarization together with a Werner purity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityParams {
    pub xi: f64,
    pub epsilon: f64,
}

impl PurityParams {
    pub fn new(xi: f64, epsilon: f64) -> Result<Self> {
        check_xi(xi)?;
        check_epsilon(epsilon)?;
        Ok(Self { xi, epsilon })
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("polarization xi must be positive, got {xi}")))
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::PurityOutOfRange(eps))
    }
}

fn finish(m: ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::validate(m, STATE_TOL)
}

pub fn bell_state(kind: BellKind) -> DensityMatrix {
    finish(ComplexMatrix::projector(&kind.vector()).expect("dim 4")).expect("pure state")
}

/// `(1 - eps)/4 * 1 + eps |psi-><psi-|`.
pub fn werner(epsilon: f64) -> Result<DensityMatrix> {
    check_epsilon(epsilon)?;
    let singlet = SpinPairState::S0.projector();
    finish(identity4().scale((1.0 - epsilon) / 4.0) + singlet.scale(epsilon))
}

pub fn bell_diagonal(r: &BdVector) -> Result<DensityMatrix> {
    let mut m = identity4();
    for (axis, rj) in Axis::ALL.into_iter().zip(r.components()) {
        m = m + pauli_pair(axis, axis).scale(rj);
    }
    finish(m.scale(0.25))
}

fn zz() -> ComplexMatrix {
    spin_op(Subsystem::A, Axis::Z).matmul(&spin_op(Subsystem::B, Axis::Z))
}

/// `(1/4)[1 + (xi/4)(Iz_A + Iz_B + 2 Iz_A Iz_B)]`.
pub fn pseudopure_00(xi: f64) -> Result<DensityMatrix> {
    check_xi(xi)?;
    let dev = spin_op(Subsystem::A, Axis::Z) + spin_op(Subsystem::B, Axis::Z) + zz().scale(2.0);
    finish((identity4() + dev.scale(xi / 4.0)).scale(0.25))
}

/// High-temperature equilibrium `(1/4)(1 + xi (Iz_A + ratio * Iz_B))`.
pub fn thermal_equilibrium(xi: f64, gamma_ratio: f64) -> Result<DensityMatrix> {
    check_xi(xi)?;
    if !gamma_ratio.is_finite() {
        return Err(Error::InvalidParameter("gamma ratio must be finite".into()));
    }
    let dev = spin_op(Subsystem::A, Axis::Z) + spin_op(Subsystem::B, Axis::Z).scale(gamma_ratio);
    finish((identity4() + dev.scale(xi)).scale(0.25))
}

/// Singlet/T0 mixture `1/4 + (xi/4)(|S0><S0| - |T0><T0|)` created before a spin-lock.
pub fn singlet_triplet_initial(xi: f64) -> Result<DensityMatrix> {
    check_xi(xi)?;
    let dev = SpinPairState::S0.projector() - SpinPairState::T0.projector();
    finish(identity4().scale(0.25) + dev.scale(xi / 4.0))
}

/// Long-lived singlet state reached after triplet equilibration: `werner(xi/3)`.
pub fn lls_state(xi: f64) -> Result<DensityMatrix> {
    check_xi(xi)?;
    werner(xi / 3.0)
}

/// State of the two-rate spin-lock relaxation model at time `t` seconds:
/// `1/4 + e^{-l2 t} (xi/4)(S0 - e^{-l1 t} T0 - (1 - e^{-l1 t}) T)`.
pub fn relaxation_model_state(t: f64, p: &RelaxModelParams) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    p.validate()?;
    let a = (-p.lambda1 * t).exp();
    let dev = SpinPairState::S0.projector()
        - SpinPairState::T0.projector().scale(a)
        - triplet_mixture().scale(1.0 - a);
    let amp = (-p.lambda2 * t).exp() * p.xi / 4.0;
    finish(identity4().scale(0.25) + dev.scale(amp))
}

/// Ingredients of a zero-discord state `sum_i p_i Pi_i (x) rho_{B|i}`.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalState {
    pub rho: DensityMatrix,
    /// Bloch direction of the first projector on A.
    pub axis: [f64; 3],
    pub probabilities: [f64; 2],
    /// Bloch vectors of the conditional states of B.
    pub conditional_bloch: [[f64; 3]; 2],
}

fn unit_vector(rng: &mut impl Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

fn qubit_from_bloch(b: [f64; 3]) -> ComplexMatrix {
    let mut m = identity2();
    for (axis, c) in Axis::ALL.into_iter().zip(b) {
        m = m + pauli(axis).scale(c);
    }
    m.scale(0.5)
}

/// Builds `p Pi_n (x) rho_0 + (1 - p) Pi_{-n} (x) rho_1` from explicit parts.
pub fn classical_state(
    axis: [f64; 3],
    p: f64,
    bloch0: [f64; 3],
    bloch1: [f64; 3],
) -> Result<ClassicalState> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter("measurement axis must be nonzero".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    let n = axis.map(|x| x / norm);
    let up = qubit_from_bloch(n);
    let down = qubit_from_bloch(n.map(|x| -x));
    let m = up.tensor(&qubit_from_bloch(bloch0))?.scale(p)
        + down.tensor(&qubit_from_bloch(bloch1))?.scale(1.0 - p);
    Ok(ClassicalState {
        rho: finish(m)?,
        axis: n,
        probabilities: [p, 1.0 - p],
        conditional_bloch: [bloch0, bloch1],
    })
}

/// Random zero-discord state: measurement axis uniform on the sphere,
/// probabilities flat on the simplex, conditional states of B uniform in the
/// Bloch ball.
pub fn random_classical_state(seed: u64) -> ClassicalState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = unit_vector(&mut rng);
    let p: f64 = rng.random_range(0.0..=1.0);
    let mut ball = || {
        let dir = unit_vector(&mut rng);
        let r = rng.random_range(0.0f64..=1.0).cbrt();
        dir.map(|x| x * r)
    };
    let b0 = ball();
    let b1 = ball();
    classical_state(axis, p, b0, b1).expect("valid by construction")
}

/// Random Bell-diagonal coefficients, uniform over the tetrahedron of valid states.
pub fn random_bd_vector(seed: u64) -> BdVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let r: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        if let Ok(v) = BdVector::new(r[0], r[1], r[2]) {
            return v;
        }
    }
}

/// Local unitary `exp(-i angle n.sigma / 2)` on one qubit.
pub fn qubit_rotation(axis: [f64; 3], angle: f64) -> ComplexMatrix {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let mut gen = ComplexMatrix::zeros(2).expect("dim 2");
    for (a, x) in Axis::ALL.into_iter().zip(axis) {
        gen = gen + pauli(a).scale(x / norm);
    }
    identity2().scale(c) + gen.scale_c(C64::new(0.0, -s))
}

/// Applies independent local unitaries `u_a (x) u_b`.
pub fn apply_local(rho: &DensityMatrix, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> DensityMatrix {
    let u = u_a.tensor(u_b).expect("one-qubit unitaries");
    rho.evolve(&u)
}
