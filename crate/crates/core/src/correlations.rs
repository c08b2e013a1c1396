//! Correlation measures for two-qubit states.
//!
//! Classical correlation is evaluated for projective measurements on qubit A.
//! All entropies go through deficits `log2(dim) - H` (see [`crate::matcore`]),
//! which keeps discord values of order `1e-10` bits accurate for states that
//! sit very close to the maximally mixed state.

use std::f64::consts::{LN_2, TAU};

use crate::error::{Error, Result};
use crate::matcore::{
    binary_deficit, deficit_from_offsets, embed, excess, hermitian_eigen, identity2,
    mutual_information_bits, pauli, pauli_pair, Axis, ComplexMatrix, DensityMatrix, Subsystem,
    C64, STATE_TOL,
};
use crate::states::BdVector;

/// Probability below which a measurement branch is treated as absent.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

const REFINE_ITERATIONS: usize = 20;

/// Orthonormal projective basis on qubit A:
/// `|u> = cos t |0> + e^{i phi} sin t |1>`, `|v> = sin t |0> - e^{i phi} cos t |1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn from_cos_theta(cos_theta: f64, phi: f64) -> Self {
        Self { theta: cos_theta.clamp(-1.0, 1.0).acos(), phi }
    }

    /// Bloch vector of `|u><u|`.
    pub fn bloch(&self) -> [f64; 3] {
        let (s2, c2) = (2.0 * self.theta).sin_cos();
        [s2 * self.phi.cos(), s2 * self.phi.sin(), c2]
    }

    pub fn kets(&self) -> [[C64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]]
    }

    /// `(Pi_u, Pi_v)` as 2x2 matrices.
    pub fn projectors(&self) -> (ComplexMatrix, ComplexMatrix) {
        let [u, v] = self.kets();
        (
            ComplexMatrix::projector(&u).expect("qubit ket"),
            ComplexMatrix::projector(&v).expect("qubit ket"),
        )
    }
}

/// Discretization of the measurement sphere: uniform in `cos theta` over
/// `[-1, 1]` and uniform in `phi` over `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n_cos_theta: usize,
    pub n_phi: usize,
    /// Run a local coordinate-shrink search around the grid optimum.
    pub refine: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_cos_theta: 101, n_phi: 100, refine: false }
    }
}

impl GridSpec {
    pub fn new(n_cos_theta: usize, n_phi: usize) -> Result<Self> {
        if n_cos_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2x2 points, got {n_cos_theta}x{n_phi}"
            )));
        }
        Ok(Self { n_cos_theta, n_phi, refine: false })
    }

    pub fn with_refinement(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }

    pub fn total_points(&self) -> usize {
        self.n_cos_theta * self.n_phi
    }

    /// Finer grid containing every point of this one.
    pub fn refined(&self) -> Self {
        Self { n_cos_theta: 2 * self.n_cos_theta - 1, n_phi: 2 * self.n_phi, refine: self.refine }
    }

    fn cos_step(&self) -> f64 {
        2.0 / (self.n_cos_theta - 1) as f64
    }

    fn phi_step(&self) -> f64 {
        TAU / self.n_phi as f64
    }

    fn cos_theta(&self, i: usize) -> f64 {
        if i + 1 == self.n_cos_theta {
            1.0
        } else {
            -1.0 + i as f64 * self.cos_step()
        }
    }

    /// Bases in row-major order of (cos theta index, phi index).
    pub fn bases(&self) -> impl Iterator<Item = MeasurementBasis> + '_ {
        (0..self.n_cos_theta).flat_map(move |i| {
            (0..self.n_phi).map(move |k| {
                MeasurementBasis::from_cos_theta(self.cos_theta(i), k as f64 * self.phi_step())
            })
        })
    }
}

/// Outcome of a grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordReport {
    pub mutual_info: f64,
    pub j_max: f64,
    pub discord: f64,
    pub argmax_basis: MeasurementBasis,
    /// Smallest classical correlation seen on the grid.
    pub j_min: f64,
    /// A measurement branch at the optimum had vanishing probability.
    pub degenerate_outcome: bool,
}

impl DiscordReport {
    /// Spread of the classical correlation over the grid.
    pub fn j_spread(&self) -> f64 {
        self.j_max - self.j_min
    }
}

/// Local Bloch vectors and correlation matrix:
/// `rho = (1/4)(1 + x.sigma (x) 1 + 1 (x) y.sigma + sum T_ij sigma_i (x) sigma_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn recompose(&self) -> ComplexMatrix {
        let mut m = identity2().tensor(&identity2()).expect("qubits");
        for (i, a) in Axis::ALL.into_iter().enumerate() {
            m = m + embed(Subsystem::A, &pauli(a)).scale(self.x[i]);
            m = m + embed(Subsystem::B, &pauli(a)).scale(self.y[i]);
            for (j, b) in Axis::ALL.into_iter().enumerate() {
                m = m + pauli_pair(a, b).scale(self.t[i][j]);
            }
        }
        m.scale(0.25)
    }

    pub fn t_norm_sqr(&self) -> f64 {
        self.t.iter().flatten().map(|v| v * v).sum()
    }
}

pub fn bloch_decompose(rho: &DensityMatrix) -> BlochForm {
    assert_eq!(rho.dim(), 4, "Bloch decomposition needs a two-qubit state");
    // the deviation carries all non-identity components without the 1/4 offset
    let dev = *rho.deviation().matrix();
    let comp = |op: &ComplexMatrix| dev.hs_inner(op).re;
    let mut f = BlochForm { x: [0.0; 3], y: [0.0; 3], t: [[0.0; 3]; 3] };
    for (i, a) in Axis::ALL.into_iter().enumerate() {
        f.x[i] = comp(&embed(Subsystem::A, &pauli(a)));
        f.y[i] = comp(&embed(Subsystem::B, &pauli(a)));
        for (j, b) in Axis::ALL.into_iter().enumerate() {
            f.t[i][j] = comp(&pauli_pair(a, b));
        }
    }
    f
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Probabilities and conditional states of B after measuring A.
#[derive(Debug, Clone, Copy)]
pub struct Conditioned {
    pub probabilities: [f64; 2],
    pub states: [DensityMatrix; 2],
    /// Bloch vectors of the conditional states.
    pub bloch: [[f64; 3]; 2],
    pub degenerate: bool,
}

struct Branches {
    p: [f64; 2],
    b: [[f64; 3]; 2],
    live: [bool; 2],
}

fn branches(f: &BlochForm, n: [f64; 3]) -> Branches {
    let xn = dot3(f.x, n);
    // T^T n
    let tn: [f64; 3] = std::array::from_fn(|j| (0..3).map(|i| f.t[i][j] * n[i]).sum());
    let mut out = Branches { p: [0.0; 2], b: [[0.0; 3]; 2], live: [true; 2] };
    for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
        let w = 1.0 + sign * xn;
        out.p[k] = 0.5 * w;
        if out.p[k] < DEGENERATE_PROBABILITY {
            out.live[k] = false;
        } else {
            out.b[k] = std::array::from_fn(|j| (f.y[j] + sign * tn[j]) / w);
        }
    }
    out
}

fn j_at(f: &BlochForm, def_b: f64, n: [f64; 3]) -> (f64, bool) {
    let br = branches(f, n);
    let mut j = -def_b;
    let mut degenerate = false;
    for k in 0..2 {
        if br.live[k] {
            j += br.p[k] * binary_deficit(norm3(br.b[k]));
        } else {
            // an absent branch carries no conditional entropy
            j += br.p[k];
            degenerate = true;
        }
    }
    (j, degenerate)
}

fn qubit_state(b: [f64; 3]) -> DensityMatrix {
    let r = norm3(b);
    let b = if r > 1.0 { b.map(|c| c / r) } else { b };
    let mut m = identity2();
    for (a, c) in Axis::ALL.into_iter().zip(b) {
        m = m + pauli(a).scale(c);
    }
    DensityMatrix::validate(m.scale(0.5), STATE_TOL).expect("Bloch vector inside the ball")
}

/// Mutual information `H(A) + H(B) - H(AB)` in bits.
pub fn mutual_information(rho: &DensityMatrix) -> f64 {
    mutual_information_bits(rho)
}

/// Measures qubit A in basis `b`. A branch with probability below
/// [`DEGENERATE_PROBABILITY`] gets the maximally mixed conditional state and
/// sets the `degenerate` flag.
pub fn project_and_condition(rho: &DensityMatrix, b: &MeasurementBasis) -> Conditioned {
    let f = bloch_decompose(rho);
    let br = branches(&f, b.bloch());
    let bloch = [0, 1].map(|k| if br.live[k] { br.b[k] } else { [0.0; 3] });
    Conditioned {
        probabilities: br.p,
        states: bloch.map(qubit_state),
        bloch,
        degenerate: !(br.live[0] && br.live[1]),
    }
}

/// `H(rho_B) - sum_i p_i H(rho_B|i)` in bits.
pub fn classical_correlation_at(rho: &DensityMatrix, b: &MeasurementBasis) -> f64 {
    let f = bloch_decompose(rho);
    j_at(&f, binary_deficit(norm3(f.y)), b.bloch()).0
}

/// Discord `D(B|A) = I - max_b J_b` with the maximum taken over the grid.
/// Since the grid only samples the bases, the result bounds the true
/// discord from above.
pub fn discord_grid(rho: &DensityMatrix, g: &GridSpec) -> DiscordReport {
    let f = bloch_decompose(rho);
    let def_b = binary_deficit(norm3(f.y));
    let eval = |c: f64, phi: f64| {
        let basis = MeasurementBasis::from_cos_theta(c, phi);
        let (j, deg) = j_at(&f, def_b, basis.bloch());
        (j, deg, basis)
    };

    let mut best = (f64::NEG_INFINITY, false, MeasurementBasis::new(0.0, 0.0));
    let mut best_idx = (0usize, 0usize);
    let mut j_min = f64::INFINITY;
    for i in 0..g.n_cos_theta {
        for k in 0..g.n_phi {
            let r = eval(g.cos_theta(i), k as f64 * g.phi_step());
            j_min = j_min.min(r.0);
            // strict comparison keeps the first (smallest-index) optimum
            if r.0 > best.0 {
                best = r;
                best_idx = (i, k);
            }
        }
    }

    if g.refine {
        let mut c = g.cos_theta(best_idx.0);
        let mut phi = best_idx.1 as f64 * g.phi_step();
        let (mut dc, mut dphi) = (g.cos_step(), g.phi_step());
        for _ in 0..REFINE_ITERATIONS {
            dc *= 0.5;
            dphi *= 0.5;
            let candidates = [
                ((c + dc).min(1.0), phi),
                ((c - dc).max(-1.0), phi),
                (c, phi + dphi),
                (c, phi - dphi),
            ];
            for (cc, pp) in candidates {
                let r = eval(cc, pp.rem_euclid(TAU));
                if r.0 > best.0 {
                    best = r;
                    c = cc;
                    phi = pp.rem_euclid(TAU);
                }
            }
        }
    }

    let mutual_info = mutual_information(rho);
    DiscordReport {
        mutual_info,
        j_max: best.0,
        discord: (mutual_info - best.0).max(0.0),
        argmax_basis: best.2,
        j_min,
        degenerate_outcome: best.1,
    }
}

/// `D(A|B)`: the grid search with the roles of the qubits exchanged.
pub fn discord_swapped(rho: &DensityMatrix, g: &GridSpec) -> DiscordReport {
    discord_grid(&rho.swapped(), g)
}

/// Bell-diagonal projection of a state and the norm of what was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdProjection {
    pub r: BdVector,
    /// Euclidean norm of the local Bloch vectors and off-diagonal correlations.
    pub discarded_norm: f64,
}

/// Keeps only the diagonal correlations `T_jj`.
pub fn bd_project(rho: &DensityMatrix) -> Result<BdProjection> {
    let f = bloch_decompose(rho);
    let r = BdVector::new(f.t[0][0], f.t[1][1], f.t[2][2])?;
    let mut dropped = dot3(f.x, f.x) + dot3(f.y, f.y);
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                dropped += f.t[i][j] * f.t[i][j];
            }
        }
    }
    Ok(BdProjection { r, discarded_norm: dropped.sqrt() })
}

/// Closed-form discord of a Bell-diagonal state in bits.
pub fn discord_bd(r: &BdVector) -> f64 {
    let offsets = r.eigenvalues().map(|l| 4.0 * l - 1.0);
    (deficit_from_offsets(4, &offsets) - binary_deficit(r.max_abs())).max(0.0)
}

/// Discord of `werner(eps)` in bits; behaves as `eps^2 / ln 2` for small `eps`.
pub fn werner_discord_analytic(epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::PurityOutOfRange(epsilon));
    }
    let e = epsilon;
    let d = (excess(-e) + excess(3.0 * e)) / 4.0 - excess(e) / 2.0;
    Ok((d / LN_2).max(0.0))
}

/// Geometric discord `(|x|^2 + |T|^2 - eta_max) / 4`, where `eta_max` is the
/// largest eigenvalue of `x x^T + T T^T`.
pub fn geometric_discord(rho: &DensityMatrix) -> f64 {
    geometric_discord_of(&bloch_decompose(rho))
}

pub fn geometric_discord_of(f: &BlochForm) -> f64 {
    let mut k = [C64::new(0.0, 0.0); 9];
    for i in 0..3 {
        for j in 0..3 {
            let tt: f64 = (0..3).map(|m| f.t[i][m] * f.t[j][m]).sum();
            k[i * 3 + j] = C64::new(f.x[i] * f.x[j] + tt, 0.0);
        }
    }
    let (vals, _) = hermitian_eigen(3, &k);
    ((dot3(f.x, f.x) + f.t_norm_sqr() - vals[0]) / 4.0).max(0.0)
}
