//! Dense 2x2 and 4x4 complex matrix algebra for one- and two-qubit states.
//!
//! Basis ordering is |00>, |01>, |10>, |11> with qubit A as the left tensor
//! factor. Spin operators follow the NMR convention `I = sigma / 2`.

mod eigen;
mod entropy;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{eigh, eigvals_hermitian, hermitian_eigen};
pub use entropy::{
    binary_deficit, entropy_deficit, mutual_information_bits, von_neumann_entropy,
};
pub(crate) use entropy::{deficit_from_offsets, excess};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default Hermiticity tolerance for constructed states.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default tolerance for trace and positivity checks.
pub const STATE_TOL: f64 = 1e-9;

/// Which qubit of a two-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Pauli axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Square complex matrix of dimension 2 or 4, stored row-major inline.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; 16],
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::BadDimension(dim))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: [ZERO; 16] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch { left: dim * dim, right: entries.len() });
        }
        let mut m = Self { dim, data: [ZERO; 16] };
        for (k, z) in entries.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: k / dim, col: k % dim });
            }
            m.data[k] = *z;
        }
        Ok(m)
    }

    /// Builds a matrix from separate real and imaginary row arrays.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        check_dim(dim)?;
        if im.len() != dim {
            return Err(Error::DimMismatch { left: dim, right: im.len() });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            if re[i].len() != dim {
                return Err(Error::DimMismatch { left: dim, right: re[i].len() });
            }
            if im[i].len() != dim {
                return Err(Error::DimMismatch { left: dim, right: im[i].len() });
            }
            for j in 0..dim {
                entries.push(C64::new(re[i][j], im[i][j]));
            }
        }
        Self::from_row_major(dim, &entries)
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        Ok(m)
    }

    /// Outer product |v><v|.
    pub fn projector(v: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(v.len())?;
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn real_parts(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)].re).collect()).collect()
    }

    pub fn imag_parts(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)].im).collect()).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut out = *self;
        for z in out.data[..self.dim * self.dim].iter_mut() {
            *z = f(*z);
        }
        out
    }

    /// Matrix product; panics on mismatched dimensions.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self { dim: n, data: [ZERO; 16] };
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    /// `U * self * U^dag`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Kronecker product with `self` as the left (qubit A) factor.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        if self.dim != 2 || rhs.dim != 2 {
            return Err(Error::DimMismatch { left: self.dim, right: rhs.dim });
        }
        let mut out = Self { dim: 4, data: [ZERO; 16] };
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        out[(2 * a + c, 2 * b + d)] = self[(a, b)] * rhs[(c, d)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Hilbert-Schmidt inner product Tr[self^dag * rhs].
    pub fn hs_inner(&self, rhs: &Self) -> C64 {
        assert_eq!(self.dim, rhs.dim, "inner product dimension mismatch");
        let n = self.dim * self.dim;
        self.data[..n].iter().zip(&rhs.data[..n]).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data[..self.dim * self.dim].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim, "comparison dimension mismatch");
        let n = self.dim * self.dim;
        self.data[..n].iter().zip(&rhs.data[..n]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest |m_ij - conj(m_ji)|.
    pub fn hermiticity_violation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Hermitian part (m + m^dag)/2 with an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        let mut h = (*self + self.adjoint()).scale(0.5);
        for i in 0..self.dim {
            h[(i, i)].im = 0.0;
        }
        h
    }

    /// Traceless part `m - (Tr m / dim) * 1`.
    pub fn traceless_part(&self) -> Self {
        let shift = self.trace() / self.dim as f64;
        let mut out = *self;
        for i in 0..self.dim {
            out[(i, i)] -= shift;
        }
        out
    }

    /// Entries as row-major slice.
    pub fn as_slice(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        let mut out = self;
        for k in 0..self.dim * self.dim {
            out.data[k] += rhs.data[k];
        }
        out
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        let mut out = self;
        for k in 0..self.dim * self.dim {
            out.data[k] -= rhs.data[k];
        }
        out
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2).expect("dim 2")
}

pub fn identity4() -> ComplexMatrix {
    ComplexMatrix::identity(4).expect("dim 4")
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let e = match axis {
        Axis::X => [ZERO, ONE, ONE, ZERO],
        Axis::Y => [ZERO, -I, I, ZERO],
        Axis::Z => [ONE, ZERO, ZERO, -ONE],
    };
    ComplexMatrix::from_row_major(2, &e).expect("dim 2")
}

/// Single-spin operator `I_axis = sigma_axis / 2` on the chosen qubit.
pub fn spin_op(on: Subsystem, axis: Axis) -> ComplexMatrix {
    let s = pauli(axis).scale(0.5);
    embed(on, &s)
}

/// Embeds a one-qubit operator on qubit `on` of the two-qubit register.
pub fn embed(on: Subsystem, op: &ComplexMatrix) -> ComplexMatrix {
    match on {
        Subsystem::A => op.tensor(&identity2()),
        Subsystem::B => identity2().tensor(op),
    }
    .expect("one-qubit operator")
}

/// `sigma_i (x) sigma_j`.
pub fn pauli_pair(a: Axis, b: Axis) -> ComplexMatrix {
    pauli(a).tensor(&pauli(b)).expect("dim 2 factors")
}

/// Kronecker product with qubit A on the left.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.tensor(b)
}

/// Exchanges the two qubits: `SWAP * m * SWAP`.
pub fn swap_qubits(m: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(m.dim(), 4);
    let perm = [0usize, 2, 1, 3];
    let mut out = *m;
    for i in 0..4 {
        for j in 0..4 {
            out[(perm[i], perm[j])] = m[(i, j)];
        }
    }
    out
}

/// Reduced operator of the kept qubit.
pub fn partial_trace_matrix(m: &ComplexMatrix, keep: Subsystem) -> ComplexMatrix {
    assert_eq!(m.dim(), 4, "partial trace needs a two-qubit operator");
    let mut out = ComplexMatrix::zeros(2).expect("dim 2");
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::A => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
                Subsystem::B => m[(i, j)] + m[(2 + i, 2 + j)],
            };
        }
    }
    out
}

/// Unit-trace, Hermitian, positive-semidefinite state of dimension 2 or 4.
#[derive(Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix {:?}", self.mat)
    }
}

impl DensityMatrix {
    /// Checks Hermiticity, trace and positivity at `tol`.
    pub fn validate(m: ComplexMatrix, tol: f64) -> Result<Self> {
        validate_density(m, tol)
    }

    /// Wraps a matrix that is a state by construction (pure-Hermitian input,
    /// trace one). The Hermitian part is taken to scrub round-off.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.hermiticity_violation() < 1e-8);
        Self { mat: m.hermitian_part() }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let id = ComplexMatrix::identity(dim)?;
        Ok(Self { mat: id.scale(1.0 / dim as f64) })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn deviation(&self) -> DeviationMatrix {
        DeviationMatrix { mat: self.mat.traceless_part() }
    }

    /// Purity Tr[rho^2].
    pub fn purity(&self) -> f64 {
        self.mat.hs_inner(&self.mat).re
    }

    pub fn partial_trace(&self, keep: Subsystem) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// `U rho U^dag` for a unitary `U`.
    pub fn evolve(&self, u: &ComplexMatrix) -> DensityMatrix {
        DensityMatrix::from_trusted(self.mat.conjugate_by(u))
    }

    /// Convex mixture `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> DensityMatrix {
        DensityMatrix::from_trusted(self.mat.scale(w) + other.mat.scale(1.0 - w))
    }

    pub fn swapped(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(swap_qubits(&self.mat))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvals_hermitian(&self.mat)
    }
}

/// Traceless Hermitian part of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationMatrix {
    mat: ComplexMatrix,
}

impl DeviationMatrix {
    /// Accepts a traceless Hermitian matrix.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let v = m.hermiticity_violation();
        if v > HERMITIAN_TOL {
            return Err(Error::NotHermitian { violation: v, tol: HERMITIAN_TOL });
        }
        let tr = m.trace().re;
        if tr.abs() > STATE_TOL {
            return Err(Error::TraceNotOne { trace: tr, tol: STATE_TOL });
        }
        Ok(Self { mat: m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Tr[dev^2].
    pub fn norm_sqr(&self) -> f64 {
        self.mat.hs_inner(&self.mat).re
    }

    /// Tr[self * other] for Hermitian operands.
    pub fn overlap(&self, other: &DeviationMatrix) -> f64 {
        self.mat.hs_inner(&other.mat).re
    }
}

pub fn validate_density(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    let violation = m.hermiticity_violation();
    if violation > tol {
        return Err(Error::NotHermitian { violation, tol });
    }
    let h = m.hermitian_part();
    let trace = h.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceNotOne { trace, tol });
    }
    let min_eigenvalue = eigvals_hermitian(&h).last().copied().unwrap_or(0.0);
    if min_eigenvalue < -tol {
        return Err(Error::NotPositive { min_eigenvalue, tol });
    }
    Ok(DensityMatrix { mat: h })
}

pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimMismatch { left: 4, right: rho.dim() });
    }
    Ok(DensityMatrix::from_trusted(partial_trace_matrix(rho.matrix(), keep)))
}

/// Deviation-overlap fidelity between the traceless parts of two states.
pub fn fidelity(test: &DensityMatrix, target: &DensityMatrix) -> Result<f64> {
    let dt = test.deviation();
    let dw = target.deviation();
    let nt = nonzero_norm(&dt)?;
    let nw = nonzero_norm(&dw)?;
    Ok(dt.overlap(&dw) / (nt * nw).sqrt())
}

/// Fidelity normalized by the initial deviation instead of the current one,
/// so that it tracks the decay of the deviation's magnitude.
pub fn attenuated_fidelity(
    rho_tau: &DensityMatrix,
    rho_initial: &DensityMatrix,
    target: &DensityMatrix,
) -> Result<f64> {
    let d0 = nonzero_norm(&rho_initial.deviation())?;
    let dw = target.deviation();
    let nw = nonzero_norm(&dw)?;
    Ok(rho_tau.deviation().overlap(&dw) / (d0 * nw).sqrt())
}

const DEVIATION_FLOOR: f64 = 1e-14;

fn nonzero_norm(d: &DeviationMatrix) -> Result<f64> {
    let n = d.norm_sqr();
    if n.sqrt() < DEVIATION_FLOOR {
        Err(Error::ZeroDeviation { norm: n.sqrt() })
    } else {
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ket(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let m = identity4().scale(0.25);
        assert!(validate_density(m, STATE_TOL).is_ok());
    }

    #[test]
    fn wrong_trace_rejected() {
        let m = identity4().scale(1.5 / 4.0);
        match validate_density(m, STATE_TOL) {
            Err(Error::TraceNotOne { trace, .. }) => assert_abs_diff_eq!(trace, 1.5),
            other => panic!("expected TraceNotOne, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_rejected_with_magnitude() {
        let mut m = identity4().scale(0.25);
        m[(0, 1)] = C64::new(1e-3, 0.0);
        match validate_density(m, STATE_TOL) {
            Err(Error::NotHermitian { violation, .. }) => assert_abs_diff_eq!(violation, 1e-3),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = ComplexMatrix::diagonal(&ket(&[0.6, 0.5, 0.0, -0.1])).unwrap();
        assert!(matches!(validate_density(m, STATE_TOL), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn roundoff_negative_eigenvalue_is_clamped() {
        let m = ComplexMatrix::diagonal(&ket(&[1.0 + 1e-12, 0.0, 0.0, -1e-12])).unwrap();
        let rho = validate_density(m, STATE_TOL).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn bad_dimension() {
        assert_eq!(ComplexMatrix::zeros(3), Err(Error::BadDimension(3)));
        assert!(matches!(
            ComplexMatrix::from_row_major(2, &[ONE, C64::new(f64::NAN, 0.0), ZERO, ONE]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn tensor_examples() {
        let zi = tensor(&pauli(Axis::Z), &identity2()).unwrap();
        assert_eq!(zi, ComplexMatrix::diagonal(&ket(&[1.0, 1.0, -1.0, -1.0])).unwrap());
        assert_eq!(tensor(&identity2(), &identity2()).unwrap(), identity4());
        let xx = tensor(&pauli(Axis::X), &pauli(Axis::X)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j == 3 { ONE } else { ZERO };
                assert_eq!(xx[(i, j)], expect);
            }
        }
        assert!(matches!(tensor(&identity4(), &identity2()), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let ra = ComplexMatrix::from_row_major(
            2,
            &[C64::new(0.7, 0.0), C64::new(0.1, -0.2), C64::new(0.1, 0.2), C64::new(0.3, 0.0)],
        )
        .unwrap();
        let rb = ComplexMatrix::from_row_major(
            2,
            &[C64::new(0.4, 0.0), C64::new(0.0, 0.3), C64::new(0.0, -0.3), C64::new(0.6, 0.0)],
        )
        .unwrap();
        let rho = validate_density(tensor(&ra, &rb).unwrap(), STATE_TOL).unwrap();
        let a = partial_trace(&rho, Subsystem::A).unwrap();
        let b = partial_trace(&rho, Subsystem::B).unwrap();
        assert!(a.matrix().max_abs_diff(&ra) <= 1e-12);
        assert!(b.matrix().max_abs_diff(&rb) <= 1e-12);
    }

    #[test]
    fn partial_trace_of_00() {
        let rho = validate_density(ComplexMatrix::projector(&ket(&[1.0, 0.0, 0.0, 0.0])).unwrap(), STATE_TOL)
            .unwrap();
        let b = partial_trace(&rho, Subsystem::B).unwrap();
        assert_eq!(*b.matrix(), ComplexMatrix::diagonal(&ket(&[1.0, 0.0])).unwrap());
    }

    #[test]
    fn swap_exchanges_factors() {
        let m = tensor(&pauli(Axis::Z), &pauli(Axis::X)).unwrap();
        assert_eq!(swap_qubits(&m), tensor(&pauli(Axis::X), &pauli(Axis::Z)).unwrap());
    }

    #[test]
    fn fidelity_self_is_one_and_zero_deviation_errors() {
        let s = 0.5f64.sqrt();
        let bell = ComplexMatrix::projector(&ket(&[0.0, s, -s, 0.0])).unwrap();
        let rho = DensityMatrix::from_trusted(bell.scale(0.3) + identity4().scale(0.7 / 4.0));
        assert_abs_diff_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(matches!(fidelity(&mixed, &rho), Err(Error::ZeroDeviation { .. })));
        assert_abs_diff_eq!(attenuated_fidelity(&rho, &rho, &rho).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_is_signed() {
        let up = DensityMatrix::from_trusted(ComplexMatrix::diagonal(&ket(&[0.3, 0.7])).unwrap());
        let down = DensityMatrix::from_trusted(ComplexMatrix::diagonal(&ket(&[0.7, 0.3])).unwrap());
        assert_abs_diff_eq!(fidelity(&up, &down).unwrap(), -1.0, epsilon = 1e-12);
    }
}
