//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot element and then
//! applies a real Givens rotation, so the iteration is the classical
//! symmetric Jacobi method carried over to complex Hermitian input. The
//! method is backward stable and resolves small eigenvalues to absolute
//! accuracy `~eps * ||A||`, which is what the entropy code relies on.

use super::{ComplexMatrix, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (descending) and row-major eigenvectors (column `k` belongs
/// to eigenvalue `k`) of an `n x n` Hermitian matrix given row-major.
pub fn hermitian_eigen(n: usize, a: &[C64]) -> (Vec<f64>, Vec<C64>) {
    assert_eq!(a.len(), n * n, "hermitian_eigen: expected {n}x{n} entries");
    let mut m: Vec<C64> = a.to_vec();
    // symmetrize so that round-off in the input cannot bias the result
    for i in 0..n {
        m[i * n + i] = C64::new(m[i * n + i].re, 0.0);
        for j in i + 1..n {
            let h = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            m[i * n + j] = h;
            m[j * n + i] = h.conj();
        }
    }
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
    }

    let scale: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(n, &mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].re.total_cmp(&m[i * n + i].re));
    let vals = order.iter().map(|&k| m[k * n + k].re).collect();
    let mut vecs = vec![ZERO; n * n];
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row * n + col] = v[row * n + k];
        }
    }
    (vals, vecs)
}

fn rotate(n: usize, m: &mut [C64], v: &mut [C64], p: usize, q: usize) {
    let apq = m[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    // phase that makes the pivot real and positive
    let ph = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // unitary G acting on columns p, q:
    //   G[p][p] = c,            G[p][q] = s
    //   G[q][p] = -s * conj(ph), G[q][q] = c * conj(ph)
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = -ph.conj() * s;
    let gqq = ph.conj() * c;

    // m <- m * G
    for k in 0..n {
        let mkp = m[k * n + p];
        let mkq = m[k * n + q];
        m[k * n + p] = mkp * gpp + mkq * gqp;
        m[k * n + q] = mkp * gpq + mkq * gqq;
    }
    // m <- G^dag * m
    for k in 0..n {
        let mpk = m[p * n + k];
        let mqk = m[q * n + k];
        m[p * n + k] = gpp.conj() * mpk + gqp.conj() * mqk;
        m[q * n + k] = gpq.conj() * mpk + gqq.conj() * mqk;
    }
    m[p * n + q] = ZERO;
    m[q * n + p] = ZERO;
    m[p * n + p].im = 0.0;
    m[q * n + q].im = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * gpp + vkq * gqp;
        v[k * n + q] = vkp * gpq + vkq * gqq;
    }
}

/// Real eigenvalues of a Hermitian matrix in descending order.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(m.dim(), m.as_slice()).0
}

/// Eigenvalues (descending) and the unitary whose columns are eigenvectors.
pub fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (vals, vecs) = hermitian_eigen(m.dim(), m.as_slice());
    let u = ComplexMatrix::from_row_major(m.dim(), &vecs).expect("same dimension");
    (vals, u)
}
