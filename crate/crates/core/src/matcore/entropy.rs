//! Von Neumann entropy in bits.
//!
//! States in this crate are often within 1e-5 of the maximally mixed state,
//! where `H(rho)` sits a hair below `log2(dim)` and correlation measures are
//! differences of such entropies. Everything here is therefore expressed
//! through the *entropy deficit* `log2(dim) - H(rho)`, evaluated from the
//! eigenvalues of the traceless part with series expansions near zero, so
//! that differences of deficits keep full relative precision.

use std::f64::consts::LN_2;

use super::{eigvals_hermitian, DensityMatrix, Subsystem};

/// `(1 + d) ln(1 + d) - d`, accurate for small `|d|`; `d >= -1`.
pub(crate) fn excess(d: f64) -> f64 {
    let d = d.max(-1.0);
    if d.abs() < 0.1 {
        // sum_{k>=2} (-1)^k d^k / (k (k - 1))
        let mut term = d * d;
        let mut sum = 0.0;
        let mut k = 2.0;
        while k < 40.0 {
            let contrib = term / (k * (k - 1.0));
            sum += contrib;
            if contrib.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= -d;
            k += 1.0;
        }
        sum
    } else if d == -1.0 {
        1.0
    } else {
        (1.0 + d) * d.ln_1p() - d
    }
}

/// `log2(dim) - H` for eigenvalues `(1 + d_i) / dim`, with `sum d_i = 0`.
pub(crate) fn deficit_from_offsets(dim: usize, offsets: &[f64]) -> f64 {
    let s: f64 = offsets.iter().map(|&d| excess(d)).sum();
    (s / (dim as f64 * LN_2)).max(0.0)
}

/// `1 - h((1 + r)/2)` for a qubit with Bloch vector length `r`.
pub fn binary_deficit(r: f64) -> f64 {
    let r = r.abs().min(1.0);
    deficit_from_offsets(2, &[r, -r])
}

/// `log2(dim) - H(rho)`. Eigenvalues below zero are clamped to zero.
pub fn entropy_deficit(rho: &DensityMatrix) -> f64 {
    let dim = rho.dim();
    let dev = rho.deviation();
    let offsets: Vec<f64> =
        eigvals_hermitian(dev.matrix()).into_iter().map(|e| e * dim as f64).collect();
    deficit_from_offsets(dim, &offsets)
}

/// `-sum lambda log2 lambda`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let dim = rho.dim() as f64;
    (dim.log2() - entropy_deficit(rho)).clamp(0.0, dim.log2())
}

/// `H(A) + H(B) - H(AB)` in bits, evaluated as a difference of deficits.
pub fn mutual_information_bits(rho: &DensityMatrix) -> f64 {
    assert_eq!(rho.dim(), 4, "mutual information needs a two-qubit state");
    let ra = rho.partial_trace(Subsystem::A).expect("two-qubit state");
    let rb = rho.partial_trace(Subsystem::B).expect("two-qubit state");
    (entropy_deficit(rho) - entropy_deficit(&ra) - entropy_deficit(&rb)).max(0.0)
}
