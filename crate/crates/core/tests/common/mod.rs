#![allow(dead_code)]

use nmr_discord::matcore::{ComplexMatrix, C64};
use nmr_discord::DensityMatrix;
use proptest::prelude::*;

/// `G G^dag / Tr` for a complex 4x4 `G`, optionally mixed toward identity/4.
pub fn density_from(entries: &[f64], mix: f64) -> DensityMatrix {
    let g: Vec<C64> = entries.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    let g = ComplexMatrix::from_row_major(4, &g).unwrap();
    let m = g.matmul(&g.adjoint());
    let m = m.scale(1.0 / m.trace().re);
    let id = ComplexMatrix::identity(4).unwrap().scale(0.25);
    DensityMatrix::validate(m.scale(1.0 - mix) + id.scale(mix), 1e-9).unwrap()
}

pub fn arb_density() -> impl Strategy<Value = DensityMatrix> {
    (prop::collection::vec(-1.0f64..1.0, 32), 0.0f64..1.0)
        .prop_filter("non-degenerate", |(v, _)| v.iter().map(|x| x.abs()).sum::<f64>() > 1e-3)
        .prop_map(|(v, mix)| density_from(&v, mix))
}

pub fn arb_qubit_unitary() -> impl Strategy<Value = ComplexMatrix> {
    (prop::array::uniform3(-1.0f64..1.0), -10.0f64..10.0)
        .prop_filter("axis", |(a, _)| a.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(|(axis, angle)| nmr_discord::states::qubit_rotation(axis, angle))
}
