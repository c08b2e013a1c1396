pub mod dd;
pub mod discord;
pub mod fit;
pub mod prep;
pub mod spinlock;
pub mod state;
pub mod werner;

use anyhow::{ensure, Result};
use nmr_discord::correlations::GridSpec;

pub(crate) fn grid(n_cos_theta: usize, n_phi: usize, refine: bool) -> Result<GridSpec> {
    Ok(GridSpec::new(n_cos_theta, n_phi)?.with_refinement(refine))
}

pub(crate) fn check_xi(xi: f64) -> Result<()> {
    ensure!(xi > 0.0 && xi <= 1.0, "xi must lie in (0, 1], got {xi}");
    Ok(())
}

/// `n` evenly spaced points from `a` to `b`, both ends exact.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}
