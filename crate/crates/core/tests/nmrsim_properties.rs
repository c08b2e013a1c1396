mod common;

use std::f64::consts::{LN_2, PI};

use common::arb_density;
use nmr_discord::correlations::{discord_grid, werner_discord_analytic, GridSpec};
use nmr_discord::matcore::{fidelity, STATE_TOL};
use nmr_discord::nmrsim::*;
use nmr_discord::states::{pseudopure_00, werner};
use proptest::prelude::*;

fn spectrum_diff(a: &nmr_discord::DensityMatrix, b: &nmr_discord::DensityMatrix) -> f64 {
    a.eigenvalues().iter().zip(b.eigenvalues()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn arb_target() -> impl Strategy<Value = Target> {
    prop_oneof![Just(Target::A), Just(Target::B), Just(Target::Both)]
}

proptest! {
    #[test]
    fn unitary_steps_preserve_spectrum(
        rho in arb_density(),
        target in arb_target(),
        angle in -7.0f64..7.0,
        phase in -7.0f64..7.0,
        t in 0.0f64..0.1,
        iso in any::<bool>(),
    ) {
        let sys = SpinSystem::chlorothiophene();
        let mode = if iso { CouplingMode::Isotropic } else { CouplingMode::Zz };
        let pulsed = rho.evolve(&rotation_unitary(target, angle, phase));
        let delayed = evolve_delay(&pulsed, t, &sys, mode).unwrap();
        for out in [pulsed, delayed] {
            prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(spectrum_diff(&out, &rho) <= 1e-12);
        }
    }

    #[test]
    fn crush_keeps_trace_and_positivity(rho in arb_density()) {
        let out = gradient_crush(&rho);
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(out.matrix().hermiticity_violation() == 0.0);
        prop_assert!(out.eigenvalues()[3] >= -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn noisy_evolution_stays_physical(rho in arb_density(), seed in any::<u64>(), t1 in any::<bool>()) {
        let sys = SpinSystem::chloroform();
        let noise = NoiseModel { ou_sigma: 30.0, ou_tau_c: 2e-3, t1_channel: t1, ensemble_size: 8, seed, thermal_xi: 1e-2 };
        let out = simulate_dd(&rho, &DdScheme::cpmg(), 0.02, &sys, &noise, &[0.01, 0.02]).unwrap();
        for s in out {
            prop_assert!((s.matrix().trace().re - 1.0).abs() <= 1e-12);
            prop_assert!(s.matrix().hermiticity_violation() <= 1e-12);
            prop_assert!(s.eigenvalues()[3] >= -STATE_TOL);
        }
    }
}

#[test]
fn werner_scan_period_and_extremes() {
    let sys = SpinSystem::chloroform();
    let xi = 1e-2;
    let pp = pseudopure_00(xi).unwrap();
    let g = GridSpec::default();
    let unit = (xi / 8.0).powi(2) / LN_2;
    let d = |theta: f64| discord_grid(&prepare_werner(&pp, theta, &sys).unwrap(), &g).discord;
    for theta in [0.0, PI, 2.0 * PI] {
        // zero up to the angular resolution of the grid
        assert!(d(theta) / unit <= 1e-3, "theta {theta}");
    }
    let dw = werner_discord_analytic(xi / 8.0).unwrap();
    for theta in [PI / 2.0, 1.5 * PI] {
        assert!((d(theta) - dw).abs() / unit <= 1e-3);
    }
    for k in 0..7 {
        let theta = k as f64 * PI / 6.0;
        assert!((d(theta) - d(theta + PI)).abs() / unit <= 1e-6);
    }
}

#[test]
fn dephasing_never_raises_deviation_norm() {
    let sys = SpinSystem::chloroform();
    let rho = werner(1e-2).unwrap();
    let noise = NoiseModel { ou_sigma: 20.0, ou_tau_c: 4e-3, t1_channel: false, ensemble_size: 256, seed: 11, thermal_xi: 1e-2 };
    let times: Vec<f64> = (0..=40).map(|k| k as f64 * 5e-3).collect();
    let out = simulate_dd(&rho, &DdScheme::None, 0.2, &sys, &noise, &times).unwrap();
    let norms: Vec<f64> = out.iter().map(|s| s.deviation().norm_sqr()).collect();
    // tolerance covers the Monte-Carlo fluctuation of a 256-member ensemble
    let slack = 2.0 * norms[0] / (noise.ensemble_size as f64).sqrt();
    for w in norms.windows(2) {
        assert!(w[1] <= w[0] + slack, "{} -> {}", w[0], w[1]);
    }
    assert!(norms[40] < 0.95 * norms[0]);
}

#[test]
fn ensemble_variance_scales_inversely_with_size() {
    let sys = SpinSystem::chloroform();
    let rho = werner(1e-2).unwrap();
    let fid_spread = |n: usize| {
        let vals: Vec<f64> = (0..40u64)
            .map(|seed| {
                let noise = NoiseModel { ou_sigma: 40.0, ou_tau_c: 4e-3, t1_channel: false, ensemble_size: n, seed, thermal_xi: 1e-2 };
                let s = simulate_dd(&rho, &DdScheme::None, 0.05, &sys, &noise, &[0.05]).unwrap();
                fidelity(&s[0], &rho).unwrap()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64
    };
    let ratio = fid_spread(16) / fid_spread(32);
    // an F(39, 39) ratio of sample variances lies in [1/2, 8] far more often than not
    assert!((1.0..=4.0).contains(&ratio), "variance ratio {ratio}");
}
