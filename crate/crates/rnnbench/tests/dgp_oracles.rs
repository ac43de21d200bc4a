//! Generator oracles: closed-form values, hand recursions, an independent
//! ARMA(2,2) check for the ARFIMA path, integrator convergence, and
//! replication/persistence behavior.

use rnnbench::dgp::{
    arfima_core, chaotic_signal, gaussian_noise, generate, generate_arfima, generate_chaotic,
    generate_closed_form, generate_recursive, henon_map, lorenz_deriv, psi_coefficients,
    read_series_csv, recursive_core, replicate, rossler_deriv, DgpKind, DgpSpec, NoiseSpec,
    PreSamples,
};
use rnnbench::error::Error;
use std::f64::consts::PI;

fn silent_spec(kind: DgpKind, length: usize) -> DgpSpec {
    DgpSpec::new(kind, length, NoiseSpec::silent(1))
}

#[test]
fn noise_zero_std_is_constant() {
    let eps = gaussian_noise(5, &NoiseSpec::silent(9));
    assert_eq!(eps, vec![0.0; 5]);
}

#[test]
fn noise_moments_within_standard_error_bounds() {
    let n = 100_000;
    let eps = gaussian_noise(n, &NoiseSpec::paper(42));
    let mean = eps.iter().sum::<f64>() / n as f64;
    let var = eps.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    // 3-sigma bounds of the estimators at sigma = 0.2
    assert!(mean.abs() < 0.005, "sample mean {mean}");
    assert!((0.197..=0.203).contains(&std), "sample std {std}");
}

#[test]
fn noise_is_seed_deterministic() {
    let spec = NoiseSpec::paper(7);
    assert_eq!(gaussian_noise(1000, &spec), gaussian_noise(1000, &spec));
}

#[test]
fn closed_form_hand_values() {
    // T at t=1, SS at a full period, TCS at t=100
    let t = generate_closed_form(&silent_spec(DgpKind::T, 10)).unwrap();
    assert!((t.values[0] - 10.02).abs() < 1e-12);
    let ss = generate_closed_form(&silent_spec(DgpKind::SS, 10)).unwrap();
    assert!(ss.values[4].abs() < 1e-12);
    let tcs = generate_closed_form(&silent_spec(DgpKind::TCS, 100)).unwrap();
    assert!((tcs.values[99] - 12.0).abs() < 1e-12);
}

#[test]
fn closed_form_matches_formulas_noise_free() {
    for kind in [DgpKind::T, DgpKind::SS, DgpKind::CS, DgpKind::TSS, DgpKind::TCS] {
        let rep = generate_closed_form(&silent_spec(kind, 200)).unwrap();
        for (i, &v) in rep.values.iter().enumerate() {
            let t = (i + 1) as f64;
            let expected = match kind {
                DgpKind::T => 10.0 + 0.02 * t,
                DgpKind::SS => 2.0 * (2.0 * PI * t / 5.0).sin(),
                DgpKind::CS => (2.0 * PI * t / 100.0).sin() + 0.5 * (2.0 * PI * t / 5.0).sin(),
                DgpKind::TSS => 10.0 + 0.02 * t + 5.0 * (2.0 * PI * t / 5.0).sin(),
                DgpKind::TCS => {
                    10.0 + 0.02 * t
                        + (2.0 * PI * t / 100.0).sin()
                        + 0.5 * (2.0 * PI * t / 5.0).sin()
                }
                _ => unreachable!(),
            };
            assert!(
                (v - expected).abs() < 1e-12,
                "{} at t={t}: {v} vs {expected}",
                kind.name()
            );
        }
    }
}

#[test]
fn closed_form_rejects_wrong_kind() {
    match generate_closed_form(&silent_spec(DgpKind::TRW, 20)) {
        Err(Error::InvalidKind { .. }) => {}
        other => panic!("expected InvalidKind, got {other:?}"),
    }
}

#[test]
fn recursive_kinds_are_zero_with_zero_noise_and_zero_init() {
    for kind in [
        DgpKind::TRW,
        DgpKind::SRW,
        DgpKind::TSRW,
        DgpKind::SAR2,
        DgpKind::NMA2,
        DgpKind::NAR2,
        DgpKind::BL2,
        DgpKind::STAR2,
        DgpKind::TAR2,
    ] {
        let rep = generate_recursive(&silent_spec(kind, 50)).unwrap();
        let max = rep.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        // STAR and NAR have nonzero drift terms even from zero state
        match kind {
            DgpKind::STAR2 | DgpKind::NAR2 => continue,
            _ => assert_eq!(max, 0.0, "{} should stay identically zero", kind.name()),
        }
    }
}

#[test]
fn trw_injected_noise_is_cumulative_sum() {
    let values = recursive_core(DgpKind::TRW, &[0.1, 0.2, -0.1], &PreSamples::default()).unwrap();
    let expected = [0.1, 0.30000000000000004, 0.20000000000000004];
    assert_eq!(values.as_slice(), expected.as_slice());
}

#[test]
fn tar_hand_recursion_inner_branch() {
    // z_0 = z_{-1} = 0.5, no noise: first step uses the |z| <= 1 branch
    let pre = PreSamples {
        z: [0.5, 0.5, 0.0, 0.0, 0.0],
    };
    let values = recursive_core(DgpKind::TAR2, &[0.0], &pre).unwrap();
    assert!((values[0] - 0.475).abs() < 1e-15);
}

#[test]
fn sar_uses_signum_of_lag_sum() {
    let pre = PreSamples {
        z: [2.0, -0.5, 0.0, 0.0, 0.0],
    };
    let values = recursive_core(DgpKind::SAR2, &[0.0, 0.0], &pre).unwrap();
    assert_eq!(values[0], 1.0); // sign(2.0 - 0.5)
    assert_eq!(values[1], 1.0); // sign(1.0 + 2.0)
}

#[test]
fn arfima_psi_recursion_hand_values() {
    let psi = psi_coefficients(0.4, 4);
    assert_eq!(psi[0], 1.0);
    assert!((psi[1] - 0.4).abs() < 1e-15);
    assert!((psi[2] - 0.28).abs() < 1e-15);
    let psi0 = psi_coefficients(0.0, 10);
    assert!(psi0[1..].iter().all(|&p| p == 0.0));
}

/// Independent ARMA(2,2) recursion, written directly from the process
/// definition without any fractional-integration machinery.
fn arma22_oracle(eps: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; eps.len()];
    for i in 0..eps.len() {
        let z1 = if i >= 1 { z[i - 1] } else { 0.0 };
        let z2 = if i >= 2 { z[i - 2] } else { 0.0 };
        let e1 = if i >= 1 { eps[i - 1] } else { 0.0 };
        let e2 = if i >= 2 { eps[i - 2] } else { 0.0 };
        z[i] = 0.7 * z1 - 0.1 * z2 - 0.5 * e1 + 0.4 * e2 + eps[i];
    }
    z
}

#[test]
fn arfima_d0_is_bitwise_arma22() {
    let eps = gaussian_noise(1500, &NoiseSpec::paper(33));
    let ours = arfima_core(&eps, 0.0, 1000);
    let oracle = arma22_oracle(&eps);
    assert_eq!(ours, oracle);
}

#[test]
fn arfima_zero_noise_is_identically_zero() {
    let rep = generate_arfima(&silent_spec(DgpKind::ARFIMA_D04, 100)).unwrap();
    assert!(rep.values.iter().all(|&v| v == 0.0));
}

#[test]
fn arfima_rejects_nonstationary_order() {
    let mut spec = silent_spec(DgpKind::ARFIMA_D04, 100);
    spec.fractional.as_mut().unwrap().d = 0.6;
    match generate_arfima(&spec) {
        Err(Error::NonstationaryOrder { d }) => assert_eq!(d, 0.6),
        other => panic!("expected NonstationaryOrder, got {other:?}"),
    }
}

#[test]
fn henon_hand_iteration_from_origin() {
    // x2 = 1 + y1 - 1.4 x1^2 = -0.4 up to the f64 rounding of 1.0 - 1.4
    let x2_hand = 1.0 + 0.0 - 1.4 * 1.0 * 1.0;
    let (x1, y1) = henon_map(0.0, 0.0);
    assert_eq!((x1, y1), (1.0, 0.0));
    let (x2, _) = henon_map(x1, y1);
    assert_eq!(x2, x2_hand);
    assert!((x2 + 0.4).abs() < 1e-15);
    // and through the generator path (no burn-in, raw signal)
    let mut spec = silent_spec(DgpKind::HENON, 10);
    spec.integrator.as_mut().unwrap().burn_in = 0;
    let signal = chaotic_signal(&spec).unwrap();
    assert_eq!(signal[0], 1.0);
    assert_eq!(signal[1], x2_hand);
}

#[test]
fn lorenz_vector_field_probe() {
    let d = lorenz_deriv([1.0, 1.0, 1.0]);
    assert_eq!(d, [0.0, 43.92, -3.0]);
}

#[test]
fn rossler_vector_field_probe() {
    let d = rossler_deriv([10.0, 0.0, 0.0]);
    assert_eq!(d, [0.0, 10.0, 0.2]);
}

#[test]
fn henon_orbit_stays_bounded() {
    let spec = silent_spec(DgpKind::HENON, 3000);
    let signal = chaotic_signal(&spec).unwrap(); // includes 1000 burn-in internally
    let (mut x, mut y) = (0.0, 0.0);
    let mut max_x = 0.0_f64;
    let mut max_y = 0.0_f64;
    for _ in 0..4000 {
        let (nx, ny) = henon_map(x, y);
        x = nx;
        y = ny;
        max_x = max_x.max(x.abs());
        max_y = max_y.max(y.abs());
    }
    assert!(max_x <= 2.0, "|x| reached {max_x}");
    assert!(max_y <= 1.0, "|y| reached {max_y}");
    assert!(signal.iter().all(|v| v.abs() <= 2.0));
}

/// Halving dt (doubling stride) keeps the first 200 emitted pre-noise,
/// pre-standardization samples within 1e-3 for all integrated kinds.
#[test]
fn integrator_convergence_under_dt_halving() {
    for kind in [DgpKind::LORENZ, DgpKind::ROSSLER, DgpKind::MACKEY] {
        let mut spec = silent_spec(kind, 200);
        spec.integrator.as_mut().unwrap().burn_in = 0;
        let coarse = chaotic_signal(&spec).unwrap();
        let mut fine_spec = spec.clone();
        {
            let cfg = fine_spec.integrator.as_mut().unwrap();
            cfg.dt /= 2.0;
            cfg.stride *= 2;
        }
        let fine = chaotic_signal(&fine_spec).unwrap();
        let max_diff = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(
            max_diff < 1e-3,
            "{}: max |coarse - fine| = {max_diff}",
            kind.name()
        );
    }
}

#[test]
fn mackey_rejects_non_integer_delay_ratio() {
    let mut spec = silent_spec(DgpKind::MACKEY, 100);
    spec.integrator.as_mut().unwrap().dt = 0.15;
    match generate_chaotic(&spec) {
        Err(Error::Config(msg)) => assert!(msg.contains("tau/dt")),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn chaotic_series_are_standardized_before_noise() {
    let rep = generate_chaotic(&silent_spec(DgpKind::LORENZ, 500)).unwrap();
    let n = rep.values.len() as f64;
    let mean = rep.values.iter().sum::<f64>() / n;
    let var = rep.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    assert!(mean.abs() < 1e-9, "mean {mean}");
    assert!((var - 1.0).abs() < 1e-9, "variance {var}");
}

#[test]
fn replicates_are_distinct_at_paper_scale_and_deterministic() {
    let spec = DgpSpec::paper(DgpKind::T, 0);
    let reps = replicate(&spec, 30, 1000).unwrap();
    assert_eq!(reps.len(), 30);
    for rep in &reps {
        assert_eq!(rep.values.len(), 3000);
        assert!(rep.values.iter().all(|v| v.is_finite()));
    }
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            assert_ne!(reps[i].values, reps[j].values, "reps {i} and {j} collide");
        }
    }
    let again = replicate(&spec, 30, 1000).unwrap();
    for (a, b) in reps.iter().zip(&again) {
        assert_eq!(a.values, b.values);
    }
}

#[test]
fn silent_replicates_are_identical() {
    let spec = silent_spec(DgpKind::SS, 60);
    let reps = replicate(&spec, 2, 5).unwrap();
    assert_eq!(reps[0].values, reps[1].values);
}

#[test]
fn replicate_only_varies_the_noise_stream() {
    let spec = DgpSpec::paper(DgpKind::LORENZ, 0);
    let reps = replicate(&spec, 2, 77).unwrap();
    // subtracting each replicate's noise must leave the same signal
    let noise0 = gaussian_noise(3000, &reps[0].dgp.noise);
    let noise1 = gaussian_noise(3000, &reps[1].dgp.noise);
    for i in 0..3000 {
        let signal0 = reps[0].values[i] - noise0[i];
        let signal1 = reps[1].values[i] - noise1[i];
        assert!((signal0 - signal1).abs() < 1e-12);
    }
}

#[test]
fn csv_and_sidecar_round_trip() {
    let dir = std::env::temp_dir().join(format!("rnnbench_io_{}", std::process::id()));
    let spec = DgpSpec::new(DgpKind::TAR2, 40, NoiseSpec::paper(3));
    let reps = replicate(&spec, 2, 900).unwrap();
    let paths = rnnbench::dgp::write_replicates(&dir, &reps).unwrap();
    assert!(paths[0].ends_with("TAR2_rep00.csv"));
    assert!(paths[1].ends_with("TAR2_rep01.csv"));
    let back = read_series_csv(&paths[0]).unwrap();
    assert_eq!(back, reps[0].values, "shortest round-trip decimals");
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("TAR2_rep00.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["dgp"]["kind"], "TAR2");
    assert_eq!(sidecar["seed"], 900);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn generate_dispatches_all_21_kinds() {
    for kind in DgpKind::ALL {
        let rep = generate(&DgpSpec::new(kind, 120, NoiseSpec::paper(5))).unwrap();
        assert_eq!(rep.values.len(), 120, "{}", kind.name());
        assert!(rep.values.iter().all(|v| v.is_finite()), "{}", kind.name());
    }
}
