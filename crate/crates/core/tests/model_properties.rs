mod common;

use narxcomp_core::narx::{
    fixed_points, hysteresis_loop, jacobian_eigen, simulate_free_run, simulate_with_history,
    LoopExcitation,
};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

proptest! {
    #![proptest_config(ProptestConfig {
        rng_seed: RngSeed::Fixed(0x6e61_7278),
        ..ProptestConfig::default()
    })]

    #[test]
    fn simulation_is_deterministic(u in prop::collection::vec(0.0..1.0f64, 1..300)) {
        let model = common::heater();
        let a = simulate_free_run(&model, &u, &[0.1, 0.1]).unwrap();
        let b = simulate_free_run(&model, &u, &[0.1, 0.1]).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn stable_fixed_points_hold_under_constant_input(u_bar in 0.0..1.0f64) {
        for model in [common::heater(), common::hysteretic(), common::logistic()] {
            for fp in fixed_points(&model, u_bar).unwrap().into_iter().filter(|f| f.stable) {
                let y_init = vec![fp.y_bar; model.output_depth()];
                let ys = simulate_free_run(&model, &vec![u_bar; 10_000], &y_init).unwrap();
                let drift = ys.iter().fold(0.0f64, |m, y| m.max((y - fp.y_bar).abs()));
                prop_assert!(drift < 1e-9, "u={u_bar} y={} drift {drift:e}", fp.y_bar);
            }
        }
    }

    #[test]
    fn eigenvalues_predict_perturbation_decay(u_bar in 0.0..0.5f64) {
        for model in [common::heater(), common::logistic()] {
            for fp in fixed_points(&model, u_bar).unwrap() {
                let mags = jacobian_eigen(&model, u_bar, fp.y_bar).unwrap();
                let stable = mags.iter().all(|&m| m < 1.0);
                prop_assert_eq!(stable, fp.stable);
                let depth = model.output_depth();
                let y_init = vec![fp.y_bar + 1e-6; depth];
                let u_init = vec![u_bar; model.input_depth()];
                let ys = simulate_with_history(&model, &vec![u_bar; 60], &y_init, &u_init).unwrap();
                let last = (ys[59] - fp.y_bar).abs();
                if stable {
                    prop_assert!(last < 1e-6, "u={u_bar} y={} deviation {last:e}", fp.y_bar);
                } else {
                    prop_assert!(last > 1e-6, "u={u_bar} y={} deviation {last:e}", fp.y_bar);
                }
            }
        }
    }

    #[test]
    fn hysteresis_loops_close(amplitude in 0.3..1.0f64, center in 0.5..1.5f64, period in 8..60u32) {
        let frequency = 1.0 / f64::from(period);
        let lp = hysteresis_loop(
            &common::hysteretic(),
            &LoopExcitation { amplitude, frequency, center, sample_period: 1.0 },
        )
        .unwrap();
        let (&(u0, y0), &(u1, y1)) = (lp.loading.first().unwrap(), lp.unloading.last().unwrap());
        prop_assert!((u0 - u1).abs() < 1e-6 && (y0 - y1).abs() < 1e-6);
    }
}

#[test]
fn heater_equilibrium_is_stable() {
    let model = common::heater();
    let fp = &fixed_points(&model, 0.5).unwrap()[0];
    let mags = jacobian_eigen(&model, 0.5, fp.y_bar).unwrap();
    assert!((mags[0] - 0.8759).abs() < 5e-4 && (mags[1] - 0.0199).abs() < 5e-4);
}
