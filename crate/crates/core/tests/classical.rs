use std::f64::consts::PI;

use pdm_core::classical::{closed_form_state, integrate, make_lienard, period, IntegratorOptions, LienardSystem};
use pdm_core::SystemId;
use proptest::prelude::*;

fn arb_orbit() -> impl Strategy<Value = (LienardSystem, f64, f64)> {
    (
        prop::sample::select(vec![SystemId::ExpOscillator, SystemId::NonPolyOscillator]),
        prop::sample::select(vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]),
        0.5f64..4.0,
        0.05f64..0.95,
        0.0f64..(2.0 * PI),
    )
        .prop_map(|(id, lambda, w, la, delta)| {
            let sys = make_lienard(id, lambda, w).unwrap();
            (sys, la / lambda.abs(), delta)
        })
}

fn launch(sys: &LienardSystem, amp: f64, delta: f64, periods: f64) -> pdm_core::classical::Trajectory {
    let (x0, v0) = closed_form_state(sys.id, amp, delta, sys.lambda, sys.omega0, 0.0).unwrap();
    let t_end = periods * 2.0 * PI / sys.omega0;
    integrate(sys, x0, v0, t_end, 1e-3 * t_end, &IntegratorOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn isochronicity_certificate_holds(
        id in prop::sample::select(vec![SystemId::ExpOscillator, SystemId::NonPolyOscillator]),
        lambda in -3.0f64..3.0,
        w in 0.2f64..5.0,
        u in -0.9f64..3.0,
    ) {
        let sys = make_lienard(id, lambda, w).unwrap();
        let x = u / lambda.abs().max(1e-3);
        prop_assume!(sys.in_region(x));
        prop_assert!(sys.isochronicity_defect(x).abs() <= 1e-10 * (w * w + sys.gprime(x).abs()));
    }

    #[test]
    fn energy_is_conserved((sys, amp, delta) in arb_orbit()) {
        let traj = launch(&sys, amp, delta, 20.0);
        let h0 = sys.energy(traj.x[0], traj.v[0]);
        let drift = traj.x.iter().zip(&traj.v)
            .map(|(&x, &v)| (sys.energy(x, v) - h0).abs())
            .fold(0.0, f64::max);
        prop_assert!(drift / h0 < 1e-8, "{:?} λ={} λA={}: drift {:e}", sys.id, sys.lambda, amp * sys.lambda.abs(), drift / h0);
    }

    #[test]
    fn period_is_independent_of_amplitude((sys, amp, _delta) in arb_orbit()) {
        let p = period(&sys, amp, &IntegratorOptions::default()).unwrap();
        prop_assert!((p.period - 2.0 * PI / sys.omega0).abs() < 1e-6, "period {}", p.period);
        prop_assert!(p.cycles >= 4);
    }

    #[test]
    fn integrated_orbit_follows_the_closed_form((sys, amp, delta) in arb_orbit()) {
        let traj = launch(&sys, amp, delta, 5.0);
        for (&t, &x) in traj.t.iter().zip(&traj.x) {
            let (xc, _) = closed_form_state(sys.id, amp, delta, sys.lambda, sys.omega0, t).unwrap();
            prop_assert!((x - xc).abs() < 1e-7, "t={t}: {x} vs {xc}");
        }
    }

    #[test]
    fn exp_orbits_stay_below_one_over_lambda(lambda in 0.2f64..3.0, w in 0.5f64..4.0, la in 0.05f64..0.95, delta in 0.0f64..6.3) {
        let sys = make_lienard(SystemId::ExpOscillator, lambda, w).unwrap();
        let traj = launch(&sys, la / lambda, delta, 3.0);
        let top = traj.x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(top <= 1.0 / lambda + 1e-9);
        prop_assert!(top <= (la.ln_1p()) / lambda + 1e-9);
    }
}

#[test]
fn fixed_step_runs_are_bitwise_reproducible() {
    let sys = make_lienard(SystemId::NonPolyOscillator, 1.0, 2.0).unwrap();
    let opts = IntegratorOptions { fixed_step: Some(1e-3), ..Default::default() };
    let (x0, v0) = closed_form_state(sys.id, 0.5, 0.0, 1.0, 2.0, 0.0).unwrap();
    let a = integrate(&sys, x0, v0, 10.0, 0.01, &opts).unwrap();
    let b = integrate(&sys, x0, v0, 10.0, 0.01, &opts).unwrap();
    assert_eq!(a.x, b.x);
    assert_eq!(a.v, b.v);
}

#[test]
fn nonpoly_orbit_beyond_the_periodic_range_is_rejected() {
    assert!(closed_form_state(SystemId::NonPolyOscillator, 1.0, 0.0, 1.0, 2.0, 0.0).is_err());
    assert!(closed_form_state(SystemId::ExpOscillator, 1.5, 0.0, 1.0, 2.0, 0.0).is_err());
}
