use ehp_duffing::experiments::find;
use ehp_duffing::rkf45::{integrate_adaptive, RkfConfig};
use ehp_duffing::system::{DuffingSystem, Forcing};
use proptest::prelude::*;

fn oscillator() -> DuffingSystem {
    DuffingSystem::new(1.0, 0.0, 1.0, 0.0).unwrap()
}

#[test]
fn error_tracks_tolerance() {
    let sys = oscillator();
    let errors: Vec<f64> = (5..=10)
        .map(|e| {
            let tol = 10f64.powi(-e);
            let cfg = RkfConfig::with_tolerances(tol, tol);
            let out =
                integrate_adaptive(&sys, (1.0, 0.0), 10.0, &Forcing::Zero, &cfg, &[10.0]).unwrap();
            (out[0].u - 10f64.cos()).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let factor = w[0] / w[1];
        assert!((4.0..=30.0).contains(&factor), "errors {errors:?}");
    }
}

#[test]
fn type_one_example_completes() {
    let spec = find("T1E1").unwrap();
    let times: Vec<f64> = (0..=10000).map(|i| i as f64 * 0.01).collect();
    let out = integrate_adaptive(
        &spec.system,
        (spec.u0, spec.v0),
        100.0,
        &spec.forcing,
        &RkfConfig::default(),
        &times,
    )
    .unwrap();
    assert_eq!(out.len(), times.len());
    assert_eq!(out.last().unwrap().t, 100.0);
}

#[test]
fn chaotic_example_depends_on_tolerance_late() {
    let spec = find("T3E5").unwrap();
    let times: Vec<f64> = (0..=100).map(f64::from).collect();
    let run = |cfg: RkfConfig| {
        integrate_adaptive(
            &spec.system,
            (spec.u0, spec.v0),
            100.0,
            &spec.forcing,
            &cfg,
            &times,
        )
        .unwrap()
    };
    let loose = run(RkfConfig::default());
    let tight = run(RkfConfig::with_tolerances(1e-10, 1e-9));
    let max_diff = |range: core::ops::Range<usize>| {
        range
            .map(|i| (loose[i].u - tight[i].u).abs())
            .fold(0.0, f64::max)
    };
    assert!(max_diff(0..11) < 1e-4, "early {}", max_diff(0..11));
    assert!(max_diff(70..101) > 0.1, "late {}", max_diff(70..101));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn samples_land_exactly_and_reproducibly(
        mut times in prop::collection::vec(0.0f64..20.0, 1..30),
        u0 in -2.0f64..2.0, v0 in -2.0f64..2.0, c in 0.0f64..0.5, beta in 0.0f64..1.0,
    ) {
        times.sort_by(f64::total_cmp);
        let sys = DuffingSystem::new(1.0, c, 1.0, beta).unwrap();
        let forcing = Forcing::cosine(0.3, 1.1);
        let run = || integrate_adaptive(&sys, (u0, v0), 20.0, &forcing, &RkfConfig::default(), &times).unwrap();
        let (a, b) = (run(), run());
        prop_assert_eq!(a.len(), times.len());
        for ((p, q), &t) in a.iter().zip(&b).zip(&times) {
            prop_assert_eq!(p.t.to_bits(), t.to_bits());
            prop_assert_eq!(p.u.to_bits(), q.u.to_bits());
            prop_assert_eq!(p.v.to_bits(), q.v.to_bits());
        }
    }
}
