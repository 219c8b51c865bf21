use gaitnl_core::dfa::*;
use gaitnl_testkit::{fixtures, oracle};
use proptest::prelude::*;

#[test]
fn fluctuations_match_oracle() {
    let inputs = [
        fixtures::gaussian_noise(500, 11),
        fixtures::cumulative_sum(&fixtures::gaussian_noise(480, 12)),
        fixtures::logistic(333, 0.2),
    ];
    for x in &inputs {
        for order in 1..=3 {
            let sizes = vec![8, 10, 16, 25, 40, x.len() / 4];
            let r = dfa(x, &DfaParams { box_sizes: BoxSizes::Explicit(sizes), order, fit_range: None }).unwrap();
            for (n, f) in r.box_sizes.iter().zip(&r.fluctuations) {
                let want = oracle::dfa_fluctuation(x, *n, order);
                assert!((f - want).abs() <= 1e-12 * (1.0 + want), "n={n} order={order}: {f} vs {want}");
            }
            let lx: Vec<f64> = r.box_sizes.iter().map(|n| (*n as f64).log10()).collect();
            let ly: Vec<f64> = r.fluctuations.iter().map(|f| f.log10()).collect();
            assert!((r.alpha - oracle::ols_slope(&lx, &ly)).abs() < 1e-12);
        }
    }
}

#[test]
fn white_noise_and_its_walk() {
    let seeds = 0..20u64;
    let (mut white, mut walk) = (0.0, 0.0);
    for s in seeds.clone() {
        let x = fixtures::gaussian_noise(10_000, 1000 + s);
        white += dfa(&x, &DfaParams::default()).unwrap().alpha;
        walk += dfa(&fixtures::cumulative_sum(&x), &DfaParams::default()).unwrap().alpha;
    }
    let n = seeds.count() as f64;
    let (white, walk) = (white / n, walk / n);
    assert!((white - 0.5).abs() <= 0.05, "white {white}");
    assert!((walk - 1.5).abs() <= 0.08, "walk {walk}");
}

#[test]
fn fractional_noise_tracks_hurst() {
    for h in [0.3, 0.7, 0.9] {
        let mean: f64 = (0..10)
            .map(|s| dfa(&fixtures::fgn(8192, h, 50 + s), &DfaParams::default()).unwrap().alpha)
            .sum::<f64>()
            / 10.0;
        assert!((mean - h).abs() < 0.07, "H={h}: {mean}");
    }
}

#[test]
fn fit_range_restricts_points() {
    let x = fixtures::gaussian_noise(5000, 3);
    let r = dfa(&x, &DfaParams { fit_range: Some((16, 200)), ..Default::default() }).unwrap();
    assert_eq!(r.fit_range, (16, 200));
    let e = dfa(&x, &DfaParams { fit_range: Some((16, 17)), ..Default::default() });
    assert!(matches!(e, Err(gaitnl_core::Error::DegenerateFit(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alpha_is_affine_invariant(seed in 0u64..500, a in 0.01f64..100.0, b in -1e3f64..1e3) {
        let x = fixtures::gaussian_noise(1000, seed);
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (p, q) = (dfa(&x, &DfaParams::default()).unwrap(), dfa(&y, &DfaParams::default()).unwrap());
        prop_assert!((p.alpha - q.alpha).abs() < 1e-9);
    }
}
