use gaitnl_core::entropy::*;
use gaitnl_core::numeric::std_dev;
use gaitnl_testkit::{fixtures, oracle};
use proptest::prelude::*;

fn corpus() -> Vec<(&'static str, Vec<f64>)> {
    vec![
        ("gauss", fixtures::gaussian_noise(300, 1)),
        ("uniform", fixtures::uniform_noise(257, 2)),
        ("coins", fixtures::coin_flips(200, 3)),
        ("logistic", fixtures::logistic(400, 0.3)),
        ("sine", fixtures::sinusoid(500, 23.7)),
        ("walk", fixtures::cumulative_sum(&fixtures::gaussian_noise(350, 4))),
    ]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn sample_entropy_matches_oracle() {
    for (name, x) in corpus() {
        for m in 1..=3 {
            for r in [0.1, 0.2, 0.35] {
                let (a, b, v) = oracle::sample_entropy(&x, m, r);
                let tol = absolute_tolerance(&x, r);
                let c = sample_entropy_counts(&x, m, tol).unwrap();
                assert_eq!((c.a, c.b), (a, b), "{name} m={m} r={r}");
                let got = sample_entropy(&x, m, r).unwrap();
                match (got, v) {
                    (Some(g), Some(o)) => assert!(close(g, o), "{name}: {g} vs {o}"),
                    (g, o) => assert_eq!(g, o, "{name}"),
                }
            }
        }
    }
}

#[test]
fn approximate_entropy_matches_oracle() {
    for (name, x) in corpus() {
        for m in 1..=3 {
            for r in [0.15, 0.2, 0.3] {
                let got = approximate_entropy(&x, m, r).unwrap();
                let want = oracle::approximate_entropy(&x, m, r);
                assert!(close(got, want), "{name} m={m} r={r}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn cross_approximate_entropy_matches_oracle() {
    let c = corpus();
    for (na, x) in &c {
        for (nb, y) in &c {
            let n = x.len().min(y.len());
            let got = cross_approximate_entropy(&x[..n], &y[..n], 2, 0.2).unwrap();
            let want = oracle::cross_approximate_entropy(&x[..n], &y[..n], 2, 0.2);
            assert!(close(got, want), "{na}×{nb}: {got} vs {want}");
        }
    }
}

#[test]
fn permutation_entropy_matches_oracle() {
    for (name, x) in corpus() {
        for m in 2..=7 {
            for tau in 1..=3 {
                let got = permutation_entropy(&x, m, tau).unwrap();
                let (raw, norm) = oracle::permutation_entropy(&x, m, tau);
                assert!(close(got.raw, raw) && close(got.normalized, norm), "{name} m={m} tau={tau}");
            }
        }
    }
}

#[test]
fn symbolic_entropy_matches_oracle() {
    for (name, x) in corpus() {
        let med = oracle::median(&x);
        for l in 1..=8 {
            let got = symbolic_entropy(&x, Threshold::AutoMedian, l).unwrap();
            let want = oracle::symbolic_entropy(&x, med, l);
            assert!(close(got, want), "{name} L={l}: {got} vs {want}");
            let got = symbolic_entropy(&x, Threshold::Value(0.25), l).unwrap();
            assert!(close(got, oracle::symbolic_entropy(&x, 0.25, l)), "{name} L={l}");
        }
    }
}

#[test]
fn multiscale_variants_match_oracle() {
    for (name, x) in corpus() {
        let (m, r, max_scale) = (2, 0.2, 5);
        let tol = (r * oracle::std_dev(&x)).max(1e-12);
        let curves = multiscale_entropy_plus(&x, m, r, max_scale, &MultiscaleVariant::ALL).unwrap();
        let curve = |v| curves.iter().find(|c| c.variant == v).unwrap();
        let same = |g: Option<f64>, w: Option<f64>, what: &str| match (g, w) {
            (Some(g), Some(w)) => assert!(close(g, w), "{name} {what}: {g} vs {w}"),
            (g, w) => assert_eq!(g, w, "{name} {what}"),
        };
        for s in 1..=max_scale {
            assert_eq!(coarse_grain_offset(&x, s, s - 1), oracle::coarse_grain(&x, s, s - 1));
            let per_offset: Vec<(u64, u64, Option<f64>)> = (0..s)
                .map(|k| oracle::sample_entropy_abs(&oracle::coarse_grain(&x, s, k), m, tol))
                .collect();
            same(curve(MultiscaleVariant::Mse).values[s - 1], per_offset[0].2, &format!("mse s={s}"));

            let (a, b) = per_offset.iter().fold((0, 0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
            let rc = (a > 0 && b > 0).then(|| -(a as f64 / b as f64).ln());
            same(curve(MultiscaleVariant::Rcmse).values[s - 1], rc, &format!("rcmse s={s}"));

            let cm: Option<Vec<f64>> = per_offset.iter().map(|p| p.2).collect();
            let cm = cm.map(|v| v.iter().sum::<f64>() / v.len() as f64);
            same(curve(MultiscaleVariant::Cmse).values[s - 1], cm, &format!("cmse s={s}"));

            let fz = oracle::fuzzy_entropy_abs(&oracle::coarse_grain(&x, s, 0), m, tol);
            same(curve(MultiscaleVariant::Msfe).values[s - 1], fz, &format!("msfe s={s}"));

            let gm = if s == 1 {
                None
            } else {
                let var: Vec<f64> = x
                    .chunks_exact(s)
                    .map(|w| {
                        let mu = oracle::mean(w);
                        w.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / s as f64
                    })
                    .collect();
                let sd = oracle::std_dev(&x);
                oracle::sample_entropy_abs(&var, m, (r * sd * sd).max(1e-12)).2
            };
            same(curve(MultiscaleVariant::Gmse).values[s - 1], gm, &format!("gmse s={s}"));
        }
    }
}

#[test]
fn fuzzy_entropy_matches_oracle() {
    for (name, x) in corpus() {
        let got = fuzzy_entropy(&x, 2, 0.2).unwrap();
        let want = oracle::fuzzy_entropy_abs(&x, 2, 0.2 * oracle::std_dev(&x));
        assert!(close(got.unwrap(), want.unwrap()), "{name}");
    }
}

#[test]
fn constant_series_forced_values() {
    let x = vec![4.2; 300];
    assert_eq!(sample_entropy(&x, 2, 0.2).unwrap(), Some(0.0));
    assert_eq!(approximate_entropy(&x, 2, 0.2).unwrap(), 0.0);
    assert_eq!(permutation_entropy(&x, 3, 1).unwrap().raw, 0.0);
    let mono: Vec<f64> = (0..300).map(|i| i as f64 * 0.5).collect();
    assert_eq!(permutation_entropy(&mono, 5, 2).unwrap().normalized, 0.0);
}

#[test]
fn multiscale_scale_one_is_sample_entropy() {
    let x = fixtures::gaussian_noise(2000, 9);
    let se = sample_entropy(&x, 2, 0.2).unwrap();
    let curves = multiscale_entropy_plus(&x, 2, 0.2, 20, &[MultiscaleVariant::Rcmse, MultiscaleVariant::Mse]).unwrap();
    assert_eq!(curves[0].values[0], se);
    assert_eq!(curves[1].values[0], se);
    // white noise loses regularity under averaging
    let rc = &curves[0].values;
    assert!(rc[19].unwrap() < rc[0].unwrap());
}

fn series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 40..160)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sample_entropy_is_affine_invariant(x in series(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (sx, sy) = (sample_entropy(&x, 2, 0.2).unwrap(), sample_entropy(&y, 2, 0.2).unwrap());
        match (sx, sy) {
            (Some(p), Some(q)) => prop_assert!((p - q).abs() < 1e-9),
            (p, q) => prop_assert_eq!(p, q),
        }
    }

    #[test]
    fn match_counts_grow_with_tolerance(x in series(), r in 0.05f64..0.5) {
        let sd = std_dev(&x);
        let lo = sample_entropy_counts(&x, 2, r * sd).unwrap();
        let hi = sample_entropy_counts(&x, 2, 1.5 * r * sd).unwrap();
        prop_assert!(lo.a <= hi.a && lo.b <= hi.b);
        prop_assert!(lo.a <= lo.b);
    }

    #[test]
    fn approximate_entropy_is_affine_invariant(x in series(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let d = approximate_entropy(&x, 2, 0.2).unwrap() - approximate_entropy(&y, 2, 0.2).unwrap();
        prop_assert!(d.abs() < 1e-9);
    }

    #[test]
    fn permutation_entropy_ignores_monotone_maps(x in series(), m in 2usize..6) {
        let y: Vec<f64> = x.iter().map(|v| (v / 50.0).exp()).collect();
        let (p, q) = (permutation_entropy(&x, m, 1).unwrap(), permutation_entropy(&y, m, 1).unwrap());
        prop_assert_eq!(p, q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p.normalized));
    }

    #[test]
    fn symbolic_entropy_is_normalised(x in series(), l in 1usize..8) {
        let h = symbolic_entropy(&x, Threshold::AutoMedian, l).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&h));
    }

    #[test]
    fn cross_approximate_entropy_of_self_is_approximate_entropy(x in series()) {
        let y = x.clone();
        prop_assert_eq!(cross_approximate_entropy(&x, &y, 2, 0.25).unwrap(), approximate_entropy(&x, 2, 0.25).unwrap());
    }
}
