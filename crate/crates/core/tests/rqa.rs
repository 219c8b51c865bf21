use gaitnl_core::rqa::*;
use gaitnl_core::statespace::{embed, EmbeddingParams, StateMatrix};
use gaitnl_testkit::{fixtures, oracle};
use proptest::prelude::*;

fn oracle_norm(n: Norm) -> oracle::Norm {
    match n {
        Norm::Euclidean => oracle::Norm::Euclidean,
        Norm::Chebyshev => oracle::Norm::Chebyshev,
        Norm::Manhattan => oracle::Norm::Manhattan,
    }
}

fn cases() -> Vec<(&'static str, Vec<f64>, usize, usize)> {
    vec![
        ("sine", fixtures::sinusoid(400, 31.3), 8, 2),
        ("logistic", fixtures::logistic(300, 0.4), 1, 3),
        ("noise", fixtures::gaussian_noise(250, 8), 2, 3),
        ("lorenz", fixtures::lorenz_x(500, 0.02), 6, 3),
        ("coins", fixtures::coin_flips(200, 9), 1, 2),
    ]
}

#[test]
fn plot_and_measures_match_oracle() {
    for (name, x, tau, dim) in cases() {
        let pts = embed(&x, EmbeddingParams::new(tau, dim).unwrap()).unwrap();
        let opts = fixtures::delay_points(&x, dim, tau);
        for norm in [Norm::Euclidean, Norm::Chebyshev, Norm::Manhattan] {
            for theiler in [0, 1, 5] {
                for radius in [0.3, 1.0] {
                    let mut p = RqaParams::new(radius);
                    p.norm = norm;
                    p.theiler = theiler;
                    let plot = RecurrencePlot::build(&pts, &p, None).unwrap();
                    let m = oracle::recurrence_matrix(&opts, radius, oracle_norm(norm), theiler);
                    for i in 0..m.len() {
                        for j in 0..m.len() {
                            assert_eq!(plot.get(i, j), m[i][j], "{name} ({i},{j})");
                        }
                    }
                    let ones: u64 = m.iter().flatten().filter(|b| **b).count() as u64;
                    assert_eq!(plot.count_ones(), ones);

                    for (l_min, v_min) in [(2, 2), (3, 2), (2, 4)] {
                        let got = quantify(&plot, l_min, v_min);
                        let want = oracle::line_scan(&m, theiler, l_min, v_min);
                        let ctx = format!("{name} {norm} w={theiler} r={radius} l={l_min} v={v_min}");
                        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
                        assert!(close(got.recurrence_rate_pct, want.recurrence_rate_pct), "{ctx} rr");
                        assert!(close(got.determinism_pct, want.determinism_pct), "{ctx} det");
                        assert_eq!(got.max_diagonal_line, want.max_diagonal_line, "{ctx} lmax");
                        assert!(close(got.mean_diagonal_line, want.mean_diagonal_line), "{ctx} l");
                        assert!(close(got.diagonal_entropy, want.diagonal_entropy), "{ctx} entr");
                        assert!(close(got.laminarity_pct, want.laminarity_pct), "{ctx} lam");
                        assert_eq!(got.max_vertical_line, want.max_vertical_line, "{ctx} vmax");
                        match (got.trapping_time, want.trapping_time) {
                            (Some(a), Some(b)) => assert!(close(a, b), "{ctx} tt"),
                            (a, b) => assert_eq!(a, b, "{ctx} tt"),
                        }
                        let wre = oracle::weighted_recurrence_entropy(&opts, oracle_norm(norm), theiler);
                        assert!(close(got.weighted_recurrence_entropy.unwrap(), wre), "{ctx} wre");
                    }
                }
            }
        }
    }
}

#[test]
fn radius_search_hits_targets() {
    let x = fixtures::gaussian_noise(2002, 21);
    let pts = embed(&x, EmbeddingParams::new(1, 3).unwrap()).unwrap();
    let opts = fixtures::delay_points(&x, 3, 1);
    for target in [1.0, 2.5, 5.0, 10.0] {
        let s = radius_for_rate(&pts, target, Norm::Euclidean, 0, 0.01).unwrap();
        assert!((s.achieved_pct - target).abs() <= 0.1);
        // recount directly
        let n = opts.len();
        let mut hits = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                hits += u64::from(oracle::distance(&opts[i], &opts[j], oracle::Norm::Euclidean) <= s.radius);
            }
        }
        let rate = 100.0 * hits as f64 / (n * (n - 1) / 2) as f64;
        assert!((rate - target).abs() <= 0.1, "target {target}: {rate}");
    }
}

#[test]
fn archive_round_trip_preserves_measures() {
    let x = fixtures::lorenz_x(1500, 0.02);
    let pts = embed(&x, EmbeddingParams::new(6, 3).unwrap()).unwrap();
    let mut p = RqaParams::new(2.0);
    p.theiler = 2;
    p.weighted_entropy = false;
    let plot = RecurrencePlot::build(&pts, &p, None).unwrap();
    let mut buf = Vec::new();
    write_rle(&plot, &mut buf).unwrap();
    assert!(buf.len() < (plot.len() * plot.len() / 16));
    let back = read_rle(buf.as_slice()).unwrap();
    assert_eq!(back, plot);
    assert_eq!(quantify(&back, 2, 2), quantify(&plot, 2, 2));
}

#[test]
fn fifty_thousand_point_plot_fits_bound() {
    let bytes = estimate_plot_bytes(50_000, 3, true);
    assert!(bytes <= 320_000_000, "{bytes}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rate_is_invariant_under_time_reversal(seed in 0u64..1000, r in 0.2f64..2.0, w in 0usize..4) {
        let x = fixtures::gaussian_noise(150, seed);
        let pts = embed(&x, EmbeddingParams::new(1, 2).unwrap()).unwrap();
        let mut p = RqaParams::new(r);
        p.theiler = w;
        let a = quantify(&RecurrencePlot::build(&pts, &p, None).unwrap(), 2, 2);
        let b = quantify(&RecurrencePlot::build(&pts.reversed(), &p, None).unwrap(), 2, 2);
        prop_assert_eq!(a.recurrence_rate_pct, b.recurrence_rate_pct);
        prop_assert_eq!(a.max_diagonal_line, b.max_diagonal_line);
        prop_assert_eq!(a.determinism_pct, b.determinism_pct);
    }

    #[test]
    fn plot_is_symmetric_and_monotone_in_radius(seed in 0u64..1000) {
        let x = fixtures::uniform_noise(90, seed);
        let pts = StateMatrix::from_flat(x, 1).unwrap();
        let small = RecurrencePlot::build(&pts, &RqaParams::new(0.05), None).unwrap();
        let large = RecurrencePlot::build(&pts, &RqaParams::new(0.1), None).unwrap();
        for i in 0..90 {
            for j in 0..90 {
                prop_assert_eq!(small.get(i, j), small.get(j, i));
                prop_assert!(!small.get(i, j) || large.get(i, j));
            }
        }
    }
}
