use gaitnl_core::statespace::*;
use gaitnl_testkit::{fixtures, oracle};
use proptest::prelude::*;

#[test]
fn ami_matches_histogram_oracle() {
    let x = fixtures::lorenz_x(500, 0.01);
    let y = fixtures::gaussian_noise(500, 5);
    let curve = ami(&x, &y, 40, 12).unwrap();
    for (lag, v) in curve.lags.iter().zip(&curve.ami) {
        let want = oracle::histogram_mi(&x, &y, *lag, 12).max(0.0);
        assert!((v - want).abs() < 1e-12, "lag {lag}: {v} vs {want}");
    }
}

#[test]
fn self_ami_at_zero_lag_is_binned_entropy() {
    let x = fixtures::uniform_noise(480, 6);
    let c = self_ami(&x, 10, DEFAULT_AMI_BINS).unwrap();
    assert!((c.ami[0] - oracle::histogram_entropy(&x, DEFAULT_AMI_BINS)).abs() < 1e-12);
}

#[test]
fn fnn_matches_exhaustive_oracle() {
    let x = fixtures::lorenz_x(500, 0.02);
    let params = FnnParams { max_dim: 5, ..Default::default() };
    let curve = fnn(&x, 8, params).unwrap();
    for (d, f) in curve.dims.iter().zip(&curve.fnn_fraction) {
        let want = oracle::fnn_fraction(&x, 8, *d, params.r_tol, params.a_tol);
        assert_eq!(*f, want, "dim {d}");
    }
}

#[test]
fn lorenz_parameters_resolve() {
    let x = fixtures::lorenz_x(30_000, 0.01);
    let c = self_ami(&x, 200, DEFAULT_AMI_BINS).unwrap();
    assert!(c.found_minimum);
    let oracle_curve: Vec<f64> = (0..=200).map(|l| oracle::histogram_mi(&x, &x, l, DEFAULT_AMI_BINS)).collect();
    let want = oracle::first_local_minimum(&oracle_curve).unwrap();
    assert!(c.selected_lag.abs_diff(want) <= 2, "{} vs {want}", c.selected_lag);
    let f = fnn(&x, c.selected_lag, FnnParams::default()).unwrap();
    assert!(f.converged);
    assert_eq!(f.selected_dim, 3);
}

#[test]
fn embedding_matches_oracle_points() {
    let x = fixtures::gaussian_noise(100, 7);
    let m = embed(&x, EmbeddingParams::new(3, 4).unwrap()).unwrap();
    let want = fixtures::delay_points(&x, 4, 3);
    let got: Vec<Vec<f64>> = m.iter_rows().map(<[f64]>::to_vec).collect();
    assert_eq!(got, want);
}

proptest! {
    #[test]
    fn embed_row_count(n in 10usize..300, tau in 1usize..6, dim in 1usize..6) {
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let p = EmbeddingParams::new(tau, dim).unwrap();
        match embed(&x, p) {
            Ok(m) => {
                prop_assert_eq!(m.rows(), n - (dim - 1) * tau);
                prop_assert_eq!(m.dim(), dim);
                prop_assert_eq!(m.row(0)[dim - 1], ((dim - 1) * tau) as f64);
            }
            Err(_) => prop_assert!(n < (dim - 1) * tau + 2),
        }
    }

    #[test]
    fn ami_is_nonnegative(seed in 0u64..1000) {
        let x = fixtures::gaussian_noise(256, seed);
        let c = self_ami(&x, 20, 8).unwrap();
        prop_assert!(c.ami.iter().all(|v| *v >= 0.0));
        prop_assert!(c.ami[0] >= c.ami[1..].iter().cloned().fold(0.0, f64::max));
    }
}
