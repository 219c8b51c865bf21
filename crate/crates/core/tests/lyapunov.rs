use gaitnl_core::lyapunov::*;
use gaitnl_core::statespace::{fnn, self_ami, EmbeddingParams, FnnParams, DEFAULT_AMI_BINS};
use gaitnl_testkit::fixtures;

fn rosenstein(x: &[f64], tau: usize, dim: usize, rate: Option<f64>) -> RosensteinResult {
    let p = RosensteinParams {
        embedding: EmbeddingParams::new(tau, dim).unwrap(),
        mean_period: MeanPeriod::Auto,
        max_steps: None,
        sample_rate_hz: rate,
    };
    lye_rosenstein(x, &p).unwrap()
}

#[test]
fn logistic_map_exponent_is_ln2() {
    let x = fixtures::logistic(5000, 0.3);
    let ln2 = std::f64::consts::LN_2;
    for dim in 1..=2 {
        let r = rosenstein(&x, 1, dim, None);
        let short = r.short_exp.unwrap();
        assert!((short - ln2).abs() <= 0.15 * ln2, "dim {dim}: {short}");
        // chaotic curve rises over the short window
        let (a, b) = r.fit_windows[0];
        assert!(r.divergence[a..=b].windows(2).all(|w| w[1] >= w[0]));

        let w = lye_wolf(&x, &WolfParams::new(EmbeddingParams::new(1, dim).unwrap())).unwrap();
        assert!((w.largest_exponent - ln2).abs() <= 0.2 * ln2, "dim {dim}: {}", w.largest_exponent);
        assert!(w.replacements > 0);
    }
}

#[test]
fn sinusoid_has_no_divergence() {
    let x = fixtures::sinusoid(5000, 97.3);
    for dim in 2..=3 {
        let r = rosenstein(&x, 24, dim, None);
        assert!(r.short_exp.unwrap().abs() < 0.01);
        assert!((r.mean_period - 97.3).abs() < 1.0, "{}", r.mean_period);
        let w = lye_wolf(&x, &WolfParams::new(EmbeddingParams::new(24, dim).unwrap())).unwrap();
        assert!(w.largest_exponent.abs() < 0.01);
    }
}

#[test]
fn lorenz_against_variational_exponent() {
    let x = fixtures::lorenz_x(30_000, 0.01);
    let truth = fixtures::lorenz_largest_exponent_variational(2000.0, 0.01);
    let tau = self_ami(&x, 200, DEFAULT_AMI_BINS).unwrap().selected_lag;
    let dim = fnn(&x, tau, FnnParams::default()).unwrap().selected_dim;
    let r = rosenstein(&x, tau, dim, Some(100.0));
    // the first mean period is dominated by the neighbour-alignment transient;
    // the linear region after it carries the exponent
    let long = r.long_exp.unwrap();
    assert!((long - truth).abs() <= 0.2 * truth, "{long} vs {truth}");
    let mut wp = WolfParams::new(EmbeddingParams::new(tau, dim).unwrap());
    wp.sample_rate_hz = Some(100.0);
    let w = lye_wolf(&x, &wp).unwrap();
    assert!((w.largest_exponent - truth).abs() <= 0.25 * truth, "{} vs {truth}", w.largest_exponent);
    assert_eq!(w.largest_exponent.signum(), r.short_exp.unwrap().signum());
}

#[test]
fn exponents_are_affine_invariant() {
    let x = fixtures::logistic(3000, 0.7);
    let y: Vec<f64> = x.iter().map(|v| 3.5 * v - 2.0).collect();
    let (a, b) = (rosenstein(&x, 1, 2, None), rosenstein(&y, 1, 2, None));
    assert!((a.short_exp.unwrap() - b.short_exp.unwrap()).abs() < 1e-6);
    let emb = EmbeddingParams::new(1, 2).unwrap();
    let (p, q) = (lye_wolf(&x, &WolfParams::new(emb)).unwrap(), lye_wolf(&y, &WolfParams::new(emb)).unwrap());
    assert!((p.largest_exponent - q.largest_exponent).abs() < 1e-6);
}

#[test]
fn windows_lie_within_curve() {
    let x = fixtures::logistic(2000, 0.1);
    let r = rosenstein(&x, 1, 2, None);
    for (a, b) in r.fit_windows {
        assert!(a <= b && b < r.divergence.len());
    }
}
