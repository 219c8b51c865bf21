//! Deterministic synthetic signals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex64, FftPlanner};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn uniform_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

pub fn coin_flips(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 }).collect()
}

pub fn cumulative_sum(x: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    x.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// `sin(2π t / period)` for t = 0..n.
pub fn sinusoid(n: usize, period: f64) -> Vec<f64> {
    (0..n)
        .map(|t| (2.0 * std::f64::consts::PI * t as f64 / period).sin())
        .collect()
}

/// Fully chaotic logistic map, x ← 4x(1−x).
pub fn logistic(n: usize, x0: f64) -> Vec<f64> {
    let mut x = x0;
    // burn-in
    for _ in 0..100 {
        x = 4.0 * x * (1.0 - x);
    }
    (0..n)
        .map(|_| {
            x = 4.0 * x * (1.0 - x);
            x
        })
        .collect()
}

pub const LORENZ_SIGMA: f64 = 10.0;
pub const LORENZ_RHO: f64 = 28.0;
pub const LORENZ_BETA: f64 = 8.0 / 3.0;

fn lorenz_rhs(s: [f64; 3]) -> [f64; 3] {
    [
        LORENZ_SIGMA * (s[1] - s[0]),
        s[0] * (LORENZ_RHO - s[2]) - s[1],
        s[0] * s[1] - LORENZ_BETA * s[2],
    ]
}

fn rk4_step<const D: usize>(s: [f64; D], dt: f64, f: impl Fn([f64; D]) -> [f64; D]) -> [f64; D] {
    let add = |a: [f64; D], b: [f64; D], h: f64| {
        let mut out = a;
        for i in 0..D {
            out[i] += h * b[i];
        }
        out
    };
    let k1 = f(s);
    let k2 = f(add(s, k1, dt / 2.0));
    let k3 = f(add(s, k2, dt / 2.0));
    let k4 = f(add(s, k3, dt));
    let mut out = s;
    for i in 0..D {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// x-component of the Lorenz system (σ=10, ρ=28, β=8/3) sampled every `dt`
/// with RK4, after discarding 50 time units of transient.
pub fn lorenz_x(n: usize, dt: f64) -> Vec<f64> {
    let mut s = [1.0, 1.0, 1.0];
    let transient = (50.0 / dt).round() as usize;
    for _ in 0..transient {
        s = rk4_step(s, dt, lorenz_rhs);
    }
    (0..n)
        .map(|_| {
            s = rk4_step(s, dt, lorenz_rhs);
            s[0]
        })
        .collect()
}

/// Largest Lyapunov exponent of the Lorenz flow (per time unit) from the
/// variational equations: a tangent vector is integrated with the Jacobian
/// along the trajectory and renormalised every step.
pub fn lorenz_largest_exponent_variational(total_time: f64, dt: f64) -> f64 {
    let rhs = |z: [f64; 6]| {
        let (x, y, zz) = (z[0], z[1], z[2]);
        let (u, v, w) = (z[3], z[4], z[5]);
        let f = lorenz_rhs([x, y, zz]);
        [
            f[0],
            f[1],
            f[2],
            LORENZ_SIGMA * (v - u),
            (LORENZ_RHO - zz) * u - v - x * w,
            y * u + x * v - LORENZ_BETA * w,
        ]
    };
    let mut z = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
    for _ in 0..(20.0 / dt) as usize {
        z = rk4_step(z, dt, rhs);
        let norm = (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]).sqrt();
        for c in &mut z[3..] {
            *c /= norm;
        }
    }
    let steps = (total_time / dt) as usize;
    let mut log_sum = 0.0;
    for _ in 0..steps {
        z = rk4_step(z, dt, rhs);
        let norm = (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]).sqrt();
        log_sum += norm.ln();
        for c in &mut z[3..] {
            *c /= norm;
        }
    }
    log_sum / (steps as f64 * dt)
}

/// Fractional Gaussian noise with Hurst exponent `hurst`, synthesised by
/// circulant embedding of the exact autocovariance (Davies–Harte).
pub fn fgn(n: usize, hurst: f64, seed: u64) -> Vec<f64> {
    let two_h = 2.0 * hurst;
    let gamma = |k: f64| 0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h));
    let m = 2 * n;
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| {
            let k = if j <= n { j } else { m - j };
            Complex64::new(gamma(k as f64), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut row);
    let eig: Vec<f64> = row.iter().map(|c| c.re.max(0.0)).collect();

    let mut rng = rng(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut w = vec![Complex64::new(0.0, 0.0); m];
    w[0] = Complex64::new(eig[0].sqrt() * normal(), 0.0);
    w[n] = Complex64::new(eig[n].sqrt() * normal(), 0.0);
    for k in 1..n {
        let s = (eig[k] / 2.0).sqrt();
        let c = Complex64::new(s * normal(), s * normal());
        w[k] = c;
        w[m - k] = c.conj();
    }
    planner.plan_fft_inverse(m).process(&mut w);
    let scale = 1.0 / (m as f64).sqrt();
    w[..n].iter().map(|c| c.re * scale).collect()
}

/// Delay embedding written out longhand for fixtures that need points.
pub fn delay_points(x: &[f64], dim: usize, tau: usize) -> Vec<Vec<f64>> {
    let rows = x.len() - (dim - 1) * tau;
    (0..rows)
        .map(|i| (0..dim).map(|k| x[i + k * tau]).collect())
        .collect()
}
