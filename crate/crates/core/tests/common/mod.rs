//! Test-only data generators, independent of the fitting code.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Arrival efforts of a Goel-Okumoto NHPP on `[0, horizon]`, by inverting
/// the mean value function at the arrivals of a unit-rate Poisson process.
pub fn sample_go_arrivals(a: f64, b: f64, horizon: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m_horizon = a * (1.0 - (-b * horizon).exp());
    let mut cumulative = 0.0;
    let mut events = Vec::new();
    loop {
        let u: f64 = rng.random::<f64>();
        cumulative += -(1.0 - u).ln();
        if cumulative >= m_horizon {
            break;
        }
        events.push(-(1.0 - cumulative / a).ln() / b);
    }
    events
}

/// Arrival efforts of a Musa-Okumoto NHPP on `[0, horizon]`.
pub fn sample_mo_arrivals(lambda0: f64, theta: f64, horizon: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m_horizon = (lambda0 * theta * horizon).ln_1p() / theta;
    let mut cumulative = 0.0;
    let mut events = Vec::new();
    loop {
        let u: f64 = rng.random::<f64>();
        cumulative += -(1.0 - u).ln();
        if cumulative >= m_horizon {
            break;
        }
        events.push(((theta * cumulative).exp() - 1.0) / (lambda0 * theta));
    }
    events
}

/// Central finite-difference gradient.
pub fn central_gradient<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64) -> [f64; 2] {
    let hx = 1e-6 * x.abs().max(1e-8);
    let hy = 1e-6 * y.abs().max(1e-8);
    [
        (f(x + hx, y) - f(x - hx, y)) / (2.0 * hx),
        (f(x, y + hy) - f(x, y - hy)) / (2.0 * hy),
    ]
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join("vcu")
}
