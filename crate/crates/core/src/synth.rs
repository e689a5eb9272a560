//! Synthetic samplers used by the reproduction recipes and the test oracles.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Integer power law `P(k) ~ k^-gamma` for `k >= k_min`: a continuous Pareto
/// on `[k_min - 1/2, inf)` by inverse CDF, rounded to the nearest integer.
pub fn discrete_powerlaw<R: Rng + ?Sized>(rng: &mut R, n: usize, gamma: f64, k_min: u64) -> Vec<f64> {
    let x0 = k_min as f64 - 0.5;
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            (x0 * (1.0 - u).powf(-1.0 / (gamma - 1.0)) + 0.5).floor()
        })
        .collect()
}

pub fn exponential<R: Rng + ?Sized>(rng: &mut R, n: usize, rate: f64) -> Vec<f64> {
    (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() / rate).collect()
}

/// Inverse-CDF samples of `P(T > t) = exp(-(t / scale)^alpha)`.
pub fn stretched_exponential<R: Rng + ?Sized>(rng: &mut R, n: usize, alpha: f64, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            // 1 - U lies in (0, 1], so -ln is finite; reject exact zeros
            loop {
                let t = scale * (-(1.0 - rng.random::<f64>()).ln()).powf(1.0 / alpha);
                if t > 0.0 {
                    break t;
                }
            }
        })
        .collect()
}

/// Multiplies each value by `exp(sigma Z)`, `Z` standard normal.
pub fn lognormal_noise<R: Rng + ?Sized>(rng: &mut R, values: &[f64], sigma: f64) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(rng);
            v * (sigma * z).exp()
        })
        .collect()
}
