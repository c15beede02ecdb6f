//! Monte Carlo check of photon-number concentration at the thermal-channel
//! output against the Chebyshev bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::thermal_number_dist;
use crate::error::{invalid, Error, Result};

/// Largest tail contribution to a second moment accepted from a table.
pub const TAIL_MOMENT_LIMIT: f64 = 1e-6;
const MAX_TABLE_DIM: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub trials: usize,
    /// Fail if the output photon count exceeds `η Σaᵢ + n(1−η)N_B + nδ₅`.
    pub threshold: f64,
    pub empirical_fail_rate: f64,
    /// Binomial standard error of the empirical rate.
    pub sampling_sigma: f64,
    /// `C/n` with `C = max Var(Lᵢ)/δ₅²`.
    pub chebyshev_bound: f64,
    pub max_variance: f64,
    pub table_dim: usize,
    /// Largest gap between analytic and tabulated second moments.
    pub tail_moment: f64,
    pub holds: bool,
}

/// Cumulative table of `p(l|k)` with moments checked against the closed forms.
struct OutputTable {
    cdf: Vec<f64>,
    variance: f64,
    tail_moment: f64,
}

impl OutputTable {
    fn build(k: usize, eta: f64, n_b: f64) -> Result<Self> {
        let x = (1.0 - eta) * n_b;
        let kf = k as f64;
        let mean = eta * kf + x;
        let variance = x * (x + 1.0) + 2.0 * x * eta * kf + kf * eta * (1.0 - eta);
        let exact_second = variance + mean * mean;
        let mut dim = (4 * (k + 1)).max(64);
        loop {
            let dist = thermal_number_dist(k, eta, n_b, dim)?;
            let second = dist.second_moment();
            let tail_moment = (exact_second - second).abs();
            if tail_moment < TAIL_MOMENT_LIMIT {
                let table_mean = dist.mean();
                let mut acc = 0.0;
                let cdf = dist
                    .probs()
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                return Ok(Self {
                    cdf,
                    variance: second - table_mean * table_mean,
                    tail_moment,
                });
            }
            if dim >= MAX_TABLE_DIM {
                return Err(Error::Tolerance {
                    what: "tail contribution to output second moment",
                    value: tail_moment,
                    limit: TAIL_MOMENT_LIMIT,
                });
            }
            dim *= 2;
        }
    }

    /// Inverse-CDF draw; the residual tail maps to the first untabulated level.
    fn sample(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u)
    }
}

/// Samples `Σᵢ Lᵢ` with `Lᵢ ~ p(·|aᵢ)` and counts exceedances of the mean
/// plus `nδ₅`. Trial `t` draws from the stream `(seed, t)`.
pub fn concentration_experiment(
    profile: &[usize],
    eta: f64,
    n_b: f64,
    delta5: f64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if profile.is_empty() {
        return Err(invalid("input profile must have at least one mode"));
    }
    if trials < 1000 {
        return Err(invalid(format!("need at least 1000 trials, got {trials}")));
    }
    if !(delta5 > 0.0 && delta5.is_finite()) {
        return Err(invalid(format!("delta5 = {delta5} must be positive")));
    }
    if !(0.0..=1.0).contains(&eta) || !(n_b >= 0.0 && n_b.is_finite()) {
        return Err(invalid(format!(
            "invalid thermal parameters ({eta}, {n_b})"
        )));
    }

    let mut distinct: Vec<usize> = profile.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let tables: Vec<OutputTable> = distinct
        .par_iter()
        .map(|&k| OutputTable::build(k, eta, n_b))
        .collect::<Result<_>>()?;
    let slot: Vec<usize> = profile
        .iter()
        .map(|k| distinct.binary_search(k).expect("profile entry tabulated"))
        .collect();

    let n = profile.len();
    let nf = n as f64;
    let total_in: usize = profile.iter().sum();
    let threshold = eta * total_in as f64 + nf * (1.0 - eta) * n_b + nf * delta5;

    let failures: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let total: usize = slot
                .iter()
                .map(|&s| tables[s].sample(rng.random::<f64>()))
                .sum();
            usize::from(total as f64 > threshold)
        })
        .sum();

    let rate = failures as f64 / trials as f64;
    let max_variance = tables.iter().map(|t| t.variance).fold(0.0f64, f64::max);
    let chebyshev_bound = max_variance / (delta5 * delta5) / nf;
    let sampling_sigma = (rate * (1.0 - rate) / trials as f64).sqrt();
    Ok(ConcentrationReport {
        n,
        trials,
        threshold,
        empirical_fail_rate: rate,
        sampling_sigma,
        chebyshev_bound,
        max_variance,
        table_dim: tables.iter().map(|t| t.cdf.len()).max().unwrap_or(0),
        tail_moment: tables.iter().map(|t| t.tail_moment).fold(0.0f64, f64::max),
        holds: rate <= chebyshev_bound + 3.0 * sampling_sigma,
    })
}
