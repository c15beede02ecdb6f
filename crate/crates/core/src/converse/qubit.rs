//! Noiseless-qubit strong converse: with `M = ⌈2^{nR}⌉` messages on `n`
//! qubits, any states and POVM decode with average success at most
//! `2^{−n(R−1)}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::linalg::{self, CMatrix};

/// Dense POVMs are drawn when `d ≤ DENSE_DIM` and `M ≤ DENSE_MESSAGES`.
const DENSE_DIM: usize = 8;
const DENSE_MESSAGES: usize = 64;
/// Rank of the random mixed states paired with projective decoders.
const STATE_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QubitReport {
    pub n: u32,
    pub rate: f64,
    pub messages: u64,
    pub bound: f64,
    pub trials: usize,
    pub dense_trials: usize,
    pub max_success: f64,
    /// Success of basis states decoded by the matching basis projectors.
    pub aligned_success: f64,
    pub violations: usize,
    pub holds: bool,
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random full-rank states and a random POVM `Λ_m = S^{−1/2} A_m S^{−1/2}`
/// with `A_m = G_m G_m†` and `S = Σ A_m`.
fn dense_instance(d: usize, m: usize, rng: &mut impl Rng) -> f64 {
    let raw: Vec<CMatrix> = (0..m)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * g.adjoint()
        })
        .collect();
    let total = raw.iter().fold(CMatrix::zeros(d, d), |acc, a| acc + a);
    let inv_root =
        linalg::hermitian_eigen(&total).map(|v| Complex64::new(v.max(1e-300).sqrt().recip(), 0.0));
    raw.iter()
        .map(|a| {
            let effect = &inv_root * a * &inv_root;
            let g = ginibre(d, d, rng);
            let rho = &g * g.adjoint();
            linalg::trace_re(&(effect * &rho)) / linalg::trace_re(&rho)
        })
        .sum::<f64>()
        / m as f64
}

/// Basis projectors grouped at random among the messages, with random
/// mixed states of rank `STATE_RANK`. Only the diagonal of each state enters.
fn projective_instance(d: usize, m: u64, rng: &mut impl Rng) -> f64 {
    let mut owner: Vec<(u64, usize)> = (0..d).map(|i| (rng.random_range(0..m), i)).collect();
    owner.sort_unstable();
    let mut total = 0.0;
    let mut start = 0;
    while start < owner.len() {
        let msg = owner[start].0;
        let end = start + owner[start..].iter().take_while(|(o, _)| *o == msg).count();
        let weights: Vec<f64> = (0..d)
            .map(|_| (0..STATE_RANK).map(|_| gaussian(rng).norm_sqr()).sum())
            .collect();
        let norm: f64 = weights.iter().sum();
        total += owner[start..end]
            .iter()
            .map(|&(_, i)| weights[i])
            .sum::<f64>()
            / norm;
        start = end;
    }
    total / m as f64
}

pub fn qubit_converse_check(n: u32, rate: f64, trials: usize, seed: u64) -> Result<QubitReport> {
    if !(1..=10).contains(&n) {
        return Err(invalid(format!(
            "qubit check supports 1 <= n <= 10, got {n}"
        )));
    }
    if !(rate >= 0.0 && rate * n as f64 <= 30.0) {
        return Err(invalid(format!("rate {rate} out of range for n = {n}")));
    }
    let d = 1usize << n;
    let messages = (rate * n as f64).exp2().ceil() as u64;
    let bound = (-(n as f64) * (rate - 1.0)).exp2();
    let dense = d <= DENSE_DIM && messages as usize <= DENSE_MESSAGES;

    let successes: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            if dense {
                dense_instance(d, messages as usize, &mut rng)
            } else {
                projective_instance(d, messages, &mut rng)
            }
        })
        .collect();

    let violations = successes.iter().filter(|&&s| s > bound + 1e-12).count();
    let aligned_success = d.min(messages as usize) as f64 / messages as f64;
    let aligned_ok = aligned_success <= bound + 1e-12;
    Ok(QubitReport {
        n,
        rate,
        messages,
        bound,
        trials,
        dense_trials: if dense { trials } else { 0 },
        max_success: successes.iter().copied().fold(0.0f64, f64::max),
        aligned_success,
        violations,
        holds: violations == 0 && aligned_ok,
    })
}
