//! Entropies in bits: the thermal entropy function `g`, Rényi, min and von
//! Neumann entropies, minimum-output Rényi entropies of the noisy channels,
//! and the waterfilling construction of the smooth min-entropy.

use crate::error::{invalid, Error, Result};
use crate::fock::{DensityMatrix, PhotonDistribution};

/// Truncated states with more missing mass than this are refused.
pub const TAIL_LIMIT: f64 = 1e-9;

/// `x log₂ x` with `0 log 0 = 0`.
fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `g(x) = (x+1) log₂(x+1) − x log₂ x`, the entropy of a thermal state with mean `x`.
pub fn g(x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(invalid(format!("g is defined for finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // log₂(1+x) + x log₂(1 + 1/x), free of cancellation for small x
    Ok((x.ln_1p() + x * x.recip().ln_1p()) / std::f64::consts::LN_2)
}

/// A normalized spectrum: probabilities of a diagonal state or eigenvalues of a density matrix.
pub trait Spectrum {
    fn spectrum(&self) -> Result<Vec<f64>>;
}

fn renormalize(mut values: Vec<f64>, missing: f64) -> Result<Vec<f64>> {
    if missing >= TAIL_LIMIT {
        return Err(Error::Tolerance {
            what: "truncation leakage for entropy",
            value: missing,
            limit: TAIL_LIMIT,
        });
    }
    for v in values.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(invalid("spectrum has no mass"));
    }
    values.iter_mut().for_each(|v| *v /= total);
    Ok(values)
}

impl Spectrum for PhotonDistribution {
    fn spectrum(&self) -> Result<Vec<f64>> {
        renormalize(self.probs().to_vec(), self.tail())
    }
}

impl Spectrum for DensityMatrix {
    fn spectrum(&self) -> Result<Vec<f64>> {
        renormalize(self.eigenvalues(), self.leakage())
    }
}

impl Spectrum for [f64] {
    fn spectrum(&self) -> Result<Vec<f64>> {
        if self.iter().any(|p| !(*p >= 0.0)) {
            return Err(invalid("probabilities must be nonnegative"));
        }
        let total: f64 = self.iter().sum();
        renormalize(self.to_vec(), (1.0 - total).abs())
    }
}

impl Spectrum for Vec<f64> {
    fn spectrum(&self) -> Result<Vec<f64>> {
        self.as_slice().spectrum()
    }
}

/// `log₂ Σ p^α` evaluated relative to the largest entry.
fn log2_power_sum(probs: &[f64], alpha: f64) -> f64 {
    let max = probs.iter().copied().fold(0.0f64, f64::max);
    let scaled: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| (p / max).powf(alpha))
        .sum();
    alpha * max.log2() + scaled.log2()
}

/// `H_α = log₂(Σ p^α)/(1−α)` for `α > 0`, `α ≠ 1`; `α = ∞` gives the min-entropy.
pub fn renyi_entropy<S: Spectrum + ?Sized>(state: &S, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 {
        return Err(invalid(format!(
            "Renyi order must be positive and != 1, got {alpha}"
        )));
    }
    let probs = state.spectrum()?;
    if alpha.is_infinite() {
        return Ok(min_entropy_of(&probs));
    }
    Ok((log2_power_sum(&probs, alpha) / (1.0 - alpha)).max(0.0))
}

pub fn von_neumann_entropy<S: Spectrum + ?Sized>(state: &S) -> Result<f64> {
    let probs = state.spectrum()?;
    Ok(-probs.iter().map(|&p| xlog2x(p)).sum::<f64>())
}

/// `−log₂ ‖ρ‖_∞`.
pub fn min_entropy<S: Spectrum + ?Sized>(state: &S) -> Result<f64> {
    Ok(min_entropy_of(&state.spectrum()?))
}

fn min_entropy_of(probs: &[f64]) -> f64 {
    -probs.iter().copied().fold(0.0f64, f64::max).log2()
}

/// `log₂[(x+1)^α − x^α]/(α−1)`, the Rényi entropy of a thermal state of mean `x`.
fn thermal_renyi(x: f64, alpha: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(invalid(format!(
            "minimum-output Renyi formula needs integer alpha >= 2, got {alpha}"
        )));
    }
    if !(x >= 0.0) || x.is_infinite() {
        return Err(invalid(format!(
            "noise photon number must be finite and >= 0, got {x}"
        )));
    }
    let a = alpha as f64;
    // (x+1)^α (1 − r^α) with r = x/(x+1) < 1
    let r = x / (x + 1.0);
    let log2 = (a * x.ln_1p() + (-r.powi(alpha as i32)).ln_1p()) / std::f64::consts::LN_2;
    Ok(log2 / (a - 1.0))
}

pub fn min_output_renyi_additive(n_bar: f64, alpha: u32) -> Result<f64> {
    thermal_renyi(n_bar, alpha)
}

pub fn min_output_renyi_thermal(eta: f64, n_b: f64, alpha: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("transmissivity {eta} outside [0, 1]")));
    }
    thermal_renyi((1.0 - eta) * n_b, alpha)
}

/// Waterfilled distribution within total-variation distance `ε` of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingResult {
    pub threshold_p: f64,
    /// Smoothed probabilities in the input order.
    pub smoothed: Vec<f64>,
    pub achieved_distance: f64,
    pub smooth_min_entropy: f64,
    /// Largest `ε` for which `threshold_p` remains the maximum of `smoothed`.
    pub epsilon_cap: f64,
}

/// Largest smoothing parameter for which the threshold stays the maximum.
///
/// With `m` copies of the maximum `v₁`, `R` the remaining mass and `v` the
/// next entry, the threshold is `v₁ − ε/m` and the next entry grows to
/// `v(1 + ε/R)`; the cap is where the two meet. A distribution with a single
/// level has cap 0.
pub fn smoothing_cap(probs: &[f64]) -> Result<f64> {
    let sorted = sorted_desc(probs)?;
    Ok(cap_of_sorted(&sorted))
}

fn sorted_desc(probs: &[f64]) -> Result<Vec<f64>> {
    let mut sorted = probs.spectrum()?;
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted)
}

fn cap_of_sorted(sorted: &[f64]) -> f64 {
    let top = sorted[0];
    let m = sorted.iter().take_while(|&&v| v == top).count();
    if m == sorted.len() {
        return 0.0;
    }
    let next = sorted[m];
    let rest: f64 = sorted[m..].iter().sum();
    if next == 0.0 {
        // the remainder has no mass to absorb the excess
        return 0.0;
    }
    let mf = m as f64;
    ((top - next) / (next / rest + 1.0 / mf)).max(0.0)
}

pub fn smooth_min_entropy(probs: &[f64], epsilon: f64) -> Result<SmoothingResult> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(invalid(format!(
            "smoothing parameter {epsilon} outside [0, 1)"
        )));
    }
    let normalized = probs.spectrum()?;
    let mut order: Vec<usize> = (0..normalized.len()).collect();
    order.sort_by(|&a, &b| normalized[b].total_cmp(&normalized[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| normalized[i]).collect();
    let cap = cap_of_sorted(&sorted);
    if epsilon > cap * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::Infeasible { epsilon, cap });
    }

    // smallest k whose level (S_k − ε)/k is not below the next entry
    let n = sorted.len();
    let mut prefix = 0.0;
    let mut k = n;
    let mut p = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        prefix += v;
        let level = (prefix - epsilon) / (i + 1) as f64;
        let next = sorted.get(i + 1).copied().unwrap_or(0.0);
        if level >= next {
            k = i + 1;
            p = level;
            break;
        }
    }
    let rest: f64 = sorted[k..].iter().sum();
    let boost = if rest > 0.0 {
        1.0 + epsilon / rest
    } else {
        1.0
    };
    let mut smoothed = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        smoothed[i] = if rank < k { p } else { normalized[i] * boost };
    }
    let achieved_distance = 0.5
        * smoothed
            .iter()
            .zip(&normalized)
            .map(|(q, v)| (q - v).abs())
            .sum::<f64>();
    Ok(SmoothingResult {
        threshold_p: p,
        smoothed,
        achieved_distance,
        smooth_min_entropy: -p.log2(),
        epsilon_cap: cap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingCheck {
    /// Smooth min-entropy from the waterfilling construction.
    pub lhs: f64,
    /// `H_α − log₂(1/ε)/(α−1)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `H_min^ε ≥ H_α − log₂(1/ε)/(α−1)` for `α > 1`.
pub fn verify_renyi_smoothing(probs: &[f64], alpha: f64, epsilon: f64) -> Result<SmoothingCheck> {
    if !(alpha > 1.0) {
        return Err(invalid(format!(
            "smoothing inequality needs alpha > 1, got {alpha}"
        )));
    }
    let lhs = smooth_min_entropy(probs, epsilon)?.smooth_min_entropy;
    let rhs = renyi_entropy(probs, alpha)? - (1.0 / epsilon).log2() / (alpha - 1.0);
    Ok(SmoothingCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-12,
    })
}
