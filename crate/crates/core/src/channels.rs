//! Pure-loss, thermal, additive-noise and amplifier channels.
//!
//! Each channel is available as an exact photon-number conditional law
//! (`*_number_dist`) and, where the number-basis action is known, as a map on
//! truncated density matrices: the thermal channel through its beamsplitter
//! dilation and the additive channel through phase-space quadrature of random
//! displacements. The amplifier only exists at covariance level (see
//! [`crate::symplectic`]).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fock::{displacement_elements, thermal_distribution, DensityMatrix, PhotonDistribution};
use crate::linalg::{self, CMatrix};
use crate::special::{ln_binomial, ln_pow, log_sum_exp};

/// Largest environment leakage accepted by [`thermal_apply`].
pub const ENV_LEAKAGE_LIMIT: f64 = 1e-8;

/// Phase-insensitive single-mode bosonic channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    PureLoss { eta: f64 },
    Thermal { eta: f64, n_b: f64 },
    Additive { n_bar: f64 },
    Amplifier { gain: f64 },
}

impl Channel {
    pub fn pure_loss(eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Channel::PureLoss { eta })
    }

    pub fn thermal(eta: f64, n_b: f64) -> Result<Self> {
        check_eta(eta)?;
        check_nonneg("N_B", n_b)?;
        Ok(Channel::Thermal { eta, n_b })
    }

    pub fn additive(n_bar: f64) -> Result<Self> {
        check_nonneg("n_bar", n_bar)?;
        Ok(Channel::Additive { n_bar })
    }

    pub fn amplifier(gain: f64) -> Result<Self> {
        if !(gain.is_finite() && gain >= 1.0) {
            return Err(invalid(format!("amplifier gain {gain} must be >= 1")));
        }
        Ok(Channel::Amplifier { gain })
    }

    /// Noise photons injected by the channel, `(1−η)N_B` for the thermal
    /// channel and `n̄` for the additive one.
    pub fn added_noise(&self) -> f64 {
        match *self {
            Channel::PureLoss { .. } => 0.0,
            Channel::Thermal { eta, n_b } => (1.0 - eta) * n_b,
            Channel::Additive { n_bar } => n_bar,
            Channel::Amplifier { gain } => gain - 1.0,
        }
    }

    /// Conditional photon-number law of the output for input `|k⟩`.
    /// The amplifier has no number-basis action here.
    pub fn number_dist(&self, k: usize, dim: usize) -> Result<PhotonDistribution> {
        match *self {
            Channel::PureLoss { eta } => loss_number_dist(k, eta, dim),
            Channel::Thermal { eta, n_b } => thermal_number_dist(k, eta, n_b, dim),
            Channel::Additive { n_bar } => additive_number_dist(k, n_bar, dim),
            Channel::Amplifier { .. } => Err(invalid(
                "amplifier channel is only available at covariance level",
            )),
        }
    }
}

/// Gain `G₁ = (1−η)N_B + 1` and transmissivity `η₁ = η/G₁` of the
/// loss-then-amplifier split of a thermal channel.
pub fn amplifier_split(eta: f64, n_b: f64) -> (f64, f64) {
    let gain = (1.0 - eta) * n_b + 1.0;
    (gain, eta / gain)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("transmissivity {eta} outside [0, 1]")));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(invalid(format!("{name} = {v} must be a nonnegative real")));
    }
    Ok(())
}

/// Binomial thinning of `|k⟩`: `C(k,m) η^m (1−η)^{k−m}` for `m = 0..=k`.
pub fn loss_number_dist(k: usize, eta: f64, dim: usize) -> Result<PhotonDistribution> {
    check_eta(eta)?;
    if k >= dim {
        return Err(invalid(format!("input |{k}> does not fit in dim {dim}")));
    }
    let probs = (0..dim)
        .map(|m| {
            if m > k {
                0.0
            } else {
                let (k, m) = (k as u64, m as u64);
                (ln_binomial(k, m) + ln_pow(eta, m) + ln_pow(1.0 - eta, k - m)).exp()
            }
        })
        .collect();
    Ok(PhotonDistribution::with_implied_tail(probs))
}

/// ln of one term `C(l,j) C(m,j) n̄^{m+l−2j} / (1+n̄)^{m+l+1}`.
fn ln_additive_term(
    l: u64,
    m: u64,
    j: u64,
    ln_noise: f64,
    noise_zero: bool,
    ln_one_plus: f64,
) -> f64 {
    let power = m + l - 2 * j;
    let ln_noise_pow = if power == 0 {
        0.0
    } else if noise_zero {
        f64::NEG_INFINITY
    } else {
        power as f64 * ln_noise
    };
    ln_binomial(l, j) + ln_binomial(m, j) + ln_noise_pow - (m + l + 1) as f64 * ln_one_plus
}

/// Output law `λ_l` of the additive-noise channel on `|m⟩`.
pub fn additive_number_dist(m: usize, n_bar: f64, dim: usize) -> Result<PhotonDistribution> {
    check_nonneg("n_bar", n_bar)?;
    if dim == 0 {
        return Err(invalid("distribution needs dim >= 1"));
    }
    let ln_noise = n_bar.ln();
    let ln_one_plus = n_bar.ln_1p();
    let m = m as u64;
    let mut terms = Vec::new();
    let probs = (0..dim as u64)
        .map(|l| {
            terms.clear();
            terms.extend(
                (0..=l.min(m))
                    .map(|j| ln_additive_term(l, m, j, ln_noise, n_bar == 0.0, ln_one_plus)),
            );
            log_sum_exp(&terms).exp()
        })
        .collect();
    Ok(PhotonDistribution::with_implied_tail(probs))
}

/// Output law `p(l|k)` of the thermal channel on `|k⟩`: binomial loss
/// followed by additive noise `(1−η)N_B`, summed over both indices in log space.
pub fn thermal_number_dist(k: usize, eta: f64, n_b: f64, dim: usize) -> Result<PhotonDistribution> {
    check_eta(eta)?;
    check_nonneg("N_B", n_b)?;
    if dim == 0 {
        return Err(invalid("distribution needs dim >= 1"));
    }
    let noise = (1.0 - eta) * n_b;
    let ln_noise = noise.ln();
    let ln_one_plus = noise.ln_1p();
    let k = k as u64;
    let ln_thin: Vec<f64> = (0..=k)
        .map(|m| ln_binomial(k, m) + ln_pow(eta, m) + ln_pow(1.0 - eta, k - m))
        .collect();
    let mut terms = Vec::new();
    let probs = (0..dim as u64)
        .map(|l| {
            terms.clear();
            for m in 0..=k {
                if ln_thin[m as usize] == f64::NEG_INFINITY {
                    continue;
                }
                for j in 0..=l.min(m) {
                    terms.push(
                        ln_thin[m as usize]
                            + ln_additive_term(l, m, j, ln_noise, noise == 0.0, ln_one_plus),
                    );
                }
            }
            log_sum_exp(&terms).exp()
        })
        .collect();
    Ok(PhotonDistribution::with_implied_tail(probs))
}

/// `θ` with `cos θ = √η`.
fn mixing_angle(eta: f64) -> f64 {
    eta.sqrt().clamp(-1.0, 1.0).acos()
}

/// Beamsplitter restricted to total photon number `total`, in the basis
/// `|k, total−k⟩` ordered by `k`. Entry `(k, i)` is `⟨k, N−k|U|i, N−i⟩`.
///
/// Sign convention: `U|1,0⟩ = √η|1,0⟩ − √(1−η)|0,1⟩`.
pub fn beamsplitter_block(eta: f64, total: usize) -> DMatrix<f64> {
    block_exponential(mixing_angle(eta), total, 0, total)
}

/// Exponential of `θ(a†b − ab†)` on the states `|k, N−k⟩`, `k ∈ [lo, hi]`.
fn block_exponential(theta: f64, total: usize, lo: usize, hi: usize) -> DMatrix<f64> {
    let size = hi - lo + 1;
    let mut gen = CMatrix::zeros(size, size);
    for k in lo..hi {
        let amp = theta * (((k + 1) * (total - k)) as f64).sqrt();
        gen[(k + 1 - lo, k - lo)] = Complex64::new(amp, 0.0);
        gen[(k - lo, k + 1 - lo)] = Complex64::new(-amp, 0.0);
    }
    let u = linalg::expm_antihermitian(&gen);
    DMatrix::from_fn(size, size, |i, j| u[(i, j)].re)
}

/// Two-mode beamsplitter on the `D²`-dimensional truncated space, basis
/// index `i·D + j` for `|i⟩_a|j⟩_b`.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    pub dim: usize,
    pub matrix: DMatrix<f64>,
}

impl BeamSplitter {
    /// `‖U†U − I‖_max` over states with total photon number at most `dim/2`.
    pub fn unitary_defect(&self) -> f64 {
        let d = self.dim;
        let keep: Vec<usize> = (0..d * d).filter(|&s| s / d + s % d <= d / 2).collect();
        let mut worst = 0.0f64;
        for &x in &keep {
            for &y in &keep {
                let dot: f64 = (0..d * d)
                    .map(|r| self.matrix[(r, x)] * self.matrix[(r, y)])
                    .sum();
                let target = if x == y { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.dim + b
    }
}

/// Exponential of the truncated two-mode generator `θ(a†b − ab†)`, `cos θ = √η`.
/// The generator conserves total photon number, so the exponential is
/// assembled block by block.
pub fn beamsplitter_unitary(eta: f64, dim: usize) -> Result<BeamSplitter> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid(format!(
            "beamsplitter transmissivity {eta} outside (0, 1]"
        )));
    }
    if dim < 2 {
        return Err(invalid("beamsplitter needs dim >= 2"));
    }
    let theta = mixing_angle(eta);
    let mut matrix = DMatrix::zeros(dim * dim, dim * dim);
    for total in 0..=2 * (dim - 1) {
        let lo = total.saturating_sub(dim - 1);
        let hi = total.min(dim - 1);
        let block = block_exponential(theta, total, lo, hi);
        for (r, kr) in (lo..=hi).enumerate() {
            for (c, kc) in (lo..=hi).enumerate() {
                matrix[(kr * dim + (total - kr), kc * dim + (total - kc))] = block[(r, c)];
            }
        }
    }
    Ok(BeamSplitter { dim, matrix })
}

/// Smallest environment truncation with thermal leakage below `1e-8`.
pub fn default_env_dim(n_b: f64) -> usize {
    env_dim_for_tail(n_b, ENV_LEAKAGE_LIMIT)
}

/// Smallest `d` with thermal tail `(N_B/(N_B+1))^d` below `tail`.
pub fn env_dim_for_tail(n_b: f64, tail: f64) -> usize {
    if n_b <= 0.0 {
        return 1;
    }
    let per_level = ((n_b + 1.0) / n_b).ln();
    (tail.recip().ln() / per_level).floor() as usize + 1
}

/// Thermal channel on a truncated state; the output keeps the input dimension.
pub fn thermal_apply(
    rho: &DensityMatrix,
    eta: f64,
    n_b: f64,
    env_dim: usize,
) -> Result<DensityMatrix> {
    thermal_apply_into(rho, eta, n_b, env_dim, rho.dim())
}

/// `Tr_b[U(ρ ⊗ ρ_th)U†]` with the output truncated to `out_dim` levels.
///
/// Input and environment levels are combined with the exact beamsplitter
/// blocks, so the only approximations are the environment truncation
/// (bounded by [`ENV_LEAKAGE_LIMIT`]) and the output truncation, whose lost
/// mass is added to the reported leakage.
pub fn thermal_apply_into(
    rho: &DensityMatrix,
    eta: f64,
    n_b: f64,
    env_dim: usize,
    out_dim: usize,
) -> Result<DensityMatrix> {
    check_eta(eta)?;
    check_nonneg("N_B", n_b)?;
    if out_dim == 0 {
        return Err(invalid("output dim must be >= 1"));
    }
    let env = thermal_distribution(n_b, env_dim.max(1))?;
    if env.tail() >= ENV_LEAKAGE_LIMIT {
        return Err(Error::Truncation {
            dim: env_dim,
            leakage: env.tail(),
            required: default_env_dim(n_b),
        });
    }
    let d_in = rho.dim();
    let d_env = env.len();
    let theta = mixing_angle(eta);
    let blocks: Vec<DMatrix<f64>> = (0..d_in + d_env - 1)
        .into_par_iter()
        .map(|total| block_exponential(theta, total, 0, total))
        .collect();

    let input = rho.matrix();
    let mut out = CMatrix::zeros(out_dim, out_dim);
    let mut dropped = 0.0;
    let mut coeff = vec![0.0f64; d_in];
    for (j, &pj) in env.probs().iter().enumerate() {
        if pj == 0.0 {
            continue;
        }
        // environment leaves with r photons; signal index shifts by j − r
        for r in 0..d_in + j {
            let first = r.saturating_sub(j);
            if first >= d_in {
                continue;
            }
            for i in first..d_in {
                let k = i + j - r;
                coeff[i] = blocks[i + j][(k, i)];
            }
            for i in first..d_in {
                let k = i + j - r;
                let ci = coeff[i];
                if ci == 0.0 {
                    continue;
                }
                if k >= out_dim {
                    dropped += pj * ci * ci * input[(i, i)].re;
                    continue;
                }
                for i2 in first..d_in {
                    let k2 = i2 + j - r;
                    if k2 >= out_dim {
                        continue;
                    }
                    out[(k, k2)] += input[(i, i2)] * (pj * ci * coeff[i2]);
                }
            }
        }
    }
    let leakage = rho.leakage() + env.tail() * rho.trace() + dropped;
    Ok(DensityMatrix::from_parts(
        linalg::hermitian_part(&out),
        leakage,
    ))
}

/// Gauss–Hermite rule for the weight `e^{−t²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch nodes polished by Newton steps on the orthonormal
    /// recurrence; weights are the Christoffel numbers `1/Σ p_k(x)²`.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(invalid("quadrature order must be >= 1"));
        }
        let jacobi = DMatrix::from_fn(order, order, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let mut weights = Vec::with_capacity(order);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, dp, _) = orthonormal_hermite(order, *x);
                if dp != 0.0 {
                    *x -= p / dp;
                }
            }
            let (_, _, sum_sq) = orthonormal_hermite(order, *x);
            weights.push(1.0 / sum_sq);
        }
        Ok(Self { nodes, weights })
    }

    pub fn max_node(&self) -> f64 {
        self.nodes.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Returns `(p_n(x), p_n'(x), Σ_{k<n} p_k(x)²)` for orthonormal Hermite polynomials.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    // p_n' = √(2n) p_{n−1}
    (cur, (2.0 * n as f64).sqrt() * prev, sum_sq)
}

/// Phase-space grid for the additive-noise integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Hermite points per quadrature axis.
    pub order: usize,
    /// Nodes whose tensor weight falls below this are skipped.
    pub prune_below: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 64,
            prune_below: 1e-20,
        }
    }
}

/// Output of [`additive_apply`] with its quadrature diagnostics.
#[derive(Debug, Clone)]
pub struct AdditiveOutput {
    pub state: DensityMatrix,
    /// Grid reach along each axis in units of `√n̄`.
    pub radius: f64,
    /// Total tensor weight of skipped nodes.
    pub pruned_weight: f64,
    /// `|Σ w − 1|` over the kept nodes plus the pruned mass.
    pub weight_defect: f64,
}

/// Additive-noise channel `∫ d²α P_n̄(α) D(α)ρD†(α)`; output keeps the input dimension.
pub fn additive_apply(
    rho: &DensityMatrix,
    n_bar: f64,
    grid: &QuadratureSpec,
) -> Result<AdditiveOutput> {
    additive_apply_into(rho, n_bar, grid, rho.dim())
}

/// Gauss–Hermite tensor quadrature of the displacement integral. With
/// `α = √n̄ (t + is)` the Gaussian becomes `e^{−t²−s²}/π`.
pub fn additive_apply_into(
    rho: &DensityMatrix,
    n_bar: f64,
    grid: &QuadratureSpec,
    out_dim: usize,
) -> Result<AdditiveOutput> {
    check_nonneg("n_bar", n_bar)?;
    if out_dim == 0 {
        return Err(invalid("output dim must be >= 1"));
    }
    if n_bar == 0.0 {
        let d = rho.dim().min(out_dim);
        let mut out = CMatrix::zeros(out_dim, out_dim);
        out.view_mut((0, 0), (d, d))
            .copy_from(&rho.matrix().view((0, 0), (d, d)));
        let lost = rho.trace() - linalg::trace_re(&out);
        return Ok(AdditiveOutput {
            state: DensityMatrix::from_parts(out, rho.leakage() + lost),
            radius: f64::INFINITY,
            pruned_weight: 0.0,
            weight_defect: 0.0,
        });
    }
    let rule = GaussHermite::new(grid.order)?;
    let radius = rule.max_node();
    if radius < 6.0 {
        return Err(Error::Tolerance {
            what: "additive quadrature radius (units of sqrt(n_bar))",
            value: 6.0,
            limit: radius,
        });
    }
    let scale = n_bar.sqrt();
    let d_in = rho.dim();
    let input = rho.matrix();
    let in_trace = rho.trace();
    let pi = std::f64::consts::PI;

    // one row of the tensor grid per task; rows are summed in order afterwards
    let rows: Vec<(CMatrix, f64, f64, f64)> = (0..rule.nodes.len())
        .into_par_iter()
        .map(|a| {
            let mut acc = CMatrix::zeros(out_dim, out_dim);
            let (mut dropped, mut pruned, mut kept) = (0.0, 0.0, 0.0);
            for b in 0..rule.nodes.len() {
                let w = rule.weights[a] * rule.weights[b] / pi;
                if w < grid.prune_below {
                    pruned += w;
                    continue;
                }
                kept += w;
                let alpha = Complex64::new(scale * rule.nodes[a], scale * rule.nodes[b]);
                let disp = displacement_elements(alpha, out_dim, d_in);
                let moved = &disp * input * disp.adjoint();
                dropped += w * (in_trace - linalg::trace_re(&moved));
                acc += moved.scale(w);
            }
            (acc, dropped, pruned, kept)
        })
        .collect();

    let mut out = CMatrix::zeros(out_dim, out_dim);
    let (mut dropped, mut pruned, mut kept) = (0.0, 0.0, 0.0);
    for (acc, d, p, k) in rows {
        out += acc;
        dropped += d;
        pruned += p;
        kept += k;
    }
    let leakage = rho.leakage() + dropped.max(0.0) + pruned * in_trace;
    Ok(AdditiveOutput {
        state: DensityMatrix::from_parts(linalg::hermitian_part(&out), leakage),
        radius,
        pruned_weight: pruned,
        weight_defect: (kept + pruned - 1.0).abs() + pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, trace_distance};

    #[test]
    fn loss_examples() {
        let d = loss_number_dist(0, 0.3, 4).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0, 0.0, 0.0]);
        let d = loss_number_dist(3, 1.0, 5).unwrap();
        assert_eq!(d.probs()[3], 1.0);
        let d = loss_number_dist(2, 0.5, 3).unwrap();
        for (p, want) in d.probs().iter().zip([0.25, 0.5, 0.25]) {
            assert!((p - want).abs() < 1e-15);
        }
        assert!(loss_number_dist(3, 0.5, 3).is_err());
    }

    #[test]
    fn additive_examples() {
        let d = additive_number_dist(0, 1.0, 40).unwrap();
        for (l, p) in d.probs().iter().enumerate() {
            assert!((p - 0.5f64.powi(l as i32 + 1)).abs() < 1e-15);
        }
        let d = additive_number_dist(1, 1.0, 200).unwrap();
        for (l, p) in d.probs().iter().enumerate().take(60) {
            let want = (1 + l) as f64 / 2f64.powi(l as i32 + 2);
            assert!((p - want).abs() < 1e-15, "l = {l}");
        }
        assert!(d.tail() < 1e-12);
        let d = additive_number_dist(3, 0.0, 6).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn thermal_vacuum_is_geometric() {
        let d = thermal_number_dist(0, 0.5, 1.0, 60).unwrap();
        for (l, p) in d.probs().iter().enumerate() {
            let want = (1.0 / 1.5) * (0.5f64 / 1.5).powi(l as i32);
            assert!((p - want).abs() < 1e-15);
        }
    }

    #[test]
    fn thermal_mean_law() {
        let d = thermal_number_dist(2, 0.5, 1.0, 80).unwrap();
        assert!((d.mean() - 1.5).abs() < 1e-8);
        for (k, eta, n_b) in [(5usize, 0.3, 2.0), (12, 0.9, 0.1), (7, 0.0, 1.5)] {
            let d = thermal_number_dist(k, eta, n_b, 200).unwrap();
            assert!((d.mean() - (eta * k as f64 + (1.0 - eta) * n_b)).abs() < 1e-8);
        }
    }

    #[test]
    fn thermal_is_additive_after_loss() {
        for (k, eta, n_b) in [(0usize, 0.5, 1.0), (4, 0.7, 0.3), (9, 0.25, 3.0)] {
            let dim = 120;
            let direct = thermal_number_dist(k, eta, n_b, dim).unwrap();
            let thin = loss_number_dist(k, eta, dim).unwrap();
            let mut mixed = vec![0.0; dim];
            for (m, pm) in thin.probs().iter().enumerate() {
                let noisy = additive_number_dist(m, (1.0 - eta) * n_b, dim).unwrap();
                for (l, p) in noisy.probs().iter().enumerate() {
                    mixed[l] += pm * p;
                }
            }
            for (a, b) in direct.probs().iter().zip(&mixed) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn amplifier_split_identities() {
        let (g, e1) = amplifier_split(0.4, 2.0);
        assert_eq!(g, 0.6 * 2.0 + 1.0);
        assert_eq!(e1, 0.4 / g);
        assert!(Channel::amplifier(0.5).is_err());
        assert!(Channel::thermal(1.2, 0.0).is_err());
        assert!(Channel::amplifier(2.0).unwrap().number_dist(0, 4).is_err());
    }

    #[test]
    fn beamsplitter_identity_and_single_photon() {
        let bs = beamsplitter_unitary(1.0, 4).unwrap();
        let id = DMatrix::<f64>::identity(16, 16);
        assert!((&bs.matrix - id).amax() < 1e-14);

        let eta: f64 = 0.3;
        let bs = beamsplitter_unitary(eta, 4).unwrap();
        let col = bs.index(1, 0);
        assert!((bs.matrix[(bs.index(1, 0), col)] - eta.sqrt()).abs() < 1e-14);
        assert!((bs.matrix[(bs.index(0, 1), col)] + (1.0 - eta).sqrt()).abs() < 1e-14);
        assert!(bs.unitary_defect() < 1e-12);
    }

    #[test]
    fn beamsplitter_matches_dense_exponential() {
        let (eta, dim) = (0.6, 4);
        let theta = mixing_angle(eta);
        let a = crate::fock::annihilation(dim);
        let id = CMatrix::identity(dim, dim);
        let a1 = linalg::kron(&a, &id);
        let b1 = linalg::kron(&id, &a);
        let gen = (a1.adjoint() * &b1 - &a1 * b1.adjoint()).scale(theta);
        let dense = linalg::expm_antihermitian(&gen);
        let bs = beamsplitter_unitary(eta, dim).unwrap();
        for i in 0..dim * dim {
            for j in 0..dim * dim {
                assert!((dense[(i, j)] - bs.matrix[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn beamsplitter_conserves_photon_number() {
        let bs = beamsplitter_unitary(0.37, 6).unwrap();
        let d = bs.dim;
        for s in 0..d * d {
            let (a, b) = (s / d, s % d);
            if a + b > d / 2 {
                continue;
            }
            let n_out: f64 = (0..d * d)
                .map(|r| ((r / d + r % d) as f64) * bs.matrix[(r, s)].powi(2))
                .sum();
            assert!((n_out - (a + b) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn default_env_dim_meets_leakage() {
        for n_b in [0.0, 0.1, 0.5, 1.0, 5.0] {
            let d = default_env_dim(n_b);
            let t = thermal_distribution(n_b, d).unwrap();
            assert!(t.tail() < ENV_LEAKAGE_LIMIT, "n_b = {n_b}");
            if d > 1 {
                let t = thermal_distribution(n_b, d - 1).unwrap();
                assert!(t.tail() >= ENV_LEAKAGE_LIMIT);
            }
        }
    }

    #[test]
    fn env_dim_for_tail_is_minimal() {
        for (n_b, tail) in [(0.3, 1e-13), (2.0, 1e-12), (4.0, 1e-10)] {
            let d = env_dim_for_tail(n_b, tail);
            assert!(thermal_distribution(n_b, d).unwrap().tail() < tail);
            assert!(thermal_distribution(n_b, d - 1).unwrap().tail() >= tail);
        }
    }

    #[test]
    fn thermal_apply_rejects_short_environment() {
        let rho = DensityMatrix::vacuum(4).unwrap();
        match thermal_apply(&rho, 0.5, 1.0, 5) {
            Err(Error::Truncation { required, .. }) => assert_eq!(required, default_env_dim(1.0)),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn thermal_apply_vacuum() {
        let rho = DensityMatrix::vacuum(40).unwrap();
        let out = thermal_apply(&rho, 0.5, 1.0, default_env_dim(1.0)).unwrap();
        let want = thermal_number_dist(0, 0.5, 1.0, 40).unwrap();
        for (a, b) in out.populations().iter().zip(want.probs()) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((out.trace() + out.leakage() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pure_loss_keeps_coherent_states_coherent() {
        let alpha = Complex64::new(1.2, -0.5);
        let eta: f64 = 0.64;
        let rho = DensityMatrix::from_pure(&coherent_state(alpha, 40).unwrap());
        let out = thermal_apply(&rho, eta, 0.0, 1).unwrap();
        let target = coherent_state(alpha * eta.sqrt(), 40).unwrap();
        assert!(out.fidelity_with_pure(&target).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn gauss_hermite_moments() {
        let rule = GaussHermite::new(20).unwrap();
        for k in 0..20 {
            let exact = libm::tgamma(k as f64 + 0.5);
            let approx: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(2 * k))
                .sum();
            assert!((approx / exact - 1.0).abs() < 1e-11, "moment {k}");
        }
    }

    #[test]
    fn additive_apply_vacuum_and_identity_limit() {
        let rho = DensityMatrix::vacuum(30).unwrap();
        let out = additive_apply(&rho, 1.0, &QuadratureSpec::default()).unwrap();
        for (l, p) in out.state.populations().iter().enumerate() {
            assert!((p - 0.5f64.powi(l as i32 + 1)).abs() < 1e-6, "l = {l}");
        }
        let psi = DensityMatrix::from_pure(&coherent_state(Complex64::new(0.3, 0.4), 12).unwrap());
        let same = additive_apply(&psi, 0.0, &QuadratureSpec::default()).unwrap();
        assert!(trace_distance(&same.state, &psi).unwrap() < 1e-8);
        let tiny = additive_apply(&psi, 1e-12, &QuadratureSpec::default()).unwrap();
        assert!(trace_distance(&tiny.state, &psi).unwrap() < 1e-8);
    }

    #[test]
    fn additive_apply_rejects_coarse_grid() {
        let rho = DensityMatrix::vacuum(5).unwrap();
        let coarse = QuadratureSpec {
            order: 8,
            ..QuadratureSpec::default()
        };
        assert!(matches!(
            additive_apply(&rho, 1.0, &coarse),
            Err(Error::Tolerance { .. })
        ));
    }

    #[test]
    fn additive_apply_single_photon() {
        let rho = DensityMatrix::number_state(1, 30).unwrap();
        let out = additive_apply(&rho, 1.0, &QuadratureSpec::default()).unwrap();
        for (l, p) in out.state.populations().iter().enumerate() {
            let want = (1 + l) as f64 / 2f64.powi(l as i32 + 2);
            assert!((p - want).abs() < 1e-6, "l = {l}");
        }
    }
}
