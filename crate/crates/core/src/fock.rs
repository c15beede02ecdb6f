//! Truncated Fock-space primitives: states, operators, norms and projectors.
//!
//! A truncation to `dim` levels keeps photon numbers `0..dim`. Whatever
//! probability falls outside is carried along as `leakage` instead of being
//! silently dropped, so every state satisfies `trace + leakage = 1`.

use nalgebra::DVector;
use num_bigint::BigUint;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CMatrix};
use crate::special::{binomial_big, ln_factorial, ln_pow};

const NORM_SLACK: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;
const TRACE_TOL: f64 = 1e-9;

/// Pure state amplitudes on `0..dim` photons.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
    leakage: f64,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(invalid("Fock vector needs dim >= 1"));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || norm2 > 1.0 + NORM_SLACK {
            return Err(invalid(format!("squared norm {norm2} exceeds 1")));
        }
        Ok(Self {
            amps,
            leakage: (1.0 - norm2).max(0.0),
        })
    }

    pub fn number_state(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(invalid(format!("|{k}> does not fit in dim {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn mean_photons(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| k as f64 * a.norm_sqr())
            .sum()
    }

    pub fn to_column(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amps)
    }
}

/// Hermitian positive semidefinite operator on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    leakage: f64,
}

impl DensityMatrix {
    /// Validates hermiticity, positivity and `trace + leakage ≈ 1`.
    pub fn new(matrix: CMatrix, leakage: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(invalid("density matrix must be square with dim >= 1"));
        }
        if !(leakage.is_finite() && leakage >= -NORM_SLACK) {
            return Err(invalid(format!("leakage {leakage} must be nonnegative")));
        }
        let asym = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if asym > HERMITIAN_TOL {
            return Err(invalid(format!("not Hermitian (defect {asym:.3e})")));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let total = linalg::trace_re(&matrix) + leakage;
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(invalid(format!("trace + leakage = {total}, expected 1")));
        }
        let min_eig = linalg::hermitian_eigenvalues(&matrix)[0];
        if min_eig < EIGEN_FLOOR {
            return Err(invalid(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self {
            matrix,
            leakage: leakage.max(0.0),
        })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts(matrix: CMatrix, leakage: f64) -> Self {
        Self {
            matrix,
            leakage: leakage.max(0.0),
        }
    }

    pub fn from_pure(psi: &FockVector) -> Self {
        let v = psi.to_column();
        Self::from_parts(&v * v.adjoint(), psi.leakage())
    }

    pub fn number_state(k: usize, dim: usize) -> Result<Self> {
        Ok(Self::from_pure(&FockVector::number_state(k, dim)?))
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::number_state(0, dim)
    }

    /// Number-diagonal state; the distribution tail becomes leakage.
    pub fn from_distribution(dist: &PhotonDistribution) -> Self {
        let probs = dist.probs();
        let n = probs.len();
        let matrix = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(probs[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::from_parts(matrix, dist.tail())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    /// Photon-number populations `⟨l|ρ|l⟩`.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn mean_photons(&self) -> f64 {
        self.populations()
            .iter()
            .enumerate()
            .map(|(l, p)| l as f64 * p)
            .sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &FockVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(psi.dim(), self.dim()));
        }
        let v = psi.to_column();
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    /// `ρ ⊗ σ` on the product of the two truncations.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let matrix = linalg::kron(&self.matrix, &other.matrix);
        let leakage = 1.0 - self.trace() * other.trace();
        Self::from_parts(matrix, leakage)
    }

    /// Convex combination `w ρ + (1 − w) σ`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(invalid(format!("mixing weight {weight} outside [0, 1]")));
        }
        let matrix = self.matrix.scale(weight) + other.matrix.scale(1.0 - weight);
        let leakage = weight * self.leakage + (1.0 - weight) * other.leakage;
        Ok(Self::from_parts(matrix, leakage))
    }
}

/// Probability vector over photon numbers `0..D` plus the mass beyond `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
    tail: f64,
}

impl PhotonDistribution {
    pub fn new(probs: Vec<f64>, tail: f64) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(invalid(format!(
                "probability {p} is not a nonnegative real"
            )));
        }
        if !(tail.is_finite() && tail >= 0.0) {
            return Err(invalid(format!("tail {tail} is not a nonnegative real")));
        }
        let total = probs.iter().sum::<f64>() + tail;
        if (total - 1.0).abs() > NORM_SLACK {
            return Err(invalid(format!("probabilities plus tail sum to {total}")));
        }
        Ok(Self { probs, tail })
    }

    /// Tail is whatever `probs` leaves out of unit mass, clamped at zero.
    pub(crate) fn with_implied_tail(mut probs: Vec<f64>) -> Self {
        let sum: f64 = probs.iter().sum();
        if sum > 1.0 {
            // rounding overshoot; keep the normalization invariant exact
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0);
        Self { probs, tail }
    }

    pub fn point_mass(k: usize, dim: usize) -> Self {
        let mut probs = vec![0.0; dim];
        if k < dim {
            probs[k] = 1.0;
            Self { probs, tail: 0.0 }
        } else {
            Self { probs, tail: 1.0 }
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Mean over the kept levels.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(l, p)| l as f64 * p)
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(l, p)| (l * l) as f64 * p)
            .sum()
    }

    /// Total-variation distance, treating both tails as one extra outcome.
    pub fn total_variation(&self, other: &PhotonDistribution) -> f64 {
        let n = self.len().max(other.len());
        let at = |d: &PhotonDistribution, l: usize| d.probs.get(l).copied().unwrap_or(0.0);
        let body: f64 = (0..n).map(|l| (at(self, l) - at(other, l)).abs()).sum();
        0.5 * (body + (self.tail - other.tail).abs())
    }
}

/// Coherent state `|α⟩` truncated to `dim` levels.
///
/// Amplitudes are assembled as `exp(−|α|²/2 + k ln|α| − ln√k!)` times the
/// phase `e^{ikθ}`, which stays finite for amplitudes far beyond `k!` overflow.
pub fn coherent_state(alpha: Complex64, dim: usize) -> Result<FockVector> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(invalid("coherent amplitude must be finite"));
    }
    if dim == 0 {
        return Err(invalid("coherent state needs dim >= 1"));
    }
    let r = alpha.norm();
    let theta = alpha.arg();
    let amps = (0..dim)
        .map(|k| {
            let log_mag = -0.5 * r * r + ln_pow(r, k as u64) - 0.5 * ln_factorial(k as u64);
            Complex64::from_polar(log_mag.exp(), k as f64 * theta)
        })
        .collect();
    FockVector::new(amps)
}

/// Thermal state with mean photon number `mean_photons`.
pub fn thermal_state(mean_photons: f64, dim: usize) -> Result<DensityMatrix> {
    let dist = thermal_distribution(mean_photons, dim)?;
    Ok(DensityMatrix::from_distribution(&dist))
}

/// Geometric law `(1/(N+1)) (N/(N+1))^l` with tail `(N/(N+1))^dim`.
pub fn thermal_distribution(mean_photons: f64, dim: usize) -> Result<PhotonDistribution> {
    if !(mean_photons.is_finite() && mean_photons >= 0.0) {
        return Err(invalid(format!(
            "mean photon number {mean_photons} must be >= 0"
        )));
    }
    if dim == 0 {
        return Err(invalid("thermal state needs dim >= 1"));
    }
    let ratio = mean_photons / (mean_photons + 1.0);
    let head = 1.0 / (mean_photons + 1.0);
    let probs: Vec<f64> = (0..dim).map(|l| head * ratio.powi(l as i32)).collect();
    let tail = ratio.powi(dim as i32);
    Ok(PhotonDistribution { probs, tail })
}

/// Truncated annihilation operator, `a|k⟩ = √k |k−1⟩`.
pub fn annihilation(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Displacement operator built as the exponential of the truncated generator.
#[derive(Debug, Clone)]
pub struct DisplacementOperator {
    pub matrix: CMatrix,
}

impl DisplacementOperator {
    /// `‖U†U − I‖_max` on the photon-number block `0..=block`.
    pub fn unitary_defect(&self, block: usize) -> f64 {
        let n = (block + 1).min(self.matrix.nrows());
        let u = self.matrix.columns(0, n);
        let gram = u.adjoint() * u;
        linalg::max_abs(&(gram - CMatrix::identity(n, n)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `D(α) = exp(α a† − α* a)` on `dim` levels.
///
/// Truncating the generator distorts the top of the ladder; choose `dim`
/// around four times the largest photon number of interest.
pub fn displacement_operator(alpha: Complex64, dim: usize) -> Result<DisplacementOperator> {
    if dim < 2 {
        return Err(invalid("displacement operator needs dim >= 2"));
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(invalid("displacement amplitude must be finite"));
    }
    let a = annihilation(dim);
    let generator = a.adjoint() * alpha - &a * alpha.conj();
    Ok(DisplacementOperator {
        matrix: linalg::expm_antihermitian(&generator),
    })
}

/// Matrix elements `⟨m|D(α)|n⟩` of the untruncated displacement operator
/// for `m < rows`, `n < cols`, via associated Laguerre polynomials.
pub fn displacement_elements(alpha: Complex64, rows: usize, cols: usize) -> CMatrix {
    let r = alpha.norm();
    let x = r * r;
    let theta = alpha.arg();
    let mut out = CMatrix::zeros(rows, cols);
    // m = n + d (d >= 0) uses α^d, m + d = n uses (−α*)^d
    let diag_count = rows.max(cols);
    for d in 0..diag_count {
        let lower_len = rows.saturating_sub(d).min(cols);
        let upper_len = cols.saturating_sub(d).min(rows);
        let len = lower_len.max(upper_len);
        if len == 0 {
            continue;
        }
        let lag = laguerre_table(len, d as f64, x);
        for (small, &poly) in lag.iter().enumerate() {
            if poly == 0.0 {
                continue;
            }
            let big = small + d;
            let log_mag = 0.5 * (ln_factorial(small as u64) - ln_factorial(big as u64))
                + ln_pow(r, d as u64)
                - 0.5 * x
                + poly.abs().ln();
            let mag = poly.signum() * log_mag.exp();
            if small < lower_len {
                out[(big, small)] = Complex64::from_polar(mag, d as f64 * theta);
            }
            if d > 0 && small < upper_len {
                let phase = d as f64 * (std::f64::consts::PI - theta);
                out[(small, big)] = Complex64::from_polar(mag, phase);
            }
        }
    }
    out
}

/// `L_k^{(a)}(x)` for `k = 0..len` by the three-term recurrence.
fn laguerre_table(len: usize, a: f64, x: f64) -> Vec<f64> {
    let mut table = Vec::with_capacity(len);
    if len == 0 {
        return table;
    }
    table.push(1.0);
    if len == 1 {
        return table;
    }
    table.push(1.0 + a - x);
    for k in 1..len - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * table[k] - (kf + a) * table[k - 1]) / (kf + 1.0);
        table.push(next);
    }
    table
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(0.5 * linalg::trace_norm_hermitian(&(rho.matrix() - sigma.matrix())))
}

/// Largest eigenvalue `‖ρ‖_∞`.
pub fn infinity_norm(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().last().copied().unwrap_or(0.0).max(0.0)
}

/// `‖ρ − √Λ ρ √Λ‖₁` for an effect `0 ≤ Λ ≤ I`.
///
/// When `Tr{Λρ} ≥ 1 − ε` the result is at most `2√ε`.
pub fn gentle_measurement_defect(rho: &DensityMatrix, effect: &CMatrix) -> Result<f64> {
    if effect.nrows() != rho.dim() || !effect.is_square() {
        return Err(Error::DimensionMismatch(effect.nrows(), rho.dim()));
    }
    check_effect(effect)?;
    let root = linalg::psd_sqrt(effect);
    let disturbed = &root * rho.matrix() * &root;
    Ok(linalg::trace_norm_hermitian(&(rho.matrix() - disturbed)))
}

/// Rejects operators outside `[0, I]` (with `1e-10` slack).
pub fn check_effect(effect: &CMatrix) -> Result<()> {
    let asym = linalg::max_abs(&(effect - effect.adjoint()));
    if asym > HERMITIAN_TOL {
        return Err(invalid(format!(
            "effect is not Hermitian (defect {asym:.3e})"
        )));
    }
    let eig = linalg::hermitian_eigenvalues(effect);
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    if lo < -1e-10 || hi > 1.0 + 1e-10 {
        return Err(invalid(format!(
            "effect spectrum [{lo}, {hi}] not within [0, 1]"
        )));
    }
    Ok(())
}

/// `Tr{Λρ}`.
pub fn expectation(rho: &DensityMatrix, op: &CMatrix) -> f64 {
    linalg::trace_re(&(op * rho.matrix()))
}

/// Projector onto `n`-mode number states with total photon number at most `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutoffProjector {
    pub modes: u64,
    pub limit: u64,
}

impl CutoffProjector {
    pub fn new(modes: u64, limit: u64) -> Result<Self> {
        if modes == 0 {
            return Err(invalid("cutoff projector needs at least one mode"));
        }
        Ok(Self { modes, limit })
    }

    /// Number of nonnegative `n`-tuples with sum at most `L`, i.e. `C(L+n, n)`.
    pub fn rank(&self) -> BigUint {
        binomial_big(self.limit + self.modes, self.modes)
    }

    pub fn contains(&self, photons: &[u64]) -> bool {
        photons.len() as u64 == self.modes && photons.iter().sum::<u64>() <= self.limit
    }
}

pub fn projector_rank(modes: u64, limit: u64) -> Result<BigUint> {
    Ok(CutoffProjector::new(modes, limit)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_coherent_state() {
        let psi = coherent_state(c(0.0, 0.0), 4).unwrap();
        assert_eq!(psi.amps()[0], c(1.0, 0.0));
        assert!(psi.amps()[1..].iter().all(|a| a.norm() == 0.0));
        assert_eq!(psi.leakage(), 0.0);
    }

    #[test]
    fn coherent_populations_alpha_one() {
        let psi = coherent_state(c(1.0, 0.0), 2).unwrap();
        let e = (-1.0f64).exp();
        assert!((psi.amps()[0].norm_sqr() - e).abs() < 1e-15);
        assert!((psi.amps()[1].norm_sqr() - e).abs() < 1e-15);
        assert!((psi.leakage() - (1.0 - 2.0 * e)).abs() < 1e-15);
    }

    #[test]
    fn coherent_leakage_alpha_two() {
        // oracle: Poisson(4) tail from k = 30 summed to 200 terms
        let mut term = (-4.0f64).exp();
        let mut tail = 0.0;
        for k in 0..200u32 {
            if k >= 30 {
                tail += term;
            }
            term *= 4.0 / (k + 1) as f64;
        }
        let psi = coherent_state(c(2.0, 0.0), 30).unwrap();
        assert!(psi.leakage() < 1e-10);
        assert!(tail < 1e-10);
    }

    #[test]
    fn coherent_rejects_nan() {
        assert!(coherent_state(c(f64::NAN, 0.0), 3).is_err());
    }

    #[test]
    fn thermal_examples() {
        let vac = thermal_state(0.0, 5).unwrap();
        assert_eq!(vac.populations(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(vac.leakage(), 0.0);

        let t = thermal_state(1.0, 3).unwrap();
        assert_eq!(t.populations(), vec![0.5, 0.25, 0.125]);
        assert_eq!(t.leakage(), 0.125);

        let t = thermal_state(0.5, 50).unwrap();
        let pops = t.populations();
        for w in pops.windows(2) {
            assert!((w[1] / w[0] - 1.0 / 3.0).abs() < 1e-14);
        }
        assert!((t.leakage() / 3f64.powi(-50) - 1.0).abs() < 1e-12);
        assert!(thermal_state(-0.1, 4).is_err());
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = displacement_operator(c(0.0, 0.0), 6).unwrap();
        assert!(linalg::max_abs(&(d.matrix - CMatrix::identity(6, 6))) < 1e-14);
    }

    #[test]
    fn displaced_vacuum_is_coherent() {
        let alpha = c(1.0, 0.0);
        let d = displacement_operator(alpha, 60).unwrap();
        let psi = coherent_state(alpha, 60).unwrap();
        for k in 0..30 {
            assert!((d.matrix[(k, 0)] - psi.amps()[k]).norm() < 1e-8, "k = {k}");
        }
        let d = displacement_operator(c(0.6, -0.8), 40).unwrap();
        assert!(d.unitary_defect(10) < 1e-8);
    }

    #[test]
    fn closed_form_elements_match_exponential() {
        let alpha = c(0.7, 0.4);
        let d = displacement_operator(alpha, 80).unwrap();
        let exact = displacement_elements(alpha, 12, 12);
        for m in 0..12 {
            for n in 0..12 {
                assert!(
                    (d.matrix[(m, n)] - exact[(m, n)]).norm() < 1e-10,
                    "({m},{n})"
                );
            }
        }
        let psi = coherent_state(alpha, 12).unwrap();
        for k in 0..12 {
            assert!((exact[(k, 0)] - psi.amps()[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn trace_distance_examples() {
        let zero = DensityMatrix::number_state(0, 2).unwrap();
        let one = DensityMatrix::number_state(1, 2).unwrap();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        let a = DensityMatrix::from_distribution(
            &PhotonDistribution::new(vec![0.5, 0.5], 0.0).unwrap(),
        );
        let b = DensityMatrix::from_distribution(
            &PhotonDistribution::new(vec![0.75, 0.25], 0.0).unwrap(),
        );
        assert!((trace_distance(&a, &b).unwrap() - 0.25).abs() < 1e-14);
        let three = DensityMatrix::number_state(0, 3).unwrap();
        assert!(matches!(
            trace_distance(&zero, &three),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn infinity_norm_examples() {
        let mixed = DensityMatrix::from_distribution(
            &PhotonDistribution::new(vec![0.5, 0.5], 0.0).unwrap(),
        );
        assert!((infinity_norm(&mixed) - 0.5).abs() < 1e-15);
        let t = thermal_state(1.0, 8).unwrap();
        assert!((infinity_norm(&t) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gentle_measurement_trivial_cases() {
        let rho = DensityMatrix::number_state(0, 3).unwrap();
        let id = CMatrix::identity(3, 3);
        assert!(gentle_measurement_defect(&rho, &id).unwrap() < 1e-14);
        let mut proj = CMatrix::zeros(3, 3);
        proj[(0, 0)] = c(1.0, 0.0);
        assert!(gentle_measurement_defect(&rho, &proj).unwrap() < 1e-14);
        let too_big = id.scale(1.5);
        assert!(gentle_measurement_defect(&rho, &too_big).is_err());
    }

    #[test]
    fn projector_rank_examples() {
        assert_eq!(projector_rank(1, 5).unwrap(), BigUint::from(6u32));
        assert_eq!(projector_rank(2, 2).unwrap(), BigUint::from(6u32));
        assert_eq!(projector_rank(3, 4).unwrap(), BigUint::from(35u32));
        assert!(projector_rank(0, 4).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let bad =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(bad, 0.0).is_err());
        let neg =
            CMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(DensityMatrix::new(neg, 0.0).is_err());
        let short = CMatrix::from_row_slice(1, 1, &[c(0.9, 0.0)]);
        assert!(DensityMatrix::new(short.clone(), 0.0).is_err());
        assert!(DensityMatrix::new(short, 0.1).is_ok());
    }

    #[test]
    fn photon_distribution_validation() {
        assert!(PhotonDistribution::new(vec![0.5, 0.4], 0.1).is_ok());
        assert!(PhotonDistribution::new(vec![0.5, 0.4], 0.0).is_err());
        assert!(PhotonDistribution::new(vec![1.1, -0.1], 0.0).is_err());
    }
}
