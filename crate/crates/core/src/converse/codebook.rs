//! Binary coherent-state codes under a mean photon-number constraint: mixing
//! each codeword with vacuum keeps a fixed decoder's success probability
//! above `(1−p)` times its original value.

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{default_env_dim, thermal_apply};
use crate::error::{invalid, Error, Result};
use crate::fock::{coherent_state, expectation, DensityMatrix};
use crate::linalg::{self, CMatrix};

/// Output leakage above which the demo refuses to score.
pub const DEMO_LEAKAGE_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodebookSpec {
    pub n_modes: usize,
    /// Mean photon number `P` of each coherent codeword per mode.
    pub mean_amp_sq_p: f64,
    /// Probability `p` of replacing a codeword by vacuum.
    pub mix_p: f64,
    pub size_m: usize,
}

impl CodebookSpec {
    /// Per-mode mean photon number `(1−p)P` of the vacuum-mixed codewords.
    pub fn mixed_mean_photons(&self) -> f64 {
        (1.0 - self.mix_p) * self.mean_amp_sq_p
    }

    /// `(1−p)nP/(n+1) + p/(n+1)`, the per-mode mean photon number of the
    /// codeword purified with one ancilla mode.
    pub fn purified_mean_photons(&self) -> f64 {
        let n = self.n_modes as f64;
        (1.0 - self.mix_p) * n * self.mean_amp_sq_p / (n + 1.0) + self.mix_p / (n + 1.0)
    }

    fn validate(&self) -> Result<()> {
        if self.size_m != 2 {
            return Err(invalid(format!(
                "only binary codebooks are decodable here, got M = {}",
                self.size_m
            )));
        }
        if !(1..=2).contains(&self.n_modes) {
            return Err(invalid(format!(
                "codeword length must be 1 or 2, got {}",
                self.n_modes
            )));
        }
        if !(self.mean_amp_sq_p >= 0.0 && self.mean_amp_sq_p.is_finite()) {
            return Err(invalid(format!(
                "codeword power {} must be >= 0",
                self.mean_amp_sq_p
            )));
        }
        if !(0.0..=1.0).contains(&self.mix_p) {
            return Err(invalid(format!(
                "mixing probability {} outside [0, 1]",
                self.mix_p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanConstraintReport {
    /// Helstrom success `½ + ½‖½ρ₀ − ½ρ₁‖₁` for the pure codewords.
    pub succ_reference: f64,
    /// `1 − succ_reference`.
    pub reference_error: f64,
    /// Success of the same measurement on the vacuum-mixed codewords.
    pub succ_mixed: f64,
    /// `(1−p)(1−ε)`.
    pub succ_pure_codeword_bound: f64,
    pub inequality_holds: bool,
    /// Per-mode mean photon number of the mixed codewords from the truncated states.
    pub mixed_mean_photons: f64,
    /// Purified-codeword mean photon number from the truncated states.
    pub purified_mean_numeric: f64,
    pub purified_mean_closed_form: f64,
    pub max_leakage: f64,
    pub env_dim: usize,
}

fn tensor_power(rho: &DensityMatrix, n: usize) -> DensityMatrix {
    let mut out = rho.clone();
    for _ in 1..n {
        out = out.tensor(rho);
    }
    out
}

/// Antipodal codewords `|±√P⟩^{⊗n}` sent through the thermal channel and
/// scored with the Helstrom measurement, then re-scored after vacuum mixing.
pub fn mean_constraint_demo(
    spec: &CodebookSpec,
    eta: f64,
    n_b: f64,
    dim: usize,
) -> Result<MeanConstraintReport> {
    spec.validate()?;
    let amp = spec.mean_amp_sq_p.sqrt();
    let env_dim = default_env_dim(n_b);
    let channel_out = |alpha: f64| -> Result<(DensityMatrix, f64)> {
        let psi = coherent_state(Complex64::new(alpha, 0.0), dim)?;
        let out = thermal_apply(&DensityMatrix::from_pure(&psi), eta, n_b, env_dim)?;
        Ok((out, psi.mean_photons()))
    };
    let (plus, mean_in) = channel_out(amp)?;
    let (minus, _) = channel_out(-amp)?;
    let (vacuum, _) = channel_out(0.0)?;
    let max_leakage = [&plus, &minus, &vacuum]
        .iter()
        .map(|r| r.leakage())
        .fold(0.0f64, f64::max);
    if max_leakage > DEMO_LEAKAGE_LIMIT {
        return Err(Error::Tolerance {
            what: "channel output leakage in codebook demo",
            value: max_leakage,
            limit: DEMO_LEAKAGE_LIMIT,
        });
    }

    let n = spec.n_modes;
    let rho0 = tensor_power(&plus, n);
    let rho1 = tensor_power(&minus, n);
    let vac = tensor_power(&vacuum, n);

    let gamma = (rho0.matrix() - rho1.matrix()).scale(0.5);
    let eig = linalg::hermitian_eigen(&gamma);
    let lambda0 = eig.map(|v| Complex64::new(if v > 0.0 { 1.0 } else { 0.0 }, 0.0));
    let lambda1 = CMatrix::identity(lambda0.nrows(), lambda0.ncols()) - &lambda0;

    let score = |s0: &DensityMatrix, s1: &DensityMatrix| {
        0.5 * expectation(s0, &lambda0) + 0.5 * expectation(s1, &lambda1)
    };
    let succ_reference = score(&rho0, &rho1);
    let p = spec.mix_p;
    let sigma0 = rho0.mix(&vac, 1.0 - p)?;
    let sigma1 = rho1.mix(&vac, 1.0 - p)?;
    let succ_mixed = score(&sigma0, &sigma1);
    let reference_error = 1.0 - succ_reference;
    let bound = (1.0 - p) * (1.0 - reference_error);

    let nf = n as f64;
    Ok(MeanConstraintReport {
        succ_reference,
        reference_error,
        succ_mixed,
        succ_pure_codeword_bound: bound,
        inequality_holds: succ_mixed >= bound - 1e-9,
        mixed_mean_photons: (1.0 - p) * mean_in,
        purified_mean_numeric: ((1.0 - p) * nf * mean_in + p) / (nf + 1.0),
        purified_mean_closed_form: spec.purified_mean_photons(),
        max_leakage,
        env_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: f64) -> CodebookSpec {
        CodebookSpec {
            n_modes: 1,
            mean_amp_sq_p: 2.0,
            mix_p: p,
            size_m: 2,
        }
    }

    #[test]
    fn unmixed_matches_reference() {
        let r = mean_constraint_demo(&spec(0.0), 0.8, 0.5, 30).unwrap();
        assert!((r.succ_mixed - r.succ_reference).abs() < 1e-12);
        assert!(r.succ_reference > 0.5 && r.succ_reference <= 1.0);
    }

    #[test]
    fn helstrom_matches_trace_norm() {
        let r = mean_constraint_demo(&spec(0.0), 0.6, 0.3, 30).unwrap();
        let env = default_env_dim(0.3);
        let out = |a: f64| {
            let psi = coherent_state(Complex64::new(a, 0.0), 30).unwrap();
            thermal_apply(&DensityMatrix::from_pure(&psi), 0.6, 0.3, env).unwrap()
        };
        let diff = out(2f64.sqrt()).matrix() - out(-(2f64.sqrt())).matrix();
        let want = 0.5 + 0.25 * linalg::trace_norm_hermitian(&diff);
        // the environment tail leaves up to 1e-8 of each output untracked
        assert!((r.succ_reference - want).abs() < 1e-7);
    }

    #[test]
    fn mixing_keeps_fraction_of_success() {
        let r = mean_constraint_demo(&spec(0.5), 0.8, 0.5, 40).unwrap();
        assert!(r.inequality_holds);
        assert!((r.purified_mean_closed_form - 0.75).abs() < 1e-15);
        assert!((r.purified_mean_numeric - 0.75).abs() < 1e-12);
        assert!((r.mixed_mean_photons - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_modes() {
        let s = CodebookSpec {
            n_modes: 2,
            mean_amp_sq_p: 0.5,
            mix_p: 0.3,
            size_m: 2,
        };
        let r = mean_constraint_demo(&s, 0.7, 0.2, 12).unwrap();
        assert!(r.inequality_holds);
    }

    #[test]
    fn rejects_larger_codebooks() {
        let s = CodebookSpec {
            size_m: 3,
            ..spec(0.1)
        };
        assert!(mean_constraint_demo(&s, 0.8, 0.5, 20).is_err());
    }
}
