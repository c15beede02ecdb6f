//! Strong-converse success-probability envelopes under a maximum photon-number
//! constraint.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bounds::{cap_upper_gio, cap_upper_gio_additive, cap_upper_ks, cap_upper_ks_additive};
use crate::entropy::g;
use crate::error::{invalid, Error, Result};

/// A slack term that may depend on the block length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaSchedule {
    /// `coeff · n^(−exponent)`.
    PowerLaw { coeff: f64, exponent: f64 },
    /// Explicit values; lookups outside the table fail.
    Table { values: BTreeMap<u64, f64> },
}

impl DeltaSchedule {
    pub fn inverse_n() -> Self {
        DeltaSchedule::PowerLaw {
            coeff: 1.0,
            exponent: 1.0,
        }
    }

    pub fn at(&self, n: u64) -> Result<f64> {
        match self {
            DeltaSchedule::PowerLaw { coeff, exponent } => Ok(coeff * (n as f64).powf(-exponent)),
            DeltaSchedule::Table { values } => {
                values.get(&n).copied().ok_or(Error::MissingDelta(n))
            }
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            DeltaSchedule::PowerLaw { coeff, exponent } => {
                if !(*coeff >= 0.0 && *exponent >= 0.0) {
                    return Err(invalid(format!(
                        "{name}: power law needs coeff >= 0 and exponent >= 0"
                    )));
                }
            }
            DeltaSchedule::Table { values } => {
                if values.values().any(|v| !(*v >= 0.0)) {
                    return Err(invalid(format!(
                        "{name}: table entries must be nonnegative"
                    )));
                }
                let ordered: Vec<f64> = values.values().copied().collect();
                if ordered.windows(2).any(|w| w[1] > w[0]) {
                    return Err(invalid(format!("{name}: table must be nonincreasing in n")));
                }
            }
        }
        Ok(())
    }
}

/// Slack terms of both envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub d1: DeltaSchedule,
    pub d2: f64,
    pub d3: f64,
    pub d4: DeltaSchedule,
    pub d5: f64,
    pub d6: DeltaSchedule,
    /// Exponent slack of the second envelope.
    pub delta: f64,
}

impl Default for Deltas {
    fn default() -> Self {
        Self {
            d1: DeltaSchedule::inverse_n(),
            d2: 1e-3,
            d3: 1e-3,
            d4: DeltaSchedule::inverse_n(),
            d5: 1e-3,
            d6: DeltaSchedule::inverse_n(),
            delta: 1e-3,
        }
    }
}

impl Deltas {
    pub fn zero() -> Self {
        let none = DeltaSchedule::PowerLaw {
            coeff: 0.0,
            exponent: 0.0,
        };
        Self {
            d1: none.clone(),
            d2: 0.0,
            d3: 0.0,
            d4: none.clone(),
            d5: 0.0,
            d6: none,
            delta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.d1.validate("d1")?;
        self.d4.validate("d4")?;
        self.d6.validate("d6")?;
        for (name, v) in [
            ("d2", self.d2),
            ("d3", self.d3),
            ("d5", self.d5),
            ("delta", self.delta),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} = {v} must be a nonnegative real")));
            }
        }
        Ok(())
    }
}

/// Thermal parameters with `(1−η)N_B` as the injected noise; the additive
/// channel is the substitution `(1−η)N_B → n̄` at `η = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case")]
pub enum ChannelParams {
    Thermal { eta: f64, n_b: f64 },
    Additive { n_bar: f64 },
}

impl ChannelParams {
    /// `(η, x)` with `x` the noise photons added at the output.
    pub fn transmission_and_noise(&self) -> (f64, f64) {
        match *self {
            ChannelParams::Thermal { eta, n_b } => (eta, (1.0 - eta) * n_b),
            ChannelParams::Additive { n_bar } => (1.0, n_bar),
        }
    }

    fn validate(&self) -> Result<()> {
        let (eta, x) = self.transmission_and_noise();
        if !(0.0..=1.0).contains(&eta) || !(x >= 0.0 && x.is_finite()) {
            return Err(invalid(format!("invalid channel parameters {self:?}")));
        }
        Ok(())
    }

    /// Rate above which the first envelope decays: `g(ηN_S / (x + 1))`.
    pub fn ks_threshold(&self, n_s: f64) -> Result<f64> {
        match *self {
            ChannelParams::Thermal { eta, n_b } => cap_upper_ks(eta, n_s, n_b),
            ChannelParams::Additive { n_bar } => cap_upper_ks_additive(n_s, n_bar),
        }
    }

    /// Rate above which the second envelope decays: `g(ηN_S + x) − log₂(1 + 2x)`.
    pub fn gio_threshold(&self, n_s: f64) -> Result<f64> {
        match *self {
            ChannelParams::Thermal { eta, n_b } => cap_upper_gio(eta, n_s, n_b),
            ChannelParams::Additive { n_bar } => cap_upper_gio_additive(n_s, n_bar),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseEnvelope {
    pub rate: f64,
    pub uses: u64,
    pub params: ChannelParams,
    pub n_s: f64,
    pub deltas: Deltas,
}

impl ConverseEnvelope {
    fn validate(&self) -> Result<()> {
        if self.uses == 0 {
            return Err(invalid("envelope needs n >= 1"));
        }
        if !(self.n_s >= 0.0 && self.n_s.is_finite()) || !self.rate.is_finite() {
            return Err(invalid(format!(
                "invalid rate {} or N_S {}",
                self.rate, self.n_s
            )));
        }
        self.params.validate()?;
        self.deltas.validate()
    }

    pub fn with_uses(&self, uses: u64) -> Self {
        Self {
            uses,
            ..self.clone()
        }
    }
}

/// `min(1, 2^{−n(R − g(ηN_S′) − δ₂ − δ₃)} + 2√(δ₁ + δ₄ + 2√δ₁))` with
/// `N_S′ = N_S/((1−η)N_B + 1)`.
pub fn envelope_thm1(env: &ConverseEnvelope) -> Result<f64> {
    env.validate()?;
    let n = env.uses;
    let d = &env.deltas;
    let (d1, d4) = (d.d1.at(n)?, d.d4.at(n)?);
    let exponent = env.rate - env.params.ks_threshold(env.n_s)? - d.d2 - d.d3;
    let decay = (-(n as f64) * exponent).exp2();
    let gentle = 2.0 * (d1 + d4 + 2.0 * d1.sqrt()).sqrt();
    Ok((decay + gentle).min(1.0))
}

/// `min(1, 2^{−n[R − (g(ηN_S + x + δ₅) − log₂(1+2x)) + (1/n)log₂n − δ]} + 1/n
/// + 2√(δ₁ + 2√δ₁ + δ₆))` with `x = (1−η)N_B`.
pub fn envelope_thm2(env: &ConverseEnvelope) -> Result<f64> {
    env.validate()?;
    let n = env.uses;
    let nf = n as f64;
    let d = &env.deltas;
    let (d1, d6) = (d.d1.at(n)?, d.d6.at(n)?);
    let (eta, x) = env.params.transmission_and_noise();
    let threshold = g(eta * env.n_s + x + d.d5)? - (2.0 * x).ln_1p() / std::f64::consts::LN_2;
    let exponent = env.rate - threshold + nf.log2() / nf - d.delta;
    let decay = (-nf * exponent).exp2();
    let gentle = 2.0 * (d1 + 2.0 * d1.sqrt() + d6).sqrt();
    Ok((decay + 1.0 / nf + gentle).min(1.0))
}

/// First `n` in `ns` at which `bound(n) < target`.
pub fn first_below<F>(
    ns: impl IntoIterator<Item = u64>,
    target: f64,
    mut bound: F,
) -> Result<Option<u64>>
where
    F: FnMut(u64) -> Result<f64>,
{
    for n in ns {
        if bound(n)? < target {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(rate: f64, deltas: Deltas) -> ConverseEnvelope {
        ConverseEnvelope {
            rate,
            uses: 100,
            params: ChannelParams::Thermal { eta: 0.5, n_b: 1.0 },
            n_s: 1.0,
            deltas,
        }
    }

    #[test]
    fn below_threshold_is_vacuous() {
        let ks = cap_upper_ks(0.5, 1.0, 1.0).unwrap();
        let env = base(ks - 0.1, Deltas::zero());
        for n in [1, 10, 1000] {
            assert_eq!(envelope_thm1(&env.with_uses(n)).unwrap(), 1.0);
        }
        let gio = cap_upper_gio(0.5, 1.0, 1.0).unwrap();
        let env = base(gio - 0.1, Deltas::zero());
        for n in [100, 1000, 100_000] {
            assert_eq!(envelope_thm2(&env.with_uses(n)).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_deltas_give_pure_exponential() {
        let ks = cap_upper_ks(0.5, 1.0, 1.0).unwrap();
        let env = base(ks + 0.05, Deltas::zero()).with_uses(200);
        let want = (-200.0 * 0.05f64).exp2();
        assert!((envelope_thm1(&env).unwrap() - want).abs() < 1e-12 * want.max(1e-300) + 1e-15);
    }

    #[test]
    fn exponential_term_shrinks_with_n() {
        let ks = cap_upper_ks(0.5, 1.0, 1.0).unwrap();
        let table = |n: u64| (n as f64).powi(-2);
        let deltas = Deltas {
            d1: DeltaSchedule::PowerLaw {
                coeff: 1.0,
                exponent: 2.0,
            },
            d2: 0.01,
            d3: 0.01,
            d4: DeltaSchedule::PowerLaw {
                coeff: 1.0,
                exponent: 2.0,
            },
            ..Deltas::zero()
        };
        let env = base(ks + 0.02 + 0.1, deltas);
        let gentle = |n: u64| 2.0 * (2.0 * table(n) + 2.0 * table(n).sqrt()).sqrt();
        let e100 = envelope_thm1(&env.with_uses(100)).unwrap() - gentle(100);
        let e1000 = envelope_thm1(&env.with_uses(1000)).unwrap() - gentle(1000);
        assert!(e100 / e1000 >= (0.1f64 * 900.0 * 0.9).exp2());
    }

    #[test]
    fn structural_terms_vanish() {
        let gio = cap_upper_gio(0.5, 1.0, 1.0).unwrap();
        let env = base(gio + 0.1, Deltas::zero());
        let values: Vec<f64> = [100u64, 1000, 10_000]
            .iter()
            .map(|&n| envelope_thm2(&env.with_uses(n)).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(values[2] < 2e-4);
    }

    #[test]
    fn additive_threshold_matches_substitution() {
        let p = ChannelParams::Additive { n_bar: 0.7 };
        let want = g(1.0 + 0.7).unwrap() - (1.0 + 1.4f64).log2();
        assert!((p.gio_threshold(1.0).unwrap() - want).abs() < 1e-14);
        let thermal = ChannelParams::Thermal {
            eta: 1.0 - 1e-6,
            n_b: 0.7 / 1e-6,
        };
        assert!((thermal.gio_threshold(1.0).unwrap() - want).abs() < 1e-4);
        assert!((thermal.ks_threshold(1.0).unwrap() - p.ks_threshold(1.0).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn missing_table_entry_is_reported() {
        let deltas = Deltas {
            d1: DeltaSchedule::Table {
                values: BTreeMap::from([(10, 0.1), (20, 0.05)]),
            },
            ..Deltas::default()
        };
        let env = base(3.0, deltas);
        assert!(envelope_thm1(&env.with_uses(10)).is_ok());
        assert!(matches!(
            envelope_thm1(&env.with_uses(15)),
            Err(Error::MissingDelta(15))
        ));
    }

    #[test]
    fn increasing_table_rejected() {
        let deltas = Deltas {
            d6: DeltaSchedule::Table {
                values: BTreeMap::from([(10, 0.1), (20, 0.2)]),
            },
            ..Deltas::default()
        };
        assert!(envelope_thm2(&base(3.0, deltas)).is_err());
    }
}
