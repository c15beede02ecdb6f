//! Phase-insensitive Gaussian channels as scalar pairs `(x, y)` acting on
//! covariance matrices by `Γ ↦ x²Γ + y·I`. Vacuum covariance is the identity.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussChannel {
    pub x: f64,
    pub y: f64,
}

impl GaussChannel {
    pub const IDENTITY: GaussChannel = GaussChannel { x: 1.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && y >= 0.0) {
            return Err(invalid(format!(
                "gaussian channel needs finite x and y >= 0, got ({x}, {y})"
            )));
        }
        Ok(Self { x, y })
    }

    /// Output variance for an isotropic input variance.
    pub fn apply_variance(&self, variance: f64) -> f64 {
        self.x * self.x * variance + self.y
    }

    /// Slack in the uncertainty condition `y ≥ |1 − x²|`.
    pub fn physicality_margin(&self) -> f64 {
        self.y - (1.0 - self.x * self.x).abs()
    }

    /// Largest componentwise difference.
    pub fn distance(&self, other: &GaussChannel) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

pub fn make_additive(n_bar: f64) -> Result<GaussChannel> {
    if !(n_bar.is_finite() && n_bar >= 0.0) {
        return Err(invalid(format!("n_bar = {n_bar} must be >= 0")));
    }
    Ok(GaussChannel {
        x: 1.0,
        y: 2.0 * n_bar,
    })
}

pub fn make_loss(eta: f64) -> Result<GaussChannel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("transmissivity {eta} outside [0, 1]")));
    }
    Ok(GaussChannel {
        x: eta.sqrt(),
        y: 1.0 - eta,
    })
}

pub fn make_thermal(eta: f64, n_b: f64) -> Result<GaussChannel> {
    if !(0.0..=1.0).contains(&eta) || !(n_b.is_finite() && n_b >= 0.0) {
        return Err(invalid(format!(
            "thermal channel needs eta in [0, 1] and N_B >= 0, got ({eta}, {n_b})"
        )));
    }
    Ok(GaussChannel {
        x: eta.sqrt(),
        y: (1.0 - eta) * (2.0 * n_b + 1.0),
    })
}

pub fn make_amplifier(gain: f64) -> Result<GaussChannel> {
    if !(gain.is_finite() && gain >= 1.0) {
        return Err(invalid(format!("amplifier gain {gain} must be >= 1")));
    }
    Ok(GaussChannel {
        x: gain.sqrt(),
        y: gain - 1.0,
    })
}

/// `second ∘ first`.
pub fn compose(second: GaussChannel, first: GaussChannel) -> GaussChannel {
    GaussChannel {
        x: second.x * first.x,
        y: second.x * second.x * first.y + second.y,
    }
}

/// Residuals of the three structural decompositions of the thermal and
/// additive channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionResiduals {
    /// `additive((1−η)N_B) ∘ loss(η)` against `thermal(η, N_B)`.
    pub loss_then_additive: f64,
    /// `amplifier(G₁) ∘ loss(η/G₁)` against `thermal(η, N_B)`.
    pub loss_then_amplifier: f64,
    /// `amplifier(n̄+1) ∘ loss(1/(n̄+1))` against `additive(n̄)`.
    pub additive_split: f64,
}

impl DecompositionResiduals {
    pub fn max(&self) -> f64 {
        self.loss_then_additive
            .max(self.loss_then_amplifier)
            .max(self.additive_split)
    }
}

pub fn decomposition_residuals(eta: f64, n_b: f64, n_bar: f64) -> Result<DecompositionResiduals> {
    let thermal = make_thermal(eta, n_b)?;
    let first = compose(make_additive((1.0 - eta) * n_b)?, make_loss(eta)?);
    let gain = (1.0 - eta) * n_b + 1.0;
    let second = compose(make_amplifier(gain)?, make_loss(eta / gain)?);
    let additive = compose(
        make_amplifier(n_bar + 1.0)?,
        make_loss(1.0 / (n_bar + 1.0))?,
    );
    Ok(DecompositionResiduals {
        loss_then_additive: first.distance(&thermal),
        loss_then_amplifier: second.distance(&thermal),
        additive_split: additive.distance(&make_additive(n_bar)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constructor_examples() {
        assert_eq!(make_additive(0.0).unwrap(), GaussChannel::IDENTITY);
        assert_eq!(make_additive(1.0).unwrap(), GaussChannel { x: 1.0, y: 2.0 });
        assert_eq!(make_loss(1.0).unwrap(), GaussChannel::IDENTITY);
        assert_eq!(
            make_loss(0.5).unwrap(),
            GaussChannel {
                x: 0.5f64.sqrt(),
                y: 0.5
            }
        );
        assert_eq!(make_thermal(0.3, 0.0).unwrap(), make_loss(0.3).unwrap());
        assert_eq!(
            make_thermal(0.5, 1.0).unwrap(),
            GaussChannel {
                x: 0.5f64.sqrt(),
                y: 1.5
            }
        );
        assert_eq!(make_amplifier(1.0).unwrap(), GaussChannel::IDENTITY);
        assert_eq!(
            make_amplifier(2.0).unwrap(),
            GaussChannel {
                x: 2f64.sqrt(),
                y: 1.0
            }
        );
        assert!(make_amplifier(0.9).is_err());
        assert!(make_loss(-0.1).is_err());
    }

    #[test]
    fn self_composition_adds_noise() {
        let a = make_additive(1.0).unwrap();
        assert_eq!(compose(a, a), make_additive(2.0).unwrap());
        let l = compose(make_loss(0.3).unwrap(), make_loss(0.6).unwrap());
        assert!(l.distance(&make_loss(0.18).unwrap()) < 1e-15);
    }

    #[test]
    fn physicality() {
        for g in [1.0, 1.5, 4.0] {
            assert!(make_amplifier(g).unwrap().physicality_margin().abs() < 1e-15);
        }
        for eta in [0.0, 0.2, 0.9] {
            assert!(make_loss(eta).unwrap().physicality_margin().abs() < 1e-15);
            assert!(make_thermal(eta, 0.7).unwrap().physicality_margin() >= 0.0);
        }
        assert!(make_additive(0.4).unwrap().physicality_margin() > 0.0);
    }

    #[test]
    fn thermal_limit_approaches_additive() {
        let n_bar = 0.8;
        for eta in [1.0 - 1e-3, 1.0 - 1e-6] {
            let t = make_thermal(eta, n_bar / (1.0 - eta)).unwrap();
            let a = make_additive(n_bar).unwrap();
            assert!(t.distance(&a) < 4.0 * (1.0 - eta));
        }
    }

    #[test]
    fn decompositions_on_grid() {
        for i in 1..=9 {
            let eta = i as f64 / 10.0;
            for n_b in [0.1, 1.0, 10.0] {
                for n_bar in [0.1, 1.0, 10.0] {
                    let r = decomposition_residuals(eta, n_b, n_bar).unwrap();
                    assert!(r.max() <= 1e-14, "eta={eta} n_b={n_b} n_bar={n_bar}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn vacuum_variance_matches_mean_photons() {
        let (eta, n_b) = (0.35, 2.5);
        let var = make_thermal(eta, n_b).unwrap().apply_variance(1.0);
        let dist = crate::channels::thermal_number_dist(0, eta, n_b, 400).unwrap();
        assert!(((var - 1.0) / 2.0 - dist.mean()).abs() < 1e-10);
    }

    fn channel() -> impl Strategy<Value = GaussChannel> {
        (-3.0f64..3.0, 0.0f64..20.0).prop_map(|(x, y)| GaussChannel { x, y })
    }

    proptest! {
        #[test]
        fn compose_is_associative(a in channel(), b in channel(), c in channel()) {
            let left = compose(compose(a, b), c);
            let right = compose(a, compose(b, c));
            let scale = 1.0 + left.y.abs();
            prop_assert!(left.distance(&right) <= 1e-14 * scale);
        }

        #[test]
        fn identity_is_neutral(a in channel()) {
            prop_assert_eq!(compose(GaussChannel::IDENTITY, a), a);
            prop_assert_eq!(compose(a, GaussChannel::IDENTITY), a);
        }
    }
}
