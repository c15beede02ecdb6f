//! Classical-capacity bounds and the photon-number projector rank bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::g;
use crate::error::{invalid, Result};
use crate::fock::projector_rank;
use crate::special::log2_big;

fn check(eta: f64, n_s: f64, n_b: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("transmissivity {eta} outside [0, 1]")));
    }
    for (name, v) in [("N_S", n_s), ("noise", n_b)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(invalid(format!("{name} = {v} must be a nonnegative real")));
        }
    }
    Ok(())
}

/// `g(ηN_S + x) − g(x)` with `x = (1−η)N_B`.
pub fn cap_lower_thermal(eta: f64, n_s: f64, n_b: f64) -> Result<f64> {
    check(eta, n_s, n_b)?;
    let x = (1.0 - eta) * n_b;
    Ok(g(eta * n_s + x)? - g(x)?)
}

pub fn cap_lower_additive(n_s: f64, n_bar: f64) -> Result<f64> {
    check(1.0, n_s, n_bar)?;
    Ok(g(n_s + n_bar)? - g(n_bar)?)
}

/// `g(ηN_S + x) − log₂(1 + 2x)` with `x = (1−η)N_B`.
pub fn cap_upper_gio(eta: f64, n_s: f64, n_b: f64) -> Result<f64> {
    check(eta, n_s, n_b)?;
    let x = (1.0 - eta) * n_b;
    Ok(g(eta * n_s + x)? - (2.0 * x).ln_1p() / std::f64::consts::LN_2)
}

pub fn cap_upper_gio_additive(n_s: f64, n_bar: f64) -> Result<f64> {
    check(1.0, n_s, n_bar)?;
    Ok(g(n_s + n_bar)? - (2.0 * n_bar).ln_1p() / std::f64::consts::LN_2)
}

/// `g(ηN_S / ((1−η)N_B + 1))`.
pub fn cap_upper_ks(eta: f64, n_s: f64, n_b: f64) -> Result<f64> {
    check(eta, n_s, n_b)?;
    g(eta * n_s / ((1.0 - eta) * n_b + 1.0))
}

pub fn cap_upper_ks_additive(n_s: f64, n_bar: f64) -> Result<f64> {
    check(1.0, n_s, n_bar)?;
    g(n_s / (n_bar + 1.0))
}

/// All three bounds at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub eta: f64,
    pub n_s: f64,
    pub n_b: f64,
    pub lower: f64,
    pub upper_gio: f64,
    pub upper_ks: f64,
}

impl BoundRow {
    pub fn thermal(eta: f64, n_s: f64, n_b: f64) -> Result<Self> {
        Ok(Self {
            eta,
            n_s,
            n_b,
            lower: cap_lower_thermal(eta, n_s, n_b)?,
            upper_gio: cap_upper_gio(eta, n_s, n_b)?,
            upper_ks: cap_upper_ks(eta, n_s, n_b)?,
        })
    }

    /// Additive-noise bounds; `n_b` holds `n̄` and `eta` is 1.
    pub fn additive(n_s: f64, n_bar: f64) -> Result<Self> {
        Ok(Self {
            eta: 1.0,
            n_s,
            n_b: n_bar,
            lower: cap_lower_additive(n_s, n_bar)?,
            upper_gio: cap_upper_gio_additive(n_s, n_bar)?,
            upper_ks: cap_upper_ks_additive(n_s, n_bar)?,
        })
    }

    pub fn gap_gio(&self) -> f64 {
        self.upper_gio - self.lower
    }

    pub fn gap_ks(&self) -> f64 {
        self.upper_ks - self.lower
    }

    /// Both upper bounds dominate the lower bound up to rounding.
    pub fn ordered(&self) -> bool {
        self.lower <= self.upper_gio.min(self.upper_ks) + 1e-12
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(invalid(format!(
            "log grid needs 0 < lo <= hi and count >= 1, got [{lo}, {hi}] x {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == count => hi,
            _ => (a + step * i as f64).exp(),
        })
        .collect())
}

/// Thermal bounds on the product grid, in `eta`-major order.
pub fn thermal_bound_grid(etas: &[f64], n_ss: &[f64], n_bs: &[f64]) -> Result<Vec<BoundRow>> {
    let points: Vec<(f64, f64, f64)> = etas
        .iter()
        .flat_map(|&e| {
            n_ss.iter()
                .flat_map(move |&s| n_bs.iter().map(move |&b| (e, s, b)))
        })
        .collect();
    points
        .into_par_iter()
        .map(|(e, s, b)| BoundRow::thermal(e, s, b))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub n: u64,
    pub n_s: f64,
    pub limit: u64,
    pub exact_log2_rank: f64,
    /// `n[g(N_S) + δ]` with the smallest admissible `δ`.
    pub bound: f64,
    pub delta_used: f64,
    pub holds: bool,
}

/// Compares `log₂ rank Π_{⌈nN_S⌉}` with `n[g(N_S) + δ_min]`,
/// `δ_min = (log₂e + log₂(1 + 1/N_S))/n`.
pub fn rank_bound_check(n: u64, n_s: f64) -> Result<RankReport> {
    if n == 0 || !(n_s > 0.0 && n_s.is_finite()) {
        return Err(invalid(format!(
            "rank check needs n >= 1 and N_S > 0, got ({n}, {n_s})"
        )));
    }
    let limit = (n as f64 * n_s).ceil() as u64;
    let exact_log2_rank = log2_big(&projector_rank(n, limit)?);
    let nf = n as f64;
    let delta_used = (std::f64::consts::LOG2_E + (1.0 / n_s).ln_1p() / std::f64::consts::LN_2) / nf;
    let bound = nf * (g(n_s)? + delta_used);
    Ok(RankReport {
        n,
        n_s,
        limit,
        exact_log2_rank,
        bound,
        delta_used,
        holds: exact_log2_rank <= bound,
    })
}
