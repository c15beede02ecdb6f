//! Log-space combinatorics.
//!
//! Photon-number laws multiply binomials, factorials and powers that overflow
//! long before the resulting probability does, so every term is assembled as a
//! natural logarithm and exponentiated last.

use num_bigint::BigUint;

/// `ln(k!)` via the log-gamma function.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(k as f64 + 1.0)
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        f64::NEG_INFINITY
    } else if k == 0 || k == n {
        0.0
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

/// `exponent * ln(base)` with the convention `0^0 = 1`.
pub fn ln_pow(base: f64, exponent: u64) -> f64 {
    if exponent == 0 {
        0.0
    } else if base == 0.0 {
        f64::NEG_INFINITY
    } else {
        exponent as f64 * base.ln()
    }
}

/// Numerically stable `ln Σ exp(x_i)`. Empty input and all `-inf` give `-inf`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// `log2` of an arbitrarily large integer, accurate to double precision.
pub fn log2_big(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    // keep the 64 leading bits and account for the dropped ones
    let shift = bits.saturating_sub(64);
    let head: BigUint = value >> shift;
    let head = head.iter_u64_digits().next().unwrap_or(0) as f64;
    head.log2() + shift as f64
}

/// `C(n, k)` as an exact big integer.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
