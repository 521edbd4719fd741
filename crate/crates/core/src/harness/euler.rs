//! The local density `∏_p (1 − (p−1)/(p^{n+1}−1))` of pairs distinct modulo every prime.

use serde::Serialize;

use crate::error::{Error, Result};

/// Primes up to `limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Fraction of pairs of points of `P^n(F_p)` that coincide: `(p−1)/(p^{n+1}−1)`.
pub fn congruent_fraction(n: usize, p: u64) -> f64 {
    let p = p as f64;
    (p - 1.0) / (p.powi(n as i32 + 1) - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerProduct {
    pub n: usize,
    pub cutoff: u64,
    /// `∏_{p ≤ cutoff}` of the local factors.
    pub partial: f64,
    /// Upper bound on `Σ_{p > cutoff} (p−1)/(p^{n+1}−1)`.
    pub tail_bound: f64,
    /// The full product lies in `[lower, upper]`.
    pub lower: f64,
    pub upper: f64,
}

/// Partial Euler product with a rigorous tail enclosure.
///
/// `(p−1)/(p^{n+1}−1) ≤ p^{−n}` and, by convexity of `x^{−n}`,
/// `Σ_{m > N} m^{−n} ≤ ∫_{N+½}^∞ x^{−n} dx = (N+½)^{1−n}/(n−1)`.
pub fn euler_product(n: usize, cutoff: u64) -> Result<EulerProduct> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "the product diverges unless n ≥ 2 (got n = {n})"
        )));
    }
    if cutoff < 2 {
        return Err(Error::InvalidArgument("cutoff must be at least 2".into()));
    }
    // compensated sum of log-factors
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for p in primes_up_to(cutoff) {
        let term = (-congruent_fraction(n, p)).ln_1p() - comp;
        let t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    let partial = sum.exp();
    let tail_bound = (cutoff as f64 + 0.5).powi(1 - n as i32) / (n as f64 - 1.0);
    Ok(EulerProduct {
        n,
        cutoff,
        partial,
        tail_bound,
        lower: partial * (1.0 - tail_bound),
        upper: partial,
    })
}
