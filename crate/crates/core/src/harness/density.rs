//! Empirical frequency of pairs that coincide modulo a prime.

use std::collections::HashMap;

use serde::Serialize;

use super::euler::{congruent_fraction, is_prime};
use crate::error::{Error, Result};
use crate::projective::enumerate_points;

pub const MIN_SAMPLE_PAIRS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub n: usize,
    pub p: u64,
    pub sample_bound: u64,
    pub points: u64,
    pub pairs: u64,
    pub congruent_pairs: u64,
    pub empirical: f64,
    pub expected: f64,
    pub relative_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Representative of the reduction of a primitive vector in `P^n(F_p)`:
/// scaled so its first nonzero residue is 1.
fn reduce_mod_p(coords: &[i64], p: i64) -> Vec<i64> {
    let r: Vec<i64> = coords.iter().map(|c| c.rem_euclid(p)).collect();
    let lead = *r.iter().find(|&&c| c != 0).expect("primitive vectors are nonzero mod p");
    let inv = mod_pow(lead, p - 2, p);
    r.iter().map(|&c| c * inv % p).collect()
}

fn mod_pow(mut b: i64, mut e: i64, m: i64) -> i64 {
    let mut acc = 1i64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Among all unordered pairs of distinct points with `|v|² ≤ sample_bound`, the
/// fraction whose reductions mod p agree.
pub fn congruence_density(n: usize, p: u64, sample_bound: u64) -> Result<DensityEstimate> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut classes: HashMap<Vec<i64>, u64> = HashMap::new();
    let mut points = 0u64;
    for x in enumerate_points(n, sample_bound) {
        *classes.entry(reduce_mod_p(x.coords(), p as i64)).or_default() += 1;
        points += 1;
    }
    let pairs = points * points.saturating_sub(1) / 2;
    let congruent_pairs: u64 = classes.values().map(|&k| k * (k - 1) / 2).sum();
    let empirical = if pairs == 0 { 0.0 } else { congruent_pairs as f64 / pairs as f64 };
    let expected = congruent_fraction(n, p);
    let warning = (pairs < MIN_SAMPLE_PAIRS)
        .then(|| format!("only {pairs} pairs sampled (want at least {MIN_SAMPLE_PAIRS})"));
    Ok(DensityEstimate {
        n,
        p,
        sample_bound,
        points,
        pairs,
        congruent_pairs,
        empirical,
        expected,
        relative_error: (empirical - expected).abs() / expected,
        warning,
    })
}
