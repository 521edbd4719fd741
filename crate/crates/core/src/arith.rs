//! Exact integer and rational helpers shared by the lattice and point code.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Natural log of a positive big integer, accurate to f64 precision at any size.
pub fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.sign() == Sign::Plus);
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("positive integer below 2^1000").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_ratio(q: &BigRational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Leading principal minors of a symmetric integer matrix, in order.
pub fn leading_minors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    (1..=m.len())
        .map(|k| det_bareiss(m[..k].iter().map(|row| row[..k].to_vec()).collect()))
        .collect()
}

/// Exact rational value of the shortest decimal rendering of `x`.
///
/// `0.4` becomes `2/5`, not the binary neighbour of 0.4; user-facing real
/// parameters are meant as the decimals they were typed as.
pub fn rational_from_decimal(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite value {x}")));
    }
    let s = format!("{x}");
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse {s}")))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let q = BigRational::new(numer, denom);
    Ok(if neg { -q } else { q })
}

/// Integer square root (floor) of a non-negative integer.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Least common multiple of the denominators of a list of rationals.
pub fn common_denominator<'a>(entries: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    entries
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
