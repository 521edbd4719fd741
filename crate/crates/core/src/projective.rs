//! Rational points of `P^n` and `P^n × P^n`, their heights, tangent lattices and freeness.
//!
//! Metric conventions: `Z^{n+1}` carries the standard Euclidean form, which induces
//! the Fubini–Study metric on `P^n(R)`. The tangent space at `x = [v]` is
//! `Hom(Zv, Z^{n+1}/Zv)`; the quotient is measured through the orthogonal
//! projection onto `v^⊥` and the `Hom` divides lengths by `|v|`. With these
//! choices `det(T_x) = |v|^{-2(n+1)}` exactly and the anticanonical height is
//! `H(x) = |v|^{n+1}`, so `log H(x)` is the sum of the tangent slopes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::lattice::{freeness_from_profile, slope_profile_with, GramLattice, Limits, SlopeProfile};

/// A point of `P^n(Q)` as a primitive integer vector whose first nonzero entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<i64>,
    norm_sq: u64,
}

impl ProjectivePoint {
    /// Divides out the gcd and fixes the sign.
    pub fn normalize(raw: &[i64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidArgument("a point needs at least one coordinate".into()));
        }
        let g = raw.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return Err(Error::ZeroVector);
        }
        let mut coords: Vec<i64> = raw.iter().map(|&c| c / g).collect();
        if coords.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            coords.iter_mut().for_each(|c| *c = -*c);
        }
        let norm_sq = coords
            .iter()
            .try_fold(0u64, |acc, &c| {
                let sq = (c.unsigned_abs()).checked_mul(c.unsigned_abs())?;
                acc.checked_add(sq)
            })
            .ok_or(Error::Overflow("squared norm"))?;
        Ok(ProjectivePoint { coords, norm_sq })
    }

    /// Caller guarantees `coords` is primitive, canonically signed, with the given norm.
    fn from_canonical(coords: Vec<i64>, norm_sq: u64) -> Self {
        ProjectivePoint { coords, norm_sq }
    }

    /// Ambient dimension n of `P^n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn norm_sq(&self) -> u64 {
        self.norm_sq
    }

    /// `log H(x) = (n+1)/2 · log |v|²`.
    pub fn log_height(&self) -> f64 {
        (self.dim() + 1) as f64 / 2.0 * (self.norm_sq as f64).ln()
    }

    pub fn dot(&self, other: &ProjectivePoint) -> i128 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    /// Vectors `b_1, …, b_n` such that `(v, b_1, …, b_n)` is a basis of `Z^{n+1}`.
    pub fn quotient_basis(&self) -> Vec<Vec<i64>> {
        let m = self.coords.len();
        // Reduce w = U·v to ±e_0 by unimodular row operations on w, mirrored as the
        // inverse column operations on `basis` (= U⁻¹), so `basis[0]` ends up as v.
        let mut w: Vec<i64> = self.coords.clone();
        let mut basis: Vec<Vec<i64>> = (0..m)
            .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
            .collect();
        for j in 1..m {
            while w[j] != 0 {
                let q = w[0].div_euclid(w[j]);
                // row_0 -= q·row_j  <=>  col_j += q·col_0
                w[0] -= q * w[j];
                let c0 = basis[0].clone();
                for (x, y) in basis[j].iter_mut().zip(&c0) {
                    *x += q * y;
                }
                w.swap(0, j);
                basis.swap(0, j);
            }
        }
        if w[0] < 0 {
            basis[0].iter_mut().for_each(|x| *x = -*x);
        }
        debug_assert_eq!(basis[0], self.coords);
        basis.remove(0);
        basis
    }

    /// The tangent lattice `T_x P^n` with its log-height.
    pub fn tangent_lattice(&self) -> TangentLattice {
        let n = self.dim();
        let v = &self.coords;
        let basis = self.quotient_basis();
        let nn = self.norm_sq as i128;
        let dot = |a: &[i64], b: &[i64]| -> i128 {
            a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
        };
        let along: Vec<i128> = basis.iter().map(|b| dot(b, v)).collect();
        // <π a, π b> / |v|² with π the projection onto v^⊥, over the common denominator |v|⁴
        let int_gram: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        BigInt::from(dot(&basis[i], &basis[j])) * nn
                            - BigInt::from(along[i]) * along[j]
                    })
                    .collect()
            })
            .collect();
        let lattice = GramLattice::from_scaled_unchecked(int_gram, BigInt::from(nn) * nn);
        TangentLattice {
            lattice,
            log_height: self.log_height(),
        }
    }

    pub fn slope_profile(&self, limits: &Limits) -> Result<SlopeProfile> {
        slope_profile_with(&self.tangent_lattice().lattice, limits)
    }

    /// Freeness `l(x) = max(μ_n, 0) / (log H(x) / n)`, with `l = 1` at height 1.
    pub fn freeness(&self) -> Result<f64> {
        Ok(self.freeness_data(&Limits::default())?.freeness)
    }

    pub fn freeness_data(&self, limits: &Limits) -> Result<PointFreeness> {
        let t = self.tangent_lattice();
        let profile = slope_profile_with(&t.lattice, limits)?;
        Ok(PointFreeness {
            freeness: freeness_from_profile(&profile, t.log_height)?,
            min_slope: profile.min_slope(),
            log_height: t.log_height,
        })
    }
}

/// The pieces of a point's freeness that pair computations reuse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointFreeness {
    pub freeness: f64,
    pub min_slope: f64,
    pub log_height: f64,
}

#[derive(Clone, Debug)]
pub struct TangentLattice {
    pub lattice: GramLattice,
    pub log_height: f64,
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for ProjectivePoint {
    type Err = Error;

    /// Parses `"x0:x1:...:xn"`.
    fn from_str(s: &str) -> Result<Self> {
        let raw = s
            .trim()
            .split(':')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::MalformedPoint(s.to_string()))?;
        if raw.len() < 2 {
            return Err(Error::MalformedPoint(s.to_string()));
        }
        ProjectivePoint::normalize(&raw)
    }
}

impl Serialize for ProjectivePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProjectivePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_same_dim(x1: &ProjectivePoint, x2: &ProjectivePoint) -> Result<()> {
    if x1.dim() != x2.dim() {
        return Err(Error::DimensionMismatch(x1.dim(), x2.dim()));
    }
    Ok(())
}

/// Tangent lattice at `(x1, x2) ∈ P^n × P^n`: the orthogonal sum, with heights adding.
pub fn pair_tangent(x1: &ProjectivePoint, x2: &ProjectivePoint) -> Result<TangentLattice> {
    check_same_dim(x1, x2)?;
    let (a, b) = (x1.tangent_lattice(), x2.tangent_lattice());
    Ok(TangentLattice {
        lattice: a.lattice.direct_sum(&b.lattice),
        log_height: a.log_height + b.log_height,
    })
}

/// `2n · min(l₁ log H₁ / n, l₂ log H₂ / n) / (log H₁ + log H₂)`.
pub fn product_freeness_formula(n: usize, l1: f64, log_h1: f64, l2: f64, log_h2: f64) -> f64 {
    let n = n as f64;
    2.0 * n * (l1 * log_h1 / n).min(l2 * log_h2 / n) / (log_h1 + log_h2)
}

/// Freeness of a point of `P^n × P^n` computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairFreeness {
    /// From the slope profile of the rank-2n orthogonal sum.
    pub direct: f64,
    /// From the factor freenesses via the product formula.
    pub formula: f64,
}

pub fn pair_freeness(x1: &ProjectivePoint, x2: &ProjectivePoint) -> Result<PairFreeness> {
    pair_freeness_with(x1, x2, &Limits::default())
}

pub fn pair_freeness_with(
    x1: &ProjectivePoint,
    x2: &ProjectivePoint,
    limits: &Limits,
) -> Result<PairFreeness> {
    check_same_dim(x1, x2)?;
    if x1.norm_sq == 1 && x2.norm_sq == 1 {
        return Err(Error::DegenerateHeight);
    }
    let t = pair_tangent(x1, x2)?;
    let profile = slope_profile_with(&t.lattice, limits)?;
    let direct = freeness_from_profile(&profile, t.log_height)?;
    let (f1, f2) = (x1.freeness_data(limits)?, x2.freeness_data(limits)?);
    let formula =
        product_freeness_formula(x1.dim(), f1.freeness, f1.log_height, f2.freeness, f2.log_height);
    Ok(PairFreeness { direct, formula })
}

/// Pair freeness from the factors' slope data alone.
///
/// The canonical polygon of an orthogonal sum has the merged slope multiset, so
/// the smallest slope of the sum is the smaller of the two smallest slopes.
pub fn pair_freeness_from_factors(n: usize, f1: &PointFreeness, f2: &PointFreeness) -> f64 {
    let log_h = f1.log_height + f2.log_height;
    if log_h == 0.0 {
        return 1.0;
    }
    f1.min_slope.min(f2.min_slope).max(0.0) / (log_h / (2 * n) as f64)
}

/// Every point of `P^n(Q)` with `|v|² ≤ max_norm_sq`, once each, in lexicographic
/// order of the canonical coordinates.
pub fn enumerate_points(n: usize, max_norm_sq: u64) -> impl Iterator<Item = ProjectivePoint> {
    let r = isqrt(max_norm_sq) as i64;
    // Outer loop over the leading coordinate; each block is materialized separately.
    (0..=r).flat_map(move |lead| {
        let mut block = Vec::new();
        let rest = max_norm_sq - (lead * lead) as u64;
        let mut coords = vec![0i64; n + 1];
        coords[0] = lead;
        fill_tail(&mut coords, 1, rest, lead == 0, lead, &mut block, max_norm_sq);
        block.into_iter()
    })
}

#[allow(clippy::too_many_arguments)]
fn fill_tail(
    coords: &mut Vec<i64>,
    pos: usize,
    budget: u64,
    all_zero: bool,
    g: i64,
    out: &mut Vec<ProjectivePoint>,
    max_norm_sq: u64,
) {
    if pos == coords.len() {
        if g == 1 {
            let norm = max_norm_sq - budget;
            out.push(ProjectivePoint::from_canonical(coords.clone(), norm));
        }
        return;
    }
    let r = isqrt(budget) as i64;
    // Leading nonzero coordinate must be positive.
    let lo = if all_zero { 0 } else { -r };
    for c in lo..=r {
        coords[pos] = c;
        let next_budget = budget - (c * c) as u64;
        fill_tail(
            coords,
            pos + 1,
            next_budget,
            all_zero && c == 0,
            g.gcd(&c),
            out,
            max_norm_sq,
        );
    }
    coords[pos] = 0;
}
