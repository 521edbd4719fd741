//! Pairs of distinct points of `P^n`: congruence modulus W, chordal distance d,
//! the exceptional-divisor height `c = W / d`, and membership in `S_{C,δ}`.

use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::rational_from_decimal;
use crate::error::{Error, Result};
use crate::projective::ProjectivePoint;

/// The 2×2 minors `a_i b_j − a_j b_i` (i < j) of the stacked coordinates.
pub fn minors(x1: &ProjectivePoint, x2: &ProjectivePoint) -> Vec<i128> {
    let (a, b) = (x1.coords(), x2.coords());
    let mut out = Vec::with_capacity(a.len() * (a.len() - 1) / 2);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            out.push(a[i] as i128 * b[j] as i128 - a[j] as i128 * b[i] as i128);
        }
    }
    out
}

/// Largest W with `x1 ≡ x2` in `P^n(Z/W)`: the gcd of the 2×2 minors.
pub fn congruence_modulus(x1: &ProjectivePoint, x2: &ProjectivePoint) -> Result<u128> {
    check(x1, x2)?;
    let g = minors(x1, x2).iter().fold(0i128, |g, m| g.gcd(m));
    if g == 0 {
        return Err(Error::EqualPoints);
    }
    Ok(g.unsigned_abs())
}

/// `sin²` of the angle between the lines: `1 − (x1·x2)² / (|x1|²|x2|²)`.
pub fn chordal_distance_sq(x1: &ProjectivePoint, x2: &ProjectivePoint) -> Result<Ratio<i128>> {
    if x1.dim() != x2.dim() {
        return Err(Error::DimensionMismatch(x1.dim(), x2.dim()));
    }
    // Lagrange's identity: |a|²|b|² − (a·b)² = Σ minors²
    let num: i128 = minors(x1, x2).iter().map(|m| m * m).sum();
    let den = x1.norm_sq() as i128 * x2.norm_sq() as i128;
    Ok(Ratio::new(num, den))
}

fn check(x1: &ProjectivePoint, x2: &ProjectivePoint) -> Result<()> {
    if x1.dim() != x2.dim() {
        return Err(Error::DimensionMismatch(x1.dim(), x2.dim()));
    }
    if x1 == x2 {
        return Err(Error::EqualPoints);
    }
    Ok(())
}

/// An unordered pair of distinct points, stored with `x1 < x2` lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct PointPair {
    pub x1: ProjectivePoint,
    pub x2: ProjectivePoint,
    pub modulus: u128,
    pub dist_sq: Ratio<i128>,
    pub c: f64,
    pub log_h1: f64,
    pub log_h2: f64,
}

impl PointPair {
    pub fn new(a: ProjectivePoint, b: ProjectivePoint) -> Result<Self> {
        check(&a, &b)?;
        let (x1, x2) = if a.coords() <= b.coords() { (a, b) } else { (b, a) };
        let modulus = congruence_modulus(&x1, &x2)?;
        let dist_sq = chordal_distance_sq(&x1, &x2)?;
        let c = modulus as f64 / dist_sq.to_f64().expect("finite").sqrt();
        Ok(PointPair {
            log_h1: x1.log_height(),
            log_h2: x2.log_height(),
            x1,
            x2,
            modulus,
            dist_sq,
            c,
        })
    }

    pub fn dim(&self) -> usize {
        self.x1.dim()
    }

    /// `c² = W² / d²`, exactly.
    pub fn c_sq(&self) -> BigRational {
        let w = BigInt::from(self.modulus);
        BigRational::new(
            &w * &w * BigInt::from(*self.dist_sq.denom()),
            BigInt::from(*self.dist_sq.numer()),
        )
    }

    /// `c(x1, x2)`, the height attached to the exceptional divisor.
    pub fn second_height(&self) -> f64 {
        self.c
    }

    pub fn in_s(&self, params: &SParams) -> bool {
        params.c_below(&self.c_sq())
            && params.balanced(self.x1.norm_sq(), self.x2.norm_sq())
    }

    pub fn row(&self, params: &SParams) -> PairRow {
        PairRow {
            x1: self.x1.to_string(),
            x2: self.x2.to_string(),
            w: self.modulus,
            dist_sq_num: *self.dist_sq.numer(),
            dist_sq_den: *self.dist_sq.denom(),
            c: self.c,
            log_h1: self.log_h1,
            log_h2: self.log_h2,
            in_s: self.in_s(params),
        }
    }
}

/// Validated `(C, δ)` for `S_{C,δ}`, kept as exact rationals of their decimal forms.
#[derive(Clone, Debug)]
pub struct SParams {
    pub c: f64,
    pub delta: f64,
    c_sq: BigRational,
    /// `δ = delta_num / delta_den` in lowest terms.
    delta_num: u32,
    delta_den: u32,
}

impl SParams {
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        if !(c > 1.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("C must exceed 1, got {c}")));
        }
        let cq = rational_from_decimal(c)?;
        let dq = rational_from_decimal(delta)?;
        let delta_num = dq
            .numer()
            .to_u32()
            .ok_or_else(|| Error::InvalidArgument("delta has too many digits".into()))?;
        let delta_den = dq
            .denom()
            .to_u32()
            .ok_or_else(|| Error::InvalidArgument("delta has too many digits".into()))?;
        // the exact tie-break raises norms to these powers
        if delta_den > 1000 {
            return Err(Error::InvalidArgument(format!(
                "delta {delta} has more than three decimal places"
            )));
        }
        Ok(SParams {
            c,
            delta,
            c_sq: &cq * &cq,
            delta_num,
            delta_den,
        })
    }

    /// `c < C`, i.e. `c² < C²`, decided exactly.
    pub fn c_below(&self, c_sq: &BigRational) -> bool {
        c_sq < &self.c_sq
    }

    /// `W² · N1N2 < C² · Σminors²` without building rationals; falls back to big integers.
    pub(crate) fn c_below_parts(&self, w: u128, n1n2: u128, minor_sq_sum: u128) -> bool {
        let (cn, cd) = (self.c_sq.numer(), self.c_sq.denom());
        if let (Some(cn), Some(cd)) = (cn.to_u128(), cd.to_u128()) {
            let lhs = w.checked_mul(w).and_then(|x| x.checked_mul(n1n2)).and_then(|x| x.checked_mul(cd));
            let rhs = cn.checked_mul(minor_sq_sum);
            if let (Some(l), Some(r)) = (lhs, rhs) {
                return l < r;
            }
        }
        let w = BigInt::from(w);
        &w * &w * BigInt::from(n1n2) * cd < cn * BigInt::from(minor_sq_sum)
    }

    /// `log H(x_i) > δ (log H(x1) + log H(x2))` for both i, i.e. with `δ = a/b`,
    /// `N1^(b−a) > N2^a` and `N2^(b−a) > N1^a` for the squared norms.
    pub fn balanced(&self, n1: u64, n2: u64) -> bool {
        self.dominates(n1, n2) && self.dominates(n2, n1)
    }

    fn dominates(&self, x: u64, y: u64) -> bool {
        let (a, b) = (self.delta_num as f64, self.delta_den as f64);
        let (lx, ly) = ((x as f64).ln(), (y as f64).ln());
        let lhs = (b - a) * lx;
        let rhs = a * ly;
        let tol = 1e-9 * (lhs.abs() + rhs.abs() + 1.0);
        if lhs > rhs + tol {
            return true;
        }
        if lhs < rhs - tol {
            return false;
        }
        let (a, b) = (self.delta_num as usize, self.delta_den as usize);
        num_traits::pow(BigInt::from(x), b - a) > num_traits::pow(BigInt::from(y), a)
    }

    /// `2δn/(n+1)`, the freeness floor on `S_{C,δ}`.
    pub fn freeness_floor(&self, n: usize) -> f64 {
        2.0 * self.delta * n as f64 / (n as f64 + 1.0)
    }
}

/// One line of the pair CSV: `x1,x2,W,dist_sq_num,dist_sq_den,c,logH1,logH2,in_S`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PairRow {
    pub x1: String,
    pub x2: String,
    #[serde(rename = "W")]
    pub w: u128,
    pub dist_sq_num: i128,
    pub dist_sq_den: i128,
    pub c: f64,
    #[serde(rename = "logH1")]
    pub log_h1: f64,
    #[serde(rename = "logH2")]
    pub log_h2: f64,
    #[serde(rename = "in_S")]
    pub in_s: bool,
}

pub const PAIR_CSV_HEADER: &str = "x1,x2,W,dist_sq_num,dist_sq_den,c,logH1,logH2,in_S";

pub fn write_pairs_csv<W: Write>(rows: &[PairRow], mut out: W) -> Result<()> {
    writeln!(out, "{PAIR_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.x1, r.x2, r.w, r.dist_sq_num, r.dist_sq_den, r.c, r.log_h1, r.log_h2, r.in_s
        )?;
    }
    Ok(())
}
