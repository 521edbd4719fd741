//! The canonical polygon of a lattice and the slopes read off it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::covolume::{prepare, CovolumeSearch};
use super::enumerate::Limits;
use super::{ratio_json, GramLattice};
use crate::arith::ln_ratio;
use crate::error::{Error, Result};

/// Minimal covolumes `q(k)`, the points `m′(k) = −½ log q(k)`, their upper concave
/// hull `m(i)`, and slopes `μ_i = m(i) − m(i−1)` (non-increasing).
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeProfile {
    covolume_sq: Vec<BigRational>,
    mprime: Vec<f64>,
    hull: Vec<f64>,
    slopes: Vec<f64>,
    vertices: Vec<usize>,
}

impl SlopeProfile {
    /// Builds the profile from exact minimal squared covolumes `q(0), …, q(m)`.
    ///
    /// Which points lie on the hull is decided exactly: `(j, m′(j))` is on or below
    /// the chord from `i` to `r` iff `q(j)^(r−i) ≥ q(i)^(r−j) · q(r)^(j−i)`.
    pub fn from_covolumes(covolume_sq: Vec<BigRational>) -> Self {
        let m = covolume_sq.len() - 1;
        let below_chord = |i: usize, j: usize, r: usize| {
            let lhs = num_traits::pow(covolume_sq[j].clone(), r - i);
            let rhs = num_traits::pow(covolume_sq[i].clone(), r - j)
                * num_traits::pow(covolume_sq[r].clone(), j - i);
            lhs >= rhs
        };
        let mut vertices: Vec<usize> = Vec::with_capacity(m + 1);
        for r in 0..=m {
            while vertices.len() >= 2 {
                let (i, j) = (vertices[vertices.len() - 2], vertices[vertices.len() - 1]);
                if below_chord(i, j, r) {
                    vertices.pop();
                } else {
                    break;
                }
            }
            vertices.push(r);
        }
        let mprime: Vec<f64> = covolume_sq.iter().map(|q| -0.5 * ln_ratio(q)).collect();
        let mut slopes = Vec::with_capacity(m);
        let mut hull = vec![0.0; m + 1];
        for w in vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            // slope from the exact ratio, not a difference of rounded logs
            let ratio = &covolume_sq[b] / &covolume_sq[a];
            let mu = -0.5 * ln_ratio(&ratio) / (b - a) as f64;
            for i in a + 1..=b {
                slopes.push(mu);
                hull[i] = if i == b {
                    mprime[b]
                } else {
                    mprime[a] + mu * (i - a) as f64
                };
            }
        }
        hull[0] = mprime[0];
        SlopeProfile {
            covolume_sq,
            mprime,
            hull,
            slopes,
            vertices,
        }
    }

    pub fn rank(&self) -> usize {
        self.slopes.len()
    }

    /// Exact `q(k)` for `k = 0..=m`.
    pub fn covolume_sq(&self) -> &[BigRational] {
        &self.covolume_sq
    }

    pub fn mprime(&self) -> &[f64] {
        &self.mprime
    }

    pub fn hull(&self) -> &[f64] {
        &self.hull
    }

    /// `μ_1 ≥ … ≥ μ_m`.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Indices k where the hull has a corner (always includes 0 and m).
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn min_slope(&self) -> f64 {
        *self.slopes.last().expect("rank is positive")
    }

    /// `Σ μ_i`, which equals `−½ log det(gram)`.
    pub fn total(&self) -> f64 {
        self.hull[self.rank()]
    }

    /// All slopes equal.
    pub fn is_semistable(&self) -> bool {
        self.vertices.len() == 2
    }
}

impl Serialize for SlopeProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SlopeProfile", 6)?;
        st.serialize_field("rank", &self.rank())?;
        let q: Vec<serde_json::Value> = self.covolume_sq.iter().map(ratio_json).collect();
        st.serialize_field("covolume_sq", &q)?;
        st.serialize_field("mprime", &self.mprime)?;
        st.serialize_field("hull", &self.hull)?;
        st.serialize_field("slopes", &self.slopes)?;
        st.serialize_field("vertices", &self.vertices)?;
        st.end()
    }
}

/// Shortest nonzero norm of a rank-2 integer Gram by Lagrange reduction in i128.
/// `None` if an intermediate value overflows.
fn rank2_shortest_scaled(g: &[Vec<BigInt>]) -> Option<BigInt> {
    let mut a = i128::try_from(&g[0][0]).ok()?;
    let mut b = i128::try_from(&g[0][1]).ok()?;
    let mut c = i128::try_from(&g[1][1]).ok()?;
    loop {
        if a > c {
            std::mem::swap(&mut a, &mut c);
        }
        if b.checked_mul(2)?.abs() <= a {
            return Some(BigInt::from(a));
        }
        // round(b / a) toward the nearest integer
        let t = (2 * b + a).div_euclid(2 * a);
        // (u, w) -> (u, w − t·u): b' = b − t·a, c' = c − 2t·b + t²·a
        let nb = b.checked_sub(t.checked_mul(a)?)?;
        let nc = c
            .checked_sub(t.checked_mul(b)?.checked_mul(2)?)?
            .checked_add(t.checked_mul(t)?.checked_mul(a)?)?;
        b = nb;
        c = nc;
    }
}

pub fn slope_profile(l: &GramLattice) -> Result<SlopeProfile> {
    slope_profile_with(l, &Limits::default())
}

pub fn slope_profile_with(l: &GramLattice, limits: &Limits) -> Result<SlopeProfile> {
    let m = l.rank();
    let (ints, denom) = l.integral();
    if m == 1 {
        return Ok(SlopeProfile::from_covolumes(vec![BigRational::one(), l.det()]));
    }
    if m == 2 {
        if let Some(shortest) = rank2_shortest_scaled(ints) {
            return Ok(SlopeProfile::from_covolumes(vec![
                BigRational::one(),
                BigRational::new(shortest, denom.clone()),
                l.det(),
            ]));
        }
    }
    // Searches stay at k ≤ m/2; the upper half comes from the dual lattice via
    // q_k(L) = det(L) · q_{m−k}(L*).
    let half = m / 2;
    let (reduced, minima) = prepare(l, half, limits)?;
    let mut search = CovolumeSearch::new(&reduced, &minima, limits);
    let mut q = (0..=half)
        .map(|k| search.minimum(k))
        .collect::<Result<Vec<_>>>()?;
    let det = l.det();
    let dual = l.dual();
    let (dual_reduced, dual_minima) = prepare(&dual, m - half - 1, limits)?;
    let mut dual_search = CovolumeSearch::new(&dual_reduced, &dual_minima, limits);
    for k in half + 1..=m {
        q.push(&det * dual_search.minimum(m - k)?);
    }
    Ok(SlopeProfile::from_covolumes(q))
}

/// `max(μ_m, 0) / (log_height / m)`; 1 when `log_height` is zero.
pub fn freeness_from_profile(p: &SlopeProfile, log_height: f64) -> Result<f64> {
    if log_height < 0.0 || log_height.is_nan() {
        return Err(Error::NegativeHeight(log_height));
    }
    if log_height == 0.0 {
        return Ok(1.0);
    }
    let m = p.rank() as f64;
    Ok(p.min_slope().max(0.0) / (log_height / m))
}
