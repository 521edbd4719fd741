//! Euclidean lattices given by exact Gram matrices, and their slope profiles.

mod covolume;
mod enumerate;
mod reduce;
mod slopes;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{common_denominator, det_bareiss, leading_minors};
use crate::error::{Error, Result};

pub use covolume::{hermite_power_bound, min_covolume_sq, min_covolume_sq_with, successive_minima};
pub use enumerate::{enumerate_short_vectors, enumerate_short_vectors_with, Limits, ShortVector};
pub use slopes::{freeness_from_profile, slope_profile, slope_profile_with, SlopeProfile};

/// A rank-m lattice presented by the Gram matrix of a fixed basis.
///
/// The rational Gram is kept alongside an integer copy `int_gram = denom * gram`
/// so the search code can stay in integer arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct GramLattice {
    gram: Vec<Vec<BigRational>>,
    int_gram: Vec<Vec<BigInt>>,
    denom: BigInt,
}

impl GramLattice {
    /// Validates symmetry and positive definiteness.
    pub fn new(gram: Vec<Vec<BigRational>>) -> Result<Self> {
        let m = gram.len();
        if m == 0 {
            return Err(Error::MalformedGram("rank must be positive".into()));
        }
        if let Some(row) = gram.iter().find(|r| r.len() != m) {
            return Err(Error::MalformedGram(format!(
                "row of length {} in a rank-{m} gram",
                row.len()
            )));
        }
        for i in 0..m {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let denom = common_denominator(gram.iter().flatten());
        let int_gram: Vec<Vec<BigInt>> = gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|q| (q * &denom).to_integer())
                    .collect()
            })
            .collect();
        for (k, minor) in leading_minors(&int_gram).iter().enumerate() {
            if !minor.is_positive() {
                return Err(Error::NotPositiveDefinite(k + 1));
            }
        }
        Ok(GramLattice {
            gram,
            int_gram,
            denom,
        })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    /// Integer Gram divided by a common denominator, without a second validation pass.
    pub(crate) fn from_scaled_unchecked(int_gram: Vec<Vec<BigInt>>, denom: BigInt) -> Self {
        let gram = int_gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| BigRational::new(v.clone(), denom.clone()))
                    .collect()
            })
            .collect::<Vec<Vec<_>>>();
        let denom2 = common_denominator(gram.iter().flatten());
        let int_gram = gram
            .iter()
            .map(|row| row.iter().map(|q| (q * &denom2).to_integer()).collect())
            .collect();
        GramLattice {
            gram,
            int_gram,
            denom: denom2,
        }
    }

    pub fn identity(rank: usize) -> Self {
        let ints: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::from_integers(&ints).expect("identity is positive definite")
    }

    pub fn diagonal(entries: &[BigRational]) -> Result<Self> {
        let m = entries.len();
        Self::new(
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| if i == j { entries[i].clone() } else { BigRational::zero() })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<BigRational>] {
        &self.gram
    }

    /// `(int_gram, denom)` with `gram = int_gram / denom`.
    pub fn integral(&self) -> (&[Vec<BigInt>], &BigInt) {
        (&self.int_gram, &self.denom)
    }

    /// Squared covolume, i.e. `det(gram)`.
    pub fn det(&self) -> BigRational {
        let d = det_bareiss(self.int_gram.clone());
        BigRational::new(d, num_traits::pow(self.denom.clone(), self.rank()))
    }

    /// Squared norm of the vector with the given basis coordinates.
    pub fn norm_sq(&self, coords: &[i64]) -> BigRational {
        BigRational::new(self.scaled_norm(coords), self.denom.clone())
    }

    pub(crate) fn scaled_norm(&self, coords: &[i64]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, &ci) in coords.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for (j, &cj) in coords.iter().enumerate() {
                if cj != 0 {
                    row += &self.int_gram[i][j] * cj;
                }
            }
            acc += row * ci;
        }
        acc
    }

    /// The lattice with every inner product multiplied by `factor` (i.e. lengths by its square root).
    pub fn scaled(&self, factor: &BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        Self::new(
            self.gram
                .iter()
                .map(|row| row.iter().map(|q| q * factor).collect())
                .collect(),
        )
    }

    /// The dual lattice, whose Gram matrix in the dual basis is `gram⁻¹`.
    pub fn dual(&self) -> GramLattice {
        let m = self.rank();
        let mut a: Vec<Vec<BigRational>> = self
            .gram
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..m).map(|j| BigRational::from_integer(BigInt::from(u8::from(i == j)))));
                r
            })
            .collect();
        for c in 0..m {
            // positive definite, so the diagonal pivots never vanish
            let piv = a[c][c].clone();
            for v in a[c].iter_mut() {
                *v /= &piv;
            }
            for r in 0..m {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in 0..2 * m {
                        let t = &f * &a[c][k];
                        a[r][k] -= t;
                    }
                }
            }
        }
        let inv: Vec<Vec<BigRational>> = a.into_iter().map(|r| r[m..].to_vec()).collect();
        GramLattice::new(inv).expect("the inverse of a positive definite gram is positive definite")
    }

    /// Orthogonal sum: block-diagonal Gram.
    pub fn direct_sum(&self, other: &GramLattice) -> GramLattice {
        let (a, b) = (self.rank(), other.rank());
        let mut gram = vec![vec![BigRational::zero(); a + b]; a + b];
        for i in 0..a {
            for j in 0..a {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                gram[a + i][a + j] = other.gram[i][j].clone();
            }
        }
        let denom = num_integer::Integer::lcm(&self.denom, &other.denom);
        let int_gram = gram
            .iter()
            .map(|row| row.iter().map(|q| (q * &denom).to_integer()).collect())
            .collect();
        GramLattice {
            gram,
            int_gram,
            denom,
        }
    }
}

impl fmt::Debug for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GramLattice")
            .field("rank", &self.rank())
            .field(
                "gram",
                &self
                    .gram
                    .iter()
                    .map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// A JSON integer, or a decimal string for values outside the i64 range.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for WireInt {
    fn from(v: &BigInt) -> Self {
        match i64::try_from(v) {
            Ok(s) => WireInt::Small(s),
            Err(_) => WireInt::Big(v.to_string()),
        }
    }
}

impl WireInt {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            WireInt::Small(v) => Ok(BigInt::from(*v)),
            WireInt::Big(s) => s
                .parse()
                .map_err(|_| Error::MalformedGram(format!("not an integer: {s:?}"))),
        }
    }
}

/// `[num, den]` JSON form of a rational, as used in the lattice wire format.
pub(crate) fn ratio_json(q: &BigRational) -> serde_json::Value {
    serde_json::to_value([WireInt::from(q.numer()), WireInt::from(q.denom())])
        .expect("integers serialize")
}

/// `{"rank": m, "gram": [[num, den], ...]}` with the m² entries in row-major order.
#[derive(Serialize, Deserialize)]
struct WireLattice {
    rank: usize,
    gram: Vec<[WireInt; 2]>,
}

impl Serialize for GramLattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireLattice {
            rank: self.rank(),
            gram: self
                .gram
                .iter()
                .flatten()
                .map(|q| [WireInt::from(q.numer()), WireInt::from(q.denom())])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramLattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = WireLattice::deserialize(d)?;
        GramLattice::try_from(wire).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<WireLattice> for GramLattice {
    type Error = Error;

    fn try_from(wire: WireLattice) -> Result<Self> {
        let m = wire.rank;
        if wire.gram.len() != m * m {
            return Err(Error::MalformedGram(format!(
                "rank {m} needs {} entries, got {}",
                m * m,
                wire.gram.len()
            )));
        }
        let mut entries = Vec::with_capacity(m * m);
        for [n, d] in &wire.gram {
            let (n, d) = (n.to_bigint()?, d.to_bigint()?);
            if d.is_zero() {
                return Err(Error::MalformedGram("zero denominator".into()));
            }
            entries.push(BigRational::new(n, d));
        }
        let rows = entries.chunks(m.max(1)).map(|c| c.to_vec()).collect();
        GramLattice::new(rows)
    }
}

/// Parses a lattice from its JSON wire form.
pub fn lattice_from_json(text: &str) -> Result<GramLattice> {
    let wire: WireLattice = serde_json::from_str(text)?;
    GramLattice::try_from(wire)
}
