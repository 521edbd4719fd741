//! Exact short-vector enumeration (Fincke–Pohst over the rationals).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::GramLattice;
use crate::error::{Error, Result};

/// Caps on the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of ±pairs a single enumeration may return.
    pub max_vectors: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vectors: 1 << 20,
        }
    }
}

impl Limits {
    pub const ENV_VAR: &'static str = "FREELAT_MAX_VECTORS";

    /// Defaults, overridden by `FREELAT_MAX_VECTORS` when it parses as a positive integer.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .map(|max_vectors| Limits { max_vectors })
            .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    /// Coordinates in the lattice basis; the first nonzero entry is positive.
    pub coords: Vec<i64>,
    pub norm_sq: BigRational,
    /// `norm_sq` times the lattice's integer denominator.
    pub(crate) scaled_norm: BigInt,
}

/// `gram = L·D·Lᵀ` with L unit lower triangular, so that
/// `q(x) = Σ_k d_k (x_k + Σ_{i>k} L[i][k] x_i)²`.
struct Ldl {
    l: Vec<Vec<BigRational>>,
    d: Vec<BigRational>,
}

fn ldl(g: &[Vec<BigRational>]) -> Ldl {
    let m = g.len();
    let mut l = vec![vec![BigRational::zero(); m]; m];
    let mut d = vec![BigRational::zero(); m];
    for i in 0..m {
        let mut di = g[i][i].clone();
        for k in 0..i {
            di -= &l[i][k] * &l[i][k] * &d[k];
        }
        d[i] = di;
        l[i][i] = BigRational::from_integer(1.into());
        for j in i + 1..m {
            let mut v = g[j][i].clone();
            for k in 0..i {
                v -= &l[j][k] * &l[i][k] * &d[k];
            }
            l[j][i] = v / &d[i];
        }
    }
    Ldl { l, d }
}

struct Search<'a> {
    ldl: Ldl,
    bound: &'a BigRational,
    cap: usize,
    x: Vec<i64>,
    out: Vec<Vec<i64>>,
}

impl Search<'_> {
    /// Fills coordinate `k` given `x[k+1..]`, with `used` the norm spent on the higher levels.
    fn level(&mut self, k: usize, used: &BigRational, higher_zero: bool) -> Result<()> {
        let m = self.x.len();
        let mut center = BigRational::zero();
        for i in k + 1..m {
            if self.x[i] != 0 {
                center -= &self.ldl.l[i][k] * BigRational::from_integer(self.x[i].into());
            }
        }
        let budget = self.bound - used;
        let dk = self.ldl.d[k].clone();
        // The admissible x form an integer interval around the center; walk outwards
        // from it in both directions until the exact test fails.
        let fits = |x: i64| -> Option<BigRational> {
            let t = BigRational::from_integer(x.into()) - &center;
            let cost = &t * &t * &dk;
            (cost <= budget).then_some(cost)
        };
        let start = center.floor().to_integer();
        let start = i64::try_from(&start).map_err(|_| Error::Overflow("enumeration center"))?;
        let down: Box<dyn Iterator<Item = i64>> = Box::new((i64::MIN..=start).rev());
        let up: Box<dyn Iterator<Item = i64>> = Box::new(start + 1..);
        for dir in [down, up] {
            for x in dir {
                // Canonical sign: the topmost nonzero coordinate is positive.
                if higher_zero && x < 0 {
                    break;
                }
                let Some(cost) = fits(x) else {
                    break;
                };
                self.x[k] = x;
                let now = used + cost;
                if k == 0 {
                    if !(higher_zero && x == 0) {
                        if self.out.len() >= self.cap {
                            return Err(Error::TooManyVectors { cap: self.cap });
                        }
                        self.out.push(self.x.clone());
                    }
                } else {
                    self.level(k - 1, &now, higher_zero && x == 0)?;
                }
            }
        }
        self.x[k] = 0;
        Ok(())
    }
}

/// All nonzero vectors with `vᵀ·gram·v ≤ bound_sq`, one per ±pair, sorted by
/// (norm, coordinates).
pub fn enumerate_short_vectors(l: &GramLattice, bound_sq: &BigRational) -> Result<Vec<ShortVector>> {
    enumerate_short_vectors_with(l, bound_sq, &Limits::default())
}

pub fn enumerate_short_vectors_with(
    l: &GramLattice,
    bound_sq: &BigRational,
    limits: &Limits,
) -> Result<Vec<ShortVector>> {
    if !bound_sq.is_positive() {
        return Err(Error::InvalidArgument("search bound must be positive".into()));
    }
    let m = l.rank();
    let mut search = Search {
        ldl: ldl(l.gram()),
        bound: bound_sq,
        cap: limits.max_vectors,
        x: vec![0; m],
        out: Vec::new(),
    };
    search.level(m - 1, &BigRational::zero(), true)?;
    let mut out: Vec<ShortVector> = search
        .out
        .into_iter()
        .map(|mut coords| {
            if coords.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
                coords.iter_mut().for_each(|c| *c = -*c);
            }
            let scaled_norm = l.scaled_norm(&coords);
            ShortVector {
                norm_sq: BigRational::new(scaled_norm.clone(), l.integral().1.clone()),
                scaled_norm,
                coords,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.scaled_norm
            .cmp(&b.scaled_norm)
            .then_with(|| a.coords.cmp(&b.coords))
    });
    Ok(out)
}
