//! Successive minima and minimal covolumes of rank-k sublattices.
//!
//! `min_covolume_sq(L, k)` is certified, not heuristic. Let Λ′ be a saturated
//! rank-k sublattice and `w_1, …, w_k` its successive-minima vectors. By
//! Minkowski's second theorem `Π|w_i|² ≤ γ_k^k · det Λ′`, and `|w_i| ≥ λ_i(L)`.
//! So if Λ′ beats an incumbent covolume `q`, then
//! `|w_k|² ≤ γ_k^k · q / Π_{i<k} λ_i(L)²`. Once every vector up to that radius
//! has been enumerated, the pruned search below has seen Λ′.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::enumerate::{enumerate_short_vectors_with, Limits, ShortVector};
use super::reduce::{lll, to_original};
use super::GramLattice;
use crate::arith::det_bareiss;
use crate::error::{Error, Result};

/// An exact rational upper bound for `γ_k^k`, the k-th power of Hermite's constant.
///
/// Exact values for k ≤ 8, and `(1 + k/4)^k` beyond.
pub fn hermite_power_bound(k: usize) -> BigRational {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    match k {
        0 | 1 => r(1, 1),
        2 => r(4, 3),
        3 => r(2, 1),
        4 => r(4, 1),
        5 => r(8, 1),
        6 => r(64, 3),
        7 => r(64, 1),
        8 => r(256, 1),
        _ => num_traits::pow(r(4 + k as i64, 4), k),
    }
}

/// Exact successive minima `λ_1², …, λ_m²` together with vectors attaining them.
pub fn successive_minima(l: &GramLattice, limits: &Limits) -> Result<Vec<ShortVector>> {
    let (reduced, u) = lll(l);
    reduced_minima(&reduced, l.rank(), limits)?
        .into_iter()
        .map(|v| {
            let coords = to_original(&v.coords, &u).ok_or(Error::Overflow("minima coordinates"))?;
            Ok(ShortVector { coords, ..v })
        })
        .collect()
}

/// The first `count` successive minima in the basis of `l`, which should already
/// be reduced.
fn reduced_minima(l: &GramLattice, count: usize, limits: &Limits) -> Result<Vec<ShortVector>> {
    let m = l.rank();
    let mut diag: Vec<BigRational> = (0..m).map(|i| l.gram()[i][i].clone()).collect();
    diag.sort();
    let mut found: Vec<ShortVector> = Vec::with_capacity(count);
    while found.len() < count {
        // λ_{j+1}² is at most the (j+1)-th smallest basis norm.
        let radius = &diag[found.len()];
        let vectors = enumerate_short_vectors_with(l, radius, limits)?;
        found.clear();
        let mut rows = RowSpace::new(m);
        for v in vectors {
            if rows.insert(&v.coords) {
                found.push(v);
                if found.len() == count {
                    break;
                }
            }
        }
    }
    Ok(found)
}

/// Incremental rank tracking for integer row vectors (fraction-free echelon form).
struct RowSpace {
    rows: Vec<(usize, Vec<BigInt>)>,
    dim: usize,
}

impl RowSpace {
    fn new(dim: usize) -> Self {
        RowSpace {
            rows: Vec::new(),
            dim,
        }
    }

    /// Adds `v` if it is independent of the rows so far; returns whether it was added.
    fn insert(&mut self, v: &[i64]) -> bool {
        let mut w: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
        for (pivot, row) in &self.rows {
            if w[*pivot].is_zero() {
                continue;
            }
            let a = row[*pivot].clone();
            let b = w[*pivot].clone();
            for j in 0..self.dim {
                w[j] = &w[j] * &a - &row[j] * &b;
            }
        }
        match w.iter().position(|c| !c.is_zero()) {
            Some(p) => {
                let g = w.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
                for c in &mut w {
                    *c /= &g;
                }
                self.rows.push((p, w));
                true
            }
            None => false,
        }
    }
}

/// Gcd of all k×k minors of a k×m integer matrix; zero iff the rows are dependent.
fn maximal_minor_gcd(rows: &[&[i64]]) -> BigInt {
    let k = rows.len();
    let m = rows[0].len();
    let mut g = BigInt::zero();
    let mut cols: Vec<usize> = (0..k).collect();
    loop {
        let minor = det_bareiss(
            rows.iter()
                .map(|r| cols.iter().map(|&c| BigInt::from(r[c])).collect())
                .collect(),
        );
        g = g.gcd(&minor);
        if g.is_one() {
            return g;
        }
        // next k-combination of 0..m in lexicographic order
        let mut i = k;
        while i > 0 && cols[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return g;
        }
        cols[i - 1] += 1;
        for j in i..k {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// Scaled Gram determinant of the span of `rows` (norms in units of the lattice denominator).
fn span_det_scaled(l: &GramLattice, rows: &[&[i64]]) -> BigInt {
    let (g, _) = l.integral();
    let m = l.rank();
    // rows · G
    let rg: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            (0..m)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for (i, &ri) in r.iter().enumerate() {
                        if ri != 0 {
                            acc += &g[i][j] * ri;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let gram: Vec<Vec<BigInt>> = rg
        .iter()
        .map(|a| {
            rows.iter()
                .map(|b| {
                    let mut acc = BigInt::zero();
                    for (j, &bj) in b.iter().enumerate() {
                        if bj != 0 {
                            acc += &a[j] * bj;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    det_bareiss(gram)
}

/// Squared covolume of the saturation of the span of `rows`, scaled by `denom^k`.
/// `None` when the rows are dependent.
fn saturated_det_scaled(l: &GramLattice, rows: &[&[i64]]) -> Option<BigInt> {
    let g = maximal_minor_gcd(rows);
    if g.is_zero() {
        return None;
    }
    Some(span_det_scaled(l, rows) / (&g * &g))
}

/// `q(k)`: the minimum of `det Gram(Λ′)` over rank-k sublattices Λ′.
pub fn min_covolume_sq(l: &GramLattice, k: usize) -> Result<BigRational> {
    min_covolume_sq_with(l, k, &Limits::default())
}

pub fn min_covolume_sq_with(l: &GramLattice, k: usize, limits: &Limits) -> Result<BigRational> {
    let m = l.rank();
    if k > m {
        return Err(Error::InvalidArgument(format!(
            "sublattice rank {k} exceeds lattice rank {m}"
        )));
    }
    if k == 0 {
        return Ok(BigRational::one());
    }
    if k == m {
        return Ok(l.det());
    }
    if 2 * k > m {
        // q_k(L) = det(L) · q_{m−k}(L*)
        return Ok(l.det() * min_covolume_sq_with(&l.dual(), m - k, limits)?);
    }
    let (l, minima) = prepare(l, k, limits)?;
    CovolumeSearch::new(&l, &minima, limits).minimum(k)
}

/// A reduced copy of `l` and its first `count` successive minima, ready for a
/// [`CovolumeSearch`] of ranks up to `count`.
pub(super) fn prepare(
    l: &GramLattice,
    count: usize,
    limits: &Limits,
) -> Result<(GramLattice, Vec<ShortVector>)> {
    let (l, _) = lll(l);
    let minima = reduced_minima(&l, count, limits)?;
    Ok((l, minima))
}

/// Shared state for computing several `q(k)` of one lattice.
/// The lattice should be LLL-reduced; see [`prepare`].
pub(super) struct CovolumeSearch<'a> {
    lattice: &'a GramLattice,
    minima: &'a [ShortVector],
    limits: &'a Limits,
    /// Largest radius enumerated so far, with its vectors.
    cache: Option<(BigRational, Vec<ShortVector>)>,
}

impl<'a> CovolumeSearch<'a> {
    pub(super) fn new(lattice: &'a GramLattice, minima: &'a [ShortVector], limits: &'a Limits) -> Self {
        CovolumeSearch {
            lattice,
            minima,
            limits,
            cache: None,
        }
    }

    fn vectors_within(&mut self, radius: &BigRational) -> Result<&[ShortVector]> {
        let stale = match &self.cache {
            Some((r, _)) => r < radius,
            None => true,
        };
        if stale {
            let v = enumerate_short_vectors_with(self.lattice, radius, self.limits)?;
            self.cache = Some((radius.clone(), v));
        }
        let (_, all) = self.cache.as_ref().unwrap();
        let denom = self.lattice.integral().1;
        let cut = (radius * denom).floor().to_integer();
        let end = all.partition_point(|v| v.scaled_norm <= cut);
        Ok(&all[..end])
    }

    pub(super) fn minimum(&mut self, k: usize) -> Result<BigRational> {
        let m = self.lattice.rank();
        if k == 0 {
            return Ok(BigRational::one());
        }
        if k == m {
            return Ok(self.lattice.det());
        }
        let denom = self.lattice.integral().1.clone();
        let scale_k = num_traits::pow(denom.clone(), k);
        if k == 1 {
            return Ok(self.minima[0].norm_sq.clone());
        }
        let rows: Vec<&[i64]> = self.minima[..k].iter().map(|v| v.coords.as_slice()).collect();
        let mut incumbent =
            saturated_det_scaled(self.lattice, &rows).expect("successive minima are independent");
        let gamma = hermite_power_bound(k);
        let lower: BigInt = self.minima[..k - 1]
            .iter()
            .fold(BigInt::one(), |acc, v| acc * &v.scaled_norm);
        let mut radius = self.minima[k - 1].norm_sq.clone();
        loop {
            let vectors = self.vectors_within(&radius)?.to_vec();
            let budget = (&gamma * BigRational::from_integer(incumbent.clone()))
                .floor()
                .to_integer();
            let mut dfs = Dfs {
                lattice: self.lattice,
                vectors: &vectors,
                k,
                gamma: &gamma,
                chosen: Vec::with_capacity(k),
                best: incumbent.clone(),
                budget,
            };
            dfs.run(0, &BigInt::one());
            incumbent = dfs.best;
            // Radius (in lattice units) that certifies the incumbent.
            let need = &gamma * BigRational::new(incumbent.clone(), &lower * &denom);
            if radius >= need {
                break;
            }
            radius = (&radius * BigInt::from(2)).min(need);
        }
        Ok(BigRational::new(incumbent, scale_k))
    }
}

struct Dfs<'a> {
    lattice: &'a GramLattice,
    vectors: &'a [ShortVector],
    k: usize,
    gamma: &'a BigRational,
    chosen: Vec<usize>,
    best: BigInt,
    /// floor(γ_k^k · best): bound on the product of scaled norms of a useful k-tuple.
    budget: BigInt,
}

impl Dfs<'_> {
    fn run(&mut self, start: usize, product: &BigInt) {
        let depth = self.chosen.len();
        let remaining = (self.k - depth) as u32;
        for idx in start..self.vectors.len() {
            let n = &self.vectors[idx].scaled_norm;
            // Norms are sorted, so every later tuple member is at least as long.
            if product * num_traits::pow(n.clone(), remaining as usize) > self.budget {
                break;
            }
            self.chosen.push(idx);
            let rows: Vec<&[i64]> = self
                .chosen
                .iter()
                .map(|&i| self.vectors[i].coords.as_slice())
                .collect();
            if span_det_scaled(self.lattice, &rows).is_zero() {
                self.chosen.pop();
                continue;
            }
            if depth + 1 == self.k {
                if let Some(d) = saturated_det_scaled(self.lattice, &rows) {
                    if d < self.best {
                        self.best = d;
                        self.budget = (self.gamma * BigRational::from_integer(self.best.clone()))
                            .floor()
                            .to_integer();
                    }
                }
            } else {
                let next = product * n;
                self.run(idx + 1, &next);
            }
            self.chosen.pop();
        }
    }
}
