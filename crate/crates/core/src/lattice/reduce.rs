//! Exact LLL reduction acting on a Gram matrix.
//!
//! The searches in this module are run on a reduced basis; a badly skewed basis
//! makes the enumeration boxes needlessly large.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::GramLattice;

/// Gram–Schmidt data `(μ, B)` of an integer Gram matrix.
fn gso(g: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let m = g.len();
    let mut mu = vec![vec![BigRational::zero(); m]; m];
    let mut b = vec![BigRational::zero(); m];
    for i in 0..m {
        for j in 0..i {
            let mut v = BigRational::from_integer(g[i][j].clone());
            for t in 0..j {
                v -= &mu[j][t] * &mu[i][t] * &b[t];
            }
            mu[i][j] = v / &b[j];
        }
        let mut v = BigRational::from_integer(g[i][i].clone());
        for t in 0..i {
            v -= &mu[i][t] * &mu[i][t] * &b[t];
        }
        b[i] = v;
    }
    (mu, b)
}

/// `b_k ← b_k − r·b_j` on the Gram matrix and on the transform rows.
fn sub_row(g: &mut [Vec<BigInt>], u: &mut [Vec<i64>], k: usize, j: usize, r: &BigInt) {
    let m = g.len();
    let gkk = &g[k][k] - r * &g[k][j] * 2 + r * r * &g[j][j];
    for t in 0..m {
        if t != k {
            let v = &g[k][t] - r * &g[j][t];
            g[k][t] = v.clone();
            g[t][k] = v;
        }
    }
    g[k][k] = gkk;
    let r = i64::try_from(r).expect("LLL multipliers stay small");
    for t in 0..m {
        u[k][t] -= r * u[j][t];
    }
}

/// LLL-reduces `l` with parameter 3/4. Returns the reduced lattice and the
/// unimodular `U` whose row i gives reduced basis vector i in the old basis.
pub(crate) fn lll(l: &GramLattice) -> (GramLattice, Vec<Vec<i64>>) {
    let (ints, denom) = l.integral();
    let mut g: Vec<Vec<BigInt>> = ints.to_vec();
    let m = g.len();
    let mut u: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    let three_quarters = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    while k < m {
        for j in (0..k).rev() {
            let (mu, _) = gso(&g);
            let r = mu[k][j].round().to_integer();
            if !r.is_zero() {
                sub_row(&mut g, &mut u, k, j, &r);
            }
        }
        let (mu, b) = gso(&g);
        let lovasz = (&three_quarters - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if b[k] < lovasz {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    (GramLattice::from_scaled_unchecked(g, denom.clone()), u)
}

/// Maps coordinates in the reduced basis back to the original basis.
pub(crate) fn to_original(coords: &[i64], u: &[Vec<i64>]) -> Option<Vec<i64>> {
    let m = coords.len();
    (0..m)
        .map(|t| {
            let mut acc: i64 = 0;
            for (c, row) in coords.iter().zip(u) {
                acc = acc.checked_add(c.checked_mul(row[t])?)?;
            }
            Some(acc)
        })
        .collect()
}
