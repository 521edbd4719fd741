use num_rational::BigRational;
use proptest::prelude::*;

use freelat::lattice::{min_covolume_sq, slope_profile};
use freelat::projective::{pair_tangent, ProjectivePoint};
use freelat::GramLattice;

/// Gram of `B^T B` for a nonsingular integer `B`, so always positive definite.
fn gram_of(rank: usize, entries: &[i64]) -> Option<GramLattice> {
    let b = |i: usize, j: usize| entries[i * rank + j];
    let g: Vec<Vec<i64>> = (0..rank)
        .map(|i| (0..rank).map(|j| (0..rank).map(|k| b(k, i) * b(k, j)).sum()).collect())
        .collect();
    GramLattice::from_integers(&g).ok()
}

fn lattice(max_rank: usize) -> impl Strategy<Value = GramLattice> {
    (1..=max_rank)
        .prop_flat_map(|r| (Just(r), proptest::collection::vec(-3i64..=3, r * r)))
        .prop_filter_map("singular basis", |(r, e)| gram_of(r, &e))
}

fn merged(mut a: Vec<f64>, b: &[f64]) -> Vec<f64> {
    a.extend_from_slice(b);
    a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    a
}

/// `Uᵀ G U` for the unimodular `U` built from elementary column operations.
fn change_basis(l: &GramLattice, ops: &[(usize, usize, i64)]) -> GramLattice {
    let m = l.rank();
    let mut g: Vec<Vec<BigRational>> = l.gram().to_vec();
    for &(i, j, t) in ops {
        let (i, j) = (i % m, j % m);
        if i == j {
            continue;
        }
        // b_i ← b_i + t·b_j
        let t = BigRational::from_integer(t.into());
        let gjj = g[j][j].clone();
        let gij = g[i][j].clone();
        let new_ii = &g[i][i] + &t * &gij * BigRational::from_integer(2.into()) + &t * &t * gjj;
        for k in 0..m {
            if k != i {
                let v = &g[i][k] + &t * &g[j][k];
                g[i][k] = v.clone();
                g[k][i] = v;
            }
        }
        g[i][i] = new_ii;
    }
    GramLattice::new(g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_is_concave_and_sums_to_log_det(l in lattice(4)) {
        let p = slope_profile(&l).unwrap();
        let mu = p.slopes();
        for w in mu.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-12);
        }
        for (h, v) in p.hull().iter().zip(p.mprime()) {
            prop_assert!(h >= &(v - 1e-12));
        }
        let target = -0.5 * freelat::arith::ln_ratio(&l.det());
        let sum: f64 = mu.iter().sum();
        prop_assert!((sum - target).abs() <= 1e-10 * target.abs().max(1.0));
    }

    #[test]
    fn direct_sum_merges_slopes(a in lattice(3), b in lattice(3)) {
        let pa = slope_profile(&a).unwrap();
        let pb = slope_profile(&b).unwrap();
        let sum = slope_profile(&a.direct_sum(&b)).unwrap();
        let want = merged(pa.slopes().to_vec(), pb.slopes());
        for (x, y) in sum.slopes().iter().zip(&want) {
            prop_assert!((x - y).abs() < 1e-9, "{:?} vs {:?}", sum.slopes(), want);
        }
    }

    #[test]
    fn covolumes_ignore_the_basis(
        l in lattice(4),
        ops in proptest::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..8),
    ) {
        let moved = change_basis(&l, &ops);
        for k in 1..=l.rank() {
            prop_assert_eq!(min_covolume_sq(&l, k).unwrap(), min_covolume_sq(&moved, k).unwrap());
        }
    }

    #[test]
    fn scaling_shifts_every_slope(l in lattice(3), num in 1i64..20, den in 1i64..20) {
        let t = BigRational::new(num.into(), den.into());
        let shift = -0.5 * (num as f64 / den as f64).ln();
        let p = slope_profile(&l).unwrap();
        let q = slope_profile(&l.scaled(&t).unwrap()).unwrap();
        for (x, y) in p.slopes().iter().zip(q.slopes()) {
            prop_assert!((x + shift - y).abs() < 1e-9);
        }
    }

    #[test]
    fn pair_tangent_slopes_merge_factor_slopes(
        a in proptest::collection::vec(-9i64..=9, 3),
        b in proptest::collection::vec(-9i64..=9, 3),
    ) {
        let (Ok(x), Ok(y)) = (ProjectivePoint::normalize(&a), ProjectivePoint::normalize(&b)) else {
            return Ok(());
        };
        let t = pair_tangent(&x, &y).unwrap();
        prop_assert!((t.log_height - x.log_height() - y.log_height()).abs() < 1e-12);
        let direct = slope_profile(&t.lattice).unwrap();
        let sx = slope_profile(&x.tangent_lattice().lattice).unwrap();
        let sy = slope_profile(&y.tangent_lattice().lattice).unwrap();
        let want = merged(sx.slopes().to_vec(), sy.slopes());
        for (u, v) in direct.slopes().iter().zip(&want) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }
}
