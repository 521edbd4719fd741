//! Dyadic surveys of pairs of points on `P^n`, reproducing the growth and freeness
//! behaviour of the family `S_{C,δ}`.
//!
//! The height of the `Hilb²` point attached to a pair is taken to be
//! `H(x1)·H(x2)`; on `S_{C,δ}` it differs from the anticanonical height by a
//! bounded factor because `c < C` there.

mod density;
mod euler;
mod floor;
mod report;

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

pub use density::{congruence_density, DensityEstimate, MIN_SAMPLE_PAIRS};
pub use euler::{congruent_fraction, euler_product, is_prime, primes_up_to, EulerProduct};
pub use floor::{freeness_floor_check, FloorReport, FloorRow};
pub use report::{emit_report, write_records, ReportFormat, CSV_COLUMNS};

use crate::error::{Error, Result};
use crate::lattice::Limits;
use crate::pairs::SParams;
use crate::projective::{enumerate_points, pair_freeness_from_factors, PointFreeness, ProjectivePoint};

/// Primes whose congruence frequencies are tracked in every survey.
pub const TRACKED_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Prime cutoff for the reference Euler product stored in each record.
pub const EULER_REFERENCE_CUTOFF: u64 = 1_000_000;

fn chordal() -> String {
    "chordal".to_string()
}

fn default_max_points() -> usize {
    4_000_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveyConfig {
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub delta: f64,
    /// Strictly increasing height bounds B.
    pub bounds: Vec<u64>,
    #[serde(default = "chordal")]
    pub metric_note: String,
    #[serde(default)]
    pub thread_hint: Option<usize>,
    /// Cap on the number of points enumerated.
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

impl SurveyConfig {
    /// Bounds `2^lo, 2^(lo+1), …, 2^hi`.
    pub fn dyadic(n: usize, c: f64, delta: f64, lo: u32, hi: u32) -> Self {
        SurveyConfig {
            n,
            c,
            delta,
            bounds: (lo..=hi).map(|e| 1u64 << e).collect(),
            metric_note: chordal(),
            thread_hint: None,
            max_points: default_max_points(),
        }
    }

    pub fn validate(&self) -> Result<SParams> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("survey needs n ≥ 2, got {}", self.n)));
        }
        if self.bounds.is_empty() {
            return Err(Error::InvalidArgument("no height bounds given".into()));
        }
        if self.bounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("bounds must be strictly increasing".into()));
        }
        if self.bounds[0] < 2 {
            return Err(Error::InvalidArgument("bounds must be at least 2".into()));
        }
        if self.metric_note != "chordal" {
            return Err(Error::InvalidArgument(format!(
                "unsupported metric {:?}; only \"chordal\" is implemented",
                self.metric_note
            )));
        }
        if self.thread_hint == Some(0) {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        SParams::new(self.c, self.delta)
    }
}

/// The worst (least free) S-pair seen up to a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstPair {
    pub x1: ProjectivePoint,
    pub x2: ProjectivePoint,
    pub freeness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRecord {
    #[serde(rename = "B")]
    pub bound: u64,
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub delta: f64,
    /// Unordered pairs of distinct points with `H(x1)H(x2) < B`, both heights above 1.
    pub pairs_total: u64,
    #[serde(rename = "pairs_in_S")]
    pub pairs_in_s: u64,
    #[serde(rename = "ratio_BlogB")]
    pub ratio: f64,
    pub min_pair_freeness: Option<f64>,
    pub mean_pair_freeness: Option<f64>,
    pub floor_2dn_over_n1: f64,
    pub euler_product_ref: f64,
    /// Max over S-pairs with `B/2 ≤ H < B` of `n log c / log H`.
    pub max_correction_budget: Option<f64>,
    /// Pairs meeting the balance condition (either value of c).
    pub pairs_balanced: u64,
    /// Balanced pairs distinct modulo every prime (W = 1).
    pub balanced_w1_fraction: Option<f64>,
    /// Balanced pairs with `d > 1/C`.
    pub balanced_arch_fraction: Option<f64>,
    /// S-pairs whose pair freeness is below `2δn/(n+1)`.
    pub pairs_below_floor: u64,
    pub max_second_height: Option<f64>,
    #[serde(rename = "max_W_in_S")]
    pub max_modulus_in_s: Option<u64>,
    pub worst_pair: Option<WorstPair>,
    pub congruent_density_by_prime: BTreeMap<u64, f64>,
}

/// Per-bucket tallies. Bucket b holds pairs with `B_{b−1} ≤ H < B_b`.
#[derive(Clone, Debug, Default)]
struct Tally {
    total: u64,
    balanced: u64,
    balanced_w1: u64,
    balanced_arch: u64,
    in_s: u64,
    below_floor: u64,
    freeness_sum: f64,
    /// (freeness, i, j) of the least free S-pair, ties to the smaller indices.
    worst: Option<(f64, usize, usize)>,
    max_c: f64,
    max_w: u64,
    max_budget: Option<f64>,
    congruent: [u64; TRACKED_PRIMES.len()],
}

impl Tally {
    fn absorb(&mut self, o: &Tally) {
        self.total += o.total;
        self.balanced += o.balanced;
        self.balanced_w1 += o.balanced_w1;
        self.balanced_arch += o.balanced_arch;
        self.in_s += o.in_s;
        self.below_floor += o.below_floor;
        self.freeness_sum += o.freeness_sum;
        self.worst = match (self.worst, o.worst) {
            (Some(a), Some(b)) => Some(if worse(b, a) { b } else { a }),
            (a, b) => a.or(b),
        };
        self.max_c = self.max_c.max(o.max_c);
        self.max_w = self.max_w.max(o.max_w);
        self.max_budget = match (self.max_budget, o.max_budget) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        for (a, b) in self.congruent.iter_mut().zip(&o.congruent) {
            *a += b;
        }
    }
}

fn worse(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2))
}

/// Largest P with `P^e < bound²`.
fn product_threshold(bound: u64, e: u32) -> u128 {
    let target = (bound as u128) * (bound as u128);
    let below = |p: u128| -> bool {
        let mut acc: u128 = 1;
        for _ in 0..e {
            match acc.checked_mul(p) {
                Some(v) if v < target => acc = v,
                _ => return false,
            }
        }
        true
    };
    let mut hi = (target as f64).powf(1.0 / e as f64) as u128 + 2;
    while !below(hi) {
        hi -= 1;
    }
    while below(hi + 1) {
        hi += 1;
    }
    hi
}

/// Indices per work unit; fixed so results do not depend on the thread count.
const BLOCK: usize = 64;

struct Context<'a> {
    n: usize,
    points: &'a [ProjectivePoint],
    profiles: &'a [Option<PointFreeness>],
    params: &'a SParams,
    floor: f64,
    /// `P_b` per bound: pairs with `N1·N2 ≤ P_b` have `H(x1)H(x2) < B_b`.
    thresholds: &'a [u128],
    bounds: &'a [u64],
}

impl Context<'_> {
    fn block(&self, start: usize) -> Vec<Tally> {
        let mut tallies = vec![Tally::default(); self.thresholds.len()];
        let p_max = *self.thresholds.last().unwrap();
        let end = (start + BLOCK).min(self.points.len());
        let c_sq_inv = 1.0 / (self.params.c * self.params.c);
        for i in start..end {
            let a = &self.points[i];
            let na = a.norm_sq() as u128;
            for j in i + 1..self.points.len() {
                let b = &self.points[j];
                let nb = b.norm_sq() as u128;
                let prod = na * nb;
                if prod > p_max {
                    break;
                }
                let bucket = self.thresholds.partition_point(|&t| t < prod);
                let t = &mut tallies[bucket];
                t.total += 1;
                let (ca, cb) = (a.coords(), b.coords());
                let mut w: u64 = 0;
                let mut msq: u128 = 0;
                for x in 0..ca.len() {
                    for y in x + 1..ca.len() {
                        let m = ca[x] as i128 * cb[y] as i128 - ca[y] as i128 * cb[x] as i128;
                        msq += (m * m) as u128;
                        w = w.gcd(&(m.unsigned_abs() as u64));
                    }
                }
                for (k, &p) in TRACKED_PRIMES.iter().enumerate() {
                    if w.is_multiple_of(p) {
                        t.congruent[k] += 1;
                    }
                }
                if !self.params.balanced(a.norm_sq(), b.norm_sq()) {
                    continue;
                }
                t.balanced += 1;
                if w == 1 {
                    t.balanced_w1 += 1;
                }
                let d_sq = msq as f64 / prod as f64;
                if d_sq > c_sq_inv {
                    t.balanced_arch += 1;
                }
                if !self.params.c_below_parts(w as u128, prod, msq) {
                    continue;
                }
                t.in_s += 1;
                let fa = self.profiles[i].expect("balanced points are profiled");
                let fb = self.profiles[j].expect("balanced points are profiled");
                let f = pair_freeness_from_factors(self.n, &fa, &fb);
                t.freeness_sum += f;
                if f < self.floor {
                    t.below_floor += 1;
                }
                if t.worst.is_none_or(|cur| worse((f, i, j), cur)) {
                    t.worst = Some((f, i, j));
                }
                let c = w as f64 / d_sq.sqrt();
                t.max_c = t.max_c.max(c);
                t.max_w = t.max_w.max(w);
                let log_h = fa.log_height + fb.log_height;
                // only pairs in the dyadic shell [B/2, B) enter the budget
                if log_h >= (self.bounds[bucket] as f64 / 2.0).ln() {
                    let budget = self.n as f64 * c.ln() / log_h;
                    t.max_budget = Some(t.max_budget.map_or(budget, |m: f64| m.max(budget)));
                }
            }
        }
        tallies
    }
}

#[cfg(feature = "parallel")]
fn run_blocks(ctx: &Context<'_>, starts: &[usize], threads: Option<usize>) -> Result<Vec<Vec<Tally>>> {
    use rayon::prelude::*;
    let work = || starts.par_iter().map(|&s| ctx.block(s)).collect::<Vec<_>>();
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_blocks(ctx: &Context<'_>, starts: &[usize], _threads: Option<usize>) -> Result<Vec<Vec<Tally>>> {
    Ok(starts.iter().map(|&s| ctx.block(s)).collect())
}

/// Runs the survey for every bound in `cfg`.
///
/// If the point budget does not cover the largest bound, the bounds that fit are
/// surveyed and returned inside [`Error::SurveyBudget`].
pub fn run_survey(cfg: &SurveyConfig) -> Result<Vec<CountRecord>> {
    let params = cfg.validate()?;
    let n = cfg.n;
    let e = n as u32 + 1;
    let thresholds_all: Vec<u128> = cfg.bounds.iter().map(|&b| product_threshold(b, e)).collect();
    // Partners have N ≥ 2, so each factor satisfies N ≤ P/2.
    let max_norm = (thresholds_all.last().unwrap() / 2) as u64;
    let mut points: Vec<ProjectivePoint> = Vec::new();
    let mut truncated_at: Option<u64> = None;
    for x in enumerate_points(n, max_norm) {
        if x.norm_sq() < 2 {
            continue;
        }
        if points.len() >= cfg.max_points {
            truncated_at = Some(x.norm_sq());
            break;
        }
        points.push(x);
    }
    let usable = match truncated_at {
        None => cfg.bounds.len(),
        Some(_) => {
            // Enumeration is lexicographic, so only norms below the count-th smallest
            // are complete; recount with a norm-ordered enumeration.
            let complete = complete_norm_limit(n, max_norm, cfg.max_points);
            points.clear();
            points.extend(
                enumerate_points(n, complete).filter(|x| x.norm_sq() >= 2),
            );
            thresholds_all
                .iter()
                .take_while(|&&t| (t / 2) as u64 <= complete)
                .count()
        }
    };
    let thresholds = &thresholds_all[..usable];
    let bounds = &cfg.bounds[..usable];
    let records = if usable == 0 {
        Vec::new()
    } else {
        survey_points(cfg, &params, &mut points, thresholds, bounds)?
    };
    if usable < cfg.bounds.len() {
        return Err(Error::SurveyBudget {
            limit: cfg.max_points,
            completed: records,
        });
    }
    Ok(records)
}

/// Largest norm bound whose point set fits in `cap` points.
fn complete_norm_limit(n: usize, max_norm: u64, cap: usize) -> u64 {
    let (mut lo, mut hi) = (1u64, max_norm);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        let count = enumerate_points(n, mid).take(cap + 1).count();
        if count <= cap {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

fn survey_points(
    cfg: &SurveyConfig,
    params: &SParams,
    points: &mut [ProjectivePoint],
    thresholds: &[u128],
    bounds: &[u64],
) -> Result<Vec<CountRecord>> {
    let n = cfg.n;
    points.sort_by(|a, b| a.norm_sq().cmp(&b.norm_sq()).then_with(|| a.coords().cmp(b.coords())));
    // A balanced pair under the largest bound has log H_i < (1 − δ) log B for both factors.
    let b_max = *bounds.last().unwrap() as f64;
    let log_cut = (1.0 - params.delta) * b_max.ln() * 2.0 / (n as f64 + 1.0);
    let limits = Limits::from_env();
    let profiles: Vec<Option<PointFreeness>> = points
        .iter()
        .map(|x| {
            if (x.norm_sq() as f64).ln() <= log_cut * (1.0 + 1e-9) + 1e-9 {
                x.freeness_data(&limits).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let floor = params.freeness_floor(n);
    let ctx = Context {
        n,
        points,
        profiles: &profiles,
        params,
        floor,
        thresholds,
        bounds,
    };
    let starts: Vec<usize> = (0..points.len()).step_by(BLOCK).collect();
    let per_block = run_blocks(&ctx, &starts, cfg.thread_hint)?;
    let mut buckets = vec![Tally::default(); thresholds.len()];
    for block in &per_block {
        for (acc, t) in buckets.iter_mut().zip(block) {
            acc.absorb(t);
        }
    }
    let euler_ref = euler_product(n, EULER_REFERENCE_CUTOFF)?.partial;
    let mut cumulative = Tally::default();
    let mut records = Vec::with_capacity(bounds.len());
    for (b, bucket) in bounds.iter().zip(&buckets) {
        cumulative.absorb(bucket);
        let t = &cumulative;
        let bf = *b as f64;
        let frac = |k: u64, of: u64| (of > 0).then(|| k as f64 / of as f64);
        records.push(CountRecord {
            bound: *b,
            n,
            c: cfg.c,
            delta: cfg.delta,
            pairs_total: t.total,
            pairs_in_s: t.in_s,
            ratio: t.in_s as f64 / (bf * bf.ln()),
            min_pair_freeness: t.worst.map(|w| w.0),
            mean_pair_freeness: frac_f(t.freeness_sum, t.in_s),
            floor_2dn_over_n1: floor,
            euler_product_ref: euler_ref,
            max_correction_budget: bucket.max_budget,
            pairs_balanced: t.balanced,
            balanced_w1_fraction: frac(t.balanced_w1, t.balanced),
            balanced_arch_fraction: frac(t.balanced_arch, t.balanced),
            pairs_below_floor: t.below_floor,
            max_second_height: (t.in_s > 0).then_some(t.max_c),
            max_modulus_in_s: (t.in_s > 0).then_some(t.max_w),
            worst_pair: t.worst.map(|(f, i, j)| WorstPair {
                x1: points[i].clone(),
                x2: points[j].clone(),
                freeness: f,
            }),
            congruent_density_by_prime: TRACKED_PRIMES
                .iter()
                .zip(&t.congruent)
                .map(|(&p, &k)| (p, if t.total > 0 { k as f64 / t.total as f64 } else { 0.0 }))
                .collect(),
        });
    }
    Ok(records)
}

fn frac_f(sum: f64, count: u64) -> Option<f64> {
    (count > 0).then(|| sum / count as f64)
}
