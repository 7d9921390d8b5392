//! Monte Carlo and exact estimates for random orderings.
//!
//! Two quantities are estimated: the probability that a uniformly random
//! ordered k-tuple of distinct nonzero residues of Z_n fails to be a t-weak
//! sequencing, and the mean number X of equal partial sums `s_i = s_j` with
//! `2 <= j - i <= t` over uniform orderings of a fixed set.
//!
//! Every report carries three bounds:
//!
//! * `bound`: `(t-1)(k-2)/(n-2)` for the failure probability, `t - 1` for
//!   the mean, as usually stated;
//! * `refined_bound`: the intermediate sums `sum_{l=2..t} (k-l)/(n-l)` and
//!   `sum_{l=2..t} (k-l)/(k-l+1)` from which those are derived;
//! * `union_bound`: the union bound over all windows,
//!   `sum_{l=2..t} (k-l+1)/(n-l)` and `t - 1`. A length-`l` window starts at
//!   any of `s_0, ..., s_{k-l}`, so there are `k - l + 1` of them, one more
//!   than the refined sums count. The first two bounds therefore fail on
//!   small cases; `union_bound` is the one that always holds.
//!
//! # Reproducibility
//!
//! Trials are split into chunks of [`CHUNK`] trials. Chunk `c` draws from
//! `ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(c)))`, so results
//! depend only on the seed and the trial count, never on the thread count.
//! Distinct residues are drawn by a partial Fisher-Yates shuffle of
//! `1..n` kept sparse in a hash map; orderings of a fixed set use the full
//! shuffle from [`crate::search`].

use std::collections::HashMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::shuffle;
use crate::zn::{window_collision_count, Modulus, SubsetSpec};

/// Trials per independently seeded chunk.
pub const CHUNK: u64 = 4096;

/// Slack, in standard errors, allowed for sampled estimates.
pub const SIGMA_SLACK: f64 = 4.0;

/// Tolerance for comparing exactly enumerated values with bounds.
const EXACT_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: u32,
    pub k: usize,
    pub t: usize,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        Modulus::new(self.n as u64)?;
        if !(2 <= self.t && self.t < self.k && self.k < self.n as usize) {
            return Err(Error::precondition(format!(
                "need 2 <= t < k < n, got n = {}, k = {}, t = {}",
                self.n, self.k, self.t
            )));
        }
        if self.trials == 0 {
            return Err(Error::precondition("trials must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    FailureProbability,
    CollisionMean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub quantity: Quantity,
    pub n: u32,
    pub k: usize,
    pub t: usize,
    /// Samples drawn, or the number of enumerated outcomes when `exact`.
    pub trials: u64,
    /// `None` for exact enumeration.
    pub seed: Option<u64>,
    pub exact: bool,
    pub estimate: f64,
    /// Zero when `exact`.
    pub std_error: f64,
    pub bound: f64,
    /// `estimate <= bound + 4 * std_error`.
    pub bound_satisfied: bool,
    pub refined_bound: f64,
    pub refined_bound_satisfied: bool,
    pub union_bound: f64,
    pub union_bound_satisfied: bool,
}

/// Mixing function used to derive chunk seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn chunk_seed(seed: u64, chunk: u64) -> u64 {
    splitmix64(seed ^ splitmix64(chunk))
}

pub fn failure_bound(n: u32, k: usize, t: usize) -> f64 {
    (t - 1) as f64 * (k as f64 - 2.0) / (n as f64 - 2.0)
}

pub fn failure_refined_bound(n: u32, k: usize, t: usize) -> f64 {
    (2..=t).map(|l| (k - l) as f64 / (n as f64 - l as f64)).sum()
}

pub fn failure_union_bound(n: u32, k: usize, t: usize) -> f64 {
    (2..=t).map(|l| (k - l + 1) as f64 / (n as f64 - l as f64)).sum()
}

pub fn collision_bound(t: usize) -> f64 {
    (t - 1) as f64
}

pub fn collision_refined_bound(k: usize, t: usize) -> f64 {
    (2..=t).map(|l| (k - l) as f64 / (k - l + 1) as f64).sum()
}

/// Totals over a batch of trials; integer so that merging is exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    hits: u64,
    hits_sq: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            trials: self.trials + other.trials,
            hits: self.hits + other.hits,
            hits_sq: self.hits_sq + other.hits_sq,
        }
    }

    fn mean_and_se(&self) -> (f64, f64) {
        let n = self.trials as f64;
        let mean = self.hits as f64 / n;
        if self.trials < 2 {
            return (mean, 0.0);
        }
        let var = ((self.hits_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

fn run_chunks(trials: u64, seed: u64, per_chunk: impl Fn(&mut ChaCha8Rng, u64) -> Tally + Sync) -> Tally {
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(trials - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(seed, c));
            per_chunk(&mut rng, count)
        })
        .reduce(Tally::default, Tally::merge)
}

/// Partial sums of `seq` with `s_0 = 0`, written into `sums`.
fn fill_sums(m: Modulus, seq: &[u32], sums: &mut Vec<u32>) {
    sums.clear();
    sums.push(0);
    let mut acc = 0;
    for &x in seq {
        acc = m.add(acc, x);
        sums.push(acc);
    }
}

fn has_collision(sums: &[u32], t: usize) -> bool {
    (1..sums.len()).any(|j| (j.saturating_sub(t)..j).any(|i| sums[i] == sums[j]))
}

/// `k` distinct values of `1..n`, uniformly ordered.
fn sample_distinct<R: Rng>(n: u32, k: usize, rng: &mut R, swaps: &mut HashMap<u32, u32>, out: &mut Vec<u32>) {
    // Positions 0..n-2 hold the values 1..n-1 until swapped.
    swaps.clear();
    out.clear();
    let last = n - 1;
    for i in 0..k as u32 {
        let j = rng.gen_range(i..last);
        let vj = *swaps.get(&j).unwrap_or(&(j + 1));
        let vi = *swaps.get(&i).unwrap_or(&(i + 1));
        swaps.insert(j, vi);
        out.push(vj);
    }
}

fn report(
    quantity: Quantity,
    cfg: (u32, usize, usize),
    trials: u64,
    seed: Option<u64>,
    (estimate, std_error): (f64, f64),
    bounds: (f64, f64, f64),
) -> EstimateReport {
    let exact = seed.is_none();
    let slack = if exact { EXACT_EPS } else { SIGMA_SLACK * std_error };
    let (n, k, t) = cfg;
    EstimateReport {
        quantity,
        n,
        k,
        t,
        trials,
        seed,
        exact,
        estimate,
        std_error,
        bound: bounds.0,
        bound_satisfied: estimate <= bounds.0 + slack,
        refined_bound: bounds.1,
        refined_bound_satisfied: estimate <= bounds.1 + slack,
        union_bound: bounds.2,
        union_bound_satisfied: estimate <= bounds.2 + slack,
    }
}

/// Probability that a uniform ordered k-tuple of distinct nonzero residues
/// is not a t-weak sequencing of its support.
pub fn estimate_failure_probability(cfg: &TrialConfig) -> Result<EstimateReport> {
    cfg.validate()?;
    let m = Modulus::new(cfg.n as u64)?;
    let (n, k, t) = (cfg.n, cfg.k, cfg.t);
    let tally = run_chunks(cfg.trials, cfg.seed, |rng, count| {
        let mut swaps = HashMap::with_capacity(2 * k);
        let mut seq = Vec::with_capacity(k);
        let mut sums = Vec::with_capacity(k + 1);
        let mut hits = 0;
        for _ in 0..count {
            sample_distinct(n, k, rng, &mut swaps, &mut seq);
            fill_sums(m, &seq, &mut sums);
            if has_collision(&sums, t) {
                hits += 1;
            }
        }
        Tally {
            trials: count,
            hits,
            hits_sq: hits,
        }
    });
    Ok(report(
        Quantity::FailureProbability,
        (n, k, t),
        cfg.trials,
        Some(cfg.seed),
        tally.mean_and_se(),
        (
            failure_bound(n, k, t),
            failure_refined_bound(n, k, t),
            failure_union_bound(n, k, t),
        ),
    ))
}

fn check_collision_args(set: &SubsetSpec, t: usize) -> Result<()> {
    if !(2 <= t && t < set.len()) {
        return Err(Error::precondition(format!(
            "need 2 <= t < |A|, got t = {t}, |A| = {}",
            set.len()
        )));
    }
    Ok(())
}

/// Mean of X, the number of pairs `i < j` with `2 <= j - i <= t` and
/// `s_i = s_j`, over uniform orderings of `set`.
pub fn estimate_collision_mean(set: &SubsetSpec, t: usize, trials: u64, seed: u64) -> Result<EstimateReport> {
    check_collision_args(set, t)?;
    if trials == 0 {
        return Err(Error::precondition("trials must be positive"));
    }
    let m = set.modulus();
    let k = set.len();
    let tally = run_chunks(trials, seed, |rng, count| {
        let mut seq = set.elements().to_vec();
        let mut sums = Vec::with_capacity(k + 1);
        let mut tally = Tally {
            trials: count,
            ..Tally::default()
        };
        for _ in 0..count {
            shuffle(&mut seq, rng);
            fill_sums(m, &seq, &mut sums);
            // Adjacent sums differ since elements are nonzero, so counting
            // windows of length 1 too changes nothing.
            let x = window_collision_count(&sums, t) as u64;
            tally.hits += x;
            tally.hits_sq += x * x;
        }
        tally
    });
    Ok(report(
        Quantity::CollisionMean,
        (m.get(), k, t),
        trials,
        Some(seed),
        tally.mean_and_se(),
        (collision_bound(t), collision_refined_bound(k, t), collision_bound(t)),
    ))
}

/// Largest `k` accepted by the exact enumerations.
pub const EXACT_MAX_K: usize = 8;

/// The failure probability computed over all ordered k-tuples.
pub fn exact_failure_probability(n: u32, k: usize, t: usize) -> Result<EstimateReport> {
    TrialConfig {
        n,
        k,
        t,
        trials: 1,
        seed: 0,
    }
    .validate()?;
    if k > EXACT_MAX_K {
        return Err(Error::precondition(format!(
            "exact enumeration is limited to k <= {EXACT_MAX_K}"
        )));
    }
    let m = Modulus::new(n as u64)?;
    // Count the tuples that are t-weak by depth-first extension; a prefix
    // with a collision has no good completion.
    fn good(m: Modulus, t: usize, k: usize, used: &mut [bool], sums: &mut Vec<u32>) -> u64 {
        if sums.len() == k + 1 {
            return 1;
        }
        let last = *sums.last().expect("s_0");
        let lo = sums.len().saturating_sub(t);
        let mut total = 0;
        for x in 1..m.get() {
            if used[x as usize] {
                continue;
            }
            let s = m.add(last, x);
            if sums[lo..].contains(&s) {
                continue;
            }
            used[x as usize] = true;
            sums.push(s);
            total += good(m, t, k, used, sums);
            sums.pop();
            used[x as usize] = false;
        }
        total
    }
    let mut used = vec![false; n as usize];
    let ok = good(m, t, k, &mut used, &mut vec![0]);
    let total: u64 = (0..k as u64).map(|i| (n as u64 - 1) - i).product();
    let q = (total - ok) as f64 / total as f64;
    Ok(report(
        Quantity::FailureProbability,
        (n, k, t),
        total,
        None,
        (q, 0.0),
        (
            failure_bound(n, k, t),
            failure_refined_bound(n, k, t),
            failure_union_bound(n, k, t),
        ),
    ))
}

/// The mean of X over all `k!` orderings of `set`.
pub fn exact_collision_mean(set: &SubsetSpec, t: usize) -> Result<EstimateReport> {
    check_collision_args(set, t)?;
    let k = set.len();
    if k > EXACT_MAX_K {
        return Err(Error::precondition(format!(
            "exact enumeration is limited to k <= {EXACT_MAX_K}"
        )));
    }
    let m = set.modulus();
    let mut sums = Vec::with_capacity(k + 1);
    let mut total = 0u64;
    let mut count = 0u64;
    for perm in set.elements().iter().copied().permutations(k) {
        fill_sums(m, &perm, &mut sums);
        total += window_collision_count(&sums, t) as u64;
        count += 1;
    }
    Ok(report(
        Quantity::CollisionMean,
        (m.get(), k, t),
        count,
        None,
        (total as f64 / count as f64, 0.0),
        (collision_bound(t), collision_refined_bound(k, t), collision_bound(t)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, k: usize, t: usize, trials: u64, seed: u64) -> TrialConfig {
        TrialConfig {
            n,
            k,
            t,
            trials,
            seed,
        }
    }

    #[test]
    fn validation() {
        assert!(cfg(7, 3, 2, 1, 0).validate().is_ok());
        assert!(cfg(7, 3, 3, 1, 0).validate().is_err());
        assert!(cfg(7, 7, 2, 1, 0).validate().is_err());
        assert!(cfg(7, 3, 1, 1, 0).validate().is_err());
        assert!(cfg(7, 3, 2, 0, 0).validate().is_err());
    }

    #[test]
    fn bound_formulas() {
        assert!((failure_bound(101, 10, 3) - 16.0 / 99.0).abs() < 1e-15);
        assert!((collision_refined_bound(10, 3) - (8.0 / 9.0 + 7.0 / 8.0)).abs() < 1e-15);
        assert!((failure_union_bound(7, 3, 2) - 2.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn single_trial_is_deterministic() {
        let a = estimate_failure_probability(&cfg(31, 6, 3, 1, 99)).unwrap();
        let b = estimate_failure_probability(&cfg(31, 6, 3, 1, 99)).unwrap();
        assert_eq!(a, b);
        assert!(a.estimate == 0.0 || a.estimate == 1.0);
        assert_eq!(a.seed, Some(99));
    }

    #[test]
    fn sampled_tuples_are_distinct_and_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut swaps = HashMap::new();
        let mut out = Vec::new();
        let mut seen = vec![0u32; 7];
        for _ in 0..2000 {
            sample_distinct(7, 6, &mut rng, &mut swaps, &mut out);
            let mut sorted = out.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![1, 2, 3, 4, 5, 6]);
            seen[out[0] as usize] += 1;
        }
        // Every value shows up first about a sixth of the time.
        assert!(seen[1..].iter().all(|&c| (250..420).contains(&c)), "{seen:?}");
    }

    #[test]
    fn exact_small_case() {
        // n = 7, k = 3, t = 2: 120 tuples, 72 of them 2-weak.
        let r = exact_failure_probability(7, 3, 2).unwrap();
        assert_eq!(r.trials, 120);
        assert!((r.estimate - 0.4).abs() < 1e-12);
        assert!(r.union_bound_satisfied);
        assert!(!r.bound_satisfied);
    }

    #[test]
    fn exact_collision_mean_of_full_group() {
        // Z_7 \ {0} is closed under negation: every adjacent pair sums to
        // zero with probability 1/5, and there are 5 such windows.
        let set = SubsetSpec::new(Modulus::new(7).unwrap(), (1..7).collect()).unwrap();
        let r = exact_collision_mean(&set, 2).unwrap();
        assert!((r.estimate - 1.0).abs() < 1e-12);
        assert!(r.bound_satisfied);
        assert!(!r.refined_bound_satisfied);
    }

    #[test]
    fn chunking_matches_sequential_definition() {
        // Recompute the first chunk by hand.
        let c = cfg(101, 10, 3, CHUNK, 7);
        let r = estimate_failure_probability(&c).unwrap();
        let m = Modulus::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(7, 0));
        let (mut swaps, mut seq, mut sums) = (HashMap::new(), Vec::new(), Vec::new());
        let mut hits = 0;
        for _ in 0..CHUNK {
            sample_distinct(101, 10, &mut rng, &mut swaps, &mut seq);
            fill_sums(m, &seq, &mut sums);
            hits += has_collision(&sums, 3) as u64;
        }
        assert_eq!(r.estimate, hits as f64 / CHUNK as f64);
    }
}
