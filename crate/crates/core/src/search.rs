//! Constructions and searches for t-weak sequencings.
//!
//! Everything here is deterministic: candidates are always scanned in
//! ascending residue order, and the randomized routine is driven by a seeded
//! ChaCha8 stream.

use std::collections::HashSet;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zn::{
    cmpp_admissible, partial_sums, t_weak_violations, window_collision_count, Modulus, Ordering,
    SubsetSpec,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Every length-2..t window sum must be nonzero.
    #[default]
    Main,
    /// The set holds at most one of each `{x, -x}`; length-2 windows are
    /// nonzero automatically.
    Cmpp,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(Variant::Main),
            "cmpp" => Ok(Variant::Cmpp),
            other => Err(Error::Parse {
                input: other.into(),
                reason: "expected `main` or `cmpp`".into(),
            }),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Main => "main",
            Variant::Cmpp => "cmpp",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    pub variant: Variant,
    /// Put `n/2` first. Ignored unless `n` is even and `n/2` is in the set.
    pub involution_first: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            time_limit: None,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::nodes(10_000_000)
    }
}

/// Build `h` elements of an ordering whose partial sums differ on every
/// window of length at most `t`.
///
/// Step `m + 1` takes the smallest unused element avoiding the values
/// `-(a_{i+1} + ... + a_m)` for `max(0, m + 1 - t) <= i < m`. There are at
/// most `t - 1` such values (`t - 2` for the cmpp variant, which skips
/// `-a_m`), so the bound on `h` guarantees a free candidate.
pub fn greedy_prefix(
    set: &SubsetSpec,
    t: usize,
    h: usize,
    opts: GreedyOptions,
) -> Result<Ordering> {
    let k = set.len();
    if t == 0 || h == 0 {
        return Err(Error::precondition("greedy_prefix needs t >= 1 and h >= 1"));
    }
    match opts.variant {
        Variant::Main if h + t > k + 1 => {
            return Err(Error::precondition(format!(
                "main variant needs h <= k - (t - 1), got h = {h}, k = {k}, t = {t}"
            )));
        }
        Variant::Cmpp if h + t > k + 2 || h > k => {
            return Err(Error::precondition(format!(
                "cmpp variant needs h <= k - (t - 2), got h = {h}, k = {k}, t = {t}"
            )));
        }
        Variant::Cmpp if !cmpp_admissible(set) => {
            return Err(Error::precondition(
                "cmpp variant needs a set without pairs {x, -x}",
            ));
        }
        _ => {}
    }

    let m = set.modulus();
    let mut used = vec![false; k];
    let mut seq = Vec::with_capacity(h);
    let mut sums = vec![0u32];

    if opts.involution_first {
        if let Some(half) = m.involution() {
            if let Ok(pos) = set.elements().binary_search(&half) {
                used[pos] = true;
                seq.push(half);
                sums.push(half);
            }
        }
    }

    let mut forbidden = Vec::with_capacity(t);
    while seq.len() < h {
        let len = seq.len();
        let last = sums[len];
        // Window lengths 2..=t end at the new element; length 2 starts at
        // i = len - 1 and is skipped for cmpp.
        let upper = match opts.variant {
            Variant::Main => len,
            Variant::Cmpp => len.saturating_sub(1),
        };
        forbidden.clear();
        forbidden.extend(
            ((len + 1).saturating_sub(t)..upper).map(|i| m.sub(sums[i], last)),
        );
        let pick = set
            .elements()
            .iter()
            .enumerate()
            .find(|(idx, x)| !used[*idx] && !forbidden.contains(x));
        let Some((idx, &x)) = pick else {
            return Err(Error::GreedyExhausted { prefix: seq });
        };
        used[idx] = true;
        seq.push(x);
        sums.push(m.add(last, x));
    }
    Ok(Ordering::from_trusted(m, seq))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { ordering: Ordering, nodes: u64 },
    /// The whole tree was traversed without success.
    NoneExists { nodes: u64 },
    /// The budget ran out first; nothing is known about existence.
    BudgetExhausted { nodes: u64 },
}

impl SearchOutcome {
    pub fn nodes(&self) -> u64 {
        match self {
            SearchOutcome::Found { nodes, .. }
            | SearchOutcome::NoneExists { nodes }
            | SearchOutcome::BudgetExhausted { nodes } => *nodes,
        }
    }

    pub fn ordering(&self) -> Option<&Ordering> {
        match self {
            SearchOutcome::Found { ordering, .. } => Some(ordering),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            SearchOutcome::Found { .. } => "found",
            SearchOutcome::NoneExists { .. } => "none",
            SearchOutcome::BudgetExhausted { .. } => "budget_exhausted",
        }
    }
}

struct Backtracker<'a> {
    modulus: Modulus,
    elements: &'a [u32],
    t: usize,
    used: Vec<bool>,
    seq: Vec<u32>,
    sums: Vec<u32>,
    nodes: u64,
    budget: SearchBudget,
    started: Instant,
}

enum Step {
    Done,
    Exhausted,
    Continue,
}

impl Backtracker<'_> {
    fn out_of_budget(&self) -> bool {
        if self.nodes > self.budget.max_nodes {
            return true;
        }
        match self.budget.time_limit {
            Some(limit) if self.nodes % 4096 == 0 => self.started.elapsed() > limit,
            _ => false,
        }
    }

    fn dfs(&mut self) -> Step {
        if self.seq.len() == self.elements.len() {
            return Step::Done;
        }
        let len = self.seq.len();
        let last = self.sums[len];
        for idx in 0..self.elements.len() {
            if self.used[idx] {
                continue;
            }
            let x = self.elements[idx];
            let s = self.modulus.add(last, x);
            let lo = (len + 1).saturating_sub(self.t);
            if self.sums[lo..=len].contains(&s) {
                continue;
            }
            self.nodes += 1;
            if self.out_of_budget() {
                return Step::Exhausted;
            }
            self.used[idx] = true;
            self.seq.push(x);
            self.sums.push(s);
            match self.dfs() {
                Step::Continue => {}
                done => return done,
            }
            self.sums.pop();
            self.seq.pop();
            self.used[idx] = false;
        }
        Step::Continue
    }
}

/// Depth-first search over orderings, pruning prefixes with a collision in
/// some window of length at most `t`.
pub fn backtracking_search(
    set: &SubsetSpec,
    t: usize,
    budget: SearchBudget,
) -> Result<SearchOutcome> {
    let k = set.len();
    if t == 0 || t >= k {
        return Err(Error::InvalidWindow { t, k });
    }
    let mut bt = Backtracker {
        modulus: set.modulus(),
        elements: set.elements(),
        t,
        used: vec![false; k],
        seq: Vec::with_capacity(k),
        sums: vec![0],
        nodes: 0,
        budget,
        started: Instant::now(),
    };
    Ok(match bt.dfs() {
        Step::Done => SearchOutcome::Found {
            ordering: Ordering::from_trusted(set.modulus(), bt.seq),
            nodes: bt.nodes,
        },
        Step::Exhausted => SearchOutcome::BudgetExhausted { nodes: bt.nodes },
        Step::Continue => SearchOutcome::NoneExists { nodes: bt.nodes },
    })
}

/// Sets of at most this size are known to be sequenceable, so a search is
/// enough for them.
pub const SMALL_SET_THRESHOLD: usize = 9;

/// A 3-weak sequencing of any set of size `k >= 4` in any Z_n.
///
/// For `k <= 9` this runs the backtracking search. Otherwise it fixes a
/// greedy prefix of `k - 4` elements (with `n/2` first when present) and
/// tries the 24 arrangements of the remaining four. Every arrangement used
/// by the case analysis of the direct construction (the "three of the last
/// four sum to zero" case and the "two of them sum to zero" case with their
/// subcases) is one of these 24, so a failure here is a bug, reported with
/// the prefix attached.
pub fn construct_t3(set: &SubsetSpec) -> Result<Ordering> {
    let k = set.len();
    if k < 4 {
        return Err(Error::precondition(format!(
            "construct_t3 needs |A| >= 4, got {k}"
        )));
    }
    if k <= SMALL_SET_THRESHOLD {
        // 9! leaves is the worst case; the pruned tree is far smaller.
        return match backtracking_search(set, 3, SearchBudget::nodes(u64::MAX))? {
            SearchOutcome::Found { ordering, .. } => Ok(ordering),
            other => Err(Error::InternalInvariant {
                message: format!("search for a small set ended with {}", other.status()),
                prefix: Vec::new(),
            }),
        };
    }
    let opts = GreedyOptions {
        variant: Variant::Main,
        involution_first: true,
    };
    let prefix = greedy_prefix(set, 3, k - 4, opts)?;
    let chosen: HashSet<u32> = prefix.sequence().iter().copied().collect();
    let rest: Vec<u32> = set
        .elements()
        .iter()
        .copied()
        .filter(|x| !chosen.contains(x))
        .collect();
    debug_assert_eq!(rest.len(), 4);
    let m = set.modulus();
    for tail in rest.iter().copied().permutations(4) {
        let mut seq = prefix.sequence().to_vec();
        seq.extend(tail);
        let candidate = Ordering::from_trusted(m, seq);
        if t_weak_violations(&candidate, 3)?.is_empty() {
            return Ok(candidate);
        }
    }
    Err(Error::InternalInvariant {
        message: "no arrangement of the last four elements is 3-weak".into(),
        prefix: prefix.into_sequence(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowCollision {
    pub ordering: Ordering,
    pub violations: usize,
    /// `violations <= t - 2`.
    pub bound_met: bool,
    pub restarts_used: u64,
}

/// Random restarts over uniform orderings, keeping the first ordering with
/// the fewest window collisions. Stops early on a collision-free ordering.
pub fn find_low_collision_ordering(
    set: &SubsetSpec,
    t: usize,
    seed: u64,
    restarts: u64,
) -> Result<LowCollision> {
    let k = set.len();
    if t < 2 || t >= k {
        return Err(Error::precondition(format!(
            "low-collision search needs 2 <= t < k, got t = {t}, k = {k}"
        )));
    }
    if restarts == 0 {
        return Err(Error::precondition("restarts must be positive"));
    }
    let m = set.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq = set.elements().to_vec();
    let mut best: Option<(usize, Vec<u32>)> = None;
    let mut used = 0;
    for _ in 0..restarts {
        used += 1;
        shuffle(&mut seq, &mut rng);
        let ordering = Ordering::from_trusted(m, seq.clone());
        let x = window_collision_count(&partial_sums(&ordering), t);
        if best.as_ref().map_or(true, |(b, _)| x < *b) {
            best = Some((x, seq.clone()));
        }
        if x == 0 {
            break;
        }
    }
    let (violations, seq) = best.expect("at least one restart");
    Ok(LowCollision {
        ordering: Ordering::from_trusted(m, seq),
        violations,
        bound_met: violations + 2 <= t,
        restarts_used: used,
    })
}

/// Fisher-Yates, drawing `j` uniformly from `0..=i` for `i` descending.
pub(crate) fn shuffle<T, R: Rng>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeSummary {
    pub k: usize,
    pub subsets: u64,
    pub sequenceable: u64,
    pub undecided: u64,
    pub counterexamples: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustReport {
    pub n: u32,
    pub t: usize,
    pub k_range: (usize, usize),
    pub sizes: Vec<SizeSummary>,
    /// Sets whose search tree was fully traversed without success.
    pub counterexamples: Vec<Vec<u32>>,
    /// Sets whose search ran out of budget.
    pub undecided: Vec<Vec<u32>>,
}

impl ExhaustReport {
    pub fn all_sequenceable(&self) -> bool {
        self.counterexamples.is_empty() && self.undecided.is_empty()
    }
}

/// Search every k-subset of `Z_n \ {0}` with `k > t` for a t-weak sequencing.
///
/// Sizes outside `t + 1 ..= n - 1` are skipped. Subsets are searched in
/// parallel; the report lists them in lexicographic order regardless.
pub fn exhaustive_check(
    modulus: Modulus,
    t: usize,
    k_range: RangeInclusive<usize>,
    budget: SearchBudget,
) -> Result<ExhaustReport> {
    if t == 0 {
        return Err(Error::precondition("t must be positive"));
    }
    let n = modulus.get();
    let lo = (*k_range.start()).max(t + 1);
    let hi = (*k_range.end()).min(n as usize - 1);
    let mut report = ExhaustReport {
        n,
        t,
        k_range: (*k_range.start(), *k_range.end()),
        sizes: Vec::new(),
        counterexamples: Vec::new(),
        undecided: Vec::new(),
    };
    for k in lo..=hi {
        let subsets: Vec<Vec<u32>> = (1..n).combinations(k).collect();
        let outcomes: Vec<SearchOutcome> = subsets
            .par_iter()
            .map(|elems| {
                let set = SubsetSpec::new(modulus, elems.clone())?;
                backtracking_search(&set, t, budget)
            })
            .collect::<Result<_>>()?;
        let mut summary = SizeSummary {
            k,
            subsets: subsets.len() as u64,
            sequenceable: 0,
            undecided: 0,
            counterexamples: 0,
        };
        for (elems, outcome) in subsets.into_iter().zip(outcomes) {
            match outcome {
                SearchOutcome::Found { .. } => summary.sequenceable += 1,
                SearchOutcome::NoneExists { .. } => {
                    summary.counterexamples += 1;
                    report.counterexamples.push(elems);
                }
                SearchOutcome::BudgetExhausted { .. } => {
                    summary.undecided += 1;
                    report.undecided.push(elems);
                }
            }
        }
        report.sizes.push(summary);
    }
    Ok(report)
}
