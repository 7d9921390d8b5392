//! Coefficient extraction for `V(y) * W(y)`, where `V` is the full
//! Vandermonde product `prod_{i<j} (y_j - y_i)` and `W` is a product of
//! contiguous all-ones window sums.
//!
//! `V` expands as `sum_sigma sign(sigma) prod_i y_i^{sigma(i)}` over the
//! bijections `sigma: {0..l-1} -> {0..l-1}`, so the coefficient of `y^g` is
//! `sum_sigma sign(sigma) * N(g - sigma)`, where `N(e)` counts the ways to
//! pick one variable from every window factor so that variable `i` is picked
//! `e_i` times. Both sums are done together by a sweep over the variables:
//! the state after variable `i` is the set of permutation values used so far
//! (a bitmask) and, for every window that covers `i` but is not yet assigned,
//! how many such windows end at each later position. Windows with the same
//! end are interchangeable from then on, so counts suffice and choices are
//! weighted by binomials.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::extract::entry_bytes;
use super::{FactorSystem, Monomial};
use crate::error::{Error, Result};

/// Slots of 8 bits in a `u128` pending key.
const MAX_SPAN: usize = 16;
const MAX_SLOT: usize = 62;

#[derive(Debug)]
struct Plan {
    num_vars: usize,
    /// `starts[i][d]`: windows starting at `i` and ending at `i + d`.
    starts: Vec<[u8; MAX_SPAN]>,
}

fn plan(sys: &FactorSystem) -> Option<Plan> {
    let nv = sys.num_vars();
    if nv == 0 || nv > 63 {
        return None;
    }
    let mut seen = vec![false; nv * nv];
    let mut starts = vec![[0u8; MAX_SPAN]; nv];
    let mut ending = vec![0usize; nv];
    for f in sys.factors() {
        if let Some((i, j)) = f.as_difference() {
            let slot = &mut seen[i as usize * nv + j as usize];
            if *slot {
                return None;
            }
            *slot = true;
        } else if let Some((first, last)) = f.as_window() {
            let span = (last - first) as usize;
            if span >= MAX_SPAN {
                return None;
            }
            ending[last as usize] += 1;
            starts[first as usize][span] = starts[first as usize][span].saturating_add(1);
        } else {
            return None;
        }
    }
    let complete = (0..nv).all(|j| (0..j).all(|i| seen[i * nv + j]));
    // A slot holds windows sharing an end; binomials of that count must fit u64.
    if !complete || ending.iter().any(|&c| c > MAX_SLOT) {
        return None;
    }
    Some(Plan {
        num_vars: nv,
        starts,
    })
}

#[inline]
fn slot(key: u128, d: usize) -> u8 {
    (key >> (8 * d)) as u8
}

fn binomials(max: usize) -> Vec<Vec<u64>> {
    let mut table = vec![vec![0u64; max + 1]; max + 1];
    for n in 0..=max {
        table[n][0] = 1;
        for r in 1..=n {
            table[n][r] = table[n - 1][r - 1] + if r < n { table[n - 1][r] } else { 0 };
        }
    }
    table
}

/// One way to assign pending windows to the current variable.
struct Choice {
    taken: u32,
    weight: BigInt,
    rest: u128,
}

/// Every way to take all windows ending here (slot 0) plus any subset of the
/// others, taking at most `budget` windows in total. `rest` is the remaining
/// pending vector already shifted to the next variable.
fn choices(counts: &[u8; MAX_SPAN], budget: u32, binom: &[Vec<u64>]) -> Vec<Choice> {
    let mut out = Vec::new();
    let forced = counts[0] as u32;
    if forced > budget {
        return out;
    }
    fn rec(
        d: usize,
        counts: &[u8; MAX_SPAN],
        left: u32,
        taken: u32,
        weight: &BigInt,
        rest: u128,
        binom: &[Vec<u64>],
        out: &mut Vec<Choice>,
    ) {
        if d == MAX_SPAN {
            out.push(Choice {
                taken,
                weight: weight.clone(),
                rest,
            });
            return;
        }
        let c = counts[d] as u32;
        for r in 0..=c.min(left) {
            let keep = (c - r) as u128;
            rec(
                d + 1,
                counts,
                left - r,
                taken + r,
                &(weight * binom[c as usize][r as usize]),
                rest | keep << (8 * (d - 1)),
                binom,
                out,
            );
        }
    }
    rec(1, counts, budget - forced, forced, &BigInt::from(1), 0, binom, &mut out);
    out
}

/// Coefficient of `target` when the system is a full Vandermonde product
/// times window sums, `None` when it has a different shape.
pub fn coefficient_vandermonde(
    sys: &FactorSystem,
    target: &Monomial,
    memory_cap: u64,
) -> Result<Option<BigInt>> {
    let Some(plan) = plan(sys) else {
        return Ok(None);
    };
    let nv = plan.num_vars;
    if target.len() != nv {
        return Err(Error::precondition(format!(
            "monomial has {} exponents, system has {} variables",
            target.len(),
            nv
        )));
    }
    // Homogeneous of degree `sys.degree()`.
    if target.total_degree() != sys.degree() as u64 {
        return Ok(Some(BigInt::zero()));
    }
    let goal = target.exponents();
    let binom = binomials(MAX_SLOT);

    // layer: pending vector -> (mask -> signed count)
    let mut layer: HashMap<u128, HashMap<u64, BigInt>> = HashMap::new();
    layer.entry(0).or_default().insert(0, BigInt::from(1));

    for (i, &gi) in goal.iter().enumerate() {
        let add = plan.starts[i];
        let next = layer
            .into_par_iter()
            .fold(
                HashMap::<u128, HashMap<u64, BigInt>>::new,
                |mut acc, (pending, masks)| {
                    let mut counts = [0u8; MAX_SPAN];
                    for (d, c) in counts.iter_mut().enumerate() {
                        *c = slot(pending, d) + add[d];
                    }
                    for choice in choices(&counts, gi, &binom) {
                        let v = gi - choice.taken;
                        if v as usize >= nv {
                            continue;
                        }
                        let bit = 1u64 << v;
                        let bucket = acc.entry(choice.rest).or_default();
                        for (&mask, value) in &masks {
                            if mask & bit != 0 {
                                continue;
                            }
                            let above = (mask >> (v + 1)).count_ones();
                            let mut term = value * &choice.weight;
                            if above % 2 == 1 {
                                term = -term;
                            }
                            *bucket.entry(mask | bit).or_default() += term;
                        }
                    }
                    acc
                },
            )
            .reduce(HashMap::new, merge_layers);
        let mut next = next;
        next.retain(|_, masks| {
            masks.retain(|_, v| !v.is_zero());
            !masks.is_empty()
        });
        let entries: usize = next.values().map(|m| m.len()).sum();
        let bytes = entries as u64 * entry_bytes(24);
        if bytes > memory_cap {
            return Err(Error::ResourceLimit {
                entries,
                bytes,
                cap: memory_cap,
            });
        }
        if next.is_empty() {
            return Ok(Some(BigInt::zero()));
        }
        layer = next;
    }
    let full = if nv == 64 { u64::MAX } else { (1u64 << nv) - 1 };
    Ok(Some(
        layer
            .get(&0)
            .and_then(|masks| masks.get(&full))
            .cloned()
            .unwrap_or_default(),
    ))
}

fn merge_layers(
    mut a: HashMap<u128, HashMap<u64, BigInt>>,
    b: HashMap<u128, HashMap<u64, BigInt>>,
) -> HashMap<u128, HashMap<u64, BigInt>> {
    if a.len() < b.len() {
        return merge_layers(b, a);
    }
    for (pending, masks) in b {
        let bucket = a.entry(pending).or_default();
        for (mask, v) in masks {
            *bucket.entry(mask).or_default() += v;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{coefficient_baseline, Family, LinearFactor, DEFAULT_MEMORY_CAP};

    #[test]
    fn rejects_other_shapes() {
        // Missing a difference.
        let sys = FactorSystem::from_factors(
            3,
            vec![LinearFactor::difference(0, 1), LinearFactor::window(0, 2)],
        )
        .unwrap();
        assert!(coefficient_vandermonde(&sys, &Monomial(vec![1, 1, 0]), DEFAULT_MEMORY_CAP)
            .unwrap()
            .is_none());
        // Non-contiguous sum.
        let odd = LinearFactor::new(vec![(0, 1), (2, 1)]).unwrap();
        let sys = FactorSystem::from_factors(
            3,
            vec![
                LinearFactor::difference(0, 1),
                LinearFactor::difference(0, 2),
                LinearFactor::difference(1, 2),
                odd,
            ],
        )
        .unwrap();
        assert!(plan(&sys).is_none());
    }

    #[test]
    fn q_2_3() {
        let sys = FactorSystem::build(Family::Q { t: 2, ell: 3 }).unwrap();
        let c = coefficient_vandermonde(&sys, &Monomial(vec![2, 2, 2]), DEFAULT_MEMORY_CAP)
            .unwrap()
            .unwrap();
        assert_eq!(c, BigInt::from(-1));
    }

    #[test]
    fn pure_vandermonde_is_sign_of_permutation() {
        let sys = FactorSystem::build(Family::P { k: 4, t: 1 }).unwrap();
        let cases = [([0, 1, 2, 3], 1), ([1, 0, 2, 3], -1), ([3, 2, 1, 0], 1), ([2, 2, 1, 1], 0)];
        for (exps, expected) in cases {
            let m = Monomial(exps.to_vec());
            let fast = coefficient_vandermonde(&sys, &m, DEFAULT_MEMORY_CAP).unwrap().unwrap();
            assert_eq!(fast, BigInt::from(expected), "{exps:?}");
            assert_eq!(coefficient_baseline(&sys, &m, DEFAULT_MEMORY_CAP).unwrap(), fast);
        }
    }

    #[test]
    fn choices_weights_sum_to_subset_counts() {
        let binom = binomials(16);
        let mut counts = [0u8; MAX_SPAN];
        counts[0] = 1;
        counts[1] = 2;
        counts[3] = 1;
        let all = choices(&counts, 10, &binom);
        // 2^3 subsets of the optional windows, weighted.
        let total: BigInt = all.iter().map(|c| &c.weight).sum();
        assert_eq!(total, BigInt::from(8));
        assert!(all.iter().all(|c| c.taken >= 1));
        assert!(choices(&counts, 0, &binom).is_empty());
    }
}
