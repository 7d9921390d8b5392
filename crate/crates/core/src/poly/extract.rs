use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{coefficient_vandermonde, FactorSystem, Monomial};
use crate::error::{Error, Result};

/// Default cap on the memory held by an extraction's state map: 8 GiB.
pub const DEFAULT_MEMORY_CAP: u64 = 8 << 30;

/// Default cap on the number of monomials the full-expansion oracle keeps.
pub const DEFAULT_ORACLE_ENTRIES: usize = 4_000_000;

/// Rough per-entry footprint of a state map: key, a small `BigInt`, and the
/// hash table's own overhead.
pub(crate) fn entry_bytes(key_len: usize) -> u64 {
    (key_len + 96) as u64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// The Vandermonde expansion when the system has that shape, otherwise
    /// the baseline.
    #[default]
    Auto,
    Baseline,
    Vandermonde,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "baseline" => Ok(Algorithm::Baseline),
            "vandermonde" => Ok(Algorithm::Vandermonde),
            other => Err(Error::Parse {
                input: other.into(),
                reason: "expected auto, baseline or vandermonde".into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractOptions {
    pub algorithm: Algorithm,
    pub memory_cap: u64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            algorithm: Algorithm::Auto,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

fn check_target(sys: &FactorSystem, target: &Monomial) -> Result<()> {
    if target.len() != sys.num_vars() {
        return Err(Error::precondition(format!(
            "monomial has {} exponents, system has {} variables",
            target.len(),
            sys.num_vars()
        )));
    }
    Ok(())
}

/// Exact coefficient of `target` in the expanded product.
pub fn coefficient(sys: &FactorSystem, target: &Monomial, opts: ExtractOptions) -> Result<BigInt> {
    match opts.algorithm {
        Algorithm::Baseline => coefficient_baseline(sys, target, opts.memory_cap),
        Algorithm::Vandermonde => coefficient_vandermonde(sys, target, opts.memory_cap)?
            .ok_or_else(|| {
                Error::precondition("system is not a Vandermonde product times window sums")
            }),
        Algorithm::Auto => match coefficient_vandermonde(sys, target, opts.memory_cap)? {
            Some(c) => Ok(c),
            None => coefficient_baseline(sys, target, opts.memory_cap),
        },
    }
}

/// Sequential product over the factors in canonical order (ascending by
/// largest variable).
pub fn coefficient_baseline(sys: &FactorSystem, target: &Monomial, memory_cap: u64) -> Result<BigInt> {
    let order: Vec<usize> = (0..sys.degree()).collect();
    coefficient_baseline_with_order(sys, target, &order, memory_cap)
}

/// Sequential product over the factors in the given order.
///
/// States map exponent vectors `e <= target` to coefficients. After each
/// factor, a state survives only if every variable can still reach its
/// target exponent with the factors left; in particular a variable whose
/// last factor has just been processed must sit exactly at its target.
pub fn coefficient_baseline_with_order(
    sys: &FactorSystem,
    target: &Monomial,
    order: &[usize],
    memory_cap: u64,
) -> Result<BigInt> {
    check_target(sys, target)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..sys.degree()).collect::<Vec<_>>() {
        return Err(Error::precondition("order must be a permutation of the factors"));
    }
    if target.exponents().iter().any(|&e| e > u8::MAX as u32) {
        return Ok(BigInt::zero());
    }
    let goal: Vec<u8> = target.exponents().iter().map(|&e| e as u8).collect();
    let nv = sys.num_vars();

    // remaining[v] = occurrences of v in factors not yet processed.
    let mut remaining = sys.occurrences();
    if (0..nv).any(|v| goal[v] as usize > remaining[v]) {
        return Ok(BigInt::zero());
    }
    let mut states: HashMap<Vec<u8>, BigInt> = HashMap::new();
    states.insert(vec![0; nv], BigInt::from(1));

    for &fi in order {
        let factor = &sys.factors()[fi];
        for &(v, _) in factor.terms() {
            remaining[v as usize] -= 1;
        }
        let mut next: HashMap<Vec<u8>, BigInt> = HashMap::with_capacity(states.len() * 2);
        for (exps, coef) in &states {
            for &(v, c) in factor.terms() {
                let v = v as usize;
                if exps[v] >= goal[v] {
                    continue;
                }
                let mut e = exps.clone();
                e[v] += 1;
                let viable = factor
                    .terms()
                    .iter()
                    .all(|&(w, _)| (goal[w as usize] - e[w as usize]) as usize <= remaining[w as usize]);
                if !viable {
                    continue;
                }
                let add = coef * c;
                next.entry(e)
                    .and_modify(|acc| *acc += &add)
                    .or_insert(add);
            }
        }
        next.retain(|_, c| !c.is_zero());
        let bytes = next.len() as u64 * entry_bytes(nv);
        if bytes > memory_cap {
            return Err(Error::ResourceLimit {
                entries: next.len(),
                bytes,
                cap: memory_cap,
            });
        }
        states = next;
        if states.is_empty() {
            return Ok(BigInt::zero());
        }
    }
    Ok(states.remove(&goal).unwrap_or_default())
}

/// Full sparse expansion of the product with no pruning at all, then a
/// lookup. Only for small systems; it refuses to hold more than
/// `max_entries` monomials.
pub fn coefficient_oracle(sys: &FactorSystem, target: &Monomial, max_entries: usize) -> Result<BigInt> {
    check_target(sys, target)?;
    let nv = sys.num_vars();
    let mut poly: HashMap<Vec<u32>, BigInt> = HashMap::new();
    poly.insert(vec![0; nv], BigInt::from(1));
    for factor in sys.factors() {
        let mut next: HashMap<Vec<u32>, BigInt> = HashMap::with_capacity(poly.len() * 2);
        for (exps, coef) in &poly {
            for &(v, c) in factor.terms() {
                let mut e = exps.clone();
                e[v as usize] += 1;
                *next.entry(e).or_default() += coef * c;
            }
        }
        next.retain(|_, c| !c.is_zero());
        if next.len() > max_entries {
            return Err(Error::ResourceLimit {
                entries: next.len(),
                bytes: next.len() as u64 * entry_bytes(nv * 4),
                cap: max_entries as u64 * entry_bytes(nv * 4),
            });
        }
        poly = next;
    }
    Ok(poly.remove(target.exponents()).unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Family;

    /// Brute force over every choice of one term per factor.
    fn brute_force(sys: &FactorSystem, target: &[u32]) -> i64 {
        let factors = sys.factors();
        let mut total = 0i64;
        let mut choice = vec![0usize; factors.len()];
        loop {
            let mut exps = vec![0u32; sys.num_vars()];
            let mut sign = 1i64;
            for (f, &c) in factors.iter().zip(&choice) {
                let (v, coef) = f.terms()[c];
                exps[v as usize] += 1;
                sign *= coef as i64;
            }
            if exps == target {
                total += sign;
            }
            let mut pos = 0;
            loop {
                if pos == factors.len() {
                    return total;
                }
                choice[pos] += 1;
                if choice[pos] < factors[pos].terms().len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn q_2_3_brute_force_values() {
        let sys = FactorSystem::build(Family::Q { t: 2, ell: 3 }).unwrap();
        assert_eq!(brute_force(&sys, &[2, 2, 2]), -1);
        let target = Monomial(vec![2, 2, 2]);
        assert_eq!(coefficient_oracle(&sys, &target, 1000).unwrap(), BigInt::from(-1));
        assert_eq!(
            coefficient_baseline(&sys, &target, DEFAULT_MEMORY_CAP).unwrap(),
            BigInt::from(-1)
        );
        let high = Monomial(vec![6, 0, 0]);
        assert!(coefficient_baseline(&sys, &high, DEFAULT_MEMORY_CAP).unwrap().is_zero());
        assert!(coefficient_oracle(&sys, &high, 1000).unwrap().is_zero());
    }

    #[test]
    fn p_3_2_matches_brute_force() {
        let sys = FactorSystem::build(Family::P { k: 3, t: 2 }).unwrap();
        for a in 0..=4u32 {
            for b in 0..=(5 - a) {
                let target = [a, b, 5 - a - b];
                let expected = BigInt::from(brute_force(&sys, &target));
                let m = Monomial(target.to_vec());
                assert_eq!(coefficient_oracle(&sys, &m, 1000).unwrap(), expected);
                assert_eq!(
                    coefficient_baseline(&sys, &m, DEFAULT_MEMORY_CAP).unwrap(),
                    expected
                );
            }
        }
    }

    #[test]
    fn over_degree_target_is_zero() {
        let sys = FactorSystem::build(Family::Q { t: 3, ell: 3 }).unwrap();
        let m = Monomial(vec![5, 5, 5]);
        assert!(coefficient_oracle(&sys, &m, 10_000).unwrap().is_zero());
        assert!(coefficient(&sys, &m, ExtractOptions::default()).unwrap().is_zero());
    }

    #[test]
    fn resource_limit_is_reported() {
        let sys = FactorSystem::build(Family::Q { t: 4, ell: 6 }).unwrap();
        let deg = sys.degree() as u32;
        let mut exps = vec![deg / 6; 6];
        exps[5] += deg % 6;
        let target = Monomial(exps);
        let err = coefficient_baseline(&sys, &target, 1024).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
        let err = coefficient_oracle(&sys, &target, 10).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn wrong_length_target_rejected() {
        let sys = FactorSystem::build(Family::Q { t: 2, ell: 3 }).unwrap();
        assert!(coefficient(&sys, &Monomial(vec![1, 1]), ExtractOptions::default()).is_err());
    }
}
