use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::{factorize, Certificate, KScope};
use crate::error::{Error, Result};
use crate::search::Variant;

/// Sets of at most this size are sequenceable by earlier work; the report
/// starts right after them.
pub const BASE_CASE_MAX_K: usize = 12;
pub const K_MIN: usize = BASE_CASE_MAX_K + 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Complete,
    Incomplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    /// Every prime `p > k` avoids some applicable coefficient.
    Covered,
    /// Some prime `p > k` divides every applicable coefficient.
    Residual,
    /// No certificate applies.
    Uncovered,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertRef {
    /// Position in the input list.
    pub index: usize,
    pub ell: usize,
    pub k_scope: KScope,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageRow {
    pub k_from: usize,
    /// `None` for the open-ended last row.
    pub k_to: Option<usize>,
    pub certificates: Vec<CertRef>,
    /// gcd of the applicable coefficients; absent when none applies.
    pub gcd: Option<String>,
    /// Primes of the gcd that are at most `k_from`; a field `Z_p` holding a
    /// `k`-subset of nonzero elements has `p > k`, so these never occur.
    pub discharged_by_size: Vec<String>,
    /// The part of the gcd left after removing primes `<= k_from`. A prime
    /// `p` is handled by this row exactly when it does not divide this.
    pub residual_integer: Option<String>,
    pub residual_primes: Vec<String>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseCase {
    pub k_max: usize,
    pub status: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gap {
    pub k_from: usize,
    pub k_to: Option<usize>,
    pub status: RowStatus,
    /// Primes left open; empty for an uncovered row (all primes are).
    pub primes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub variant: Variant,
    pub t: usize,
    pub k_min: usize,
    pub base_case: BaseCase,
    pub rows: Vec<CoverageRow>,
    pub gaps: Vec<Gap>,
    pub verdict: Verdict,
}

/// Splits `g` into the part made of primes `<= bound` and the rest, using
/// only gcds with `bound!`, so no primality test is involved.
fn split_small_primes(g: &BigUint, bound: usize) -> (BigUint, BigUint) {
    let factorial = (2..=bound as u64).fold(BigUint::one(), |acc, i| acc * i);
    let mut rest = g.clone();
    let mut small = BigUint::one();
    loop {
        let d = rest.gcd(&factorial);
        if d.is_one() {
            return (small, rest);
        }
        rest /= &d;
        small *= d;
    }
}

fn prime_strings(n: &BigUint) -> Result<Vec<String>> {
    if n.is_one() {
        return Ok(Vec::new());
    }
    let fz = factorize(&n.clone().into())?;
    Ok(fz.primes().iter().map(|p| p.to_string()).collect())
}

fn row(k_from: usize, k_to: Option<usize>, certs: &[Certificate], applicable: Vec<usize>) -> Result<CoverageRow> {
    let refs: Vec<CertRef> = applicable
        .iter()
        .map(|&i| CertRef {
            index: i,
            ell: certs[i].ell,
            k_scope: certs[i].k_scope,
            coefficient: certs[i].coefficient.to_string(),
        })
        .collect();
    if applicable.is_empty() {
        return Ok(CoverageRow {
            k_from,
            k_to,
            certificates: refs,
            gcd: None,
            discharged_by_size: Vec::new(),
            residual_integer: None,
            residual_primes: Vec::new(),
            status: RowStatus::Uncovered,
        });
    }
    let g = applicable
        .iter()
        .map(|&i| certs[i].coefficient.magnitude().clone())
        .reduce(|a, b| a.gcd(&b))
        .expect("nonempty");
    let (small, rest) = split_small_primes(&g, k_from);
    Ok(CoverageRow {
        k_from,
        k_to,
        certificates: refs,
        gcd: Some(g.to_string()),
        discharged_by_size: prime_strings(&small)?,
        residual_integer: Some(rest.to_string()),
        residual_primes: prime_strings(&rest)?,
        status: if rest.is_one() {
            RowStatus::Covered
        } else {
            RowStatus::Residual
        },
    })
}

/// Walk `k = 13, 14, ...` and decide, for each size, whether the
/// certificates that apply leave any prime `p > k` uncovered.
///
/// Sizes up to 12 are taken from earlier work and flagged as assumed.
/// Past the largest exact scope and the largest `at_least` bound the set of
/// applicable certificates no longer changes, so one open-ended row closes
/// the walk; there the size argument uses its first `k`.
pub fn verify_theorem_coverage(variant: Variant, t: usize, certs: &[Certificate]) -> Result<TheoremReport> {
    if certs.is_empty() {
        return Err(Error::precondition("coverage needs at least one certificate"));
    }
    for (i, c) in certs.iter().enumerate() {
        if c.variant != variant || c.t != t {
            return Err(Error::precondition(format!(
                "certificate {i} is for ({}, t = {}), report is for ({variant}, t = {t})",
                c.variant, c.t
            )));
        }
        c.verify()
            .map_err(|e| Error::InvalidCertificate(format!("certificate {i}: {e}")))?;
    }
    let tail = certs
        .iter()
        .map(|c| match c.k_scope {
            KScope::Exact(k) => k + 1,
            KScope::AtLeast(k) => k,
        })
        .max()
        .unwrap_or(K_MIN)
        .max(K_MIN);

    let mut rows = Vec::new();
    for k in K_MIN..tail {
        let applicable = (0..certs.len()).filter(|&i| certs[i].scope_contains(k)).collect();
        rows.push(row(k, Some(k), certs, applicable)?);
    }
    let open: Vec<usize> = (0..certs.len())
        .filter(|&i| matches!(certs[i].k_scope, KScope::AtLeast(v) if v <= tail))
        .collect();
    rows.push(row(tail, None, certs, open)?);

    let gaps: Vec<Gap> = rows
        .iter()
        .filter(|r| r.status != RowStatus::Covered)
        .map(|r| Gap {
            k_from: r.k_from,
            k_to: r.k_to,
            status: r.status,
            primes: r.residual_primes.clone(),
        })
        .collect();
    let verdict = if gaps.is_empty() {
        Verdict::Complete
    } else {
        Verdict::Incomplete
    };
    Ok(TheoremReport {
        variant,
        t,
        k_min: K_MIN,
        base_case: BaseCase {
            k_max: BASE_CASE_MAX_K,
            status: "assumed (prior work)",
        },
        rows,
        gaps,
        verdict,
    })
}

impl TheoremReport {
    pub fn row_for(&self, k: usize) -> Option<&CoverageRow> {
        self.rows
            .iter()
            .find(|r| r.k_from <= k && r.k_to.map_or(true, |to| k <= to))
    }

    /// Smallest prime that some row leaves open, if any can be named.
    pub fn first_residual_prime(&self) -> Option<u64> {
        self.gaps
            .iter()
            .flat_map(|g| g.primes.iter())
            .filter_map(|p| p.parse::<BigUint>().ok()?.to_u64())
            .min()
    }
}
