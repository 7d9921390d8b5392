//! Residues of the cyclic group Z_n, partial sums and the sequencing checks.
//!
//! Residues are stored canonically in `[0, n)` as `u32`. Since `n < 2^31`,
//! any sum of two residues fits in a `u64` (and in fact a `u32`) before
//! reduction.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The order `n` of the cyclic group, `2 <= n < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Modulus(u32);

impl Modulus {
    pub const MAX: u64 = 1 << 31;

    pub fn new(n: u64) -> Result<Self> {
        if (2..Self::MAX).contains(&n) {
            Ok(Modulus(n as u32))
        } else {
            Err(Error::InvalidModulus(n))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.0 as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    /// Canonical representative of a signed integer.
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    /// `n / 2` when `n` is even: the unique involution of Z_n.
    pub fn involution(self) -> Option<u32> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;
    fn try_from(n: u64) -> Result<Self> {
        Modulus::new(n)
    }
}

impl From<Modulus> for u64 {
    fn from(m: Modulus) -> u64 {
        m.0 as u64
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Parse a comma separated residue list such as `"1,2,5,-3"`.
///
/// Signed values are reduced mod n, so `-3` becomes `n - 3`. Values whose
/// reduction is 0 are rejected, as are values that are out of `(-n, n)`:
/// `7` mod 5 is far more likely a typo than an intended `2`.
pub fn parse_residues(modulus: Modulus, input: &str) -> Result<Vec<u32>> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: i64 = tok.parse().map_err(|_| Error::Parse {
                input: tok.to_string(),
                reason: "not an integer".into(),
            })?;
            let n = modulus.get() as i64;
            if v <= -n || v >= n {
                return Err(Error::InvalidElement {
                    value: v,
                    modulus: modulus.get(),
                });
            }
            let r = modulus.reduce(v);
            if r == 0 {
                return Err(Error::InvalidElement {
                    value: v,
                    modulus: modulus.get(),
                });
            }
            Ok(r)
        })
        .collect()
}

fn check_distinct_nonzero(modulus: Modulus, values: &[u32]) -> Result<()> {
    let mut seen = HashSet::with_capacity(values.len());
    for &v in values {
        if v == 0 || v >= modulus.get() {
            return Err(Error::InvalidElement {
                value: v as i64,
                modulus: modulus.get(),
            });
        }
        if !seen.insert(v) {
            return Err(Error::DuplicateElement { value: v });
        }
    }
    Ok(())
}

/// A nonempty subset of `Z_n \ {0}`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubsetSpec {
    modulus: Modulus,
    elements: Vec<u32>,
}

impl SubsetSpec {
    pub fn new(modulus: Modulus, mut elements: Vec<u32>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        check_distinct_nonzero(modulus, &elements)?;
        elements.sort_unstable();
        Ok(SubsetSpec { modulus, elements })
    }

    pub fn parse(modulus: Modulus, input: &str) -> Result<Self> {
        Self::new(modulus, parse_residues(modulus, input)?)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Sum of all elements, the final partial sum of every ordering.
    pub fn total(&self) -> u32 {
        self.elements
            .iter()
            .fold(0, |acc, &a| self.modulus.add(acc, a))
    }
}

/// An ordering `(a_1, ..., a_k)` of distinct nonzero residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ordering {
    modulus: Modulus,
    sequence: Vec<u32>,
}

impl Ordering {
    pub fn new(modulus: Modulus, sequence: Vec<u32>) -> Result<Self> {
        check_distinct_nonzero(modulus, &sequence)?;
        Ok(Ordering { modulus, sequence })
    }

    pub fn parse(modulus: Modulus, input: &str) -> Result<Self> {
        Self::new(modulus, parse_residues(modulus, input)?)
    }

    pub(crate) fn from_trusted(modulus: Modulus, sequence: Vec<u32>) -> Self {
        debug_assert!(check_distinct_nonzero(modulus, &sequence).is_ok());
        Ordering { modulus, sequence }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn sequence(&self) -> &[u32] {
        &self.sequence
    }

    pub fn into_sequence(self) -> Vec<u32> {
        self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// The set of elements of this ordering.
    pub fn support(&self) -> Result<SubsetSpec> {
        SubsetSpec::new(self.modulus, self.sequence.clone())
    }

    /// Reverse the ordering and negate every element. Its partial sums are
    /// the original ones reversed and shifted by `-s_k`.
    pub fn reversed_negated(&self) -> Ordering {
        let seq = self
            .sequence
            .iter()
            .rev()
            .map(|&a| self.modulus.neg(a))
            .collect();
        Ordering {
            modulus: self.modulus,
            sequence: seq,
        }
    }

    pub fn partial_sums(&self) -> PartialSums {
        partial_sums(self)
    }
}

/// Partial sums `(s_0, ..., s_k)` with `s_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PartialSums(Vec<u32>);

impl PartialSums {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl std::ops::Deref for PartialSums {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingClass {
    Sequencing,
    RSequencing,
    Neither,
}

impl fmt::Display for OrderingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderingClass::Sequencing => "sequencing",
            OrderingClass::RSequencing => "r-sequencing",
            OrderingClass::Neither => "neither",
        })
    }
}

pub fn partial_sums(ordering: &Ordering) -> PartialSums {
    let m = ordering.modulus;
    let mut sums = Vec::with_capacity(ordering.len() + 1);
    let mut s = 0;
    sums.push(s);
    for &a in &ordering.sequence {
        s = m.add(s, a);
        sums.push(s);
    }
    PartialSums(sums)
}

fn all_distinct(values: &[u32]) -> bool {
    let mut seen = HashSet::with_capacity(values.len());
    values.iter().all(|v| seen.insert(*v))
}

pub fn classify_ordering(ordering: &Ordering) -> OrderingClass {
    let sums = partial_sums(ordering);
    let k = ordering.len();
    if all_distinct(&sums) {
        OrderingClass::Sequencing
    } else if k >= 1 && sums[k] == 0 && all_distinct(&sums[..k]) {
        // s_0 = 0 is among the first k sums, so distinctness already rules
        // out s_i = 0 for 1 <= i < k.
        OrderingClass::RSequencing
    } else {
        OrderingClass::Neither
    }
}

/// Every pair `(i, j)`, `i < j <= i + t`, with `s_i = s_j`.
///
/// The ordering is a t-weak sequencing exactly when the result is empty.
/// Requires `1 <= t < k`.
pub fn t_weak_violations(ordering: &Ordering, t: usize) -> Result<Vec<(usize, usize)>> {
    let k = ordering.len();
    if t == 0 || t >= k {
        return Err(Error::InvalidWindow { t, k });
    }
    let sums = partial_sums(ordering);
    Ok(window_collisions(&sums, t))
}

/// Window collisions of a raw partial-sum vector, no precondition on `t`.
pub(crate) fn window_collisions(sums: &[u32], t: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 1..sums.len() {
        for i in j.saturating_sub(t)..j {
            if sums[i] == sums[j] {
                out.push((i, j));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of window collisions, the random variable X of the collision
/// counting bound.
pub(crate) fn window_collision_count(sums: &[u32], t: usize) -> usize {
    let mut count = 0;
    for j in 1..sums.len() {
        for i in j.saturating_sub(t)..j {
            if sums[i] == sums[j] {
                count += 1;
            }
        }
    }
    count
}

/// True when `A` contains at most one element of every pair `{x, -x}`.
pub fn cmpp_admissible(set: &SubsetSpec) -> bool {
    let m = set.modulus;
    set.elements.iter().all(|&x| {
        let neg = m.neg(x);
        neg == x || !set.contains(neg)
    })
}
