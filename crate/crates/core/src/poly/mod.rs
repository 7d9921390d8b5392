//! Products of integer linear forms and exact coefficient extraction.
//!
//! Every polynomial handled here is a product of degree-one forms with
//! coefficients in `{+1, -1}`: differences `x_j - x_i` and window sums
//! `x_a + ... + x_b` over contiguous variable ranges. Variables are indexed
//! from 0 in code and in the JSON dump.

mod extract;
mod vandermonde;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zn::Modulus;

pub use extract::{
    coefficient, coefficient_baseline, coefficient_baseline_with_order, coefficient_oracle,
    Algorithm, ExtractOptions, DEFAULT_MEMORY_CAP, DEFAULT_ORACLE_ENTRIES,
};
pub use vandermonde::coefficient_vandermonde;

/// A degree-one form `sum c_v x_v`, terms sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearFactor {
    terms: Vec<(u32, i32)>,
}

impl LinearFactor {
    pub fn new(mut terms: Vec<(u32, i32)>) -> Result<Self> {
        terms.sort_unstable();
        if terms.is_empty() {
            return Err(Error::precondition("linear factor without terms"));
        }
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::precondition("linear factor repeats a variable"));
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(Error::precondition("linear factor has a zero coefficient"));
        }
        Ok(LinearFactor { terms })
    }

    /// `x_j - x_i` for `i < j`.
    pub fn difference(i: u32, j: u32) -> Self {
        debug_assert!(i < j);
        LinearFactor {
            terms: vec![(i, -1), (j, 1)],
        }
    }

    /// `x_first + ... + x_last`.
    pub fn window(first: u32, last: u32) -> Self {
        debug_assert!(first <= last);
        LinearFactor {
            terms: (first..=last).map(|v| (v, 1)).collect(),
        }
    }

    pub fn terms(&self) -> &[(u32, i32)] {
        &self.terms
    }

    pub fn max_var(&self) -> u32 {
        self.terms.last().expect("nonempty").0
    }

    pub fn min_var(&self) -> u32 {
        self.terms[0].0
    }

    pub fn contains(&self, var: u32) -> bool {
        self.terms.binary_search_by_key(&var, |t| t.0).is_ok()
    }

    /// `Some((i, j))` when this is `x_j - x_i` with `i < j`.
    pub fn as_difference(&self) -> Option<(u32, u32)> {
        match self.terms.as_slice() {
            [(i, -1), (j, 1)] => Some((*i, *j)),
            _ => None,
        }
    }

    /// `Some((first, last))` when this is an all-ones contiguous sum.
    pub fn as_window(&self) -> Option<(u32, u32)> {
        let first = self.min_var();
        let contiguous = self
            .terms
            .iter()
            .enumerate()
            .all(|(off, &(v, c))| c == 1 && v == first + off as u32);
        contiguous.then(|| (first, self.max_var()))
    }

    pub fn evaluate(&self, point: &[u32], p: Modulus) -> u32 {
        let acc = self.terms.iter().fold(0i64, |acc, &(v, c)| {
            let x = point[v as usize] as i64 % p.get() as i64;
            (acc + c as i64 * x).rem_euclid(p.get() as i64)
        });
        acc as u32
    }

    fn sort_key(&self) -> (u32, u32, &[(u32, i32)]) {
        (self.max_var(), self.min_var(), &self.terms)
    }
}

impl fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (idx, &(v, c)) in self.terms.iter().enumerate() {
            match (idx, c) {
                (0, 1) => {}
                (0, -1) => f.write_str("-")?,
                (0, c) => write!(f, "{c}*")?,
                (_, 1) => f.write_str(" + ")?,
                (_, -1) => f.write_str(" - ")?,
                (_, c) if c < 0 => write!(f, " - {}*", -c)?,
                (_, c) => write!(f, " + {c}*")?,
            }
            write!(f, "x{}", v + 1)?;
        }
        f.write_str(")")
    }
}

/// JSON shape of one factor in a dump: `{"vars": [...], "coeffs": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDump {
    pub vars: Vec<u32>,
    pub coeffs: Vec<i32>,
}

impl From<&LinearFactor> for FactorDump {
    fn from(f: &LinearFactor) -> Self {
        FactorDump {
            vars: f.terms.iter().map(|t| t.0).collect(),
            coeffs: f.terms.iter().map(|t| t.1).collect(),
        }
    }
}

impl TryFrom<FactorDump> for LinearFactor {
    type Error = Error;
    fn try_from(d: FactorDump) -> Result<Self> {
        if d.vars.len() != d.coeffs.len() {
            return Err(Error::precondition("vars and coeffs differ in length"));
        }
        LinearFactor::new(d.vars.into_iter().zip(d.coeffs).collect())
    }
}

/// The polynomial families, with their parameters.
///
/// * `F { k }`: differences for all pairs, windows of every length >= 2
///   except the full one.
/// * `P { k, t }`: differences, windows of length 2..=t.
/// * `Pbar { k, t }`: differences, windows of length 3..=t.
/// * `Q { t, ell }`: `P { ell, t }` times prefix sums `y_1 + ... + y_j`
///   with multiplicity `t - j`.
/// * `Qbar { t, ell }`: `Pbar { ell, t }` times prefix sums with
///   multiplicity `t - 2` for `j = 1` and `t - j` above.
/// * `Htop { k, t, ell }`, `Hbartop { k, t, ell }`: like `Q`/`Qbar` with the
///   multiplicities capped by the prefix length `h = k - ell`. These are the
///   top-degree parts after fixing the first `h` elements of an ordering of
///   a k-set; they coincide with `Q`/`Qbar` once `h >= t - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    F { k: usize },
    P { k: usize, t: usize },
    Pbar { k: usize, t: usize },
    Q { t: usize, ell: usize },
    Qbar { t: usize, ell: usize },
    Htop { k: usize, t: usize, ell: usize },
    Hbartop { k: usize, t: usize, ell: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    F,
    P,
    Pbar,
    Q,
    Qbar,
    Htop,
    Hbartop,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::F,
        FamilyKind::P,
        FamilyKind::Pbar,
        FamilyKind::Q,
        FamilyKind::Qbar,
        FamilyKind::Htop,
        FamilyKind::Hbartop,
    ];

    /// Assemble a family from optional parameters, as given on a command line.
    pub fn with_params(self, k: Option<usize>, t: Option<usize>, ell: Option<usize>) -> Result<Family> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::precondition(format!("family {self} needs --{name}")))
        };
        Ok(match self {
            FamilyKind::F => Family::F { k: need(k, "k")? },
            FamilyKind::P => Family::P {
                k: need(k, "k")?,
                t: need(t, "t")?,
            },
            FamilyKind::Pbar => Family::Pbar {
                k: need(k, "k")?,
                t: need(t, "t")?,
            },
            FamilyKind::Q => Family::Q {
                t: need(t, "t")?,
                ell: need(ell, "ell")?,
            },
            FamilyKind::Qbar => Family::Qbar {
                t: need(t, "t")?,
                ell: need(ell, "ell")?,
            },
            FamilyKind::Htop => Family::Htop {
                k: need(k, "k")?,
                t: need(t, "t")?,
                ell: need(ell, "ell")?,
            },
            FamilyKind::Hbartop => Family::Hbartop {
                k: need(k, "k")?,
                t: need(t, "t")?,
                ell: need(ell, "ell")?,
            },
        })
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "f" => FamilyKind::F,
            "p" => FamilyKind::P,
            "pbar" => FamilyKind::Pbar,
            "q" => FamilyKind::Q,
            "qbar" => FamilyKind::Qbar,
            "htop" => FamilyKind::Htop,
            "hbartop" => FamilyKind::Hbartop,
            _ => {
                return Err(Error::Parse {
                    input: s.into(),
                    reason: "expected one of F, P, Pbar, Q, Qbar, Htop, Hbartop".into(),
                })
            }
        })
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::F => "F",
            FamilyKind::P => "P",
            FamilyKind::Pbar => "Pbar",
            FamilyKind::Q => "Q",
            FamilyKind::Qbar => "Qbar",
            FamilyKind::Htop => "Htop",
            FamilyKind::Hbartop => "Hbartop",
        })
    }
}

impl Family {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::F { .. } => FamilyKind::F,
            Family::P { .. } => FamilyKind::P,
            Family::Pbar { .. } => FamilyKind::Pbar,
            Family::Q { .. } => FamilyKind::Q,
            Family::Qbar { .. } => FamilyKind::Qbar,
            Family::Htop { .. } => FamilyKind::Htop,
            Family::Hbartop { .. } => FamilyKind::Hbartop,
        }
    }

    pub fn num_vars(&self) -> usize {
        match *self {
            Family::F { k } | Family::P { k, .. } | Family::Pbar { k, .. } => k,
            Family::Q { ell, .. }
            | Family::Qbar { ell, .. }
            | Family::Htop { ell, .. }
            | Family::Hbartop { ell, .. } => ell,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::F { k } => write!(f, "F(k={k})"),
            Family::P { k, t } => write!(f, "P(k={k}, t={t})"),
            Family::Pbar { k, t } => write!(f, "Pbar(k={k}, t={t})"),
            Family::Q { t, ell } => write!(f, "Q(t={t}, ell={ell})"),
            Family::Qbar { t, ell } => write!(f, "Qbar(t={t}, ell={ell})"),
            Family::Htop { k, t, ell } => write!(f, "Htop(k={k}, t={t}, ell={ell})"),
            Family::Hbartop { k, t, ell } => write!(f, "Hbartop(k={k}, t={t}, ell={ell})"),
        }
    }
}

/// A product of linear factors over `num_vars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSystem {
    num_vars: usize,
    factors: Vec<LinearFactor>,
    family: Option<Family>,
}

/// Exponent vector of a target monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn parse(input: &str) -> Result<Self> {
        input
            .split(',')
            .map(|tok| {
                tok.trim().parse::<u32>().map_err(|_| Error::Parse {
                    input: tok.trim().to_string(),
                    reason: "exponent must be a non-negative integer".into(),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

fn push_vandermonde(factors: &mut Vec<LinearFactor>, vars: u32) {
    for j in 0..vars {
        for i in 0..j {
            factors.push(LinearFactor::difference(i, j));
        }
    }
}

/// Window factors for partial-sum pairs `0 <= i < j <= vars` with
/// `min_len <= j - i <= max_len`, skipping the full window if asked.
fn push_windows(factors: &mut Vec<LinearFactor>, vars: u32, min_len: u32, max_len: u32, skip_full: bool) {
    for j in 1..=vars {
        for i in 0..j {
            let len = j - i;
            if len < min_len || len > max_len || (skip_full && i == 0 && j == vars) {
                continue;
            }
            factors.push(LinearFactor::window(i, j - 1));
        }
    }
}

fn push_prefixes(factors: &mut Vec<LinearFactor>, vars: u32, multiplicity: impl Fn(u32) -> usize, upto: u32) {
    for j in 1..=upto.min(vars) {
        for _ in 0..multiplicity(j) {
            factors.push(LinearFactor::window(0, j - 1));
        }
    }
}

impl FactorSystem {
    pub fn from_factors(num_vars: usize, factors: Vec<LinearFactor>) -> Result<Self> {
        if let Some(f) = factors.iter().find(|f| f.max_var() as usize >= num_vars) {
            return Err(Error::precondition(format!(
                "factor {f} uses a variable beyond {num_vars}"
            )));
        }
        let mut sys = FactorSystem {
            num_vars,
            factors,
            family: None,
        };
        sys.canonicalize();
        Ok(sys)
    }

    pub fn build(family: Family) -> Result<Self> {
        let bad = |msg: String| Err(Error::precondition(format!("{family}: {msg}")));
        let mut factors = Vec::new();
        match family {
            Family::F { k } => {
                if k < 2 {
                    return bad("need k >= 2".into());
                }
                let k32 = k as u32;
                push_vandermonde(&mut factors, k32);
                push_windows(&mut factors, k32, 2, k32, true);
            }
            Family::P { k, t } | Family::Pbar { k, t } => {
                if k < 2 || t == 0 || t >= k {
                    return bad("need k >= 2 and 1 <= t < k".into());
                }
                let min_len = if matches!(family, Family::P { .. }) { 2 } else { 3 };
                push_vandermonde(&mut factors, k as u32);
                push_windows(&mut factors, k as u32, min_len, t as u32, false);
            }
            Family::Q { t, ell } | Family::Qbar { t, ell } => {
                if ell == 0 || t < 2 {
                    return bad("need ell >= 1 and t >= 2".into());
                }
                let (l32, t32) = (ell as u32, t as u32);
                let bar = matches!(family, Family::Qbar { .. });
                push_vandermonde(&mut factors, l32);
                push_windows(&mut factors, l32, if bar { 3 } else { 2 }, t32, false);
                push_prefixes(
                    &mut factors,
                    l32,
                    |j| {
                        let base = (t32 - j) as usize;
                        if bar && j == 1 {
                            base - 1
                        } else {
                            base
                        }
                    },
                    t32 - 1,
                );
            }
            Family::Htop { k, t, ell } | Family::Hbartop { k, t, ell } => {
                let bar = matches!(family, Family::Hbartop { .. });
                if ell == 0 || ell >= k || t == 0 || t >= k || (bar && t < 2) {
                    return bad("need k > ell >= 1 and 1 <= t < k (t >= 2 for Hbartop)".into());
                }
                let (l32, t32) = (ell as u32, t as u32);
                let h = k - ell;
                push_vandermonde(&mut factors, l32);
                push_windows(&mut factors, l32, if bar { 3 } else { 2 }, t32, false);
                push_prefixes(
                    &mut factors,
                    l32,
                    |j| {
                        let m = h.min((t32 - j) as usize);
                        if bar && j == 1 {
                            m.saturating_sub(1)
                        } else {
                            m
                        }
                    },
                    t32.saturating_sub(1),
                );
            }
        }
        let mut sys = FactorSystem::from_factors(family.num_vars(), factors)?;
        sys.family = Some(family);
        Ok(sys)
    }

    fn canonicalize(&mut self) {
        self.factors.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn factors(&self) -> &[LinearFactor] {
        &self.factors
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    /// Total degree, the number of factors.
    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    /// Product of the factors at `point`, mod `p`.
    pub fn evaluate(&self, point: &[u32], p: Modulus) -> Result<u32> {
        if point.len() != self.num_vars {
            return Err(Error::precondition(format!(
                "point has {} coordinates, system has {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let p64 = p.get() as u64;
        Ok(self.factors.iter().fold(1u64, |acc, f| {
            acc * f.evaluate(point, p) as u64 % p64
        }) as u32)
    }

    pub fn dump(&self) -> Vec<FactorDump> {
        self.factors.iter().map(FactorDump::from).collect()
    }

    pub fn from_dump(num_vars: usize, dump: Vec<FactorDump>) -> Result<Self> {
        let factors = dump
            .into_iter()
            .map(LinearFactor::try_from)
            .collect::<Result<Vec<_>>>()?;
        Self::from_factors(num_vars, factors)
    }

    /// Number of factors containing each variable.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for f in &self.factors {
            for &(v, _) in f.terms() {
                occ[v as usize] += 1;
            }
        }
        occ
    }
}

pub fn system_degree(sys: &FactorSystem) -> usize {
    sys.degree()
}

pub fn evaluate_system(sys: &FactorSystem, point: &[u32], p: Modulus) -> Result<u32> {
    sys.evaluate(point, p)
}
