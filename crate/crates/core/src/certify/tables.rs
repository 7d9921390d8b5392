//! The published certificate tables, embedded as fixtures, and a runner that
//! recomputes them.
//!
//! Tables 1 and 2 hold the main variant with `t = 6`: exact sizes
//! `k = 13..16` use the top part of the `k`-dependent polynomial, the
//! open-ended rows use `Q`. Tables 3 and 4 are the cmpp counterpart with
//! `t = 7`.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::Serialize;

use super::{certificate_family, make_certificate, Certificate, Factorization, KScope, PrimePower};
use crate::error::{Error, Result};
use crate::poly::{ExtractOptions, FactorSystem, Monomial};
use crate::search::Variant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Rows with `ell <= 11`; the `ell = 12` rows get their degree only.
    Fast,
    Full,
}

impl std::str::FromStr for Tier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Tier::Fast),
            "full" => Ok(Tier::Full),
            other => Err(Error::Parse {
                input: other.into(),
                reason: "expected fast or full".into(),
            }),
        }
    }
}

/// One printed row: the monomial is `lead` followed by `fill` repeated up
/// to length `ell`.
#[derive(Clone, Copy, Debug)]
pub struct ExpectedRow {
    pub table: u8,
    pub variant: Variant,
    pub t: usize,
    pub scope: KScope,
    pub ell: usize,
    pub degree: usize,
    lead: &'static [u32],
    fill: u32,
    negative: bool,
    factors: &'static [(u64, u32)],
}

impl ExpectedRow {
    pub fn monomial(&self) -> Monomial {
        let mut exps = self.lead.to_vec();
        exps.resize(self.ell, self.fill);
        Monomial(exps)
    }

    pub fn factorization(&self) -> Factorization {
        Factorization {
            sign: if self.negative { -1 } else { 1 },
            factors: self
                .factors
                .iter()
                .map(|&(p, e)| PrimePower {
                    prime: BigUint::from(p),
                    exp: e,
                })
                .collect(),
        }
    }

    pub fn coefficient(&self) -> BigInt {
        let magnitude = BigInt::from(self.factorization().product());
        if self.negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

const fn row(
    table: u8,
    scope: KScope,
    ell: usize,
    degree: usize,
    lead: &'static [u32],
    fill: u32,
    negative: bool,
    factors: &'static [(u64, u32)],
) -> ExpectedRow {
    let (variant, t) = if table <= 2 {
        (Variant::Main, 6)
    } else {
        (Variant::Cmpp, 7)
    };
    ExpectedRow {
        table,
        variant,
        t,
        scope,
        ell,
        degree,
        lead,
        fill,
        negative,
        factors,
    }
}

use KScope::{AtLeast, Exact};

const ROWS: [ExpectedRow; 20] = [
    row(1, Exact(16), 12, 125, &[5, 10], 11, true, &[(379, 1), (167938950753577, 1)]),
    row(1, Exact(15), 11, 109, &[9], 10, true, &[(3, 4), (5, 1), (47, 1), (97, 1), (271, 1), (15985681, 1)]),
    row(1, Exact(15), 11, 109, &[10, 9], 10, true, &[(2, 2), (3, 1), (401, 1), (1305987719053, 1)]),
    row(1, Exact(14), 11, 107, &[7], 10, true, &[(2, 2), (3, 1), (5, 1), (7, 2), (37, 1), (433, 1), (81945547, 1)]),
    row(1, Exact(14), 11, 107, &[8, 9], 10, true, &[(3, 1), (5, 1), (555349, 1), (496867859, 1)]),
    row(1, Exact(13), 11, 104, &[5, 9], 10, true, &[(2, 1), (11, 1), (946021, 1), (34341337, 1)]),
    row(1, Exact(13), 11, 104, &[6, 8], 10, true, &[(7, 1), (211, 1), (73019, 1), (7962769, 1)]),
    row(2, AtLeast(16), 11, 110, &[], 10, true, &[(3, 4), (5, 1), (47, 1), (97, 1), (271, 1), (15985681, 1)]),
    row(2, AtLeast(17), 12, 126, &[6, 10], 11, true, &[(379, 1), (167938950753577, 1)]),
    row(3, Exact(17), 12, 125, &[5, 10], 11, false, &[(2, 1), (7, 1), (13, 1), (4679, 1), (3953841444019, 1)]),
    row(3, Exact(16), 11, 109, &[9], 10, false, &[(13, 1), (67, 1), (451441944254443, 1)]),
    row(3, Exact(16), 11, 109, &[10, 9], 10, false, &[(3, 2), (281, 1), (1163, 1), (112116705839, 1)]),
    row(3, Exact(15), 11, 107, &[7], 10, false, &[(2, 2), (59, 1), (708923, 1), (1059330263, 1)]),
    row(3, Exact(15), 11, 107, &[8, 9], 10, false, &[(7, 1), (149, 1), (239, 1), (4073, 1), (212718109, 1)]),
    row(3, Exact(14), 11, 104, &[5, 9], 10, false, &[(2, 3), (41, 1), (7682093, 1), (13267117, 1)]),
    row(3, Exact(14), 11, 104, &[6, 8], 10, false, &[(2, 2), (16834339, 1), (679071929, 1)]),
    row(3, Exact(13), 11, 100, &[2, 8], 10, false, &[(3, 3), (708569, 1), (33345973, 1)]),
    row(3, Exact(13), 11, 100, &[3, 7], 10, false, &[(3, 1), (19, 1), (7829, 1), (31223, 1), (121843, 1)]),
    row(4, AtLeast(17), 11, 110, &[], 10, false, &[(13, 1), (67, 1), (451441944254443, 1)]),
    row(4, AtLeast(18), 12, 126, &[6, 10], 11, false, &[(2, 1), (7, 1), (13, 1), (4679, 1), (3953841444019, 1)]),
];

/// Expected rows for a variant, in table order.
pub fn expected_rows(variant: Variant, t: usize) -> Result<Vec<ExpectedRow>> {
    let rows: Vec<ExpectedRow> = ROWS
        .iter()
        .filter(|r| r.variant == variant && r.t == t)
        .copied()
        .collect();
    if rows.is_empty() {
        return Err(Error::precondition(format!(
            "tables exist for (main, t = 6) and (cmpp, t = 7), not ({variant}, t = {t})"
        )));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub field: &'static str,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowResult {
    pub table: u8,
    pub k_scope: KScope,
    pub ell: usize,
    pub degree: usize,
    pub monomial: Monomial,
    pub expected_coefficient: String,
    pub expected_factored: String,
    /// `None` when the tier skips this row's coefficient.
    pub coefficient: Option<String>,
    pub factored: Option<String>,
    pub seconds: f64,
    pub mismatches: Vec<Mismatch>,
}

impl RowResult {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableReproduction {
    pub variant: Variant,
    pub t: usize,
    pub tier: Tier,
    pub rows: Vec<RowResult>,
    #[serde(skip)]
    pub certificates: Vec<Certificate>,
}

impl TableReproduction {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(RowResult::matches)
    }

    /// Columns `k,ell,deg,monomial,coefficient`. Open-ended rows show `k`
    /// as `>=K`; skipped coefficients are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,ell,deg,monomial,coefficient\n");
        for r in &self.rows {
            let k = match r.k_scope {
                KScope::Exact(k) => k.to_string(),
                KScope::AtLeast(k) => format!(">={k}"),
            };
            let monomial = r
                .monomial
                .exponents()
                .iter()
                .enumerate()
                .map(|(i, e)| format!("y{}^{e}", i + 1))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                out,
                "{k},{},{},{monomial},{}",
                r.ell,
                r.degree,
                r.factored.as_deref().unwrap_or("")
            );
        }
        out
    }
}

fn compute_row(row: &ExpectedRow, compute: bool, opts: ExtractOptions) -> Result<(RowResult, Option<Certificate>)> {
    let started = Instant::now();
    let monomial = row.monomial();
    let sys = FactorSystem::build(certificate_family(row.variant, row.t, row.ell, row.scope))?;
    let expected = row.coefficient();
    let expected_factored = row.factorization().to_factored_string();
    let mut mismatches = Vec::new();
    if sys.degree() != row.degree {
        mismatches.push(Mismatch {
            field: "deg",
            expected: row.degree.to_string(),
            actual: sys.degree().to_string(),
        });
    }
    let mut cert = None;
    if compute {
        match make_certificate(row.variant, row.t, row.ell, row.scope, &monomial, opts) {
            Ok(c) => cert = Some(c),
            Err(Error::ZeroCoefficient) => mismatches.push(Mismatch {
                field: "coefficient",
                expected: expected.to_string(),
                actual: "0".into(),
            }),
            Err(e) => return Err(e),
        }
    }
    if let Some(c) = &cert {
        if c.coefficient != expected {
            mismatches.push(Mismatch {
                field: "coefficient",
                expected: expected.to_string(),
                actual: c.coefficient.to_string(),
            });
        }
        if c.factored() != expected_factored {
            mismatches.push(Mismatch {
                field: "factored",
                expected: expected_factored.clone(),
                actual: c.factored(),
            });
        }
    }
    let result = RowResult {
        table: row.table,
        k_scope: row.scope,
        ell: row.ell,
        degree: sys.degree(),
        monomial,
        expected_coefficient: expected.to_string(),
        expected_factored,
        coefficient: cert.as_ref().map(|c| c.coefficient.to_string()),
        factored: cert.as_ref().map(Certificate::factored),
        seconds: started.elapsed().as_secs_f64(),
        mismatches,
    };
    Ok((result, cert))
}

/// Recompute the tables for `(main, 6)` or `(cmpp, 7)` and compare every
/// cell with the embedded values. Rows run in parallel; the output keeps
/// table order.
pub fn reproduce_tables(variant: Variant, t: usize, tier: Tier, opts: ExtractOptions) -> Result<TableReproduction> {
    let expected = expected_rows(variant, t)?;
    let computed: Vec<(RowResult, Option<Certificate>)> = expected
        .par_iter()
        .map(|row| compute_row(row, tier == Tier::Full || row.ell <= 11, opts))
        .collect::<Result<_>>()?;
    let (rows, certs): (Vec<_>, Vec<_>) = computed.into_iter().unzip();
    Ok(TableReproduction {
        variant,
        t,
        tier,
        rows,
        certificates: certs.into_iter().flatten().collect(),
    })
}

/// Certificates for every table row of a variant built from the embedded
/// values, without running any extraction.
pub fn table_certificates(variant: Variant, t: usize) -> Result<Vec<Certificate>> {
    expected_rows(variant, t)?
        .iter()
        .map(|r| {
            super::certificate_with_coefficient(r.variant, r.t, r.ell, r.scope, &r.monomial(), r.coefficient())
        })
        .collect()
}
