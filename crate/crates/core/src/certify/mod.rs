//! Nonvanishing certificates and the coverage argument built on them.
//!
//! A certificate records a monomial dividing the bounding monomial
//! `prod y_i^(ell-1)`, with total degree equal to the degree of the
//! polynomial attached to a weak sequencing problem, and the exact integer
//! coefficient of that monomial. For a prime `p` not dividing the
//! coefficient the polynomial cannot vanish on the grid, which yields the
//! ordering. Coverage then walks all sizes `k`, collects the certificates
//! that apply and checks that together they leave no prime `p > k` out.

mod coverage;
mod factor;
mod tables;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{coefficient, ExtractOptions, FactorSystem, Family, Monomial};
use crate::search::Variant;

pub use coverage::{
    verify_theorem_coverage, BaseCase, CertRef, CoverageRow, Gap, RowStatus, TheoremReport, Verdict,
    BASE_CASE_MAX_K, K_MIN,
};
pub use factor::{
    factorize, factorize_with_budget, is_prime, Factorization, PrimePower, DEFAULT_RHO_BUDGET,
    PRIMALITY_METHOD,
};
pub use tables::{
    expected_rows, reproduce_tables, table_certificates, ExpectedRow, Mismatch, RowResult,
    TableReproduction, Tier,
};

/// Sizes `k` a certificate speaks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum KScope {
    Exact(usize),
    AtLeast(usize),
}

impl KScope {
    pub fn value(&self) -> usize {
        match *self {
            KScope::Exact(k) | KScope::AtLeast(k) => k,
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        match *self {
            KScope::Exact(v) => k == v,
            KScope::AtLeast(v) => k >= v,
        }
    }
}

impl fmt::Display for KScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KScope::Exact(k) => write!(f, "k = {k}"),
            KScope::AtLeast(k) => write!(f, "k >= {k}"),
        }
    }
}

impl std::str::FromStr for KScope {
    type Err = Error;
    /// `16` for an exact size, `>=16` or `16+` for all sizes from 16 on.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |reason: &str| Error::Parse {
            input: s.into(),
            reason: reason.into(),
        };
        let (body, at_least) = if let Some(rest) = s.strip_prefix(">=") {
            (rest, true)
        } else if let Some(rest) = s.strip_suffix('+') {
            (rest, true)
        } else {
            (s, false)
        };
        let v: usize = body
            .trim()
            .parse()
            .map_err(|_| bad("expected K, >=K or K+"))?;
        Ok(if at_least {
            KScope::AtLeast(v)
        } else {
            KScope::Exact(v)
        })
    }
}

/// The inequality chain `k - (t - 1) >= ell >= 2t - 1` (main) or
/// `k - (t - 1) >= ell >= 2t - 3` (cmpp) under which the `k`-independent
/// polynomial governs every ordering of a `k`-set.
pub fn check_applicability(variant: Variant, k: usize, t: usize, ell: usize) -> bool {
    let low = match variant {
        Variant::Main => 2 * t as i64 - 1,
        Variant::Cmpp => 2 * t as i64 - 3,
    };
    let (k, t, ell) = (k as i64, t as i64, ell as i64);
    k - (t - 1) >= ell && ell >= low
}

/// Whether a certificate with this scope is meaningful: for `AtLeast` the
/// chain must hold at the bound (it then holds above), for `Exact` the
/// prefix of `k - ell` elements must exist and leave `ell` free positions.
fn scope_applies(variant: Variant, t: usize, ell: usize, scope: KScope) -> Result<()> {
    if t < 2 {
        return Err(Error::NotApplicable(format!("t = {t} is below 2")));
    }
    match scope {
        KScope::AtLeast(k) => {
            if !check_applicability(variant, k, t, ell) {
                let low = match variant {
                    Variant::Main => "2t - 1",
                    Variant::Cmpp => "2t - 3",
                };
                return Err(Error::NotApplicable(format!(
                    "{variant}: need k - (t - 1) >= ell >= {low}, got k = {k}, t = {t}, ell = {ell}"
                )));
            }
        }
        KScope::Exact(k) => {
            let slack = match variant {
                Variant::Main => t - 1,
                Variant::Cmpp => t.saturating_sub(2),
            };
            if ell >= k || ell < slack {
                return Err(Error::NotApplicable(format!(
                    "{variant}: exact k = {k} needs {slack} <= ell < k, got ell = {ell}"
                )));
            }
        }
    }
    Ok(())
}

/// The polynomial whose coefficient a certificate records.
pub fn certificate_family(variant: Variant, t: usize, ell: usize, scope: KScope) -> Family {
    match (variant, scope) {
        (Variant::Main, KScope::AtLeast(_)) => Family::Q { t, ell },
        (Variant::Cmpp, KScope::AtLeast(_)) => Family::Qbar { t, ell },
        (Variant::Main, KScope::Exact(k)) => Family::Htop { k, t, ell },
        (Variant::Cmpp, KScope::Exact(k)) => Family::Hbartop { k, t, ell },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub variant: Variant,
    pub t: usize,
    pub ell: usize,
    pub k_scope: KScope,
    pub monomial: Monomial,
    pub degree: usize,
    #[serde(with = "decimal_bigint")]
    pub coefficient: BigInt,
    pub factorization: Vec<PrimePower>,
    #[serde(with = "decimal_biguint_vec")]
    pub excluded_primes: Vec<BigUint>,
    pub primality_method: String,
}

impl Certificate {
    pub fn family(&self) -> Family {
        certificate_family(self.variant, self.t, self.ell, self.k_scope)
    }

    pub fn scope_contains(&self, k: usize) -> bool {
        self.k_scope.contains(k)
    }

    /// Whether `p` is a characteristic where this certificate says nothing.
    /// Checked on the coefficient itself, not on the stored factorization.
    pub fn excludes(&self, p: &BigUint) -> bool {
        !p.is_zero() && (self.coefficient.magnitude() % p).is_zero()
    }

    /// Every invariant that does not need the coefficient recomputed.
    pub fn verify(&self) -> Result<()> {
        scope_applies(self.variant, self.t, self.ell, self.k_scope)?;
        let sys = FactorSystem::build(self.family())?;
        check_monomial(&sys, self.ell, &self.monomial)?;
        if self.degree != sys.degree() {
            return Err(Error::InvalidCertificate(format!(
                "recorded degree {} but the system has degree {}",
                self.degree,
                sys.degree()
            )));
        }
        if self.coefficient.is_zero() {
            return Err(Error::ZeroCoefficient);
        }
        let fz = Factorization {
            sign: if self.coefficient.is_negative() { -1 } else { 1 },
            factors: self.factorization.clone(),
        };
        if fz.product() != *self.coefficient.magnitude() {
            return Err(Error::InvalidCertificate(
                "factorization does not multiply back to |coefficient|".into(),
            ));
        }
        if self.factorization.windows(2).any(|w| w[0].prime >= w[1].prime)
            || self.factorization.iter().any(|pp| pp.exp == 0)
        {
            return Err(Error::InvalidCertificate(
                "factorization must list distinct primes in ascending order".into(),
            ));
        }
        if let Some(pp) = self.factorization.iter().find(|pp| !is_prime(&pp.prime)) {
            return Err(Error::InvalidCertificate(format!(
                "{} in the factorization is not prime",
                pp.prime
            )));
        }
        if self.excluded_primes != fz.primes() {
            return Err(Error::InvalidCertificate(
                "excluded primes differ from the primes of the factorization".into(),
            ));
        }
        Ok(())
    }

    /// `verify` plus a fresh extraction of the coefficient.
    pub fn verify_with_recompute(&self, opts: ExtractOptions) -> Result<()> {
        self.verify()?;
        let sys = FactorSystem::build(self.family())?;
        let fresh = coefficient(&sys, &self.monomial, opts)?;
        if fresh != self.coefficient {
            return Err(Error::InvalidCertificate(format!(
                "recorded coefficient {} but extraction gives {fresh}",
                self.coefficient
            )));
        }
        Ok(())
    }

    pub fn factored(&self) -> String {
        Factorization {
            sign: if self.coefficient.is_negative() { -1 } else { 1 },
            factors: self.factorization.clone(),
        }
        .to_factored_string()
    }
}

fn check_monomial(sys: &FactorSystem, ell: usize, monomial: &Monomial) -> Result<()> {
    if monomial.len() != ell {
        return Err(Error::precondition(format!(
            "monomial has {} exponents, expected ell = {ell}",
            monomial.len()
        )));
    }
    let limit = ell as u32 - 1;
    if let Some((index, &exponent)) = monomial
        .exponents()
        .iter()
        .enumerate()
        .find(|(_, &e)| e > limit)
    {
        return Err(Error::MonomialNotDividing {
            index,
            exponent,
            limit,
        });
    }
    if monomial.total_degree() != sys.degree() as u64 {
        return Err(Error::DegreeMismatch {
            monomial: monomial.total_degree(),
            system: sys.degree() as u64,
        });
    }
    Ok(())
}

/// Extract the coefficient and package it as a certificate.
///
/// Errors, in the order checked: the scope does not fit the parameters,
/// the monomial does not divide the bounding monomial, its degree differs
/// from the system's, the coefficient is zero.
pub fn make_certificate(
    variant: Variant,
    t: usize,
    ell: usize,
    scope: KScope,
    monomial: &Monomial,
    opts: ExtractOptions,
) -> Result<Certificate> {
    scope_applies(variant, t, ell, scope)?;
    let sys = FactorSystem::build(certificate_family(variant, t, ell, scope))?;
    check_monomial(&sys, ell, monomial)?;
    let value = coefficient(&sys, monomial, opts)?;
    certificate_from_parts(variant, t, ell, scope, monomial, &sys, value)
}

/// A certificate for an already known coefficient; everything except the
/// extraction itself is checked.
pub fn certificate_with_coefficient(
    variant: Variant,
    t: usize,
    ell: usize,
    scope: KScope,
    monomial: &Monomial,
    value: BigInt,
) -> Result<Certificate> {
    scope_applies(variant, t, ell, scope)?;
    let sys = FactorSystem::build(certificate_family(variant, t, ell, scope))?;
    check_monomial(&sys, ell, monomial)?;
    certificate_from_parts(variant, t, ell, scope, monomial, &sys, value)
}

fn certificate_from_parts(
    variant: Variant,
    t: usize,
    ell: usize,
    scope: KScope,
    monomial: &Monomial,
    sys: &FactorSystem,
    value: BigInt,
) -> Result<Certificate> {
    if value.is_zero() {
        return Err(Error::ZeroCoefficient);
    }
    let fz = factorize(&value)?;
    Ok(Certificate {
        variant,
        t,
        ell,
        k_scope: scope,
        monomial: monomial.clone(),
        degree: sys.degree(),
        coefficient: value,
        excluded_primes: fz.primes(),
        factorization: fz.factors,
        primality_method: PRIMALITY_METHOD.to_string(),
    })
}

/// Certificates are stored either as a JSON array or one object per line.
pub fn parse_certificates(text: &str) -> Result<Vec<Certificate>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

pub(crate) mod decimal_bigint {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

pub(crate) mod decimal_biguint {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

pub(crate) mod decimal_biguint_vec {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| {
                s.parse()
                    .map_err(|_| D::Error::custom(format!("not a decimal integer: {s:?}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(v: &[u32]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn applicability_examples() {
        assert!(check_applicability(Variant::Main, 16, 6, 11));
        assert!(!check_applicability(Variant::Main, 15, 6, 11));
        assert!(check_applicability(Variant::Cmpp, 17, 7, 11));
        assert!(!check_applicability(Variant::Main, 17, 7, 11));
        assert!(!check_applicability(Variant::Cmpp, 16, 7, 11));
    }

    #[test]
    fn universal_t2_certificate() {
        let c = make_certificate(
            Variant::Main,
            2,
            3,
            KScope::AtLeast(4),
            &mono(&[2, 2, 2]),
            ExtractOptions::default(),
        )
        .unwrap();
        assert_eq!(c.coefficient, BigInt::from(-1));
        assert!(c.excluded_primes.is_empty());
        assert!(c.factorization.is_empty());
        c.verify().unwrap();
        c.verify_with_recompute(ExtractOptions::default()).unwrap();
    }

    #[test]
    fn errors_are_distinct() {
        let opts = ExtractOptions::default();
        let err = make_certificate(Variant::Main, 2, 3, KScope::AtLeast(4), &mono(&[3, 2, 1]), opts)
            .unwrap_err();
        assert!(matches!(err, Error::MonomialNotDividing { index: 0, .. }));
        let err = make_certificate(Variant::Main, 2, 3, KScope::AtLeast(4), &mono(&[2, 2, 1]), opts)
            .unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch { monomial: 5, system: 6 }));
        let err = make_certificate(Variant::Main, 2, 3, KScope::AtLeast(3), &mono(&[2, 2, 2]), opts)
            .unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
    }

    /// Some bounding-degree monomial of a small `Q` with zero coefficient.
    fn zero_target() -> (usize, usize, Monomial) {
        for (t, ell) in [(2, 4), (2, 5), (3, 5)] {
            let sys = FactorSystem::build(Family::Q { t, ell }).unwrap();
            let deg = sys.degree() as u32;
            let top = ell as u32 - 1;
            let mut exps = vec![0u32; ell];
            loop {
                if exps.iter().sum::<u32>() == deg {
                    let m = Monomial(exps.clone());
                    if coefficient(&sys, &m, ExtractOptions::default()).unwrap().is_zero() {
                        return (t, ell, m);
                    }
                }
                let Some(pos) = exps.iter().position(|&e| e < top) else { break };
                exps[pos] += 1;
                exps[..pos].iter_mut().for_each(|e| *e = 0);
            }
        }
        panic!("no zero coefficient among the small systems");
    }

    #[test]
    fn zero_coefficient_reported() {
        let (t, ell, m) = zero_target();
        let scope = KScope::AtLeast(ell + t - 1);
        let err = make_certificate(Variant::Main, t, ell, scope, &m, ExtractOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::ZeroCoefficient), "{err}");
        let err = certificate_with_coefficient(
            Variant::Main,
            2,
            3,
            KScope::AtLeast(4),
            &mono(&[2, 2, 2]),
            BigInt::zero(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ZeroCoefficient));
    }

    #[test]
    fn json_roundtrip_and_tamper_detection() {
        let c = make_certificate(
            Variant::Main,
            2,
            3,
            KScope::AtLeast(4),
            &mono(&[2, 2, 2]),
            ExtractOptions::default(),
        )
        .unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains(r#""k_scope":{"type":"at_least","value":4}"#));
        assert!(json.contains(r#""coefficient":"-1""#));
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);

        let mut bad = c.clone();
        bad.coefficient = BigInt::from(-2);
        assert!(bad.verify().is_err());
        let mut bad = c.clone();
        bad.degree += 1;
        assert!(bad.verify().is_err());
        let mut bad = c;
        bad.coefficient = BigInt::from(-1);
        bad.factorization.push(PrimePower {
            prime: BigUint::from(4u32),
            exp: 1,
        });
        assert!(bad.verify().is_err());
    }

    #[test]
    fn scope_parse() {
        assert_eq!("16".parse::<KScope>().unwrap(), KScope::Exact(16));
        assert_eq!(">=17".parse::<KScope>().unwrap(), KScope::AtLeast(17));
        assert_eq!("17+".parse::<KScope>().unwrap(), KScope::AtLeast(17));
        assert!("x".parse::<KScope>().is_err());
    }

    #[test]
    fn certificates_file_formats() {
        let c = make_certificate(
            Variant::Main,
            2,
            3,
            KScope::AtLeast(4),
            &mono(&[2, 2, 2]),
            ExtractOptions::default(),
        )
        .unwrap();
        let array = serde_json::to_string(&vec![c.clone(), c.clone()]).unwrap();
        assert_eq!(parse_certificates(&array).unwrap().len(), 2);
        let lines = format!(
            "{}\n\n{}\n",
            serde_json::to_string(&c).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
        assert_eq!(parse_certificates(&lines).unwrap().len(), 2);
    }
}
