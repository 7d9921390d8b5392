//! Integer factorization for certificate coefficients.
//!
//! Trial division by small primes, then Brent's variant of Pollard rho on
//! what is left. Primality is decided by Miller-Rabin: deterministic below
//! 2^64 with the first twelve prime bases, and a strong probable prime test
//! to the first twenty prime bases above.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PRIMALITY_METHOD: &str =
    "miller-rabin: deterministic below 2^64 (bases 2..37), strong probable prime to the first 20 prime bases above";

const SMALL_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const LARGE_BASES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];
const TRIAL_LIMIT: u64 = 10_000;

/// Default number of rho iterations allowed over a whole factorization.
pub const DEFAULT_RHO_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::certify::decimal_biguint")]
    pub prime: BigUint,
    pub exp: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// -1, 0 or 1.
    pub sign: i8,
    /// Ascending by prime.
    pub factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn product(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, pp| {
            acc * num_traits::pow(pp.prime.clone(), pp.exp as usize)
        })
    }

    pub fn primes(&self) -> Vec<BigUint> {
        self.factors.iter().map(|pp| pp.prime.clone()).collect()
    }

    /// `-2^2*3*401*1305987719053`; a unit prints as `1` or `-1`.
    pub fn to_factored_string(&self) -> String {
        let body = if self.factors.is_empty() {
            "1".to_string()
        } else {
            self.factors
                .iter()
                .map(|pp| {
                    if pp.exp == 1 {
                        pp.prime.to_string()
                    } else {
                        format!("{}^{}", pp.prime, pp.exp)
                    }
                })
                .collect::<Vec<_>>()
                .join("*")
        };
        match self.sign {
            -1 => format!("-{body}"),
            0 => "0".to_string(),
            _ => body,
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn strong_probable_prime_big(n: &BigUint, a: u64) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut x = BigUint::from(a).modpow(&d, n);
    if x == one || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return false;
        }
        for p in SMALL_BASES {
            if small == p {
                return true;
            }
            if small % p == 0 {
                return false;
            }
        }
        return SMALL_BASES.iter().all(|&a| strong_probable_prime_u64(small, a));
    }
    if n.is_even() {
        return false;
    }
    LARGE_BASES.iter().all(|&a| strong_probable_prime_big(n, a))
}

fn rho_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut x = y;
    let mut g = 1u64;
    let mut ys = y;
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
            *budget = budget.checked_sub(BATCH)?;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_big(n: &BigUint, c: u64, budget: &mut u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut x = y.clone();
    let mut g = BigUint::one();
    let mut ys = y.clone();
    const BATCH: u64 = 128;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BATCH;
            *budget = budget.checked_sub(BATCH)?;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// A nontrivial divisor of the odd composite `n`, or `None` once the budget
/// is gone.
fn split(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    for c in 1..64u64 {
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c, budget).map(BigUint::from),
            None => rho_big(n, c, budget),
        };
        if found.is_some() {
            return found;
        }
        if *budget == 0 {
            return None;
        }
    }
    None
}

/// Complete factorization of `|value|` together with its sign.
pub fn factorize(value: &BigInt) -> Result<Factorization> {
    factorize_with_budget(value, DEFAULT_RHO_BUDGET)
}

pub fn factorize_with_budget(value: &BigInt, rho_budget: u64) -> Result<Factorization> {
    let sign = match value.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    };
    if sign == 0 {
        return Err(Error::precondition("cannot factor zero"));
    }
    let mut n = value.magnitude().clone();
    let mut primes: Vec<BigUint> = Vec::new();

    let mut d = 2u64;
    while d < TRIAL_LIMIT {
        let bd = BigUint::from(d);
        while (&n % &bd).is_zero() {
            primes.push(bd.clone());
            n /= &bd;
        }
        if n.is_one() {
            break;
        }
        d += if d == 2 { 1 } else { 2 };
    }

    let mut budget = rho_budget;
    let mut stack = Vec::new();
    if !n.is_one() {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if is_prime(&m) {
            primes.push(m);
            continue;
        }
        match split(&m, &mut budget) {
            Some(f) => {
                let other = &m / &f;
                stack.push(f);
                stack.push(other);
            }
            None => return Err(Error::Unfactored(m.to_string())),
        }
    }
    primes.sort();
    let mut factors: Vec<PrimePower> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some(last) if last.prime == p => last.exp += 1,
            _ => factors.push(PrimePower { prime: p, exp: 1 }),
        }
    }
    Ok(Factorization { sign, factors })
}
