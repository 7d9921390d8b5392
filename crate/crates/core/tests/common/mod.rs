//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use weakseq::poly::{Family, FactorSystem, Monomial};

/// Every family instance with at most `max_vars` variables and `t <= 5`.
pub fn small_families(max_vars: usize) -> Vec<Family> {
    let mut out = Vec::new();
    for k in 2..=max_vars {
        out.push(Family::F { k });
        for t in 1..k {
            out.push(Family::P { k, t });
            out.push(Family::Pbar { k, t });
        }
    }
    for ell in 1..=max_vars {
        for t in 2..=5 {
            out.push(Family::Q { t, ell });
            out.push(Family::Qbar { t, ell });
        }
        for k in ell + 1..=ell + 4 {
            for t in 1..k.min(6) {
                out.push(Family::Htop { k, t, ell });
                if t >= 2 {
                    out.push(Family::Hbartop { k, t, ell });
                }
            }
        }
    }
    out
}

/// Full expansion of the product with `i128` coefficients, written
/// independently of the library's extraction code.
pub fn expand(sys: &FactorSystem) -> HashMap<Vec<u32>, i128> {
    let nv = sys.num_vars();
    let mut poly: HashMap<Vec<u32>, i128> = HashMap::from([(vec![0; nv], 1)]);
    for f in sys.factors() {
        let mut next: HashMap<Vec<u32>, i128> = HashMap::new();
        for (e, c) in &poly {
            for &(v, a) in f.terms() {
                let mut e2 = e.clone();
                e2[v as usize] += 1;
                *next.entry(e2).or_insert(0) += c * a as i128;
            }
        }
        next.retain(|_, c| *c != 0);
        poly = next;
    }
    poly
}

/// Random exponent vector of the given total degree with entries at most
/// `cap`, filled one unit at a time.
pub fn random_target<R: Rng>(rng: &mut R, nv: usize, degree: usize, cap: u32) -> Option<Monomial> {
    if nv == 0 || degree > nv * cap as usize {
        return None;
    }
    let mut e = vec![0u32; nv];
    for _ in 0..degree {
        let open: Vec<usize> = (0..nv).filter(|&i| e[i] < cap).collect();
        let i = open[rng.gen_range(0..open.len())];
        e[i] += 1;
    }
    Some(Monomial(e))
}

/// Random targets of the system's degree: half near-balanced, half with a
/// loose cap.
pub fn targets<R: Rng>(rng: &mut R, sys: &FactorSystem, count: usize) -> Vec<Monomial> {
    let nv = sys.num_vars();
    let d = sys.degree();
    let tight = (d.div_ceil(nv) as u32).max(1);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let cap = if i % 2 == 0 { tight + 1 } else { d as u32 };
        if let Some(m) = random_target(rng, nv, d, cap) {
            out.push(m);
        }
    }
    out
}
