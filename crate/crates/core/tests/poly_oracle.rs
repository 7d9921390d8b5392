mod common;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weakseq::poly::{
    coefficient, coefficient_baseline, coefficient_baseline_with_order, coefficient_oracle,
    coefficient_vandermonde, Algorithm, ExtractOptions, Family, FactorSystem, FamilyKind,
    Monomial, DEFAULT_MEMORY_CAP, DEFAULT_ORACLE_ENTRIES,
};

fn opts(algorithm: Algorithm) -> ExtractOptions {
    ExtractOptions {
        algorithm,
        memory_cap: DEFAULT_MEMORY_CAP,
    }
}

#[test]
fn all_algorithms_match_expansion_on_small_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut per_kind = std::collections::HashMap::<FamilyKind, usize>::new();
    let mut nonzero = 0;
    let families = common::small_families(5);
    let mut instances = std::collections::HashMap::<FamilyKind, usize>::new();
    for f in &families {
        *instances.entry(f.kind()).or_default() += 1;
    }
    for &family in &families {
        let sys = FactorSystem::build(family).unwrap();
        let full = common::expand(&sys);
        let count = 12.max(130 / instances[&family.kind()]);
        let mut targets = common::targets(&mut rng, &sys, count);
        // Include some monomials known to occur.
        let mut present: Vec<_> = full.keys().cloned().collect();
        present.sort();
        targets.extend(present.choose_multiple(&mut rng, 4).cloned().map(Monomial));
        for target in &targets {
            let expected = full.get(target.exponents()).copied().unwrap_or(0);
            nonzero += usize::from(expected != 0);
            let base = coefficient_baseline(&sys, target, DEFAULT_MEMORY_CAP).unwrap();
            assert_eq!(base, expected.into(), "{family} {target}");
            let auto = coefficient(&sys, target, opts(Algorithm::Auto)).unwrap();
            assert_eq!(auto, expected.into(), "{family} {target}");
            if let Some(v) = coefficient_vandermonde(&sys, target, DEFAULT_MEMORY_CAP).unwrap() {
                assert_eq!(v, expected.into(), "{family} {target}");
            }
        }
        *per_kind.entry(family.kind()).or_default() += targets.len();
        if sys.degree() <= 12 {
            let t = &targets[0];
            let o = coefficient_oracle(&sys, t, DEFAULT_ORACLE_ENTRIES).unwrap();
            assert_eq!(o, full.get(t.exponents()).copied().unwrap_or(0).into());
        }
    }
    for kind in FamilyKind::ALL {
        assert!(per_kind[&kind] >= 100, "{kind}: {}", per_kind[&kind]);
    }
    assert!(nonzero > 500, "too few nonzero targets ({nonzero}) to be meaningful");
}

#[test]
fn q_2_3_known_value() {
    let sys = FactorSystem::build(Family::Q { t: 2, ell: 3 }).unwrap();
    let target = Monomial(vec![2, 2, 2]);
    for alg in [Algorithm::Auto, Algorithm::Baseline, Algorithm::Vandermonde] {
        assert_eq!(coefficient(&sys, &target, opts(alg)).unwrap(), (-1).into());
    }
    assert_eq!(common::expand(&sys)[&vec![2, 2, 2]], -1);
}

/// Monomials shaped like the certificates: the last variables saturated at
/// `ell - 1`, the first few carrying the remainder.
fn certificate_like(rng: &mut ChaCha8Rng, ell: usize, degree: usize) -> Option<Monomial> {
    let top = (ell - 1) as u32;
    let mut e = vec![top; ell];
    let mut excess = (ell * (ell - 1)).checked_sub(degree)?;
    while excess > 0 {
        let front = if e[..ell.min(3)].iter().any(|&x| x > 0) { ell.min(3) } else { ell };
        let i = rng.gen_range(0..front);
        if e[i] > 0 {
            e[i] -= 1;
            excess -= 1;
        }
    }
    Some(Monomial(e))
}

use rand::Rng;

#[test]
fn vandermonde_path_matches_baseline_on_certificate_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for ell in 4..=8usize {
        for t in 2..=5usize {
            let mut fams = vec![Family::Q { t, ell }, Family::Qbar { t, ell }];
            for k in [ell + 1, ell + 3] {
                if t < k {
                    fams.push(Family::Htop { k, t, ell });
                    fams.push(Family::Hbartop { k, t, ell });
                }
            }
            for family in fams {
                let sys = FactorSystem::build(family).unwrap();
                for _ in 0..3 {
                    let Some(target) = certificate_like(&mut rng, ell, sys.degree()) else {
                        continue;
                    };
                    let fast = coefficient(&sys, &target, opts(Algorithm::Vandermonde)).unwrap();
                    let slow = coefficient(&sys, &target, opts(Algorithm::Baseline)).unwrap();
                    assert_eq!(fast, slow, "{family} {target}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn factor_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for family in [
        Family::P { k: 5, t: 3 },
        Family::Q { t: 3, ell: 5 },
        Family::Hbartop { k: 8, t: 4, ell: 5 },
    ] {
        let sys = FactorSystem::build(family).unwrap();
        let targets = common::targets(&mut rng, &sys, 10);
        let mut order: Vec<usize> = (0..sys.degree()).collect();
        for target in &targets {
            let reference = coefficient_baseline(&sys, target, DEFAULT_MEMORY_CAP).unwrap();
            for _ in 0..3 {
                order.shuffle(&mut rng);
                let c = coefficient_baseline_with_order(&sys, target, &order, DEFAULT_MEMORY_CAP)
                    .unwrap();
                assert_eq!(c, reference, "{family} {target} {order:?}");
            }
        }
    }
}

#[test]
fn memory_cap_is_enforced_not_ignored() {
    let sys = FactorSystem::build(Family::Q { t: 4, ell: 7 }).unwrap();
    let target = Monomial(vec![6; 7]);
    let target = Monomial({
        let mut e = target.0;
        let over = 42 - sys.degree() as u32;
        e[0] -= over.min(6);
        e[1] -= over.saturating_sub(6);
        e
    });
    let tiny = ExtractOptions {
        algorithm: Algorithm::Baseline,
        memory_cap: 256,
    };
    assert!(matches!(
        coefficient(&sys, &target, tiny),
        Err(weakseq::Error::ResourceLimit { .. })
    ));
    assert!(coefficient(&sys, &target, opts(Algorithm::Baseline)).is_ok());
}
