//! Random systems for sweeps and table/oracle cross-checks.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::Rng;

use crate::infinity::classify_infinity;
use crate::origin::classify_origin;
use crate::poly::{ratio, Poly, Rational};
use crate::system::GeneralizedLienardSystem;

/// Which end of the exponent windows the draw is meant to exercise.
#[derive(Debug, Clone)]
pub enum Target {
    /// Lowest exponents up to `max_low`; higher terms are optional noise.
    Origin { max_low: u32 },
    /// `phi` degree drawn from `ells`, other degrees up to `max_high`.
    Infinity { ells: Vec<u32>, max_high: u32 },
}

fn coefficient<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.gen_range(1..=6i64);
    let d = rng.gen_range(1..=3i64);
    if rng.gen_bool(0.5) {
        ratio(n, d)
    } else {
        ratio(-n, d)
    }
}

fn window<R: Rng>(rng: &mut R, low: u32, high: u32) -> Poly {
    let mut p = Poly::monomial(coefficient(rng), low);
    if high != low {
        p.add_term(high, coefficient(rng));
        if high > low + 1 && rng.gen_bool(0.3) {
            p.add_term(rng.gen_range(low + 1..high), coefficient(rng));
        }
    }
    p
}

fn pick<R: Rng>(rng: &mut R, r: RangeInclusive<u32>) -> u32 {
    rng.gen_range(r)
}

/// A random system biased towards the resonant exponent families of the
/// decision tables.
pub fn random_system<R: Rng>(rng: &mut R, target: &Target) -> GeneralizedLienardSystem {
    match target {
        Target::Origin { max_low } => {
            let max_low = (*max_low).max(2);
            let p = pick(rng, 1..=max_low);
            let (q, r) = if rng.gen_bool(0.3) {
                // p(r+1) = q(p+1)
                let k = pick(rng, 1..=2);
                (k * p, k * (p + 1) - 1)
            } else {
                (pick(rng, 1..=max_low + 1), pick(rng, 1..=max_low + 1))
            };
            let extra = |rng: &mut R, low: u32| if rng.gen_bool(0.5) { low + pick(rng, 1..=2) } else { low };
            let (l, m, n) = (extra(rng, p), extra(rng, q), extra(rng, r));
            let phi = window(rng, p, l);
            let f = window(rng, q, m);
            let g = window(rng, r, n);
            GeneralizedLienardSystem::from_polys(phi, f, g).expect("valid windows")
        }
        Target::Infinity { ells, max_high } => {
            let l = ells[rng.gen_range(0..ells.len())];
            let max_high = (*max_high).max(l + 1);
            let (m, n) = if rng.gen_bool(0.25) {
                // l(n+1) = (l+1)m
                let k = pick(rng, 2..=4);
                (k * l, k * (l + 1) - 1)
            } else {
                (pick(rng, 1..=max_high), pick(rng, 1..=max_high))
            };
            let lower = |rng: &mut R, high: u32| if high > 1 && rng.gen_bool(0.5) { pick(rng, 1..=high - 1) } else { high };
            let (p, q, r) = (lower(rng, l), lower(rng, m), lower(rng, n));
            let phi = window(rng, p, l);
            let f = window(rng, q, m);
            let g = window(rng, r, n);
            GeneralizedLienardSystem::from_polys(phi, f, g).expect("valid windows")
        }
    }
}

/// Origin table row reached by a system: subcase, situation and portrait.
pub fn origin_row(sys: &GeneralizedLienardSystem) -> Option<String> {
    let c = classify_origin(sys).ok()?;
    let situation = c.case_label.situation.map(|s| format!(" {}", s)).unwrap_or_default();
    Some(format!("{}{} -> {}", c.case_label.subcase, situation, c.portrait))
}

/// Equator table row reached by a system: case, sub-branch, situation and
/// portrait (which separates threshold sub-rows).
pub fn infinity_row(sys: &GeneralizedLienardSystem) -> Option<String> {
    let c = classify_infinity(sys).ok()?;
    Some(format!("{} {} -> {}", c.case_label, c.situation, c.portrait))
}

/// Draw until every row seen has `per_row` members or the attempts run out.
pub fn stratified<R, K, G, F>(
    rng: &mut R,
    per_row: usize,
    attempts: usize,
    mut generate: G,
    key: F,
) -> BTreeMap<K, Vec<GeneralizedLienardSystem>>
where
    R: Rng,
    K: Ord,
    G: FnMut(&mut R) -> GeneralizedLienardSystem,
    F: Fn(&GeneralizedLienardSystem) -> Option<K>,
{
    let mut rows: BTreeMap<K, Vec<GeneralizedLienardSystem>> = BTreeMap::new();
    for _ in 0..attempts {
        let sys = generate(rng);
        let Some(k) = key(&sys) else { continue };
        let bucket = rows.entry(k).or_default();
        if bucket.len() < per_row {
            bucket.push(sys);
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_respect_ell_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = Target::Infinity { ells: vec![3, 5], max_high: 9 };
        for _ in 0..200 {
            let s = random_system(&mut rng, &t);
            assert!([3, 5].contains(&s.exponents().phi_high));
        }
    }

    #[test]
    fn stratified_caps_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = Target::Origin { max_low: 4 };
        let rows = stratified(&mut rng, 5, 500, |r| random_system(r, &t), origin_row);
        assert!(rows.len() > 10);
        assert!(rows.values().all(|v| v.len() <= 5));
    }
}
