//! Decision tables against the blow-up oracle on stratified random draws.

use lienard_core::blowup::{local_portrait_oracle, PlanarField};
use lienard_core::infinity::{classify_infinity, infinity_oracle};
use lienard_core::origin::classify_origin;
use lienard_core::sampling::{infinity_row, origin_row, random_system, stratified, Target};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PER_ROW: usize = 100;

#[test]
fn table_one_rows_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let target = Target::Origin { max_low: 6 };
    let rows = stratified(&mut rng, PER_ROW, 40_000, |r| random_system(r, &target), origin_row);
    let mut failures = Vec::new();
    for (row, systems) in &rows {
        for s in systems {
            let table = classify_origin(s).unwrap().portrait;
            let oracle = local_portrait_oracle(&PlanarField::from_system(s), 6).unwrap();
            let word = if oracle.monodromic { String::new() } else { oracle.word };
            if word != table.sector_word() {
                failures.push(format!("{}: {:?} gave {}", row, s, word));
            }
        }
        println!("{:40} {}", row, systems.len());
    }
    assert!(rows.len() >= 30, "only {} rows reached", rows.len());
    assert!(failures.is_empty(), "{:#?}", &failures[..failures.len().min(10)]);
}

#[test]
fn table_two_rows_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let target = Target::Infinity { ells: (2..=7).collect(), max_high: 12 };
    let rows = stratified(&mut rng, PER_ROW, 60_000, |r| random_system(r, &target), infinity_row);
    let mut failures = Vec::new();
    for (row, systems) in &rows {
        for s in systems {
            let table = classify_infinity(s).unwrap().portrait;
            let oracle = infinity_oracle(s).unwrap();
            if oracle.signature() != table.figure().signature {
                failures.push(format!("{}: {:?} gave {}", row, s, oracle.signature()));
            }
        }
        println!("{:60} {}", row, systems.len());
    }
    assert!(rows.len() >= 60, "only {} rows reached", rows.len());
    assert!(failures.is_empty(), "{:#?}", &failures[..failures.len().min(10)]);
}
