use std::collections::BTreeMap;

use qecm_core::random::seeded;
use qecm_core::scheme::{ce_keygen, fce_enc_with, fce_keygen, FConjugateScheme, PrfModel, Qecm};
use qecm_core::BitString;

/// Every bit position of `draws` keys is 1 about half the time (5 sigma).
fn assert_balanced(keys: &[BitString]) {
    let n = keys.len() as f64;
    let sigma = (n * 0.25).sqrt();
    for i in 0..keys[0].len() {
        let ones = keys.iter().filter(|k| k.bit(i)).count() as f64;
        assert!((ones - n / 2.0).abs() <= 5.0 * sigma, "position {i}: {ones} of {n}");
    }
}

#[test]
fn key_generators_are_uniform() {
    let mut rng = seeded(77);
    let (mut r, mut theta, mut s, mut phi) = (vec![], vec![], vec![], vec![]);
    for _ in 0..10_000 {
        let (a, b) = ce_keygen(6, &mut rng);
        r.push(a);
        theta.push(b);
        let (a, b) = fce_keygen(6, &mut rng);
        s.push(a);
        phi.push(b);
    }
    for keys in [&r, &theta, &s, &phi] {
        assert_balanced(keys);
    }
}

#[test]
fn keygen_is_reproducible() {
    assert_eq!(ce_keygen(8, &mut seeded(1)), ce_keygen(8, &mut seeded(1)));
    assert_eq!(fce_keygen(8, &mut seeded(2)), fce_keygen(8, &mut seeded(2)));
    assert_ne!(ce_keygen(8, &mut seeded(1)), ce_keygen(8, &mut seeded(3)));
}

#[test]
fn fce_classical_part_is_uniform_under_oracles() {
    let fce = FConjugateScheme::new(3, 2, PrfModel::Oracle { family_seed: 31, samples: 64 }).unwrap();
    let oracles: Vec<_> = (0..64).map(|i| fce.family_oracle(i).unwrap()).collect();
    for m in BitString::all(2) {
        let mut counts: BTreeMap<BitString, u32> = BTreeMap::new();
        let mut total = 0u32;
        for prf in &oracles {
            for theta in BitString::all(3) {
                for x in BitString::all(3) {
                    let ct = fce_enc_with(&theta, &m, prf, &x).unwrap();
                    *counts.entry(ct.classical).or_default() += 1;
                    total += 1;
                }
            }
        }
        let expected = total as f64 / 4.0;
        let sigma = (total as f64 * 0.25 * 0.75).sqrt();
        assert_eq!(counts.len(), 4);
        for (c, k) in counts {
            assert!((k as f64 - expected).abs() <= 4.0 * sigma, "m = {m}, c = {c}: {k} vs {expected}");
        }
    }
}

#[test]
fn fce_correct_at_lambda_8() {
    for model in [PrfModel::Qprf, PrfModel::Oracle { family_seed: 3, samples: 64 }] {
        let fce = FConjugateScheme::new(8, 4, model).unwrap();
        let mut rng = seeded(99);
        for _ in 0..1000 {
            let key = fce.key_gen(&mut rng).unwrap();
            let m = BitString::random(4, &mut rng);
            let ct = fce.encrypt(&key, &m, &mut rng).unwrap();
            let dist = fce.decrypt_distribution(&key, &ct).unwrap();
            assert!((dist[&m] - 1.0).abs() < 1e-9);
        }
    }
}
