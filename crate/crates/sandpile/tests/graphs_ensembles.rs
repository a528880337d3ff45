use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use sandpile::ensembles::{sample_symmetric, EnsembleSpec, EntryDistribution, Weight};
use sandpile::graphs::{laplacian, sample_er, sandpile_with_pairing, spanning_tree_count, ErParams, Graph};

#[test]
fn sandpile_order_is_the_tree_count() {
    for seed in 0..200u64 {
        let n = 2 + (seed % 9) as usize;
        let g = sample_er(&ErParams { n, q: 0.35, seed });
        let sp = sandpile_with_pairing(&g).unwrap();
        let trees = spanning_tree_count(&g);
        if g.is_connected() {
            assert_eq!(sp.torsion.group().order(), trees, "{g}");
            assert_eq!(sp.free_rank, 1);
        } else {
            assert!(trees.is_zero());
            assert_eq!(sp.free_rank, g.component_count());
        }
        assert!(sp.torsion.perfect, "{g}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn laplacian_columns_sum_to_zero(n in 1usize..12, q in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = sample_er(&ErParams { n, q, seed });
        let l = laplacian(&g);
        prop_assert!(l.is_symmetric());
        for j in 0..n {
            prop_assert!(l.column(j).iter().sum::<num_bigint::BigInt>().is_zero());
        }
    }

    #[test]
    fn graph_text_round_trips(n in 1usize..10, q in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = sample_er(&ErParams { n, q, seed });
        let back: Graph = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn samples_are_symmetric(n in 1usize..8, a in 2u64..12, seed in any::<u64>(), trial in 0u64..1000) {
        let spec = EnsembleSpec::uniform_mod(n, a, seed);
        let m = sample_symmetric(&spec, trial).unwrap();
        prop_assert!(m.is_symmetric());
        prop_assert_eq!(sample_symmetric(&spec, trial).unwrap(), m);
    }
}

#[test]
fn complete_graph_trees() {
    // Cayley: n^(n-2)
    for n in 2..9u32 {
        assert_eq!(spanning_tree_count(&Graph::complete(n as usize)), BigUint::from(n).pow(n - 2));
    }
}

#[test]
fn entry_marginals_within_four_sigma() {
    let dist = EntryDistribution::new(vec![-1, 0, 2, 5], vec![Weight::new(1, 8), Weight::new(1, 2), Weight::new(1, 4), Weight::new(1, 8)])
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws = 100_000u64;
    let mut counts: HashMap<i64, u64> = HashMap::new();
    for _ in 0..draws {
        *counts.entry(dist.sample(&mut rng)).or_default() += 1;
    }
    for (x, w) in dist.support.iter().zip(&dist.weights) {
        let p = w.to_f64().unwrap();
        let mean = p * draws as f64;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        let got = counts.get(x).copied().unwrap_or(0) as f64;
        assert!((got - mean).abs() <= 4.0 * sd, "value {x}: {got} vs {mean}");
    }
}

#[test]
fn ensemble_matrix_entries_follow_the_distribution() {
    let dist = EntryDistribution::new(vec![0, 1, 3], vec![Weight::new(1, 2), Weight::new(1, 3), Weight::new(1, 6)]).unwrap();
    let spec = EnsembleSpec::alpha_balanced(4, dist.clone(), Weight::new(1, 3), 2, 7);
    let mut counts: HashMap<i64, u64> = HashMap::new();
    let trials = 10_000u64;
    for t in 0..trials {
        let m = sample_symmetric(&spec, t).unwrap();
        *counts.entry(m.get(0, 2).to_i64().unwrap()).or_default() += 1;
    }
    for (x, w) in dist.support.iter().zip(&dist.weights) {
        let p = w.to_f64().unwrap();
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        let got = counts.get(x).copied().unwrap_or(0) as f64;
        assert!((got - p * trials as f64).abs() <= 4.0 * sd);
    }
}

/// Under simultaneous row and column permutation the law of the matrix is
/// unchanged: a two-sample homogeneity test for every permutation of 3.
#[test]
fn uniform_residues_are_exchangeable() {
    let spec = EnsembleSpec::uniform_mod(3, 2, 21);
    let perms = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
    let code = |m: &sandpile::linalg::IntMatrix, p: &[usize; 3]| -> usize {
        let mut c = 0;
        for i in 0..3 {
            for j in i..3 {
                c = 2 * c + m.get(p[i], p[j]).to_usize().unwrap();
            }
        }
        c
    };
    let half = 20_000u64;
    for p in &perms[1..] {
        let mut a = [0f64; 64];
        let mut b = [0f64; 64];
        for t in 0..half {
            a[code(&sample_symmetric(&spec, t).unwrap(), &perms[0])] += 1.0;
            b[code(&sample_symmetric(&spec, half + t).unwrap(), p)] += 1.0;
        }
        let mut stat = 0.0;
        for k in 0..64 {
            let e = (a[k] + b[k]) / 2.0;
            if e > 0.0 {
                stat += (a[k] - e).powi(2) / e + (b[k] - e).powi(2) / e;
            }
        }
        let pv = ChiSquared::new(63.0).unwrap().sf(stat);
        assert!(pv > 1e-3, "permutation {p:?}: p = {pv}");
    }
}
