mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use num_bigint::BigUint;

use sandpile::groups::{count_homs, count_surjections, FinAbGroup};
use sandpile::moments::{count_sur_star_pushforward, lifted_equation_check, LiftSpace, DEFAULT_BUDGET};
use sandpile::pairings::{all_grams, PairingGram};
use sandpile::theory::groups_up_to;

#[test]
fn congruence_pushforward_and_lifted_counts_agree() {
    for (a, seed) in [(4, 1), (9, 2)] {
        let t = common::oracle_equivalence(a, 25, 3, seed);
        assert!(t.disagreements.is_empty(), "{:#?}", &t.disagreements[..t.disagreements.len().min(5)]);
        assert!(t.comparisons > 100);
    }
}

#[test]
fn lifted_check_ignores_the_choice_of_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (a, g) in [(4u64, "Z/2+Z/2"), (9, "Z/3")] {
        let g: FinAbGroup = g.parse().unwrap();
        let space = LiftSpace::new(&g);
        for _ in 0..20 {
            let n = 3;
            let m = common::random_symmetric(n, a, &mut rng);
            for delta in all_grams(&g) {
                let big_a = space.pairing_element(&delta).unwrap();
                let f: Vec<Vec<u64>> = g.orders().iter().map(|&o| (0..n as u64).map(|k| (k + o - 1) % o).collect()).collect();
                let first = lifted_equation_check(&m, a, &f, &space.random_lift(&f, &mut rng), &space, &big_a).unwrap();
                for _ in 0..10 {
                    let lift = space.random_lift(&f, &mut rng);
                    assert_eq!(lifted_equation_check(&m, a, &f, &lift, &space, &big_a).unwrap(), first);
                }
            }
        }
    }
}

#[test]
fn star_counts_partition_surjections() {
    let groups = groups_up_to(&[2, 3], 16);
    for a in &groups {
        let sources: Vec<PairingGram> = all_grams(a).into_iter().step_by(5).take(3).collect();
        for g in groups.iter().filter(|g| g.order() <= a.order() && count_homs(a, g) <= BigUint::from(256u32)) {
            let Ok(sur) = count_surjections(a, g, DEFAULT_BUDGET) else { continue };
            for s in &sources {
                let total: u64 = all_grams(g).iter().map(|d| count_sur_star_pushforward(s, d, DEFAULT_BUDGET).unwrap()).sum();
                assert_eq!(total, sur, "{s} onto {g}");
            }
        }
    }
}
