#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sandpile::groups::{FinAbGroup, MixedRadix};
use sandpile::linalg::IntMatrix;
use sandpile::moments::{
    congruence_check, count_sur_star_congruence, count_sur_star_pushforward, lifted_equation_check, tensor_dual_source,
    LiftSpace, DEFAULT_BUDGET,
};
use sandpile::pairings::all_grams;
use sandpile::theory::groups_up_to;

pub fn random_symmetric(n: usize, a: u64, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(0..a) as i64;
            rows[i][j] = x;
            rows[j][i] = x;
        }
    }
    IntMatrix::from_rows(&rows).unwrap()
}

/// Targets `G` of order at most `bound` whose exponent `b` has `b^2 | a`.
pub fn targets(a: u64, bound: u64) -> Vec<FinAbGroup> {
    let primes: Vec<u64> = sandpile::arith::factor_u64(a).into_iter().map(|x| x.0).collect();
    groups_up_to(&primes, bound).into_iter().filter(|g| a % (g.exponent() * g.exponent()) == 0).collect()
}

#[derive(Debug, Default)]
pub struct OracleTally {
    pub matrices: usize,
    pub comparisons: usize,
    pub disagreements: Vec<String>,
}

/// Compares the congruence count, the pushforward count on `cok(m) (x) Z/b`
/// and the sum of lifted checks over surjections, and the congruence and
/// lifted checks map by map, for `count` random matrices over `Z/a`.
pub fn oracle_equivalence(a: u64, count: usize, max_n: usize, seed: u64) -> OracleTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = OracleTally::default();
    let groups = targets(a, 9);
    for _ in 0..count {
        let n = rng.gen_range(1..=max_n);
        let m = random_symmetric(n, a, &mut rng);
        tally.matrices += 1;
        for g in &groups {
            let b = g.exponent();
            let source = tensor_dual_source(&m, b).unwrap();
            let space = LiftSpace::new(g);
            let ords = g.orders();
            let r = g.rank();
            // all maps Z^n -> G with one random lift each
            let maps: Vec<(Vec<Vec<u64>>, Vec<Vec<u64>>, bool)> = MixedRadix::new((0..r).flat_map(|i| vec![ords[i]; n]).collect())
                .map(|d| {
                    let f: Vec<Vec<u64>> = d.chunks(n.max(1)).take(r).map(|x| x.to_vec()).collect();
                    let lift = space.random_lift(&f, &mut rng);
                    let cols: Vec<Vec<u64>> = (0..n).map(|k| f.iter().map(|row| row[k]).collect()).collect();
                    let onto = g.generated_by(&cols);
                    (f, lift, onto)
                })
                .collect();
            for delta in all_grams(g) {
                let c1 = count_sur_star_congruence(&m, a, &delta, DEFAULT_BUDGET).unwrap();
                let c2 = count_sur_star_pushforward(&source, &delta, DEFAULT_BUDGET).unwrap();
                let big_a = space.pairing_element(&delta).unwrap();
                let mut c3 = 0u64;
                for (f, lift, onto) in &maps {
                    let lifted = r == 0 || lifted_equation_check(&m, a, f, lift, &space, &big_a).unwrap();
                    let direct = r == 0 || congruence_check(&m, a, f, &delta).unwrap();
                    tally.comparisons += 1;
                    if lifted != direct {
                        tally.disagreements.push(format!("{m} mod {a}, {delta}, F = {f:?}: lifted {lifted}, direct {direct}"));
                    }
                    c3 += (*onto && lifted) as u64;
                }
                if r == 0 {
                    c3 = 1;
                }
                tally.comparisons += 1;
                if c1 != c2 || c1 != c3 {
                    tally.disagreements.push(format!("{m} mod {a}, {delta}: congruence {c1}, pushforward {c2}, lifted {c3}"));
                }
            }
        }
    }
    tally
}
