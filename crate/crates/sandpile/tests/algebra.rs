use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sandpile::classify::{aut_preserving_count, pair_isomorphic, Classifier};
use sandpile::groups::{count_homs, count_surjections, enumerate_automorphisms, FinAbGroup};
use sandpile::linalg::{smith_normal_form, solve_scaled_membership, IntMatrix};
use sandpile::moments::count_sur_star_pushforward;
use sandpile::pairings::{all_grams, inverse_form_gram, kernel_basis, pairing_from_lifts, torsion_pairing, PairedGroup};
use sandpile::theory::groups_up_to;

fn symmetric(n: usize, upper: &[i64]) -> IntMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            rows[i][j] = upper[k];
            rows[j][i] = upper[k];
            k += 1;
        }
    }
    IntMatrix::from_rows(&rows).unwrap()
}

fn sym_matrix(max_n: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-bound..=bound, n * (n + 1) / 2).prop_map(move |u| symmetric(n, &u))
    })
}

fn any_matrix() -> impl Strategy<Value = IntMatrix> {
    (1..=5usize, 1..=5usize).prop_flat_map(|(r, c)| {
        prop::collection::vec(-6i64..=6, r * c).prop_map(move |v| {
            IntMatrix::from_rows(&v.chunks(c).map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
        })
    })
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.determinant().unwrap().abs().is_one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(m in any_matrix()) {
        let s = smith_normal_form(&m);
        let (u, v) = (s.u.as_ref().unwrap(), s.v.as_ref().unwrap());
        prop_assert_eq!(u.mul(&m).unwrap().mul(v).unwrap(), s.diagonal_matrix());
        prop_assert!(is_unimodular(u) && is_unimodular(v));
        let nonzero: Vec<&BigInt> = s.d.iter().filter(|x| !x.is_zero()).collect();
        prop_assert!(s.d.iter().all(|x| !x.is_negative()));
        prop_assert!(nonzero.windows(2).all(|w| (w[1] % w[0]).is_zero()));
        prop_assert!(s.d.iter().skip_while(|x| !x.is_zero()).all(|x| x.is_zero()));
    }

    #[test]
    fn scaled_membership_round_trip(m in sym_matrix(5, 4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = m.rows();
        // a target in the rational column span, divided down so that k > 1
        // is exercised
        let w: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
        let mw = m.mul_vec(&w).unwrap();
        let g = mw.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let t: Vec<BigInt> = if g.is_zero() { mw } else { mw.iter().map(|x| x / &g).collect() };
        let (k, s) = solve_scaled_membership(&m, &t).unwrap();
        prop_assert!(k.is_positive());
        let ks: Vec<BigInt> = t.iter().map(|x| x * &k).collect();
        prop_assert_eq!(m.mul_vec(&s).unwrap(), ks);
    }

    #[test]
    fn torsion_pairing_is_a_perfect_symmetric_pairing(m in sym_matrix(5, 4)) {
        let tp = torsion_pairing(&m).unwrap();
        for a in 0..tp.gram.len() {
            for b in 0..tp.gram.len() {
                prop_assert_eq!(&tp.gram[a][b], &tp.gram[b][a]);
                // killed by both generator orders
                let scaled = tp.gram[a][b].as_rational() * BigInt::from(tp.invariants[a].clone());
                prop_assert!(scaled.is_integer());
            }
        }
        let pg = tp.paired_group().unwrap();
        prop_assert!(pg.perfect);
        prop_assert_eq!(BigInt::from(pg.group().order()), tp.order());
    }

    #[test]
    fn torsion_pairing_does_not_depend_on_lifts(m in sym_matrix(5, 4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tp = torsion_pairing(&m).unwrap();
        let n = m.rows();
        let ker = kernel_basis(&m);
        let mut choose = |t: &[BigInt]| {
            // another representative of the class of t, then a scaled solution
            // shifted by the kernel
            let w: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect();
            let shift = m.mul_vec(&w).unwrap();
            let t2: Vec<BigInt> = t.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let (k, s) = solve_scaled_membership(&m, &t2).unwrap();
            let c = BigInt::from(rng.gen_range(1..=3));
            let mut s: Vec<BigInt> = s.iter().map(|x| x * &c).collect();
            for kv in &ker {
                let z = BigInt::from(rng.gen_range(-2..=2));
                for (x, y) in s.iter_mut().zip(kv) {
                    *x += &z * y;
                }
            }
            (k * c, s)
        };
        let picks: Vec<(BigInt, Vec<BigInt>)> = tp.lifts.iter().map(|t| choose(t)).collect();
        for a in 0..picks.len() {
            for b in 0..picks.len() {
                let q = pairing_from_lifts(&m, &picks[a].0, &picks[a].1, &picks[b].0, &picks[b].1);
                prop_assert_eq!(&q, &tp.gram[a][b]);
            }
        }
    }

    #[test]
    fn pairing_is_the_inverse_form_on_lifts(m in sym_matrix(4, 4)) {
        prop_assume!(!m.determinant().unwrap().is_zero());
        let tp = torsion_pairing(&m).unwrap();
        prop_assert_eq!(inverse_form_gram(&m, &tp.lifts).unwrap(), tp.gram);
    }
}

#[test]
fn hom_counts_match_brute_force() {
    let groups = groups_up_to(&[2, 3, 5, 7], 64);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let a = &groups[rng.gen_range(0..groups.len())];
        let b = &groups[rng.gen_range(0..groups.len())];
        // each generator of a goes to an element killed by its order
        let brute: u64 = a
            .gens()
            .iter()
            .map(|g| b.elements().filter(|x| b.scale(g.order, x) == b.zero()).count() as u64)
            .product();
        assert_eq!(count_homs(a, b), BigUint::from(brute), "{a} -> {b}");
    }
}

/// `#Sur(A, B)` by Moebius inversion of `#Hom(A, H)` over the lattice of
/// subgroups `H` of `B`, with subgroups as bitmasks over the elements.
fn surjections_by_inclusion_exclusion(a: &FinAbGroup, b: &FinAbGroup) -> i64 {
    let elems: Vec<Vec<u64>> = b.elements().collect();
    let index = |x: &Vec<u64>| elems.iter().position(|y| y == x).unwrap();
    let closure = |mask: u64, x: usize| -> u64 {
        let mut m = mask | 1 << index(&b.zero());
        loop {
            let mut next = m | 1 << x;
            for i in 0..elems.len() {
                for j in 0..elems.len() {
                    if next >> i & 1 == 1 && next >> j & 1 == 1 {
                        next |= 1 << index(&b.add(&elems[i], &elems[j]));
                    }
                }
            }
            if next == m {
                return m;
            }
            m = next;
        }
    };
    let mut subgroups = vec![closure(0, index(&b.zero()))];
    let mut k = 0;
    while k < subgroups.len() {
        for x in 0..elems.len() {
            let h = closure(subgroups[k], x);
            if !subgroups.contains(&h) {
                subgroups.push(h);
            }
        }
        k += 1;
    }
    let homs_into = |h: u64| -> i64 {
        a.gens()
            .iter()
            .map(|g| (0..elems.len()).filter(|&i| h >> i & 1 == 1 && b.scale(g.order, &elems[i]) == b.zero()).count() as i64)
            .product()
    };
    // mu(H, B), largest subgroups first
    subgroups.sort_by_key(|h| std::cmp::Reverse(h.count_ones()));
    let mut mu: Vec<i64> = Vec::with_capacity(subgroups.len());
    for (i, &h) in subgroups.iter().enumerate() {
        let above: i64 = (0..i).filter(|&j| subgroups[j] & h == h && subgroups[j] != h).map(|j| mu[j]).sum();
        mu.push(if i == 0 { 1 } else { -above });
    }
    subgroups.iter().zip(&mu).map(|(&h, &m)| m * homs_into(h)).sum()
}

#[test]
fn surjection_counts_match_inclusion_exclusion() {
    let groups = groups_up_to(&[2, 3], 32);
    for a in &groups {
        for b in &groups {
            if count_homs(a, b) > BigUint::from(1u32 << 16) {
                continue;
            }
            let direct = count_surjections(a, b, 1 << 16).unwrap();
            assert_eq!(direct as i64, surjections_by_inclusion_exclusion(a, b), "{a} -> {b}");
        }
    }
}

#[test]
fn automorphisms_are_closed_under_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for text in ["Z/4+Z/2", "Z/2+Z/2+Z/2", "Z/9+Z/3", "Z/8+Z/2+Z/3"] {
        let g: FinAbGroup = text.parse().unwrap();
        let auts = enumerate_automorphisms(&g, 1 << 20).unwrap();
        for _ in 0..50 {
            let x = &auts[rng.gen_range(0..auts.len())];
            let y = &auts[rng.gen_range(0..auts.len())];
            let z = x.then(y).unwrap();
            assert!(z.is_bijective());
            assert!(auts.contains(&z));
        }
    }
}

fn pool() -> Vec<PairedGroup> {
    let mut out = Vec::new();
    for g in groups_up_to(&[2, 3], 16) {
        for gram in all_grams(&g) {
            out.push(PairedGroup::new(gram));
        }
    }
    out
}

#[test]
fn pair_isomorphism_is_an_equivalence() {
    let all = pool();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pick: Vec<&PairedGroup> = (0..60).map(|_| &all[rng.gen_range(0..all.len())]).collect();
    for a in &pick {
        assert!(pair_isomorphic(a, a).unwrap());
        for b in &pick {
            let ab = pair_isomorphic(a, b).unwrap();
            assert_eq!(ab, pair_isomorphic(b, a).unwrap());
            if ab {
                for c in &pick {
                    if pair_isomorphic(b, c).unwrap() {
                        assert!(pair_isomorphic(a, c).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn orbit_times_stabilizer_is_aut() {
    let cls = Classifier::default();
    for g in groups_up_to(&[2, 3], 16) {
        let grams = all_grams(&g);
        let aut = sandpile::groups::aut_order(&g);
        for delta in grams.iter().step_by(3) {
            let orbit = grams.iter().filter(|x| cls.isomorphic(x, delta).unwrap()).count();
            let stab = aut_preserving_count(delta, u64::MAX).unwrap();
            assert_eq!(BigUint::from(orbit) * stab, aut, "{delta}");
        }
    }
}

#[test]
fn surjections_split_by_pushed_pairing() {
    let groups = groups_up_to(&[2, 3], 16);
    for a in &groups {
        let sources: Vec<_> = all_grams(a).into_iter().filter(|x| x.is_perfect()).take(2).collect();
        for b in &groups {
            if count_homs(a, b) > BigUint::from(1u32 << 14) {
                continue;
            }
            let sur = count_surjections(a, b, 1 << 14).unwrap();
            for s in &sources {
                let split: u64 = all_grams(b).iter().map(|t| count_sur_star_pushforward(s, t, 1 << 14).unwrap()).sum();
                assert_eq!(split, sur, "{s} onto {b}");
            }
        }
    }
}

#[test]
fn trees_match_determinant_of_any_minor() {
    use sandpile::graphs::{laplacian, sample_er, spanning_tree_count, ErParams};
    for seed in 0..500u64 {
        let g = sample_er(&ErParams { n: 1 + (seed % 6) as usize, q: 0.6, seed });
        let l = laplacian(&g);
        let trees = spanning_tree_count(&g);
        let n = g.vertex_count();
        for r in 0..n {
            let det = l.minor(r, (r + 1) % n).determinant().unwrap().abs();
            if n > 1 {
                assert_eq!(det.to_biguint().unwrap(), trees);
            }
        }
        if g.is_connected() {
            let snf = smith_normal_form(&l);
            let prod: BigInt = snf.d.iter().filter(|x| !x.is_zero()).product();
            assert_eq!(prod.to_biguint().unwrap(), trees, "{g}");
            assert_eq!(snf.free_rank(), 1);
        }
        assert!(trees.to_u64().is_some());
    }
}
