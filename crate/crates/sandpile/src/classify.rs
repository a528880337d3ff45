//! Isomorphism classes of groups with pairings.
//!
//! A pairing on a `p`-group of type `lambda` is coded as an integer: the upper
//! triangle of its gram, entry `(i, j)` scaled to `[0, p^lambda_j)`, read as a
//! mixed-radix number with the first entry most significant. Numeric order on
//! codes is lexicographic order on grams. The canonical representative of an
//! orbit under `Aut(G)` is the one with the smallest code, and orbits are
//! explored by breadth-first search over elementary automorphisms.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{self, ipow};
use crate::error::{Error, Result};
use crate::groups::{aut_order, enumerate_automorphisms, FinAbGroup};
use crate::pairings::{PairedGroup, PairingGram};

#[derive(Clone, Copy, Debug)]
enum Elementary {
    Scale(usize, u64),
    Transvect(usize, usize, u64),
    Swap(usize, usize),
}

/// Coding of symmetric grams on one `p`-group.
struct Block {
    p: u64,
    lambda: Vec<u32>,
    n: u64,
    radix: Vec<u64>,
    pos: Vec<(usize, usize)>,
    total: u64,
    moves: Vec<Elementary>,
}

impl Block {
    fn new(p: u64, lambda: &[u32]) -> Result<Self> {
        let r = lambda.len();
        let n = lambda.first().map_or(1, |&e| ipow(p, e));
        let mut radix = Vec::new();
        let mut pos = Vec::new();
        for i in 0..r {
            for j in i..r {
                radix.push(ipow(p, lambda[j]));
                pos.push((i, j));
            }
        }
        let total = radix
            .iter()
            .try_fold(1u64, |acc, &x| acc.checked_mul(x))
            .ok_or_else(|| Error::BudgetExceeded("symmetric gram space does not fit in 64 bits".into()))?;
        let mut moves = Vec::new();
        for i in 0..r {
            let order = ipow(p, lambda[i]);
            if p == 2 {
                if order > 2 {
                    moves.push(Elementary::Scale(i, order - 1));
                }
                if order > 4 {
                    moves.push(Elementary::Scale(i, 5));
                }
            } else {
                moves.push(Elementary::Scale(i, arith::primitive_root_mod_prime_power(p, order)));
            }
        }
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                let c = if lambda[j] <= lambda[i] { 1 } else { ipow(p, lambda[j] - lambda[i]) };
                moves.push(Elementary::Transvect(i, j, c));
                if i < j && lambda[i] == lambda[j] {
                    moves.push(Elementary::Swap(i, j));
                }
            }
        }
        Ok(Block { p, lambda: lambda.to_vec(), n, radix, pos, total, moves })
    }

    fn rank(&self) -> usize {
        self.lambda.len()
    }

    fn encode(&self, b: &[u64]) -> u64 {
        let r = self.rank();
        let mut code = 0u64;
        for (t, &(i, j)) in self.pos.iter().enumerate() {
            let s = b[i * r + j] / (self.n / self.radix[t]);
            code = code * self.radix[t] + s;
        }
        code
    }

    fn decode(&self, mut code: u64, b: &mut [u64]) {
        let r = self.rank();
        for t in (0..self.pos.len()).rev() {
            let s = code % self.radix[t];
            code /= self.radix[t];
            let (i, j) = self.pos[t];
            let v = s * (self.n / self.radix[t]);
            b[i * r + j] = v;
            b[j * r + i] = v;
        }
    }

    fn apply(&self, mv: Elementary, b: &mut [u64]) {
        let r = self.rank();
        let n = self.n;
        let mm = |a: u64, c: u64| arith::mul_mod(a, c, n);
        match mv {
            Elementary::Scale(i, u) => {
                for l in 0..r {
                    if l != i {
                        let v = mm(b[i * r + l], u);
                        b[i * r + l] = v;
                        b[l * r + i] = v;
                    }
                }
                b[i * r + i] = mm(b[i * r + i], mm(u, u));
            }
            Elementary::Transvect(i, j, c) => {
                let bii = (b[i * r + i] + mm(2 * c % n, b[i * r + j]) + mm(mm(c, c), b[j * r + j])) % n;
                for l in 0..r {
                    if l != i {
                        let v = (b[i * r + l] + mm(c, b[j * r + l])) % n;
                        b[i * r + l] = v;
                        b[l * r + i] = v;
                    }
                }
                b[i * r + i] = bii;
            }
            Elementary::Swap(i, j) => {
                for l in 0..r {
                    b.swap(i * r + l, j * r + l);
                }
                for l in 0..r {
                    b.swap(l * r + i, l * r + j);
                }
            }
        }
    }

    fn is_perfect(&self, b: &[u64]) -> bool {
        let r = self.rank();
        let rows: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let ord = ipow(self.p, self.lambda[j]);
                        b[i * r + j] * ord / self.n % ord % self.p
                    })
                    .collect()
            })
            .collect();
        arith::rank_mod_p(&rows, self.p) == r
    }

    /// Visits the orbit of `code`, returning `(min code, orbit size)`.
    fn orbit(&self, code: u64, budget: u64, seen: &mut dyn Visited) -> Result<(u64, u64)> {
        let r = self.rank();
        let mut b = vec![0u64; r * r];
        let mut queue = VecDeque::from([code]);
        seen.insert(code);
        let (mut min, mut size) = (code, 1u64);
        while let Some(c) = queue.pop_front() {
            for &mv in &self.moves {
                self.decode(c, &mut b);
                self.apply(mv, &mut b);
                let d = self.encode(&b);
                if seen.insert(d) {
                    size += 1;
                    if size > budget {
                        return Err(Error::BudgetExceeded(format!("orbit larger than {budget}")));
                    }
                    min = min.min(d);
                    queue.push_back(d);
                }
            }
        }
        Ok((min, size))
    }
}

trait Visited {
    fn insert(&mut self, x: u64) -> bool;
}

struct Bits(Vec<u64>);

impl Visited for Bits {
    fn insert(&mut self, x: u64) -> bool {
        let (w, b) = ((x / 64) as usize, x % 64);
        let fresh = self.0[w] >> b & 1 == 0;
        self.0[w] |= 1 << b;
        fresh
    }
}

impl Visited for HashSet<u64> {
    fn insert(&mut self, x: u64) -> bool {
        HashSet::insert(self, x)
    }
}

const BITSET_LIMIT: u64 = 1 << 28;

/// A class of groups with pairing: the canonical representative and a
/// stable hash of its text form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairClassId {
    pub text: String,
    pub hash: String,
}

impl PairClassId {
    fn from_canonical(g: &PairingGram) -> Self {
        let text = g.to_string();
        let digest = Sha256::digest(text.as_bytes());
        let hash = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        PairClassId { text, hash }
    }

    pub fn paired_group(&self) -> PairedGroup {
        self.text.parse().expect("canonical text parses")
    }
}

impl fmt::Display for PairClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A canonical form together with the size of its orbit under `Aut(G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingClass {
    pub id: PairClassId,
    pub canonical: PairingGram,
    pub orbit_size: BigUint,
    /// `|Aut(G, delta)|`.
    pub automorphisms: BigUint,
}

/// Canonicalizes pairings, caching per-prime results.
pub struct Classifier {
    budget: u64,
    cache: Mutex<HashMap<PairingGram, (PairingGram, u64)>>,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier::new(1 << 24)
    }
}

impl Classifier {
    /// `budget` bounds the size of any orbit explored.
    pub fn new(budget: u64) -> Self {
        Classifier { budget, cache: Mutex::new(HashMap::new()) }
    }

    fn canonical_block(&self, g: &PairingGram) -> Result<(PairingGram, u64)> {
        if let Some(hit) = self.cache.lock().unwrap().get(g) {
            return Ok(hit.clone());
        }
        let p = g.group().primes()[0];
        let block = Block::new(p, &g.group().p_type(p))?;
        let code = block.encode(g.numerators());
        let (min, size) = if block.total <= BITSET_LIMIT {
            let mut seen = Bits(vec![0; block.total.div_ceil(64) as usize]);
            block.orbit(code, self.budget, &mut seen)?
        } else {
            let mut seen = HashSet::new();
            block.orbit(code, self.budget, &mut seen)?
        };
        let mut b = vec![0; block.rank() * block.rank()];
        block.decode(min, &mut b);
        let out = (PairingGram::from_numerators(g.group().clone(), b)?, size);
        self.cache.lock().unwrap().insert(g.clone(), out.clone());
        Ok(out)
    }

    /// Canonical gram and orbit size.
    pub fn canonical(&self, g: &PairingGram) -> Result<(PairingGram, BigUint)> {
        let mut acc = PairingGram::zero(FinAbGroup::trivial());
        let mut size = BigUint::one();
        for p in g.group().primes() {
            let (c, s) = self.canonical_block(&g.sylow(&[p]))?;
            acc = acc.direct_sum(&c)?;
            size *= s;
        }
        Ok((acc, size))
    }

    pub fn classify(&self, g: &PairingGram) -> Result<PairingClass> {
        let (canonical, orbit_size) = self.canonical(g)?;
        let aut = aut_order(g.group());
        let automorphisms = &aut / &orbit_size;
        Ok(PairingClass { id: PairClassId::from_canonical(&canonical), canonical, orbit_size, automorphisms })
    }

    pub fn class_id(&self, g: &PairingGram) -> Result<PairClassId> {
        Ok(PairClassId::from_canonical(&self.canonical(g)?.0))
    }

    pub fn isomorphic(&self, a: &PairingGram, b: &PairingGram) -> Result<bool> {
        if a.group() != b.group() {
            return Ok(false);
        }
        Ok(self.canonical(a)?.0 == self.canonical(b)?.0)
    }
}

/// Whether two groups with pairing are isomorphic.
pub fn pair_isomorphic(a: &PairedGroup, b: &PairedGroup) -> Result<bool> {
    Classifier::default().isomorphic(&a.pairing, &b.pairing)
}

/// `|Aut(G, delta)|`. Counts automorphisms directly when `|End(G)|` is within
/// `budget`, otherwise divides `|Aut(G)|` by the orbit size.
pub fn aut_preserving_count(g: &PairingGram, budget: u64) -> Result<BigUint> {
    let group = g.group();
    let ends = crate::groups::count_homs(group, group);
    if ends.to_u64().is_some_and(|e| e <= budget) {
        let auts = enumerate_automorphisms(group, budget)?;
        let r = group.rank();
        let n = auts
            .iter()
            .filter(|a| {
                (0..r).all(|i| (0..r).all(|j| g.evaluate_num(&a.images[i], &a.images[j]) == g.numerator(i, j)))
            })
            .count();
        return Ok(BigUint::from(n));
    }
    Ok(Classifier::new(budget).classify(g)?.automorphisms)
}

/// Classes of pairings on one `p`-group, by scanning all codes in order.
fn block_classes(p: u64, lambda: &[u32], perfect_only: bool, budget: u64) -> Result<Vec<(PairingGram, u64)>> {
    let block = Block::new(p, lambda)?;
    if block.total > budget.max(BITSET_LIMIT) {
        return Err(Error::BudgetExceeded(format!("{} symmetric grams", block.total)));
    }
    let group = FinAbGroup::from_prime_type(p, lambda)?;
    let mut seen = Bits(vec![0; block.total.div_ceil(64) as usize]);
    let r = block.rank();
    let mut b = vec![0u64; r * r];
    let mut out = Vec::new();
    for code in 0..block.total {
        if seen.0[(code / 64) as usize] >> (code % 64) & 1 == 1 {
            continue;
        }
        block.decode(code, &mut b);
        if perfect_only && !block.is_perfect(&b) {
            continue;
        }
        let (_, size) = block.orbit(code, u64::MAX, &mut seen)?;
        out.push((PairingGram::from_numerators(group.clone(), b.clone())?, size));
    }
    Ok(out)
}

/// All isomorphism classes of (perfect) symmetric pairings on `g`.
pub fn enumerate_pairing_classes(g: &FinAbGroup, perfect_only: bool, budget: u64) -> Result<Vec<PairingClass>> {
    let mut acc: Vec<(PairingGram, BigUint)> = vec![(PairingGram::zero(FinAbGroup::trivial()), BigUint::one())];
    for p in g.primes() {
        let classes = block_classes(p, &g.p_type(p), perfect_only, budget)?;
        let mut next = Vec::with_capacity(acc.len() * classes.len());
        for (a, sa) in &acc {
            for (c, sc) in &classes {
                next.push((a.direct_sum(c)?, sa * BigUint::from(*sc)));
            }
        }
        acc = next;
    }
    let aut = aut_order(g);
    Ok(acc
        .into_iter()
        .map(|(canonical, orbit_size)| PairingClass {
            id: PairClassId::from_canonical(&canonical),
            automorphisms: &aut / &orbit_size,
            canonical,
            orbit_size,
        })
        .collect())
}

/// Number of perfect symmetric pairings on a `p`-group of type `lambda`.
pub fn count_perfect_grams(p: u64, lambda: &[u32]) -> Result<u64> {
    let block = Block::new(p, lambda)?;
    if block.total > BITSET_LIMIT {
        return Err(Error::BudgetExceeded(format!("{} symmetric grams", block.total)));
    }
    let r = block.rank();
    let mut b = vec![0u64; r * r];
    let mut n = 0;
    for code in 0..block.total {
        block.decode(code, &mut b);
        n += block.is_perfect(&b) as u64;
    }
    Ok(n)
}

/// Elementary automorphisms as group homomorphisms; used to check that
/// they generate `Aut(G)`.
pub fn elementary_closure_size(g: &FinAbGroup, budget: usize) -> Result<usize> {
    let gens = crate::groups::aut_generators(g);
    let id = crate::groups::GroupHom::identity(g);
    let mut seen: HashSet<Vec<Vec<u64>>> = HashSet::from([id.images.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(h) = queue.pop_front() {
        for s in &gens {
            let c = s.then(&h)?;
            if seen.insert(c.images.clone()) {
                if seen.len() > budget {
                    return Err(Error::BudgetExceeded("closure".into()));
                }
                queue.push_back(c);
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::construction_sizes;

    fn pg(s: &str) -> PairingGram {
        s.parse().unwrap()
    }

    fn grp(s: &str) -> FinAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn isomorphism_examples() {
        let c = Classifier::default();
        assert!(!c.isomorphic(&pg("Z/3|1/3"), &pg("Z/3|2/3")).unwrap());
        assert!(c.isomorphic(&pg("Z/5|1/5"), &pg("Z/5|4/5")).unwrap());
        assert!(c.isomorphic(&pg("Z/2+Z/2|0/1,0/1,0/1,1/2"), &pg("Z/2+Z/2|1/2,0/1,0/1,0/1")).unwrap());
    }

    #[test]
    fn stabilizers() {
        assert_eq!(aut_preserving_count(&pg("Z/2|1/2"), 1000).unwrap(), BigUint::from(1u32));
        assert_eq!(aut_preserving_count(&pg("Z/3|1/3"), 1000).unwrap(), BigUint::from(2u32));
        assert_eq!(aut_preserving_count(&pg("Z/5|1/5"), 1000).unwrap(), BigUint::from(2u32));
        for s in ["Z/4+Z/2|1/4,1/2,1/2,1/2", "Z/2+Z/2|0/1,1/2,1/2,0/1", "Z/9+Z/3|1/9,0/1,0/1,1/3"] {
            let g = pg(s);
            assert_eq!(aut_preserving_count(&g, 1 << 20).unwrap(), Classifier::default().classify(&g).unwrap().automorphisms, "{s}");
        }
    }

    #[test]
    fn class_counts() {
        assert_eq!(enumerate_pairing_classes(&grp("Z/2"), true, 1 << 20).unwrap().len(), 1);
        assert_eq!(enumerate_pairing_classes(&grp("Z/3"), true, 1 << 20).unwrap().len(), 2);
        assert_eq!(enumerate_pairing_classes(&grp("Z/6"), true, 1 << 20).unwrap().len(), 2);
    }

    #[test]
    fn orbits_partition_all_grams() {
        for s in ["Z/2+Z/2", "Z/4+Z/2", "Z/2+Z/2+Z/2", "Z/3+Z/3", "Z/8", "Z/9+Z/3", "Z/4+Z/4", "Z/2+Z/3"] {
            let g = grp(s);
            let total: BigUint = enumerate_pairing_classes(&g, false, 1 << 20).unwrap().iter().map(|c| c.orbit_size.clone()).sum();
            assert_eq!(total, construction_sizes(&g).0, "{s}");
        }
    }

    #[test]
    fn elementary_moves_generate_aut() {
        for s in ["Z/2+Z/2", "Z/4+Z/2", "Z/8+Z/2", "Z/3+Z/3", "Z/9+Z/3", "Z/4+Z/2+Z/2", "Z/16", "Z/27"] {
            let g = grp(s);
            assert_eq!(BigUint::from(elementary_closure_size(&g, 1 << 20).unwrap()), aut_order(&g), "{s}");
        }
    }

    #[test]
    fn class_id_is_stable() {
        let c = Classifier::default();
        let a = c.class_id(&pg("Z/3|2/3")).unwrap();
        assert_eq!(a.text, "Z/3|2/3");
        assert_eq!(a.hash.len(), 16);
        assert_eq!(c.class_id(&pg("Z/5|4/5")).unwrap().text, "Z/5|1/5");
    }

    #[test]
    fn perfect_counts_match_classes() {
        // sum of orbit sizes over perfect classes = number of perfect grams
        for (p, l) in [(2u64, vec![1u32, 1]), (2, vec![2, 1]), (3, vec![1, 1]), (2, vec![1, 1, 1])] {
            let g = FinAbGroup::from_prime_type(p, &l).unwrap();
            let via_classes: BigUint = enumerate_pairing_classes(&g, true, 1 << 20).unwrap().iter().map(|c| c.orbit_size.clone()).sum();
            assert_eq!(via_classes, BigUint::from(count_perfect_grams(p, &l).unwrap()));
        }
    }
}
