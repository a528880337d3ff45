//! Finite abelian groups in canonical form, homomorphisms and their enumeration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd_u64, ipow};
use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, IntMatrix};

/// One cyclic generator of prime-power order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gen {
    pub p: u64,
    pub e: u32,
    pub order: u64,
}

/// A finite abelian group as a direct sum of cyclic groups of prime-power
/// order. Generators are ordered by prime ascending, then exponent descending.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FinAbGroup {
    gens: Vec<Gen>,
}

/// Coordinates of an element with respect to the canonical generators.
pub type Element = Vec<u64>;

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup { gens: Vec::new() }
    }

    /// Builds a group from `(p, partition)` pairs. Primes may repeat; parts
    /// equal to zero are dropped.
    pub fn from_types(types: &[(u64, Vec<u32>)]) -> Result<Self> {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for (p, lambda) in types {
            if !arith::is_prime_u64(*p) {
                return Err(Error::InvalidGroup(format!("{p} is not prime")));
            }
            by_prime.entry(*p).or_default().extend(lambda.iter().copied().filter(|&e| e > 0));
        }
        let mut gens = Vec::new();
        for (p, mut lambda) in by_prime {
            lambda.sort_unstable_by(|a, b| b.cmp(a));
            for e in lambda {
                let order = p
                    .checked_pow(e)
                    .ok_or_else(|| Error::InvalidGroup(format!("{p}^{e} overflows")))?;
                gens.push(Gen { p, e, order });
            }
        }
        Ok(FinAbGroup { gens })
    }

    pub fn from_prime_type(p: u64, lambda: &[u32]) -> Result<Self> {
        Self::from_types(&[(p, lambda.to_vec())])
    }

    /// `Z/n_1 + ... + Z/n_k` for arbitrary positive `n_i`.
    pub fn from_invariants(ns: &[u64]) -> Result<Self> {
        let mut types = Vec::new();
        for &n in ns {
            if n == 0 {
                return Err(Error::InvalidGroup("infinite cyclic factor".into()));
            }
            for (p, e) in arith::factor_u64(n) {
                types.push((p, vec![e]));
            }
        }
        Self::from_types(&types)
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn orders(&self) -> Vec<u64> {
        self.gens.iter().map(|g| g.order).collect()
    }

    pub fn order(&self) -> BigUint {
        self.gens.iter().map(|g| BigUint::from(g.order)).product()
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.gens.iter().try_fold(1u64, |acc, g| acc.checked_mul(g.order))
    }

    /// Least common multiple of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.gens.iter().fold(1, |acc, g| arith::lcm_u64(acc, g.order))
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.gens.iter().map(|g| g.p).collect();
        ps.dedup();
        ps
    }

    /// Partition of the `p`-part, descending.
    pub fn p_type(&self, p: u64) -> Vec<u32> {
        self.gens.iter().filter(|g| g.p == p).map(|g| g.e).collect()
    }

    pub fn indices_of_prime(&self, p: u64) -> Vec<usize> {
        (0..self.gens.len()).filter(|&i| self.gens[i].p == p).collect()
    }

    /// The part supported at `primes`, with the indices it keeps.
    pub fn sylow(&self, primes: &[u64]) -> (FinAbGroup, Vec<usize>) {
        let idx: Vec<usize> = (0..self.gens.len()).filter(|&i| primes.contains(&self.gens[i].p)).collect();
        let gens = idx.iter().map(|&i| self.gens[i]).collect();
        (FinAbGroup { gens }, idx)
    }

    /// `G (x) Z/b`, with the indices of generators that survive.
    pub fn tensor_cyclic(&self, b: u64) -> (FinAbGroup, Vec<usize>) {
        let mut gens = Vec::new();
        let mut idx = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let mut vb = 0;
            let mut bb = b;
            while bb % g.p == 0 && vb < g.e {
                bb /= g.p;
                vb += 1;
            }
            if vb > 0 {
                gens.push(Gen { p: g.p, e: vb, order: ipow(g.p, vb) });
                idx.push(i);
            }
        }
        (FinAbGroup { gens }, idx)
    }

    pub fn zero(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        x.len() == self.rank() && x.iter().zip(&self.gens).all(|(a, g)| *a < g.order)
    }

    pub fn reduce(&self, x: &[i128]) -> Element {
        x.iter().zip(&self.gens).map(|(a, g)| a.rem_euclid(g.order as i128) as u64).collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Element {
        x.iter().zip(y).zip(&self.gens).map(|((a, b), g)| (a + b) % g.order).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Element {
        x.iter().zip(&self.gens).map(|(a, g)| (g.order - a) % g.order).collect()
    }

    pub fn scale(&self, k: u64, x: &[u64]) -> Element {
        x.iter().zip(&self.gens).map(|(a, g)| arith::mul_mod(k, *a, g.order)).collect()
    }

    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.gens)
            .fold(1, |acc, (a, g)| arith::lcm_u64(acc, g.order / gcd_u64(*a, g.order)))
    }

    /// All elements in mixed-radix order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        MixedRadix::new(self.orders())
    }

    /// Index of the subgroup generated by `elems`, via Smith normal form of
    /// the generators together with the relations.
    pub fn subgroup_index(&self, elems: &[Element]) -> BigUint {
        let r = self.rank();
        if r == 0 {
            return BigUint::one();
        }
        let cols = elems.len() + r;
        let mut m = IntMatrix::zeros(r, cols);
        for (j, x) in elems.iter().enumerate() {
            for i in 0..r {
                m.set(i, j, BigInt::from(x[i]));
            }
        }
        for i in 0..r {
            m.set(i, elems.len() + i, BigInt::from(self.gens[i].order));
        }
        invariant_factors(&m).iter().map(|d| d.magnitude().clone()).product()
    }

    /// Whether `elems` generate the group, by ranks modulo each prime.
    pub fn generated_by(&self, elems: &[Element]) -> bool {
        self.primes().into_iter().all(|p| {
            let idx = self.indices_of_prime(p);
            let vs: Vec<Vec<u64>> = elems.iter().map(|x| idx.iter().map(|&i| x[i] % p).collect()).collect();
            arith::rank_mod_p(&vs, p) == idx.len()
        })
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.gens.iter().map(|g| format!("Z/{}", g.order)).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinAbGroup({self})")
    }
}

impl FromStr for FinAbGroup {
    type Err = Error;

    /// Accepts `0`, or summands `Z/n` joined by `+` in any order.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Self::trivial());
        }
        let mut ns = Vec::new();
        for part in s.split('+') {
            let n = part
                .trim()
                .strip_prefix("Z/")
                .and_then(|x| x.trim().parse::<u64>().ok())
                .ok_or_else(|| Error::Parse(format!("group summand `{part}`")))?;
            ns.push(n);
        }
        Self::from_invariants(&ns)
    }
}

impl TryFrom<String> for FinAbGroup {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FinAbGroup> for String {
    fn from(g: FinAbGroup) -> String {
        g.to_string()
    }
}

/// Counter over `[0, r_0) x [0, r_1) x ...`, first coordinate fastest.
pub struct MixedRadix {
    radix: Vec<u64>,
    cur: Option<Vec<u64>>,
}

impl MixedRadix {
    pub fn new(radix: Vec<u64>) -> Self {
        let cur = if radix.iter().any(|&r| r == 0) { None } else { Some(vec![0; radix.len()]) };
        MixedRadix { radix, cur }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().unwrap();
        let mut i = 0;
        loop {
            if i == cur.len() {
                self.cur = None;
                break;
            }
            cur[i] += 1;
            if cur[i] < self.radix[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// A homomorphism given by the images of the source generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    pub source: FinAbGroup,
    pub target: FinAbGroup,
    /// `images[j]` is the image of source generator `j`.
    pub images: Vec<Element>,
}

impl GroupHom {
    pub fn new(source: FinAbGroup, target: FinAbGroup, images: Vec<Element>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::NotAHomomorphism("wrong number of images".into()));
        }
        for (j, x) in images.iter().enumerate() {
            if !target.contains(x) {
                return Err(Error::NotInGroup(format!("{x:?}")));
            }
            if !target.scale(source.gens[j].order, x).iter().all(|&c| c == 0) {
                return Err(Error::NotAHomomorphism(format!(
                    "image of generator {j} has order not dividing {}",
                    source.gens[j].order
                )));
            }
        }
        Ok(GroupHom { source, target, images })
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        let images = (0..g.rank())
            .map(|j| {
                let mut e = g.zero();
                e[j] = 1;
                e
            })
            .collect();
        GroupHom { source: g.clone(), target: g.clone(), images }
    }

    /// Coefficient of target generator `i` in the image of source generator `j`.
    pub fn coeff(&self, i: usize, j: usize) -> u64 {
        self.images[j][i]
    }

    pub fn apply(&self, x: &[u64]) -> Element {
        let mut acc = vec![0u128; self.target.rank()];
        let t = self.target.gens();
        for (j, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, a) in acc.iter_mut().enumerate() {
                *a = (*a + c as u128 * self.images[j][i] as u128) % t[i].order as u128;
            }
        }
        acc.into_iter().map(|a| a as u64).collect()
    }

    /// `other` after `self`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.target != other.source {
            return Err(Error::NotAHomomorphism("composition of mismatched maps".into()));
        }
        let images = self.images.iter().map(|x| other.apply(x)).collect();
        Ok(GroupHom { source: self.source.clone(), target: other.target.clone(), images })
    }

    pub fn is_surjective(&self) -> bool {
        self.target.generated_by(&self.images)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && self.is_surjective()
    }
}

/// Number of homomorphisms `a -> b`.
pub fn count_homs(a: &FinAbGroup, b: &FinAbGroup) -> BigUint {
    let mut n = BigUint::one();
    for ga in a.gens() {
        for gb in b.gens() {
            n *= gcd_u64(ga.order, gb.order);
        }
    }
    n
}

/// Visits every homomorphism `a -> b` as its image list. Stops early when
/// `f` returns `false`.
pub fn for_each_hom<F: FnMut(&[Element]) -> bool>(a: &FinAbGroup, b: &FinAbGroup, mut f: F) {
    let ra = a.rank();
    let rb = b.rank();
    // choices for coordinate i of image j: multiples of step(i, j)
    let mut radix = Vec::with_capacity(ra * rb);
    let mut step = Vec::with_capacity(ra * rb);
    for ga in a.gens() {
        for gb in b.gens() {
            let g = gcd_u64(ga.order, gb.order);
            radix.push(g);
            step.push(gb.order / g);
        }
    }
    let mut images = vec![vec![0u64; rb]; ra];
    for digits in MixedRadix::new(radix) {
        for j in 0..ra {
            for i in 0..rb {
                images[j][i] = digits[j * rb + i] * step[j * rb + i];
            }
        }
        if !f(&images) {
            return;
        }
    }
}

pub(crate) fn check_budget(n: &BigUint, budget: u64, what: &str) -> Result<()> {
    if n.to_u64().is_none_or(|x| x > budget) {
        return Err(Error::BudgetExceeded(format!("{n} {what} exceeds budget {budget}")));
    }
    Ok(())
}

pub fn enumerate_homs(a: &FinAbGroup, b: &FinAbGroup, budget: u64) -> Result<Vec<GroupHom>> {
    check_budget(&count_homs(a, b), budget, "homomorphisms")?;
    let mut out = Vec::new();
    for_each_hom(a, b, |im| {
        out.push(GroupHom { source: a.clone(), target: b.clone(), images: im.to_vec() });
        true
    });
    Ok(out)
}

pub fn enumerate_surjections(a: &FinAbGroup, b: &FinAbGroup, budget: u64) -> Result<Vec<GroupHom>> {
    check_budget(&count_homs(a, b), budget, "homomorphisms")?;
    let mut out = Vec::new();
    for_each_hom(a, b, |im| {
        if b.generated_by(im) {
            out.push(GroupHom { source: a.clone(), target: b.clone(), images: im.to_vec() });
        }
        true
    });
    Ok(out)
}

pub fn count_surjections(a: &FinAbGroup, b: &FinAbGroup, budget: u64) -> Result<u64> {
    check_budget(&count_homs(a, b), budget, "homomorphisms")?;
    let mut n = 0;
    for_each_hom(a, b, |im| {
        n += b.generated_by(im) as u64;
        true
    });
    Ok(n)
}

pub fn enumerate_automorphisms(g: &FinAbGroup, budget: u64) -> Result<Vec<GroupHom>> {
    enumerate_surjections(g, g, budget)
}

/// `|Aut(G)|` from the closed formula for each Sylow part.
pub fn aut_order(g: &FinAbGroup) -> BigUint {
    let mut total = BigUint::one();
    for p in g.primes() {
        let mut e = g.p_type(p);
        e.sort_unstable();
        let r = e.len();
        let pb = BigUint::from(p);
        for k in 0..r {
            let d = (k..r).take_while(|&l| e[l] == e[k]).last().unwrap() + 1;
            let c = (0..=k).find(|&l| e[l] == e[k]).unwrap() + 1;
            total *= pb.pow(d as u32) - pb.pow(k as u32);
            total *= pb.pow(e[k] * (r - d) as u32);
            total *= pb.pow((e[k] - 1) * (r - c + 1) as u32);
        }
    }
    total
}

/// A generating set of `Aut(G)`: unit scalings, transvections and swaps of
/// generators of equal order.
pub fn aut_generators(g: &FinAbGroup) -> Vec<GroupHom> {
    let mut out = Vec::new();
    let r = g.rank();
    let gens = g.gens();
    let unit = |i: usize, u: u64| {
        let mut h = GroupHom::identity(g);
        h.images[i][i] = u % gens[i].order;
        h
    };
    for i in 0..r {
        let Gen { p, order, .. } = gens[i];
        if p == 2 {
            if order > 2 {
                out.push(unit(i, order - 1));
            }
            if order > 4 {
                out.push(unit(i, 5));
            }
        } else {
            out.push(unit(i, arith::primitive_root_mod_prime_power(p, order)));
        }
    }
    for i in 0..r {
        for j in 0..r {
            if i == j || gens[i].p != gens[j].p {
                continue;
            }
            // g_i -> g_i + c g_j, where c g_j has order dividing |g_i|
            let c = if gens[j].e <= gens[i].e { 1 } else { ipow(gens[i].p, gens[j].e - gens[i].e) };
            let mut h = GroupHom::identity(g);
            h.images[i][j] = c;
            out.push(h);
            if gens[i].order == gens[j].order && i < j {
                let mut s = GroupHom::identity(g);
                s.images[i] = g.zero();
                s.images[i][j] = 1;
                s.images[j] = g.zero();
                s.images[j][i] = 1;
                out.push(s);
            }
        }
    }
    out
}

/// `(|Sym_2 G|, |Sym^2 G|, |wedge^2 G|)`.
pub fn construction_sizes(g: &FinAbGroup) -> (BigUint, BigUint, BigUint) {
    let mut sym_lower = BigUint::one();
    let mut wedge = BigUint::one();
    for p in g.primes() {
        let lambda = g.p_type(p);
        let pb = BigUint::from(p);
        for (i, &e) in lambda.iter().enumerate() {
            sym_lower *= pb.pow(e * (i as u32 + 1));
            wedge *= pb.pow(e * i as u32);
        }
    }
    (sym_lower.clone(), sym_lower, wedge)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(s: &str) -> FinAbGroup {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_text() {
        assert_eq!(grp("Z/2+Z/4+Z/3").to_string(), "Z/4+Z/2+Z/3");
        assert_eq!(grp("Z/6").to_string(), "Z/2+Z/3");
        assert_eq!(grp("0").to_string(), "0");
        assert_eq!(grp("Z/1").to_string(), "0");
        assert!("Z/0".parse::<FinAbGroup>().is_err());
        assert!("Q".parse::<FinAbGroup>().is_err());
    }

    #[test]
    fn hom_counts() {
        assert_eq!(count_homs(&grp("Z/4"), &grp("Z/2")), BigUint::from(2u32));
        assert_eq!(count_homs(&grp("Z/2+Z/2"), &grp("Z/2")), BigUint::from(4u32));
        assert_eq!(enumerate_homs(&grp("Z/4"), &grp("Z/2"), 100).unwrap().len(), 2);
        assert_eq!(count_surjections(&grp("Z/3"), &grp("Z/3"), 100).unwrap(), 2);
        assert_eq!(count_surjections(&grp("Z/2+Z/2"), &grp("Z/2"), 100).unwrap(), 3);
        assert_eq!(enumerate_automorphisms(&grp("Z/2+Z/2"), 100).unwrap().len(), 6);
        assert!(matches!(enumerate_homs(&grp("Z/2+Z/2+Z/2"), &grp("Z/2+Z/2+Z/2"), 100), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn aut_formula_matches_enumeration() {
        for s in ["Z/2", "Z/4", "Z/8", "Z/2+Z/2", "Z/4+Z/2", "Z/4+Z/4", "Z/2+Z/2+Z/2", "Z/3", "Z/9+Z/3", "Z/3+Z/3", "Z/6", "Z/8+Z/2", "Z/25", "Z/4+Z/2+Z/2"] {
            let g = grp(s);
            let n = enumerate_automorphisms(&g, 1 << 22).unwrap().len();
            assert_eq!(aut_order(&g), BigUint::from(n), "{s}");
        }
    }

    #[test]
    fn sizes() {
        let two = BigUint::from;
        assert_eq!(construction_sizes(&grp("Z/2+Z/2")), (two(8u32), two(8u32), two(2u32)));
        assert_eq!(construction_sizes(&grp("Z/5")), (two(5u32), two(5u32), two(1u32)));
    }

    #[test]
    fn subgroup_index_matches_rank_test() {
        let g = grp("Z/4+Z/2+Z/3");
        let elems = vec![vec![2, 1, 1], vec![0, 1, 0]];
        assert_eq!(g.subgroup_index(&elems), BigUint::from(2u32));
        assert!(!g.generated_by(&elems));
        assert!(g.generated_by(&[vec![1, 1, 1], vec![0, 1, 0]]));
    }

    #[test]
    fn tensor() {
        let (t, idx) = grp("Z/8+Z/2+Z/9+Z/5").tensor_cyclic(6);
        assert_eq!(t.to_string(), "Z/2+Z/2+Z/3");
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn serde_roundtrip() {
        let g = grp("Z/4+Z/3");
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, "\"Z/4+Z/3\"");
        assert_eq!(serde_json::from_str::<FinAbGroup>(&s).unwrap(), g);
    }
}
