//! Closed-form predictions and exhaustive checks of the structural lemmas
//! behind the moment computation.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, ipow};
use crate::classify::{count_perfect_grams, Classifier, PairClassId, PairingClass};
use crate::error::{Error, Result};
use crate::groups::{aut_order, Element, FinAbGroup, MixedRadix};
use crate::moments::LiftSpace;
use crate::pairings::{all_grams, PairedGroup};
use crate::rng::TrialRng;

/// Truncation depth used for predictions.
pub const DEFAULT_DEPTH: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncated {
    pub value: f64,
    /// The exact value lies in `[value - tail_bound, value]`.
    pub tail_bound: f64,
}

/// `prod_{k=1}^{depth} (1 - p^(1-2k))` with the bound `2 p^(-1-2 depth)` on
/// the omitted factors.
pub fn cl_constant(p: u64, depth: u32) -> Result<Truncated> {
    if depth == 0 {
        return Err(Error::InvalidParameter("truncation depth must be positive".into()));
    }
    let pf = p as f64;
    let mut value = 1.0;
    for k in 1..=depth {
        value *= 1.0 - pf.powi(1 - 2 * k as i32);
    }
    Ok(Truncated { value, tail_bound: 2.0 * pf.powi(-1 - 2 * depth as i32) })
}

/// The same product accumulated from the smallest factor up, in log space.
pub fn cl_constant_reversed(p: u64, depth: u32) -> f64 {
    let pf = p as f64;
    (1..=depth).rev().map(|k| (-pf.powi(1 - 2 * k as i32)).ln_1p()).sum::<f64>().exp()
}

/// The partial product as an exact rational.
pub fn cl_constant_exact(p: u64, depth: u32) -> BigRational {
    let mut acc = BigRational::one();
    for k in 1..=depth {
        let den = BigInt::from(p).pow(2 * k - 1);
        acc *= BigRational::new(&den - BigInt::one(), den);
    }
    acc
}

/// The product of `cl_constant` over `primes`.
pub fn cl_constant_product(primes: &[u64], depth: u32) -> Result<Truncated> {
    let mut value = 1.0;
    let mut tail = 0.0;
    for &p in primes {
        let t = cl_constant(p, depth)?;
        value *= t.value;
        tail += t.tail_bound;
    }
    Ok(Truncated { value, tail_bound: value * tail })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClpPrediction {
    pub target: PairClassId,
    pub probability: f64,
    pub error_bound: f64,
}

/// Predicted limiting frequency of the class of `target` among the
/// `primes`-parts: `c_P / (|G| |Aut(G, delta)|)` for perfect pairings on a
/// `P`-group, zero otherwise.
pub fn clp_probability(target: &PairedGroup, primes: &[u64], classifier: &Classifier) -> Result<ClpPrediction> {
    clp_for_class(&classifier.classify(&target.pairing)?, primes)
}

/// The prediction for an already classified pairing.
pub fn clp_for_class(class: &PairingClass, primes: &[u64]) -> Result<ClpPrediction> {
    let g = class.canonical.group();
    let supported = g.primes().iter().all(|p| primes.contains(p));
    if !class.canonical.is_perfect() || !supported {
        return Ok(ClpPrediction { target: class.id.clone(), probability: 0.0, error_bound: 0.0 });
    }
    let c = cl_constant_product(primes, DEFAULT_DEPTH)?;
    let den = big_to_f64(&(g.order() * &class.automorphisms));
    Ok(ClpPrediction { target: class.id.clone(), probability: c.value / den, error_bound: c.tail_bound / den })
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Partitions of `n` with parts in descending order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All groups supported at `primes` of order at most `bound`, by order.
pub fn groups_up_to(primes: &[u64], bound: u64) -> Vec<FinAbGroup> {
    let mut acc: Vec<(u64, Vec<(u64, Vec<u32>)>)> = vec![(1, Vec::new())];
    for &p in primes {
        let mut next = Vec::new();
        for (order, types) in &acc {
            let mut e = 0;
            let mut pe = 1u64;
            while order.checked_mul(pe).is_some_and(|o| o <= bound) {
                for lambda in partitions(e) {
                    let mut t = types.clone();
                    if !lambda.is_empty() {
                        t.push((p, lambda));
                    }
                    next.push((order * pe, t));
                }
                e += 1;
                match pe.checked_mul(p) {
                    Some(x) => pe = x,
                    None => break,
                }
            }
        }
        acc = next;
    }
    acc.sort_by_key(|x| x.0);
    acc.into_iter().map(|(_, t)| FinAbGroup::from_types(&t).expect("prime powers")).collect()
}

/// `sum_delta 1 / |Aut(G, delta)|` over perfect pairings up to isomorphism,
/// which is the number of perfect grams divided by `|Aut(G)|`.
pub fn perfect_class_mass(g: &FinAbGroup) -> Result<BigRational> {
    let mut perfect = BigUint::one();
    for p in g.primes() {
        perfect *= BigUint::from(count_perfect_grams(p, &g.p_type(p))?);
    }
    Ok(BigRational::new(BigInt::from(perfect), BigInt::from(aut_order(g))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassCheck {
    pub primes: Vec<u64>,
    pub bound: u64,
    pub total: f64,
    /// `(order, cumulative mass up to this order)`.
    pub cumulative: Vec<(u64, f64)>,
    /// Mass not accounted for by groups of order at most `bound`.
    pub unexplored: f64,
}

/// Total predicted mass of all classes with `|G| <= bound`.
pub fn mass_check(primes: &[u64], bound: u64) -> Result<MassCheck> {
    let c = cl_constant_product(primes, DEFAULT_DEPTH)?.value;
    let mut total = 0.0;
    let mut cumulative: Vec<(u64, f64)> = Vec::new();
    for g in groups_up_to(primes, bound) {
        let order = g.order_u64().expect("bounded");
        let mass = perfect_class_mass(&g)? / BigRational::from_integer(order.into());
        total += c * mass.to_f64().unwrap();
        match cumulative.last_mut() {
            Some(last) if last.0 == order => last.1 = total,
            _ => cumulative.push((order, total)),
        }
    }
    Ok(MassCheck { primes: primes.to_vec(), bound, total, cumulative, unexplored: 1.0 - total })
}

/// A homomorphism from `V = R^n` given by the images of the standard basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeHom {
    pub target: FinAbGroup,
    pub images: Vec<Element>,
}

impl FreeHom {
    pub fn new(target: FinAbGroup, images: Vec<Element>) -> Result<Self> {
        if let Some(x) = images.iter().find(|x| !target.contains(x)) {
            return Err(Error::NotInGroup(format!("{x:?}")));
        }
        Ok(FreeHom { target, images })
    }

    /// From coefficient rows: `rows[i][k]` is the coordinate at generator
    /// `i` of the image of `v_k`.
    pub fn from_rows(target: FinAbGroup, rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        let ords = target.orders();
        let images = (0..n).map(|k| rows.iter().enumerate().map(|(i, r)| r[k] % ords[i]).collect()).collect();
        Self::new(target, images)
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.target.rank()).map(|i| self.images.iter().map(|x| x[i]).collect()).collect()
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    fn kept(&self, sigma: &[usize]) -> Vec<Element> {
        (0..self.n()).filter(|k| !sigma.contains(k)).map(|k| self.images[k].clone()).collect()
    }

    pub fn surjective_without(&self, sigma: &[usize]) -> bool {
        self.target.generated_by(&self.kept(sigma))
    }

    /// `[G : F V_sigma]`.
    pub fn index_without(&self, sigma: &[usize]) -> BigUint {
        self.target.subgroup_index(&self.kept(sigma))
    }
}

/// Visits the `k`-subsets of `0..n` in lexicographic order until `f`
/// returns `false`.
pub fn for_each_subset<F: FnMut(&[usize]) -> bool>(n: usize, k: usize, mut f: F) -> bool {
    if k > n {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return true;
            }
        }
        if idx[i] >= n - k + i {
            return true;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The largest `w` such that deleting any `w - 1` basis vectors leaves `F`
/// surjective; `0` if `F` is not surjective, `n + 1` for trivial `G`.
pub fn code_distance(f: &FreeHom) -> usize {
    let n = f.n();
    for s in 0..=n {
        if !for_each_subset(n, s, |sigma| f.surjective_without(sigma)) {
            return s;
        }
    }
    n + 1
}

/// Number of prime factors with multiplicity.
pub fn ell(d: &BigUint) -> u32 {
    match d.to_u64() {
        Some(x) => factor_u64(x).iter().map(|x| x.1).sum(),
        None => crate::arith::factor_big(&BigInt::from(d.clone())).map_or(0, |fs| fs.iter().map(|x| x.1).sum()),
    }
}

/// The largest index `D = [G : F V_sigma]` reached with
/// `|sigma| < ell(D) * delta * n`; `1` when no such `D` exists.
pub fn depth(f: &FreeHom, delta: f64) -> Result<BigUint> {
    let lg = ell(&f.target.order());
    if !(delta > 0.0 && (lg == 0 || delta * (lg as f64) < 1.0)) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1/{lg})")));
    }
    let n = f.n();
    let mut best = BigUint::one();
    for s in 0..=n {
        // |sigma| < ell(D) delta n needs ell(D) > s / (delta n)
        if s as f64 >= lg as f64 * delta * n as f64 {
            break;
        }
        for_each_subset(n, s, |sigma| {
            let d = f.index_without(sigma);
            if d > best && (s as f64) < ell(&d) as f64 * delta * n as f64 {
                best = d;
            }
            true
        });
    }
    Ok(best)
}

/// Checks that random lifts of `f` to `H` keep its code distance.
pub fn lift_code_check(f: &FreeHom, trials: usize, rng: &mut TrialRng) -> Result<bool> {
    let w = code_distance(f);
    let space = LiftSpace::new(&f.target);
    let h = space.h_group();
    let rows = f.rows();
    for _ in 0..trials {
        let lift = FreeHom::from_rows(h.clone(), &space.random_lift(&rows, rng))?;
        if code_distance(&lift) < w {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the exhaustive count of pairs `(C, D)` whose coefficients
/// `E_ij(C, D, L)` all vanish.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub group: String,
    pub n: usize,
    pub lift: Vec<Vec<u64>>,
    pub pairs: u64,
    pub special: u64,
    /// `|Sym^2 H| / |G|`.
    pub predicted: u64,
    /// `D(-A) = 0` for every special pair and every pairing `A`.
    pub d_of_a_vanishes: bool,
    /// Code distance of the lift into `H`.
    pub distance: usize,
    /// Fewest nonzero coefficients over non-special pairs.
    pub min_nonzero: Option<usize>,
    /// Non-special pairs that are weak for the given `gamma`, if one was
    /// supplied.
    pub weak: Option<u64>,
}

impl Census {
    pub fn passed(&self) -> bool {
        self.special == self.predicted
            && self.d_of_a_vanishes
            && self.min_nonzero.is_none_or(|m| m >= self.distance.div_ceil(2))
    }
}

/// The coefficients `E_ij` for `i <= j`, row-major over the upper triangle.
/// `c[k][t]` is the coordinate of `C(v_k)` at generator `t` of `G*`, and `d`
/// the upper-triangular representative of `D` indexed like the upper
/// triangle of `H`.
pub fn coefficients(space: &LiftSpace, lift: &[Vec<u64>], c: &[Vec<u64>], d: &[u64]) -> Vec<u64> {
    let r = space.rank();
    let n = lift.first().map_or(0, |x| x.len());
    let q = space.ring[0] as u128;
    // e(C(v_j), Lambda L v_i)
    let e = |j: usize, i: usize| -> u128 {
        (0..r).fold(0u128, |acc, t| (acc + c[j][t] as u128 * lift[t][i] as u128 % q * space.lambda[t] as u128) % q)
    };
    let x: Vec<Vec<u128>> =
        (0..n).map(|k| (0..r).map(|t| lift[t][k] as u128 * space.omega[t] as u128 % q).collect()).collect();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut acc = if i == j { e(i, i) } else { (e(j, i) + e(i, j)) % q };
            let mut pos = 0;
            for s in 0..r {
                for t in s..r {
                    let v = if i == j {
                        x[i][s] * x[i][t] % q
                    } else {
                        (x[i][s] * x[j][t] + x[i][t] * x[j][s]) % q
                    };
                    acc = (acc + d[pos] as u128 * v) % q;
                    pos += 1;
                }
            }
            out.push(acc as u64);
        }
    }
    out
}

/// Whether `(C, D)` is robust for `L` at level `gamma`: every `sigma` with
/// `|sigma| < gamma n` has `ker(L + C) != ker(L)` on `V_sigma`. Only for
/// `p`-groups.
pub fn is_robust(space: &LiftSpace, lift: &[Vec<u64>], c: &[Vec<u64>], gamma: f64) -> Result<bool> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    if space.group.primes().len() > 1 {
        return Err(Error::InvalidParameter("robustness check needs a p-group".into()));
    }
    let h = space.h_group();
    let mut types: Vec<(u64, Vec<u32>)> = h.gens().iter().map(|g| (g.p, vec![g.e])).collect();
    types.extend(space.group.gens().iter().map(|g| (g.p, vec![g.e])));
    let hg = FinAbGroup::from_types(&types)?;
    let n = lift.first().map_or(0, |x| x.len());
    let r = space.rank();
    let h_img = |k: usize| -> Element { (0..r).map(|t| lift[t][k]).collect() };
    let both_img = |k: usize| -> Element {
        let mut v = h_img(k);
        v.extend(c[k].iter().copied());
        v
    };
    let limit = (gamma * n as f64).ceil() as usize;
    let mut robust = true;
    for s in 0..limit.min(n + 1) {
        let cont = for_each_subset(n, s, |sigma| {
            let keep: Vec<usize> = (0..n).filter(|k| !sigma.contains(k)).collect();
            let a: Vec<Element> = keep.iter().map(|&k| h_img(k)).collect();
            let b: Vec<Element> = keep.iter().map(|&k| both_img(k)).collect();
            let img_h = h.order() / h.subgroup_index(&a);
            let img_both = hg.order() / hg.subgroup_index(&b);
            if img_both == img_h {
                robust = false;
            }
            robust
        });
        if !cont {
            break;
        }
    }
    Ok(robust)
}

pub const CENSUS_BUDGET: u64 = 10_000_000;

/// Enumerates all `(C, D)` in `Hom(V, G*) x Sym^2 H*` for a lift `L` of a
/// surjection onto the `p`-group `G`, counting special pairs.
pub fn special_pair_census(space: &LiftSpace, lift: &[Vec<u64>], gamma: Option<f64>) -> Result<Census> {
    let g = &space.group;
    if g.primes().len() != 1 {
        return Err(Error::InvalidParameter("census needs a nontrivial p-group".into()));
    }
    let r = space.rank();
    let n = lift.first().map_or(0, |x| x.len());
    if lift.len() != r || lift.iter().any(|x| x.len() != n) {
        return Err(Error::DimensionMismatch("lift shape".into()));
    }
    let h = space.h_group();
    let hom = FreeHom::from_rows(h.clone(), lift)?;
    if !h.generated_by(&hom.images) {
        return Err(Error::InvalidParameter("lift is not onto H".into()));
    }
    let q = space.ring[0];
    let sym = q.pow((r * (r + 1) / 2) as u32);
    let order = g.order_u64().unwrap();
    let homs = order.checked_pow(n as u32).ok_or_else(|| Error::BudgetExceeded("Hom(V, G*)".into()))?;
    let pairs = homs.checked_mul(sym).filter(|&x| x <= CENSUS_BUDGET);
    let pairs = pairs.ok_or_else(|| Error::BudgetExceeded(format!("{homs} x {sym} pairs")))?;

    // all pairings on the dual of G, as elements A of Sym_2 H
    let ords = g.orders();
    let mut big_as: Vec<Vec<u64>> = Vec::new();
    for delta in all_grams(g) {
        let a = space.pairing_element(&delta)?;
        big_as.push((0..r).flat_map(|i| (i..r).map(move |j| (i, j))).map(|(i, j)| a[i][j]).collect());
    }

    let c_radix: Vec<u64> = (0..n).flat_map(|_| ords.iter().copied()).collect();
    let d_radix = vec![q; r * (r + 1) / 2];
    let mut special = 0u64;
    let mut d_ok = true;
    let mut min_nonzero: Option<usize> = None;
    let mut weak = 0u64;
    for cd in MixedRadix::new(c_radix) {
        let c: Vec<Vec<u64>> = cd.chunks(r).map(|x| x.to_vec()).collect();
        let mut robust: Option<bool> = None;
        for d in MixedRadix::new(d_radix.clone()) {
            let e = coefficients(space, lift, &c, &d);
            let nonzero = e.iter().filter(|&&x| x != 0).count();
            if nonzero == 0 {
                special += 1;
                for a in &big_as {
                    let v = a.iter().zip(&d).fold(0u128, |acc, (&x, &y)| (acc + x as u128 * y as u128) % q as u128);
                    d_ok &= v == 0;
                }
            } else {
                min_nonzero = Some(min_nonzero.map_or(nonzero, |m| m.min(nonzero)));
                if let Some(gm) = gamma {
                    if robust.is_none() {
                        robust = Some(is_robust(space, lift, &c, gm)?);
                    }
                    weak += !robust.unwrap() as u64;
                }
            }
        }
    }
    Ok(Census {
        group: g.to_string(),
        n,
        lift: lift.to_vec(),
        pairs,
        special,
        predicted: sym / order,
        d_of_a_vanishes: d_ok,
        distance: code_distance(&hom),
        min_nonzero,
        weak: gamma.map(|_| weak),
    })
}

/// A uniformly random surjection `V -> G` as coefficient rows.
pub fn random_surjection(g: &FinAbGroup, n: usize, rng: &mut TrialRng) -> Result<Vec<Vec<u64>>> {
    use rand::Rng;
    if n < g.rank() {
        return Err(Error::InvalidParameter(format!("no surjection from rank {n} onto {g}")));
    }
    let ords = g.orders();
    loop {
        let rows: Vec<Vec<u64>> = ords.iter().map(|&o| (0..n).map(|_| rng.gen_range(0..o)).collect()).collect();
        if FreeHom::from_rows(g.clone(), &rows)?.surjective_without(&[]) {
            return Ok(rows);
        }
    }
}

/// The grid of `p`-groups and sizes on which the census is run.
pub fn census_grid() -> Vec<(FinAbGroup, usize)> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        for lambda in [vec![1u32], vec![2], vec![1, 1]] {
            for n in [2usize, 3] {
                out.push((FinAbGroup::from_prime_type(p, &lambda).unwrap(), n));
            }
        }
    }
    out
}

/// Runs the census on `lifts` random lifts of random surjections for every
/// grid cell.
pub fn run_census_grid(lifts: usize, gamma: Option<f64>, rng: &mut TrialRng) -> Result<Vec<Census>> {
    let mut out = Vec::new();
    for (g, n) in census_grid() {
        let space = LiftSpace::new(&g);
        for _ in 0..lifts {
            let f = random_surjection(&g, n, rng)?;
            let lift = space.random_lift(&f, rng);
            out.push(special_pair_census(&space, &lift, gamma)?);
        }
    }
    Ok(out)
}

/// Checks `depth(F) = 1` exactly when `code_distance(F) >= delta n` over all
/// maps `(Z/a)^n -> G` for the given `delta`s. Returns the violations.
pub fn depth_distance_violations(g: &FinAbGroup, n: usize, deltas: &[f64]) -> Result<Vec<(Vec<Element>, f64)>> {
    let elems: Vec<Element> = g.elements().collect();
    let mut bad = Vec::new();
    for pick in MixedRadix::new(vec![elems.len() as u64; n]) {
        let f = FreeHom::new(g.clone(), pick.iter().map(|&i| elems[i as usize].clone()).collect())?;
        let w = code_distance(&f);
        for &delta in deltas {
            let is_code = w as f64 >= delta * n as f64;
            if (depth(&f, delta)? == BigUint::one()) != is_code {
                bad.push((f.images.clone(), delta));
            }
        }
    }
    Ok(bad)
}

/// One line of the lemma verification table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub lemma: String,
    pub instance: String,
    pub predicted: String,
    pub observed: String,
    pub pass: bool,
}

fn row(lemma: &str, instance: String, predicted: String, observed: String, pass: bool) -> LemmaRow {
    LemmaRow { lemma: lemma.into(), instance, predicted, observed, pass }
}

/// Runs the census over the grid with `lifts` random lifts per cell, the
/// lifted code checks, and the exhaustive depth test.
pub fn verify_lemmas(lifts: usize, rng: &mut TrialRng) -> Result<Vec<LemmaRow>> {
    let mut out = Vec::new();
    for c in run_census_grid(lifts, None, rng)? {
        let inst = format!("{} n={} lift={:?}", c.group, c.n, c.lift);
        out.push(row("special-pairs", inst.clone(), c.predicted.to_string(), c.special.to_string(), c.special == c.predicted));
        out.push(row("d-minus-a", inst.clone(), "0".into(), if c.d_of_a_vanishes { "0" } else { "nonzero" }.into(), c.d_of_a_vanishes));
        let need = c.distance.div_ceil(2);
        let seen = c.min_nonzero.map_or("-".to_string(), |m| m.to_string());
        out.push(row("nonzero-coefficients", inst, format!(">= {need}"), seen, c.min_nonzero.is_none_or(|m| m >= need)));
    }
    let ones = FreeHom::new(FinAbGroup::from_prime_type(2, &[1])?, vec![vec![1]; 3])?;
    let ok = lift_code_check(&ones, 20, rng)?;
    out.push(row("lift-code", "all ones into Z/2, n=3, 20 lifts".into(), "3".into(), if ok { "3" } else { "< 3" }.into(), ok));
    let g = FinAbGroup::from_prime_type(2, &[1, 1])?;
    let mut all = true;
    for _ in 0..20 {
        let f = FreeHom::from_rows(g.clone(), &random_surjection(&g, 5, rng)?)?;
        all &= lift_code_check(&f, 5, rng)?;
    }
    out.push(row("lift-code", "20 codes into Z/2+Z/2, n=5".into(), "kept".into(), if all { "kept" } else { "lost" }.into(), all));
    let deltas = [0.1, 0.2, 0.3, 0.34, 0.4, 0.5, 0.6, 0.67, 0.8, 0.9];
    let bad = depth_distance_violations(&FinAbGroup::from_prime_type(2, &[1])?, 3, &deltas)?;
    out.push(row("depth-code", "all maps into Z/2, n=3".into(), "0".into(), bad.len().to_string(), bad.is_empty()));
    Ok(out)
}

/// `|Sym^2 H|` for `H = (Z/p^(2 lambda_1))^r`.
pub fn sym2_h_order(p: u64, lambda: &[u32]) -> BigUint {
    let r = lambda.len() as u32;
    let top = lambda.first().copied().unwrap_or(0);
    BigUint::from(ipow(p, 2 * top)).pow(r * (r + 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairings::PairingGram;
    use crate::rng::rng_from_seed;

    fn z(p: u64, lambda: &[u32]) -> FinAbGroup {
        FinAbGroup::from_prime_type(p, lambda).unwrap()
    }

    #[test]
    fn constants() {
        let c = cl_constant(2, 20).unwrap();
        assert!((c.value - 0.419_422_0).abs() < 1e-6);
        assert!(c.tail_bound < 1e-12);
        assert!(cl_constant(1009, 5).unwrap().value > 0.999);
        let one = cl_constant(2, 1).unwrap();
        assert_eq!(one.value, 0.5);
        assert!(one.tail_bound <= 0.25);
        let exact = cl_constant_exact(2, 20).to_f64().unwrap();
        assert!((exact - c.value).abs() < 1e-15);
        for k in [1u32, 5, 20] {
            let a = cl_constant(3, k).unwrap();
            let b = cl_constant(3, k + 10).unwrap();
            assert!(a.value - b.value >= 0.0 && a.value - b.value <= a.tail_bound);
        }
    }

    #[test]
    fn predictions() {
        let cls = Classifier::default();
        let trivial = PairedGroup::new(PairingGram::zero(FinAbGroup::trivial()));
        let p0 = clp_probability(&trivial, &[2], &cls).unwrap().probability;
        assert!((p0 - 0.41942).abs() < 1e-5);
        let z2 = PairedGroup::new("Z/2|1/2".parse().unwrap());
        assert!((clp_probability(&z2, &[2], &cls).unwrap().probability - 0.20971).abs() < 1e-5);
        let z3 = PairedGroup::new("Z/3|1/3".parse().unwrap());
        let want = cl_constant(3, DEFAULT_DEPTH).unwrap().value / 6.0;
        assert!((clp_probability(&z3, &[3], &cls).unwrap().probability - want).abs() < 1e-15);
        let degenerate = PairedGroup::new("Z/2|0".parse().unwrap());
        assert_eq!(clp_probability(&degenerate, &[2], &cls).unwrap().probability, 0.0);
    }

    #[test]
    fn masses() {
        assert!((mass_check(&[2], 1).unwrap().total - 0.41942).abs() < 1e-5);
        assert!((mass_check(&[2], 2).unwrap().total - 0.62913).abs() < 1e-5);
        let m = mass_check(&[2], 16).unwrap();
        assert!(m.cumulative.windows(2).all(|w| w[0].1 < w[1].1));
        assert_eq!(m.cumulative.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn class_mass_matches_enumeration() {
        let cls = Classifier::default();
        for g in groups_up_to(&[2, 3], 36) {
            let classes = crate::classify::enumerate_pairing_classes(&g, true, 1 << 24).unwrap();
            let direct: BigRational = classes
                .iter()
                .map(|c| BigRational::new(BigInt::one(), BigInt::from(c.automorphisms.clone())))
                .sum();
            assert_eq!(direct, perfect_class_mass(&g).unwrap(), "{g}");
            for c in classes {
                let pred = clp_probability(&c.id.paired_group(), &g.primes(), &cls).unwrap();
                assert!(pred.probability > 0.0);
            }
        }
    }

    #[test]
    fn group_listing() {
        let gs: Vec<String> = groups_up_to(&[2], 8).iter().map(|g| g.to_string()).collect();
        assert_eq!(gs, ["0", "Z/2", "Z/4", "Z/2+Z/2", "Z/8", "Z/4+Z/2", "Z/2+Z/2+Z/2"]);
        assert_eq!(groups_up_to(&[2, 3], 12).len(), 13);
        assert_eq!(partitions(4).len(), 5);
    }

    #[test]
    fn distances() {
        let g = z(2, &[1]);
        let zero = FreeHom::new(g.clone(), vec![vec![0]; 3]).unwrap();
        assert_eq!(code_distance(&zero), 0);
        let ones = FreeHom::new(g.clone(), vec![vec![1]; 3]).unwrap();
        assert_eq!(code_distance(&ones), 3);
        let first = FreeHom::new(g.clone(), vec![vec![1], vec![0], vec![0]]).unwrap();
        assert_eq!(code_distance(&first), 1);
        assert_eq!(depth(&ones, 0.3).unwrap(), BigUint::one());
        assert_eq!(depth(&first, 0.4).unwrap(), BigUint::from(2u32));
        assert_eq!(depth(&ones, 1e-9).unwrap(), BigUint::one());
        assert!(depth(&ones, 1.0).is_err());
    }

    #[test]
    fn subsets() {
        let mut all = Vec::new();
        for_each_subset(4, 2, |s| {
            all.push(s.to_vec());
            true
        });
        assert_eq!(all.len(), 6);
        assert_eq!(all[5], vec![2, 3]);
        let mut empty = 0;
        for_each_subset(3, 0, |_| {
            empty += 1;
            true
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn census_examples() {
        let space = LiftSpace::new(&z(2, &[1]));
        let c = special_pair_census(&space, &[vec![1, 0]], None).unwrap();
        assert_eq!((c.special, c.predicted), (2, 2));
        assert!(c.passed());
        let space = LiftSpace::new(&z(3, &[1]));
        let c = special_pair_census(&space, &[vec![4, 2]], None).unwrap();
        assert_eq!((c.special, c.predicted), (3, 3));
        assert!(c.d_of_a_vanishes);
        assert!(special_pair_census(&space, &[vec![3, 0]], None).is_err());
    }

    #[test]
    fn census_grid_holds() {
        let mut rng = rng_from_seed(5);
        let all = run_census_grid(2, Some(0.5), &mut rng).unwrap();
        assert_eq!(all.len(), 24);
        for c in all {
            assert!(c.passed(), "{c:?}");
            assert!(c.weak.unwrap() < c.pairs - c.special + 1);
        }
    }

    #[test]
    fn lemma_table() {
        let rows = verify_lemmas(1, &mut rng_from_seed(2)).unwrap();
        assert_eq!(rows.len(), 12 * 3 + 3);
        assert!(rows.iter().all(|r| r.pass));
    }

    #[test]
    fn lifted_codes() {
        let mut rng = rng_from_seed(1);
        let ones = FreeHom::new(z(2, &[1]), vec![vec![1]; 3]).unwrap();
        assert!(lift_code_check(&ones, 20, &mut rng).unwrap());
        let g = FinAbGroup::from_prime_type(2, &[1, 1]).unwrap();
        for _ in 0..20 {
            let f = FreeHom::from_rows(g.clone(), &random_surjection(&g, 5, &mut rng).unwrap()).unwrap();
            assert!(lift_code_check(&f, 5, &mut rng).unwrap());
        }
    }

    #[test]
    fn depth_matches_distance_exhaustively() {
        let bad = depth_distance_violations(&z(2, &[1]), 3, &[0.1, 0.3, 0.34, 0.5, 0.67, 0.9]).unwrap();
        assert!(bad.is_empty(), "{bad:?}");
    }
}
