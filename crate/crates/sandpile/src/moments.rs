//! Counting surjections that carry a pairing on the dual of the source to a
//! given pairing on the dual of the target, and moment estimates.
//!
//! Two independent counts are provided. `count_sur_star_pushforward` works
//! on abstract groups with dual grams. `count_sur_star_congruence` works on
//! a matrix `m` over `Z/a`: a map `F: Z^n -> G` with coefficients `f_ik`
//! counts when
//!
//! ```text
//! sum_k f_ik m_kl = 0                         mod p^lambda_i
//! sum_{k,l} f_ik m_kl f_jl = p^(lambda_i + lambda_j) <g_i^, g_j^>   mod p^(lambda_i + lambda_j)
//! ```
//!
//! The lifted form of the same equations lives on `H = (Z/p^(2 lambda_1))^r`
//! per prime, see [`LiftSpace`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::ipow;
use crate::ensembles::{sample_symmetric, EnsembleSpec};
use crate::error::{Error, Result};
use crate::graphs::sandpile_tensor_dual;
use crate::groups::{check_budget, count_homs, for_each_hom, FinAbGroup, GroupHom, MixedRadix};
use crate::linalg::IntMatrix;
use crate::local::local_tensor_dual_pairing;
use crate::pairings::{cokernel_tensor_dual_pairing, pushforward, PairedGroup, PairingGram};
use crate::rng::TrialRng;

pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Surjections `F: A -> G` with `(F^t)_* source = target`, where both grams
/// are pairings on the duals.
pub fn count_sur_star_pushforward(source: &PairingGram, target: &PairingGram, budget: u64) -> Result<u64> {
    let a = source.group();
    let g = target.group();
    check_budget(&count_homs(a, g), budget, "homomorphisms")?;
    let mut count = 0;
    let mut err = None;
    for_each_hom(a, g, |im| {
        if !g.generated_by(im) {
            return true;
        }
        let f = GroupHom { source: a.clone(), target: g.clone(), images: im.to_vec() };
        match pushforward(&f, source) {
            Ok(p) => count += (&p == target) as u64,
            Err(e) => {
                err = Some(e);
                return false;
            }
        }
        true
    });
    match err {
        Some(e) => Err(e),
        None => Ok(count),
    }
}

/// Per generator of `G`: prime, exponent, order.
fn generator_data(g: &FinAbGroup) -> Vec<(u64, u32, u64)> {
    g.gens().iter().map(|x| (x.p, x.e, x.order)).collect()
}

/// `m` reduced into `[0, a)` as machine words.
fn reduce_words(m: &IntMatrix, a: u64) -> Result<Vec<Vec<u64>>> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let ab = BigInt::from(a);
    Ok((0..m.rows()).map(|i| m.row(i).iter().map(|x| x.mod_floor(&ab).to_u64().unwrap()).collect()).collect())
}

/// `<g_i^, g_j^> * scale` as an integer; `scale` must clear the denominator.
fn scaled_value(target: &PairingGram, i: usize, j: usize, scale: u64) -> u64 {
    let num = target.numerator(i, j) as u128 * scale as u128;
    let e = target.modulus() as u128;
    debug_assert_eq!(num % e, 0);
    (num / e) as u64
}

fn check_modulus(g: &FinAbGroup, a: u64) -> Result<()> {
    let b = g.exponent();
    if a % (b * b) != 0 {
        return Err(Error::InvalidParameter(format!("modulus {a} is not a multiple of {b}^2")));
    }
    Ok(())
}

/// `F` rows as images of the standard basis vectors.
fn columns(f: &[Vec<u64>], n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|k| f.iter().map(|row| row[k]).collect()).collect()
}

/// Counts `F in Sur(Z^n, G)` satisfying the congruences above, for `m` over
/// `Z/a` and `target` a pairing on the dual of `G`. Needs `b^2 | a` for the
/// exponent `b` of `G`.
pub fn count_sur_star_congruence(m: &IntMatrix, a: u64, target: &PairingGram, budget: u64) -> Result<u64> {
    let g = target.group();
    check_modulus(g, a)?;
    let mm = reduce_words(m, a)?;
    let n = mm.len();
    let gens = generator_data(g);
    let r = gens.len();
    if r == 0 {
        return Ok(1);
    }
    check_budget(&(g.order().pow(n as u32)), budget, "maps from Z^n")?;
    // rows allowed by the cokernel condition, with their products with m
    let mut rows: Vec<Vec<(Vec<u64>, Vec<u64>)>> = Vec::with_capacity(r);
    for &(_, _, o) in &gens {
        let mut ok = Vec::new();
        for row in MixedRadix::new(vec![o; n]) {
            let w: Vec<u64> = (0..n)
                .map(|l| (0..n).fold(0u128, |acc, k| (acc + row[k] as u128 * mm[k][l] as u128) % a as u128) as u64)
                .collect();
            if w.iter().all(|x| x % o == 0) {
                ok.push((row, w));
            }
        }
        rows.push(ok);
    }
    let mut count = 0u64;
    let sizes: Vec<u64> = rows.iter().map(|x| x.len() as u64).collect();
    for pick in MixedRadix::new(sizes) {
        let chosen: Vec<&(Vec<u64>, Vec<u64>)> = (0..r).map(|i| &rows[i][pick[i] as usize]).collect();
        let mut good = true;
        'pairs: for i in 0..r {
            for j in i..r {
                if gens[i].0 != gens[j].0 {
                    continue;
                }
                let q = gens[i].2 * gens[j].2;
                let lhs = (0..n).fold(0u128, |acc, l| (acc + chosen[i].1[l] as u128 * chosen[j].0[l] as u128) % q as u128);
                if lhs as u64 != scaled_value(target, i, j, q) % q {
                    good = false;
                    break 'pairs;
                }
            }
        }
        if !good {
            continue;
        }
        let f: Vec<Vec<u64>> = chosen.iter().map(|x| x.0.clone()).collect();
        if g.generated_by(&columns(&f, n)) {
            count += 1;
        }
    }
    Ok(count)
}

/// The lifting data for `G`: per generator `i` of prime `p` the ring
/// `R_p = Z/p^(2 lambda_1)`, the scaling `Lambda: h_i -> p^(2 lambda_1 - lambda_i) h_i`
/// and `Omega: h_i -> p^(lambda_1 - lambda_i) h_i`.
#[derive(Clone, Debug)]
pub struct LiftSpace {
    pub group: FinAbGroup,
    /// Order of `h_i` in `H`.
    pub ring: Vec<u64>,
    pub lambda: Vec<u64>,
    pub omega: Vec<u64>,
}

impl LiftSpace {
    pub fn new(g: &FinAbGroup) -> Self {
        let mut ring = Vec::new();
        let mut lambda = Vec::new();
        let mut omega = Vec::new();
        for x in g.gens() {
            let top = g.p_type(x.p)[0];
            ring.push(ipow(x.p, 2 * top));
            lambda.push(ipow(x.p, 2 * top - x.e));
            omega.push(ipow(x.p, top - x.e));
        }
        LiftSpace { group: g.clone(), ring, lambda, omega }
    }

    /// `H` as a group.
    pub fn h_group(&self) -> FinAbGroup {
        let types: Vec<(u64, Vec<u32>)> =
            self.group.gens().iter().map(|x| (x.p, vec![2 * self.group.p_type(x.p)[0]])).collect();
        FinAbGroup::from_types(&types).expect("prime powers")
    }

    pub fn rank(&self) -> usize {
        self.ring.len()
    }

    fn same_prime(&self, i: usize, j: usize) -> bool {
        self.group.gens()[i].p == self.group.gens()[j].p
    }

    /// The element `A` of `Sym_2 H` encoding a pairing on the dual of `G`:
    /// `A_ij = p^(2 lambda_1) <g_i^, g_j^>` within each prime, zero across.
    pub fn pairing_element(&self, delta: &PairingGram) -> Result<Vec<Vec<u64>>> {
        if delta.group() != &self.group {
            return Err(Error::NotAPairing("pairing lives on a different group".into()));
        }
        let r = self.rank();
        let mut out = vec![vec![0u64; r]; r];
        for i in 0..r {
            for j in 0..r {
                if self.same_prime(i, j) {
                    out[i][j] = scaled_value(delta, i, j, self.ring[i]) % self.ring[i];
                }
            }
        }
        Ok(out)
    }

    /// A uniformly random lift of `f` (rows indexed by generators of `G`).
    pub fn random_lift(&self, f: &[Vec<u64>], rng: &mut TrialRng) -> Vec<Vec<u64>> {
        let gens = self.group.gens();
        f.iter()
            .enumerate()
            .map(|(i, row)| {
                let o = gens[i].order;
                let k = self.ring[i] / o;
                row.iter().map(|&x| x % o + o * rng.gen_range(0..k)).collect()
            })
            .collect()
    }

    /// Whether `lift` reduces to `f` modulo the generator orders.
    pub fn is_lift(&self, f: &[Vec<u64>], lift: &[Vec<u64>]) -> bool {
        let gens = self.group.gens();
        f.len() == self.rank()
            && lift.len() == self.rank()
            && (0..self.rank()).all(|i| {
                let o = gens[i].order;
                f[i].len() == lift[i].len()
                    && f[i].iter().zip(&lift[i]).all(|(&x, &y)| y < self.ring[i] && x % o == y % o)
            })
    }
}

/// Evaluates `Lambda L m = 0` and `Omega L m L^t Omega^t = A` for a lift `L`
/// of `f`, with `m` over `Z/a`. Fails with `NotALift` if `L` does not reduce
/// to `f`.
pub fn lifted_equation_check(
    m: &IntMatrix,
    a: u64,
    f: &[Vec<u64>],
    lift: &[Vec<u64>],
    space: &LiftSpace,
    big_a: &[Vec<u64>],
) -> Result<bool> {
    if !space.is_lift(f, lift) {
        return Err(Error::NotALift);
    }
    if space.ring.iter().any(|&q| a % q != 0) {
        return Err(Error::InvalidParameter(format!("modulus {a} does not cover the lift ring")));
    }
    let mm = reduce_words(m, a)?;
    let n = mm.len();
    let r = space.rank();
    if lift.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("lift width".into()));
    }
    let mut w = vec![vec![0u64; n]; r];
    for i in 0..r {
        let q = space.ring[i] as u128;
        for l in 0..n {
            let s = (0..n).fold(0u128, |acc, k| (acc + lift[i][k] as u128 * (mm[k][l] as u128 % q)) % q);
            if s * space.lambda[i] as u128 % q != 0 {
                return Ok(false);
            }
            w[i][l] = s as u64;
        }
    }
    for i in 0..r {
        for j in i..r {
            if !space.same_prime(i, j) {
                continue;
            }
            let q = space.ring[i] as u128;
            let s = (0..n).fold(0u128, |acc, l| (acc + w[i][l] as u128 * lift[j][l] as u128) % q);
            let v = s * space.omega[i] as u128 % q * space.omega[j] as u128 % q;
            if v as u64 != big_a[i][j] % space.ring[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `f` satisfies the unlifted congruences for `m` and `target`.
pub fn congruence_check(m: &IntMatrix, a: u64, f: &[Vec<u64>], target: &PairingGram) -> Result<bool> {
    let g = target.group();
    check_modulus(g, a)?;
    let mm = reduce_words(m, a)?;
    let n = mm.len();
    let gens = generator_data(g);
    let r = gens.len();
    let mut w = vec![vec![0u64; n]; r];
    for i in 0..r {
        for l in 0..n {
            let s = (0..n).fold(0u128, |acc, k| (acc + f[i][k] as u128 * mm[k][l] as u128) % a as u128) as u64;
            if s % gens[i].2 != 0 {
                return Ok(false);
            }
            w[i][l] = s;
        }
    }
    for i in 0..r {
        for j in i..r {
            if gens[i].0 != gens[j].0 {
                continue;
            }
            let q = gens[i].2 * gens[j].2;
            let lhs = (0..n).fold(0u128, |acc, l| (acc + w[i][l] as u128 * f[j][l] as u128) % q as u128);
            if lhs as u64 != scaled_value(target, i, j, q) % q {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `cok(m) (x) Z/b` with the pairing on its dual, through the word-size
/// route when possible.
pub fn tensor_dual_source(m: &IntMatrix, b: u64) -> Result<PairingGram> {
    match local_tensor_dual_pairing(m, b) {
        Ok(g) => Ok(g),
        Err(_) => cokernel_tensor_dual_pairing(m, b),
    }
}

/// One trial of a moment experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentTrial {
    pub trial: u64,
    pub seed: u64,
    pub group: String,
    pub gram: String,
    /// `None` when the enumeration budget was exceeded.
    pub count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub target: PairedGroup,
    pub mean: f64,
    pub stderr: f64,
    /// Trials that entered the mean.
    pub trials: u64,
    /// Trials dropped because the enumeration budget was exceeded.
    pub flagged: u64,
    pub ensemble: EnsembleSpec,
}

/// The source `S (x) Z/b` of trial `trial`: the sandpile group for graph
/// ensembles, the cokernel otherwise.
pub fn trial_source(spec: &EnsembleSpec, trial: u64, b: u64) -> Result<PairingGram> {
    match spec.sample_graph(trial) {
        Some(g) => sandpile_tensor_dual(&g, b),
        None => tensor_dual_source(&sample_symmetric(spec, trial)?, b),
    }
}

pub fn moment_trial(spec: &EnsembleSpec, target: &PairingGram, trial: u64, budget: u64) -> Result<MomentTrial> {
    let b = target.group().exponent();
    let source = trial_source(spec, trial, b)?;
    let count = match count_sur_star_pushforward(&source, target, budget) {
        Ok(c) => Some(c),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MomentTrial {
        trial,
        seed: spec.trial_seed(trial),
        group: source.group().to_string(),
        gram: source.entries_text(),
        count,
    })
}

/// Per-trial records for trials `0..trials`, in trial order. Runs on the
/// current rayon pool.
pub fn moment_trials(spec: &EnsembleSpec, target: &PairingGram, trials: u64, budget: u64) -> Result<Vec<MomentTrial>> {
    spec.validate()?;
    (0..trials).into_par_iter().map(|t| moment_trial(spec, target, t, budget)).collect()
}

pub fn summarize_moment(spec: &EnsembleSpec, target: &PairingGram, records: &[MomentTrial]) -> MomentEstimate {
    let counts: Vec<f64> = records.iter().filter_map(|r| r.count.map(|c| c as f64)).collect();
    let k = counts.len() as f64;
    let mean = if counts.is_empty() { 0.0 } else { counts.iter().sum::<f64>() / k };
    let stderr = if counts.len() < 2 {
        0.0
    } else {
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    };
    MomentEstimate {
        target: PairedGroup::new(target.clone()),
        mean,
        stderr,
        trials: counts.len() as u64,
        flagged: (records.len() - counts.len()) as u64,
        ensemble: spec.clone(),
    }
}

/// Mean of `#Sur*(S, G)` over `trials` samples, `target` being the pairing
/// on the dual of `G`.
pub fn empirical_moment(spec: &EnsembleSpec, target: &PairingGram, trials: u64) -> Result<MomentEstimate> {
    let records = moment_trials(spec, target, trials, DEFAULT_BUDGET)?;
    Ok(summarize_moment(spec, target, &records))
}
