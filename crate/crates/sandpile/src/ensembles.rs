//! Random symmetric integer matrices and the classification of their
//! cokernels.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::factor_u64;
use crate::classify::{Classifier, PairClassId};
use crate::error::{Error, Result};
use crate::graphs::{laplacian, sample_er, sandpile_sylow, ErParams, Graph};
use crate::groups::FinAbGroup;
use crate::linalg::IntMatrix;
use crate::local::{max_precision, LocalSnf};
use crate::pairings::{torsion_pairing, PairingGram, TorsionPairing};
use crate::rng::{rng_from_seed, trial_seed, TrialRng};

pub type Weight = Ratio<u64>;

mod ratio_text {
    use super::Weight;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Weight, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&w.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Weight, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(|_| D::Error::custom(format!("bad fraction {s:?}")))
    }

    pub mod vec {
        use super::Weight;
        use serde::{de::Error, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(ws: &[Weight], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(ws.iter().map(|w| w.to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Weight>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter()
                .map(|s| s.trim().parse().map_err(|_| D::Error::custom(format!("bad fraction {s:?}"))))
                .collect()
        }
    }
}

/// A finitely supported law on the integers with rational weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDistribution {
    pub support: Vec<i64>,
    #[serde(with = "ratio_text::vec")]
    pub weights: Vec<Weight>,
}

impl EntryDistribution {
    pub fn new(support: Vec<i64>, weights: Vec<Weight>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::InvalidParameter("support and weights must match".into()));
        }
        if weights.iter().any(|w| w.is_zero()) {
            return Err(Error::InvalidParameter("weights must be positive".into()));
        }
        if weights.iter().fold(Weight::zero(), |a, &w| a + w) != Weight::one() {
            return Err(Error::InvalidParameter("weights must sum to 1".into()));
        }
        Ok(EntryDistribution { support, weights })
    }

    pub fn uniform(support: Vec<i64>) -> Result<Self> {
        let k = support.len() as u64;
        Self::new(support, vec![Weight::new(1, k.max(1)); k as usize])
    }

    /// Largest total weight of a residue class mod `p`.
    pub fn max_residue_weight(&self, p: u64) -> Weight {
        let mut acc: Vec<(i64, Weight)> = Vec::new();
        for (&s, &w) in self.support.iter().zip(&self.weights) {
            let t = s.rem_euclid(p as i64);
            match acc.iter_mut().find(|x| x.0 == t) {
                Some(x) => x.1 += w,
                None => acc.push((t, w)),
            }
        }
        acc.into_iter().map(|x| x.1).max().unwrap_or_else(Weight::zero)
    }

    /// Checks `Prob(x = t mod p) <= 1 - alpha` for every prime `p` of
    /// `modulus` and every residue `t`.
    pub fn check_balanced(&self, alpha: Weight, modulus: u64) -> Result<()> {
        if alpha.is_zero() || alpha >= Weight::one() {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        for (p, _) in factor_u64(modulus) {
            let w = self.max_residue_weight(p);
            if w > Weight::one() - alpha {
                return Err(Error::UnbalancedDistribution(format!(
                    "a residue mod {p} has weight {w} > 1 - {alpha}"
                )));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut TrialRng) -> i64 {
        let den = self.weights.iter().fold(1u64, |a, w| a.lcm(w.denom()));
        let u = rng.gen_range(0..den);
        let mut acc = 0u64;
        for (s, w) in self.support.iter().zip(&self.weights) {
            acc += w.numer() * (den / w.denom());
            if u < acc {
                return *s;
            }
        }
        *self.support.last().unwrap()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Laplacian of an Erdos-Renyi graph with edge probability `q`.
    ErLaplacian { q: f64 },
    /// Independent upper-triangle entries from `dist`.
    AlphaBalanced {
        dist: EntryDistribution,
        #[serde(with = "ratio_text")]
        alpha: Weight,
    },
    /// Independent upper-triangle entries uniform in `[0, modulus)`.
    UniformMod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    /// The sampling modulus `a`; for balanced ensembles it names the primes
    /// at which balance is certified.
    pub modulus: u64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn er(n: usize, q: f64, seed: u64) -> Self {
        EnsembleSpec { kind: EnsembleKind::ErLaplacian { q }, n, modulus: 2, seed }
    }

    pub fn uniform_mod(n: usize, modulus: u64, seed: u64) -> Self {
        EnsembleSpec { kind: EnsembleKind::UniformMod, n, modulus, seed }
    }

    pub fn alpha_balanced(n: usize, dist: EntryDistribution, alpha: Weight, modulus: u64, seed: u64) -> Self {
        EnsembleSpec { kind: EnsembleKind::AlphaBalanced { dist, alpha }, n, modulus, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modulus < 2 {
            return Err(Error::InvalidParameter("modulus must be at least 2".into()));
        }
        match &self.kind {
            EnsembleKind::ErLaplacian { q } if !(0.0..=1.0).contains(q) => {
                Err(Error::InvalidParameter(format!("edge probability {q}")))
            }
            EnsembleKind::AlphaBalanced { dist, alpha } => dist.check_balanced(*alpha, self.modulus),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            EnsembleKind::ErLaplacian { q } => format!("er(n={}, q={q})", self.n),
            EnsembleKind::AlphaBalanced { alpha, .. } => format!("alpha_balanced(n={}, alpha={alpha})", self.n),
            EnsembleKind::UniformMod => format!("uniform_mod_{}(n={})", self.modulus, self.n),
        }
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        trial_seed(self.seed, trial)
    }

    /// The graph behind trial `trial` of an Erdos-Renyi ensemble.
    pub fn sample_graph(&self, trial: u64) -> Option<Graph> {
        match self.kind {
            EnsembleKind::ErLaplacian { q } => Some(sample_er(&ErParams { n: self.n, q, seed: self.trial_seed(trial) })),
            _ => None,
        }
    }

    /// Exponent caps `(p, k)`: cokernels with a cyclic factor of order at
    /// least `p^k` cannot be told apart from larger ones at this modulus.
    /// Only the uniform residue ensemble is capped.
    pub fn default_caps(&self) -> Vec<(u64, u32)> {
        match self.kind {
            EnsembleKind::UniformMod => factor_u64(self.modulus),
            _ => Vec::new(),
        }
    }
}

/// Trial `trial` of the ensemble. Deterministic in `(spec, trial)`.
pub fn sample_symmetric(spec: &EnsembleSpec, trial: u64) -> Result<IntMatrix> {
    spec.validate()?;
    if let Some(g) = spec.sample_graph(trial) {
        return Ok(laplacian(&g));
    }
    let n = spec.n;
    let mut rng = rng_from_seed(spec.trial_seed(trial));
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = match &spec.kind {
                EnsembleKind::UniformMod => rng.gen_range(0..spec.modulus) as i64,
                EnsembleKind::AlphaBalanced { dist, .. } => dist.sample(&mut rng),
                EnsembleKind::ErLaplacian { .. } => unreachable!(),
            };
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    IntMatrix::from_rows(&m)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassOutcome {
    Class(PairClassId),
    CapExceeded,
}

fn cap_of(caps: &[(u64, u32)], p: u64) -> Option<u32> {
    caps.iter().find(|c| c.0 == p).map(|c| c.1)
}

/// Whether some cyclic factor of the `primes`-part reaches its cap.
pub fn exceeds_cap(g: &FinAbGroup, caps: &[(u64, u32)]) -> bool {
    g.gens().iter().any(|x| cap_of(caps, x.p).is_some_and(|k| x.e >= k))
}

/// The `primes`-part of the torsion of `cok(m)` with its pairing, or `None`
/// when a capped prime has a factor of order at least `p^k` (a free summand
/// counts). Uses the local reduction first and the exact route on failure.
pub fn sylow_pairing(m: &IntMatrix, primes: &[u64], caps: &[(u64, u32)]) -> Result<Option<PairingGram>> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let mut exact: Option<TorsionPairing> = None;
    let mut out = PairingGram::zero(FinAbGroup::trivial());
    for &p in primes {
        let local = LocalSnf::new(m, p, max_precision(p))?;
        if let Some(k) = cap_of(caps, p) {
            if local.val.iter().any(|&v| v >= k) {
                return Ok(None);
            }
        }
        let part = match local.torsion_pairing() {
            Some(g) => g,
            None => {
                if exact.is_none() {
                    exact = Some(torsion_pairing(m)?);
                }
                exact.as_ref().unwrap().sylow(&[p])?.pairing
            }
        };
        out = out.direct_sum(&part)?;
    }
    Ok(Some(out))
}

/// Class of the `primes`-part of `tcok(m)` with its restricted pairing.
pub fn cokernel_pairing_class(
    m: &IntMatrix,
    primes: &[u64],
    caps: &[(u64, u32)],
    classifier: &Classifier,
) -> Result<ClassOutcome> {
    match sylow_pairing(m, primes, caps)? {
        Some(g) => Ok(ClassOutcome::Class(classifier.class_id(&g)?)),
        None => Ok(ClassOutcome::CapExceeded),
    }
}

/// The `primes`-part with pairing for trial `trial`, through the sandpile
/// route for graph ensembles. `None` when a cap is reached.
pub fn trial_sylow(spec: &EnsembleSpec, trial: u64, primes: &[u64], caps: &[(u64, u32)]) -> Result<Option<PairingGram>> {
    if let Some(g) = spec.sample_graph(trial) {
        let gram = sandpile_sylow(&g, primes)?;
        // the torsion of a disconnected graph sits beside a free part of rank
        // at least one, which a capped prime would see
        let capped = primes.iter().any(|&p| cap_of(caps, p).is_some());
        if exceeds_cap(gram.group(), caps) || (capped && !g.is_connected()) {
            return Ok(None);
        }
        return Ok(Some(gram));
    }
    sylow_pairing(&sample_symmetric(spec, trial)?, primes, caps)
}

pub fn trial_class(
    spec: &EnsembleSpec,
    trial: u64,
    primes: &[u64],
    caps: &[(u64, u32)],
    classifier: &Classifier,
) -> Result<ClassOutcome> {
    match trial_sylow(spec, trial, primes, caps)? {
        Some(g) => Ok(ClassOutcome::Class(classifier.class_id(&g)?)),
        None => Ok(ClassOutcome::CapExceeded),
    }
}
