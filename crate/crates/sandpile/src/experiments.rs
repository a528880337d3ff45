//! Experiment orchestration: configs, reports, persistence and plot data.
//!
//! Every trial draws from its own stream derived from `(seed, trial)`, so a
//! report depends only on its config. Wall-clock time is written to a
//! separate file to keep reports bit-identical across reruns.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::classify::{enumerate_pairing_classes, Classifier, PairClassId};
use crate::ensembles::{exceeds_cap, trial_class, ClassOutcome, EnsembleKind, EnsembleSpec};
use crate::error::{Error, Result};
use crate::moments::{moment_trials, summarize_moment, MomentTrial, DEFAULT_BUDGET};
use crate::pairings::PairingGram;
use crate::theory::{clp_for_class, groups_up_to};

/// Schema tag of configs and reports.
pub const SCHEMA: &str = "sandpile-experiment/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Expected counts below this are pooled before comparing distributions.
pub const POOL_THRESHOLD: f64 = 5.0;
/// Bound on the number of predicted classes enumerated for a report.
pub const CLASS_BUDGET: u64 = 1 << 22;

fn schema() -> String {
    SCHEMA.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema")]
    pub schema: String,
    pub ensemble: EnsembleSpec,
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    /// Predictions are attached to all classes with `|G|` up to this bound.
    #[serde(default = "default_bound")]
    pub order_bound: u64,
    pub trials: u64,
    /// Master seed; replaces the ensemble's own seed.
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Exponent caps `(p, k)`; defaults to the ensemble's own.
    #[serde(default)]
    pub caps: Option<Vec<(u64, u32)>>,
}

fn default_primes() -> Vec<u64> {
    vec![2]
}

fn default_bound() -> u64 {
    64
}

impl ExperimentConfig {
    pub fn new(ensemble: EnsembleSpec, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            schema: schema(),
            ensemble,
            primes: default_primes(),
            order_bound: default_bound(),
            trials,
            seed,
            out: None,
            jobs: None,
            caps: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Config(format!("schema `{}`, expected `{SCHEMA}`", self.schema)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if let Some(p) = self.primes.iter().find(|&&p| !crate::arith::is_prime_u64(p)) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if self.order_bound == 0 {
            return Err(Error::Config("order bound must be positive".into()));
        }
        self.ensemble().validate()
    }

    /// The ensemble with the master seed in place.
    pub fn ensemble(&self) -> EnsembleSpec {
        EnsembleSpec { seed: self.seed, ..self.ensemble.clone() }
    }

    pub fn caps(&self) -> Vec<(u64, u32)> {
        self.caps.clone().unwrap_or_else(|| self.ensemble().default_caps())
    }

    /// Runs `f` on a pool with `jobs` threads, or on the global pool.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(f()),
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let den = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / den;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: String,
    pub hash: String,
    pub group: String,
    pub gram: String,
    pub count: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub predicted: Option<f64>,
    pub predicted_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    /// `(label, observed, expected)`; the last bin pools everything else.
    pub bins: Vec<(String, u64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub schema: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub trials: u64,
    pub rows: Vec<ClassRow>,
    pub cap_exceeded: u64,
    /// Total predicted mass of the enumerated classes.
    pub predicted_mass: f64,
    pub chi_square: Option<ChiSquare>,
}

impl DistributionReport {
    pub fn frequency_of(&self, class: &str) -> f64 {
        self.rows.iter().find(|r| r.class == class).map_or(0.0, |r| r.frequency)
    }

    pub fn outcome_counts(&self) -> BTreeMap<String, u64> {
        let mut out: BTreeMap<String, u64> =
            self.rows.iter().filter(|r| r.count > 0).map(|r| (r.class.clone(), r.count)).collect();
        if self.cap_exceeded > 0 {
            out.insert(CAPPED.into(), self.cap_exceeded);
        }
        out
    }
}

pub const CAPPED: &str = "cap_exceeded";
pub const OTHER: &str = "other";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionTrial {
    pub trial: u64,
    pub seed: u64,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: PairClassId,
    pub probability: f64,
    pub error_bound: f64,
}

/// Predictions for every perfect class with `|G| <= bound` supported at
/// `primes`, in order of group size. Cached per `(primes, bound)`.
pub fn predicted_classes(primes: &[u64], bound: u64) -> Result<Vec<Prediction>> {
    static CACHE: OnceLock<Mutex<HashMap<(Vec<u64>, u64), Vec<Prediction>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (primes.to_vec(), bound);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let mut out = Vec::new();
    for g in groups_up_to(primes, bound) {
        for c in enumerate_pairing_classes(&g, true, CLASS_BUDGET)? {
            let pred = clp_for_class(&c, primes)?;
            out.push(Prediction { id: pred.target, probability: pred.probability, error_bound: pred.error_bound });
        }
    }
    cache.lock().unwrap().insert(key, out.clone());
    Ok(out)
}

fn outcome_label(o: &ClassOutcome) -> String {
    match o {
        ClassOutcome::Class(id) => id.text.clone(),
        ClassOutcome::CapExceeded => CAPPED.into(),
    }
}

/// Per-trial outcomes of the distribution experiment, in trial order.
pub fn distribution_trials(cfg: &ExperimentConfig, classifier: &Classifier) -> Result<Vec<DistributionTrial>> {
    cfg.validate()?;
    let spec = cfg.ensemble();
    let caps = cfg.caps();
    cfg.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let o = trial_class(&spec, t, &cfg.primes, &caps, classifier)?;
                Ok(DistributionTrial { trial: t, seed: spec.trial_seed(t), outcome: outcome_label(&o) })
            })
            .collect()
    })?
}

/// Chi-square test of observed counts against predictions. Predicted
/// classes with expected count below the threshold or beyond the caps are
/// pooled with unpredicted and capped outcomes into one bin.
pub fn chi_square(
    counts: &BTreeMap<String, u64>,
    predictions: &[Prediction],
    trials: u64,
    caps: &[(u64, u32)],
) -> Option<ChiSquare> {
    let n = trials as f64;
    let mut bins = Vec::new();
    let mut used_obs = 0;
    let mut used_mass = 0.0;
    for p in predictions {
        let expected = n * p.probability;
        if expected >= POOL_THRESHOLD && (caps.is_empty() || !exceeds_cap(p.id.paired_group().group(), caps)) {
            let obs = counts.get(&p.id.text).copied().unwrap_or(0);
            bins.push((p.id.text.clone(), obs, expected));
            used_obs += obs;
            used_mass += p.probability;
        }
    }
    bins.push((OTHER.to_string(), trials - used_obs, n * (1.0 - used_mass).max(0.0)));
    if bins.len() < 2 {
        return None;
    }
    let statistic: f64 = bins
        .iter()
        .map(|(_, o, e)| if *e > 0.0 { (*o as f64 - e).powi(2) / e } else if *o > 0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = bins.len() as u64 - 1;
    let p_value = ChiSquared::new(dof as f64).map_or(f64::NAN, |d| d.sf(statistic));
    Some(ChiSquare { statistic, dof, p_value, bins })
}

fn class_row(id: &PairClassId, count: u64, trials: u64, pred: Option<&Prediction>) -> ClassRow {
    let pg = id.paired_group();
    let (ci_low, ci_high) = wilson_interval(count, trials);
    ClassRow {
        class: id.text.clone(),
        hash: id.hash.clone(),
        group: pg.group().to_string(),
        gram: pg.pairing.entries_text(),
        count,
        frequency: count as f64 / trials as f64,
        ci_low,
        ci_high,
        predicted: pred.map(|p| p.probability),
        predicted_error: pred.map(|p| p.error_bound),
    }
}

/// Tallies trial outcomes into a report with predictions attached.
pub fn summarize_distribution(
    cfg: &ExperimentConfig,
    records: &[DistributionTrial],
    classifier: &Classifier,
) -> Result<DistributionReport> {
    let predictions = predicted_classes(&cfg.primes, cfg.order_bound)?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for r in records {
        *counts.entry(r.outcome.clone()).or_default() += 1;
    }
    let trials = records.len() as u64;
    let cap_exceeded = counts.get(CAPPED).copied().unwrap_or(0);
    let mut rows: Vec<ClassRow> =
        predictions.iter().map(|p| class_row(&p.id, counts.get(&p.id.text).copied().unwrap_or(0), trials, Some(p))).collect();
    for (label, &c) in &counts {
        if label != CAPPED && !predictions.iter().any(|p| &p.id.text == label) {
            let id = classifier.class_id(&label.parse::<PairingGram>()?)?;
            rows.push(class_row(&id, c, trials, None));
        }
    }
    let predicted_mass = predictions.iter().map(|p| p.probability).sum();
    Ok(DistributionReport {
        schema: schema(),
        version: VERSION.into(),
        config: cfg.clone(),
        trials,
        rows,
        cap_exceeded,
        predicted_mass,
        chi_square: chi_square(&counts, &predictions, trials, &cfg.caps()),
    })
}

/// Samples the ensemble, classifies the `P`-part of every trial and
/// compares the tallies with the predicted frequencies.
pub fn run_distribution(cfg: &ExperimentConfig) -> Result<(DistributionReport, Vec<DistributionTrial>)> {
    let classifier = Classifier::default();
    let records = distribution_trials(cfg, &classifier)?;
    Ok((summarize_distribution(cfg, &records, &classifier)?, records))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub schema: String,
    pub version: String,
    pub config: ExperimentConfig,
    /// The group `G` with the pairing on its dual.
    pub target: String,
    /// `1 / |G|`.
    pub expected: f64,
    pub mean: f64,
    pub stderr: f64,
    pub deviation: f64,
    pub within_three_sigma: bool,
    pub trials: u64,
    pub flagged: u64,
}

/// Estimates `E #Sur*(S, G)` and compares it with `1 / |G|`.
pub fn run_moment(cfg: &ExperimentConfig, target: &PairingGram) -> Result<(MomentReport, Vec<MomentTrial>)> {
    cfg.validate()?;
    let spec = cfg.ensemble();
    let records = cfg.install(|| moment_trials(&spec, target, cfg.trials, DEFAULT_BUDGET))??;
    let est = summarize_moment(&spec, target, &records);
    let expected = 1.0 / target.group().order().to_f64().unwrap();
    let deviation = (est.mean - expected).abs();
    Ok((
        MomentReport {
            schema: schema(),
            version: VERSION.into(),
            config: cfg.clone(),
            target: target.to_string(),
            expected,
            mean: est.mean,
            stderr: est.stderr,
            deviation,
            within_three_sigma: deviation <= 3.0 * est.stderr,
            trials: est.trials,
            flagged: est.flagged,
        },
        records,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub schema: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub trials: u64,
    pub connected: u64,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `1 - n (1 - q)^(n - 1)`, a lower bound on the connection probability.
    pub union_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityTrial {
    pub trial: u64,
    pub seed: u64,
    pub edges: usize,
    pub components: usize,
}

/// Fraction of connected graphs in an Erdos-Renyi ensemble.
pub fn run_connectivity(cfg: &ExperimentConfig) -> Result<(ConnectivityReport, Vec<ConnectivityTrial>)> {
    cfg.validate()?;
    let spec = cfg.ensemble();
    let EnsembleKind::ErLaplacian { q } = spec.kind else {
        return Err(Error::Config("connectivity needs a graph ensemble".into()));
    };
    let records: Vec<ConnectivityTrial> = cfg.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let g = spec.sample_graph(t).expect("graph ensemble");
                ConnectivityTrial { trial: t, seed: spec.trial_seed(t), edges: g.edges().len(), components: g.component_count() }
            })
            .collect()
    })?;
    let connected = records.iter().filter(|r| r.components <= 1).count() as u64;
    let (ci_low, ci_high) = wilson_interval(connected, cfg.trials);
    let n = spec.n as f64;
    Ok((
        ConnectivityReport {
            schema: schema(),
            version: VERSION.into(),
            config: cfg.clone(),
            trials: cfg.trials,
            connected,
            fraction: connected as f64 / cfg.trials as f64,
            ci_low,
            ci_high,
            union_bound: (1.0 - n * (1.0 - q).powf(n - 1.0)).max(0.0),
        },
        records,
    ))
}

/// Total variation distance between two outcome tallies after merging the
/// outcomes outside `keep` into one bucket.
pub fn tv_distance(a: &BTreeMap<String, u64>, b: &BTreeMap<String, u64>, keep: &[String]) -> f64 {
    let pool = |m: &BTreeMap<String, u64>| -> (BTreeMap<String, f64>, f64) {
        let n: u64 = m.values().sum();
        let mut out = BTreeMap::new();
        for (k, &v) in m {
            let key = if keep.contains(k) { k.clone() } else { OTHER.to_string() };
            *out.entry(key).or_insert(0.0) += v as f64;
        }
        (out, n.max(1) as f64)
    };
    let (pa, na) = pool(a);
    let (pb, nb) = pool(b);
    let keys: std::collections::BTreeSet<&String> = pa.keys().chain(pb.keys()).collect();
    keys.into_iter()
        .map(|k| (pa.get(k).copied().unwrap_or(0.0) / na - pb.get(k).copied().unwrap_or(0.0) / nb).abs())
        .sum::<f64>()
        / 2.0
}

/// Classes whose predicted count reaches the pooling threshold.
pub fn unpooled_classes(report: &DistributionReport) -> Vec<String> {
    report
        .rows
        .iter()
        .filter(|r| r.predicted.is_some_and(|p| p * report.trials as f64 >= POOL_THRESHOLD))
        .map(|r| r.class.clone())
        .collect()
}

/// A row of the plot table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub class: String,
    pub group: String,
    pub gram: String,
    pub count: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub predicted: Option<f64>,
}

pub const PLOT_HEADER: &str = "class,group,gram,count,frequency,ci_low,ci_high,predicted";

pub fn plot_rows(report: &DistributionReport) -> Vec<PlotRow> {
    report
        .rows
        .iter()
        .map(|r| PlotRow {
            class: r.class.clone(),
            group: r.group.clone(),
            gram: r.gram.clone(),
            count: r.count,
            frequency: r.frequency,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            predicted: r.predicted,
        })
        .collect()
}

/// Writes the plot table as CSV.
pub fn emit_plot_data<W: Write>(rows: &[PlotRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(PLOT_HEADER.split(',')).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn plot_csv(rows: &[PlotRow]) -> Result<String> {
    let mut buf = Vec::new();
    emit_plot_data(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_plot_data(text: &str) -> Result<Vec<PlotRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.join(",") != PLOT_HEADER {
        return Err(Error::Parse(format!("unexpected header `{}`", header.join(","))));
    }
    r.deserialize().map(|x| x.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// JSON lines, one record per line.
pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r)?);
        s.push('\n');
    }
    Ok(s)
}

pub fn from_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Timing {
    pub experiment: String,
    pub seconds: f64,
    pub trials: u64,
    pub jobs: Option<usize>,
}

/// Writes `<dir>/<name>.jsonl`, `<name>.summary.json` and
/// `<name>.timing.json`. Returns the paths written.
pub fn write_outputs<R: Serialize, T: Serialize>(
    dir: &Path,
    name: &str,
    report: &R,
    records: &[T],
    timing: &Timing,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let paths = vec![
        dir.join(format!("{name}.jsonl")),
        dir.join(format!("{name}.summary.json")),
        dir.join(format!("{name}.timing.json")),
    ];
    fs::write(&paths[0], to_jsonl(records)?)?;
    fs::write(&paths[1], serde_json::to_string_pretty(report)? + "\n")?;
    fs::write(&paths[2], serde_json::to_string_pretty(timing)? + "\n")?;
    Ok(paths)
}
