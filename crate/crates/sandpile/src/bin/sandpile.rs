use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sandpile::classify::Classifier;
use sandpile::ensembles::{sample_symmetric, EnsembleSpec};
use sandpile::error::{Error, Result};
use sandpile::experiments::{
    plot_csv, plot_rows, run_connectivity, run_distribution, run_moment, write_outputs, ExperimentConfig, Timing,
};
use sandpile::graphs::{laplacian, sandpile_with_pairing, spanning_tree_count, Graph};
use sandpile::linalg::IntMatrix;
use sandpile::pairings::{cokernel_paired_group, PairingGram};
use sandpile::rng::rng_from_seed;
use sandpile::theory::{cl_constant, cl_constant_reversed, mass_check, verify_lemmas};

#[derive(Parser)]
#[command(name = "sandpile", version, about = "Sandpile groups, pairings and cokernel statistics")]
struct Cli {
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory for records and summaries.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Er,
    UniformMod,
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    #[arg(long, value_enum)]
    ensemble: Option<Kind>,
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability of the graph ensemble.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Modulus of the residue ensemble.
    #[arg(long, default_value_t = 8)]
    modulus: u64,
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Largest group order with attached predictions.
    #[arg(long)]
    bound: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print sampled matrices or graphs, one JSON line per trial.
    Sample(EnsembleArgs),
    /// Cokernel, pairing and class of a matrix or graph.
    Classify {
        /// Rows as JSON, e.g. `[[2,-1],[-1,2]]`.
        #[arg(long, conflicts_with = "graph")]
        matrix: Option<String>,
        /// Graph as `n:i-j,...`.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Frequencies of Sylow classes against predictions.
    Distribution(EnsembleArgs),
    /// Mean of `#Sur*` onto a target.
    Moment {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Target group with the pairing on its dual, e.g. `Z/2|1/2`.
        #[arg(long, default_value = "Z/2|1/2")]
        target: String,
    },
    /// Connected fraction of random graphs.
    Connectivity(EnsembleArgs),
    /// Exhaustive checks of the structural lemmas.
    VerifyLemmas {
        /// Random lifts per grid cell.
        #[arg(long, default_value_t = 3)]
        lifts: usize,
    },
    /// Normalizing constants and total predicted mass.
    Constants {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 40)]
        depth: u32,
        #[arg(long, default_value_t = 64)]
        bound: u64,
    },
}

fn config(cli: &Cli, e: &EnsembleArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(EnsembleSpec::er(40, 0.5, 0), 1000, 0),
    };
    if let Some(kind) = e.ensemble {
        let n = e.n.unwrap_or(cfg.ensemble.n);
        cfg.ensemble = match kind {
            Kind::Er => EnsembleSpec::er(n, e.q, 0),
            Kind::UniformMod => EnsembleSpec::uniform_mod(n, e.modulus, 0),
        };
    } else if let Some(n) = e.n {
        cfg.ensemble.n = n;
    }
    if let Some(p) = &e.primes {
        cfg.primes = p.clone();
    }
    if let Some(b) = e.bound {
        cfg.order_bound = b;
    }
    cfg.seed = cli.seed.unwrap_or(cfg.seed);
    cfg.ensemble.seed = cfg.seed;
    cfg.trials = cli.trials.unwrap_or(cfg.trials);
    cfg.jobs = cli.jobs.or(cfg.jobs);
    cfg.out = cli.out.clone().or(cfg.out);
    cfg.validate()?;
    Ok(cfg)
}

fn json<T: Serialize>(x: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(x)?)
}

fn persist<R: Serialize, T: Serialize>(cfg: &ExperimentConfig, name: &str, report: &R, recs: &[T], t: Instant) -> Result<()> {
    if let Some(dir) = &cfg.out {
        let timing = Timing { experiment: name.into(), seconds: t.elapsed().as_secs_f64(), trials: cfg.trials, jobs: cfg.jobs };
        for p in write_outputs(dir, name, report, recs, &timing)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sample(e) => {
            let cfg = config(cli, e)?;
            let spec = cfg.ensemble();
            for t in 0..cfg.trials {
                let line = match spec.sample_graph(t) {
                    Some(g) => serde_json::json!({ "trial": t, "graph": g.to_string() }),
                    None => serde_json::json!({ "trial": t, "matrix": sample_symmetric(&spec, t)?.to_i64_rows() }),
                };
                println!("{line}");
            }
        }
        Command::Classify { matrix, graph, primes } => {
            let m = match (matrix, graph) {
                (Some(text), _) => {
                    let rows: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
                    IntMatrix::from_rows(&rows)?
                }
                (None, Some(text)) => {
                    let g: Graph = text.parse()?;
                    let sp = sandpile_with_pairing(&g)?;
                    println!("spanning trees: {}", spanning_tree_count(&g));
                    println!("sandpile group: {}", sp.torsion.group());
                    laplacian(&g)
                }
                (None, None) => return Err(Error::InvalidParameter("pass --matrix or --graph".into())),
            };
            let (pg, free) = cokernel_paired_group(&m)?;
            let gram = match primes {
                Some(p) => pg.pairing.sylow(p),
                None => pg.pairing.clone(),
            };
            let class = Classifier::default().classify(&gram)?;
            println!("torsion: {}", pg.group());
            println!("free rank: {free}");
            println!("pairing: {}", gram.entries_text());
            println!("perfect: {}", gram.is_perfect());
            println!("class: {} ({})", class.id, class.id.hash);
            println!("automorphisms preserving the pairing: {}", class.automorphisms);
        }
        Command::Distribution(e) => {
            let cfg = config(cli, e)?;
            let t = Instant::now();
            let (report, recs) = run_distribution(&cfg)?;
            persist(&cfg, "distribution", &report, &recs, t)?;
            if let Some(dir) = &cfg.out {
                std::fs::write(dir.join("distribution.csv"), plot_csv(&plot_rows(&report))?)?;
            }
            println!("{:<40} {:>6} {:>9} {:>21} {:>9}", "class", "count", "freq", "95% interval", "predicted");
            for r in report.rows.iter().filter(|r| r.count > 0 || r.predicted.is_some_and(|p| p > 1e-3)) {
                let pred = r.predicted.map_or("-".into(), |p| format!("{p:.5}"));
                println!("{:<40} {:>6} {:>9.5} [{:>8.5}, {:>8.5}] {:>9}", r.class, r.count, r.frequency, r.ci_low, r.ci_high, pred);
            }
            if report.cap_exceeded > 0 {
                println!("cap exceeded: {}", report.cap_exceeded);
            }
            if let Some(c) = &report.chi_square {
                println!("chi-square {:.4} on {} dof, p = {:.4}", c.statistic, c.dof, c.p_value);
            }
        }
        Command::Moment { ensemble, target } => {
            let cfg = config(cli, ensemble)?;
            let target: PairingGram = target.parse()?;
            let t = Instant::now();
            let (report, recs) = run_moment(&cfg, &target)?;
            persist(&cfg, "moment", &report, &recs, t)?;
            println!("{}", json(&report)?);
            return Ok(report.within_three_sigma);
        }
        Command::Connectivity(e) => {
            let cfg = config(cli, e)?;
            let t = Instant::now();
            let (report, recs) = run_connectivity(&cfg)?;
            persist(&cfg, "connectivity", &report, &recs, t)?;
            println!("{}", json(&report)?);
        }
        Command::VerifyLemmas { lifts } => {
            let rows = verify_lemmas(*lifts, &mut rng_from_seed(cli.seed.unwrap_or(0)))?;
            println!("{:<22} {:<46} {:>10} {:>10}  result", "lemma", "instance", "predicted", "observed");
            for r in &rows {
                let verdict = if r.pass { "PASS" } else { "FAIL" };
                println!("{:<22} {:<46} {:>10} {:>10}  {verdict}", r.lemma, r.instance, r.predicted, r.observed);
            }
            return Ok(rows.iter().all(|r| r.pass));
        }
        Command::Constants { primes, depth, bound } => {
            for &p in primes {
                let c = cl_constant(p, *depth)?;
                println!(
                    "p = {p}: {:.12} (tail <= {:.3e}, reversed order {:.12})",
                    c.value,
                    c.tail_bound,
                    cl_constant_reversed(p, *depth)
                );
            }
            let m = mass_check(primes, *bound)?;
            for (order, mass) in &m.cumulative {
                println!("|G| <= {order:>6}: {mass:.12}");
            }
            println!("unexplored: {:.3e}", m.unexplored);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
