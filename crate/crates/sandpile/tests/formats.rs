use std::process::Command;

use proptest::prelude::*;

use sandpile::ensembles::EnsembleSpec;
use sandpile::experiments::{
    from_jsonl, parse_plot_data, plot_csv, plot_rows, run_distribution, to_jsonl, DistributionTrial, ExperimentConfig,
    PLOT_HEADER,
};
use sandpile::groups::FinAbGroup;
use sandpile::pairings::PairingGram;
use sandpile::theory::{cl_constant, cl_constant_exact};

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(EnsembleSpec::er(12, 0.5, 0), 60, 3);
    cfg.order_bound = 8;
    cfg
}

#[test]
fn config_json_round_trips_and_rejects_unknown_fields() {
    let cfg = small_config();
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    let extra = text.replacen('{', r#"{"bogus": 1, "#, 1);
    assert!(ExperimentConfig::from_json(&extra).is_err());
    let mut bad = cfg.clone();
    bad.trials = 0;
    assert!(bad.validate().is_err());
}

#[test]
fn trial_records_round_trip_as_jsonl() {
    let (_, recs) = run_distribution(&small_config()).unwrap();
    let text = to_jsonl(&recs).unwrap();
    assert_eq!(text.lines().count(), recs.len());
    let back: Vec<DistributionTrial> = from_jsonl(&text).unwrap();
    assert_eq!(back, recs);
}

#[test]
fn plot_table_has_a_fixed_header_and_round_trips() {
    let (report, _) = run_distribution(&small_config()).unwrap();
    let rows = plot_rows(&report);
    let text = plot_csv(&rows).unwrap();
    assert_eq!(text.lines().next().unwrap(), PLOT_HEADER);
    assert_eq!(parse_plot_data(&text).unwrap(), rows);
    assert!(parse_plot_data("a,b\n1,2\n").is_err());
}

#[test]
fn reports_are_reproducible() {
    let (a, ra) = run_distribution(&small_config()).unwrap();
    let (b, rb) = run_distribution(&small_config()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(ra, rb);
}

#[test]
fn text_forms() {
    let g: FinAbGroup = "Z/3+Z/4+Z/2".parse().unwrap();
    assert_eq!(g.to_string(), "Z/2+Z/4+Z/3".parse::<FinAbGroup>().unwrap().to_string());
    let d: PairingGram = "Z/4+Z/2|1/4,0/1,0/1,1/2".parse().unwrap();
    assert_eq!(d.to_string().parse::<PairingGram>().unwrap(), d);
    assert!("Z/2|1/3".parse::<PairingGram>().is_err());
}

proptest! {
    #[test]
    fn constant_tail_bound_is_rigorous(p in prop::sample::select(vec![2u64, 3, 5, 7]), k in 1u32..12) {
        use num_traits::ToPrimitive;
        let c = cl_constant(p, k).unwrap();
        let deep = cl_constant_exact(p, k + 30).to_f64().unwrap();
        prop_assert!(c.value >= deep);
        prop_assert!(c.value - deep <= c.tail_bound + 1e-15);
    }
}

fn cli(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sandpile")).args(args).output().unwrap();
    (out.status.success(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_subcommands_run() {
    let (ok, text) = cli(&["classify", "--graph", "3:0-1,1-2,2-0"]);
    assert!(ok);
    assert!(text.contains("spanning trees: 3"), "{text}");
    let (ok, text) = cli(&["classify", "--matrix", "[[2,1],[1,2]]", "--primes", "3"]);
    assert!(ok && text.contains("Z/3"), "{text}");
    let (ok, text) = cli(&["sample", "--ensemble", "uniform-mod", "--n", "3", "--trials", "2", "--seed", "5"]);
    assert!(ok);
    assert_eq!(text.lines().count(), 2);
    let (ok, text) = cli(&["constants", "--bound", "8"]);
    assert!(ok && text.contains("0.4194224417"), "{text}");
    let (ok, text) = cli(&["connectivity", "--ensemble", "er", "--n", "20", "--trials", "50"]);
    assert!(ok && text.contains("\"connected\""), "{text}");
    let (ok, text) = cli(&["moment", "--ensemble", "er", "--n", "15", "--trials", "50"]);
    assert!(text.contains("\"mean\""), "{ok} {text}");
    let (ok, text) = cli(&["distribution", "--ensemble", "er", "--n", "15", "--trials", "50", "--bound", "8"]);
    assert!(ok && text.contains("0|"), "{text}");
}

#[test]
fn cli_writes_outputs_and_reads_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&small_config()).unwrap()).unwrap();
    let out = dir.path().join("out");
    let (ok, _) = cli(&["distribution", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(ok);
    for f in ["distribution.jsonl", "distribution.summary.json", "distribution.timing.json", "distribution.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let recs: Vec<DistributionTrial> = from_jsonl(&std::fs::read_to_string(out.join("distribution.jsonl")).unwrap()).unwrap();
    assert_eq!(recs.len(), 60);
    let (ok, _) = cli(&["distribution", "--config", "/nonexistent.json"]);
    assert!(!ok);
}
