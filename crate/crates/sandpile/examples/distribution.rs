//! A distribution experiment from a JSON config, with its plot table.

use sandpile::experiments::{plot_csv, plot_rows, run_distribution, ExperimentConfig};

fn main() -> sandpile::error::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "schema": "sandpile-experiment/1",
            "ensemble": { "kind": { "type": "er_laplacian", "q": 0.5 }, "n": 30, "modulus": 2, "seed": 9 },
            "primes": [2],
            "order_bound": 16,
            "trials": 400,
            "seed": 9
        }"#,
    )?;
    let (report, _) = run_distribution(&cfg)?;
    for r in report.rows.iter().filter(|r| r.count > 0) {
        let pred = r.predicted.map_or("-".into(), |p| format!("{p:.4}"));
        println!("{:<28} {:>4} {:.4} predicted {pred}", r.class, r.count, r.frequency);
    }
    if let Some(c) = &report.chi_square {
        println!("chi-square {:.3} on {} dof, p = {:.3}", c.statistic, c.dof, c.p_value);
    }
    print!("{}", plot_csv(&plot_rows(&report))?);
    Ok(())
}
