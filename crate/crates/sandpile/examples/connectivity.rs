//! How quickly random graphs become connected.

use sandpile::ensembles::EnsembleSpec;
use sandpile::experiments::{run_connectivity, ExperimentConfig};

fn main() -> sandpile::error::Result<()> {
    for n in [5usize, 10, 20, 40] {
        let cfg = ExperimentConfig::new(EnsembleSpec::er(n, 0.5, 3), 2000, 3);
        let (r, _) = run_connectivity(&cfg)?;
        println!("n = {n:>2}: connected {:.4} [{:.4}, {:.4}], union bound {:.4}", r.fraction, r.ci_low, r.ci_high, r.union_bound);
    }
    Ok(())
}
