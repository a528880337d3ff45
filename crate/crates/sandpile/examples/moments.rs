//! Counting `Sur*` three ways and estimating the moment over an ensemble.

use sandpile::ensembles::EnsembleSpec;
use sandpile::linalg::IntMatrix;
use sandpile::moments::{count_sur_star_congruence, count_sur_star_pushforward, empirical_moment, tensor_dual_source, DEFAULT_BUDGET};
use sandpile::pairings::PairingGram;

fn main() -> sandpile::error::Result<()> {
    let target: PairingGram = "Z/2|1/2".parse()?;
    let m = IntMatrix::from_rows(&[vec![2i64, 0, 0], vec![0, 2, 0], vec![0, 0, 1]])?;
    let direct = count_sur_star_congruence(&m, 4, &target, DEFAULT_BUDGET)?;
    let pushed = count_sur_star_pushforward(&tensor_dual_source(&m, 2)?, &target, DEFAULT_BUDGET)?;
    println!("#Sur* onto {target}: congruences {direct}, pushforward {pushed}");

    for spec in [EnsembleSpec::er(30, 0.5, 2), EnsembleSpec::uniform_mod(30, 8, 2)] {
        let est = empirical_moment(&spec, &target, 500)?;
        println!("{}: mean {:.4} +- {:.4} over {} trials (limit 0.5)", spec.name(), est.mean, est.stderr, est.trials);
    }
    Ok(())
}
