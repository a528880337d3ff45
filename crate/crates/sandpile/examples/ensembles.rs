//! Seeded matrix ensembles and the Sylow classes of their cokernels.

use sandpile::classify::Classifier;
use sandpile::ensembles::{sample_symmetric, trial_class, ClassOutcome, EnsembleSpec, EntryDistribution, Weight};

fn main() -> sandpile::error::Result<()> {
    let dist = EntryDistribution::new(vec![0, 1, 2], vec![Weight::new(1, 2), Weight::new(1, 4), Weight::new(1, 4)])?;
    let specs = [
        EnsembleSpec::er(10, 0.5, 1),
        EnsembleSpec::uniform_mod(10, 8, 1),
        EnsembleSpec::alpha_balanced(10, dist, Weight::new(1, 4), 2, 1),
    ];
    let classifier = Classifier::default();
    for spec in &specs {
        println!("{}", spec.name());
        println!("{}", sample_symmetric(spec, 0)?);
        for t in 0..5 {
            match trial_class(spec, t, &[2], &spec.default_caps(), &classifier)? {
                ClassOutcome::Class(id) => println!("  trial {t}: {id}"),
                ClassOutcome::CapExceeded => println!("  trial {t}: cap exceeded"),
            }
        }
    }
    Ok(())
}
