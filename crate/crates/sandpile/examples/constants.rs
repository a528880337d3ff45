//! Normalizing constants and the predicted mass of small groups.

use sandpile::classify::Classifier;
use sandpile::pairings::PairedGroup;
use sandpile::theory::{cl_constant, cl_constant_exact, cl_constant_reversed, clp_probability, mass_check};

fn main() -> sandpile::error::Result<()> {
    for p in [2u64, 3, 5] {
        let c = cl_constant(p, 40)?;
        println!("p = {p}: {:.15} (tail <= {:.1e}, reversed {:.15})", c.value, c.tail_bound, cl_constant_reversed(p, 40));
    }
    println!("exact at depth 3: {}", cl_constant_exact(2, 3));

    let classifier = Classifier::default();
    for text in ["0|", "Z/2|1/2", "Z/4|1/4", "Z/4|3/4", "Z/2+Z/2|0/1,1/2,1/2,0/1"] {
        let pg = PairedGroup::new(text.parse()?);
        let pred = clp_probability(&pg, &[2], &classifier)?;
        println!("{text:<22} {:.6}", pred.probability);
    }

    let m = mass_check(&[2], 32)?;
    for (order, mass) in &m.cumulative {
        println!("|G| <= {order:>3}: {mass:.6}");
    }
    Ok(())
}
