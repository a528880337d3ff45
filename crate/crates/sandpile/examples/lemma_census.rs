//! Exhaustive census of special pairs and code checks at small sizes.

use sandpile::groups::FinAbGroup;
use sandpile::moments::LiftSpace;
use sandpile::rng::rng_from_seed;
use sandpile::theory::{random_surjection, special_pair_census, verify_lemmas};

fn main() -> sandpile::error::Result<()> {
    let mut rng = rng_from_seed(1);
    let g = FinAbGroup::from_prime_type(2, &[1, 1])?;
    let space = LiftSpace::new(&g);
    let f = random_surjection(&g, 3, &mut rng)?;
    let lift = space.random_lift(&f, &mut rng);
    let c = special_pair_census(&space, &lift, Some(0.5))?;
    println!("{} n={}: {} pairs, {} special, predicted {}", c.group, c.n, c.pairs, c.special, c.predicted);

    let rows = verify_lemmas(1, &mut rng)?;
    let passed = rows.iter().filter(|r| r.pass).count();
    for r in rows.iter().take(6) {
        println!("{:<22} {:<40} {:>8} {:>8}", r.lemma, r.instance, r.predicted, r.observed);
    }
    println!("{passed} of {} checks pass", rows.len());
    Ok(())
}
