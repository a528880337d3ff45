//! Finite abelian groups: homomorphisms, surjections and automorphisms.

use sandpile::groups::{aut_order, count_homs, count_surjections, FinAbGroup};
use sandpile::theory::groups_up_to;

fn main() -> sandpile::error::Result<()> {
    let a: FinAbGroup = "Z/4+Z/2".parse()?;
    let b: FinAbGroup = "Z/2+Z/2".parse()?;
    println!("|Hom({a}, {b})| = {}", count_homs(&a, &b));
    println!("|Sur({a}, {b})| = {}", count_surjections(&a, &b, 1 << 20)?);
    println!("|Aut({a})| = {}", aut_order(&a));

    println!("groups of order <= 16 at 2 and 3:");
    for g in groups_up_to(&[2, 3], 16) {
        println!("  {:>3}  {g}", g.order());
    }
    Ok(())
}
