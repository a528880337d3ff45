//! Sandpile group of a graph and the matrix-tree theorem.

use sandpile::graphs::{laplacian, sample_er, sandpile_with_pairing, spanning_tree_count, ErParams, Graph};

fn main() -> sandpile::error::Result<()> {
    let wheel: Graph = "6:0-1,0-2,0-3,0-4,0-5,1-2,2-3,3-4,4-5,5-1".parse()?;
    let sp = sandpile_with_pairing(&wheel)?;
    println!("wheel W5: {} spanning trees, sandpile group {}", spanning_tree_count(&wheel), sp.torsion.group());
    println!("pairing {}", sp.torsion.pairing.entries_text());

    let g = sample_er(&ErParams { n: 12, q: 0.3, seed: 4 });
    println!("\nER(12, 0.3) seed 4: {} edges, connected {}", g.edges().len(), g.is_connected());
    println!("laplacian:\n{}", laplacian(&g));
    let sp = sandpile_with_pairing(&g)?;
    println!("sandpile group {} of order {}", sp.torsion.group(), sp.torsion.group().order());
    Ok(())
}
