//! The canonical pairing on the torsion of a symmetric cokernel, and its class.

use sandpile::classify::Classifier;
use sandpile::linalg::IntMatrix;
use sandpile::pairings::torsion_pairing;

fn main() -> sandpile::error::Result<()> {
    let m = IntMatrix::from_rows(&[vec![2i64, 1, 0], vec![1, 4, 2], vec![0, 2, 6]])?;
    let tp = torsion_pairing(&m)?;
    let pg = tp.paired_group()?;
    println!("torsion {} (order {})", pg.group(), tp.order());
    println!("gram: {}", pg.pairing.entries_text());
    println!("perfect: {}", pg.perfect);

    let classifier = Classifier::default();
    for p in [2u64, 3] {
        let sylow = pg.pairing.sylow(&[p]);
        let class = classifier.classify(&sylow)?;
        println!("{p}-part: class {} with {} automorphisms", class.id, class.automorphisms);
    }
    Ok(())
}
