//! Smith normal form of an integer matrix and the cokernel it describes.

use sandpile::linalg::{smith_normal_form, Cokernel, IntMatrix};

fn main() -> sandpile::error::Result<()> {
    let m = IntMatrix::from_rows(&[vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]])?;
    let snf = smith_normal_form(&m);
    println!("m =\n{m}");
    println!("invariant factors: {:?}", snf.d.iter().map(|x| x.to_string()).collect::<Vec<_>>());

    let (u, v) = (snf.u.as_ref().unwrap(), snf.v.as_ref().unwrap());
    assert_eq!(u.mul(&m)?.mul(v)?, snf.diagonal_matrix());

    let cok = Cokernel::from_snf(snf);
    println!("torsion order {} free rank {}", cok.torsion_order(), cok.free_rank());
    println!("det = {}", m.determinant()?);
    Ok(())
}
