//! Pfaffians of antisymmetric matrices and the sign bookkeeping behind `ν`.

use lindblad_z2::pfaffian::{pfaffian, z2_invariant, Sign};
use nalgebra::DMatrix;

fn main() -> Result<(), lindblad_z2::Error> {
    // Pf = a12 a34 - a13 a24 + a14 a23 for a 4x4 matrix
    let upper = [(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0), (1, 2, 4.0), (1, 3, 5.0), (2, 3, 6.0)];
    let mut a = DMatrix::<f64>::zeros(4, 4);
    for &(i, j, v) in &upper {
        a[(i, j)] = v;
        a[(j, i)] = -v;
    }
    let pf = pfaffian(&a)?;
    println!("Pf(A) = {pf}, Pf^2 = {}, det(A) = {}", pf * pf, a.clone().determinant());

    // a 10x10 matrix with a dense pattern
    let n = 10;
    let b = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
    let skew = &b - b.transpose();
    let pf = pfaffian(&skew)?;
    println!("10x10: Pf = {pf:.6}, Pf^2 = {:.6}, det = {:.6}", pf * pf, skew.determinant());

    match pfaffian(&DMatrix::<f64>::zeros(3, 3)) {
        Err(e) => println!("3x3 input: {e}"),
        Ok(_) => unreachable!(),
    }

    for (m0, mpi) in [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Minus)] {
        println!("M0 = {m0:>2}, Mpi = {mpi:>2}  ->  nu = {:>2}", z2_invariant(m0, mpi));
    }
    Ok(())
}
