use nalgebra::Matrix2;
use num_complex::Complex64;

const O: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Matrix2<Complex64> {
    Matrix2::new(ONE, O, O, ONE)
}

pub fn sigma_x() -> Matrix2<Complex64> {
    Matrix2::new(O, ONE, ONE, O)
}

pub fn sigma_y() -> Matrix2<Complex64> {
    Matrix2::new(O, -I, I, O)
}

pub fn sigma_z() -> Matrix2<Complex64> {
    Matrix2::new(ONE, O, O, -ONE)
}
