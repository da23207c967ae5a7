//! Real continuous Lyapunov equations `W A + A Wᵀ = C` for stable `W`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_DOUBLINGS: usize = 64;

/// Squared Smith iteration.
///
/// With a Cayley shift `p > 0`, `Φ = (W - p)⁻¹ (W + p)` has spectral radius
/// below one for stable `W`, and the solution is `A = Σ_j Φʲ Q Φʲᵀ` with
/// `Q = -2p (W - p)⁻¹ C (W - p)⁻ᵀ`. Each doubling step squares `Φ`.
pub fn solve_smith(w: &DMatrix<f64>, c: &DMatrix<f64>, shift: f64) -> Result<DMatrix<f64>> {
    let n = w.nrows();
    if w.ncols() != n || c.nrows() != n || c.ncols() != n {
        return Err(Error::DimensionMismatch("Lyapunov operands must be square and equal-sized".into()));
    }
    let shifted = w - DMatrix::<f64>::identity(n, n) * shift;
    let lu = shifted.lu();
    let inv = lu.try_inverse().ok_or(Error::NoUniqueSteadyState)?;
    let mut phi = &inv * (w + DMatrix::<f64>::identity(n, n) * shift);
    let mut a = (&inv * c * inv.transpose()) * (-2.0 * shift);

    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_DOUBLINGS {
        let increment = &phi * &a * phi.transpose();
        a += &increment;
        let inc = increment.norm();
        if inc <= 1e-15 * scale.max(a.norm()) {
            return Ok(a);
        }
        phi = &phi * &phi;
    }
    let residual = (w * &a + &a * w.transpose() - c).norm();
    Err(Error::NotConverged { iterations: MAX_DOUBLINGS, residual })
}

/// Direct solve of the vectorized system `(W ⊗ I + I ⊗ W) vec(A) = vec(C)`.
///
/// Dense in `n²` unknowns; intended for small problems and cross-checks.
pub fn solve_vectorized(w: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = w.nrows();
    let dim = n * n;
    let mut op = DMatrix::<f64>::zeros(dim, dim);
    // row-major vec: index (i, j) -> i * n + j
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                op[(row, k * n + j)] += w[(i, k)];
                op[(row, i * n + k)] += w[(j, k)];
            }
        }
    }
    let rhs = DVector::from_iterator(dim, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| c[(i, j)]));
    let sol = op.lu().solve(&rhs).ok_or(Error::NoUniqueSteadyState)?;
    Ok(DMatrix::from_fn(n, n, |i, j| sol[i * n + j]))
}
