//! Pfaffians of antisymmetric matrices and the Z2 sign bookkeeping.
//!
//! The general routine is a Parlett-Reid skew tridiagonalization with partial
//! pivoting: at step `k` the largest entry below the diagonal of column `k` is
//! swapped into position `k+1` (each swap flips the sign), the pivot
//! `A[k, k+1]` multiplies the running product, and a skew-symmetric rank-2
//! update eliminates the rest of row and column `k`.

use std::fmt;
use std::ops::Mul;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::BlochBlock;

const ANTISYMMETRY_TOL: f64 = 1e-10;
const BOUNDARY_TOL: f64 = 1e-12;

/// A ±1 value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `None` for zero or NaN.
    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

/// `(M0, Mπ)` and `ν = M0·Mπ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PfaffianSignPair {
    pub m0: Sign,
    pub mpi: Sign,
    pub nu: Sign,
}

impl PfaffianSignPair {
    pub fn new(m0: Sign, mpi: Sign) -> Self {
        Self { m0, mpi, nu: z2_invariant(m0, mpi) }
    }

    pub fn is_topological(&self) -> bool {
        self.nu == Sign::Minus
    }
}

impl fmt::Display for PfaffianSignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(M0, Mpi) = ({}, {}), nu = {}", self.m0, self.mpi, self.nu)
    }
}

pub fn z2_invariant(m0: Sign, mpi: Sign) -> Sign {
    m0 * mpi
}

fn antisymmetry_residual<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)].clone() + a[(j, i)].clone()).modulus());
        }
    }
    worst
}

/// Pfaffian of an even-dimensional antisymmetric matrix.
pub fn pfaffian<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<T> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch(format!("Pfaffian needs a square matrix, got {}x{}", n, a.ncols())));
    }
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    let scale = a.iter().fold(1.0_f64, |m, z| m.max(z.clone().modulus()));
    let residual = antisymmetry_residual(a);
    if residual > ANTISYMMETRY_TOL * scale {
        return Err(Error::NotAntisymmetric { residual });
    }
    Ok(parlett_reid(a.clone()))
}

fn parlett_reid<T: ComplexField<RealField = f64>>(mut a: DMatrix<T>) -> T {
    let n = a.nrows();
    let mut pf = T::one();
    let mut k = 0;
    while k + 1 < n {
        let (offset, _) = a
            .view((k + 1, k), (n - k - 1, 1))
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, z)| {
                let m = z.clone().modulus();
                if m > best.1 {
                    (i, m)
                } else {
                    best
                }
            });
        let kp = k + 1 + offset;
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)].clone();
        if pivot.clone().modulus() == 0.0 {
            return T::zero();
        }
        pf *= pivot.clone();
        if k + 2 < n {
            let rest = n - k - 2;
            let tau: Vec<T> = (0..rest).map(|i| a[(k, k + 2 + i)].clone() / pivot.clone()).collect();
            let col: Vec<T> = (0..rest).map(|i| a[(k + 2 + i, k + 1)].clone()).collect();
            for i in 0..rest {
                for j in 0..rest {
                    let update = tau[i].clone() * col[j].clone() - col[i].clone() * tau[j].clone();
                    a[(k + 2 + i, k + 2 + j)] += update;
                }
            }
        }
        k += 2;
    }
    pf
}

/// `M = sgn Re(-i Δ₁₂(k_s))`.
///
/// For `Δ(k_s) = p σy` with `p = Pf[iΔ(k_s)] = ½ Tr[Δ σy]` this is `-sgn p`,
/// which equals `sgn y_{k_s}` for every steady state because `h0 < 0`.
pub fn m_sign(delta_ks: &BlochBlock) -> Result<Sign> {
    let d12 = delta_ks.data[(0, 1)];
    if d12.norm() < BOUNDARY_TOL {
        return Err(Error::TopologicalBoundary { magnitude: d12.norm() });
    }
    let value = (-Complex64::i() * d12).re;
    Sign::of(value).ok_or(Error::TopologicalBoundary { magnitude: value.abs() })
}

/// `Pf[iΔ(k_s)] = ½ Tr[Δ(k_s) σy]`.
pub fn pf_i_delta(delta_ks: &BlochBlock) -> f64 {
    (delta_ks.data * crate::pauli::sigma_y()).trace().re * 0.5
}
