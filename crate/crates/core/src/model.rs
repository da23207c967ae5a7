//! Static matrices of a quadratic Lindbladian on a 1D chain.
//!
//! Majorana ordering: index `2 * site + flavor`, flavor 0 and 1 standing for
//! `w_{m,1}` and `w_{m,2}` with `c_m = (w_{m,1} + i w_{m,2}) / sqrt(2)`.
//!
//! Momentum blocks use `A(k)_{s,s'} = sum_d A_{(0,s),(d,s')} exp(-i k d)` where
//! `d` is the minimal-image displacement and no `1/N` factor is applied.
//! With this convention products, transposes and adjoints of translation
//! invariant matrices act blockwise, and the real-space spectrum is the union
//! of the block spectra over the momentum grid.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli;

/// Ring size used for momentum-space quantities that do not depend on `N`.
const REFERENCE_RING: usize = 4;

const TRANSLATION_TOL: f64 = 1e-10;
const HIGH_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[serde(alias = "pbc")]
    Periodic,
    #[serde(alias = "obc")]
    Open,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => write!(f, "PBC"),
            Boundary::Open => write!(f, "OBC"),
        }
    }
}

/// Kitaev chain `H = sum_n [-J c†_n c_{n+1} + delta c_n c_{n+1} + h.c.] - mu sum_n c†_n c_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub j: f64,
    pub delta: f64,
    pub mu: f64,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl HamiltonianSpec {
    pub fn new(j: f64, delta: f64, mu: f64, n_sites: usize, boundary: Boundary) -> Self {
        Self { j, delta, mu, n_sites, boundary }
    }

    pub fn zero(n_sites: usize, boundary: Boundary) -> Self {
        Self::new(0.0, 0.0, 0.0, n_sites, boundary)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidSpec(format!("n_sites must be >= 2, got {}", self.n_sites)));
        }
        if !(self.j.is_finite() && self.delta.is_finite() && self.mu.is_finite()) {
            return Err(Error::InvalidSpec("Hamiltonian amplitudes must be finite".into()));
        }
        Ok(())
    }

    pub fn with_lattice(&self, n_sites: usize, boundary: Boundary) -> Self {
        Self { n_sites, boundary, ..*self }
    }
}

/// Nearest-neighbour jump operators `L_n = u1 c_n + u2 c_{n+1} + v1 c†_n + v2 c†_{n+1}`.
///
/// Under open boundaries the last operator keeps only its on-site part,
/// `L_N = u1 c_N + v1 c†_N`, so there are always `N` jump operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipatorSpec {
    pub u1: Complex64,
    pub u2: Complex64,
    pub v1: Complex64,
    pub v2: Complex64,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl DissipatorSpec {
    pub fn new(
        u1: Complex64,
        u2: Complex64,
        v1: Complex64,
        v2: Complex64,
        n_sites: usize,
        boundary: Boundary,
    ) -> Self {
        Self { u1, u2, v1, v2, n_sites, boundary }
    }

    /// Real amplitudes.
    pub fn real(u1: f64, u2: f64, v1: f64, v2: f64, n_sites: usize, boundary: Boundary) -> Self {
        Self::new(u1.into(), u2.into(), v1.into(), v2.into(), n_sites, boundary)
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        [self.u1, self.u2, self.v1, self.v2]
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidSpec(format!("n_sites must be >= 2, got {}", self.n_sites)));
        }
        let amps = self.amplitudes();
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidSpec("dissipator amplitudes must be finite".into()));
        }
        if amps.iter().all(|a| a.norm() == 0.0) {
            return Err(Error::NoDissipation);
        }
        Ok(())
    }

    pub fn with_lattice(&self, n_sites: usize, boundary: Boundary) -> Self {
        Self { n_sites, boundary, ..*self }
    }
}

/// Coefficients `C_{mu,(m,s)}` of `L_mu = sum C_{mu,(m,s)} w_{m,s}`, one row per jump operator.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaCoupling {
    pub c: DMatrix<Complex64>,
    pub n_sites: usize,
    pub boundary: Boundary,
}

/// `M = C^T C^*`, split into its symmetric part `X` and antisymmetric part `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    pub m: DMatrix<Complex64>,
    pub x: DMatrix<Complex64>,
    pub y: DMatrix<Complex64>,
}

/// A 2x2 momentum-space block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochBlock {
    pub k: f64,
    pub data: Matrix2<Complex64>,
}

impl BlochBlock {
    pub fn new(k: f64, data: Matrix2<Complex64>) -> Self {
        Self { k, data }
    }

    pub fn zero(k: f64) -> Self {
        Self::new(k, Matrix2::zeros())
    }

    /// True for `k = 0` or `k = ±π` (mod 2π).
    pub fn is_high_symmetry(&self) -> bool {
        let r = self.k.rem_euclid(2.0 * PI);
        r.abs() < 1e-12 || (r - PI).abs() < 1e-12 || (r - 2.0 * PI).abs() < 1e-12
    }
}

/// Coefficients of `H_eff(k_s) = hy σy + i (h0 I + hx σx + hz σz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HVector {
    pub h0: f64,
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
}

impl HVector {
    /// `hy² - hx² - hz²`; positive in the PT-preserved regime.
    pub fn discriminant(&self) -> f64 {
        self.hy * self.hy - self.hx * self.hx - self.hz * self.hz
    }

    /// `E = sqrt(hy² - hx² - hz²)`, principal branch.
    pub fn splitting(&self) -> Complex64 {
        Complex64::new(self.discriminant(), 0.0).sqrt()
    }

    /// `(λ+, λ-) = (i h0 + E, i h0 - E)`.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let e = self.splitting();
        let c = Complex64::new(0.0, self.h0);
        (c + e, c - e)
    }

    /// Rebuild `H_eff(k_s)` from the components.
    pub fn heff(&self) -> Matrix2<Complex64> {
        let i = Complex64::i();
        pauli::sigma_y() * Complex64::from(self.hy)
            + (pauli::identity() * Complex64::from(self.h0)
                + pauli::sigma_x() * Complex64::from(self.hx)
                + pauli::sigma_z() * Complex64::from(self.hz))
                * i
    }
}

/// Real-space Hamiltonian matrix `K` with `H = sum K_{pq} w_p w_q` (up to a constant).
///
/// Built from the complex-fermion form by substituting the Majorana operators
/// and keeping the antisymmetric part, so `K` is Hermitian and purely imaginary.
pub fn build_kitaev_k(spec: &HamiltonianSpec) -> Result<DMatrix<Complex64>> {
    spec.validate()?;
    let n = spec.n_sites;
    let mut hop = DMatrix::<Complex64>::zeros(n, n);
    let mut pair = DMatrix::<Complex64>::zeros(n, n);
    for site in 0..n {
        hop[(site, site)] -= Complex64::from(spec.mu);
        let next = site + 1;
        if next == n && spec.boundary == Boundary::Open {
            continue;
        }
        let next = next % n;
        hop[(site, next)] -= Complex64::from(spec.j);
        hop[(next, site)] -= Complex64::from(spec.j);
        pair[(site, next)] += Complex64::from(spec.delta);
    }
    Ok(quadratic_to_majorana(&hop, &pair))
}

/// Majorana matrix of `sum h_ij c†_i c_j + sum (g_ij c_i c_j + h.c.)`.
pub fn quadratic_to_majorana(hop: &DMatrix<Complex64>, pair: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = hop.nrows();
    let mut u = DMatrix::<Complex64>::zeros(n, 2 * n);
    for site in 0..n {
        u[(site, 2 * site)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        u[(site, 2 * site + 1)] = Complex64::new(0.0, FRAC_1_SQRT_2);
    }
    let u_dag = u.adjoint();
    let t = &u_dag * hop * &u + u.transpose() * pair * &u + &u_dag * pair.adjoint() * u.conjugate();
    (&t - t.transpose()) * Complex64::from(0.5)
}

pub fn majorana_coefficients(spec: &DissipatorSpec) -> Result<MajoranaCoupling> {
    spec.validate()?;
    let n = spec.n_sites;
    let s = Complex64::from(FRAC_1_SQRT_2);
    let i = Complex64::i();
    let on_site = [(spec.u1 + spec.v1) * s, i * (spec.u1 - spec.v1) * s];
    let neighbour = [(spec.u2 + spec.v2) * s, i * (spec.u2 - spec.v2) * s];

    let mut c = DMatrix::<Complex64>::zeros(n, 2 * n);
    for row in 0..n {
        c[(row, 2 * row)] += on_site[0];
        c[(row, 2 * row + 1)] += on_site[1];
        let next = row + 1;
        if next == n && spec.boundary == Boundary::Open {
            continue;
        }
        let next = next % n;
        c[(row, 2 * next)] += neighbour[0];
        c[(row, 2 * next + 1)] += neighbour[1];
    }
    Ok(MajoranaCoupling { c, n_sites: n, boundary: spec.boundary })
}

pub fn build_mxy(coupling: &MajoranaCoupling) -> CouplingMatrices {
    let c = &coupling.c;
    let m = c.transpose() * c.conjugate();
    let mt = m.transpose();
    let half = Complex64::from(0.5);
    let x = (&m + &mt) * half;
    let y = (&m - &mt) * half;
    CouplingMatrices { m, x, y }
}

/// Largest deviation from `A_{(i,s),(j,s')} = A_{(i+1,s),(j+1,s')}`.
pub fn translation_residual(a: &DMatrix<Complex64>) -> f64 {
    let dim = a.nrows();
    let n = dim / 2;
    let mut worst = 0.0_f64;
    for site in 0..n {
        for d in 0..n {
            let target = (site + d) % n;
            for s in 0..2 {
                for t in 0..2 {
                    let diff = a[(2 * site + s, 2 * target + t)] - a[(s, 2 * d + t)];
                    worst = worst.max(diff.norm());
                }
            }
        }
    }
    worst
}

/// Momentum block of a translation-invariant periodic-chain matrix.
///
/// Any `k` is accepted; for matrices whose couplings are shorter than half the
/// ring the minimal-image sum is the exact lattice Fourier transform, and on
/// the grid `2πj/N` it coincides with the plain sum over all displacements.
pub fn bloch_block(a: &DMatrix<Complex64>, boundary: Boundary, k: f64) -> Result<BlochBlock> {
    if boundary != Boundary::Periodic {
        return Err(Error::NotPeriodic);
    }
    if a.nrows() != a.ncols() || a.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("expected a square 2N x 2N matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    let residual = translation_residual(a);
    let scale = a.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    if residual > TRANSLATION_TOL * scale {
        return Err(Error::NotTranslationInvariant { residual });
    }
    Ok(bloch_block_unchecked(a, k))
}

pub(crate) fn bloch_block_unchecked(a: &DMatrix<Complex64>, k: f64) -> BlochBlock {
    let n = a.nrows() / 2;
    let mut data = Matrix2::<Complex64>::zeros();
    for cell in 0..n {
        let d = minimal_image(cell, n) as f64;
        let phase = Complex64::from_polar(1.0, -k * d);
        for s in 0..2 {
            for t in 0..2 {
                data[(s, t)] += a[(s, 2 * cell + t)] * phase;
            }
        }
    }
    BlochBlock::new(k, data)
}

fn minimal_image(cell: usize, n: usize) -> i64 {
    let c = cell as i64;
    let n = n as i64;
    if 2 * c > n {
        c - n
    } else {
        c
    }
}

/// Allowed momenta `2πj/N` mapped into `[-π, π)`.
pub fn momentum_grid(n_sites: usize) -> Vec<f64> {
    (0..n_sites)
        .map(|j| {
            let k = 2.0 * PI * j as f64 / n_sites as f64;
            if k >= PI {
                k - 2.0 * PI
            } else {
                k
            }
        })
        .collect()
}

pub fn h_components(kblock: &BlochBlock, xblock: &BlochBlock) -> Result<HVector> {
    let x = &xblock.data;
    let kk = &kblock.data;
    let h0 = -x.trace();
    let hx = -(x * pauli::sigma_x()).trace();
    let hy = (kk * pauli::sigma_y()).trace();
    let hz = -(x * pauli::sigma_z()).trace();
    let scale = 1.0 + x.norm() + kk.norm();
    let residual = [h0, hx, hy, hz].iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
    if residual > HIGH_SYMMETRY_TOL * scale {
        return Err(Error::NotHighSymmetry { residual });
    }
    let h = HVector { h0: h0.re, hx: hx.re, hy: hy.re, hz: hz.re };
    // The decomposition holds only when K has no σx, σz, I parts and X no σy part.
    let heff = (kk - x * Complex64::i()) * Complex64::from(2.0);
    let rebuilt = (heff - h.heff()).norm();
    if rebuilt > HIGH_SYMMETRY_TOL * scale * 4.0 {
        return Err(Error::NotHighSymmetry { residual: rebuilt });
    }
    Ok(h)
}

/// `y_{k_s}` with `Y(k_s) = y σy`.
pub fn y_scalar(yblock: &BlochBlock) -> Result<f64> {
    let y = (yblock.data * pauli::sigma_y()).trace() * 0.5;
    let scale = 1.0 + yblock.data.norm();
    let residual = (yblock.data - pauli::sigma_y() * Complex64::from(y.re)).norm();
    if residual > HIGH_SYMMETRY_TOL * scale {
        return Err(Error::NotProportionalToSigmaY { residual });
    }
    Ok(y.re)
}

/// `H_eff = 2(K - iX)` for matrices or blocks of any size.
pub fn effective_hamiltonian<D: nalgebra::Dim, S>(
    k: &nalgebra::Matrix<Complex64, D, D, S>,
    x: &nalgebra::Matrix<Complex64, D, D, S>,
) -> nalgebra::OMatrix<Complex64, D, D>
where
    S: nalgebra::Storage<Complex64, D, D>,
    nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<D, D>,
{
    (k - x * Complex64::i()) * Complex64::from(2.0)
}

/// All real-space matrices of one Lindbladian.
#[derive(Debug, Clone)]
pub struct RealSpaceSystem {
    pub k: DMatrix<Complex64>,
    pub x: DMatrix<Complex64>,
    pub y: DMatrix<Complex64>,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl RealSpaceSystem {
    pub fn new(h: &HamiltonianSpec, d: &DissipatorSpec) -> Result<Self> {
        if h.n_sites != d.n_sites || h.boundary != d.boundary {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian lattice ({}, {}) differs from dissipator lattice ({}, {})",
                h.n_sites, h.boundary, d.n_sites, d.boundary
            )));
        }
        let k = build_kitaev_k(h)?;
        let CouplingMatrices { x, y, .. } = build_mxy(&majorana_coefficients(d)?);
        Ok(Self { k, x, y, n_sites: d.n_sites, boundary: d.boundary })
    }

    pub fn heff(&self) -> DMatrix<Complex64> {
        effective_hamiltonian(&self.k, &self.x)
    }
}

/// The 2x2 momentum-space problem at a single `k`.
#[derive(Debug, Clone, Copy)]
pub struct BlochSystem {
    pub k: f64,
    pub kblock: BlochBlock,
    pub xblock: BlochBlock,
    pub yblock: BlochBlock,
}

impl BlochSystem {
    /// Momentum blocks of `(h, d)`; the lattice fields of the specs are ignored.
    pub fn new(h: &HamiltonianSpec, d: &DissipatorSpec, k: f64) -> Result<Self> {
        let h = h.with_lattice(REFERENCE_RING, Boundary::Periodic);
        let d = d.with_lattice(REFERENCE_RING, Boundary::Periodic);
        let sys = RealSpaceSystem::new(&h, &d)?;
        Ok(Self {
            k,
            kblock: bloch_block_unchecked(&sys.k, k),
            xblock: bloch_block_unchecked(&sys.x, k),
            yblock: bloch_block_unchecked(&sys.y, k),
        })
    }

    /// Dissipation-only blocks (`K = 0`).
    pub fn dissipative(d: &DissipatorSpec, k: f64) -> Result<Self> {
        Self::new(&HamiltonianSpec::zero(REFERENCE_RING, Boundary::Periodic), d, k)
    }

    pub fn heff(&self) -> BlochBlock {
        BlochBlock::new(self.k, effective_hamiltonian(&self.kblock.data, &self.xblock.data))
    }

    pub fn h_vector(&self) -> Result<HVector> {
        h_components(&self.kblock, &self.xblock)
    }

    pub fn y(&self) -> Result<f64> {
        y_scalar(&self.yblock)
    }
}
