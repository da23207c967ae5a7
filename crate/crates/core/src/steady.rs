//! Steady states of the correlation-matrix equation `H_eff Δ - Δ H_eff† = 4iY`.
//!
//! At the high-symmetry momenta the Pfaffian of the steady state reduces to
//! `Pf[iΔ_s(k_s)] = 2 y_{k_s} / h0(k_s)` in both PT regimes, so the Z2 index
//! is fixed by the sign of `y` alone.


use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyapunov;
use crate::model::{BlochBlock, BlochSystem, DissipatorSpec, HVector, HamiltonianSpec, RealSpaceSystem};
use crate::pauli;
use crate::pfaffian::{m_sign, pf_i_delta, PfaffianSignPair, Sign};
use crate::quench::HighSymmetry;
use crate::realspace::{CorrelationMatrix, Generator};

const SINGULAR_TOL: f64 = 1e-12;
const SPECTRAL_TOL: f64 = 1e-10;
const Y_BOUNDARY_TOL: f64 = 1e-12;
const UNDAMPED_TOL: f64 = 1e-10;
/// Largest `2N` solved through the dense vectorized system.
const VECTORIZED_MAX_DIM: usize = 24;

fn eigenvalues2(h: &Matrix2<Complex64>) -> (Complex64, Complex64) {
    let half_tr = (h[(0, 0)] + h[(1, 1)]) * 0.5;
    let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
    let root = (half_tr * half_tr - det).sqrt();
    (half_tr + root, half_tr - root)
}

fn min_liouvillian_gap(lp: Complex64, lm: Complex64) -> f64 {
    [lp, lm]
        .iter()
        .flat_map(|a| [lp, lm].map(|b| (a - b.conj()).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Unique solution of `H Δ - Δ H† = 4iY` through the 4x4 vectorized operator `H ⊗ I - I ⊗ H*`.
pub fn steady_bloch_direct(heff: &BlochBlock, yblock: &BlochBlock) -> Result<BlochBlock> {
    let h = &heff.data;
    let (lp, lm) = eigenvalues2(h);
    if min_liouvillian_gap(lp, lm) < SINGULAR_TOL * (1.0 + h.norm()) {
        return Err(Error::NoUniqueSteadyState);
    }
    // row-major vec: (a, b) -> 2a + b
    let mut op = Matrix4::<Complex64>::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                op[(2 * a + b, 2 * c + b)] += h[(a, c)];
                op[(2 * a + b, 2 * a + c)] -= h[(b, c)].conj();
            }
        }
    }
    let rhs = Vector4::from_fn(|r, _| yblock.data[(r / 2, r % 2)] * Complex64::new(0.0, 4.0));
    let sol = op.lu().solve(&rhs).ok_or(Error::NoUniqueSteadyState)?;
    Ok(BlochBlock::new(heff.k, Matrix2::from_fn(|a, b| sol[2 * a + b])))
}

/// Biorthonormal eigen-decomposition of a 2x2 `H_eff`.
///
/// `H|ψ±⟩ = λ±|ψ±⟩`, `H†|χ±⟩ = λ±*|χ±⟩`, `⟨χ_m|ψ_n⟩ = δ_mn`; each `ψ` has unit
/// norm and its first non-negligible component real positive.
#[derive(Debug, Clone, Copy)]
pub struct SpectralDecomposition {
    pub heff: BlochBlock,
    pub lambda: [Complex64; 2],
    pub right: [Vector2<Complex64>; 2],
    pub left: [Vector2<Complex64>; 2],
}

impl SpectralDecomposition {
    pub fn new(heff: &BlochBlock) -> Result<Self> {
        let h = heff.data;
        let scale = 1.0 + h.norm();
        let (lp, lm) = eigenvalues2(&h);
        let right = if (lp - lm).norm() < SPECTRAL_TOL * scale {
            if (h - Matrix2::identity() * lp).norm() > SPECTRAL_TOL * scale {
                // exceptional point: a single eigenvector
                return Err(Error::SpectralDegenerate);
            }
            [Vector2::new(1.0.into(), 0.0.into()), Vector2::new(0.0.into(), 1.0.into())]
        } else {
            [right_vector(&h, lp), right_vector(&h, lm)]
        };
        let p = Matrix2::from_columns(&right);
        let det = p.determinant();
        if det.norm() < SPECTRAL_TOL {
            return Err(Error::SpectralDegenerate);
        }
        let pinv = p.try_inverse().ok_or(Error::SpectralDegenerate)?;
        let left = [pinv.row(0).adjoint(), pinv.row(1).adjoint()];
        Ok(Self { heff: *heff, lambda: [lp, lm], right, left })
    }

    /// `Σ_m |ψ_m⟩⟨χ_m|`, the identity for a valid decomposition.
    pub fn completeness(&self) -> Matrix2<Complex64> {
        self.right[0] * self.left[0].adjoint() + self.right[1] * self.left[1].adjoint()
    }
}

fn right_vector(h: &Matrix2<Complex64>, lambda: Complex64) -> Vector2<Complex64> {
    let a = Vector2::new(h[(0, 1)], lambda - h[(0, 0)]);
    let b = Vector2::new(lambda - h[(1, 1)], h[(1, 0)]);
    let v = if a.norm() >= b.norm() { a } else { b };
    let v = v / Complex64::from(v.norm());
    let pivot = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
    v * (pivot.conj() / pivot.norm())
}

/// `Δ_s = 4i Σ_{m,n} ⟨χ_m|Y|χ_n⟩ / (λ_m - λ_n*) |ψ_m⟩⟨ψ_n|`.
pub fn steady_bloch_spectral(decomp: &SpectralDecomposition, yblock: &BlochBlock) -> Result<BlochBlock> {
    let mut delta = Matrix2::<Complex64>::zeros();
    for m in 0..2 {
        for n in 0..2 {
            let denom = decomp.lambda[m] - decomp.lambda[n].conj();
            if denom.norm() < SPECTRAL_TOL {
                return Err(Error::SpectralDegenerate);
            }
            let amp = (decomp.left[m].adjoint() * yblock.data * decomp.left[n])[(0, 0)];
            let coeff = Complex64::new(0.0, 4.0) * amp / denom;
            delta += decomp.right[m] * decomp.right[n].adjoint() * coeff;
        }
    }
    Ok(BlochBlock::new(decomp.heff.k, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PtPhase {
    Preserved,
    Broken,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtRegime {
    pub phase: PtPhase,
    /// `E(k_s)`, principal square root of `hy² - hx² - hz²`.
    pub e: Complex64,
}

pub fn pt_regime(h: &HVector) -> PtRegime {
    let disc = h.discriminant();
    let tol = SINGULAR_TOL * (1.0 + h.hx * h.hx + h.hy * h.hy + h.hz * h.hz);
    let phase = if disc > tol {
        PtPhase::Preserved
    } else if disc < -tol {
        PtPhase::Broken
    } else {
        PtPhase::Boundary
    };
    PtRegime { phase, e: h.splitting() }
}

/// `f_{m,n} = ⟨χ_m|σy|χ_n⟩⟨ψ_n|σy|ψ_m⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapFactors {
    pub pp: Complex64,
    pub pm: Complex64,
    pub mp: Complex64,
    pub mm: Complex64,
}

impl OverlapFactors {
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        match (m, n) {
            (0, 0) => self.pp,
            (0, 1) => self.pm,
            (1, 0) => self.mp,
            _ => self.mm,
        }
    }
}

pub fn overlap_factors(decomp: &SpectralDecomposition) -> Result<OverlapFactors> {
    let h = decomp.heff.data;
    let residual = (h.conjugate() + h).norm();
    if residual > SINGULAR_TOL * (1.0 + h.norm()) {
        return Err(Error::NotHighSymmetry { residual });
    }
    let sy = pauli::sigma_y();
    let f = |m: usize, n: usize| {
        let left = (decomp.left[m].adjoint() * sy * decomp.left[n])[(0, 0)];
        let right = (decomp.right[n].adjoint() * sy * decomp.right[m])[(0, 0)];
        left * right
    };
    Ok(OverlapFactors { pp: f(0, 0), pm: f(0, 1), mp: f(1, 0), mm: f(1, 1) })
}

/// `Pf[iΔ_s(k_s)] = 2 y / h0`.
pub fn steady_pf_closed(y_ks: f64, h0: f64) -> Result<f64> {
    if h0 == 0.0 {
        return Err(Error::UndampedHighSymmetry);
    }
    if h0 > 0.0 {
        return Err(Error::InvalidSpec(format!("h0 must be negative, got {h0}")));
    }
    Ok(2.0 * y_ks / h0)
}

fn y_tolerance(d: &DissipatorSpec) -> f64 {
    Y_BOUNDARY_TOL * d.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>().max(1.0)
}

pub(crate) fn sign_of_y(d: &DissipatorSpec, ks: HighSymmetry) -> Result<Sign> {
    let y = BlochSystem::dissipative(d, ks.k())?.y()?;
    if y.abs() <= y_tolerance(d) {
        return Err(Error::BoundaryMomentum(ks));
    }
    Ok(Sign::of(y).expect("nonzero"))
}

/// `(M0, Mπ) = (sgn y(0), sgn y(π))`.
pub fn steady_nu(d: &DissipatorSpec) -> Result<PfaffianSignPair> {
    Ok(PfaffianSignPair::new(sign_of_y(d, HighSymmetry::Zero)?, sign_of_y(d, HighSymmetry::Pi)?))
}

/// Steady-state quantities at one high-symmetry momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyPoint {
    pub ks: HighSymmetry,
    pub y: f64,
    pub h0: f64,
    /// `Pf[iΔ_s(k_s)]` from the direct solve.
    pub pf: f64,
    pub m: Sign,
    pub delta: BlochBlock,
}

pub fn steady_point(h: &HamiltonianSpec, d: &DissipatorSpec, ks: HighSymmetry) -> Result<SteadyPoint> {
    let sys = BlochSystem::new(h, d, ks.k())?;
    let hv = sys.h_vector()?;
    let y = sys.y()?;
    let delta = steady_bloch_direct(&sys.heff(), &sys.yblock)?;
    let m = m_sign(&delta)?;
    Ok(SteadyPoint { ks, y, h0: hv.h0, pf: pf_i_delta(&delta), m, delta })
}

/// Signs from the direct steady-state solve with the Hamiltonian included.
pub fn steady_signs_direct(h: &HamiltonianSpec, d: &DissipatorSpec) -> Result<PfaffianSignPair> {
    let m0 = steady_point(h, d, HighSymmetry::Zero)?.m;
    let mpi = steady_point(h, d, HighSymmetry::Pi)?.m;
    Ok(PfaffianSignPair::new(m0, mpi))
}

/// Evenly spaced samples `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            return self.min;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn step(&self) -> f64 {
        if self.count <= 1 {
            0.0
        } else {
            (self.max - self.min) / (self.count - 1) as f64
        }
    }
}

/// Grid over `u1/v1` and `u2/v1` at fixed `v2/v1` (with `v1 = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub u1_over_v1: Axis,
    pub u2_over_v1: Axis,
    pub v2_over_v1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMethod {
    /// Signs of `y(0)`, `y(π)`.
    ClosedForm,
    /// Signs of the directly solved steady state with this Hamiltonian.
    DirectSolve(HamiltonianSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellPhase {
    Phase(PfaffianSignPair),
    /// Sign undefined at the flagged momenta.
    Boundary { at_zero: bool, at_pi: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCell {
    pub u1_over_v1: f64,
    pub u2_over_v1: f64,
    pub phase: CellPhase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub grid: PhaseGrid,
    /// Row-major: `cells[i * u2.count + j]` has `u1 = u1.value(i)`, `u2 = u2.value(j)`.
    pub cells: Vec<PhaseCell>,
}

impl PhaseDiagram {
    pub fn cell(&self, i: usize, j: usize) -> &PhaseCell {
        &self.cells[i * self.grid.u2_over_v1.count + j]
    }
}

fn classify(d: &DissipatorSpec, method: &PhaseMethod) -> Result<CellPhase> {
    let sign_at = |ks: HighSymmetry| -> Result<Option<Sign>> {
        let r = match method {
            PhaseMethod::ClosedForm => sign_of_y(d, ks),
            PhaseMethod::DirectSolve(h) => {
                // boundary decided on y so both methods flag identical cells
                match sign_of_y(d, ks) {
                    Ok(_) => steady_point(h, d, ks).map(|p| p.m),
                    Err(e) => Err(e),
                }
            }
        };
        match r {
            Ok(s) => Ok(Some(s)),
            Err(Error::BoundaryMomentum(_)) | Err(Error::TopologicalBoundary { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let m0 = sign_at(HighSymmetry::Zero)?;
    let mpi = sign_at(HighSymmetry::Pi)?;
    Ok(match (m0, mpi) {
        (Some(a), Some(b)) => CellPhase::Phase(PfaffianSignPair::new(a, b)),
        (a, b) => CellPhase::Boundary { at_zero: a.is_none(), at_pi: b.is_none() },
    })
}

/// Phase diagram; cells are evaluated in parallel.
pub fn phase_diagram(grid: &PhaseGrid, method: PhaseMethod) -> Result<PhaseDiagram> {
    let n1 = grid.u1_over_v1.count;
    let n2 = grid.u2_over_v1.count;
    let cells = (0..n1 * n2)
        .into_par_iter()
        .map(|idx| {
            let u1 = grid.u1_over_v1.value(idx / n2);
            let u2 = grid.u2_over_v1.value(idx % n2);
            let d = DissipatorSpec::real(u1, u2, 1.0, grid.v2_over_v1, 4, crate::model::Boundary::Periodic);
            let phase = match d.validate() {
                Err(Error::NoDissipation) => CellPhase::Boundary { at_zero: true, at_pi: true },
                Err(e) => return Err(e),
                Ok(()) => classify(&d, &method)?,
            };
            Ok(PhaseCell { u1_over_v1: u1, u2_over_v1: u2, phase })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseDiagram { grid: *grid, cells })
}

/// What to do with Majorana modes that decouple from every jump operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndampedPolicy {
    /// Fail with [`Error::UndampedModes`].
    #[default]
    Reject,
    /// Give the undamped block zero correlation, i.e. the state reached from `Δ = 0`.
    InfiniteTemperature,
}

/// Orthonormal basis (columns) of the largest subspace annihilated by `X` and invariant under `Kr`.
pub(crate) fn undamped_subspace(x: &DMatrix<f64>, kr: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let eig = x.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let cols: Vec<_> = (0..n)
        .filter(|&i| eig.eigenvalues[i] < UNDAMPED_TOL * top)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    let mut basis = DMatrix::from_columns(&cols);
    let k_scale = kr.norm().max(1.0);
    loop {
        let d = basis.ncols();
        if d == 0 {
            return basis;
        }
        let image = kr * &basis;
        let leak = &image - &basis * (basis.transpose() * &image);
        if leak.norm() < UNDAMPED_TOL * k_scale {
            return basis;
        }
        // keep combinations whose image stays inside the subspace
        let gram = leak.transpose() * &leak;
        let g = gram.symmetric_eigen();
        let keep: Vec<_> = (0..d)
            .filter(|&i| g.eigenvalues[i].max(0.0).sqrt() < UNDAMPED_TOL * k_scale)
            .map(|i| g.eigenvectors.column(i).into_owned())
            .collect();
        if keep.is_empty() {
            return DMatrix::zeros(n, 0);
        }
        if keep.len() == d {
            return basis;
        }
        basis = &basis * DMatrix::from_columns(&keep);
    }
}

/// Real-space steady state solving `H_eff Δ - Δ H_eff† = 4iY` on the full chain.
///
/// With `Δ = iA` the equation is the real Lyapunov problem `W A + A Wᵀ = 4 Y_r`,
/// `W = 2(K_r - X)`. Small systems use the dense vectorized solve, larger ones
/// a squared Smith iteration.
pub fn steady_realspace(h: &HamiltonianSpec, d: &DissipatorSpec, policy: UndampedPolicy) -> Result<CorrelationMatrix> {
    let sys = RealSpaceSystem::new(h, d)?;
    let gen = Generator::new(&sys)?;
    steady_from_generator(&gen, policy)
}

pub(crate) fn steady_from_generator(gen: &Generator, policy: UndampedPolicy) -> Result<CorrelationMatrix> {
    let n = gen.dim();
    let undamped = undamped_subspace(&gen.x, &gen.kr);
    if undamped.ncols() > 0 && policy == UndampedPolicy::Reject {
        return Err(Error::UndampedModes { count: undamped.ncols(), boundary: gen.boundary.to_string() });
    }
    let w = gen.dense_w();
    let rhs = &gen.yr * 4.0;

    let x_eig = gen.x.clone().symmetric_eigenvalues();
    let x_top = x_eig.iter().fold(0.0_f64, |m, v| m.max(*v));
    let x_low = x_eig.iter().filter(|v| **v >= UNDAMPED_TOL * x_top.max(1.0)).fold(f64::INFINITY, |m, v| m.min(*v));
    let lo = 2.0 * if x_low.is_finite() { x_low } else { 1.0 };
    let hi = 2.0 * x_top + 2.0 * gen.kr.norm();
    let shift = (lo * hi.max(lo)).sqrt();

    let mut w_solve = w.clone();
    if undamped.ncols() > 0 {
        w_solve -= &undamped * undamped.transpose() * shift;
    }
    let a = if n <= VECTORIZED_MAX_DIM {
        lyapunov::solve_vectorized(&w_solve, &rhs)?
    } else {
        lyapunov::solve_smith(&w_solve, &rhs, shift)?
    };
    let a = (&a - a.transpose()) * 0.5;
    let residual = (&w * &a + &a * w.transpose() - &rhs).norm();
    if residual > 1e-8 * rhs.norm().max(1.0) {
        return Err(Error::NotConverged { iterations: 0, residual });
    }
    CorrelationMatrix::from_real(a, gen.boundary)
}
