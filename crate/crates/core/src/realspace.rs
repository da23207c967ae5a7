//! Real-space correlation matrices, their time evolution and entanglement spectra.
//!
//! Because `X` is real symmetric and `K`, `Y`, `Δ` are purely imaginary, the
//! equation of motion closes on the real antisymmetric matrix `A` with `Δ = iA`:
//!
//! ```text
//! dA/dt = W A + A Wᵀ - 4 Y_r,   W = 2 (K_r - X),   K = i K_r,   Y = i Y_r
//! ```
//!
//! `W` is banded, so one right-hand side costs `O(nnz(W) · 2N)` and
//! `A Wᵀ = -(W A)ᵀ` keeps `A` exactly antisymmetric.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{bloch_block, BlochBlock, Boundary, RealSpaceSystem};

const STRUCTURE_TOL: f64 = 1e-10;
const ENTRY_BOUND: f64 = 1.0 + 1e-6;
/// RK4 is stable for `|dt λ| ≲ 2.78` on the imaginary and negative real axis.
const RK4_STABILITY: f64 = 2.5;

/// Correlation matrix `Δ = iA` of a Gaussian state, stored as the real antisymmetric `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    imag: DMatrix<f64>,
    boundary: Boundary,
}

impl CorrelationMatrix {
    pub fn from_real(a: DMatrix<f64>, boundary: Boundary) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!("correlation matrix must be 2N x 2N, got {}x{}", a.nrows(), a.ncols())));
        }
        let residual = (&a + a.transpose()).amax();
        if residual > STRUCTURE_TOL {
            return Err(Error::NotAntisymmetric { residual });
        }
        Ok(Self { imag: a, boundary })
    }

    /// Accepts a Hermitian antisymmetric (purely imaginary) complex matrix.
    pub fn from_complex(delta: &DMatrix<Complex64>, boundary: Boundary) -> Result<Self> {
        let herm = (delta - delta.adjoint()).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if herm > STRUCTURE_TOL {
            return Err(Error::NotHermitian { residual: herm });
        }
        let anti = (delta + delta.transpose()).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if anti > STRUCTURE_TOL {
            return Err(Error::NotAntisymmetric { residual: anti });
        }
        Self::from_real(delta.map(|z| z.im), boundary)
    }

    pub fn zeros(n_sites: usize, boundary: Boundary) -> Self {
        Self { imag: DMatrix::zeros(2 * n_sites, 2 * n_sites), boundary }
    }

    /// The real matrix `A` with `Δ = iA`.
    pub fn imag(&self) -> &DMatrix<f64> {
        &self.imag
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.imag.map(|v| Complex64::new(0.0, v))
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn n_sites(&self) -> usize {
        self.imag.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.imag.nrows()
    }

    /// Principal submatrix over a site interval (a reduced state).
    pub fn restrict(&self, sites: Range<usize>) -> Result<Self> {
        if sites.end > self.n_sites() || sites.is_empty() {
            return Err(Error::DimensionMismatch(format!("site range {sites:?} outside 0..{}", self.n_sites())));
        }
        let start = 2 * sites.start;
        let len = 2 * sites.len();
        Ok(Self { imag: self.imag.view((start, start), (len, len)).into_owned(), boundary: Boundary::Open })
    }

    pub fn bloch_block(&self, k: f64) -> Result<BlochBlock> {
        bloch_block(&self.to_complex(), self.boundary, k)
    }
}

/// Real form of the equation of motion for one Lindbladian.
#[derive(Debug, Clone)]
pub struct Generator {
    pub kr: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub yr: DMatrix<f64>,
    pub boundary: Boundary,
    w_rows: Vec<Vec<(usize, f64)>>,
}

impl Generator {
    pub fn new(sys: &RealSpaceSystem) -> Result<Self> {
        Self::from_matrices(&sys.k, &sys.x, &sys.y, sys.boundary)
    }

    /// From complex `K` (Hermitian, antisymmetric), `X` (real symmetric) and `Y` (Hermitian, antisymmetric).
    pub fn from_matrices(
        k: &DMatrix<Complex64>,
        x: &DMatrix<Complex64>,
        y: &DMatrix<Complex64>,
        boundary: Boundary,
    ) -> Result<Self> {
        let dim = k.nrows();
        for (name, m) in [("K", k), ("X", x), ("Y", y)] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!("{name} must be {dim}x{dim}")));
            }
        }
        let scale = 1.0 + k.norm() + x.norm() + y.norm();
        let bad = k.iter().chain(y.iter()).map(|z| z.re.abs()).chain(x.iter().map(|z| z.im.abs())).fold(0.0, f64::max);
        if bad > STRUCTURE_TOL * scale {
            return Err(Error::InvalidSpec(format!("K and Y must be purely imaginary and X real (residual {bad:.3e})")));
        }
        let kr = k.map(|z| z.im);
        let xr = x.map(|z| z.re);
        let yr = y.map(|z| z.im);
        let w = (&kr - &xr) * 2.0;
        let w_rows = (0..dim)
            .map(|i| (0..dim).filter_map(|j| (w[(i, j)] != 0.0).then(|| (j, w[(i, j)]))).collect())
            .collect();
        Ok(Self { kr, x: xr, yr, boundary, w_rows })
    }

    pub fn dim(&self) -> usize {
        self.kr.nrows()
    }

    pub fn dense_w(&self) -> DMatrix<f64> {
        (&self.kr - &self.x) * 2.0
    }

    /// Gershgorin bound on the spectral radius of `A ↦ W A + A Wᵀ`.
    pub fn radius_bound(&self) -> f64 {
        2.0 * self.w_rows.iter().map(|r| r.iter().map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `dA/dt` written into `out`.
    pub fn derivative(&self, a: &DMatrix<f64>, out: &mut DMatrix<f64>) {
        let n = self.dim();
        let mut wa = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let col = a.column(j);
            for (i, row) in self.w_rows.iter().enumerate() {
                let mut s = 0.0;
                for &(k, v) in row {
                    s += v * col[k];
                }
                wa[(i, j)] = s;
            }
        }
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] = wa[(i, j)] - wa[(j, i)] - 4.0 * self.yr[(i, j)];
            }
        }
    }
}

/// Snapshots of an evolution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CorrelationMatrix>,
}

fn axpy(dst: &mut DMatrix<f64>, alpha: f64, src: &DMatrix<f64>) {
    dst.zip_apply(src, |d, s| *d += alpha * s);
}

fn rk4_step(gen: &Generator, a: &mut DMatrix<f64>, h: f64, scratch: &mut [DMatrix<f64>; 5]) {
    let [k1, k2, k3, k4, tmp] = scratch;
    gen.derivative(a, k1);
    tmp.copy_from(a);
    axpy(tmp, 0.5 * h, k1);
    gen.derivative(tmp, k2);
    tmp.copy_from(a);
    axpy(tmp, 0.5 * h, k2);
    gen.derivative(tmp, k3);
    tmp.copy_from(a);
    axpy(tmp, h, k3);
    gen.derivative(tmp, k4);
    axpy(a, h / 6.0, k1);
    axpy(a, h / 3.0, k2);
    axpy(a, h / 3.0, k3);
    axpy(a, h / 6.0, k4);
}

/// States at the requested (non-decreasing, non-negative) times.
///
/// Fixed-step RK4 with step at most `dt`; each interval between requested
/// times is split into equal steps so that every snapshot lands exactly.
pub fn evolve_delta_at(delta0: &CorrelationMatrix, gen: &Generator, times: &[f64], dt: f64) -> Result<Trajectory> {
    if delta0.dim() != gen.dim() || delta0.boundary != gen.boundary {
        return Err(Error::DimensionMismatch("initial state and generator describe different chains".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidSpec(format!("dt must be positive, got {dt}")));
    }
    let radius = gen.radius_bound();
    if dt * radius > RK4_STABILITY {
        return Err(Error::StepTooLarge { dt, radius, suggested: RK4_STABILITY / radius });
    }
    let n = gen.dim();
    let mut a = delta0.imag.clone();
    let mut scratch: [DMatrix<f64>; 5] = std::array::from_fn(|_| DMatrix::zeros(n, n));
    let mut t = 0.0;
    let mut out = Trajectory { times: Vec::with_capacity(times.len()), states: Vec::with_capacity(times.len()) };
    for &target in times {
        if target < t - 1e-12 {
            return Err(Error::InvalidSpec("output times must be non-decreasing and non-negative".into()));
        }
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for s in 0..steps {
                rk4_step(gen, &mut a, h, &mut scratch);
                let now = t + h * (s + 1) as f64;
                let peak = a.amax();
                if !peak.is_finite() {
                    return Err(Error::Unstable { t: now });
                }
                if peak > ENTRY_BOUND {
                    return Err(Error::InvariantViolation { t: now, what: format!("|Δ_pq| = {peak} exceeds 1") });
                }
            }
            t = target;
        }
        out.times.push(target);
        out.states.push(CorrelationMatrix { imag: a.clone(), boundary: gen.boundary });
    }
    Ok(out)
}

/// Uniform evolution on `[0, t_max]`, recording every `record_every` steps of size `dt`.
pub fn evolve_delta(
    delta0: &CorrelationMatrix,
    gen: &Generator,
    t_max: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidSpec(format!("t_max must be positive, got {t_max}")));
    }
    let stride = dt * record_every.max(1) as f64;
    let count = (t_max / stride + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=count).map(|i| i as f64 * stride).collect();
    evolve_delta_at(delta0, gen, &times, dt)
}

/// Single-particle entanglement spectrum: eigenvalues of `Δ`, ascending.
pub fn spes(delta: &CorrelationMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = delta.to_complex().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectrum of an arbitrary complex matrix that should be a valid `Δ`.
pub fn spes_complex(delta: &DMatrix<Complex64>, boundary: Boundary) -> Result<Vec<f64>> {
    Ok(spes(&CorrelationMatrix::from_complex(delta, boundary)?))
}

/// The `N` non-negative representatives `|ε|` of a `±`-paired spectrum, ascending.
pub fn pair_representatives(spectrum: &[f64]) -> Vec<f64> {
    let mut abs: Vec<f64> = spectrum.iter().map(|e| e.abs()).collect();
    abs.sort_by(f64::total_cmp);
    abs.into_iter().step_by(2).collect()
}

/// Largest deviation of a sorted spectrum from `ε ↦ -ε` symmetry.
pub fn pairing_residual(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    (0..n / 2).map(|i| (sorted[i] + sorted[n - 1 - i]).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpesTrace {
    pub times: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
}

/// Spectra of all snapshots; the eigensolves run in parallel.
pub fn spes_trace(traj: &Trajectory) -> SpesTrace {
    let spectra = traj.states.par_iter().map(spes).collect();
    SpesTrace { times: traj.times.clone(), spectra }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyLevel {
    /// Eigenvalue `Ξ` of the density matrix.
    pub xi: f64,
    /// Indices `i` (into [`ManyBodyLevels::representatives`]) with `e_i = 1`.
    pub flipped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyLevels {
    /// Non-negative `ε_i`, ascending.
    pub representatives: Vec<f64>,
    /// Non-increasing in `xi`.
    pub levels: Vec<ManyBodyLevel>,
}

impl ManyBodyLevels {
    /// Occupation pattern `e` of a level.
    pub fn pattern(&self, level: usize) -> Vec<u8> {
        let mut e = vec![0u8; self.representatives.len()];
        for &i in &self.levels[level].flipped {
            e[i] = 1;
        }
        e
    }
}

#[derive(Debug)]
struct Candidate {
    cost: f64,
    flipped: Vec<usize>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost
        other.cost.total_cmp(&self.cost).then_with(|| other.flipped.cmp(&self.flipped))
    }
}

/// The `count` largest eigenvalues `Ξ = Π_i ½[1 + (-1)^{e_i} ε_i]` of a Gaussian state.
///
/// Flipping mode `i` costs `ln[(1+ε_i)/(1-ε_i)]`; subsets are visited in
/// order of total cost by the usual successor scheme (extend with the next
/// index, or advance the last index), so only `O(count)` candidates are built.
pub fn many_body_levels(spectrum: &[f64], count: usize) -> Result<ManyBodyLevels> {
    if spectrum.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("spectrum length {} is odd", spectrum.len())));
    }
    if let Some(bad) = spectrum.iter().find(|e| e.abs() > 1.0 + 1e-12 || !e.is_finite()) {
        return Err(Error::Unphysical(*bad));
    }
    let reps: Vec<f64> = pair_representatives(spectrum).into_iter().map(|e| e.min(1.0)).collect();
    let n = reps.len();
    let costs: Vec<f64> = reps.iter().map(|&e| ((1.0 + e) / (1.0 - e)).ln()).collect();
    let xi_of = |flipped: &[usize]| -> f64 {
        let mut xi = 1.0;
        let mut f = flipped.iter().peekable();
        for (i, &e) in reps.iter().enumerate() {
            if f.peek() == Some(&&i) {
                f.next();
                xi *= 0.5 * (1.0 - e);
            } else {
                xi *= 0.5 * (1.0 + e);
            }
        }
        xi
    };

    let mut levels = Vec::with_capacity(count);
    let mut heap = BinaryHeap::new();
    heap.push(Candidate { cost: 0.0, flipped: Vec::new() });
    while levels.len() < count {
        let Some(Candidate { cost, flipped }) = heap.pop() else { break };
        let next = flipped.last().map_or(0, |&l| l + 1);
        if next < n {
            let mut extended = flipped.clone();
            extended.push(next);
            heap.push(Candidate { cost: cost + costs[next], flipped: extended });
            if let Some(&last) = flipped.last() {
                let mut advanced = flipped.clone();
                *advanced.last_mut().unwrap() = next;
                heap.push(Candidate { cost: cost - costs[last] + costs[next], flipped: advanced });
            }
        }
        levels.push(ManyBodyLevel { xi: xi_of(&flipped), flipped });
    }
    Ok(ManyBodyLevels { representatives: reps, levels })
}

/// Modular matrix `G` with `Δ = tanh(iG/4)`, i.e. `G = -4i artanh(Δ)`.
pub fn g_from_delta(delta: &CorrelationMatrix) -> Result<DMatrix<f64>> {
    let eig = delta.to_complex().symmetric_eigen();
    if let Some(bad) = eig.eigenvalues.iter().find(|e| e.abs() >= 1.0 - 1e-12) {
        return Err(Error::ModularDivergent(bad.abs()));
    }
    let atanh = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|e| Complex64::from(e.atanh())));
    let v = &eig.eigenvectors;
    let art = v * DMatrix::from_diagonal(&atanh) * v.adjoint();
    Ok(art.map(|z| (z * Complex64::new(0.0, -4.0)).re))
}

/// `Δ = tanh(iG/4)` for a real antisymmetric `G`.
pub fn delta_from_g(g: &DMatrix<f64>, boundary: Boundary) -> Result<CorrelationMatrix> {
    let ig4 = g.map(|v| Complex64::new(0.0, 0.25 * v));
    let eig = ig4.symmetric_eigen();
    let tanh = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|e| Complex64::from(e.tanh())));
    let v = &eig.eigenvectors;
    CorrelationMatrix::from_complex(&(v * DMatrix::from_diagonal(&tanh) * v.adjoint()), boundary)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroModeDiagnostic {
    pub t: f64,
    /// Smallest `|ε|` among the pair representatives.
    pub min_abs: f64,
    /// Second-smallest representative.
    pub second_abs: f64,
    /// `second_abs / min_abs`.
    pub ratio: f64,
}

pub fn zero_mode_diagnostics(trace: &SpesTrace) -> Vec<ZeroModeDiagnostic> {
    trace
        .times
        .iter()
        .zip(&trace.spectra)
        .map(|(&t, spectrum)| {
            let reps = pair_representatives(spectrum);
            let min_abs = reps.first().copied().unwrap_or(f64::NAN);
            let second_abs = reps.get(1).copied().unwrap_or(f64::NAN);
            ZeroModeDiagnostic { t, min_abs, second_abs, ratio: second_abs / min_abs }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_delta_has_zero_spectrum() {
        let d = CorrelationMatrix::zeros(3, Boundary::Open);
        assert!(spes(&d).iter().all(|e| e.abs() < 1e-15));
    }

    #[test]
    fn pure_state_saturates() {
        // vacuum-like: each site paired, A = ⊕ [[0,1],[-1,0]]
        let mut a = DMatrix::<f64>::zeros(6, 6);
        for s in 0..3 {
            a[(2 * s, 2 * s + 1)] = 1.0;
            a[(2 * s + 1, 2 * s)] = -1.0;
        }
        let d = CorrelationMatrix::from_real(a, Boundary::Open).unwrap();
        assert!(spes(&d).iter().all(|e| (e.abs() - 1.0).abs() < 1e-14));
        assert!(matches!(g_from_delta(&d), Err(Error::ModularDivergent(_))));
    }

    #[test]
    fn single_mode_levels() {
        let lv = many_body_levels(&[-0.5, 0.5], 4).unwrap();
        let xi: Vec<f64> = lv.levels.iter().map(|l| l.xi).collect();
        assert_eq!(xi, vec![0.75, 0.25]);
        assert_eq!(lv.pattern(1), vec![1]);
    }

    #[test]
    fn pure_state_levels() {
        let lv = many_body_levels(&[-1.0, -1.0, 1.0, 1.0], 4).unwrap();
        assert_eq!(lv.levels[0].xi, 1.0);
        assert!(lv.levels[1..].iter().all(|l| l.xi == 0.0));
    }

    #[test]
    fn unphysical_levels_rejected() {
        assert_eq!(many_body_levels(&[-1.5, 1.5], 2).unwrap_err(), Error::Unphysical(-1.5));
    }

    #[test]
    fn scalar_modular_inversion() {
        let g = 1.7;
        let e = (g / 4.0_f64).tanh();
        let mut a = DMatrix::<f64>::zeros(2, 2);
        a[(0, 1)] = e;
        a[(1, 0)] = -e;
        let d = CorrelationMatrix::from_real(a, Boundary::Open).unwrap();
        let gm = g_from_delta(&d).unwrap();
        // iG/4 has eigenvalues ±g/4 exactly when |G_01| = g
        assert!((gm[(0, 1)].abs() - g).abs() < 1e-12);
        assert!((gm[(0, 1)] + gm[(1, 0)]).abs() < 1e-12);
    }

    #[test]
    fn restrict_takes_principal_block() {
        let a = DMatrix::from_fn(6, 6, |i, j| (j as f64 - i as f64) * 0.01);
        let d = CorrelationMatrix::from_real(a, Boundary::Periodic).unwrap();
        let r = d.restrict(1..3).unwrap();
        assert_eq!(r.dim(), 4);
        assert_eq!(r.imag()[(0, 1)], d.imag()[(2, 3)]);
        assert!(d.restrict(2..5).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        m[(1, 0)] = Complex64::new(-1.0, 0.0);
        assert!(matches!(spes_complex(&m, Boundary::Open), Err(Error::NotHermitian { .. })));
    }
}
