//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: the many-body model is
//! built from Jordan-Wigner fermions, Pfaffians from the cofactor expansion,
//! and the 2×2 ODE from a separate RK4 loop.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use lindblad_z2::{Boundary, DissipatorSpec, HamiltonianSpec};

pub type C = Complex64;

pub const SINGLE_FLIP_INITIAL: [f64; 4] = [3.0, 3.0, 1.0, -2.0];
pub const DOUBLE_FLIP_INITIAL: [f64; 4] = [1.0, -1.0, 1.0, -2.0];
pub const FINAL: [f64; 4] = [2.5, -1.0, 1.0, -2.0];

pub fn ring(p: [f64; 4]) -> DissipatorSpec {
    DissipatorSpec::real(p[0], p[1], p[2], p[3], 4, Boundary::Periodic)
}

pub fn chain(p: [f64; 4], n: usize, boundary: Boundary) -> DissipatorSpec {
    DissipatorSpec::real(p[0], p[1], p[2], p[3], n, boundary)
}

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `y(k_s)` by hand: half of `|u1 ± u2|² - |v1 ± v2|²` (`+` at `k = 0`).
pub fn closed_y(d: &DissipatorSpec, at_pi: bool) -> f64 {
    let s = if at_pi { -1.0 } else { 1.0 };
    let u = d.u1 + d.u2 * s;
    let v = d.v1 + d.v2 * s;
    0.5 * (u.norm_sqr() - v.norm_sqr())
}

/// `h0(k_s) = -(|u1 ± u2|² + |v1 ± v2|²)`.
pub fn closed_h0(d: &DissipatorSpec, at_pi: bool) -> f64 {
    let s = if at_pi { -1.0 } else { 1.0 };
    -((d.u1 + d.u2 * s).norm_sqr() + (d.v1 + d.v2 * s).norm_sqr())
}

/// Sign formula for `ν` in terms of the real amplitudes.
pub fn nu_formula(u1: f64, u2: f64, v1: f64, v2: f64) -> f64 {
    (((u1 + u2).powi(2) - (v1 + v2).powi(2)) * ((u1 - u2).powi(2) - (v1 - v2).powi(2))).signum()
}

/// Pfaffian by expansion along the first row.
pub fn pf_expansion(a: &DMatrix<C>) -> C {
    let n = a.nrows();
    if n == 0 {
        return C::new(1.0, 0.0);
    }
    let mut total = C::new(0.0, 0.0);
    for j in 1..n {
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor = DMatrix::from_fn(n - 2, n - 2, |r, s| a[(keep[r], keep[s])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += a[(0, j)] * pf_expansion(&minor) * sign;
    }
    total
}

/// Lattice Fourier transform `(1/N) Σ_{m,n} A_{(m,s),(n,s')} e^{-ik(n-m)}` on a ring.
pub fn fourier_brute(a: &DMatrix<C>, k: f64) -> Matrix2<C> {
    let n = a.nrows() / 2;
    let mut out = Matrix2::<C>::zeros();
    for m in 0..n {
        for l in 0..n {
            let phase = C::from_polar(1.0 / n as f64, -k * (l as f64 - m as f64));
            for s in 0..2 {
                for t in 0..2 {
                    out[(s, t)] += a[(2 * m + s, 2 * l + t)] * phase;
                }
            }
        }
    }
    out
}

fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

/// Fermions on `n` sites in the Jordan-Wigner representation.
pub struct ManyBody {
    pub n: usize,
    pub dim: usize,
    /// Annihilation operators.
    pub c: Vec<DMatrix<C>>,
    /// `w_{m,1} = (c + c†)/√2`, `w_{m,2} = (c - c†)/(i√2)`, interleaved.
    pub w: Vec<DMatrix<C>>,
}

impl ManyBody {
    pub fn new(n: usize) -> Self {
        let id = DMatrix::<C>::identity(2, 2);
        let z = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let lower = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let ops: Vec<DMatrix<C>> = (0..n)
            .map(|site| {
                let mut m = DMatrix::<C>::identity(1, 1);
                for j in 0..n {
                    let f = if j < site {
                        &z
                    } else if j == site {
                        &lower
                    } else {
                        &id
                    };
                    m = kron(&m, f);
                }
                m
            })
            .collect();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut w = Vec::new();
        for op in &ops {
            let dag = op.adjoint();
            w.push((op + &dag) * c(r, 0.0));
            w.push((op - &dag) * c(0.0, -r));
        }
        Self { n, dim: 1 << n, c: ops, w }
    }

    fn dag(&self, i: usize) -> DMatrix<C> {
        self.c[i].adjoint()
    }

    pub fn kitaev(&self, h: &HamiltonianSpec) -> DMatrix<C> {
        let mut out = DMatrix::<C>::zeros(self.dim, self.dim);
        for site in 0..self.n {
            out -= self.dag(site) * &self.c[site] * c(h.mu, 0.0);
            if site + 1 == self.n && h.boundary == Boundary::Open {
                continue;
            }
            let next = (site + 1) % self.n;
            let hop = self.dag(site) * &self.c[next] * c(-h.j, 0.0);
            let pair = &self.c[site] * &self.c[next] * c(h.delta, 0.0);
            out += &hop + hop.adjoint() + &pair + pair.adjoint();
        }
        out
    }

    /// `L_n = u1 c_n + u2 c_{n+1} + v1 c_n† + v2 c_{n+1}†`; the last open-chain row keeps its on-site part.
    pub fn jumps(&self, d: &DissipatorSpec) -> Vec<DMatrix<C>> {
        (0..self.n)
            .map(|site| {
                let mut l = &self.c[site] * d.u1 + self.dag(site) * d.v1;
                if !(site + 1 == self.n && d.boundary == Boundary::Open) {
                    let next = (site + 1) % self.n;
                    l += &self.c[next] * d.u2 + self.dag(next) * d.v2;
                }
                l
            })
            .collect()
    }

    /// `-i[H, ρ] + Σ (2 L ρ L† - {L†L, ρ})`.
    pub fn lindblad(&self, h: &DMatrix<C>, jumps: &[DMatrix<C>], rho: &DMatrix<C>) -> DMatrix<C> {
        let mut out = (h * rho - rho * h) * c(0.0, -1.0);
        for l in jumps {
            let ld = l.adjoint();
            let ldl = &ld * l;
            out += l * rho * &ld * c(2.0, 0.0) - &ldl * rho - rho * &ldl;
        }
        out
    }

    /// `Δ_pq = Tr{ρ [w_p, w_q]}`.
    pub fn delta(&self, rho: &DMatrix<C>) -> DMatrix<C> {
        let m = self.w.len();
        DMatrix::from_fn(m, m, |p, q| (rho * (&self.w[p] * &self.w[q] - &self.w[q] * &self.w[p])).trace())
    }

    /// Steady state from the kernel of the Liouvillian (assumed one-dimensional).
    pub fn steady(&self, h: &DMatrix<C>, jumps: &[DMatrix<C>]) -> DMatrix<C> {
        let d = self.dim;
        let mut sup = DMatrix::<C>::zeros(d * d, d * d);
        for col in 0..d * d {
            let mut e = DMatrix::<C>::zeros(d, d);
            e[(col / d, col % d)] = c(1.0, 0.0);
            let out = self.lindblad(h, jumps, &e);
            for row in 0..d * d {
                sup[(row, col)] = out[(row / d, row % d)];
            }
        }
        let svd = sup.svd(false, true);
        let v_t = svd.v_t.unwrap();
        let (idx, _) = svd.singular_values.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &s)| if s < b.1 { (i, s) } else { b });
        let v = v_t.row(idx).adjoint();
        let rho = DMatrix::from_fn(d, d, |i, j| v[i * d + j]);
        let tr = rho.trace();
        rho / tr
    }
}

/// A random density matrix (not necessarily Gaussian).
pub fn random_density(dim: usize, seed: u64) -> DMatrix<C> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn rhs2(h: &Matrix2<C>, y: &Matrix2<C>, d: &Matrix2<C>) -> Matrix2<C> {
    (h * d - d * h.adjoint()) * c(0.0, -1.0) - y * c(4.0, 0.0)
}

/// Plain RK4 for the 2×2 equation of motion, `steps` steps of size `h`.
pub fn integrate2(heff: &Matrix2<C>, y: &Matrix2<C>, d0: &Matrix2<C>, step: f64, steps: usize) -> Matrix2<C> {
    let mut d = *d0;
    let hs = c(step, 0.0);
    for _ in 0..steps {
        let k1 = rhs2(heff, y, &d);
        let k2 = rhs2(heff, y, &(d + k1 * hs * c(0.5, 0.0)));
        let k3 = rhs2(heff, y, &(d + k2 * hs * c(0.5, 0.0)));
        let k4 = rhs2(heff, y, &(d + k3 * hs));
        d += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * (hs / 6.0);
    }
    d
}

/// `½ Tr[Δ σy]` with `σy = [[0, -i], [i, 0]]`.
pub fn pf2(d: &Matrix2<C>) -> f64 {
    (0.5 * (d[(1, 0)] * c(0.0, -1.0) + d[(0, 1)] * c(0.0, 1.0))).re
}

/// Zero crossing of `½Tr[Δσy]` located by sampling and bisection, re-integrating each probe.
pub fn ode_crossing(heff: &Matrix2<C>, y: &Matrix2<C>, d0: &Matrix2<C>, t_max: f64, dt: f64) -> Option<f64> {
    let steps = (t_max / dt).round() as usize;
    let mut d = *d0;
    let mut prev = pf2(&d);
    for s in 0..steps {
        let next = integrate2(heff, y, &d, dt, 1);
        let val = pf2(&next);
        if prev.signum() != val.signum() {
            let (mut lo, mut hi) = (0.0, dt);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                // 64 substeps of RK4 across the probe interval
                let probe = integrate2(heff, y, &d, mid / 64.0, 64);
                if pf2(&probe).signum() == prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(s as f64 * dt + 0.5 * (lo + hi));
        }
        d = next;
        prev = val;
    }
    None
}

/// All `2^N` values of `Π_i ½(1 ± ε_i)`.
pub fn exhaustive_xi(reps: &[f64]) -> Vec<f64> {
    let n = reps.len();
    (0..1usize << n)
        .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { 0.5 * (1.0 - reps[i]) } else { 0.5 * (1.0 + reps[i]) }).product())
        .collect()
}
