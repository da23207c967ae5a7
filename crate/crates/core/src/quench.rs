//! Dissipative quenches: Pfaffian trajectories at `k = 0, π`, critical times and ν(t).
//!
//! At a high-symmetry momentum `H_eff = i h0 + (hx σx + hz σz)` with `h0 < 0`
//! and `Y = y σy`, and the Pfaffian relaxes as a single exponential
//!
//! ```text
//! Pf(t) = e^{2 h0_f t} (2 y_i/h0_i - 2 y_f/h0_f) + 2 y_f/h0_f
//! ```

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{BlochBlock, BlochSystem, Boundary, DissipatorSpec, HamiltonianSpec};
use crate::pfaffian::{pf_i_delta, Sign};
use crate::steady::{sign_of_y, steady_bloch_direct, steady_pf_closed};

/// RK4 is stable for `|dt λ| ≲ 2.78` on the imaginary and negative real axis.
const RK4_STABILITY: f64 = 2.5;
const CROSSING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HighSymmetry {
    Zero,
    Pi,
}

impl HighSymmetry {
    pub const BOTH: [HighSymmetry; 2] = [HighSymmetry::Zero, HighSymmetry::Pi];

    pub fn k(self) -> f64 {
        match self {
            HighSymmetry::Zero => 0.0,
            HighSymmetry::Pi => PI,
        }
    }
}

impl fmt::Display for HighSymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HighSymmetry::Zero => "0",
            HighSymmetry::Pi => "pi",
        })
    }
}

impl Serialize for HighSymmetry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Start in the steady state of `initial`, evolve under `final_dissipator`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchPlan {
    pub initial: DissipatorSpec,
    pub final_dissipator: DissipatorSpec,
    /// Only enters away from `k = 0, π`.
    pub hamiltonian_initial: HamiltonianSpec,
    pub hamiltonian_final: HamiltonianSpec,
    pub t_max: f64,
    /// Output sampling step.
    pub dt: f64,
}

impl QuenchPlan {
    /// A plan with vanishing Hamiltonians on a 4-site ring.
    pub fn new(initial: DissipatorSpec, final_dissipator: DissipatorSpec, t_max: f64, dt: f64) -> Self {
        let h = HamiltonianSpec::zero(initial.n_sites, initial.boundary);
        Self { initial, final_dissipator, hamiltonian_initial: h, hamiltonian_final: h, t_max, dt }
    }

    /// Same Hamiltonian before and after the quench.
    pub fn with_hamiltonian(mut self, h: HamiltonianSpec) -> Self {
        self.hamiltonian_initial = h;
        self.hamiltonian_final = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidSpec(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidSpec(format!("dt must be positive, got {}", self.dt)));
        }
        self.initial.validate()?;
        self.final_dissipator.validate()?;
        self.hamiltonian_initial.validate()?;
        self.hamiltonian_final.validate()
    }

    /// Sample times `0, dt, 2dt, …` up to `t_max`.
    pub fn times(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.dt).collect()
    }
}

/// `y` and `h0` before and after the quench at one `k_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoints {
    pub y_i: f64,
    pub h0_i: f64,
    pub y_f: f64,
    pub h0_f: f64,
}

impl Endpoints {
    pub fn of(plan: &QuenchPlan, ks: HighSymmetry) -> Result<Self> {
        let at = |d: &DissipatorSpec| -> Result<(f64, f64)> {
            let sys = BlochSystem::dissipative(d, ks.k())?;
            Ok((sys.y()?, sys.h_vector()?.h0))
        };
        let (y_i, h0_i) = at(&plan.initial)?;
        let (y_f, h0_f) = at(&plan.final_dissipator)?;
        Ok(Self { y_i, h0_i, y_f, h0_f })
    }

    pub fn pf(&self, t: f64) -> Result<f64> {
        let pi = steady_pf_closed(self.y_i, self.h0_i)?;
        let pf = steady_pf_closed(self.y_f, self.h0_f)?;
        Ok((2.0 * self.h0_f * t).exp() * (pi - pf) + pf)
    }

    /// Positive zero of [`Endpoints::pf`], if any.
    ///
    /// `e^{2 h0_f t} = r` with `r = (y_f/h0_f) / (y_f/h0_f - y_i/h0_i)`; a root
    /// with `t > 0` needs `0 < r < 1`, i.e. opposite signs of the two ratios.
    pub fn critical_time(&self) -> Result<Option<f64>> {
        if self.h0_i == 0.0 || self.h0_f == 0.0 {
            return Err(Error::UndampedHighSymmetry);
        }
        let a = self.y_f / self.h0_f;
        let b = self.y_i / self.h0_i;
        let r = a / (a - b);
        Ok((r > 0.0 && r < 1.0).then(|| r.ln() / (2.0 * self.h0_f)))
    }
}

/// Closed-form `Pf[iΔ(k_s, t)]`.
pub fn pf_trajectory(ks: HighSymmetry, plan: &QuenchPlan, t: f64) -> Result<f64> {
    Endpoints::of(plan, ks)?.pf(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsTransition {
    pub ks: HighSymmetry,
    pub exists: bool,
    pub t_p: Option<f64>,
    pub initial_sign: Sign,
    pub final_sign: Sign,
    pub endpoints: Endpoints,
}

/// Sampled `ν(t)`; `0` marks samples within tolerance of a Pfaffian zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuTrace {
    pub times: Vec<f64>,
    pub pf_k0: Vec<f64>,
    pub pf_kpi: Vec<f64>,
    pub nu: Vec<i8>,
}

impl NuTrace {
    /// Indices of samples excluded from flip counting.
    pub fn flagged(&self) -> Vec<usize> {
        self.nu.iter().enumerate().filter(|(_, &v)| v == 0).map(|(i, _)| i).collect()
    }

    /// Times (sample index after the change) at which ν changes sign.
    pub fn flips(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut last = None;
        for (i, &v) in self.nu.iter().enumerate() {
            if v == 0 {
                continue;
            }
            if let Some(prev) = last {
                if prev != v {
                    out.push(i);
                }
            }
            last = Some(v);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub zero: KsTransition,
    pub pi: KsTransition,
    /// Number of `k_s` with a sign flip.
    pub count: usize,
    pub nu_trace: NuTrace,
}

impl TransitionReport {
    pub fn at(&self, ks: HighSymmetry) -> &KsTransition {
        match ks {
            HighSymmetry::Zero => &self.zero,
            HighSymmetry::Pi => &self.pi,
        }
    }

    /// Critical times in increasing order.
    pub fn ordered_times(&self) -> Vec<(HighSymmetry, f64)> {
        let mut v: Vec<_> = [&self.zero, &self.pi].iter().filter_map(|t| t.t_p.map(|tp| (t.ks, tp))).collect();
        v.sort_by(|a, b| a.1.total_cmp(&b.1));
        v
    }
}

fn sign_tol(x: f64) -> i8 {
    if x.abs() <= CROSSING_TOL {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

pub fn nu_trajectory(plan: &QuenchPlan) -> Result<NuTrace> {
    plan.validate()?;
    let e0 = Endpoints::of(plan, HighSymmetry::Zero)?;
    let epi = Endpoints::of(plan, HighSymmetry::Pi)?;
    let times = plan.times();
    let pf_k0 = times.iter().map(|&t| e0.pf(t)).collect::<Result<Vec<_>>>()?;
    let pf_kpi = times.iter().map(|&t| epi.pf(t)).collect::<Result<Vec<_>>>()?;
    // M = -sgn Pf[iΔ], and ν = M0 Mπ = sgn Pf0 · sgn Pfπ
    let nu = pf_k0.iter().zip(&pf_kpi).map(|(&a, &b)| sign_tol(a) * sign_tol(b)).collect();
    Ok(NuTrace { times, pf_k0, pf_kpi, nu })
}

pub fn critical_times(plan: &QuenchPlan) -> Result<TransitionReport> {
    plan.validate()?;
    let per_ks = |ks: HighSymmetry| -> Result<KsTransition> {
        let initial_sign = sign_of_y(&plan.initial, ks)?;
        let final_sign = sign_of_y(&plan.final_dissipator, ks)?;
        let endpoints = Endpoints::of(plan, ks)?;
        let t_p = if initial_sign != final_sign { endpoints.critical_time()? } else { None };
        Ok(KsTransition { ks, exists: t_p.is_some(), t_p, initial_sign, final_sign, endpoints })
    };
    let zero = per_ks(HighSymmetry::Zero)?;
    let pi = per_ks(HighSymmetry::Pi)?;
    let count = usize::from(zero.exists) + usize::from(pi.exists);
    Ok(TransitionReport { zero, pi, count, nu_trace: nu_trajectory(plan)? })
}

/// Initial and final Bloch data of a plan at any momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochQuench {
    pub delta0: BlochBlock,
    pub heff: BlochBlock,
    pub yblock: BlochBlock,
}

impl BlochQuench {
    pub fn new(plan: &QuenchPlan, k: f64) -> Result<Self> {
        let lattice = |h: &HamiltonianSpec| h.with_lattice(4, Boundary::Periodic);
        let init = BlochSystem::new(&lattice(&plan.hamiltonian_initial), &plan.initial, k)?;
        let fin = BlochSystem::new(&lattice(&plan.hamiltonian_final), &plan.final_dissipator, k)?;
        Ok(Self { delta0: steady_bloch_direct(&init.heff(), &init.yblock)?, heff: fin.heff(), yblock: fin.yblock })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub blocks: Vec<BlochBlock>,
}

impl BlochTrajectory {
    pub fn pfaffians(&self) -> Vec<f64> {
        self.blocks.iter().map(pf_i_delta).collect()
    }
}

fn rhs(h: &Matrix2<Complex64>, hd: &Matrix2<Complex64>, y4: &Matrix2<Complex64>, d: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    (h * d - d * hd) * Complex64::new(0.0, -1.0) - y4
}

/// RK4 integration of `dΔ/dt = -i(H_eff Δ - Δ H_eff†) - 4Y` for one 2×2 block.
///
/// Every step is followed by a Hermitian projection, and at `k = 0, π` also
/// by `Δ ← (Δ - Δᵀ)/2`. One block is recorded per step.
pub fn evolve_bloch_ode(
    heff: &BlochBlock,
    yblock: &BlochBlock,
    delta0: &BlochBlock,
    t_max: f64,
    dt: f64,
) -> Result<BlochTrajectory> {
    if !(dt > 0.0) || !(t_max >= 0.0) {
        return Err(Error::InvalidSpec(format!("need dt > 0 and t_max >= 0, got dt = {dt}, t_max = {t_max}")));
    }
    let h = heff.data;
    let hd = h.adjoint();
    let tr = h.trace() * 0.5;
    let disc = (tr * tr - h.determinant()).sqrt();
    let eig = [tr + disc, tr - disc];
    let radius = (0..2)
        .flat_map(|m| (0..2).map(move |n| (m, n)))
        .map(|(m, n)| (eig[m] - eig[n].conj()).norm())
        .fold(0.0, f64::max);
    if dt * radius > RK4_STABILITY {
        return Err(Error::StepTooLarge { dt, radius, suggested: RK4_STABILITY / radius });
    }
    let y4 = yblock.data * Complex64::from(4.0);
    let project_anti = delta0.is_high_symmetry();
    let steps = (t_max / dt + 1e-9).floor() as usize;
    let bound = 1e3 * (1.0 + delta0.data.norm() + yblock.data.norm() / (1.0 + radius));

    let mut d = delta0.data;
    let mut out = BlochTrajectory { times: Vec::with_capacity(steps + 1), blocks: Vec::with_capacity(steps + 1) };
    out.times.push(0.0);
    out.blocks.push(*delta0);
    for s in 1..=steps {
        let k1 = rhs(&h, &hd, &y4, &d);
        let k2 = rhs(&h, &hd, &y4, &(d + k1 * Complex64::from(0.5 * dt)));
        let k3 = rhs(&h, &hd, &y4, &(d + k2 * Complex64::from(0.5 * dt)));
        let k4 = rhs(&h, &hd, &y4, &(d + k3 * Complex64::from(dt)));
        d += (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0);
        d = (d + d.adjoint()) * Complex64::from(0.5);
        if project_anti {
            d = (d - d.transpose()) * Complex64::from(0.5);
        }
        let t = s as f64 * dt;
        if !d.norm().is_finite() || d.norm() > bound {
            return Err(Error::Unstable { t });
        }
        out.times.push(t);
        out.blocks.push(BlochBlock::new(delta0.k, d));
    }
    Ok(out)
}
