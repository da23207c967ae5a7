//! Randomized invariants.

mod common;

use std::f64::consts::PI;

use common::*;
use lindblad_z2::model::{BlochSystem, RealSpaceSystem};
use lindblad_z2::pfaffian::{pf_i_delta, pfaffian};
use lindblad_z2::quench::{evolve_bloch_ode, nu_trajectory, BlochQuench};
use lindblad_z2::realspace::{
    delta_from_g, evolve_delta_at, g_from_delta, many_body_levels, pairing_residual, spes, Generator,
};
use lindblad_z2::steady::{
    steady_bloch_direct, steady_bloch_spectral, steady_pf_closed, steady_realspace, SpectralDecomposition,
};
use lindblad_z2::{critical_times, Boundary, DissipatorSpec, HamiltonianSpec, HighSymmetry, QuenchPlan, UndampedPolicy};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn antisymmetric(n: usize, vals: &[f64]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    let mut it = vals.iter();
    for i in 0..n {
        for j in i + 1..n {
            let v = *it.next().unwrap();
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    a
}

fn amp() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn dissipator() -> impl Strategy<Value = DissipatorSpec> {
    (amp(), amp(), amp(), amp(), amp(), amp(), amp(), amp()).prop_map(|(a, b, c2, d, e, f, g, h)| {
        DissipatorSpec::new(c(a, e), c(b, f), c(c2, g), c(d, h), 4, Boundary::Periodic)
    })
}

fn real_dissipator() -> impl Strategy<Value = DissipatorSpec> {
    (amp(), amp(), amp(), amp()).prop_map(|(a, b, c2, d)| DissipatorSpec::real(a, b, c2, d, 4, Boundary::Periodic))
}

fn hamiltonian() -> impl Strategy<Value = HamiltonianSpec> {
    (amp(), amp(), amp()).prop_map(|(j, d, m)| HamiltonianSpec::new(j, d, m, 4, Boundary::Periodic))
}

/// Away from sign boundaries so that signs and roots are well conditioned.
fn well_separated(d: &DissipatorSpec) -> bool {
    [false, true].iter().all(|&p| closed_y(d, p).abs() > 0.05 && closed_h0(d, p) < -0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pfaffian_squared_is_determinant(n in (1usize..6).prop_map(|h| 2 * h), vals in prop::collection::vec(-2.0..2.0f64, 45)) {
        let a = antisymmetric(n, &vals);
        let pf = pfaffian(&a).unwrap();
        let det = a.clone().determinant();
        prop_assert!((pf * pf - det).abs() <= 1e-8 * det.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pfaffian_congruence(vals in prop::collection::vec(-2.0..2.0f64, 15), b in prop::collection::vec(-2.0..2.0f64, 36)) {
        let a = antisymmetric(6, &vals);
        let b = DMatrix::from_row_slice(6, 6, &b);
        let lhs = pfaffian(&(&b * &a * b.transpose())).unwrap();
        let rhs = b.clone().determinant() * pfaffian(&a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0));
    }

    #[test]
    fn complex_pfaffian_matches_expansion(re in prop::collection::vec(-2.0..2.0f64, 15), im in prop::collection::vec(-2.0..2.0f64, 15)) {
        let a = antisymmetric(6, &re).map(|v| c(v, 0.0)) + antisymmetric(6, &im).map(|v| c(0.0, v));
        let lib = pfaffian(&a).unwrap();
        let oracle = pf_expansion(&a);
        prop_assert!((lib - oracle).norm() <= 1e-10 * oracle.norm().max(1.0));
    }

    #[test]
    fn x_is_positive_semidefinite(d in dissipator(), n in 3usize..8, open in any::<bool>()) {
        let bc = if open { Boundary::Open } else { Boundary::Periodic };
        let d = d.with_lattice(n, bc);
        prop_assume!(d.validate().is_ok());
        let sys = RealSpaceSystem::new(&HamiltonianSpec::zero(n, bc), &d).unwrap();
        let ev = sys.x.symmetric_eigenvalues();
        let scale = sys.x.norm().max(1.0);
        prop_assert!(ev.iter().all(|&e| e > -1e-12 * scale));
        let k = sys.k.clone();
        prop_assert!((&k - k.adjoint()).norm() < 1e-12 && (&k + k.transpose()).norm() < 1e-12);
        prop_assert!((&sys.y - sys.y.adjoint()).norm() < 1e-12 * scale && (&sys.y + sys.y.transpose()).norm() < 1e-12 * scale);
    }

    #[test]
    fn bloch_y_and_h0_match_closed_forms(d in dissipator()) {
        prop_assume!(d.validate().is_ok());
        for (at_pi, k) in [(false, 0.0), (true, PI)] {
            let sys = BlochSystem::dissipative(&d, k).unwrap();
            let hv = sys.h_vector().unwrap();
            prop_assert!(hv.h0 <= 1e-12);
            prop_assert!((sys.y().unwrap() - closed_y(&d, at_pi)).abs() < 1e-10);
            prop_assert!((hv.h0 - closed_h0(&d, at_pi)).abs() < 1e-10);
            prop_assert!((hv.heff() - sys.heff().data).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_pfaffian_matches_direct_solve(d in dissipator(), h in hamiltonian()) {
        prop_assume!(well_separated(&d));
        for ks in HighSymmetry::BOTH {
            let sys = BlochSystem::new(&h, &d, ks.k()).unwrap();
            let direct = pf_i_delta(&steady_bloch_direct(&sys.heff(), &sys.yblock).unwrap());
            let closed = steady_pf_closed(sys.y().unwrap(), sys.h_vector().unwrap().h0).unwrap();
            prop_assert!((direct - closed).abs() < 1e-9, "{direct} vs {closed}");
        }
    }

    #[test]
    fn spectral_formula_matches_direct(d in dissipator(), h in hamiltonian(), k in -PI..PI) {
        prop_assume!(d.validate().is_ok());
        let sys = BlochSystem::new(&h, &d, k).unwrap();
        let heff = sys.heff();
        let Ok(dec) = SpectralDecomposition::new(&heff) else { return Ok(()); };
        let gap = (dec.lambda[0] - dec.lambda[1]).norm();
        prop_assume!(gap > 1e-3 && dec.lambda.iter().all(|l| l.im < -1e-3));
        let direct = steady_bloch_direct(&heff, &sys.yblock).unwrap();
        let spectral = steady_bloch_spectral(&dec, &sys.yblock).unwrap();
        prop_assert!((direct.data - spectral.data).norm() < 1e-8 * (1.0 + direct.data.norm()) / gap.min(1.0));
    }

    #[test]
    fn eigenvectors_are_biorthonormal(d in dissipator(), h in hamiltonian(), k in -PI..PI) {
        prop_assume!(d.validate().is_ok());
        let sys = BlochSystem::new(&h, &d, k).unwrap();
        let Ok(dec) = SpectralDecomposition::new(&sys.heff()) else { return Ok(()); };
        prop_assume!((dec.lambda[0] - dec.lambda[1]).norm() > 1e-3);
        for m in 0..2 {
            for n in 0..2 {
                let overlap = (dec.left[m].adjoint() * dec.right[n])[(0, 0)];
                let expected = if m == n { 1.0 } else { 0.0 };
                prop_assert!((overlap - c(expected, 0.0)).norm() < 1e-9);
            }
        }
        prop_assert!((dec.completeness() - nalgebra::Matrix2::identity()).norm() < 1e-9);
    }

    #[test]
    fn signs_are_hamiltonian_independent(d in real_dissipator(), h in hamiltonian()) {
        prop_assume!(well_separated(&d));
        for (ks, at_pi) in [(HighSymmetry::Zero, false), (HighSymmetry::Pi, true)] {
            let p = lindblad_z2::steady::steady_point(&h, &d, ks).unwrap();
            prop_assert_eq!(p.m.value() as f64, closed_y(&d, at_pi).signum());
        }
    }

    #[test]
    fn many_body_levels_are_ordered_and_complete(eps in prop::collection::vec(0.0..0.999f64, 1..=12)) {
        let spectrum: Vec<f64> = eps.iter().flat_map(|&e| [e, -e]).collect();
        let n = eps.len();
        let all = many_body_levels(&spectrum, 1 << n).unwrap();
        prop_assert_eq!(all.levels.len(), 1 << n);
        let sum: f64 = all.levels.iter().map(|l| l.xi).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        for w in all.levels.windows(2) {
            prop_assert!(w[1].xi <= w[0].xi * (1.0 + 1e-12));
        }
        let mut oracle = exhaustive_xi(&all.representatives);
        oracle.sort_by(|a, b| b.total_cmp(a));
        let top = 20.min(oracle.len());
        let best = many_body_levels(&spectrum, top).unwrap();
        for (l, o) in best.levels.iter().zip(&oracle) {
            prop_assert!((l.xi - o).abs() < 1e-14);
        }
    }

    #[test]
    fn modular_round_trip(d in real_dissipator(), h in hamiltonian()) {
        let n = 5;
        let d = d.with_lattice(n, Boundary::Open);
        prop_assume!(d.validate().is_ok());
        let Ok(delta) = steady_realspace(&h.with_lattice(n, Boundary::Open), &d, UndampedPolicy::Reject) else { return Ok(()); };
        let Ok(g) = g_from_delta(&delta) else { return Ok(()); };
        prop_assume!(spes(&delta).iter().all(|e| e.abs() < 0.999));
        prop_assert!((&g + g.transpose()).amax() < 1e-9);
        let back = delta_from_g(&g, Boundary::Open).unwrap();
        prop_assert!((back.imag() - delta.imag()).amax() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_preserves_invariants(di in real_dissipator(), df in real_dissipator(), h in hamiltonian(), n in 3usize..10, open in any::<bool>()) {
        let bc = if open { Boundary::Open } else { Boundary::Periodic };
        let (di, df, h) = (di.with_lattice(n, bc), df.with_lattice(n, bc), h.with_lattice(n, bc));
        prop_assume!(di.validate().is_ok() && df.validate().is_ok());
        let Ok(delta0) = steady_realspace(&h, &di, UndampedPolicy::InfiniteTemperature) else { return Ok(()); };
        let gen = Generator::new(&RealSpaceSystem::new(&h, &df).unwrap()).unwrap();
        let dt = (1e-3f64).min(1.0 / gen.radius_bound());
        let traj = evolve_delta_at(&delta0, &gen, &[0.1, 0.5, 1.0], dt).unwrap();
        for s in &traj.states {
            let a = s.imag();
            prop_assert!((a + a.transpose()).amax() == 0.0);
            let ev = spes(s);
            prop_assert!(ev.iter().all(|e| e.abs() <= 1.0 + 1e-9));
            prop_assert!(pairing_residual(&ev) < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn analytic_and_ode_trajectories_agree(di in real_dissipator(), df in real_dissipator(), h in hamiltonian()) {
        prop_assume!(well_separated(&di) && well_separated(&df));
        for (ks, at_pi) in [(HighSymmetry::Zero, false), (HighSymmetry::Pi, true)] {
            let t_max = 5.0 / closed_h0(&df, at_pi).abs();
            let plan = QuenchPlan::new(di, df, t_max, 1e-3).with_hamiltonian(h);
            let q = BlochQuench::new(&plan, ks.k()).unwrap();
            let hv = BlochSystem::new(&h, &df, ks.k()).unwrap().h_vector().unwrap();
            let rate = 2.0 * (hv.h0.abs() + (hv.hx.powi(2) + hv.hy.powi(2) + hv.hz.powi(2)).sqrt());
            let steps = ((t_max * rate / 0.02).ceil() as usize).max(200);
            let dt = t_max / steps as f64;
            let traj = evolve_bloch_ode(&q.heff, &q.yblock, &q.delta0, t_max, dt).unwrap();
            for (t, pf) in traj.times.iter().zip(traj.pfaffians()).step_by(steps / 50) {
                let exact = lindblad_z2::quench::pf_trajectory(ks, &plan, *t).unwrap();
                prop_assert!((pf - exact).abs() < 1e-8, "{ks} t = {t}: {pf} vs {exact}");
            }
        }
    }

    #[test]
    fn nu_flips_follow_critical_times(di in real_dissipator(), df in real_dissipator()) {
        prop_assume!(well_separated(&di) && well_separated(&df));
        let plan = QuenchPlan::new(di, df, 3.0, 1e-3);
        let rep = critical_times(&plan).unwrap();
        let trace = nu_trajectory(&plan).unwrap();
        let inside: Vec<f64> = rep.ordered_times().into_iter().map(|(_, t)| t).filter(|&t| t < plan.t_max).collect();
        let flips = trace.flips();
        // two roots within one sample of each other cancel on the grid
        prop_assume!(inside.windows(2).all(|w| w[1] - w[0] > 2.0 * plan.dt));
        prop_assert_eq!(flips.len(), inside.len());
        for (i, t) in flips.iter().zip(&inside) {
            prop_assert!((trace.times[*i] - t).abs() <= plan.dt + 1e-12);
        }
    }
}

#[test]
fn at_most_one_root_per_momentum() {
    // Pf(t) is a single exponential, so sampled sign changes never exceed one
    let fin = DissipatorSpec::real(2.5, -1.0, 1.0, -2.0, 4, Boundary::Periodic);
    for u1 in [-2.0, -0.5, 0.7, 1.9] {
        for u2 in [-1.5, 0.3, 2.2] {
            let plan = QuenchPlan::new(DissipatorSpec::real(u1, u2, 1.0, -2.0, 4, Boundary::Periodic), fin, 2.0, 1e-3);
            let Ok(trace) = nu_trajectory(&plan) else { continue };
            for pf in [&trace.pf_k0, &trace.pf_kpi] {
                let changes = pf.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
                assert!(changes <= 1);
            }
        }
    }
}
