//! The steady Pfaffians and critical times at `k = 0, π` do not depend on the Hamiltonian.

use lindblad_z2::quench::{evolve_bloch_ode, BlochQuench};
use lindblad_z2::steady::steady_point;
use lindblad_z2::{critical_times, Boundary, DissipatorSpec, HamiltonianSpec, HighSymmetry, QuenchPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), lindblad_z2::Error> {
    let ring = |u1, u2, v1, v2| DissipatorSpec::real(u1, u2, v1, v2, 4, Boundary::Periodic);
    let initial = ring(1.0, -1.0, 1.0, -2.0);
    let fin = ring(2.5, -1.0, 1.0, -2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let reference = critical_times(&QuenchPlan::new(initial, fin, 0.5, 1e-3))?;
    println!("closed form: t_p(pi) = {:.8}, t_p(0) = {:.8}", reference.pi.t_p.unwrap(), reference.zero.t_p.unwrap());

    for _ in 0..5 {
        let h = HamiltonianSpec::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            4,
            Boundary::Periodic,
        );
        let plan = QuenchPlan::new(initial, fin, 0.5, 1e-3).with_hamiltonian(h);
        let pf0 = steady_point(&h, &fin, HighSymmetry::Zero)?.pf;
        let q = BlochQuench::new(&plan, 0.0)?;
        let traj = evolve_bloch_ode(&q.heff, &q.yblock, &q.delta0, 0.5, 1e-4)?;
        let crossing = traj
            .pfaffians()
            .windows(2)
            .position(|w| w[0].signum() != w[1].signum())
            .map(|i| traj.times[i + 1]);
        println!(
            "J = {:>6.3}, delta = {:>6.3}, mu = {:>6.3}: steady Pf(0) = {pf0:.12}, ODE crossing at k = 0 near t = {:?}",
            h.j, h.delta, h.mu, crossing
        );
    }
    Ok(())
}
