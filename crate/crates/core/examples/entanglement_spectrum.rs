//! Entanglement-spectrum dynamics after a dissipative quench on a chain.
//!
//! ```text
//! cargo run --release --example entanglement_spectrum -- [n_sites] [pbc|obc]
//! ```
//!
//! Prints the smallest and second-smallest `|ε|` over time, with the
//! predicted critical times marked.

use std::time::Instant;

use lindblad_z2::model::RealSpaceSystem;
use lindblad_z2::realspace::{evolve_delta, spes_trace, zero_mode_diagnostics, Generator};
use lindblad_z2::steady::steady_realspace;
use lindblad_z2::{critical_times, Boundary, DissipatorSpec, HamiltonianSpec, QuenchPlan, UndampedPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let boundary = match args.next().as_deref() {
        Some("pbc") => Boundary::Periodic,
        _ => Boundary::Open,
    };

    let initial = DissipatorSpec::real(1.0, -1.0, 1.0, -2.0, n, boundary);
    let fin = DissipatorSpec::real(2.5, -1.0, 1.0, -2.0, n, boundary);
    let h = HamiltonianSpec::zero(n, boundary);

    let ring = |d: &DissipatorSpec| d.with_lattice(4, Boundary::Periodic);
    let report = critical_times(&QuenchPlan::new(ring(&initial), ring(&fin), 0.3, 1e-3))?;
    let marks = report.ordered_times();
    for (ks, t) in &marks {
        println!("predicted t_p(k = {ks}) = {t:.4}");
    }

    let clock = Instant::now();
    // the initial dissipator leaves an edge Majorana undamped under OBC
    let delta0 = steady_realspace(&h, &initial, UndampedPolicy::InfiniteTemperature)?;
    println!("initial steady state: {:.2?}", clock.elapsed());

    let clock = Instant::now();
    let gen = Generator::new(&RealSpaceSystem::new(&h, &fin)?)?;
    let traj = evolve_delta(&delta0, &gen, 0.3, 1e-3, 5)?;
    println!("evolution ({} snapshots): {:.2?}", traj.times.len(), clock.elapsed());

    let clock = Instant::now();
    let trace = spes_trace(&traj);
    println!("spectra: {:.2?}", clock.elapsed());

    println!("{:>8} {:>12} {:>12}", "t", "min|eps|", "second");
    for d in zero_mode_diagnostics(&trace) {
        let mark = marks.iter().any(|(_, t)| (d.t - t).abs() < 2.5e-3);
        println!("{:>8.3} {:>12.3e} {:>12.3e}{}", d.t, d.min_abs, d.second_abs, if mark { "  <- t_p" } else { "" });
    }
    Ok(())
}
