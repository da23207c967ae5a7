//! Dissipative quenches with one and with two topological transitions.

use lindblad_z2::{critical_times, Boundary, DissipatorSpec, QuenchPlan};

fn main() -> Result<(), lindblad_z2::Error> {
    let ring = |u1, u2, v1, v2| DissipatorSpec::real(u1, u2, v1, v2, 4, Boundary::Periodic);
    let cases = [
        ("one transition", ring(3.0, 3.0, 1.0, -2.0), ring(2.5, -1.0, 1.0, -2.0)),
        ("two transitions", ring(1.0, -1.0, 1.0, -2.0), ring(2.5, -1.0, 1.0, -2.0)),
    ];
    for (name, initial, fin) in cases {
        let plan = QuenchPlan::new(initial, fin, 0.4, 1e-3);
        let report = critical_times(&plan)?;
        println!("{name}: {} transition(s)", report.count);
        for t in [&report.zero, &report.pi] {
            println!(
                "  k = {:>2}: M {} -> {}, t_p = {}",
                t.ks,
                t.initial_sign,
                t.final_sign,
                t.t_p.map_or("none".to_string(), |v| format!("{v:.6}"))
            );
        }
        let trace = &report.nu_trace;
        let mut nu = vec![trace.nu[0]];
        for i in trace.flips() {
            println!("  nu flips to {:>2} at t = {:.3}", trace.nu[i], trace.times[i]);
            nu.push(trace.nu[i]);
        }
        println!("  nu sequence: {nu:?}");
    }
    Ok(())
}
