//! Many-body entanglement levels and the modular matrix of a steady state.

use lindblad_z2::realspace::{delta_from_g, g_from_delta, many_body_levels, spes};
use lindblad_z2::steady::steady_realspace;
use lindblad_z2::{Boundary, DissipatorSpec, HamiltonianSpec, UndampedPolicy};

fn main() -> Result<(), lindblad_z2::Error> {
    let n = 10;
    let h = HamiltonianSpec::new(1.0, 0.5, 0.3, n, Boundary::Periodic);
    let d = DissipatorSpec::real(2.5, -1.0, 1.0, -2.0, n, Boundary::Periodic);
    let delta = steady_realspace(&h, &d, UndampedPolicy::Reject)?;
    let eps = spes(&delta);
    println!("single-particle spectrum: {:?}", eps.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>());

    let levels = many_body_levels(&eps, 8)?;
    for (r, l) in levels.levels.iter().enumerate() {
        println!("  Xi[{r}] = {:.6e}  pattern {:?}", l.xi, levels.pattern(r));
    }
    let all = many_body_levels(&eps, 1 << n)?;
    println!("sum over all {} levels = {:.15}", all.levels.len(), all.levels.iter().map(|l| l.xi).sum::<f64>());

    let g = g_from_delta(&delta)?;
    let back = delta_from_g(&g, Boundary::Periodic)?;
    println!("modular round trip residual = {:.3e}", (back.imag() - delta.imag()).amax());
    Ok(())
}
