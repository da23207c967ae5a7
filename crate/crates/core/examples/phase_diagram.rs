//! Steady-state phase diagram over `(u1/v1, u2/v1)` at `v2/v1 = -2`, drawn in ASCII.

use std::time::Instant;

use lindblad_z2::steady::{phase_diagram, Axis, CellPhase, PhaseGrid, PhaseMethod};
use lindblad_z2::Sign;

fn main() -> Result<(), lindblad_z2::Error> {
    let grid = PhaseGrid { u1_over_v1: Axis::new(-3.0, 3.0, 201), u2_over_v1: Axis::new(-3.0, 3.0, 201), v2_over_v1: -2.0 };
    let clock = Instant::now();
    let diagram = phase_diagram(&grid, PhaseMethod::ClosedForm)?;
    println!("{} cells in {:.2?}", diagram.cells.len(), clock.elapsed());
    println!("rows: u2/v1 from 3 down to -3; columns: u1/v1 from -3 to 3");
    println!("symbols: a (+,+)  b (+,-)  c (-,+)  d (-,-)  . boundary");

    for j in (0..grid.u2_over_v1.count).rev().step_by(8) {
        let row: String = (0..grid.u1_over_v1.count)
            .step_by(4)
            .map(|i| match diagram.cell(i, j).phase {
                CellPhase::Phase(p) => match (p.m0, p.mpi) {
                    (Sign::Plus, Sign::Plus) => 'a',
                    (Sign::Plus, Sign::Minus) => 'b',
                    (Sign::Minus, Sign::Plus) => 'c',
                    (Sign::Minus, Sign::Minus) => 'd',
                },
                CellPhase::Boundary { .. } => '.',
            })
            .collect();
        println!("{:>6.2} {row}", grid.u2_over_v1.value(j));
    }
    let topo = diagram.cells.iter().filter(|c| matches!(c.phase, CellPhase::Phase(p) if p.is_topological())).count();
    println!("cells with nu = -1: {topo}");
    Ok(())
}
