//! Steady states at the high-symmetry momenta: direct solve, spectral formula and closed form.

use lindblad_z2::model::BlochSystem;
use lindblad_z2::pfaffian::{m_sign, pf_i_delta};
use lindblad_z2::steady::{
    pt_regime, steady_bloch_direct, steady_bloch_spectral, steady_nu, steady_pf_closed, SpectralDecomposition,
};
use lindblad_z2::{Boundary, DissipatorSpec, HamiltonianSpec, HighSymmetry};

fn main() -> Result<(), lindblad_z2::Error> {
    let h = HamiltonianSpec::new(1.0, 0.6, -0.4, 4, Boundary::Periodic);
    for (u1, u2, v1, v2) in [(3.0, 3.0, 1.0, -2.0), (2.5, -1.0, 1.0, -2.0), (1.0, -1.0, 1.0, -2.0)] {
        let d = DissipatorSpec::real(u1, u2, v1, v2, 4, Boundary::Periodic);
        println!("dissipator (u1, u2, v1, v2) = ({u1}, {u2}, {v1}, {v2})");
        for ks in HighSymmetry::BOTH {
            let sys = BlochSystem::new(&h, &d, ks.k())?;
            let hv = sys.h_vector()?;
            let y = sys.y()?;
            let direct = steady_bloch_direct(&sys.heff(), &sys.yblock)?;
            let spectral = match SpectralDecomposition::new(&sys.heff()) {
                Ok(dec) => format!("{:.10}", pf_i_delta(&steady_bloch_spectral(&dec, &sys.yblock)?)),
                Err(e) => format!("n/a ({e})"),
            };
            println!(
                "  k = {ks:>2}: y = {y:>8.4}, h0 = {:>8.4}, PT {:?}; Pf direct = {:.10}, spectral = {spectral}, closed = {:.10}, M = {}",
                hv.h0,
                pt_regime(&hv).phase,
                pf_i_delta(&direct),
                steady_pf_closed(y, hv.h0)?,
                m_sign(&direct)?
            );
        }
        println!("  {}", steady_nu(&d)?);
    }
    Ok(())
}
