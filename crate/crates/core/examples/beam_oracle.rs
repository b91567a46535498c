//! Finite-difference beam solution against the closed-form cantilever, for
//! both shipped beams, with the observed grid convergence order.

use memsmag::beam_oracle::{solve_static, TipLoad};
use memsmag::explorer::scenario::Sensor;
use memsmag::explorer::verify::verify_beam;
use memsmag::explorer::Scenario;

fn main() -> memsmag::Result<()> {
    for s in [Scenario::default_lorentz(), Scenario::default_ferro()] {
        let beam = match s.resolve()?.sensor {
            Sensor::Lorentz(d) => d.support_beam,
            Sensor::Ferro(d) => d.suspension,
        };
        println!("beam {:.0} x {:.0} um, {} layers", beam.length * 1e6, beam.width * 1e6, beam.layers.len());
        for n in [50, 100, 200, 400] {
            let sol = solve_static(&beam, TipLoad::Force(1e-6), n)?;
            println!("  N = {n:>4}  tip {:.6e} m", sol.tip_deflection());
        }
        for c in verify_beam(&beam)?.checks {
            println!(
                "  {} {:<18} {:.6e} vs {:.6e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.reference
            );
        }
    }
    Ok(())
}
