//! Closed-form mechanics checked against the finite-difference beam solver.

use serde::{Deserialize, Serialize};

use crate::beam_oracle::{convergence_order, solve_static, TipLoad};
use crate::error::Result;
use crate::mechanics::{composite_section, tip_deflection, BeamGeometry};

pub const ORACLE_GRID: usize = 400;
pub const CONVERGENCE_GRIDS: [usize; 3] = [100, 200, 400];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    /// Relative tolerance, or the absolute half-width for `convergence_order`.
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn relative(name: &str, value: f64, reference: f64, tolerance: f64) -> Self {
        let pass = ((value - reference) / reference).abs() <= tolerance;
        Self {
            name: name.into(),
            value,
            reference,
            tolerance,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Compares tip deflection (1%), single-beam anchor stress (2%) and the
/// observed discretization order (2 ± 0.2) for a unit tip force.
pub fn verify_beam(geom: &BeamGeometry) -> Result<VerifyReport> {
    let force = 1e-6;
    let section = composite_section(geom)?;
    let sol = solve_static(geom, TipLoad::Force(force), ORACLE_GRID)?;

    let analytic_tip = tip_deflection(&section, geom.length, force);
    // clamp moment F·l at the extreme fiber of the composite section; the
    // rectangular 6·F·l/(w·t²) only holds when the neutral axis is centered
    let analytic_stress = force * geom.length * section.extreme_fiber / section.area_moment;
    let order = convergence_order(geom, TipLoad::Force(force), &CONVERGENCE_GRIDS)?;

    Ok(VerifyReport {
        checks: vec![
            Check::relative("tip_deflection", analytic_tip, sol.tip_deflection(), 0.01),
            Check::relative("anchor_stress", analytic_stress, sol.anchor_stress, 0.02),
            Check {
                name: "convergence_order".into(),
                value: order,
                reference: 2.0,
                tolerance: 0.2,
                pass: (order - 2.0).abs() <= 0.2,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::scenario::{Scenario, Sensor};

    #[test]
    fn default_support_beam_passes() {
        let Sensor::Lorentz(d) = Scenario::default_lorentz().resolve().unwrap().sensor else {
            panic!()
        };
        let r = verify_beam(&d.support_beam).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
