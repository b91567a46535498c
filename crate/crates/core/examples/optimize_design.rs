//! Searches support-beam length and width for the lowest detectable field
//! at 3 mA, within the stress and self-heating limits.

use memsmag::explorer::{optimize, Constraints, FreeParameter, Objective, Scenario};

fn main() -> memsmag::Result<()> {
    let s = Scenario::default_lorentz().with_number("drive.amplitude", 3e-3)?;
    let free = [
        FreeParameter::new("sensor.support_beam.length", 200e-6, 800e-6),
        FreeParameter::new("sensor.support_beam.width", 10e-6, 60e-6),
    ];
    let before = memsmag::explorer::run_scenario(&s)?;
    let r = optimize(&s, &free, Objective::MinDetectableField, &Constraints::default())?;
    println!("evaluations          {}", r.trace.len());
    println!("length               {:.2} um", r.parameters[0] * 1e6);
    println!("width                {:.2} um", r.parameters[1] * 1e6);
    println!(
        "min detectable field {:.4e} T (start {:.4e} T)",
        r.report.min_detectable_field, before.min_detectable_field
    );
    println!("stress margin        {:.3}", r.report.stress_margin);
    println!("temperature rise     {:.3} K", r.report.temperature_rise);
    Ok(())
}
