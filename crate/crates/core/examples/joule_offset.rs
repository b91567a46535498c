//! Zero-field offset and self-heating against drive current.

use memsmag::explorer::{sweep, Scale, Scenario};

fn main() -> memsmag::Result<()> {
    let s = Scenario::default_lorentz().with_number("environment.field_magnitude", 0.0)?;
    let r = sweep(&s, "drive.amplitude", 1e-3, 50e-3, 8, Scale::Log)?;
    println!("{:>10} {:>12} {:>10}", "I (mA)", "offset (mV)", "dT (K)");
    for row in &r.rows {
        match &row.report {
            Some(rep) => println!(
                "{:>10.3} {:>12.4} {:>10.3}",
                row.value * 1e3,
                rep.offset * 1e3,
                rep.temperature_rise
            ),
            None => println!("{:>10.3} error: {}", row.value * 1e3, row.error.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}
