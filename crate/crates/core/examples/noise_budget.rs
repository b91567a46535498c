//! Per-source noise PSDs for the default Lorentz sensor, and how the
//! mechanical share changes with support-beam width.

use memsmag::explorer::{run_scenario, sweep, Scale, Scenario};

fn main() -> memsmag::Result<()> {
    let s = Scenario::default_lorentz();
    let n = run_scenario(&s)?.noise;
    let src = n.sources();
    println!("band {} .. {} Hz", n.band_low, n.band_high);
    println!("johnson      {:.3e} V²/Hz", src.thermal_electrical);
    println!("brownian     {:.3e} V²/Hz (referred)", src.thermal_mechanical_referred);
    for f in [1.0, 10.0, 100.0, 1e3, 1e4] {
        println!("flicker @{f:>6} Hz {:.3e} V²/Hz", src.flicker_at(f));
    }
    println!("corner {:.1} Hz, rms {:.3e} V", n.corner_frequency, n.rms);

    println!("\nsupport width   mech/elec ratio");
    let r = sweep(&s, "sensor.support_beam.width", 5e-6, 60e-6, 6, Scale::Log)?;
    for row in &r.rows {
        if let Some(rep) = &row.report {
            let b = &rep.noise;
            println!(
                "{:>10.1} um   {:.3e}",
                row.value * 1e6,
                b.thermal_mechanical_psd_referred / b.thermal_electrical_psd
            );
        }
    }
    Ok(())
}
