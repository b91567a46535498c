//! Runs the shipped Lorentz and ferromagnetic default scenarios and prints
//! the headline figures of each report.

use memsmag::explorer::{run_scenario, Scenario};

fn main() -> memsmag::Result<()> {
    for (name, scenario) in [
        ("lorentz", Scenario::default_lorentz()),
        ("ferro", Scenario::default_ferro()),
    ] {
        let r = run_scenario(&scenario)?;
        let n = &r.noise;
        println!("[{name}]");
        println!("  sensitivity          {:.4e} V/T", r.sensitivity);
        println!("  output at field      {:.4e} V (offset {:.4e} V)", r.output_at_field, r.offset);
        println!("  anchor stress        {:.4e} Pa (margin {:.3e})", r.anchor_stress, r.stress_margin);
        println!("  tip deflection       {:.4e} m", r.tip_deflection);
        println!("  resonant frequency   {:.4e} Hz, Q = {}", r.resonant_frequency, r.quality_factor);
        println!("  temperature rise     {:.4e} K", r.temperature_rise);
        println!("  corner frequency     {:.4e} Hz", n.corner_frequency);
        println!(
            "  mechanical/electrical noise at band top  {:.3e}",
            n.thermal_mechanical_psd_referred
                / (n.thermal_electrical_psd + n.flicker_psd_at(n.band_high))
        );
        println!("  rms noise            {:.4e} V", n.rms);
        println!("  min detectable field {:.4e} T", r.min_detectable_field);
        if let Some(l) = r.lift {
            println!("  lift angle           {:.4} deg", l.tip_angle.to_degrees());
            if let Some(len) = l.right_angle_length {
                println!("  90 deg lift length   {:.6e} m", len);
            }
        }
        for w in &r.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
