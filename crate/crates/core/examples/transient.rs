//! Square-wave drive at resonance: integrates the tip motion and compares
//! the settled amplitude with the fundamental-harmonic estimate.

use memsmag::dynamics::{square_wave_resonant_amplitude, steady_state_amplitude};
use memsmag::explorer::report::{run_scenario, run_transient, scenario_resonator, TransientOptions};
use memsmag::explorer::scenario::Sensor;
use memsmag::explorer::Scenario;
use memsmag::transduction::lorentz_force;

fn main() -> memsmag::Result<()> {
    let s = Scenario::default_lorentz();
    let series = run_transient(
        &s,
        &TransientOptions {
            at_resonance: true,
            ..Default::default()
        },
    )?;
    let ss = steady_state_amplitude(&series, 0.6)?;
    let res = scenario_resonator(&s)?;
    let Sensor::Lorentz(design) = s.resolve()?.sensor else {
        unreachable!("default scenario is a lorentz sensor")
    };
    // tip force on one of the load-sharing support beams
    let force = lorentz_force(
        s.drive.amplitude,
        design.top_beam_length,
        s.environment.field_magnitude,
        s.environment.field_angle,
    ) / f64::from(design.load_share_count);
    let expected = square_wave_resonant_amplitude(&res, force);
    println!("{} samples, dt = {:.3e} s", series.samples.len(), series.dt);
    println!("settled amplitude {:.4e} m (estimate {:.4e} m)", ss.displacement, expected);
    println!("settled output    {:.4e} V", ss.voltage);
    println!("static sensitivity {:.4e} V/T", run_scenario(&s)?.sensitivity);
    Ok(())
}
