//! Compliance spectrum of the default support beam, the located peak and
//! the analytic damped peak.

use memsmag::dynamics::{analytic_peak_frequency, find_resonance, frequency_response, log_space};
use memsmag::explorer::report::scenario_resonator;
use memsmag::explorer::Scenario;

fn main() -> memsmag::Result<()> {
    let res = scenario_resonator(&Scenario::default_lorentz())?;
    let f0 = res.natural_frequency;
    println!("k = {:.4e} N/m, m_eff = {:.4e} kg, f0 = {f0:.2} Hz, Q = {}", res.stiffness, res.effective_mass, res.quality_factor);
    for f in log_space(f0 / 10.0, 10.0 * f0, 9) {
        let p = frequency_response(&res, f);
        println!("{:>10.1} Hz  |x/F| {:.4e} m/N  phase {:+.3} rad", p.frequency, p.amplitude, p.phase);
    }
    let peak = find_resonance(&res, f0 / 10.0, 10.0 * f0, 400)?;
    println!("peak {peak:.3} Hz, analytic {:.3} Hz", analytic_peak_frequency(&res).unwrap_or(f64::NAN));
    Ok(())
}
