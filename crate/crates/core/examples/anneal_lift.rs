//! Self-assembly lift of the ferromagnetic sensor's bimorph suspension:
//! tip angle against anneal temperature and the length that gives 90 degrees.

use memsmag::explorer::{run_scenario, sweep, Scale, Scenario};

fn main() -> memsmag::Result<()> {
    let s = Scenario::default_ferro();
    let r = sweep(&s, "anneal.temperature", 423.15, 673.15, 6, Scale::Linear)?;
    println!("{:>8} {:>12} {:>10} {:>12}", "T (C)", "stress (MPa)", "angle", "height (um)");
    for row in &r.rows {
        if let Some(l) = row.report.as_ref().and_then(|rep| rep.lift) {
            println!(
                "{:>8.1} {:>12.1} {:>9.2}° {:>12.2}",
                row.value - 273.15,
                l.anneal_stress / 1e6,
                l.tip_angle.to_degrees(),
                l.tip_height * 1e6
            );
        }
    }
    let lift = run_scenario(&s)?.lift.expect("ferro reports lift");
    if let Some(len) = lift.right_angle_length {
        println!("90 degree suspension length: {:.3} um", len * 1e6);
    }
    Ok(())
}
