//! Output voltage of the default Lorentz sensor across 0.1 to 50 mT, with
//! the deviation from a straight-line fit.

use memsmag::explorer::{sweep, Scale, Scenario};

fn main() -> memsmag::Result<()> {
    let s = Scenario::default_lorentz();
    let r = sweep(&s, "environment.field_magnitude", 1e-4, 5e-2, 12, Scale::Log)?;
    let pts: Vec<(f64, f64)> = r
        .rows
        .iter()
        .filter_map(|row| row.report.as_ref().map(|rep| (row.value, rep.output_at_field)))
        .collect();

    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    println!("{:>12} {:>14} {:>12}", "B (T)", "V_out (V)", "residual");
    for (b, v) in &pts {
        println!("{b:>12.4e} {v:>14.6e} {:>12.3e}", v - (slope * b + intercept));
    }
    println!("fit: {slope:.5e} V/T, intercept {intercept:.4e} V");
    Ok(())
}
