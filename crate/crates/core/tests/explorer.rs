use approx::assert_relative_eq;
use proptest::prelude::*;

use memsmag::explorer::optimize::{penalized_search, OptimizeOptions};
use memsmag::explorer::{
    optimize, run_scenario, sweep, Constraints, FreeParameter, Objective, Scale, Scenario,
};

#[test]
fn sweep_rows_match_direct_runs() {
    let s = Scenario::default_lorentz();
    let r = sweep(&s, "sensor.support_beam.width", 10e-6, 60e-6, 7, Scale::Log).unwrap();
    assert_eq!(r.rows.len(), 7);
    for row in &r.rows {
        let direct = run_scenario(&s.with_number("sensor.support_beam.width", row.value).unwrap()).unwrap();
        assert_eq!(row.report.as_ref().unwrap(), &direct);
    }
}

#[test]
fn ferro_sweep_over_layer_thickness() {
    let s = Scenario::default_ferro();
    let r = sweep(&s, "sensor.suspension.layers[1].thickness", 0.5e-6, 2e-6, 4, Scale::Linear).unwrap();
    let angles: Vec<f64> = r
        .rows
        .iter()
        .map(|row| row.report.as_ref().unwrap().lift.unwrap().tip_angle)
        .collect();
    assert!(angles.iter().all(|a| a.is_finite()));
}

#[test]
fn optimizer_best_is_feasible_and_on_thermal_boundary() {
    let s = Scenario::default_lorentz();
    let c = Constraints::default();
    let free = [FreeParameter::new("drive.amplitude", 1e-4, 2e-2)];
    let r = optimize(&s, &free, Objective::Sensitivity, &c).unwrap();
    assert_eq!(c.violation(&r.report), 0.0);
    // ΔT = I²·R·Rth = 1 K at I = sqrt(1e-5) A
    assert_relative_eq!(r.parameters[0], 1e-5f64.sqrt(), max_relative = 1e-5);
    assert!(r.trace.len() > 10);
}

#[test]
fn optimizer_is_deterministic() {
    let s = Scenario::default_lorentz().with_number("drive.amplitude", 1e-3).unwrap();
    let free = [
        FreeParameter::new("sensor.support_beam.length", 200e-6, 800e-6),
        FreeParameter::new("sensor.gauge.resistance", 1e3, 2e4),
    ];
    let a = optimize(&s, &free, Objective::MinDetectableField, &Constraints::default()).unwrap();
    let b = optimize(&s, &free, Objective::MinDetectableField, &Constraints::default()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn search_never_reports_an_infeasible_best(cx in 0.0f64..1.0, cy in 0.0f64..1.0, r in 0.05f64..0.5) {
        // minimize distance to (cx, cy) subject to staying outside a disc of radius r
        let eval = |u: &[f64]| {
            let d2 = (u[0] - cx).powi(2) + (u[1] - cy).powi(2);
            (Some(d2), (r - d2.sqrt()).max(0.0))
        };
        let trace = penalized_search(2, &eval, &OptimizeOptions::default());
        let best = trace
            .iter()
            .filter(|e| e.2 == 0.0)
            .min_by(|a, b| a.1.unwrap().total_cmp(&b.1.unwrap()))
            .unwrap();
        let d = best.1.unwrap().sqrt();
        prop_assert!(d >= r);
        prop_assert!(d <= r * 1.02 + 1e-6);
    }

    #[test]
    fn output_linear_in_field(b in 0.0f64..0.05) {
        let s = Scenario::default_lorentz().with_number("environment.field_magnitude", b).unwrap();
        let r = run_scenario(&s).unwrap();
        prop_assert!((r.output_at_field - (r.sensitivity * b + r.offset)).abs() <= 1e-15 * r.output_at_field.abs().max(1e-12));
    }

    #[test]
    fn snr_falls_with_temperature(t in 200.0f64..400.0, dt in 1.0f64..100.0) {
        let s = Scenario::default_lorentz();
        let cold = run_scenario(&s.with_number("environment.temperature", t).unwrap()).unwrap();
        let hot = run_scenario(&s.with_number("environment.temperature", t + dt).unwrap()).unwrap();
        prop_assert!(hot.noise.snr < cold.noise.snr);
    }
}
