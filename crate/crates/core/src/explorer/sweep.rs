//! One-parameter sweeps over a scenario.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explorer::report::{run_scenario, SimulationReport};
use crate::explorer::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// One sweep point. Exactly one of `report` and `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<SimulationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter_path: String,
    pub scale: Scale,
    pub scenario: Scenario,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn reports(&self) -> Vec<Option<&SimulationReport>> {
        self.rows.iter().map(|r| r.report.as_ref()).collect()
    }
}

/// `steps` points from `from` to `to` inclusive.
pub fn sweep_values(from: f64, to: f64, steps: usize, scale: Scale) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidInput(format!("sweep needs steps >= 2, got {steps}")));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidInput("sweep bounds must be finite".into()));
    }
    let last = (steps - 1) as f64;
    let mut v: Vec<f64> = match scale {
        Scale::Linear => (0..steps)
            .map(|i| from + (to - from) * i as f64 / last)
            .collect(),
        Scale::Log => {
            if !(from > 0.0 && to > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "log sweep needs positive bounds, got [{from}, {to}]"
                )));
            }
            let (a, b) = (from.ln(), to.ln());
            (0..steps)
                .map(|i| (a + (b - a) * i as f64 / last).exp())
                .collect()
        }
    };
    v[0] = from;
    v[steps - 1] = to;
    Ok(v)
}

/// Evaluates the scenario at each value of `parameter_path`. Points that fail
/// validation or evaluation become error rows; the sweep itself continues.
pub fn sweep(
    scenario: &Scenario,
    parameter_path: &str,
    from: f64,
    to: f64,
    steps: usize,
    scale: Scale,
) -> Result<SweepResult> {
    scenario.get_number(parameter_path)?;
    let values = sweep_values(from, to, steps, scale)?;
    sweep_at(scenario, parameter_path, &values, scale)
}

/// Like [`sweep`] but over an explicit list of values.
pub fn sweep_at(
    scenario: &Scenario,
    parameter_path: &str,
    values: &[f64],
    scale: Scale,
) -> Result<SweepResult> {
    scenario.get_number(parameter_path)?;
    let rows = values
        .par_iter()
        .map(|&value| {
            match scenario
                .with_number(parameter_path, value)
                .and_then(|s| run_scenario(&s))
            {
                Ok(r) => SweepRow {
                    value,
                    error: None,
                    report: Some(r),
                },
                Err(e) => {
                    log::warn!("sweep point {parameter_path} = {value:e} failed: {e}");
                    SweepRow {
                        value,
                        error: Some(e.to_string()),
                        report: None,
                    }
                }
            }
        })
        .collect();
    Ok(SweepResult {
        parameter_path: parameter_path.to_string(),
        scale,
        scenario: scenario.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn values_hit_endpoints() {
        let v = sweep_values(1e-4, 5e-2, 50, Scale::Log).unwrap();
        assert_eq!(v.len(), 50);
        assert_eq!((v[0], v[49]), (1e-4, 5e-2));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let l = sweep_values(0.0, 1.0, 5, Scale::Linear).unwrap();
        assert_eq!(l, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(sweep_values(0.0, 1.0, 1, Scale::Linear).is_err());
        assert!(sweep_values(0.0, 1.0, 3, Scale::Log).is_err());
    }

    #[test]
    fn unknown_path() {
        let s = Scenario::default_lorentz();
        assert!(matches!(
            sweep(&s, "drive.amplitudes", 0.0, 1.0, 3, Scale::Linear),
            Err(Error::UnknownPath(_))
        ));
    }

    #[test]
    fn offset_points() {
        let s = Scenario::default_lorentz()
            .with_number("environment.field_magnitude", 0.0)
            .unwrap();
        let r = sweep(&s, "drive.amplitude", 10e-3, 50e-3, 2, Scale::Linear).unwrap();
        let out: Vec<f64> = r.rows.iter().map(|r| r.report.as_ref().unwrap().output_at_field).collect();
        assert_relative_eq!(out[0], 0.03e-3, max_relative = 1e-12);
        assert_relative_eq!(out[1], 0.75e-3, max_relative = 1e-12);
    }

    #[test]
    fn failed_points_are_rows() {
        let s = Scenario::default_lorentz();
        let r = sweep(&s, "drive.amplitude", -0.01, 0.01, 3, Scale::Linear).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows[0].error.as_deref().unwrap().contains("drive.amplitude"));
        assert!(r.rows[1].error.is_some());
        assert!(r.rows[2].report.is_some());
    }
}
