//! Bound- and constraint-aware design search.
//!
//! Nelder–Mead on the unit box of the free parameters, with constraint
//! violations and box excursions added as an exact (linear) penalty. It is
//! restarted from every corner of the box and from its center. The best
//! feasible point over all evaluations wins; ties go to the earliest one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explorer::report::{run_scenario, SimulationReport};
use crate::explorer::scenario::Scenario;

pub const MAX_FREE_PARAMETERS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub path: String,
    pub lower: f64,
    pub upper: f64,
}

impl FreeParameter {
    pub fn new(path: &str, lower: f64, upper: f64) -> Self {
        Self {
            path: path.to_string(),
            lower,
            upper,
        }
    }

    fn at(&self, u: f64) -> f64 {
        self.lower + (self.upper - self.lower) * u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Minimize the minimum detectable field.
    MinDetectableField,
    /// Maximize |sensitivity|.
    Sensitivity,
}

impl Objective {
    /// Value to minimize.
    pub fn cost(self, r: &SimulationReport) -> f64 {
        match self {
            Objective::MinDetectableField => r.min_detectable_field,
            Objective::Sensitivity => -r.sensitivity.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    /// Largest allowed |anchor stress| / yield.
    pub max_stress_fraction: f64,
    /// K
    pub max_temperature_rise: f64,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            max_stress_fraction: 0.5,
            max_temperature_rise: 1.0,
        }
    }
}

impl Constraints {
    /// Sum of relative constraint excesses; zero when feasible.
    pub fn violation(&self, r: &SimulationReport) -> f64 {
        let stress = r.anchor_stress.abs() / r.yield_stress;
        let s = (stress - self.max_stress_fraction).max(0.0) / self.max_stress_fraction;
        let t = (r.temperature_rise - self.max_temperature_rise).max(0.0)
            / self.max_temperature_rise;
        s + t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Positive factor applied to the objective; the search is invariant to it.
    pub objective_scale: f64,
    /// Penalty weight relative to the objective's magnitude at the box center.
    pub penalty_weight: f64,
    pub max_evaluations_per_start: usize,
    /// Simplex size (in unit-box coordinates) at which a start stops.
    pub tolerance: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            objective_scale: 1.0,
            penalty_weight: 1e3,
            max_evaluations_per_start: 400,
            tolerance: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Parameter values in path order.
    pub parameters: Vec<f64>,
    /// Scaled objective; absent when the point could not be evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub violation: f64,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best: Scenario,
    pub parameters: Vec<f64>,
    pub report: SimulationReport,
    pub trace: Vec<Evaluation>,
}

/// Minimizer over the unit box with a penalty for leaving it.
struct Problem<'a, F> {
    dim: usize,
    eval: &'a F,
    penalty_scale: f64,
}

impl<F: Fn(&[f64]) -> (Option<f64>, f64) + Sync> Problem<'_, F> {
    /// Penalized cost and the trace entry for `u`.
    fn cost(&self, u: &[f64], trace: &mut Vec<(Vec<f64>, Option<f64>, f64)>) -> f64 {
        let clamped: Vec<f64> = u.iter().map(|x| x.clamp(0.0, 1.0)).collect();
        let outside: f64 = u.iter().zip(&clamped).map(|(a, b)| (a - b).abs()).sum();
        let (obj, violation) = (self.eval)(&clamped);
        trace.push((clamped, obj, violation));
        match obj {
            Some(f) if f.is_finite() => f + self.penalty_scale * (violation + outside),
            _ => f64::INFINITY,
        }
    }

    fn nelder_mead(
        &self,
        start: &[f64],
        opts: &OptimizeOptions,
    ) -> Vec<(Vec<f64>, Option<f64>, f64)> {
        let n = self.dim;
        let mut trace = Vec::new();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let c0 = self.cost(start, &mut trace);
        simplex.push((start.to_vec(), c0));
        for i in 0..n {
            let mut v = start.to_vec();
            v[i] += if start[i] <= 0.5 { 0.25 } else { -0.25 };
            let c = self.cost(&v, &mut trace);
            simplex.push((v, c));
        }

        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        };

        while trace.len() < opts.max_evaluations_per_start {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            let size = simplex[1..]
                .iter()
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if size < opts.tolerance {
                break;
            }
            if best.is_finite() && worst - best <= 1e-13 * best.abs() && size < 1e3 * opts.tolerance {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(v, _)| v[j]).sum::<f64>() / n as f64)
                .collect();
            let xw = simplex[n].0.clone();
            let xr = lerp(&centroid, &xw, -1.0);
            let fr = self.cost(&xr, &mut trace);

            if fr < best {
                let xe = lerp(&centroid, &xw, -2.0);
                let fe = self.cost(&xe, &mut trace);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst {
                let xc = lerp(&centroid, &xw, -0.5);
                let fc = self.cost(&xc, &mut trace);
                (xc, fc)
            } else {
                let xc = lerp(&centroid, &xw, 0.5);
                let fc = self.cost(&xc, &mut trace);
                (xc, fc)
            };
            if fc < fr.min(worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x0 = simplex[0].0.clone();
            for k in 1..=n {
                let xs = lerp(&x0, &simplex[k].0, 0.5);
                let fs = self.cost(&xs, &mut trace);
                simplex[k] = (xs, fs);
            }
        }
        trace
    }
}

/// Corners of the unit box followed by its center.
fn start_points(dim: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = (0..1usize << dim)
        .map(|mask| (0..dim).map(|j| ((mask >> j) & 1) as f64).collect())
        .collect();
    pts.push(vec![0.5; dim]);
    pts
}

/// Generic penalized minimization over the unit box `[0, 1]^dim`.
///
/// `eval` returns the objective (None when the point fails) and the
/// constraint violation. Returns every evaluation in a deterministic order.
pub fn penalized_search<F>(dim: usize, eval: &F, opts: &OptimizeOptions) -> Vec<(Vec<f64>, Option<f64>, f64)>
where
    F: Fn(&[f64]) -> (Option<f64>, f64) + Sync,
{
    let center = vec![0.5; dim];
    let (f_center, v_center) = eval(&center);
    let scale = match f_center {
        Some(f) if f.is_finite() && f != 0.0 => f.abs(),
        _ => 1.0,
    };
    let problem = Problem {
        dim,
        eval,
        penalty_scale: opts.penalty_weight * scale,
    };
    let mut trace = vec![(center, f_center, v_center)];
    trace.extend(
        start_points(dim)
            .par_iter()
            .map(|s| problem.nelder_mead(s, opts))
            .collect::<Vec<_>>()
            .concat(),
    );
    trace
}

fn check_free(scenario: &Scenario, free: &[FreeParameter]) -> Result<()> {
    if free.is_empty() || free.len() > MAX_FREE_PARAMETERS {
        return Err(Error::InvalidInput(format!(
            "optimize needs 1 to {MAX_FREE_PARAMETERS} free parameters, got {}",
            free.len()
        )));
    }
    for p in free {
        scenario.get_number(&p.path)?;
        if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
            return Err(Error::InvalidInput(format!(
                "{}: bounds must be finite with lower < upper, got [{}, {}]",
                p.path, p.lower, p.upper
            )));
        }
    }
    Ok(())
}

fn apply(scenario: &Scenario, free: &[FreeParameter], values: &[f64]) -> Result<Scenario> {
    let mut s = scenario.clone();
    for (p, &v) in free.iter().zip(values) {
        s = s.with_number(&p.path, v)?;
    }
    Ok(s)
}

pub fn optimize(
    scenario: &Scenario,
    free_parameters: &[FreeParameter],
    objective: Objective,
    constraints: &Constraints,
) -> Result<OptimizeResult> {
    optimize_with(scenario, free_parameters, objective, constraints, &OptimizeOptions::default())
}

pub fn optimize_with(
    scenario: &Scenario,
    free_parameters: &[FreeParameter],
    objective: Objective,
    constraints: &Constraints,
    options: &OptimizeOptions,
) -> Result<OptimizeResult> {
    check_free(scenario, free_parameters)?;
    if !(options.objective_scale > 0.0) {
        return Err(Error::InvalidInput("objective_scale must be > 0".into()));
    }
    let to_values = |u: &[f64]| -> Vec<f64> {
        free_parameters.iter().zip(u).map(|(p, &x)| p.at(x)).collect()
    };
    let eval = |u: &[f64]| -> (Option<f64>, f64) {
        match apply(scenario, free_parameters, &to_values(u)).and_then(|s| run_scenario(&s)) {
            Ok(r) => (
                Some(options.objective_scale * objective.cost(&r)),
                constraints.violation(&r),
            ),
            Err(_) => (None, f64::INFINITY),
        }
    };
    let raw = penalized_search(free_parameters.len(), &eval, options);

    let mut trace = Vec::with_capacity(raw.len());
    let mut best: Option<(usize, f64)> = None;
    for (u, obj, violation) in raw {
        let feasible = obj.is_some_and(f64::is_finite) && violation == 0.0;
        if feasible {
            let f = obj.unwrap_or(f64::INFINITY);
            if best.is_none_or(|(_, b)| f < b) {
                best = Some((trace.len(), f));
            }
        }
        trace.push(Evaluation {
            parameters: to_values(&u),
            objective: obj,
            violation,
            feasible,
            error: obj.is_none().then(|| "evaluation failed".to_string()),
        });
    }

    let Some((i, _)) = best else {
        return Err(Error::Infeasible {
            evaluations: trace.len(),
        });
    };
    let parameters = trace[i].parameters.clone();
    let best = apply(scenario, free_parameters, &parameters)?;
    let report = run_scenario(&best)?;
    Ok(OptimizeResult {
        best,
        parameters,
        report,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |u: &[f64]| (Some((u[0] - 0.3).powi(2) + 2.0 * (u[1] - 0.7).powi(2)), 0.0);
        let trace = penalized_search(2, &f, &OptimizeOptions::default());
        let best = trace
            .iter()
            .min_by(|a, b| a.1.unwrap().total_cmp(&b.1.unwrap()))
            .unwrap();
        assert!((best.0[0] - 0.3).abs() < 1e-5 && (best.0[1] - 0.7).abs() < 1e-5, "{:?}", best.0);
    }

    #[test]
    fn start_set() {
        let s = start_points(2);
        assert_eq!(s.len(), 5);
        assert_eq!(s[4], vec![0.5, 0.5]);
    }

    #[test]
    fn bad_inputs() {
        let s = Scenario::default_lorentz();
        let c = Constraints::default();
        assert!(optimize(&s, &[], Objective::Sensitivity, &c).is_err());
        let p = FreeParameter::new("drive.amplitude", 1.0, 0.5);
        assert!(optimize(&s, &[p], Objective::Sensitivity, &c).is_err());
        let p = FreeParameter::new("drive.nope", 0.0, 1.0);
        assert!(matches!(
            optimize(&s, &[p], Objective::Sensitivity, &c),
            Err(Error::UnknownPath(_))
        ));
    }

    #[test]
    fn current_hits_thermal_limit() {
        let s = Scenario::default_lorentz();
        let p = FreeParameter::new("drive.amplitude", 0.1e-3, 20e-3);
        let r = optimize(&s, &[p], Objective::Sensitivity, &Constraints::default()).unwrap();
        assert!(r.report.temperature_rise <= 1.0);
        assert!(r.report.temperature_rise > 0.99, "{}", r.report.temperature_rise);
        assert!(r.trace.iter().any(|e| !e.feasible));
    }

    #[test]
    fn infeasible() {
        let s = Scenario::default_lorentz();
        let p = FreeParameter::new("drive.amplitude", 10e-3, 20e-3);
        let c = Constraints {
            max_stress_fraction: 0.5,
            max_temperature_rise: 1e-3,
        };
        assert!(matches!(
            optimize(&s, &[p], Objective::Sensitivity, &c),
            Err(Error::Infeasible { .. })
        ));
    }
}
