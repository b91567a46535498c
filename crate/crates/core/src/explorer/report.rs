//! End-to-end evaluation of one scenario.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate_transient, TimeSeries};
use crate::error::{Error, Result};
use crate::explorer::scenario::{Scenario, Sensor};
use crate::mechanics::{
    anneal_stress, bimorph_lift, length_for_tip_angle, AnnealCalibration, lumped_resonator,
    BeamGeometry, LumpedResonator,
};
use crate::noise::{thermal_electrical_psd, thermal_mechanical_psd, NoiseBudget, NoiseSources};
use crate::transduction::{
    ferro_deflection, ferro_sensitivity, ferro_torque, joule_temperature_rise,
    lorentz_force, lorentz_sensitivity, lorentz_tip_deflection, FerroDesign, GaugeSpec,
    LorentzDesign, Waveform, HIGH_CURRENT_THRESHOLD,
};

/// Anneal-driven lift of a two-layer suspension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    /// Pa
    pub anneal_stress: f64,
    /// 1/m
    pub curvature: f64,
    /// rad
    pub tip_angle: f64,
    /// m
    pub tip_height: f64,
    /// Suspension length that would give a 90° lift (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_angle_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub sensor_kind: String,
    /// V/T
    pub sensitivity: f64,
    /// V
    pub offset: f64,
    /// sensitivity·B + offset (V)
    pub output_at_field: f64,
    /// Pa
    pub anchor_stress: f64,
    /// Pa, lowest yield stress in the stack.
    pub yield_stress: f64,
    /// yield / |anchor stress|
    pub stress_margin: f64,
    /// m
    pub tip_deflection: f64,
    /// Hz
    pub resonant_frequency: f64,
    pub quality_factor: f64,
    /// K
    pub temperature_rise: f64,
    /// T
    pub min_detectable_field: f64,
    pub warnings: Vec<String>,
    pub noise: NoiseBudget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftReport>,
}

/// The scenario echoed alongside its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub scenario: Scenario,
    pub report: SimulationReport,
}

impl SimulationReport {
    pub fn is_lorentz(&self) -> bool {
        self.sensor_kind == "lorentz"
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(Error::in_stage(name))
}

fn geometry_warnings(beam: &BeamGeometry, label: &str, out: &mut Vec<String>) {
    if let Some(w) = beam.slenderness_warning() {
        out.push(format!("{label}: {w}"));
    }
}

fn noise_sources(
    scenario: &Scenario,
    gauge: &GaugeSpec,
    bridge_bias: f64,
    damping: f64,
    volts_per_tip_force: f64,
) -> Result<NoiseSources> {
    let t = scenario.environment.temperature;
    let gauge_voltage = 0.5 * bridge_bias;
    let alpha = gauge.material.hooge_alpha.unwrap_or_default();
    let n = gauge.carrier_count()?;
    Ok(NoiseSources {
        thermal_electrical: scenario.bridge_noise_factor * thermal_electrical_psd(gauge.resistance, t),
        thermal_mechanical_referred: thermal_mechanical_psd(damping, t) * volts_per_tip_force.powi(2),
        flicker_coefficient: crate::noise::flicker_coefficient(alpha, gauge_voltage, n),
    })
}

fn band(s: &Scenario) -> (f64, f64) {
    (s.noise_band[0], s.noise_band[1])
}

/// Per-beam resonator of the Lorentz support beam.
pub fn lorentz_resonator(design: &LorentzDesign, q: f64) -> Result<LumpedResonator> {
    lumped_resonator(&design.support_beam, q)
}

/// Plate on its suspension beams, referred to the plate edge.
pub fn ferro_resonator(design: &FerroDesign, q: f64) -> Result<LumpedResonator> {
    let beam = lumped_resonator(&design.suspension, q)?;
    let n = f64::from(design.suspension_count.max(1));
    LumpedResonator::new(
        n * beam.stiffness,
        n * beam.effective_mass + design.plate_mass(),
        q,
    )
}

fn min_yield(beam: &BeamGeometry) -> Result<f64> {
    beam.yield_stress().ok_or_else(|| {
        Error::Validation(vec!["support stack defines no yield_stress".into()])
    })
}

fn margin(yield_stress: f64, stress: f64) -> f64 {
    if stress == 0.0 {
        f64::INFINITY
    } else {
        yield_stress / stress.abs()
    }
}

fn run_lorentz(s: &Scenario, d: &LorentzDesign) -> Result<SimulationReport> {
    let env = &s.environment;
    let drive = &s.drive;
    let mut warnings = Vec::new();
    geometry_warnings(&d.support_beam, "sensor.support_beam", &mut warnings);

    let sensitivity = stage("transduction", lorentz_sensitivity(d, drive, env))?;
    let force = lorentz_force(drive.amplitude, d.top_beam_length, env.field_magnitude, env.field_angle);
    let anchor_stress = d.stress_per_force() * force;
    let tip = stage("transduction", lorentz_tip_deflection(d, force))?;
    let offset = s.offset.offset(drive.amplitude);

    let heating = joule_temperature_rise(drive.amplitude, d.loop_resistance, d.thermal_resistance);
    if heating.high_current {
        warnings.push(format!(
            "high current: drive.amplitude {:e} A exceeds {:e} A; Joule heating raises the loop by {:e} K",
            drive.amplitude, HIGH_CURRENT_THRESHOLD, heating.temperature_rise
        ));
    }

    let res = stage("mechanics", lorentz_resonator(d, s.quality_factor))?;
    let n = f64::from(d.load_share_count.max(1));
    let volts_per_force = stage("transduction", d.volts_per_stress())? * d.stress_per_force() * n;
    let sources = stage(
        "noise",
        noise_sources(s, &d.gauge, d.bridge_bias, res.damping, volts_per_force),
    )?;
    let noise = stage(
        "noise",
        NoiseBudget::new(&sources, band(s), sensitivity, env.field_magnitude, env.snr_target),
    )?;
    let yield_stress = min_yield(&d.support_beam)?;

    Ok(SimulationReport {
        sensor_kind: "lorentz".into(),
        sensitivity,
        offset,
        output_at_field: sensitivity * env.field_magnitude + offset,
        anchor_stress,
        yield_stress,
        stress_margin: margin(yield_stress, anchor_stress),
        tip_deflection: tip,
        resonant_frequency: res.natural_frequency,
        quality_factor: res.quality_factor,
        temperature_rise: heating.temperature_rise,
        min_detectable_field: noise.min_detectable_field,
        warnings,
        noise,
        lift: None,
    })
}

fn lift_report(
    anneal_temperature: f64,
    calibration: &AnnealCalibration,
    beam: &BeamGeometry,
    warnings: &mut Vec<String>,
) -> Result<Option<LiftReport>> {
    let stress = anneal_stress(anneal_temperature, calibration);
    let profile = match bimorph_lift(beam, stress) {
        Ok(p) => p,
        Err(Error::UnsupportedStack(msg)) => {
            warnings.push(format!("lift not modelled: {msg}"));
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let right_angle_length = match length_for_tip_angle(beam, stress, FRAC_PI_2) {
        Ok(l) => Some(l),
        Err(Error::Domain(msg)) => {
            warnings.push(format!("no right-angle lift: {msg}"));
            None
        }
        Err(e) => return Err(e),
    };
    Ok(Some(LiftReport {
        anneal_stress: stress,
        curvature: profile.curvature,
        tip_angle: profile.tip_angle,
        tip_height: profile.tip_height,
        right_angle_length,
    }))
}

fn run_ferro(s: &Scenario, d: &FerroDesign, anneal: &AnnealCalibration) -> Result<SimulationReport> {
    let env = &s.environment;
    let mut warnings = Vec::new();
    geometry_warnings(&d.suspension, "sensor.suspension", &mut warnings);

    let sensitivity = stage("transduction", ferro_sensitivity(d, env))?;
    let torque = ferro_torque(d.magnetization, d.plate_volume(), env.field_magnitude, env.field_angle);
    let deflection = stage("transduction", ferro_deflection(d, torque))?;

    let res = stage("mechanics", ferro_resonator(d, s.quality_factor))?;
    let b = &d.suspension;
    let t = b.thickness();
    let n = f64::from(d.suspension_count.max(1));
    // a tip force F on n beams loads each anchor with 6·l·(F/n)/(w·t²)
    let volts_per_force = stage("transduction", d.volts_per_stress())? * 6.0 * b.length / (n * b.width * t * t);
    let sources = stage(
        "noise",
        noise_sources(s, &d.gauge, d.bridge_bias, res.damping, volts_per_force),
    )?;
    let noise = stage(
        "noise",
        NoiseBudget::new(&sources, band(s), sensitivity, env.field_magnitude, env.snr_target),
    )?;
    let lift = stage("mechanics", lift_report(s.anneal.temperature, anneal, b, &mut warnings))?;
    let yield_stress = min_yield(b)?;

    Ok(SimulationReport {
        sensor_kind: "ferro".into(),
        sensitivity,
        offset: 0.0,
        output_at_field: sensitivity * env.field_magnitude,
        anchor_stress: deflection.anchor_stress,
        yield_stress,
        stress_margin: margin(yield_stress, deflection.anchor_stress),
        tip_deflection: deflection.tip_deflection,
        resonant_frequency: res.natural_frequency,
        quality_factor: res.quality_factor,
        temperature_rise: 0.0,
        min_detectable_field: noise.min_detectable_field,
        warnings,
        noise,
        lift,
    })
}

/// Evaluates every stage of the sensor chain for `scenario`.
pub fn run_scenario(scenario: &Scenario) -> Result<SimulationReport> {
    let resolved = scenario.resolve()?;
    match &resolved.sensor {
        Sensor::Lorentz(d) => run_lorentz(scenario, d),
        Sensor::Ferro(d) => run_ferro(scenario, d, &resolved.anneal),
    }
}

/// Lumped resonator of the scenario's sensor.
pub fn scenario_resonator(scenario: &Scenario) -> Result<LumpedResonator> {
    match scenario.resolve()?.sensor {
        Sensor::Lorentz(d) => lorentz_resonator(&d, scenario.quality_factor),
        Sensor::Ferro(d) => ferro_resonator(&d, scenario.quality_factor),
    }
}

/// Time-step and length choices for [`run_transient`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransientOptions {
    /// s; defaults to 1/(200·f0).
    pub dt: Option<f64>,
    /// s; defaults to enough time for 10 drive periods and 12·Q/f0.
    pub duration: Option<f64>,
    /// Replaces the drive frequency with f0.
    pub at_resonance: bool,
}

/// Transient of a Lorentz scenario from rest.
pub fn run_transient(scenario: &Scenario, opts: &TransientOptions) -> Result<TimeSeries> {
    let Sensor::Lorentz(design) = scenario.resolve()?.sensor else {
        return Err(Error::InvalidInput(
            "transient simulation needs a lorentz sensor".into(),
        ));
    };
    let res = stage("mechanics", lorentz_resonator(&design, scenario.quality_factor))?;
    let f0 = res.natural_frequency;
    let mut drive = scenario.drive;
    if opts.at_resonance {
        drive.waveform = Waveform::Square;
        drive.frequency = f0;
    }
    let period = match drive.waveform {
        Waveform::Square => 1.0 / drive.frequency,
        Waveform::Dc => 1.0 / f0,
    };
    let dt = opts.dt.unwrap_or(1.0 / (200.0 * f0));
    let duration = opts
        .duration
        .unwrap_or_else(|| (10.0 * period).max(12.0 * res.quality_factor / f0));
    stage(
        "dynamics",
        simulate_transient(&res, &design, &drive, &scenario.environment, duration, dt),
    )
}
