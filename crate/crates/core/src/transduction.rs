//! Field-to-voltage chain for both sensor types.
//!
//! Lorentz sensor: current × top beam × field → force → anchor stress →
//! ΔR/R → bridge voltage. Ferromagnetic sensor: plate moment × field →
//! torque → end moment on the suspension beams → anchor stress → voltage.
//!
//! All stage functions are linear in the load, so every sensitivity below is
//! the product of the per-stage gains.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{Capability, Material};
use crate::mechanics::{composite_section, max_anchor_stress, tip_deflection, BeamGeometry};

/// Currents above this level produce non-negligible Joule heating (A).
pub const HIGH_CURRENT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSpec {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    /// Ω
    pub resistance: f64,
    pub material: Material,
}

impl GaugeSpec {
    pub fn volume(&self) -> f64 {
        self.length * self.width * self.thickness
    }

    /// Number of carriers in the gauge volume.
    pub fn carrier_count(&self) -> Result<f64> {
        self.material.validate_for(Capability::Piezoresistive)?;
        Ok(self.volume() * self.material.carrier_density.unwrap_or_default())
    }

    pub fn violations(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        for (k, x) in [
            ("length", self.length),
            ("width", self.width),
            ("thickness", self.thickness),
            ("resistance", self.resistance),
        ] {
            if !(x > 0.0) || !x.is_finite() {
                v.push(format!("{prefix}.{k}: must be > 0, got {x}"));
            }
        }
        v
    }
}

/// M-shaped half-loop Lorentz magnetometer.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzDesign {
    /// Length of the current-carrying top beam (m).
    pub top_beam_length: f64,
    pub support_beam: BeamGeometry,
    /// Number of anchored beams that share the tip load.
    pub load_share_count: u32,
    pub gauge: GaugeSpec,
    /// Ω
    pub loop_resistance: f64,
    /// Loop-to-substrate thermal resistance (K/W).
    pub thermal_resistance: f64,
    /// V
    pub bridge_bias: f64,
}

impl LorentzDesign {
    /// Anchor stress per newton of total tip force.
    pub fn stress_per_force(&self) -> f64 {
        let b = &self.support_beam;
        max_anchor_stress(1.0, b.length, b.width, b.thickness(), self.load_share_count)
    }

    /// Bridge output per pascal of anchor stress.
    pub fn volts_per_stress(&self) -> Result<f64> {
        let pi = self.gauge.material.pi_longitudinal()?;
        Ok(bridge_output(piezo_fractional_resistance(1.0, pi), self.bridge_bias))
    }
}

/// Nickel plate on suspension cantilevers.
#[derive(Debug, Clone, PartialEq)]
pub struct FerroDesign {
    pub plate_length: f64,
    pub plate_width: f64,
    pub plate_thickness: f64,
    /// A/m
    pub magnetization: f64,
    pub plate_density: f64,
    pub suspension: BeamGeometry,
    pub suspension_count: u32,
    pub gauge: GaugeSpec,
    pub bridge_bias: f64,
}

impl FerroDesign {
    pub fn plate_volume(&self) -> f64 {
        self.plate_length * self.plate_width * self.plate_thickness
    }

    pub fn plate_mass(&self) -> f64 {
        self.plate_volume() * self.plate_density
    }

    /// Anchor stress per N·m of total torque.
    pub fn stress_per_torque(&self) -> f64 {
        let b = &self.suspension;
        let t = b.thickness();
        6.0 / (f64::from(self.suspension_count.max(1)) * b.width * t * t)
    }

    pub fn volts_per_stress(&self) -> Result<f64> {
        let pi = self.gauge.material.pi_longitudinal()?;
        Ok(bridge_output(piezo_fractional_resistance(1.0, pi), self.bridge_bias))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Waveform {
    Dc,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Drive {
    pub waveform: Waveform,
    /// Half-loop current amplitude (A).
    pub amplitude: f64,
    /// Hz; ignored for dc.
    pub frequency: f64,
}

impl Drive {
    pub fn dc(amplitude: f64) -> Self {
        Self {
            waveform: Waveform::Dc,
            amplitude,
            frequency: 0.0,
        }
    }

    pub fn square(amplitude: f64, frequency: f64) -> Self {
        Self {
            waveform: Waveform::Square,
            amplitude,
            frequency,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            v.push(format!("drive.amplitude: must be >= 0, got {}", self.amplitude));
        }
        if self.waveform == Waveform::Square && !(self.frequency > 0.0) {
            v.push(format!(
                "drive.frequency: must be > 0 for a square drive, got {}",
                self.frequency
            ));
        }
        v
    }

    /// Instantaneous current; the square wave starts on its positive half.
    pub fn current_at(&self, t: f64) -> f64 {
        match self.waveform {
            Waveform::Dc => self.amplitude,
            Waveform::Square => {
                let phase = (t * self.frequency).rem_euclid(1.0);
                if phase < 0.5 {
                    self.amplitude
                } else {
                    -self.amplitude
                }
            }
        }
    }

    /// Amplitude of the first harmonic seen by a resonant filter.
    pub fn fundamental_amplitude(&self) -> f64 {
        match self.waveform {
            Waveform::Dc => self.amplitude,
            Waveform::Square => 4.0 / PI * self.amplitude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    /// T
    pub field_magnitude: f64,
    /// Angle between field and current (Lorentz) or magnetization (ferro), rad.
    pub field_angle: f64,
    /// K
    pub temperature: f64,
    pub snr_target: f64,
}

impl Environment {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.field_magnitude >= 0.0) || !self.field_magnitude.is_finite() {
            v.push(format!(
                "environment.field_magnitude: must be >= 0, got {}",
                self.field_magnitude
            ));
        }
        if !self.field_angle.is_finite() {
            v.push("environment.field_angle: must be finite".into());
        }
        if !(self.temperature > 0.0) {
            v.push(format!(
                "environment.temperature: must be > 0, got {}",
                self.temperature
            ));
        }
        if !(self.snr_target > 0.0) {
            v.push(format!(
                "environment.snr_target: must be > 0, got {}",
                self.snr_target
            ));
        }
        v
    }
}

pub fn lorentz_force(current: f64, top_beam_length: f64, field: f64, angle: f64) -> f64 {
    current * top_beam_length * field * angle.sin()
}

/// Magnitude of m × B with m = M·V.
pub fn ferro_torque(magnetization: f64, plate_volume: f64, field: f64, angle: f64) -> f64 {
    magnetization * plate_volume * field * angle.sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FerroDeflection {
    pub tip_deflection: f64,
    pub anchor_stress: f64,
}

/// Suspension response to a plate torque split equally over the beams.
pub fn ferro_deflection(design: &FerroDesign, torque: f64) -> Result<FerroDeflection> {
    let beam = &design.suspension;
    let section = composite_section(beam)?;
    let per_beam = torque / f64::from(design.suspension_count.max(1));
    let l = beam.length;
    Ok(FerroDeflection {
        tip_deflection: per_beam * l * l / (2.0 * section.flexural_rigidity),
        anchor_stress: design.stress_per_torque() * torque,
    })
}

pub fn piezo_fractional_resistance(stress: f64, pi_longitudinal: f64) -> f64 {
    pi_longitudinal * stress
}

/// Single-active-arm Wheatstone bridge.
pub fn bridge_output(fractional_resistance: f64, bias: f64) -> f64 {
    bias * fractional_resistance / 4.0
}

/// dV_out/dB of the Lorentz sensor (V/T).
pub fn lorentz_sensitivity(design: &LorentzDesign, drive: &Drive, env: &Environment) -> Result<f64> {
    let force_per_tesla = lorentz_force(drive.amplitude, design.top_beam_length, 1.0, env.field_angle);
    Ok(force_per_tesla * design.stress_per_force() * design.volts_per_stress()?)
}

/// dV_out/dB of the ferromagnetic sensor (V/T).
pub fn ferro_sensitivity(design: &FerroDesign, env: &Environment) -> Result<f64> {
    let torque_per_tesla = ferro_torque(design.magnetization, design.plate_volume(), 1.0, env.field_angle);
    Ok(torque_per_tesla * design.stress_per_torque() * design.volts_per_stress()?)
}

pub fn joule_offset(current: f64, offset_coefficient: f64) -> f64 {
    offset_coefficient * current * current
}

/// Field-independent bridge offset caused by loop self-heating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum OffsetModel {
    /// V = c·I²
    Quadratic { coefficient: f64 },
    /// V = a·|I|^p
    PowerLaw { prefactor: f64, exponent: f64 },
}

/// Offset coefficient reproducing 0.03 mV at 10 mA.
pub const DEFAULT_OFFSET_COEFFICIENT: f64 = 0.3;

/// Measured offset calibration points (A, V).
pub const OFFSET_POINTS: [(f64, f64); 2] = [(10e-3, 0.03e-3), (50e-3, 0.1e-3)];

impl Default for OffsetModel {
    fn default() -> Self {
        OffsetModel::Quadratic {
            coefficient: DEFAULT_OFFSET_COEFFICIENT,
        }
    }
}

impl OffsetModel {
    /// Two-point power-law fit through (I₁, V₁) and (I₂, V₂).
    pub fn fit_power_law(p1: (f64, f64), p2: (f64, f64)) -> Result<Self> {
        let ok = |p: (f64, f64)| p.0 > 0.0 && p.1 > 0.0;
        if !ok(p1) || !ok(p2) || p1.0 == p2.0 {
            return Err(Error::Domain(
                "power-law offset fit needs two distinct positive points".into(),
            ));
        }
        let exponent = (p2.1 / p1.1).ln() / (p2.0 / p1.0).ln();
        let prefactor = p1.1 / p1.0.powf(exponent);
        Ok(OffsetModel::PowerLaw {
            prefactor,
            exponent,
        })
    }

    pub fn offset(&self, current: f64) -> f64 {
        match *self {
            OffsetModel::Quadratic { coefficient } => joule_offset(current, coefficient),
            OffsetModel::PowerLaw {
                prefactor,
                exponent,
            } => {
                if current == 0.0 {
                    0.0
                } else {
                    prefactor * current.abs().powf(exponent)
                }
            }
        }
    }

    pub fn violations(&self) -> Vec<String> {
        match *self {
            OffsetModel::Quadratic { coefficient } if !(coefficient >= 0.0) => {
                vec![format!("offset.coefficient: must be >= 0, got {coefficient}")]
            }
            OffsetModel::PowerLaw {
                prefactor,
                exponent,
            } if !(prefactor >= 0.0) || !(exponent > 0.0) => vec![format!(
                "offset: power law needs prefactor >= 0 and exponent > 0, got {prefactor}, {exponent}"
            )],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JouleHeating {
    /// K
    pub temperature_rise: f64,
    pub high_current: bool,
}

pub fn joule_temperature_rise(current: f64, loop_resistance: f64, thermal_resistance: f64) -> JouleHeating {
    JouleHeating {
        temperature_rise: current * current * loop_resistance * thermal_resistance,
        high_current: current.abs() > HIGH_CURRENT_THRESHOLD,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    /// Bridge output including offset (V).
    pub output: f64,
    /// Anchor stress from the field (Pa).
    pub stress: f64,
    /// Total Lorentz force (N).
    pub force: f64,
    /// Joule offset (V).
    pub offset: f64,
}

pub fn end_to_end_response(
    design: &LorentzDesign,
    drive: &Drive,
    env: &Environment,
    offset: &OffsetModel,
) -> Result<Response> {
    let sensitivity = lorentz_sensitivity(design, drive, env)?;
    let force = lorentz_force(
        drive.amplitude,
        design.top_beam_length,
        env.field_magnitude,
        env.field_angle,
    );
    let off = offset.offset(drive.amplitude);
    Ok(Response {
        output: sensitivity * env.field_magnitude + off,
        stress: design.stress_per_force() * force,
        force,
        offset: off,
    })
}

/// Tip deflection of one support beam under its share of the Lorentz force.
pub fn lorentz_tip_deflection(design: &LorentzDesign, force: f64) -> Result<f64> {
    let beam = &design.support_beam;
    let section = composite_section(beam)?;
    Ok(tip_deflection(
        &section,
        beam.length,
        force / f64::from(design.load_share_count.max(1)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{builtin_material, LayerSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn layer(name: &str, t: f64) -> LayerSpec {
        LayerSpec::new(builtin_material(name).unwrap(), t).unwrap()
    }

    fn gauge() -> GaugeSpec {
        GaugeSpec {
            length: 150e-6,
            width: 10e-6,
            thickness: 100e-9,
            resistance: 1e3,
            material: builtin_material("silicon").unwrap(),
        }
    }

    fn design() -> LorentzDesign {
        LorentzDesign {
            top_beam_length: 500e-6,
            support_beam: BeamGeometry::new(
                300e-6,
                20e-6,
                vec![layer("silicon_nitride", 350e-9), layer("aluminum", 1e-6)],
            )
            .unwrap(),
            load_share_count: 3,
            gauge: gauge(),
            loop_resistance: 2.0,
            thermal_resistance: 3e5,
            bridge_bias: 2.0,
        }
    }

    fn env(b: f64) -> Environment {
        Environment {
            field_magnitude: b,
            field_angle: FRAC_PI_2,
            temperature: 300.0,
            snr_target: 1.0,
        }
    }

    #[test]
    fn lorentz_force_cases() {
        assert_eq!(lorentz_force(10e-3, 500e-6, 1e-3, 0.0), 0.0);
        assert_relative_eq!(lorentz_force(10e-3, 500e-6, 1e-3, FRAC_PI_2), 5e-9, max_relative = 1e-12);
    }

    #[test]
    fn torque_cases() {
        assert_eq!(ferro_torque(4.8e5, 2.5e-15, 0.4, 0.0), 0.0);
        let v = 100e-6 * 50e-6 * 500e-9;
        assert_relative_eq!(v, 2.5e-15, max_relative = 1e-12);
        assert_relative_eq!(ferro_torque(4.8e5, v, 0.4, FRAC_PI_2), 4.8e-10, max_relative = 1e-12);
    }

    #[test]
    fn piezo_and_bridge() {
        assert_eq!(piezo_fractional_resistance(0.0, 1e-9), 0.0);
        let f = piezo_fractional_resistance(8.23e4, 1e-9);
        assert_relative_eq!(f, 8.23e-5, max_relative = 1e-12);
        assert!(piezo_fractional_resistance(-1.0, 1e-9) < 0.0);
        assert_eq!(bridge_output(0.0, 2.0), 0.0);
        assert_relative_eq!(bridge_output(f, 2.0), 41.15e-6, max_relative = 1e-12);
        assert_relative_eq!(bridge_output(f, 4.0), 2.0 * bridge_output(f, 2.0), max_relative = 1e-15);
    }

    #[test]
    fn sensitivity_is_chain_product() {
        let d = design();
        let e = env(1e-3);
        let drive = Drive::dc(10e-3);
        let s = lorentz_sensitivity(&d, &drive, &e).unwrap();
        let b = &d.support_beam;
        let pi = d.gauge.material.pi_longitudinal.unwrap();
        let expected = (10e-3 * 500e-6) * (6.0 * b.length / (b.width * b.thickness().powi(2) * 3.0)) * pi * (2.0 / 4.0);
        assert_relative_eq!(s, expected, max_relative = 1e-12);
        let s2 = lorentz_sensitivity(&d, &Drive::dc(20e-3), &e).unwrap();
        assert_relative_eq!(s2, 2.0 * s, max_relative = 1e-15);
        assert_eq!(lorentz_sensitivity(&d, &Drive::dc(0.0), &e).unwrap(), 0.0);
    }

    #[test]
    fn sensitivity_needs_piezo_material() {
        let mut d = design();
        d.gauge.material = builtin_material("silicon_nitride").unwrap();
        assert!(matches!(
            lorentz_sensitivity(&d, &Drive::dc(1e-3), &env(1e-3)),
            Err(Error::MissingProperty { .. })
        ));
    }

    #[test]
    fn offset_models() {
        assert_eq!(joule_offset(0.0, 0.3), 0.0);
        assert_relative_eq!(joule_offset(10e-3, 0.3), 0.03e-3, max_relative = 1e-12);
        let p = OffsetModel::fit_power_law(OFFSET_POINTS[0], OFFSET_POINTS[1]).unwrap();
        let OffsetModel::PowerLaw { exponent, .. } = p else { unreachable!() };
        assert_relative_eq!(exponent, 0.748, max_relative = 1e-3);
        for (i, v) in OFFSET_POINTS {
            assert_relative_eq!(p.offset(i), v, max_relative = 1e-12);
        }
        assert!(OffsetModel::fit_power_law((1.0, 1.0), (1.0, 2.0)).is_err());
    }

    #[test]
    fn joule_heating() {
        let h = joule_temperature_rise(0.0, 100.0, 1e4);
        assert_eq!(h.temperature_rise, 0.0);
        assert!(!h.high_current);
        let h = joule_temperature_rise(10e-3, 100.0, 1e4);
        // (10 mA)² · 100 Ω · 1e4 K/W
        assert_relative_eq!(h.temperature_rise, 100.0, max_relative = 1e-12);
        assert!(h.high_current);
        let h2 = joule_temperature_rise(20e-3, 100.0, 1e4);
        assert_relative_eq!(h2.temperature_rise, 4.0 * h.temperature_rise, max_relative = 1e-12);
    }

    #[test]
    fn response_at_zero_field_is_offset() {
        let r = end_to_end_response(&design(), &Drive::dc(10e-3), &env(0.0), &OffsetModel::default()).unwrap();
        assert_eq!(r.output, r.offset);
        assert_relative_eq!(r.offset, 0.03e-3, max_relative = 1e-12);
    }

    #[test]
    fn ferro_deflection_linear() {
        let d = FerroDesign {
            plate_length: 100e-6,
            plate_width: 50e-6,
            plate_thickness: 500e-9,
            magnetization: 4.85e5,
            plate_density: 8908.0,
            suspension: BeamGeometry::new(
                600e-6,
                10e-6,
                vec![layer("silicon_nitride", 350e-9), layer("aluminum", 1e-6)],
            )
            .unwrap(),
            suspension_count: 2,
            gauge: gauge(),
            bridge_bias: 2.0,
        };
        let z = ferro_deflection(&d, 0.0).unwrap();
        assert_eq!((z.tip_deflection, z.anchor_stress), (0.0, 0.0));
        let a = ferro_deflection(&d, 1e-11).unwrap();
        let b = ferro_deflection(&d, 3e-11).unwrap();
        assert_relative_eq!(b.tip_deflection, 3.0 * a.tip_deflection, max_relative = 1e-12);
        assert_relative_eq!(b.anchor_stress, 3.0 * a.anchor_stress, max_relative = 1e-12);
    }

    #[test]
    fn square_drive_waveform() {
        let d = Drive::square(1.0, 10.0);
        assert_eq!(d.current_at(0.01), 1.0);
        assert_eq!(d.current_at(0.06), -1.0);
        assert_relative_eq!(d.fundamental_amplitude(), 4.0 / PI, max_relative = 1e-15);
        assert_eq!(Drive::dc(2.0).current_at(123.0), 2.0);
        let bad = Drive { amplitude: -0.01, ..Drive::dc(0.0) };
        assert!(bad.violations()[0].contains("drive.amplitude"));
    }

    proptest! {
        #[test]
        fn field_part_is_odd(b in 1e-5f64..0.1, i in 1e-4f64..0.05) {
            let d = design();
            let drive = Drive::dc(i);
            let off = OffsetModel::default();
            let pos = end_to_end_response(&d, &drive, &env(b), &off).unwrap();
            let mut neg_env = env(b);
            neg_env.field_magnitude = -b;
            let neg = end_to_end_response(&d, &drive, &neg_env, &off).unwrap();
            prop_assert!((pos.output + neg.output - 2.0 * pos.offset).abs() <= 1e-12 * pos.output.abs());
            prop_assert_eq!(lorentz_force(i, 5e-4, -b, 0.3), -lorentz_force(i, 5e-4, b, 0.3));
            prop_assert_eq!(ferro_torque(4.8e5, 1e-15, -b, 0.3), -ferro_torque(4.8e5, 1e-15, b, 0.3));
        }
    }
}
