//! Thermal (Johnson) and flicker (Hooge) noise of the piezoresistive readout.
//!
//! All spectral densities are one-sided and expressed at the bridge output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transduction::GaugeSpec;

/// Boltzmann constant (J/K), exact SI value.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Johnson voltage noise 4·k_B·T·R (V²/Hz).
pub fn thermal_electrical_psd(resistance: f64, temperature: f64) -> f64 {
    4.0 * BOLTZMANN * temperature * resistance
}

/// Brownian force noise 4·k_B·T·D (N²/Hz).
pub fn thermal_mechanical_psd(damping: f64, temperature: f64) -> f64 {
    4.0 * BOLTZMANN * temperature * damping
}

/// Hooge 1/f noise α·V²/(N·f) of a gauge biased at `gauge_voltage`.
pub fn flicker_psd(alpha: f64, gauge_voltage: f64, gauge: &GaugeSpec, frequency: f64) -> Result<f64> {
    if !(frequency > 0.0) {
        return Err(Error::Domain(format!(
            "flicker PSD needs f > 0, got {frequency}"
        )));
    }
    let n = gauge.carrier_count()?;
    Ok(flicker_coefficient(alpha, gauge_voltage, n) / frequency)
}

/// α·V²/N, the flicker PSD at 1 Hz (V²).
pub fn flicker_coefficient(alpha: f64, gauge_voltage: f64, carrier_count: f64) -> f64 {
    alpha * gauge_voltage * gauge_voltage / carrier_count
}

/// Frequency at which the flicker and Johnson PSDs are equal.
pub fn corner_frequency(
    alpha: f64,
    gauge_voltage: f64,
    carrier_count: f64,
    resistance: f64,
    temperature: f64,
) -> f64 {
    flicker_coefficient(alpha, gauge_voltage, carrier_count)
        / thermal_electrical_psd(resistance, temperature)
}

/// White and 1/f components of the output noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSources {
    /// V²/Hz
    pub thermal_electrical: f64,
    /// Mechanical force noise referred to the output (V²/Hz).
    pub thermal_mechanical_referred: f64,
    /// V²; the flicker PSD is this over f.
    pub flicker_coefficient: f64,
}

impl NoiseSources {
    pub fn flicker_at(&self, frequency: f64) -> f64 {
        self.flicker_coefficient / frequency
    }

    pub fn total_psd(&self, frequency: f64) -> f64 {
        self.thermal_electrical + self.thermal_mechanical_referred + self.flicker_at(frequency)
    }

    pub fn corner_frequency(&self) -> f64 {
        self.flicker_coefficient / self.thermal_electrical
    }
}

fn check_band(band: (f64, f64)) -> Result<()> {
    let (f1, f2) = band;
    if !(f1 > 0.0 && f2 > f1 && f2.is_finite()) {
        return Err(Error::Domain(format!(
            "noise band must satisfy 0 < f_low < f_high, got ({f1}, {f2})"
        )));
    }
    Ok(())
}

/// RMS output noise over `band`, integrating each component in closed form.
pub fn rms_noise(sources: &NoiseSources, band: (f64, f64)) -> Result<f64> {
    check_band(band)?;
    let (f1, f2) = band;
    let white = (sources.thermal_electrical + sources.thermal_mechanical_referred) * (f2 - f1);
    let pink = sources.flicker_coefficient * (f2 / f1).ln();
    Ok((white + pink).sqrt())
}

pub fn min_detectable_field(sensitivity: f64, rms: f64, snr_target: f64) -> Result<f64> {
    if sensitivity == 0.0 || !sensitivity.is_finite() {
        return Err(Error::Domain(format!(
            "minimum detectable field needs a nonzero sensitivity, got {sensitivity}"
        )));
    }
    Ok(snr_target * rms / sensitivity.abs())
}

pub fn snr(signal: f64, rms: f64) -> f64 {
    if signal == 0.0 {
        0.0
    } else {
        signal.abs() / rms
    }
}

/// Per-source PSDs and integrated figures of merit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    /// V²/Hz
    pub thermal_electrical_psd: f64,
    /// V²/Hz
    pub thermal_mechanical_psd_referred: f64,
    /// Flicker PSD at 1 Hz (V²/Hz); scales as 1/f.
    pub flicker_coefficient: f64,
    pub band_low: f64,
    pub band_high: f64,
    /// V
    pub rms: f64,
    /// Hz
    pub corner_frequency: f64,
    pub snr: f64,
    /// T
    pub min_detectable_field: f64,
}

impl NoiseBudget {
    pub fn new(
        sources: &NoiseSources,
        band: (f64, f64),
        sensitivity: f64,
        field: f64,
        snr_target: f64,
    ) -> Result<Self> {
        let rms = rms_noise(sources, band)?;
        Ok(Self {
            thermal_electrical_psd: sources.thermal_electrical,
            thermal_mechanical_psd_referred: sources.thermal_mechanical_referred,
            flicker_coefficient: sources.flicker_coefficient,
            band_low: band.0,
            band_high: band.1,
            rms,
            corner_frequency: sources.corner_frequency(),
            snr: snr(sensitivity * field, rms),
            min_detectable_field: min_detectable_field(sensitivity, rms, snr_target)?,
        })
    }

    pub fn sources(&self) -> NoiseSources {
        NoiseSources {
            thermal_electrical: self.thermal_electrical_psd,
            thermal_mechanical_referred: self.thermal_mechanical_psd_referred,
            flicker_coefficient: self.flicker_coefficient,
        }
    }

    pub fn flicker_psd_at(&self, frequency: f64) -> f64 {
        self.flicker_coefficient / frequency
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::builtin_material;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gauge_with_count(n: f64) -> GaugeSpec {
        let mut m = builtin_material("silicon").unwrap();
        let (l, w, t) = (100e-6, 10e-6, 100e-9);
        m.carrier_density = Some(n / (l * w * t));
        GaugeSpec {
            length: l,
            width: w,
            thickness: t,
            resistance: 1e3,
            material: m,
        }
    }

    #[test]
    fn johnson_psd() {
        assert_relative_eq!(thermal_electrical_psd(1e3, 300.0), 1.656_778_8e-17, max_relative = 1e-7);
        assert_relative_eq!(
            thermal_electrical_psd(2e3, 300.0),
            2.0 * thermal_electrical_psd(1e3, 300.0),
            max_relative = 1e-15
        );
        assert_eq!(thermal_electrical_psd(1e3, 0.0), 0.0);
    }

    #[test]
    fn brownian_psd() {
        assert_relative_eq!(thermal_mechanical_psd(1e-6, 300.0), 1.656_778_8e-26, max_relative = 1e-7);
        assert_eq!(thermal_mechanical_psd(0.0, 300.0), 0.0);
    }

    #[test]
    fn hooge_psd() {
        let g = gauge_with_count(1e9);
        assert_relative_eq!(flicker_psd(4e-6, 1.0, &g, 10.0).unwrap(), 4e-16, max_relative = 1e-12);
        assert_relative_eq!(
            flicker_psd(4e-6, 1.0, &g, 20.0).unwrap(),
            0.5 * flicker_psd(4e-6, 1.0, &g, 10.0).unwrap(),
            max_relative = 1e-15
        );
        assert_eq!(flicker_psd(4e-6, 0.0, &g, 10.0).unwrap(), 0.0);
        assert!(matches!(flicker_psd(4e-6, 1.0, &g, 0.0), Err(Error::Domain(_))));
        let mut bad = g.clone();
        bad.material = builtin_material("aluminum").unwrap();
        assert!(matches!(flicker_psd(4e-6, 1.0, &bad, 1.0), Err(Error::MissingProperty { .. })));
    }

    #[test]
    fn corner_is_crossover() {
        let fc = corner_frequency(4e-6, 2.5, 1.5e10, 1e3, 300.0);
        let g = gauge_with_count(1.5e10);
        let flicker = flicker_psd(4e-6, 2.5, &g, fc).unwrap();
        assert_relative_eq!(flicker, thermal_electrical_psd(1e3, 300.0), max_relative = 1e-12);
        assert_relative_eq!(
            corner_frequency(4e-6, 2.5, 1.5e10, 2e3, 300.0),
            0.5 * fc,
            max_relative = 1e-15
        );
    }

    #[test]
    fn white_rms() {
        let s = NoiseSources {
            thermal_electrical: thermal_electrical_psd(1e3, 300.0),
            thermal_mechanical_referred: 0.0,
            flicker_coefficient: 0.0,
        };
        let rms = rms_noise(&s, (1.0, 1e4)).unwrap();
        assert_relative_eq!(rms, (1.656_778_8e-17f64 * 9999.0).sqrt(), max_relative = 1e-7);
        assert_relative_eq!(rms, 4.07e-7, max_relative = 1e-3);
        assert!(rms_noise(&s, (10.0, 10.0)).is_err());
        assert!(rms_noise(&s, (0.0, 10.0)).is_err());
    }

    /// Trapezoid rule over a log-spaced grid.
    fn quadrature_rms(s: &NoiseSources, band: (f64, f64), points: usize) -> f64 {
        let (a, b) = (band.0.ln(), band.1.ln());
        let fs: Vec<f64> = (0..points)
            .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
            .collect();
        let integral: f64 = fs
            .windows(2)
            .map(|w| 0.5 * (s.total_psd(w[0]) + s.total_psd(w[1])) * (w[1] - w[0]))
            .sum();
        integral.sqrt()
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let s = NoiseSources {
            thermal_electrical: 1.6e-17,
            thermal_mechanical_referred: 1e-19,
            flicker_coefficient: 1.6e-15,
        };
        let exact = rms_noise(&s, (1.0, 1e4)).unwrap();
        let numeric = quadrature_rms(&s, (1.0, 1e4), 10_000);
        assert_relative_eq!(exact, numeric, max_relative = 1e-3);
    }

    #[test]
    fn detectable_field() {
        assert_eq!(min_detectable_field(0.15, 0.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(min_detectable_field(0.15, 4.07e-7, 1.0).unwrap(), 2.713e-6, max_relative = 1e-3);
        assert_relative_eq!(
            min_detectable_field(0.30, 4.07e-7, 1.0).unwrap(),
            0.5 * min_detectable_field(0.15, 4.07e-7, 1.0).unwrap(),
            max_relative = 1e-15
        );
        assert!(min_detectable_field(0.0, 1e-7, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn rms_grows_with_band(f2 in 10.0f64..1e4, extra in 1.0f64..1e4) {
            let s = NoiseSources {
                thermal_electrical: 1.6e-17,
                thermal_mechanical_referred: 0.0,
                flicker_coefficient: 1.6e-15,
            };
            prop_assert!(rms_noise(&s, (1.0, f2)).unwrap() <= rms_noise(&s, (1.0, f2 + extra)).unwrap());
        }
    }
}
