//! Lumped second-order dynamics: frequency response, resonance search and
//! RK4 transients under square-wave Lorentz drive.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::mechanics::LumpedResonator;
use crate::transduction::{lorentz_force, Drive, Environment, LorentzDesign, Waveform};

/// Minimum samples per natural period accepted by [`simulate_transient`].
pub const MIN_STEPS_PER_PERIOD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyResponsePoint {
    pub frequency: f64,
    /// Displacement per unit force (m/N).
    pub amplitude: f64,
    /// rad, in (-π, 0]
    pub phase: f64,
}

pub fn frequency_response(resonator: &LumpedResonator, frequency: f64) -> FrequencyResponsePoint {
    let r = frequency / resonator.natural_frequency;
    let q = resonator.quality_factor;
    let re = 1.0 - r * r;
    let im = r / q;
    FrequencyResponsePoint {
        frequency,
        amplitude: (1.0 / resonator.stiffness) / (re * re + im * im).sqrt(),
        phase: -im.atan2(re),
    }
}

/// Frequency of maximum response, f₀·√(1 − 1/(2Q²)); `None` when Q ≤ 1/√2.
pub fn analytic_peak_frequency(resonator: &LumpedResonator) -> Option<f64> {
    let q = resonator.quality_factor;
    let arg = 1.0 - 1.0 / (2.0 * q * q);
    (arg > 0.0).then(|| resonator.natural_frequency * arg.sqrt())
}

pub fn log_space(f_min: f64, f_max: f64, points: usize) -> Vec<f64> {
    let (a, b) = (f_min.ln(), f_max.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Locates the maximum of `amplitude` over [f_min, f_max].
///
/// A log-spaced sweep brackets the maximum, then successive parabolic
/// interpolation in log-frequency refines it.
pub fn find_peak<F: Fn(f64) -> f64>(amplitude: F, f_min: f64, f_max: f64, points: usize) -> Result<f64> {
    if !(f_min > 0.0 && f_max > f_min) {
        return Err(Error::InvalidInput(format!(
            "sweep needs 0 < f_min < f_max, got [{f_min}, {f_max}]"
        )));
    }
    if points < 16 {
        return Err(Error::InvalidInput(format!(
            "sweep needs at least 16 points, got {points}"
        )));
    }
    let fs = log_space(f_min, f_max, points);
    let amps: Vec<f64> = fs.iter().map(|&f| amplitude(f)).collect();
    let (imax, _) = amps
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &a)| if a > acc.1 { (i, a) } else { acc });
    if imax == 0 || imax == points - 1 {
        return Err(Error::NoPeak { f_min, f_max });
    }

    let g = |x: f64| amplitude(x.exp());
    let (mut a, mut b, mut c) = (fs[imax - 1].ln(), fs[imax].ln(), fs[imax + 1].ln());
    let (mut fa, mut fb, mut fc) = (amps[imax - 1], amps[imax], amps[imax + 1]);
    for _ in 0..200 {
        if c - a <= 1e-12 * b.abs().max(1.0) {
            break;
        }
        let num = (b - a).powi(2) * (fb - fc) - (b - c).powi(2) * (fb - fa);
        let den = (b - a) * (fb - fc) - (b - c) * (fb - fa);
        let mut x = if den != 0.0 { b - 0.5 * num / den } else { f64::NAN };
        let min_step = 1e-3 * (c - a);
        if !x.is_finite() || x <= a || x >= c || (x - b).abs() < min_step {
            // golden step into the larger sub-interval
            x = if c - b > b - a {
                b + 0.381_966 * (c - b)
            } else {
                b - 0.381_966 * (b - a)
            };
        }
        let fx = g(x);
        if x > b {
            if fx >= fb {
                (a, fa) = (b, fb);
                (b, fb) = (x, fx);
            } else {
                (c, fc) = (x, fx);
            }
        } else if fx >= fb {
            (c, fc) = (b, fb);
            (b, fb) = (x, fx);
        } else {
            (a, fa) = (x, fx);
        }
    }
    Ok(b.exp())
}

pub fn find_resonance(resonator: &LumpedResonator, f_min: f64, f_max: f64, points: usize) -> Result<f64> {
    find_peak(|f| frequency_response(resonator, f).amplitude, f_min, f_max, points)
}

/// m·x″ + c·x′ + k·x = F(t)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub mass: f64,
    pub damping: f64,
    pub stiffness: f64,
}

impl From<&LumpedResonator> for Oscillator {
    fn from(r: &LumpedResonator) -> Self {
        Self {
            mass: r.effective_mass,
            damping: r.damping,
            stiffness: r.stiffness,
        }
    }
}

impl Oscillator {
    fn accel(&self, x: f64, v: f64, force: f64) -> f64 {
        (force - self.damping * v - self.stiffness * x) / self.mass
    }

    /// One classical fourth-order Runge–Kutta step.
    pub fn rk4_step<F: Fn(f64) -> f64>(&self, force: &F, t: f64, x: f64, v: f64, dt: f64) -> (f64, f64) {
        let h2 = 0.5 * dt;
        let k1x = v;
        let k1v = self.accel(x, v, force(t));
        let k2x = v + h2 * k1v;
        let k2v = self.accel(x + h2 * k1x, v + h2 * k1v, force(t + h2));
        let k3x = v + h2 * k2v;
        let k3v = self.accel(x + h2 * k2x, v + h2 * k2v, force(t + h2));
        let k4x = v + dt * k3v;
        let k4v = self.accel(x + dt * k3x, v + dt * k3v, force(t + dt));
        (
            x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    }

    /// Integrates `steps` steps and returns (t, x, v) including the initial state.
    pub fn integrate<F: Fn(f64) -> f64>(
        &self,
        force: F,
        x0: f64,
        v0: f64,
        dt: f64,
        steps: usize,
    ) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(steps + 1);
        let (mut x, mut v) = (x0, v0);
        out.push((0.0, x, v));
        for i in 0..steps {
            let t = i as f64 * dt;
            (x, v) = self.rk4_step(&force, t, x, v, dt);
            out.push(((i + 1) as f64 * dt, x, v));
        }
        out
    }

    pub fn energy(&self, x: f64, v: f64) -> f64 {
        0.5 * self.mass * v * v + 0.5 * self.stiffness * x * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub displacement: f64,
    pub velocity: f64,
    pub output_voltage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub dt: f64,
    pub samples: Vec<Sample>,
    /// Drive period when the series is periodically forced (s).
    pub period: Option<f64>,
}

impl TimeSeries {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io {
            path: "<csv>".into(),
            source: e.into(),
        };
        w.write_record(["t", "x", "v", "V_out"]).map_err(io)?;
        for s in &self.samples {
            w.write_record([
                format!("{:e}", s.time),
                format!("{:e}", s.displacement),
                format!("{:e}", s.velocity),
                format!("{:e}", s.output_voltage),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            source: e,
        })
    }
}

/// Simulates the support-beam tip from rest under the drive's Lorentz force.
///
/// Each beam carries 1/`load_share_count` of the total force. The output
/// column maps the instantaneous elastic force k·x to anchor stress and then
/// through the bridge.
pub fn simulate_transient(
    resonator: &LumpedResonator,
    design: &LorentzDesign,
    drive: &Drive,
    env: &Environment,
    duration: f64,
    dt: f64,
) -> Result<TimeSeries> {
    let limit = 1.0 / (MIN_STEPS_PER_PERIOD * resonator.natural_frequency);
    if !(dt > 0.0) || dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let period = match drive.waveform {
        Waveform::Square => 1.0 / drive.frequency,
        Waveform::Dc => 1.0 / resonator.natural_frequency,
    };
    if !(duration >= 10.0 * period * (1.0 - 1e-12)) {
        return Err(Error::InvalidInput(format!(
            "duration {duration} s is shorter than 10 periods ({} s)",
            10.0 * period
        )));
    }

    let n = f64::from(design.load_share_count.max(1));
    let per_beam_per_amp =
        lorentz_force(1.0, design.top_beam_length, env.field_magnitude, env.field_angle) / n;
    let force = |t: f64| per_beam_per_amp * drive.current_at(t);
    let volts_per_metre =
        design.volts_per_stress()? * design.stress_per_force() * n * resonator.stiffness;

    let steps = (duration / dt).round() as usize;
    let osc = Oscillator::from(resonator);
    let samples = osc
        .integrate(force, 0.0, 0.0, dt, steps)
        .into_iter()
        .map(|(t, x, v)| Sample {
            time: t,
            displacement: x,
            velocity: v,
            output_voltage: volts_per_metre * x,
        })
        .collect();
    Ok(TimeSeries {
        dt,
        samples,
        period: (drive.waveform == Waveform::Square).then_some(period),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Half peak-to-peak displacement (m).
    pub displacement: f64,
    /// Half peak-to-peak output (V).
    pub voltage: f64,
}

fn half_p2p<I: Iterator<Item = f64>>(it: I) -> f64 {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    if lo.is_finite() {
        0.5 * (hi - lo)
    } else {
        0.0
    }
}

/// Steady-state amplitude over the tail of `series` after discarding the
/// first `settle_fraction` of it.
pub fn steady_state_amplitude(series: &TimeSeries, settle_fraction: f64) -> Result<SteadyState> {
    if !(0.0..1.0).contains(&settle_fraction) {
        return Err(Error::InvalidInput(format!(
            "settle_fraction must lie in [0, 1), got {settle_fraction}"
        )));
    }
    let start = (series.samples.len() as f64 * settle_fraction).floor() as usize;
    let tail = &series.samples[start..];
    if tail.len() < 2 {
        return Err(Error::InvalidInput("series too short".into()));
    }

    if let Some(period) = series.period {
        let per = (period / series.dt).round() as usize;
        if per >= 2 && tail.len() >= 2 * per {
            let last = &tail[tail.len() - per..];
            let prev = &tail[tail.len() - 2 * per..tail.len() - per];
            let a1 = half_p2p(last.iter().map(|s| s.displacement));
            let a0 = half_p2p(prev.iter().map(|s| s.displacement));
            let scale = a1.max(a0);
            if scale > 0.0 {
                let relative_change = (a1 - a0).abs() / scale;
                if relative_change > 0.01 {
                    return Err(Error::Unsettled { relative_change });
                }
            }
        }
    }

    Ok(SteadyState {
        displacement: half_p2p(tail.iter().map(|s| s.displacement)),
        voltage: half_p2p(tail.iter().map(|s| s.output_voltage)),
    })
}

/// (4/π)·Q·F/k: resonant amplitude of the square wave's fundamental.
pub fn square_wave_resonant_amplitude(resonator: &LumpedResonator, force_amplitude: f64) -> f64 {
    4.0 / PI * resonator.quality_factor * force_amplitude / resonator.stiffness
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn res(q: f64) -> LumpedResonator {
        // f0 = 5 kHz with k = 0.05 N/m
        let k = 0.05;
        let w0 = 2.0 * PI * 5e3;
        LumpedResonator::new(k, k / (w0 * w0), q).unwrap()
    }

    #[test]
    fn response_limits() {
        let r = res(20.0);
        let lo = frequency_response(&r, 1e-3);
        assert_relative_eq!(lo.amplitude, 1.0 / r.stiffness, max_relative = 1e-9);
        let at = frequency_response(&r, r.natural_frequency);
        assert_relative_eq!(at.amplitude, 20.0 / r.stiffness, max_relative = 1e-12);
        assert_relative_eq!(at.phase, -PI / 2.0, max_relative = 1e-12);
        let hi = frequency_response(&r, 100.0 * r.natural_frequency);
        assert!(hi.phase < -0.99 * PI && hi.phase > -PI);
    }

    /// Golden-section maximization, independent of `find_peak`.
    fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
        let g = 0.618_033_988_749_894_9;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn analytic_peak_matches_golden_section() {
        let r = res(20.0);
        let numeric = golden_max(|f| frequency_response(&r, f).amplitude, 2e3, 8e3);
        let analytic = analytic_peak_frequency(&r).unwrap();
        assert_relative_eq!(numeric, analytic, max_relative = 1e-3);
    }

    #[test]
    fn resonance_search() {
        let r = res(50.0);
        let f = find_resonance(&r, 1e3, 2e4, 64).unwrap();
        assert_relative_eq!(f, analytic_peak_frequency(&r).unwrap(), max_relative = 5e-3);
        let scaled = find_peak(|f| 7.5 * frequency_response(&r, f).amplitude, 1e3, 2e4, 64).unwrap();
        assert_relative_eq!(f, scaled, max_relative = 1e-9);
        assert!(matches!(find_resonance(&r, 1e4, 1e5, 64), Err(Error::NoPeak { .. })));
        assert!(find_resonance(&r, 1e3, 2e4, 8).is_err());
    }

    #[test]
    fn overdamped_has_no_peak() {
        let r = res(0.6);
        assert!(analytic_peak_frequency(&r).is_none());
        assert!(matches!(find_resonance(&r, 10.0, 1e6, 200), Err(Error::NoPeak { .. })));
    }

    fn free_decay_exact(o: &Oscillator, x0: f64, t: f64) -> f64 {
        let w0 = (o.stiffness / o.mass).sqrt();
        let zeta = o.damping / (2.0 * (o.stiffness * o.mass).sqrt());
        let wd = w0 * (1.0 - zeta * zeta).sqrt();
        x0 * (-zeta * w0 * t).exp() * ((wd * t).cos() + zeta * w0 / wd * (wd * t).sin())
    }

    fn max_error(o: &Oscillator, dt: f64, duration: f64) -> f64 {
        let steps = (duration / dt).round() as usize;
        o.integrate(|_| 0.0, 1e-6, 0.0, dt, steps)
            .iter()
            .map(|&(t, x, _)| (x - free_decay_exact(o, 1e-6, t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn rk4_fourth_order() {
        let o = Oscillator::from(&res(10.0));
        let period = 1.0 / 5e3;
        let e1 = max_error(&o, period / 40.0, 20.0 * period);
        let e2 = max_error(&o, period / 80.0, 20.0 * period);
        let ratio = e1 / e2;
        assert!((13.0..19.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn undamped_energy_drift() {
        let r = res(10.0);
        let o = Oscillator {
            damping: 0.0,
            ..Oscillator::from(&r)
        };
        let period = 1.0 / r.natural_frequency;
        let traj = o.integrate(|_| 0.0, 1e-6, 0.0, period / 200.0, 200 * 100);
        let e0 = o.energy(1e-6, 0.0);
        let (_, x, v) = *traj.last().unwrap();
        assert!((o.energy(x, v) - e0).abs() / e0 < 1e-3);
    }

    #[test]
    fn sinusoid_amplitude() {
        let dt = 1e-5;
        let samples = (0..10_001)
            .map(|i| {
                let t = i as f64 * dt;
                Sample {
                    time: t,
                    displacement: 2.5e-6 * (2.0 * PI * 100.0 * t).sin(),
                    velocity: 0.0,
                    output_voltage: 0.0,
                }
            })
            .collect();
        let s = TimeSeries {
            dt,
            samples,
            period: Some(0.01),
        };
        let a = steady_state_amplitude(&s, 0.5).unwrap();
        assert_relative_eq!(a.displacement, 2.5e-6, max_relative = 1e-6);
    }

    #[test]
    fn growing_signal_is_unsettled() {
        let dt = 1e-5;
        let samples = (0..10_001)
            .map(|i| {
                let t = i as f64 * dt;
                Sample {
                    time: t,
                    displacement: t * (2.0 * PI * 100.0 * t).sin(),
                    velocity: 0.0,
                    output_voltage: 0.0,
                }
            })
            .collect();
        let s = TimeSeries {
            dt,
            samples,
            period: Some(0.01),
        };
        assert!(matches!(steady_state_amplitude(&s, 0.5), Err(Error::Unsettled { .. })));
    }
}
