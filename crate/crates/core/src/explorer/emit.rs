//! CSV and TOML output.
//!
//! CSV headers carry their SI unit as a suffix (`sensitivity_V_per_T`).
//! Numbers are written in shortest round-trip exponent form, so identical
//! inputs give byte-identical files. The TOML form mirrors the report
//! structure and also echoes the resolved scenario.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{frequency_response, log_space};
use crate::error::{Error, Result};
use crate::mechanics::LumpedResonator;
use crate::noise::NoiseBudget;
use crate::explorer::optimize::OptimizeResult;
use crate::explorer::report::{ReportDocument, SimulationReport};
use crate::explorer::sweep::SweepResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Toml,
}

impl Format {
    /// Picks the format from a file extension; anything but `.csv` is TOML.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Toml,
        }
    }
}

type Column = (&'static str, fn(&SimulationReport) -> Option<f64>);

const COLUMNS: &[Column] = &[
    ("sensitivity_V_per_T", |r| Some(r.sensitivity)),
    ("offset_V", |r| Some(r.offset)),
    ("output_at_field_V", |r| Some(r.output_at_field)),
    ("anchor_stress_Pa", |r| Some(r.anchor_stress)),
    ("yield_stress_Pa", |r| Some(r.yield_stress)),
    ("stress_margin", |r| Some(r.stress_margin)),
    ("tip_deflection_m", |r| Some(r.tip_deflection)),
    ("resonant_frequency_Hz", |r| Some(r.resonant_frequency)),
    ("quality_factor", |r| Some(r.quality_factor)),
    ("temperature_rise_K", |r| Some(r.temperature_rise)),
    ("thermal_electrical_psd_V2_per_Hz", |r| Some(r.noise.thermal_electrical_psd)),
    ("thermal_mechanical_psd_V2_per_Hz", |r| Some(r.noise.thermal_mechanical_psd_referred)),
    ("flicker_psd_at_1Hz_V2_per_Hz", |r| Some(r.noise.flicker_coefficient)),
    ("corner_frequency_Hz", |r| Some(r.noise.corner_frequency)),
    ("rms_noise_V", |r| Some(r.noise.rms)),
    ("snr", |r| Some(r.noise.snr)),
    ("min_detectable_field_T", |r| Some(r.min_detectable_field)),
    ("lift_tip_angle_rad", |r| r.lift.map(|l| l.tip_angle)),
    ("lift_right_angle_length_m", |r| r.lift.and_then(|l| l.right_angle_length)),
];

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn report_cells(r: Option<&SimulationReport>) -> Vec<String> {
    COLUMNS
        .iter()
        .map(|(_, f)| r.and_then(f).map(num).unwrap_or_default())
        .collect()
}

fn csv_string(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        source: e.into(),
    };
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn toml_string<T: Serialize>(v: &T) -> Result<String> {
    toml::to_string(v).map_err(|e| Error::InvalidInput(format!("cannot serialize: {e}")))
}

/// Something that can be written as CSV or TOML.
pub trait Emit {
    fn to_csv(&self) -> Result<String>;
    fn to_toml(&self) -> Result<String>;

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Toml => self.to_toml(),
        }
    }
}

fn header_with(first: &[&str], last: &[&str]) -> Vec<String> {
    first
        .iter()
        .copied()
        .chain(COLUMNS.iter().map(|(h, _)| *h))
        .chain(last.iter().copied())
        .map(String::from)
        .collect()
}

impl Emit for ReportDocument {
    fn to_csv(&self) -> Result<String> {
        let mut row = vec![self.report.sensor_kind.clone()];
        row.extend(report_cells(Some(&self.report)));
        row.push(self.report.warnings.join("; "));
        csv_string(header_with(&["sensor_kind"], &["warnings"]), vec![row])
    }

    fn to_toml(&self) -> Result<String> {
        toml_string(self)
    }
}

impl Emit for SweepResult {
    fn to_csv(&self) -> Result<String> {
        let header = header_with(&[self.parameter_path.as_str()], &["error"]);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut cells = vec![num(row.value)];
                cells.extend(report_cells(row.report.as_ref()));
                cells.push(row.error.clone().unwrap_or_default());
                cells
            })
            .collect();
        csv_string(header, rows)
    }

    fn to_toml(&self) -> Result<String> {
        toml_string(self)
    }
}

#[derive(Serialize)]
struct OptimizeDocument<'a> {
    parameters: &'a [f64],
    best: &'a crate::explorer::scenario::Scenario,
    report: &'a SimulationReport,
    trace: &'a [crate::explorer::optimize::Evaluation],
}

impl Emit for OptimizeResult {
    /// The trace, one row per evaluation.
    fn to_csv(&self) -> Result<String> {
        let dim = self.parameters.len();
        let mut header: Vec<String> = (0..dim).map(|i| format!("p{i}")).collect();
        header.extend(["objective", "violation", "feasible", "error"].map(String::from));
        let rows = self
            .trace
            .iter()
            .map(|e| {
                let mut c: Vec<String> = e.parameters.iter().copied().map(num).collect();
                c.push(e.objective.map(num).unwrap_or_default());
                c.push(num(e.violation));
                c.push(e.feasible.to_string());
                c.push(e.error.clone().unwrap_or_default());
                c
            })
            .collect();
        csv_string(header, rows)
    }

    fn to_toml(&self) -> Result<String> {
        toml_string(&OptimizeDocument {
            parameters: &self.parameters,
            best: &self.best,
            report: &self.report,
            trace: &self.trace,
        })
    }
}

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 points, got {points}")));
    }
    Ok(())
}

/// PSD of each noise source on a log grid across the budget's band.
pub fn psd_csv(budget: &NoiseBudget, points: usize) -> Result<String> {
    check_points(points)?;
    let sources = budget.sources();
    let rows = log_space(budget.band_low, budget.band_high, points)
        .into_iter()
        .map(|f| {
            vec![
                num(f),
                num(sources.thermal_electrical),
                num(sources.thermal_mechanical_referred),
                num(sources.flicker_at(f)),
                num(sources.total_psd(f)),
            ]
        })
        .collect();
    let header = [
        "frequency_Hz",
        "thermal_electrical_V2_per_Hz",
        "thermal_mechanical_V2_per_Hz",
        "flicker_V2_per_Hz",
        "total_V2_per_Hz",
    ];
    csv_string(header.map(String::from).to_vec(), rows)
}

/// Displacement-per-force response on a log grid.
pub fn frequency_response_csv(
    resonator: &LumpedResonator,
    f_min: f64,
    f_max: f64,
    points: usize,
) -> Result<String> {
    check_points(points)?;
    if !(f_min > 0.0 && f_max > f_min) {
        return Err(Error::InvalidInput(format!(
            "frequency range needs 0 < f_min < f_max, got [{f_min}, {f_max}]"
        )));
    }
    let rows = log_space(f_min, f_max, points)
        .into_iter()
        .map(|f| {
            let p = frequency_response(resonator, f);
            vec![num(p.frequency), num(p.amplitude), num(p.phase)]
        })
        .collect();
    let header = ["frequency_Hz", "amplitude_m_per_N", "phase_rad"];
    csv_string(header.map(String::from).to_vec(), rows)
}

/// Writes `item` to `path` in `format`.
pub fn emit_report<T: Emit + ?Sized>(item: &T, format: Format, path: &Path) -> Result<()> {
    let text = item.render(format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::report::run_scenario;
    use crate::explorer::scenario::Scenario;
    use crate::explorer::sweep::{sweep, Scale};

    fn doc() -> ReportDocument {
        let scenario = Scenario::default_lorentz();
        let report = run_scenario(&scenario).unwrap();
        ReportDocument { scenario, report }
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let d = doc();
        let text = d.to_toml().unwrap();
        let back: ReportDocument = toml::from_str(&text).unwrap();
        assert_eq!(back, d);
        let f = run_scenario(&Scenario::default_ferro()).unwrap();
        let d = ReportDocument {
            scenario: Scenario::default_ferro(),
            report: f,
        };
        let back: ReportDocument = toml::from_str(&d.to_toml().unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn zero_field_round_trip_keeps_infinite_margin() {
        let scenario = Scenario::default_lorentz()
            .with_number("environment.field_magnitude", 0.0)
            .unwrap();
        let d = ReportDocument {
            report: run_scenario(&scenario).unwrap(),
            scenario,
        };
        let back: ReportDocument = toml::from_str(&d.to_toml().unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn csv_header_has_units() {
        let text = doc().to_csv().unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.contains("sensitivity_V_per_T"));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn sweep_error_rows_stay_valid_csv() {
        let s = Scenario::default_lorentz();
        let r = sweep(&s, "drive.amplitude", -0.01, 0.01, 3, Scale::Linear).unwrap();
        let text = r.to_csv().unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let width = rd.headers().unwrap().len();
        let rows: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.len() == width));
        assert!(!rows[0][width - 1].is_empty());
        assert!(rows[2][width - 1].is_empty());
    }

    #[test]
    fn byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        for fmt in [Format::Csv, Format::Toml] {
            let a = dir.path().join("a");
            let b = dir.path().join("b");
            emit_report(&doc(), fmt, &a).unwrap();
            emit_report(&doc(), fmt, &b).unwrap();
            assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        }
    }

    #[test]
    fn io_error_has_path() {
        let e = emit_report(&doc(), Format::Csv, Path::new("/nonexistent/dir/x.csv")).unwrap_err();
        assert!(e.to_string().contains("/nonexistent/dir/x.csv"));
    }
}
