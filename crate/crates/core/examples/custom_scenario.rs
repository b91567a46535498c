//! Builds a scenario from a TOML fragment with a material override, writes
//! the report as TOML and CSV, and reads the TOML back.

use memsmag::explorer::{emit_report, run_scenario, Format, ReportDocument, Scenario};

const FRAGMENT: &str = r#"
quality_factor = 50.0

[sensor.gauge]
material = "polysilicon"
resistance = 2000.0

[materials.polysilicon]
hooge_alpha = 1e-4

# passes through both measured offset points
[offset]
model = "power_law"
prefactor = 9.4029e-4
exponent = 0.74807
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::from_toml_str(FRAGMENT)?;
    let report = run_scenario(&scenario)?;
    let doc = ReportDocument { scenario, report };

    let dir = std::env::temp_dir().join("memsmag-example");
    std::fs::create_dir_all(&dir)?;
    let toml_path = dir.join("report.toml");
    let csv_path = dir.join("report.csv");
    emit_report(&doc, Format::Toml, &toml_path)?;
    emit_report(&doc, Format::Csv, &csv_path)?;

    let back: ReportDocument = toml::from_str(&std::fs::read_to_string(&toml_path)?)?;
    println!("wrote {} and {}", toml_path.display(), csv_path.display());
    println!("round trip exact: {}", back == doc);
    println!("sensitivity {:.4e} V/T, corner {:.2} Hz", doc.report.sensitivity, doc.report.noise.corner_frequency);
    Ok(())
}
