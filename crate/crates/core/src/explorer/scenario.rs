//! Scenario files.
//!
//! A scenario is a TOML document in SI base units. Every key is optional:
//! the user document is deep-merged over a shipped default (tables merge
//! key by key, arrays and scalars replace; a table that switches its `model`
//! tag replaces the default table). The default is chosen by
//! `sensor.kind`: `configs/default.toml` for `"lorentz"`, `configs/ferro.toml`
//! for `"ferro"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::materials::{resolve_material, Capability, LayerSpec, Material, MaterialOverride};
use crate::mechanics::{AnnealCalibration, BeamGeometry};
use crate::transduction::{Drive, Environment, FerroDesign, GaugeSpec, LorentzDesign, OffsetModel};

pub const DEFAULT_LORENTZ_TOML: &str = include_str!("../../configs/default.toml");
pub const DEFAULT_FERRO_TOML: &str = include_str!("../../configs/ferro.toml");

/// Directory searched for `default.toml` when no config path is given.
pub const CONFIG_DIR_ENV: &str = "MEMSMAG_CONFIG_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub material: String,
    pub thickness: f64,
    #[serde(default)]
    pub residual_stress: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub length: f64,
    pub width: f64,
    pub layers: Vec<LayerConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub material: String,
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    pub resistance: f64,
    /// Overrides the material carrier density with a fixed carrier count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_count: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzConfig {
    pub top_beam_length: f64,
    pub load_share_count: u32,
    pub loop_resistance: f64,
    pub thermal_resistance: f64,
    pub bridge_bias: f64,
    pub support_beam: BeamConfig,
    pub gauge: GaugeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FerroConfig {
    pub plate_material: String,
    pub plate_length: f64,
    pub plate_width: f64,
    pub plate_thickness: f64,
    pub magnetization: f64,
    pub suspension_count: u32,
    pub bridge_bias: f64,
    pub suspension: BeamConfig,
    pub gauge: GaugeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SensorConfig {
    Lorentz(LorentzConfig),
    Ferro(FerroConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealConfig {
    /// K
    pub temperature: f64,
    /// (K, Pa) pairs, strictly increasing in temperature.
    pub calibration: Vec<[f64; 2]>,
}

/// Fully resolved scenario as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub quality_factor: f64,
    /// Hz
    pub noise_band: [f64; 2],
    /// Multiplier on the single-gauge Johnson PSD for the whole bridge.
    pub bridge_noise_factor: f64,
    pub sensor: SensorConfig,
    pub drive: Drive,
    pub environment: Environment,
    pub offset: OffsetModel,
    pub anneal: AnnealConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub materials: BTreeMap<String, MaterialOverride>,
}

/// Domain objects built from a [`Scenario`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sensor {
    Lorentz(LorentzDesign),
    Ferro(FerroDesign),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub sensor: Sensor,
    pub anneal: AnnealCalibration,
}

fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| Error::Parse(e.to_string()))
}

/// Keys that select a variant; a table whose tag changes is replaced whole.
const TAGS: [&str; 2] = ["kind", "model"];

fn same_variant(base: &Table, over: &Table) -> bool {
    TAGS.iter()
        .all(|t| over.get(*t).is_none_or(|v| base.get(*t) == Some(v)))
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) if same_variant(b, &o) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn sensor_kind(t: &Table) -> Option<&str> {
    t.get("sensor")?.as_table()?.get("kind")?.as_str()
}

impl Scenario {
    /// The shipped Lorentz default scenario.
    pub fn default_lorentz() -> Self {
        Self::from_toml_str("").expect("shipped default config is valid")
    }

    /// The shipped ferromagnetic default scenario.
    pub fn default_ferro() -> Self {
        Self::from_toml_str("[sensor]\nkind = \"ferro\"\n").expect("shipped ferro config is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user = parse_table(text)?;
        let base_text = match sensor_kind(&user) {
            None | Some("lorentz") => DEFAULT_LORENTZ_TOML,
            Some("ferro") => DEFAULT_FERRO_TOML,
            Some(other) => {
                return Err(Error::Validation(vec![format!(
                    "sensor.kind: expected \"lorentz\" or \"ferro\", got \"{other}\""
                )]))
            }
        };
        let mut base = parse_table(base_text)?;
        merge(&mut base, user);
        Self::from_value(Value::Table(base))
    }

    /// Deserializes and validates an already-merged document.
    pub fn from_value(value: Value) -> Result<Self> {
        let s: Scenario =
            Scenario::deserialize(value).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_value(&self) -> Value {
        Value::try_from(self).expect("scenario serializes to TOML")
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    /// Builds domain objects, collecting every violated invariant.
    pub fn resolve(&self) -> Result<Resolved> {
        let mut errs: Vec<String> = Vec::new();
        errs.extend(self.drive.violations());
        errs.extend(self.environment.violations());
        errs.extend(self.offset.violations());
        if !(self.quality_factor > 0.5) {
            errs.push(format!("quality_factor: must be > 0.5, got {}", self.quality_factor));
        }
        let [f1, f2] = self.noise_band;
        if !(f1 > 0.0 && f2 > f1 && f2.is_finite()) {
            errs.push(format!("noise_band: need 0 < low < high, got [{f1}, {f2}]"));
        }
        if !(self.bridge_noise_factor > 0.0) {
            errs.push(format!(
                "bridge_noise_factor: must be > 0, got {}",
                self.bridge_noise_factor
            ));
        }
        let anneal = AnnealCalibration::new(
            self.anneal.calibration.iter().map(|p| (p[0], p[1])).collect(),
        )
        .map_err(|e| errs.push(format!("anneal.calibration: {e}")))
        .ok();
        if !(self.anneal.temperature > 0.0) {
            errs.push(format!(
                "anneal.temperature: must be > 0, got {}",
                self.anneal.temperature
            ));
        }

        let mut ctx = Ctx {
            overrides: &self.materials,
            errs: &mut errs,
        };
        let sensor = match &self.sensor {
            SensorConfig::Lorentz(c) => ctx.lorentz(c).map(Sensor::Lorentz),
            SensorConfig::Ferro(c) => ctx.ferro(c).map(Sensor::Ferro),
        };

        match (sensor, anneal) {
            (Some(sensor), Some(anneal)) if errs.is_empty() => Ok(Resolved { sensor, anneal }),
            _ => Err(Error::Validation(errs)),
        }
    }
}

struct Ctx<'a> {
    overrides: &'a BTreeMap<String, MaterialOverride>,
    errs: &'a mut Vec<String>,
}

impl Ctx<'_> {
    fn positive(&mut self, path: &str, v: f64) {
        if !(v > 0.0) || !v.is_finite() {
            self.errs.push(format!("{path}: must be > 0, got {v}"));
        }
    }

    fn material(&mut self, path: &str, name: &str, cap: Option<Capability>) -> Option<Material> {
        match resolve_material(name, self.overrides) {
            Ok(m) => {
                if let Some(cap) = cap {
                    if let Err(e) = m.validate_for(cap) {
                        self.errs.push(format!("{path}: {e}"));
                        return None;
                    }
                }
                Some(m)
            }
            Err(Error::Validation(v)) => {
                self.errs.extend(v);
                None
            }
            Err(e) => {
                self.errs.push(format!("{path}: {e}"));
                None
            }
        }
    }

    fn beam(&mut self, path: &str, c: &BeamConfig) -> Option<BeamGeometry> {
        self.positive(&format!("{path}.length"), c.length);
        self.positive(&format!("{path}.width"), c.width);
        if c.layers.is_empty() {
            self.errs.push(format!("{path}.layers: at least one layer is required"));
            return None;
        }
        let mut layers = Vec::new();
        for (i, l) in c.layers.iter().enumerate() {
            let lp = format!("{path}.layers[{i}]");
            let m = self.material(&format!("{lp}.material"), &l.material, None);
            self.positive(&format!("{lp}.thickness"), l.thickness);
            if let Some(m) = m {
                if let Ok(spec) = LayerSpec::with_stress(m, l.thickness, l.residual_stress) {
                    layers.push(spec);
                }
            }
        }
        if layers.len() != c.layers.len() {
            return None;
        }
        let geom = BeamGeometry::new(c.length, c.width, layers).ok()?;
        if geom.yield_stress().is_none() {
            self.errs.push(format!(
                "{path}.layers: no layer defines yield_stress; stress margin is undefined"
            ));
        }
        Some(geom)
    }

    fn gauge(&mut self, path: &str, c: &GaugeConfig) -> Option<GaugeSpec> {
        let material = self.material(
            &format!("{path}.material"),
            &c.material,
            Some(Capability::Piezoresistive),
        );
        let mut g = GaugeSpec {
            length: c.length,
            width: c.width,
            thickness: c.thickness,
            resistance: c.resistance,
            material: material?,
        };
        let mut v = g.violations(path);
        if let Some(n) = c.carrier_count {
            if n > 0.0 && n.is_finite() {
                g.material.carrier_density = Some(n / g.volume());
            } else {
                v.push(format!("{path}.carrier_count: must be > 0, got {n}"));
            }
        }
        let ok = v.is_empty();
        self.errs.extend(v);
        ok.then_some(g)
    }

    fn count(&mut self, path: &str, n: u32) {
        if n < 1 {
            self.errs.push(format!("{path}: must be >= 1, got {n}"));
        }
    }

    fn lorentz(&mut self, c: &LorentzConfig) -> Option<LorentzDesign> {
        self.positive("sensor.top_beam_length", c.top_beam_length);
        self.positive("sensor.loop_resistance", c.loop_resistance);
        self.positive("sensor.bridge_bias", c.bridge_bias);
        if !(c.thermal_resistance >= 0.0) {
            self.errs.push(format!(
                "sensor.thermal_resistance: must be >= 0, got {}",
                c.thermal_resistance
            ));
        }
        self.count("sensor.load_share_count", c.load_share_count);
        let beam = self.beam("sensor.support_beam", &c.support_beam);
        let gauge = self.gauge("sensor.gauge", &c.gauge);
        Some(LorentzDesign {
            top_beam_length: c.top_beam_length,
            support_beam: beam?,
            load_share_count: c.load_share_count,
            gauge: gauge?,
            loop_resistance: c.loop_resistance,
            thermal_resistance: c.thermal_resistance,
            bridge_bias: c.bridge_bias,
        })
    }

    fn ferro(&mut self, c: &FerroConfig) -> Option<FerroDesign> {
        self.positive("sensor.plate_length", c.plate_length);
        self.positive("sensor.plate_width", c.plate_width);
        self.positive("sensor.plate_thickness", c.plate_thickness);
        self.positive("sensor.magnetization", c.magnetization);
        self.positive("sensor.bridge_bias", c.bridge_bias);
        self.count("sensor.suspension_count", c.suspension_count);
        let plate = self.material(
            "sensor.plate_material",
            &c.plate_material,
            Some(Capability::Magnetic),
        );
        let beam = self.beam("sensor.suspension", &c.suspension);
        let gauge = self.gauge("sensor.gauge", &c.gauge);
        Some(FerroDesign {
            plate_length: c.plate_length,
            plate_width: c.plate_width,
            plate_thickness: c.plate_thickness,
            magnetization: c.magnetization,
            plate_density: plate?.density,
            suspension: beam?,
            suspension_count: c.suspension_count,
            gauge: gauge?,
            bridge_bias: c.bridge_bias,
        })
    }
}

/// Loads a scenario file; see the module docs for the merge rules.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_toml_str(&text)
}

/// Config used when none is given: `$MEMSMAG_CONFIG_DIR/default.toml` if it
/// exists, otherwise the shipped default.
pub fn load_default_scenario() -> Result<Scenario> {
    if let Some(dir) = std::env::var_os(CONFIG_DIR_ENV) {
        let p = Path::new(&dir).join("default.toml");
        if p.exists() {
            return load_scenario(&p);
        }
    }
    Ok(Scenario::default_lorentz())
}

/// Splits `a.b[2].c` into table keys and array indices.
fn path_segments(path: &str) -> Option<Vec<Segment>> {
    let mut out = Vec::new();
    for part in path.split('.') {
        let (key, rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if key.is_empty() {
            return None;
        }
        out.push(Segment::Key(key.to_string()));
        let mut rest = rest;
        while let Some(r) = rest.strip_prefix('[') {
            let end = r.find(']')?;
            out.push(Segment::Index(r[..end].parse().ok()?));
            rest = &r[end + 1..];
        }
        if !rest.is_empty() {
            return None;
        }
    }
    Some(out)
}

enum Segment {
    Key(String),
    Index(usize),
}

fn lookup_mut<'a>(root: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    let mut cur = root;
    for seg in path_segments(path)? {
        cur = match seg {
            Segment::Key(k) => cur.as_table_mut()?.get_mut(&k)?,
            Segment::Index(i) => cur.as_array_mut()?.get_mut(i)?,
        };
    }
    Some(cur)
}

impl Scenario {
    /// Current numeric value at `path`, e.g. `environment.field_magnitude`
    /// or `sensor.support_beam.layers[1].thickness`.
    pub fn get_number(&self, path: &str) -> Result<f64> {
        let mut v = self.to_value();
        match lookup_mut(&mut v, path) {
            Some(Value::Float(x)) => Ok(*x),
            Some(Value::Integer(i)) => Ok(*i as f64),
            _ => Err(Error::UnknownPath(path.into())),
        }
    }

    /// Copy of the scenario with the numeric field at `path` replaced.
    /// Integer fields are rounded.
    pub fn with_number(&self, path: &str, value: f64) -> Result<Scenario> {
        let mut v = self.to_value();
        match lookup_mut(&mut v, path) {
            Some(slot @ Value::Float(_)) => *slot = Value::Float(value),
            Some(slot @ Value::Integer(_)) => *slot = Value::Integer(value.round() as i64),
            _ => return Err(Error::UnknownPath(path.into())),
        }
        Scenario::from_value(v)
    }
}
