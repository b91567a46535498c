//! Thin-film material records and the built-in catalog.
//!
//! Catalog values are room-temperature handbook constants for the five films
//! of the magnetometer stacks. Each value carries its source inline. Any
//! field can be overridden from the `materials` table of a scenario file.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mechanical, electrical and noise properties of one film.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Young's modulus (Pa).
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Mass density (kg/m³).
    pub density: f64,
    /// Coefficient of thermal expansion (1/K).
    pub cte: f64,
    /// Yield stress (Pa).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yield_stress: Option<f64>,
    /// Electrical resistivity (Ω·m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resistivity: Option<f64>,
    /// Longitudinal piezoresistive coefficient (1/Pa).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_longitudinal: Option<f64>,
    /// Hooge 1/f parameter (dimensionless).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hooge_alpha: Option<f64>,
    /// Carrier concentration (1/m³).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_density: Option<f64>,
    /// Saturation magnetization (A/m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation_magnetization: Option<f64>,
}

/// Partial material record used for config overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub youngs_modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cte: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yield_stress: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resistivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi_longitudinal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hooge_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation_magnetization: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capability {
    Piezoresistive,
    Magnetic,
    Plastic,
    Conductive,
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Capability::Piezoresistive => "piezoresistive",
            Capability::Magnetic => "magnetic",
            Capability::Plastic => "plastic",
            Capability::Conductive => "conductive",
        };
        f.write_str(s)
    }
}

pub const BUILTIN_NAMES: [&str; 5] = [
    "silicon",
    "polysilicon",
    "silicon_nitride",
    "aluminum",
    "nickel",
];

/// Looks up a catalog material by name.
pub fn builtin_material(name: &str) -> Result<Material> {
    let m = match name {
        // N-doped single-crystal SOI top layer, gauge along <100>.
        "silicon" => Material {
            name: name.into(),
            // <110> in-plane modulus (Hopcroft et al., JMEMS 2010)
            youngs_modulus: 169e9,
            poisson_ratio: 0.28,
            density: 2329.0,
            // CRC Handbook, 300 K
            cte: 2.6e-6,
            yield_stress: None,
            // 1/(q·n·μ) with n = 1e26 m⁻³, μ ≈ 100 cm²/V·s
            resistivity: Some(6.24e-6),
            // |π11| of n-Si (Smith 1954); polarity is set by bridge wiring
            pi_longitudinal: Some(1.022e-9),
            // midpoint of 2e-6..6e-6 for single-crystal Si
            hooge_alpha: Some(4e-6),
            // heavily phosphorus-diffused, 1e20 cm⁻³
            carrier_density: Some(1e26),
            saturation_magnetization: None,
        },
        // LPCVD poly, N-doped.
        "polysilicon" => Material {
            name: name.into(),
            // Sharpe et al., MEMS 1997
            youngs_modulus: 160e9,
            poisson_ratio: 0.22,
            density: 2330.0,
            cte: 2.8e-6,
            yield_stress: None,
            resistivity: Some(1.0e-5),
            // gauge factor ≈ 30 over E ≈ 160 GPa
            pi_longitudinal: Some(1.9e-10),
            // grain-boundary dominated, above the single-crystal range
            hooge_alpha: Some(1e-5),
            carrier_density: Some(1e26),
            saturation_magnetization: None,
        },
        // Stoichiometric LPCVD Si₃N₄; insulator.
        "silicon_nitride" => Material {
            name: name.into(),
            // Khan et al., J. Mater. Res. 2004
            youngs_modulus: 250e9,
            poisson_ratio: 0.23,
            density: 3100.0,
            cte: 3.3e-6,
            yield_stress: None,
            resistivity: None,
            pi_longitudinal: None,
            hooge_alpha: None,
            carrier_density: None,
            saturation_magnetization: None,
        },
        // E-gun evaporated Al film.
        "aluminum" => Material {
            name: name.into(),
            youngs_modulus: 70e9,
            poisson_ratio: 0.35,
            density: 2700.0,
            cte: 23.1e-6,
            // thin-film flow stress after anneal
            yield_stress: Some(200e6),
            // CRC Handbook, 293 K
            resistivity: Some(2.65e-8),
            pi_longitudinal: None,
            hooge_alpha: None,
            carrier_density: None,
            saturation_magnetization: None,
        },
        "nickel" => Material {
            name: name.into(),
            youngs_modulus: 200e9,
            poisson_ratio: 0.31,
            density: 8908.0,
            cte: 13.4e-6,
            // electrodeposited/evaporated film
            yield_stress: Some(400e6),
            resistivity: Some(6.99e-8),
            pi_longitudinal: None,
            hooge_alpha: None,
            carrier_density: None,
            // μ0·Ms ≈ 0.61 T at room temperature (Kittel)
            saturation_magnetization: Some(4.85e5),
        },
        _ => {
            return Err(Error::NotFound {
                name: name.into(),
                valid: BUILTIN_NAMES.join(", "),
            })
        }
    };
    Ok(m)
}

impl Material {
    /// Checks the unconditional invariants; returns one message per violation.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.youngs_modulus > 0.0) {
            out.push(format!("{}: youngs_modulus must be > 0", self.name));
        }
        if !(self.density > 0.0) {
            out.push(format!("{}: density must be > 0", self.name));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            out.push(format!("{}: poisson_ratio must lie in [0, 0.5)", self.name));
        }
        out
    }

    pub fn validate_for(&self, capability: Capability) -> Result<()> {
        let required: &[(&'static str, Option<f64>)] = match capability {
            Capability::Piezoresistive => &[
                ("pi_longitudinal", self.pi_longitudinal),
                ("hooge_alpha", self.hooge_alpha),
                ("carrier_density", self.carrier_density),
            ],
            Capability::Magnetic => &[("saturation_magnetization", self.saturation_magnetization)],
            Capability::Plastic => &[("yield_stress", self.yield_stress)],
            Capability::Conductive => &[("resistivity", self.resistivity)],
        };
        let missing: Vec<_> = required
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| *k)
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingProperty {
                material: self.name.clone(),
                capability: capability.to_string(),
                missing,
            })
        }
    }

    pub fn pi_longitudinal(&self) -> Result<f64> {
        self.validate_for(Capability::Piezoresistive)?;
        Ok(self.pi_longitudinal.unwrap_or_default())
    }

    fn apply(&mut self, o: &MaterialOverride) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = o.$f { self.$f = v; }
            )*};
        }
        macro_rules! set_opt {
            ($($f:ident),*) => {$(
                if o.$f.is_some() { self.$f = o.$f; }
            )*};
        }
        set!(youngs_modulus, poisson_ratio, density, cte);
        set_opt!(
            yield_stress,
            resistivity,
            pi_longitudinal,
            hooge_alpha,
            carrier_density,
            saturation_magnetization
        );
    }
}

/// Validates `material` for `capability`.
pub fn validate_for(material: &Material, capability: Capability) -> Result<()> {
    material.validate_for(capability)
}

/// Resolves a material name against the catalog plus config overrides.
///
/// Names outside the catalog are allowed when the override supplies every
/// mandatory mechanical field.
pub fn resolve_material(
    name: &str,
    overrides: &BTreeMap<String, MaterialOverride>,
) -> Result<Material> {
    let over = overrides.get(name);
    let mut m = match (builtin_material(name), over) {
        (Ok(m), _) => m,
        (Err(_), Some(o)) => {
            let mut missing = Vec::new();
            for (k, v) in [
                ("youngs_modulus", o.youngs_modulus),
                ("poisson_ratio", o.poisson_ratio),
                ("density", o.density),
                ("cte", o.cte),
            ] {
                if v.is_none() {
                    missing.push(format!("materials.{name}.{k}: required for a custom material"));
                }
            }
            if !missing.is_empty() {
                return Err(Error::Validation(missing));
            }
            Material {
                name: name.into(),
                youngs_modulus: 0.0,
                poisson_ratio: 0.0,
                density: 0.0,
                cte: 0.0,
                yield_stress: None,
                resistivity: None,
                pi_longitudinal: None,
                hooge_alpha: None,
                carrier_density: None,
                saturation_magnetization: None,
            }
        }
        (Err(e), None) => return Err(e),
    };
    if let Some(o) = over {
        m.apply(o);
    }
    let v = m.violations();
    if v.is_empty() {
        Ok(m)
    } else {
        Err(Error::Validation(v))
    }
}

/// Film thickness and residual stress of one layer in a stack.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub material: Material,
    /// Thickness (m).
    pub thickness: f64,
    /// Residual stress (Pa), tensile positive.
    pub residual_stress: f64,
}

impl LayerSpec {
    pub fn new(material: Material, thickness: f64) -> Result<Self> {
        Self::with_stress(material, thickness, 0.0)
    }

    pub fn with_stress(material: Material, thickness: f64, residual_stress: f64) -> Result<Self> {
        if !(thickness > 0.0) || !thickness.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "layer '{}' thickness must be > 0, got {thickness}",
                material.name
            )));
        }
        Ok(Self {
            material,
            thickness,
            residual_stress,
        })
    }
}
