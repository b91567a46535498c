//! Static beam mechanics for layered cantilevers.
//!
//! Composite sections use the transformed-section method: each layer is
//! weighted by its modulus, the neutral axis sits at the modulus-weighted
//! centroid, and the flexural rigidity is summed with parallel-axis terms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::materials::LayerSpec;

/// Below this length/thickness ratio Euler–Bernoulli theory is questionable.
pub const MIN_SLENDERNESS: f64 = 10.0;

/// Rayleigh effective-mass fraction of a tip-loaded cantilever.
pub const EFFECTIVE_MASS_FRACTION: f64 = 33.0 / 140.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamGeometry {
    /// Beam length (m).
    pub length: f64,
    /// Beam width (m).
    pub width: f64,
    /// Layers from bottom to top.
    pub layers: Vec<LayerSpec>,
}

impl BeamGeometry {
    pub fn new(length: f64, width: f64, layers: Vec<LayerSpec>) -> Result<Self> {
        let g = Self {
            length,
            width,
            layers,
        };
        g.validate()?;
        if let Some(w) = g.slenderness_warning() {
            log::warn!("{w}");
        }
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "beam length must be > 0, got {}",
                self.length
            )));
        }
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "beam width must be > 0, got {}",
                self.width
            )));
        }
        if self.layers.is_empty() {
            return Err(Error::InvalidGeometry("beam needs at least one layer".into()));
        }
        if let Some(l) = self.layers.iter().find(|l| !(l.thickness > 0.0)) {
            return Err(Error::InvalidGeometry(format!(
                "layer '{}' thickness must be > 0",
                l.material.name
            )));
        }
        Ok(())
    }

    /// Total stack thickness (m).
    pub fn thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    pub fn slenderness(&self) -> f64 {
        self.length / self.thickness()
    }

    pub fn slenderness_warning(&self) -> Option<String> {
        let s = self.slenderness();
        (s < MIN_SLENDERNESS).then(|| {
            format!("beam slenderness {s:.1} is below {MIN_SLENDERNESS}; Euler-Bernoulli theory may be inaccurate")
        })
    }

    /// Smallest yield stress among the layers that define one.
    pub fn yield_stress(&self) -> Option<f64> {
        self.layers
            .iter()
            .filter_map(|l| l.material.yield_stress)
            .min_by(f64::total_cmp)
    }

    pub fn scaled_thickness(&self, factor: f64) -> Self {
        let mut g = self.clone();
        for l in &mut g.layers {
            l.thickness *= factor;
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeSection {
    /// Effective EI about the neutral axis (N·m²).
    pub flexural_rigidity: f64,
    /// Neutral axis height above the bottom surface (m).
    pub neutral_axis_height: f64,
    /// Σ E·A (N).
    pub axial_stiffness: f64,
    /// kg/m
    pub mass_per_length: f64,
    /// Geometric second moment of area about the neutral axis (m⁴).
    pub area_moment: f64,
    /// Distance from the neutral axis to the farthest fiber (m).
    pub extreme_fiber: f64,
}

pub fn composite_section(geom: &BeamGeometry) -> Result<CompositeSection> {
    geom.validate()?;
    let w = geom.width;

    let mut z = 0.0;
    let mut ea = 0.0;
    let mut ea_z = 0.0;
    let mut centers = Vec::with_capacity(geom.layers.len());
    for l in &geom.layers {
        let zc = z + 0.5 * l.thickness;
        let a = w * l.thickness;
        ea += l.material.youngs_modulus * a;
        ea_z += l.material.youngs_modulus * a * zc;
        centers.push(zc);
        z += l.thickness;
    }
    let total = z;
    let na = ea_z / ea;

    let mut ei = 0.0;
    let mut i_geo = 0.0;
    let mut mass = 0.0;
    for (l, zc) in geom.layers.iter().zip(&centers) {
        let t = l.thickness;
        let d = zc - na;
        let own = w * t * t * t / 12.0 + w * t * d * d;
        ei += l.material.youngs_modulus * own;
        i_geo += own;
        mass += l.material.density * w * t;
    }

    Ok(CompositeSection {
        flexural_rigidity: ei,
        neutral_axis_height: na,
        axial_stiffness: ea,
        mass_per_length: mass,
        area_moment: i_geo,
        extreme_fiber: na.max(total - na),
    })
}

/// Tip deflection of a clamped-free beam under a point load at the tip.
pub fn tip_deflection(section: &CompositeSection, length: f64, tip_force: f64) -> f64 {
    tip_force * length.powi(3) / (3.0 * section.flexural_rigidity)
}

/// Maximum bending stress at the clamped anchor when a tip force is shared
/// equally by `load_share_count` parallel beams.
pub fn max_anchor_stress(
    tip_force: f64,
    length: f64,
    width: f64,
    thickness: f64,
    load_share_count: u32,
) -> f64 {
    let n = f64::from(load_share_count.max(1));
    6.0 * length * tip_force / (width * thickness * thickness * n)
}

/// Single-mode lumped model of a cantilever, referred to its tip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedResonator {
    /// N/m
    pub stiffness: f64,
    /// kg
    pub effective_mass: f64,
    /// Hz
    pub natural_frequency: f64,
    pub quality_factor: f64,
    /// N·s/m
    pub damping: f64,
}

impl LumpedResonator {
    pub fn new(stiffness: f64, effective_mass: f64, quality_factor: f64) -> Result<Self> {
        if !(stiffness > 0.0) || !(effective_mass > 0.0) {
            return Err(Error::Domain(format!(
                "resonator needs positive stiffness and mass, got k={stiffness}, m={effective_mass}"
            )));
        }
        if !(quality_factor > 0.5) {
            return Err(Error::Domain(format!(
                "quality factor must exceed 0.5, got {quality_factor}"
            )));
        }
        let omega = (stiffness / effective_mass).sqrt();
        Ok(Self {
            stiffness,
            effective_mass,
            natural_frequency: omega / (2.0 * PI),
            quality_factor,
            damping: (stiffness * effective_mass).sqrt() / quality_factor,
        })
    }

    /// Adds a rigid mass at the tip (e.g. a share of a suspended plate).
    pub fn with_tip_mass(&self, mass: f64) -> Result<Self> {
        Self::new(self.stiffness, self.effective_mass + mass, self.quality_factor)
    }

    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.natural_frequency
    }
}

pub fn lumped_resonator(geom: &BeamGeometry, quality_factor: f64) -> Result<LumpedResonator> {
    let s = composite_section(geom)?;
    let l = geom.length;
    let k = 3.0 * s.flexural_rigidity / l.powi(3);
    let m = EFFECTIVE_MASS_FRACTION * s.mass_per_length * l;
    LumpedResonator::new(k, m, quality_factor)
}

/// Piecewise-linear stress-versus-anneal-temperature table for the Al film.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealCalibration {
    points: Vec<(f64, f64)>,
}

/// 400 °C: measured film stress after RTA.
pub const ANNEAL_ANCHOR: (f64, f64) = (673.15, 150e6);
/// 150 °C deposition temperature; synthetic low-stress end of the table.
pub const ANNEAL_DEPOSITION: (f64, f64) = (423.15, 30e6);

impl AnnealCalibration {
    /// `points` are (temperature K, stress Pa) with strictly increasing temperature.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCalibration(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|(t, s)| !t.is_finite() || !s.is_finite()) {
            return Err(Error::InvalidCalibration("non-finite entry".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidCalibration(
                "temperatures must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

impl Default for AnnealCalibration {
    fn default() -> Self {
        Self {
            points: vec![ANNEAL_DEPOSITION, ANNEAL_ANCHOR],
        }
    }
}

/// Residual Al stress after annealing at `anneal_temperature` (K).
/// Queries outside the table are clamped to the end values.
pub fn anneal_stress(anneal_temperature: f64, calibration: &AnnealCalibration) -> f64 {
    let p = &calibration.points;
    let (t0, s0) = p[0];
    let (tn, sn) = p[p.len() - 1];
    if anneal_temperature <= t0 {
        return s0;
    }
    if anneal_temperature >= tn {
        return sn;
    }
    let i = p.partition_point(|(t, _)| *t <= anneal_temperature);
    let (ta, sa) = p[i - 1];
    let (tb, sb) = p[i];
    sa + (sb - sa) * (anneal_temperature - ta) / (tb - ta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftProfile {
    /// 1/m, positive curls toward the top layer.
    pub curvature: f64,
    /// rad
    pub tip_angle: f64,
    /// m
    pub tip_height: f64,
    /// Pa
    pub driving_stress: f64,
}

impl LiftProfile {
    fn from_curvature(curvature: f64, length: f64, driving_stress: f64) -> Self {
        let tip_angle = curvature * length;
        let tip_height = if curvature == 0.0 {
            0.0
        } else {
            (1.0 - tip_angle.cos()) / curvature
        };
        Self {
            curvature,
            tip_angle,
            tip_height,
            driving_stress,
        }
    }
}

/// Mismatch curvature of a two-layer beam (Timoshenko bimetal formula).
///
/// `stress_difference` is the excess tensile stress of the top layer over
/// the bottom one; it is converted to mismatch strain with the top modulus.
pub fn bimorph_lift(geom: &BeamGeometry, stress_difference: f64) -> Result<LiftProfile> {
    geom.validate()?;
    let [bottom, top] = geom.layers.as_slice() else {
        return Err(Error::UnsupportedStack(format!(
            "bimorph model needs exactly 2 layers, got {}",
            geom.layers.len()
        )));
    };
    if bottom.material.name == top.material.name {
        return Err(Error::UnsupportedStack(format!(
            "bimorph layers must be distinct materials, both are '{}'",
            top.material.name
        )));
    }
    let strain = stress_difference / top.material.youngs_modulus;
    let m = bottom.thickness / top.thickness;
    let n = bottom.material.youngs_modulus / top.material.youngs_modulus;
    let h = bottom.thickness + top.thickness;
    let denom = h * (3.0 * (1.0 + m).powi(2) + (1.0 + m * n) * (m * m + 1.0 / (m * n)));
    let curvature = 6.0 * strain * (1.0 + m).powi(2) / denom;
    Ok(LiftProfile::from_curvature(
        curvature,
        geom.length,
        stress_difference,
    ))
}

/// Finds the beam length whose bimorph tip angle equals `target_angle` by
/// bisection on `bimorph_lift`.
pub fn length_for_tip_angle(
    geom: &BeamGeometry,
    stress_difference: f64,
    target_angle: f64,
) -> Result<f64> {
    let angle_at = |l: f64| -> Result<f64> {
        let mut g = geom.clone();
        g.length = l;
        Ok(bimorph_lift(&g, stress_difference)?.tip_angle - target_angle)
    };
    let mut lo = geom.thickness();
    let mut hi = lo;
    let f_lo = angle_at(lo)?;
    let mut f_hi = f_lo;
    for _ in 0..200 {
        if f_lo.signum() != f_hi.signum() {
            break;
        }
        hi *= 2.0;
        f_hi = angle_at(hi)?;
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!(
            "tip angle {target_angle} rad is unreachable for stress difference {stress_difference} Pa"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = angle_at(mid)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
