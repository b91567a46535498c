//! Finite-difference Euler–Bernoulli solver for clamped-free beams.
//!
//! Independent of the closed-form expressions in [`crate::mechanics`]: the
//! deflection is obtained by solving the discretized fourth-order equation
//! `EI·w'''' = 0` with the tip load entering only through boundary rows.
//!
//! The stencil is ghost-free. Interior rows use the central fourth
//! difference, the clamp uses `w = 0` and a second-order one-sided slope,
//! and the free end uses second-order one-sided second and third
//! derivatives. The one-sided clamp slope makes the scheme O(h²) for
//! tip-force loading.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mechanics::{composite_section, BeamGeometry};

pub const MIN_GRID: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TipLoad {
    /// Transverse tip force (N), positive toward +w.
    Force(f64),
    /// Tip moment (N·m), positive bends toward +w.
    Moment(f64),
}

impl TipLoad {
    pub fn scaled(self, s: f64) -> Self {
        match self {
            TipLoad::Force(f) => TipLoad::Force(f * s),
            TipLoad::Moment(m) => TipLoad::Moment(m * s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSolution {
    pub node_positions: Vec<f64>,
    pub deflection: Vec<f64>,
    pub bending_moment: Vec<f64>,
    /// Bending stress at the extreme fiber of the clamped section (Pa).
    pub anchor_stress: f64,
    pub grid_size: usize,
}

impl BeamSolution {
    pub fn tip_deflection(&self) -> f64 {
        *self.deflection.last().unwrap_or(&0.0)
    }

    /// Slope at the clamp from the same one-sided stencil used in the solve.
    pub fn clamp_slope(&self) -> f64 {
        let h = self.node_positions[1] - self.node_positions[0];
        let w = &self.deflection;
        (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h)
    }
}

/// Solves the static clamped-free problem on `grid_size` uniformly spaced nodes.
pub fn solve_static(geom: &BeamGeometry, load: TipLoad, grid_size: usize) -> Result<BeamSolution> {
    if grid_size < MIN_GRID {
        return Err(Error::InvalidInput(format!(
            "grid_size must be >= {MIN_GRID}, got {grid_size}"
        )));
    }
    let section = composite_section(geom)?;
    let ei = section.flexural_rigidity;
    let n = grid_size;
    let h = geom.length / (n - 1) as f64;

    let (tip_force, tip_moment) = match load {
        TipLoad::Force(f) => (f, 0.0),
        TipLoad::Moment(m) => (0.0, m),
    };

    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);

    a[(0, 0)] = 1.0;

    a[(1, 0)] = -3.0;
    a[(1, 1)] = 4.0;
    a[(1, 2)] = -1.0;

    for i in 2..n - 2 {
        a[(i, i - 2)] = 1.0;
        a[(i, i - 1)] = -4.0;
        a[(i, i)] = 6.0;
        a[(i, i + 1)] = -4.0;
        a[(i, i + 2)] = 1.0;
    }

    // w''(L) = M_tip / EI, scaled by h²
    let r = n - 2;
    a[(r, n - 1)] = 2.0;
    a[(r, n - 2)] = -5.0;
    a[(r, n - 3)] = 4.0;
    a[(r, n - 4)] = -1.0;
    b[r] = tip_moment * h * h / ei;

    // w'''(L) = -F / EI, scaled by 2h³
    let r = n - 1;
    a[(r, n - 1)] = 5.0;
    a[(r, n - 2)] = -18.0;
    a[(r, n - 3)] = 24.0;
    a[(r, n - 4)] = -14.0;
    a[(r, n - 5)] = 3.0;
    b[r] = -2.0 * tip_force * h * h * h / ei;

    let w = a.lu().solve(&b).ok_or(Error::SingularSystem)?;
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let w: Vec<f64> = w.iter().copied().collect();

    let h2 = h * h;
    let mut moment = vec![0.0; n];
    moment[0] = ei * (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) / h2;
    for i in 1..n - 1 {
        moment[i] = ei * (w[i - 1] - 2.0 * w[i] + w[i + 1]) / h2;
    }
    moment[n - 1] = ei * (2.0 * w[n - 1] - 5.0 * w[n - 2] + 4.0 * w[n - 3] - w[n - 4]) / h2;

    let anchor_stress = moment[0] * section.extreme_fiber / section.area_moment;

    Ok(BeamSolution {
        node_positions: (0..n).map(|i| i as f64 * h).collect(),
        deflection: w,
        bending_moment: moment,
        anchor_stress,
        grid_size: n,
    })
}

/// Closed-form tip deflection for the two supported load cases.
fn exact_tip_deflection(geom: &BeamGeometry, load: TipLoad) -> Result<f64> {
    let ei = composite_section(geom)?.flexural_rigidity;
    let l = geom.length;
    Ok(match load {
        TipLoad::Force(f) => f * l.powi(3) / (3.0 * ei),
        TipLoad::Moment(m) => m * l * l / (2.0 * ei),
    })
}

/// Observed order of accuracy of the tip deflection.
///
/// Errors are taken against the Euler–Bernoulli closed form and the order
/// is the least-squares slope of log(error) versus log(h).
pub fn convergence_order(geom: &BeamGeometry, load: TipLoad, grids: &[usize]) -> Result<f64> {
    if grids.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 grids, got {}",
            grids.len()
        )));
    }
    if grids.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "grids must be strictly increasing".into(),
        ));
    }
    let exact = exact_tip_deflection(geom, load)?;
    let mut pts = Vec::with_capacity(grids.len());
    for &g in grids {
        let sol = solve_static(geom, load, g)?;
        let err = (sol.tip_deflection() - exact).abs();
        if !(err > 0.0) {
            return Err(Error::Domain(format!(
                "discretization error vanishes at grid {g}; order is undefined"
            )));
        }
        let h = geom.length / (g - 1) as f64;
        pts.push((h.ln(), err.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
