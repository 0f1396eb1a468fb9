use std::fmt::Write as _;
use std::path::Path;

use nonkahler::atlas::AtlasExport;
use nonkahler::bundles::{
    section_space_dim, splitting_analysis_auto, LaurentMatrix, ProfilePoint, SectionSpaceProblem, SplittingType,
};
use nonkahler::surface::{j_invariant, Surface, DEFAULT_J_TERMS};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Config, Radii};
use crate::CliError;

/// Path in the `w` plane along which fiber moduli are tabulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep {
    /// `points` evenly spaced real values from `from` to `to`.
    Radial { from: f64, to: f64, points: usize },
    /// `points` evenly spaced values on `|w| = radius`, starting at `w = radius`.
    Circle { radius: f64, points: usize },
}

impl Sweep {
    pub fn points(&self) -> Vec<Complex64> {
        match *self {
            Sweep::Radial { from, to, points } => (0..points)
                .map(|i| {
                    let t = if points > 1 { i as f64 / (points - 1) as f64 } else { 0.0 };
                    Complex64::new(from + (to - from) * t, 0.0)
                })
                .collect(),
            Sweep::Circle { radius, points } => (0..points)
                .map(|i| Complex64::from_polar(radius, std::f64::consts::TAU * i as f64 / points as f64))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuliRow {
    pub w: Complex64,
    pub j: Complex64,
}

/// `j` of the elliptic fiber over each point of the sweep, which must stay in
/// the punctured disk `0 < |w| < rho1`.
pub fn fiber_moduli(config: &Config, sweep: &Sweep) -> Result<Vec<ModuliRow>, CliError> {
    let params = config.surface_params()?;
    let points = sweep.points();
    if let Some(w) = points.iter().find(|w| !(w.norm() > 0.0 && w.norm() < params.rho1())) {
        return Err(CliError::SweepOutsideDomain { w: *w, rho1: params.rho1() });
    }
    points
        .into_iter()
        .map(|w| {
            let j = j_invariant(w, DEFAULT_J_TERMS).map_err(CliError::computation)?;
            Ok(ModuliRow { w, j })
        })
        .collect()
}

pub fn moduli_csv(rows: &[ModuliRow]) -> String {
    let mut out = String::from("w_re,w_im,j_re,j_im\n");
    for r in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.w.re, r.w.im, r.j.re, r.j.im).expect("write to String");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionsReport {
    pub rank: usize,
    pub h0: usize,
    pub splitting_type: SplittingType,
    pub det_winding: i64,
    pub h_profile: Vec<ProfilePoint>,
}

pub fn read_cocycle(path: &Path) -> Result<LaurentMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let matrix: LaurentMatrix = serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    matrix.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(matrix)
}

pub fn sections(config: &Config, matrix: &LaurentMatrix) -> Result<SectionsReport, CliError> {
    let settings = config.solver_settings();
    let cocycle = matrix.to_cocycle().map_err(|e| CliError::Parse(e.to_string()))?;
    let params = config.surface_params()?;
    let inner = 0.5 * (params.rho0() + settings.radius);
    let outer = 0.5 * (params.rho1() + settings.radius);
    cocycle
        .validate(&[inner, settings.radius, outer], 64, config.tolerances.holomorphy)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let problem = SectionSpaceProblem::new(cocycle, settings).map_err(CliError::computation)?;
    let h0 = section_space_dim(&problem).map_err(CliError::computation)?;
    let analysis = splitting_analysis_auto(&problem).map_err(CliError::computation)?;
    Ok(SectionsReport {
        rank: matrix.rank,
        h0,
        splitting_type: analysis.splitting_type,
        det_winding: analysis.det_winding,
        h_profile: analysis.h_profile,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasDocument {
    pub params: Radii,
    #[serde(flatten)]
    pub atlas: AtlasExport,
}

pub fn atlas_export(config: &Config) -> Result<AtlasDocument, CliError> {
    let surface = Surface::new(config.surface_params()?);
    Ok(AtlasDocument {
        params: config.params,
        atlas: surface.atlas().export(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps() {
        let radial = Sweep::Radial { from: 0.05, to: 0.45, points: 50 }.points();
        assert_eq!(radial.len(), 50);
        assert_eq!(radial[0], Complex64::new(0.05, 0.0));
        assert!((radial[49].re - 0.45).abs() < 1e-15);
        assert!(Sweep::Radial { from: 0.1, to: 0.2, points: 0 }.points().is_empty());
        let circle = Sweep::Circle { radius: 0.3, points: 8 }.points();
        assert!(circle.iter().all(|w| (w.norm() - 0.3).abs() < 1e-15));
    }

    #[test]
    fn sweep_must_avoid_node_and_annulus() {
        let c = Config::default();
        assert!(matches!(
            fiber_moduli(&c, &Sweep::Radial { from: 0.0, to: 0.3, points: 4 }),
            Err(CliError::SweepOutsideDomain { .. })
        ));
        assert!(matches!(
            fiber_moduli(&c, &Sweep::Circle { radius: 0.6, points: 4 }),
            Err(CliError::SweepOutsideDomain { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let rows = [ModuliRow {
            w: Complex64::new(0.25, 0.0),
            j: Complex64::new(1728.0, -0.5),
        }];
        let csv = moduli_csv(&rows);
        assert_eq!(
            csv,
            "w_re,w_im,j_re,j_im\n2.5000000000000000e-1,0.0000000000000000e0,1.7280000000000000e3,-5.0000000000000000e-1\n"
        );
    }
}
