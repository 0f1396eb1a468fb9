//! The meromorphic 2-form `sigma = dz ^ dw / z`.
//!
//! In chart `A` it is invariant under `z -> z w`, so it descends to the
//! quotient. Through the gluing it becomes `-(dz/z) ^ (ds/s^2)` in chart `B`,
//! with a double pole along `s = 0`, and in the node chart it pulls back to
//! `dx ^ dy`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EPoint, Surface, SurfaceError, CHART_A, CHART_B, CHART_N};
use crate::holo::{winding_sum, CirclePath};

const POLAR_SAMPLES: usize = 256;

/// Deliberate corruptions of `sigma`, used to check that the verification
/// actually detects a wrong form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaFault {
    #[default]
    None,
    /// chart-`A` coefficient `1/z^2` instead of `1/z`
    SquaredInA,
    /// chart-`B` coefficient `-1/(z s)` instead of `-1/(z s^2)`
    SimplePoleInB,
}

/// `sigma = coefficient * d(first) ^ d(second)` in the named chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaValue {
    pub chart: &'static str,
    pub coefficient: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    surface: Surface,
    fault: SigmaFault,
}

impl CanonicalForm {
    pub fn new(surface: Surface) -> Self {
        Self::with_fault(surface, SigmaFault::None)
    }

    pub fn with_fault(surface: Surface, fault: SigmaFault) -> Self {
        Self { surface, fault }
    }

    pub fn fault(&self) -> SigmaFault {
        self.fault
    }

    pub fn coefficient_a(&self, z: Complex64, _w: Complex64) -> Complex64 {
        match self.fault {
            SigmaFault::SquaredInA => (z * z).inv(),
            _ => z.inv(),
        }
    }

    pub fn coefficient_b(&self, z: Complex64, s: Complex64) -> Result<Complex64, SurfaceError> {
        if s.norm() == 0.0 {
            return Err(SurfaceError::OnPolarSet);
        }
        Ok(match self.fault {
            SigmaFault::SimplePoleInB => -(z * s).inv(),
            _ => -(z * s * s).inv(),
        })
    }

    /// Coefficient in the node chart. Pulling `dz ^ dw / z` back along
    /// `(z, w) = (x, x y)` gives `(1/x) * x dx ^ dy`, so the form extends
    /// across the node with coefficient 1.
    pub fn coefficient_n(&self, _x: Complex64, _y: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    pub fn eval(&self, p: &EPoint) -> Result<SigmaValue, SurfaceError> {
        Ok(match *p {
            EPoint::A { z, w } => SigmaValue {
                chart: CHART_A,
                coefficient: self.coefficient_a(z, w),
            },
            EPoint::B { z, s } => SigmaValue {
                chart: CHART_B,
                coefficient: self.coefficient_b(z, s)?,
            },
            EPoint::N { x, y } => SigmaValue {
                chart: CHART_N,
                coefficient: self.coefficient_n(x, y),
            },
        })
    }

    /// `|c_A(p) - c_B(T(p)) det J_T(p)|` for the chart-`A` point `p = (z, w)`,
    /// where `T` is the transition `A -> B` and `J_T` its central-difference
    /// Jacobian with step `h`.
    pub fn transition_residual(&self, z: Complex64, w: Complex64, h: f64) -> Result<f64, SurfaceError> {
        let transit = |p: [Complex64; 2]| -> Result<Vec<Complex64>, SurfaceError> {
            self.surface.a_to_b_raw(&p).ok_or(SurfaceError::NotInV1)
        };
        let image = transit([z, w])?;
        let det = jacobian_det([z, w], h, transit)?;
        let c_b = self.coefficient_b(image[0], image[1])?;
        Ok((self.coefficient_a(z, w) - c_b * det).norm())
    }

    /// `c_A(x, x y) * det J` for the node-chart map `(x, y) -> (x, x y)`,
    /// with a central-difference Jacobian. Equals the node-chart coefficient
    /// when `sigma` is coherent there.
    pub fn node_chain_rule(&self, x: Complex64, y: Complex64, h: f64) -> Result<Complex64, SurfaceError> {
        let to_a = |p: [Complex64; 2]| -> Result<Vec<Complex64>, SurfaceError> {
            self.surface
                .n_to_a_raw(&p)
                .ok_or(SurfaceError::InvalidPoint {
                    chart: CHART_N,
                    reason: "x and y must be nonzero".into(),
                })
        };
        let image = to_a([x, y])?;
        let det = jacobian_det([x, y], h, to_a)?;
        Ok(self.coefficient_a(image[0], image[1]) * det)
    }

    /// Unrounded winding of `s -> c_B(z0, s)` around `|s| = r`.
    pub fn polar_winding(&self, z0: Complex64, r: f64) -> Result<f64, SurfaceError> {
        let p = self.surface.params();
        let z_ok = 1.0 < z0.norm() && z0.norm() < p.rho2();
        if !z_ok || !(r > 0.0 && r < 1.0 / p.rho0()) {
            return Err(SurfaceError::OutsideDomain {
                z: z0,
                w: Complex64::new(r, 0.0),
            });
        }
        let path = CirclePath::centered(r, POLAR_SAMPLES)?;
        let (turns, _) = winding_sum(|s| self.coefficient_b(z0, s).unwrap_or_default(), &path)?;
        Ok(turns)
    }

    /// Order of `sigma` along the annulus fiber `s = 0`, read off from the
    /// winding of its chart-`B` coefficient around a circle `|s| = r`.
    pub fn polar_order(&self, z0: Complex64, r: f64) -> Result<i64, SurfaceError> {
        Ok(self.polar_winding(z0, r)?.round() as i64)
    }
}

fn jacobian_det<F>(p: [Complex64; 2], h: f64, map: F) -> Result<Complex64, SurfaceError>
where
    F: Fn([Complex64; 2]) -> Result<Vec<Complex64>, SurfaceError>,
{
    let mut columns = [[Complex64::default(); 2]; 2];
    for (j, column) in columns.iter_mut().enumerate() {
        let mut plus = p;
        let mut minus = p;
        plus[j] += h;
        minus[j] -= h;
        let (fp, fm) = (map(plus)?, map(minus)?);
        for i in 0..2 {
            column[i] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(columns[0][0] * columns[1][1] - columns[1][0] * columns[0][1])
}
