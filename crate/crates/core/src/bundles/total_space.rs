//! Total spaces of `f^*(O(k_1) + ... + O(k_n))` over `E`, and the comparison
//! of `sigma` with the pulled-back canonical section of `O(-2)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::cocycle::Cocycle;
use super::BundleError;
use crate::atlas::{AtlasDescription, Chart, CoordMap, GridDensity, PolyDomain, PointRep, RadialConstraint, Transition};
use crate::holo::{winding_sum, CirclePath};
use crate::surface::{BasePoint, CanonicalForm, Params, SigmaFault, Surface, CHART_A, CHART_B, CHART_N};

/// Atlas of the total space, with charts `A x C^n`, `B x C^n`, `N x C^n`.
#[derive(Debug, Clone)]
pub struct TotalSpaceAtlas {
    degrees: Vec<i32>,
    surface: Surface,
    atlas: AtlasDescription,
}

/// A point of the base bundle `O(k_1) + ... + O(k_n)` over `CP^1`, in the
/// `w` chart (`W`) or the `s = 1/w` chart (`S`).
#[derive(Debug, Clone, PartialEq)]
pub enum BundlePoint {
    W { w: Complex64, v: Vec<Complex64> },
    S { s: Complex64, v: Vec<Complex64> },
}

impl BundlePoint {
    /// Projection to `CP^1`.
    pub fn base(&self) -> BasePoint {
        match self {
            BundlePoint::W { w, .. } => BasePoint::W(*w),
            BundlePoint::S { s, .. } => BasePoint::S(*s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutingReport {
    pub points: usize,
    pub max_residual: f64,
}

fn scale_fiber(degrees: &[i32], w: Complex64, v: &[Complex64], sign: i32) -> Vec<Complex64> {
    degrees.iter().zip(v).map(|(&k, &x)| x * w.powi(sign * k)).collect()
}

fn with_fiber(base: Vec<Complex64>, fiber: Vec<Complex64>) -> Vec<Complex64> {
    let mut out = base;
    out.extend(fiber);
    out
}

fn fiber_factors(n: usize) -> impl Iterator<Item = RadialConstraint> {
    std::iter::repeat_n(RadialConstraint::Plane, n)
}

fn extend_domain(domain: &PolyDomain, n: usize) -> PolyDomain {
    PolyDomain::new(domain.factors().iter().copied().chain(fiber_factors(n)).collect())
}

/// Total space of the pullback of `O(k_1) + ... + O(k_n)` along `f`.
///
/// Over the `B -> A` overlap the fiber coordinates change by
/// `v -> diag(w^{k_i}) v`; across the node chart they are unchanged.
pub fn pullback_to_e(degrees: &[i32], params: Params) -> Result<TotalSpaceAtlas, BundleError> {
    if degrees.is_empty() {
        return Err(BundleError::ZeroRank);
    }
    let n = degrees.len();
    let surface = Surface::new(params);
    let base = surface.atlas();
    let charts = base
        .charts()
        .iter()
        .map(|c| {
            let chart = Chart::new(c.id(), extend_domain(c.domain(), n));
            match c.id() {
                CHART_A => chart.with_quotient(crate::surface::chart_a_quotient()),
                _ => chart,
            }
        })
        .collect();

    let transitions = base
        .transitions()
        .iter()
        .map(|t| {
            let (forward, backward): (CoordMap, CoordMap) = match (t.from.as_str(), t.to.as_str()) {
                (CHART_B, CHART_A) => {
                    let (k1, k2) = (degrees.to_vec(), degrees.to_vec());
                    (
                        Arc::new(move |c: &[Complex64]| {
                            let b = surface.b_to_a_raw(&c[..2])?;
                            let fiber = scale_fiber(&k1, b[1], &c[2..], 1);
                            Some(with_fiber(b, fiber))
                        }),
                        Arc::new(move |c: &[Complex64]| {
                            let fiber = scale_fiber(&k2, c[1], &c[2..], -1);
                            Some(with_fiber(surface.a_to_b_raw(&c[..2])?, fiber))
                        }),
                    )
                }
                _ => {
                    let (f, b) = (t.forward.clone(), t.backward.clone());
                    (
                        Arc::new(move |c: &[Complex64]| Some(with_fiber(f(&c[..2])?, c[2..].to_vec()))),
                        Arc::new(move |c: &[Complex64]| Some(with_fiber(b(&c[..2])?, c[2..].to_vec()))),
                    )
                }
            };
            Transition {
                name: t.name.clone(),
                from: t.from.clone(),
                to: t.to.clone(),
                overlap: extend_domain(&t.overlap, n),
                forward,
                backward,
            }
        })
        .collect();

    let atlas = AtlasDescription::new(charts, transitions)?;
    Ok(TotalSpaceAtlas {
        degrees: degrees.to_vec(),
        surface,
        atlas,
    })
}

impl TotalSpaceAtlas {
    pub fn atlas(&self) -> &AtlasDescription {
        &self.atlas
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// Fiber part of the `B -> A` transition over the base value `w`.
    pub fn fiber_transition(&self, w: Complex64, v: &[Complex64]) -> Vec<Complex64> {
        scale_fiber(&self.degrees, w, v, 1)
    }

    /// The base bundle's own cocycle, `diag(w^{k_i})`.
    pub fn base_cocycle(&self) -> Cocycle {
        Cocycle::diagonal(&self.degrees)
    }

    /// Winding of `det` of the fiber transition around `|w| = r`.
    pub fn fiber_det_winding(&self, r: f64) -> Result<i64, BundleError> {
        super::cocycle::chern_number(&self.base_cocycle(), r)
    }

    /// Projection `pi` to `E` composed with `f`.
    pub fn base_of(&self, p: &PointRep) -> Result<BasePoint, BundleError> {
        let (a, b) = self.split(p)?;
        Ok(match p.chart.as_str() {
            CHART_A => BasePoint::W(b),
            CHART_B => BasePoint::S(b),
            _ => BasePoint::W(a * b),
        })
    }

    /// The induced map to the base bundle, `(e, v) -> (f(e), v)`.
    pub fn to_base_bundle(&self, p: &PointRep) -> Result<BundlePoint, BundleError> {
        let v = p.coords[2..].to_vec();
        Ok(match self.base_of(p)? {
            BasePoint::W(w) => BundlePoint::W { w, v },
            BasePoint::S(s) => BundlePoint::S { s, v },
        })
    }

    fn split(&self, p: &PointRep) -> Result<(Complex64, Complex64), BundleError> {
        let chart = self.atlas.chart(&p.chart)?;
        if p.coords.len() != chart.dimension() {
            return Err(crate::atlas::AtlasError::DimensionMismatch {
                expected: chart.dimension(),
                actual: p.coords.len(),
            }
            .into());
        }
        Ok((p.coords[0], p.coords[1]))
    }

    /// Check `f o pi = xi o f~` on sample points.
    ///
    /// For every sample, both sides are compared at the point itself and
    /// after moving it to the other chart of each transition, where the base
    /// bundle's points are compared through its own transition `s -> 1/s`,
    /// `v -> diag(w^{k_i}) v`. `points` samples are drawn from each overlap.
    pub fn commuting_square(&self, points: usize) -> Result<CommutingReport, BundleError> {
        let density = GridDensity {
            max_points: points,
            ..GridDensity::default()
        };
        let mut report = CommutingReport {
            points: 0,
            max_residual: 0.0,
        };
        for t in self.atlas.transitions() {
            for coords in t.overlap.sample_grid(&density) {
                let here = PointRep::new(t.from.clone(), coords);
                let there = self.atlas.transit(&here, &t.to)?;
                let mut residual: f64 = 0.0;
                for p in [&here, &there] {
                    let direct = point_on_cp1(self.surface.fibration_f(&to_e_point(p)?));
                    let through_bundle = point_on_cp1(self.to_base_bundle(p)?.base());
                    residual = residual.max(cp1_distance(direct, through_bundle));
                }
                let moved = self.bundle_to_w_chart(self.to_base_bundle(&here)?);
                let target = self.bundle_to_w_chart(self.to_base_bundle(&there)?);
                residual = residual.max(bundle_distance(&moved, &target));
                report.points += 1;
                report.max_residual = report.max_residual.max(residual);
            }
        }
        Ok(report)
    }

    /// Express a base-bundle point in the `w` chart.
    fn bundle_to_w_chart(&self, p: BundlePoint) -> (Complex64, Vec<Complex64>) {
        match p {
            BundlePoint::W { w, v } => (w, v),
            BundlePoint::S { s, v } => {
                let w = s.inv();
                let v = self.fiber_transition(w, &v);
                (w, v)
            }
        }
    }
}

fn to_e_point(p: &PointRep) -> Result<crate::surface::EPoint, BundleError> {
    use crate::surface::EPoint;
    let (a, b) = (p.coords[0], p.coords[1]);
    Ok(match p.chart.as_str() {
        CHART_A => EPoint::A { z: a, w: b },
        CHART_B => EPoint::B { z: a, s: b },
        CHART_N => EPoint::N { x: a, y: b },
        other => return Err(crate::atlas::AtlasError::UnknownChart(other.to_string()).into()),
    })
}

/// `w` value of a point of `CP^1`, infinite at `s = 0`.
fn point_on_cp1(b: BasePoint) -> Complex64 {
    match b {
        BasePoint::W(w) => w,
        BasePoint::S(s) => s.inv(),
    }
}

fn cp1_distance(a: Complex64, b: Complex64) -> f64 {
    let scale = b.norm().max(1.0);
    (a - b).norm() / scale
}

fn bundle_distance(a: &(Complex64, Vec<Complex64>), b: &(Complex64, Vec<Complex64>)) -> f64 {
    let base = cp1_distance(a.0, b.0);
    a.1.iter()
        .zip(&b.1)
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(base, f64::max)
}

/// Winding samples used for the divisor comparison.
const DIVISOR_SAMPLES: usize = 256;

/// Compare the order of `sigma` along `s = 0` with the order of the
/// pulled-back meromorphic section of `O(-2)` that is `1` in the `w` chart.
///
/// Orders are read off as windings around circles `|s| = r` at a few fiber
/// positions. Returns the common order, which is `-2` when `sigma` is a
/// section of the pullback of `O(-2)`.
pub fn canonical_divisor_check(params: Params, fault: SigmaFault) -> Result<i64, BundleError> {
    let surface = Surface::new(params);
    let sigma = CanonicalForm::with_fault(surface, fault);
    let line = Cocycle::o_k(-2);
    // s2(s) = G(1/s)^{-1} s1(1/s) with s1 = 1
    let section = move |s: Complex64| line.eval(s.inv())[(0, 0)].inv();

    let z_positions = [0.5 * (1.0 + params.rho2()), 1.0 + 0.25 * (params.rho2() - 1.0)];
    let radii = [0.1, 0.5, 0.9];
    let mut common = None;
    for &z0 in &z_positions {
        let z0 = Complex64::new(z0, 0.0);
        for &r in &radii {
            let sigma_order = sigma.polar_order(z0, r)?;
            let path = CirclePath::centered(r, DIVISOR_SAMPLES)?;
            let (turns, _) = winding_sum(&section, &path)?;
            let section_order = turns.round() as i64;
            if sigma_order != section_order {
                return Err(BundleError::Mismatch {
                    sigma_order,
                    section_order,
                });
            }
            common.get_or_insert(sigma_order);
        }
    }
    Ok(common.expect("at least one sample circle"))
}
