//! Complex manifolds presented by charts and transition maps.
//!
//! A chart is a product domain in `C^d`, optionally carrying a quotient by a
//! `Z`-action (coordinates are then representatives of orbits). Transitions
//! are registered once, from a source chart to a target chart, with the
//! overlap described in source coordinates; [`AtlasDescription::transit`]
//! uses the forward map in one direction and the backward map in the other.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::holo::{self, cr_residual};

/// Holomorphy tolerance used by [`AtlasTolerances::default`].
pub const DEFAULT_HOLOMORPHY_TOL: f64 = 1e-8;
/// Round-trip tolerance used by [`AtlasTolerances::default`].
pub const DEFAULT_ROUNDTRIP_TOL: f64 = 1e-10;

/// A map between coordinate tuples. `None` means the input is outside the
/// region where the map is defined.
pub type CoordMap = Arc<dyn Fn(&[Complex64]) -> Option<Vec<Complex64>> + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtlasError {
    #[error("expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid radial constraint: {0}")]
    InvalidConstraint(String),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("chart `{0}` registered twice")]
    DuplicateChart(String),
    #[error("no transition registered between `{from}` and `{to}`")]
    NoTransitionRegistered { from: String, to: String },
    #[error("point is not in the overlap of `{from}` and `{to}`")]
    NotInOverlap { from: String, to: String },
    #[error("point is outside the domain of chart `{0}`")]
    NotInChart(String),
}

/// Constraint on the modulus of a single coordinate. All regions are open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialConstraint {
    /// `|c| < radius`
    Disk { radius: f64 },
    /// `inner < |c| < outer`
    Annulus { inner: f64, outer: f64 },
    /// `c != 0`
    PuncturedPlane,
    /// no constraint
    Plane,
}

impl RadialConstraint {
    pub fn disk(radius: f64) -> Result<Self, AtlasError> {
        if !(radius > 0.0) {
            return Err(AtlasError::InvalidConstraint(format!("disk radius {radius}")));
        }
        Ok(Self::Disk { radius })
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self, AtlasError> {
        if !(inner >= 0.0 && inner < outer) {
            return Err(AtlasError::InvalidConstraint(format!("annulus ({inner}, {outer})")));
        }
        Ok(Self::Annulus { inner, outer })
    }

    pub fn contains(&self, c: Complex64) -> bool {
        let r = c.norm();
        match *self {
            Self::Disk { radius } => r < radius,
            Self::Annulus { inner, outer } => inner < r && r < outer,
            Self::PuncturedPlane => r > 0.0,
            Self::Plane => r.is_finite(),
        }
    }

    fn is_annulus(&self) -> bool {
        matches!(self, Self::Annulus { .. })
    }

    /// Log-spaced radii times half-offset uniform angles; every sample is
    /// strictly interior. Regions reaching the origin are sampled down to a
    /// tenth of their outer radius, unbounded ones on `[0.1, 10]`.
    fn samples(&self, radii: usize, angles: usize) -> Vec<Complex64> {
        let (lo, hi) = match *self {
            Self::Annulus { inner, outer } if inner > 0.0 => (inner, outer),
            Self::Annulus { outer, .. } => (outer / 10.0, outer),
            Self::Disk { radius } => (radius / 10.0, radius),
            Self::PuncturedPlane | Self::Plane => (0.1, 10.0),
        };
        let ratio = hi / lo;
        let mut out = Vec::with_capacity(radii * angles);
        for i in 0..radii {
            let r = lo * ratio.powf((i as f64 + 0.5) / radii as f64);
            for j in 0..angles {
                out.push(Complex64::from_polar(r, TAU * (j as f64 + 0.5) / angles as f64));
            }
        }
        out
    }
}

/// Product of per-coordinate radial constraints.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PolyDomain {
    factors: Vec<RadialConstraint>,
}

impl PolyDomain {
    pub fn new(factors: Vec<RadialConstraint>) -> Self {
        Self { factors }
    }

    pub fn dimension(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[RadialConstraint] {
        &self.factors
    }

    pub fn contains(&self, coords: &[Complex64]) -> Result<bool, AtlasError> {
        if coords.len() != self.factors.len() {
            return Err(AtlasError::DimensionMismatch {
                expected: self.factors.len(),
                actual: coords.len(),
            });
        }
        Ok(self.factors.iter().zip(coords).all(|(f, &c)| f.contains(c)))
    }

    /// Deterministic sample grid. The full product is used when it has at
    /// most `density.max_points` elements, otherwise an evenly strided subset.
    pub fn sample_grid(&self, density: &GridDensity) -> Vec<Vec<Complex64>> {
        let per_factor: Vec<Vec<Complex64>> = self
            .factors
            .iter()
            .map(|f| {
                if f.is_annulus() {
                    f.samples(density.radii, density.angles)
                } else {
                    f.samples(density.aux_radii, density.aux_angles)
                }
            })
            .collect();
        let total: u128 = per_factor.iter().map(|v| v.len() as u128).product();
        if total == 0 {
            return Vec::new();
        }
        let decode = |mut index: u128| -> Vec<Complex64> {
            let mut coords = vec![Complex64::new(0.0, 0.0); per_factor.len()];
            for (slot, values) in coords.iter_mut().zip(&per_factor).rev() {
                let len = values.len() as u128;
                *slot = values[(index % len) as usize];
                index /= len;
            }
            coords
        };
        let wanted = density.max_points as u128;
        if total <= wanted {
            (0..total).map(decode).collect()
        } else {
            let stride = coprime_stride(total, total / wanted);
            (0..wanted).map(|i| decode((i * stride) % total)).collect()
        }
    }
}

fn coprime_stride(total: u128, hint: u128) -> u128 {
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut stride = hint.max(1) | 1;
    while gcd(stride, total) != 1 {
        stride += 2;
    }
    stride
}

/// A `Z`-action on a chart's coordinates together with a choice of canonical
/// representative for each orbit.
pub trait ChartQuotient: Send + Sync {
    /// Short identifier used when the atlas is exported.
    fn name(&self) -> &str;
    /// Canonical representative of the orbit of `coords`.
    fn normalize(&self, coords: &[Complex64]) -> Vec<Complex64>;
    /// The action of `n` on `coords`.
    fn act(&self, coords: &[Complex64], n: i32) -> Vec<Complex64>;
}

#[derive(Clone)]
pub struct Chart {
    id: String,
    domain: PolyDomain,
    quotient: Option<Arc<dyn ChartQuotient>>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("quotient", &self.quotient.as_ref().map(|q| q.name().to_string()))
            .finish()
    }
}

impl Chart {
    pub fn new(id: impl Into<String>, domain: PolyDomain) -> Self {
        Self {
            id: id.into(),
            domain,
            quotient: None,
        }
    }

    pub fn with_quotient(mut self, quotient: Arc<dyn ChartQuotient>) -> Self {
        self.quotient = Some(quotient);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> &PolyDomain {
        &self.domain
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn normalize(&self, coords: &[Complex64]) -> Vec<Complex64> {
        match &self.quotient {
            Some(q) => q.normalize(coords),
            None => coords.to_vec(),
        }
    }

    /// Distance between two coordinate tuples as points of this chart, i.e.
    /// modulo the quotient action when there is one. Componentwise the error
    /// is absolute below modulus 1 and relative above.
    pub fn distance(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        match &self.quotient {
            None => coord_distance(a, b),
            Some(q) => {
                let na = q.normalize(a);
                let nb = q.normalize(b);
                // Rounding can put the two representatives on either side of
                // the fundamental-domain boundary.
                (-1..=1)
                    .map(|n| coord_distance(&na, &q.act(&nb, n)))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

pub(crate) fn coord_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
        .fold(0.0, f64::max)
}

/// Membership of `coords` in the chart's domain.
pub fn in_domain(chart: &Chart, coords: &[Complex64]) -> Result<bool, AtlasError> {
    chart.domain.contains(coords)
}

#[derive(Clone)]
pub struct Transition {
    pub name: String,
    pub from: String,
    pub to: String,
    /// Overlap, in coordinates of `from`.
    pub overlap: PolyDomain,
    pub forward: CoordMap,
    pub backward: CoordMap,
}

impl fmt::Debug for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transition")
            .field("name", &self.name)
            .field("from", &self.from)
            .field("to", &self.to)
            .field("overlap", &self.overlap)
            .finish_non_exhaustive()
    }
}

/// A point given in one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRep {
    pub chart: String,
    pub coords: Vec<Complex64>,
}

impl PointRep {
    pub fn new(chart: impl Into<String>, coords: Vec<Complex64>) -> Self {
        Self {
            chart: chart.into(),
            coords,
        }
    }
}

/// Immutable collection of charts and transitions.
#[derive(Debug, Clone)]
pub struct AtlasDescription {
    charts: Vec<Chart>,
    transitions: Vec<Transition>,
}

impl AtlasDescription {
    pub fn new(charts: Vec<Chart>, transitions: Vec<Transition>) -> Result<Self, AtlasError> {
        let mut seen = BTreeSet::new();
        for chart in &charts {
            if !seen.insert(chart.id.clone()) {
                return Err(AtlasError::DuplicateChart(chart.id.clone()));
            }
        }
        let atlas = Self { charts, transitions };
        for t in &atlas.transitions {
            let source = atlas.chart(&t.from)?;
            atlas.chart(&t.to)?;
            if t.overlap.dimension() != source.dimension() {
                return Err(AtlasError::DimensionMismatch {
                    expected: source.dimension(),
                    actual: t.overlap.dimension(),
                });
            }
        }
        Ok(atlas)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn chart(&self, id: &str) -> Result<&Chart, AtlasError> {
        self.charts
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| AtlasError::UnknownChart(id.to_string()))
    }

    fn between(&self, a: &str, b: &str) -> Option<&Transition> {
        self.transitions
            .iter()
            .find(|t| (t.from == a && t.to == b) || (t.from == b && t.to == a))
    }

    /// Express `p` in chart `target`; the result is normalized when the
    /// target chart is a quotient.
    pub fn transit(&self, p: &PointRep, target: &str) -> Result<PointRep, AtlasError> {
        let source = self.chart(&p.chart)?;
        let dest = self.chart(target)?;
        if !source.domain.contains(&p.coords)? {
            return Err(AtlasError::NotInChart(p.chart.clone()));
        }
        if p.chart == target {
            return Ok(PointRep::new(target, dest.normalize(&p.coords)));
        }
        let not_in_overlap = || AtlasError::NotInOverlap {
            from: p.chart.clone(),
            to: target.to_string(),
        };
        let t = self
            .between(&p.chart, target)
            .ok_or_else(|| AtlasError::NoTransitionRegistered {
                from: p.chart.clone(),
                to: target.to_string(),
            })?;
        let image = if t.from == p.chart {
            if !t.overlap.contains(&p.coords)? {
                return Err(not_in_overlap());
            }
            (t.forward)(&p.coords).ok_or_else(not_in_overlap)?
        } else {
            let image = (t.backward)(&p.coords).ok_or_else(not_in_overlap)?;
            if !t.overlap.contains(&image)? {
                return Err(not_in_overlap());
            }
            image
        };
        if !dest.domain.contains(&image)? {
            return Err(not_in_overlap());
        }
        Ok(PointRep::new(target, dest.normalize(&image)))
    }

    /// Structural summary for export; maps are referred to by name.
    pub fn export(&self) -> AtlasExport {
        AtlasExport {
            charts: self
                .charts
                .iter()
                .map(|c| ChartExport {
                    id: c.id.clone(),
                    dimension: c.dimension(),
                    domain: c.domain.clone(),
                    quotient: c.quotient.as_ref().map(|q| q.name().to_string()),
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionExport {
                    name: t.name.clone(),
                    from: t.from.clone(),
                    to: t.to.clone(),
                    overlap: t.overlap.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartExport {
    pub id: String,
    pub dimension: usize,
    pub domain: PolyDomain,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionExport {
    pub name: String,
    pub from: String,
    pub to: String,
    pub overlap: PolyDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasExport {
    pub charts: Vec<ChartExport>,
    pub transitions: Vec<TransitionExport>,
}

/// Sample-grid resolution for [`verify_atlas`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDensity {
    /// radii per annulus factor
    pub radii: usize,
    /// angles per annulus factor
    pub angles: usize,
    /// radii per disk or plane factor
    pub aux_radii: usize,
    /// angles per disk or plane factor
    pub aux_angles: usize,
    pub max_points: usize,
}

impl Default for GridDensity {
    fn default() -> Self {
        Self {
            radii: 8,
            angles: 32,
            aux_radii: 4,
            aux_angles: 8,
            max_points: 65_536,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtlasTolerances {
    pub holomorphy: f64,
    pub roundtrip: f64,
    /// finite-difference step for the holomorphy estimate
    pub step: f64,
}

impl Default for AtlasTolerances {
    fn default() -> Self {
        Self {
            holomorphy: DEFAULT_HOLOMORPHY_TOL,
            roundtrip: DEFAULT_ROUNDTRIP_TOL,
            step: holo::DEFAULT_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub name: String,
    pub points: usize,
    pub max_cr_forward: f64,
    pub max_cr_backward: f64,
    pub max_roundtrip: f64,
    /// grid points where a map or its stencil could not be evaluated
    pub evaluation_failures: usize,
    pub passed: bool,
}

impl TransitionReport {
    pub fn max_cr(&self) -> f64 {
        self.max_cr_forward.max(self.max_cr_backward)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleReport {
    /// charts `[x, y, z]`: the chain `x -> y -> z` is compared with `x -> z`
    pub chain: [String; 3],
    pub points: usize,
    pub max_mismatch: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasReport {
    pub transitions: Vec<TransitionReport>,
    pub cocycles: Vec<CocycleReport>,
    pub passed: bool,
}

impl AtlasReport {
    pub fn max_cr(&self) -> f64 {
        self.transitions.iter().map(TransitionReport::max_cr).fold(0.0, f64::max)
    }

    pub fn max_roundtrip(&self) -> f64 {
        self.transitions.iter().map(|t| t.max_roundtrip).fold(0.0, f64::max)
    }
}

struct PointOutcome {
    cr_forward: f64,
    cr_backward: f64,
    roundtrip: f64,
    failed: bool,
}

fn check_transition_point(
    atlas: &AtlasDescription,
    t: &Transition,
    p: &[Complex64],
    tol: &AtlasTolerances,
) -> PointOutcome {
    let failed = PointOutcome {
        cr_forward: 0.0,
        cr_backward: 0.0,
        roundtrip: 0.0,
        failed: true,
    };
    let (Ok(source), Ok(target)) = (atlas.chart(&t.from), atlas.chart(&t.to)) else {
        return failed;
    };
    let forward = |x: &[Complex64]| (t.forward)(x);
    let backward = |x: &[Complex64]| (t.backward)(x);
    let Some(q) = forward(p) else { return failed };
    let (Ok(cr_forward), Ok(cr_backward)) = (cr_residual(forward, p, tol.step), cr_residual(backward, &q, tol.step))
    else {
        return failed;
    };
    let Some(back) = backward(&q) else { return failed };
    let q_canonical = target.normalize(&q);
    let Some(again) = backward(&q_canonical).and_then(|x| forward(&x)) else {
        return failed;
    };
    PointOutcome {
        cr_forward,
        cr_backward,
        roundtrip: source.distance(&back, p).max(target.distance(&again, &q)),
        failed: false,
    }
}

/// Numerically certify every transition (holomorphy both ways, round trips)
/// and every triangle of transitions (cocycle condition) on sample grids.
///
/// Deterministic: grid points are evaluated in parallel but folded in order.
pub fn verify_atlas(atlas: &AtlasDescription, density: &GridDensity, tol: &AtlasTolerances) -> AtlasReport {
    let mut transitions = Vec::new();
    for t in &atlas.transitions {
        let grid = t.overlap.sample_grid(density);
        let outcomes: Vec<PointOutcome> = grid
            .par_iter()
            .map(|p| check_transition_point(atlas, t, p, tol))
            .collect();
        let mut report = TransitionReport {
            name: t.name.clone(),
            points: grid.len(),
            max_cr_forward: 0.0,
            max_cr_backward: 0.0,
            max_roundtrip: 0.0,
            evaluation_failures: 0,
            passed: false,
        };
        for o in &outcomes {
            if o.failed {
                report.evaluation_failures += 1;
                continue;
            }
            report.max_cr_forward = report.max_cr_forward.max(o.cr_forward);
            report.max_cr_backward = report.max_cr_backward.max(o.cr_backward);
            report.max_roundtrip = report.max_roundtrip.max(o.roundtrip);
        }
        report.passed = report.evaluation_failures == 0
            && report.points > 0
            && report.max_cr() <= tol.holomorphy
            && report.max_roundtrip <= tol.roundtrip;
        transitions.push(report);
    }

    let cocycles = verify_cocycles(atlas, density, tol);
    let passed = transitions.iter().all(|t| t.passed) && cocycles.iter().all(|c| c.passed);
    AtlasReport {
        transitions,
        cocycles,
        passed,
    }
}

fn verify_cocycles(atlas: &AtlasDescription, density: &GridDensity, tol: &AtlasTolerances) -> Vec<CocycleReport> {
    let ids: Vec<&str> = atlas.charts.iter().map(|c| c.id.as_str()).collect();
    let mut reports = Vec::new();
    for &x in &ids {
        for &y in &ids {
            for &z in &ids {
                if x == y || y == z || x == z {
                    continue;
                }
                let (Some(xy), Some(_), Some(_)) = (atlas.between(x, y), atlas.between(y, z), atlas.between(x, z))
                else {
                    continue;
                };
                // Sample the x-y overlap and express the samples in chart x.
                let seeds: Vec<Vec<Complex64>> = xy.overlap.sample_grid(density);
                let mismatches: Vec<Option<f64>> = seeds
                    .par_iter()
                    .map(|seed| {
                        let p = if xy.from == x {
                            PointRep::new(x, seed.clone())
                        } else {
                            atlas.transit(&PointRep::new(y, seed.clone()), x).ok()?
                        };
                        let chained = atlas.transit(&atlas.transit(&p, y).ok()?, z).ok()?;
                        let direct = atlas.transit(&p, z).ok()?;
                        Some(atlas.chart(z).ok()?.distance(&chained.coords, &direct.coords))
                    })
                    .collect();
                let compared: Vec<f64> = mismatches.into_iter().flatten().collect();
                let max_mismatch = compared.iter().copied().fold(0.0, f64::max);
                reports.push(CocycleReport {
                    chain: [x.to_string(), y.to_string(), z.to_string()],
                    points: compared.len(),
                    max_mismatch,
                    passed: max_mismatch <= tol.roundtrip,
                });
            }
        }
    }
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity_atlas() -> AtlasDescription {
        let domain = PolyDomain::new(vec![RadialConstraint::annulus(0.5, 2.0).unwrap()]);
        let id: CoordMap = Arc::new(|x: &[Complex64]| Some(x.to_vec()));
        AtlasDescription::new(
            vec![Chart::new("U", domain.clone()), Chart::new("V", domain.clone())],
            vec![Transition {
                name: "U->V".into(),
                from: "U".into(),
                to: "V".into(),
                overlap: domain,
                forward: id.clone(),
                backward: id,
            }],
        )
        .unwrap()
    }

    /// Three charts on C*: coordinates z, 1/z and 2z.
    fn punctured_plane_atlas(corrupt_direct: bool) -> AtlasDescription {
        let dom = || PolyDomain::new(vec![RadialConstraint::PuncturedPlane]);
        let map = |f: fn(Complex64) -> Complex64| -> CoordMap { Arc::new(move |x: &[Complex64]| Some(vec![f(x[0])])) };
        let inv = map(|z| z.inv());
        let direct: fn(Complex64) -> Complex64 = if corrupt_direct { |z| z.inv() * 2.001 } else { |z| z.inv() * 2.0 };
        let direct_back: fn(Complex64) -> Complex64 = if corrupt_direct { |u| u.inv() * 2.001 } else { |u| u.inv() * 2.0 };
        AtlasDescription::new(
            vec![Chart::new("X", dom()), Chart::new("Y", dom()), Chart::new("Z", dom())],
            vec![
                Transition {
                    name: "X->Y".into(),
                    from: "X".into(),
                    to: "Y".into(),
                    overlap: dom(),
                    forward: inv.clone(),
                    backward: inv,
                },
                Transition {
                    name: "Y->Z".into(),
                    from: "Y".into(),
                    to: "Z".into(),
                    overlap: dom(),
                    forward: map(|y| y * 2.0),
                    backward: map(|v| v / 2.0),
                },
                Transition {
                    name: "X->Z".into(),
                    from: "X".into(),
                    to: "Z".into(),
                    overlap: dom(),
                    forward: map(direct),
                    backward: map(direct_back),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn in_domain_examples() {
        let chart = Chart::new(
            "P",
            PolyDomain::new(vec![
                RadialConstraint::annulus(1.0, 1.6).unwrap(),
                RadialConstraint::disk(5.0).unwrap(),
            ]),
        );
        assert_eq!(in_domain(&chart, &[c(1.2, 0.0), c(3.0, 0.0)]), Ok(true));

        let chart = Chart::new(
            "Q",
            PolyDomain::new(vec![RadialConstraint::PuncturedPlane, RadialConstraint::annulus(0.0, 0.5).unwrap()]),
        );
        assert_eq!(in_domain(&chart, &[c(1.0, 0.0), c(0.0, 0.0)]), Ok(false));

        let chart = Chart::new("D", PolyDomain::new(vec![RadialConstraint::disk(0.5).unwrap()]));
        assert_eq!(in_domain(&chart, &[c(0.5, 0.0)]), Ok(false));
        assert_eq!(
            in_domain(&chart, &[c(0.1, 0.0), c(0.1, 0.0)]),
            Err(AtlasError::DimensionMismatch { expected: 1, actual: 2 })
        );
    }

    #[test]
    fn constraints_validate_radii() {
        assert!(RadialConstraint::annulus(2.0, 1.0).is_err());
        assert!(RadialConstraint::disk(-1.0).is_err());
    }

    #[test]
    fn identity_transit_and_errors() {
        let atlas = identity_atlas();
        let p = PointRep::new("U", vec![c(1.0, 0.3)]);
        assert_eq!(atlas.transit(&p, "V").unwrap().coords, p.coords);
        assert_eq!(atlas.transit(&PointRep::new("V", p.coords.clone()), "U").unwrap().coords, p.coords);

        let outside = PointRep::new("U", vec![c(0.1, 0.0)]);
        assert!(matches!(atlas.transit(&outside, "V"), Err(AtlasError::NotInChart(_))));
        assert!(matches!(atlas.transit(&p, "W"), Err(AtlasError::UnknownChart(_))));
    }

    #[test]
    fn missing_transition_is_reported() {
        let dom = PolyDomain::new(vec![RadialConstraint::Plane]);
        let atlas = AtlasDescription::new(vec![Chart::new("U", dom.clone()), Chart::new("V", dom)], vec![]).unwrap();
        let err = atlas.transit(&PointRep::new("U", vec![c(1.0, 0.0)]), "V").unwrap_err();
        assert!(matches!(err, AtlasError::NoTransitionRegistered { .. }));
    }

    #[test]
    fn overlap_is_checked_before_transiting() {
        let chart_dom = PolyDomain::new(vec![RadialConstraint::disk(3.0).unwrap()]);
        let overlap = PolyDomain::new(vec![RadialConstraint::annulus(1.0, 2.0).unwrap()]);
        let id: CoordMap = Arc::new(|x: &[Complex64]| Some(x.to_vec()));
        let atlas = AtlasDescription::new(
            vec![Chart::new("U", chart_dom.clone()), Chart::new("V", chart_dom)],
            vec![Transition {
                name: "t".into(),
                from: "U".into(),
                to: "V".into(),
                overlap,
                forward: id.clone(),
                backward: id,
            }],
        )
        .unwrap();
        for chart in ["U", "V"] {
            let err = atlas.transit(&PointRep::new(chart, vec![c(0.5, 0.0)]), if chart == "U" { "V" } else { "U" });
            assert!(matches!(err, Err(AtlasError::NotInOverlap { .. })));
        }
    }

    #[test]
    fn atlas_rejects_unknown_and_duplicate_charts() {
        let dom = PolyDomain::new(vec![RadialConstraint::Plane]);
        let id: CoordMap = Arc::new(|x: &[Complex64]| Some(x.to_vec()));
        let dangling = Transition {
            name: "t".into(),
            from: "U".into(),
            to: "missing".into(),
            overlap: dom.clone(),
            forward: id.clone(),
            backward: id,
        };
        assert!(matches!(
            AtlasDescription::new(vec![Chart::new("U", dom.clone())], vec![dangling]),
            Err(AtlasError::UnknownChart(_))
        ));
        assert!(matches!(
            AtlasDescription::new(vec![Chart::new("U", dom.clone()), Chart::new("U", dom)], vec![]),
            Err(AtlasError::DuplicateChart(_))
        ));
    }

    #[test]
    fn identity_atlas_verifies() {
        let report = verify_atlas(&identity_atlas(), &GridDensity::default(), &AtlasTolerances::default());
        assert!(report.passed, "{report:?}");
        assert_eq!(report.transitions[0].points, 256);
        assert!(report.max_cr() < 1e-12);
    }

    #[test]
    fn cocycle_condition_is_checked() {
        let density = GridDensity {
            radii: 4,
            angles: 8,
            aux_radii: 4,
            aux_angles: 8,
            max_points: 1024,
        };
        let good = verify_atlas(&punctured_plane_atlas(false), &density, &AtlasTolerances::default());
        assert!(good.passed, "{good:?}");
        assert_eq!(good.cocycles.len(), 6);
        assert!(good.cocycles.iter().all(|c| c.points == 32));

        let bad = verify_atlas(&punctured_plane_atlas(true), &density, &AtlasTolerances::default());
        assert!(!bad.passed);
        assert!(bad.cocycles.iter().any(|c| c.max_mismatch > 1e-4));
    }

    #[test]
    fn anti_holomorphic_transition_fails() {
        let dom = PolyDomain::new(vec![RadialConstraint::annulus(0.5, 2.0).unwrap()]);
        let conj: CoordMap = Arc::new(|x: &[Complex64]| Some(vec![x[0].conj()]));
        let atlas = AtlasDescription::new(
            vec![Chart::new("U", dom.clone()), Chart::new("V", dom.clone())],
            vec![Transition {
                name: "conj".into(),
                from: "U".into(),
                to: "V".into(),
                overlap: dom,
                forward: conj.clone(),
                backward: conj,
            }],
        )
        .unwrap();
        let report = verify_atlas(&atlas, &GridDensity::default(), &AtlasTolerances::default());
        assert!(!report.passed);
        assert!((report.max_cr() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grid_subsampling_is_deterministic_and_bounded() {
        let dom = PolyDomain::new(vec![
            RadialConstraint::annulus(1.0, 2.0).unwrap(),
            RadialConstraint::annulus(1.0, 2.0).unwrap(),
            RadialConstraint::Plane,
        ]);
        let density = GridDensity::default();
        let a = dom.sample_grid(&density);
        assert_eq!(a.len(), density.max_points);
        assert_eq!(a, dom.sample_grid(&density));
        let distinct: BTreeSet<String> = a.iter().map(|p| format!("{p:?}")).collect();
        assert_eq!(distinct.len(), a.len());
        assert!(a.iter().all(|p| dom.contains(p).unwrap()));
    }

    #[test]
    fn grid_points_are_interior() {
        for f in [
            RadialConstraint::annulus(0.2, 0.5).unwrap(),
            RadialConstraint::annulus(0.0, 0.3).unwrap(),
            RadialConstraint::disk(0.3).unwrap(),
        ] {
            assert!(f.samples(8, 32).iter().all(|&z| f.contains(z)));
        }
    }
}
