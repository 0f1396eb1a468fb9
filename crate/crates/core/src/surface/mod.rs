//! The surface `E(rho1, rho2)`.
//!
//! Three charts cover it:
//!
//! * `A`: `(z, w)` in `C* x Delta(0, rho1)` modulo `n.(z, w) = (z w^n, w)`,
//!   the elliptic part away from the singular fiber;
//! * `B`: `(z, s)` in `Delta(1, rho2) x Delta(1/rho0)`, fibered by annuli;
//! * `N`: `(x, y)` in `Delta(eps)^2`, a local model of the node of the `I_1`
//!   fiber with `w = x y`.
//!
//! The fibration `f` reads off `w` (base chart 1) or `s` (base chart 2), and
//! the base charts are glued by `s = 1/w`.

mod canonical;
mod moduli;
mod pullback;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{AtlasDescription, Chart, ChartQuotient, CoordMap, PolyDomain, RadialConstraint, Transition};
use crate::holo::{HoloError, LogBranch};

pub use canonical::{CanonicalForm, SigmaFault, SigmaValue};
pub use moduli::{j_invariant, DEFAULT_J_TERMS};
pub use pullback::{MeroValue, PulledBackFunction, RationalFunction};

pub const CHART_A: &str = "A";
pub const CHART_B: &str = "B";
pub const CHART_N: &str = "N";

/// Branches tried when inverting the gluing.
const BRANCH_SEARCH: std::ops::RangeInclusive<i32> = -8..=8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("parameters must satisfy 0 < rho0 < rho1 < 1 < rho2 < 1/rho1, got ({rho0}, {rho1}, {rho2})")]
    InvalidParams { rho0: f64, rho1: f64, rho2: f64 },
    #[error("|w| = {0} is outside the gluing annulus")]
    OutsideAnnulus(f64),
    #[error("({z}, {w}) is outside the domain of the gluing map")]
    OutsideDomain { z: Complex64, w: Complex64 },
    #[error("point is not in the glued region V1")]
    NotInV1,
    #[error("{0} branches are admissible; the gluing annuli overlap")]
    AmbiguousBranch(usize),
    #[error("invalid point for chart {chart}: {reason}")]
    InvalidPoint { chart: &'static str, reason: String },
    #[error("nome q = {0} must satisfy 0 < |q| < 1")]
    InvalidNome(Complex64),
    #[error("q-series tail estimate {tail:e} exceeds tolerance with {terms} terms")]
    TruncationInsufficient { terms: usize, tail: f64 },
    #[error("sigma has a pole at s = 0")]
    OnPolarSet,
    #[error("numerator and denominator both vanish at the base point")]
    IndeterminateAtPoint,
    #[error("rational function has an identically zero denominator")]
    ZeroDenominator,
    #[error(transparent)]
    Holo(#[from] HoloError),
}

/// The radii `(rho0, rho1, rho2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    rho0: f64,
    rho1: f64,
    rho2: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            rho0: 0.2,
            rho1: 0.5,
            rho2: 1.6,
        }
    }
}

impl Params {
    pub fn new(rho0: f64, rho1: f64, rho2: f64) -> Result<Self, SurfaceError> {
        let ok = rho0 > 0.0 && rho0 < rho1 && rho1 < 1.0 && 1.0 < rho2 && rho2 * rho1 < 1.0;
        if !ok || ![rho0, rho1, rho2].iter().all(|r| r.is_finite()) {
            return Err(SurfaceError::InvalidParams { rho0, rho1, rho2 });
        }
        Ok(Self { rho0, rho1, rho2 })
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    /// Radius `eps` of the node chart `Delta(eps)^2`: 0.3, shrunk when
    /// needed so that `eps^2 <= rho1 / 4`.
    pub fn node_radius(&self) -> f64 {
        0.3f64.min(0.5 * self.rho1.sqrt())
    }

    /// Geometric mean of `rho0` and `rho1`, the default matching circle.
    pub fn overlap_radius(&self) -> f64 {
        (self.rho0 * self.rho1).sqrt()
    }

    pub fn validate(&self) -> Result<(), SurfaceError> {
        Self::new(self.rho0, self.rho1, self.rho2).map(|_| ())
    }
}

/// A point of `E`, in one of the three charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EPoint {
    A { z: Complex64, w: Complex64 },
    B { z: Complex64, s: Complex64 },
    N { x: Complex64, y: Complex64 },
}

impl EPoint {
    pub fn chart(&self) -> &'static str {
        match self {
            EPoint::A { .. } => CHART_A,
            EPoint::B { .. } => CHART_B,
            EPoint::N { .. } => CHART_N,
        }
    }

    pub fn coords(&self) -> [Complex64; 2] {
        match *self {
            EPoint::A { z, w } => [z, w],
            EPoint::B { z, s } => [z, s],
            EPoint::N { x, y } => [x, y],
        }
    }
}

/// A point of the base `CP^1 = Delta(rho1) cup_h Delta(1/rho0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    /// coordinate `w` of the first disk
    W(Complex64),
    /// coordinate `s = 1/w` of the second disk
    S(Complex64),
}

impl BasePoint {
    /// The point in the `w` coordinate, when it is not `w = infinity`.
    pub fn as_w(&self) -> Option<Complex64> {
        match *self {
            BasePoint::W(w) => Some(w),
            BasePoint::S(s) if s.norm() > 0.0 => Some(s.inv()),
            BasePoint::S(_) => None,
        }
    }

    /// The point in the `s` coordinate, when it is not `w = 0`.
    pub fn as_s(&self) -> Option<Complex64> {
        match *self {
            BasePoint::S(s) => Some(s),
            BasePoint::W(w) if w.norm() > 0.0 => Some(w.inv()),
            BasePoint::W(_) => None,
        }
    }
}

/// What kind of curve the fiber of `f` over a base point is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FiberClass {
    /// the elliptic curve `C*/q^Z`
    Elliptic { q: Complex64 },
    /// an open annulus `Delta(1, rho2)` of chart `B`
    Annulus { s: Complex64 },
    /// the rational curve with one node over `w = 0`
    Nodal,
}

/// `phi(w) = exp((log w)^2 / (4 pi i) - (log w)/2)` on the given sheet of
/// `log`, with no domain check.
pub fn phi_unchecked(w: Complex64, branch: LogBranch) -> Complex64 {
    let log_w = branch.log(w);
    let exponent = log_w * log_w / Complex64::new(0.0, 4.0 * PI) - log_w / 2.0;
    exponent.exp()
}

/// Canonical representative of the orbit of `(z, w)` under `n.(z, w) = (z w^n, w)`,
/// with the exponent that was applied.
///
/// Representatives satisfy `|w|^{1/2} < |z| <= |w|^{-1/2}`. Inputs with
/// `z = 0` or `|w|` outside `(0, 1)` have no such representative and are
/// returned unchanged.
pub fn normalize_a(z: Complex64, w: Complex64) -> (Complex64, i32) {
    if z.norm() == 0.0 || !(w.norm() > 0.0 && w.norm() < 1.0) || !z.norm().is_finite() {
        return (z, 0);
    }
    let half = 0.5 * w.norm().ln();
    let canonical = |r: f64| half < r && r <= -half;
    let log_z = z.norm().ln();
    if canonical(log_z) {
        return (z, 0);
    }
    // log|z w^n| = log|z| + 2 n half lies in (half, -half] for n = ceil(...) - 1,
    // up to rounding; the neighbours cover the boundary cases.
    let n = ((log_z - half) / (-2.0 * half)).ceil() as i32 - 1;
    let violation = |r: f64| (half - r).max(r + half).max(0.0);
    let mut best = (z, 0, f64::INFINITY);
    for m in [n, n - 1, n + 1] {
        let candidate = z * w.powi(m);
        let r = candidate.norm().ln();
        if canonical(r) {
            return (candidate, m);
        }
        if violation(r) < best.2 {
            best = (candidate, m, violation(r));
        }
    }
    (best.0, best.1)
}

struct ZQuotient;

impl ChartQuotient for ZQuotient {
    fn name(&self) -> &str {
        "z ~ z*w^n"
    }

    fn normalize(&self, coords: &[Complex64]) -> Vec<Complex64> {
        let mut out = coords.to_vec();
        out[0] = normalize_a(coords[0], coords[1]).0;
        out
    }

    fn act(&self, coords: &[Complex64], n: i32) -> Vec<Complex64> {
        let mut out = coords.to_vec();
        out[0] = coords[0] * coords[1].powi(n);
        out
    }
}

/// Shared `Z`-quotient of chart `A`, acting on the first coordinate through
/// the second. Extra coordinates are left alone.
pub fn chart_a_quotient() -> Arc<dyn ChartQuotient> {
    Arc::new(ZQuotient)
}

/// `E(rho1, rho2)` for a fixed parameter triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface {
    params: Params,
}

impl Default for Surface {
    fn default() -> Self {
        Self::new(Params::default())
    }
}

impl Surface {
    pub fn new(params: Params) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    fn in_gluing_annulus(&self, w: Complex64) -> bool {
        let r = w.norm();
        self.params.rho0 < r && r < self.params.rho1
    }

    fn in_fiber_annulus(&self, z: Complex64) -> bool {
        let r = z.norm();
        1.0 < r && r < self.params.rho2
    }

    /// The multivalued function `phi` on `Delta(rho0, rho1)`, on a chosen sheet.
    pub fn phi(&self, w: Complex64, branch: LogBranch) -> Result<Complex64, SurfaceError> {
        if !self.in_gluing_annulus(w) {
            return Err(SurfaceError::OutsideAnnulus(w.norm()));
        }
        Ok(phi_unchecked(w, branch))
    }

    /// `pi o Phi`: `(z, w) -> [(z phi(w), w)]`, as a canonical chart-`A` point.
    pub fn big_phi(&self, z: Complex64, w: Complex64, branch: LogBranch) -> Result<EPoint, SurfaceError> {
        if !self.in_fiber_annulus(z) || !self.in_gluing_annulus(w) {
            return Err(SurfaceError::OutsideDomain { z, w });
        }
        let (z, _) = normalize_a(z * phi_unchecked(w, branch), w);
        Ok(EPoint::A { z, w })
    }

    /// Inverse of the gluing: a chart-`A` point of `V1` to chart `B`, with the
    /// sheet of `log` that realises it. Any representative of the orbit may
    /// be passed.
    pub fn transit_a_to_b(&self, z: Complex64, w: Complex64) -> Result<(EPoint, LogBranch), SurfaceError> {
        if !self.in_gluing_annulus(w) || z.norm() == 0.0 {
            return Err(SurfaceError::NotInV1);
        }
        let (z, _) = normalize_a(z, w);
        let base = phi_unchecked(w, LogBranch::PRINCIPAL);
        let mut found = None;
        let mut admissible = 0;
        for b in BRANCH_SEARCH {
            // phi on sheet b equals w^b phi on the principal sheet
            let u = z / (base * w.powi(b));
            if self.in_fiber_annulus(u) {
                admissible += 1;
                found = Some((u, LogBranch(b)));
            }
        }
        match (admissible, found) {
            (1, Some((u, b))) => Ok((EPoint::B { z: u, s: w.inv() }, b)),
            (0, _) => Err(SurfaceError::NotInV1),
            (k, _) => Err(SurfaceError::AmbiguousBranch(k)),
        }
    }

    /// The gluing on `V2`: chart `B` to a canonical chart-`A` point.
    pub fn transit_b_to_a(&self, z: Complex64, s: Complex64) -> Result<EPoint, SurfaceError> {
        if s.norm() == 0.0 {
            return Err(SurfaceError::OutsideDomain { z, w: s });
        }
        self.big_phi(z, s.inv(), LogBranch::PRINCIPAL)
    }

    /// Check that `p` satisfies its chart's domain (and, for chart `A`, the
    /// canonical-representative condition).
    pub fn validate(&self, p: &EPoint) -> Result<(), SurfaceError> {
        let invalid = |chart, reason: &str| SurfaceError::InvalidPoint {
            chart,
            reason: reason.to_string(),
        };
        match *p {
            EPoint::A { z, w } => {
                if z.norm() == 0.0 {
                    return Err(invalid(CHART_A, "z = 0"));
                }
                if !(w.norm() > 0.0 && w.norm() < self.params.rho1) {
                    return Err(invalid(CHART_A, "need 0 < |w| < rho1"));
                }
                if normalize_a(z, w).1 != 0 {
                    return Err(invalid(CHART_A, "z is not the canonical representative"));
                }
            }
            EPoint::B { z, s } => {
                if !self.in_fiber_annulus(z) {
                    return Err(invalid(CHART_B, "need 1 < |z| < rho2"));
                }
                if s.norm() >= 1.0 / self.params.rho0 {
                    return Err(invalid(CHART_B, "need |s| < 1/rho0"));
                }
            }
            EPoint::N { x, y } => {
                let eps = self.params.node_radius();
                if x.norm() >= eps || y.norm() >= eps {
                    return Err(invalid(CHART_N, "need |x|, |y| < eps"));
                }
            }
        }
        Ok(())
    }

    /// The fibration `f : E -> CP^1`.
    pub fn fibration_f(&self, p: &EPoint) -> BasePoint {
        match *p {
            EPoint::A { w, .. } => BasePoint::W(w),
            EPoint::B { s, .. } => BasePoint::S(s),
            EPoint::N { x, y } => BasePoint::W(x * y),
        }
    }

    /// Type of the fiber of `f` over `base`.
    pub fn fiber_class(&self, base: BasePoint) -> FiberClass {
        let rho1 = self.params.rho1;
        match base {
            BasePoint::W(w) if w.norm() == 0.0 => FiberClass::Nodal,
            BasePoint::W(w) if w.norm() < rho1 => FiberClass::Elliptic { q: w },
            BasePoint::W(w) => FiberClass::Annulus { s: w.inv() },
            BasePoint::S(s) if s.norm() > 1.0 / rho1 => FiberClass::Elliptic { q: s.inv() },
            BasePoint::S(s) => FiberClass::Annulus { s },
        }
    }

    /// Chart `B` to chart `A` without normalization: `(z, s) -> (z phi(1/s), 1/s)`
    /// on the principal sheet.
    pub fn b_to_a_raw(&self, coords: &[Complex64]) -> Option<Vec<Complex64>> {
        let (z, s) = (coords[0], coords[1]);
        if s.norm() == 0.0 {
            return None;
        }
        let w = s.inv();
        Some(vec![z * phi_unchecked(w, LogBranch::PRINCIPAL), w])
    }

    /// Chart `A` to chart `B`; `None` off `V1`.
    pub fn a_to_b_raw(&self, coords: &[Complex64]) -> Option<Vec<Complex64>> {
        match self.transit_a_to_b(coords[0], coords[1]) {
            Ok((EPoint::B { z, s }, _)) => Some(vec![z, s]),
            _ => None,
        }
    }

    /// Chart `N` to chart `A`: `(x, y) -> (x, x y)`.
    pub fn n_to_a_raw(&self, coords: &[Complex64]) -> Option<Vec<Complex64>> {
        let (x, y) = (coords[0], coords[1]);
        if x.norm() == 0.0 || y.norm() == 0.0 {
            return None;
        }
        Some(vec![x, x * y])
    }

    /// Chart `A` to chart `N`: picks the representative `z` with
    /// `|w|/eps < |z| < eps`, then `(x, y) = (z, w/z)`.
    pub fn a_to_n_raw(&self, coords: &[Complex64]) -> Option<Vec<Complex64>> {
        let (z, w) = (coords[0], coords[1]);
        if z.norm() == 0.0 || w.norm() == 0.0 || w.norm() >= 1.0 {
            return None;
        }
        let eps = self.params.node_radius();
        let (z, _) = normalize_a(z, w);
        (-2..=2)
            .map(|n| z * w.powi(n))
            .find(|x| x.norm() < eps && (w / x).norm() < eps)
            .map(|x| vec![x, w / x])
    }

    /// Charts `A`, `B`, `N` with transitions `B -> A` (the gluing) and `N -> A`.
    pub fn atlas(&self) -> AtlasDescription {
        let p = self.params;
        let eps = p.node_radius();
        let chart_a = Chart::new(
            CHART_A,
            PolyDomain::new(vec![
                RadialConstraint::PuncturedPlane,
                RadialConstraint::Annulus { inner: 0.0, outer: p.rho1 },
            ]),
        )
        .with_quotient(chart_a_quotient());
        let chart_b = Chart::new(
            CHART_B,
            PolyDomain::new(vec![
                RadialConstraint::Annulus { inner: 1.0, outer: p.rho2 },
                RadialConstraint::Disk { radius: 1.0 / p.rho0 },
            ]),
        );
        let chart_n = Chart::new(
            CHART_N,
            PolyDomain::new(vec![RadialConstraint::Disk { radius: eps }, RadialConstraint::Disk { radius: eps }]),
        );
        AtlasDescription::new(vec![chart_a, chart_b, chart_n], self.transitions())
            .expect("surface atlas charts are consistent")
    }

    pub(crate) fn transitions(&self) -> Vec<Transition> {
        let p = self.params;
        let eps = p.node_radius();
        let surface = *self;
        let b_to_a: CoordMap = Arc::new(move |c: &[Complex64]| surface.b_to_a_raw(c));
        let a_to_b: CoordMap = Arc::new(move |c: &[Complex64]| surface.a_to_b_raw(c));
        let n_to_a: CoordMap = Arc::new(move |c: &[Complex64]| surface.n_to_a_raw(c));
        let a_to_n: CoordMap = Arc::new(move |c: &[Complex64]| surface.a_to_n_raw(c));
        vec![
            Transition {
                name: "B->A".into(),
                from: CHART_B.into(),
                to: CHART_A.into(),
                overlap: PolyDomain::new(vec![
                    RadialConstraint::Annulus { inner: 1.0, outer: p.rho2 },
                    RadialConstraint::Annulus {
                        inner: 1.0 / p.rho1,
                        outer: 1.0 / p.rho0,
                    },
                ]),
                forward: b_to_a,
                backward: a_to_b,
            },
            Transition {
                name: "N->A".into(),
                from: CHART_N.into(),
                to: CHART_A.into(),
                overlap: PolyDomain::new(vec![
                    RadialConstraint::Annulus { inner: 0.0, outer: eps },
                    RadialConstraint::Annulus { inner: 0.0, outer: eps },
                ]),
                forward: n_to_a,
                backward: a_to_n,
            },
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{verify_atlas, AtlasTolerances, GridDensity, PointRep};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_chain_is_enforced() {
        assert!(Params::new(0.2, 0.5, 1.6).is_ok());
        assert!(Params::new(0.2, 0.5, 2.5).is_err());
        assert!(Params::new(0.5, 0.2, 1.6).is_err());
        assert!(Params::new(0.2, 0.5, 0.9).is_err());
        assert!(Params::new(0.0, 0.5, 1.6).is_err());
        assert!(Params::new(0.2, 1.2, 1.1).is_err());
    }

    #[test]
    fn phi_at_quarter() {
        // exponent (ln 4)/2 - i (ln 4)^2 / (4 pi)
        let l: f64 = 4f64.ln();
        let oracle = Complex64::new(l / 2.0, -l * l / (4.0 * PI)).exp();
        let v = Surface::default().phi(c(0.25, 0.0), LogBranch(0)).unwrap();
        assert!((v - oracle).norm() < 1e-14);
        assert!((v - c(1.9767, -0.3047)).norm() < 1e-4);
    }

    #[test]
    fn phi_monodromy_ratio() {
        let s = Surface::default();
        let ratio = s.phi(c(0.4, 0.0), LogBranch(1)).unwrap() / s.phi(c(0.4, 0.0), LogBranch(0)).unwrap();
        assert!((ratio - c(0.4, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phi_outside_annulus() {
        let s = Surface::default();
        assert_eq!(s.phi(c(0.1, 0.0), LogBranch(0)), Err(SurfaceError::OutsideAnnulus(0.1)));
        assert!(s.phi(c(0.0, 0.5), LogBranch(0)).is_err());
    }

    #[test]
    fn normalize_examples() {
        let (z, n) = normalize_a(c(4.0, 0.0), c(0.5, 0.0));
        assert_eq!(n, 2);
        assert!((z - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(normalize_a(c(1.0, 0.0), c(0.3, 0.0)), (c(1.0, 0.0), 0));
    }

    #[test]
    fn normalize_boundary_is_upper_inclusive() {
        let w = c(0.25, 0.0);
        // |z| = |w|^{-1/2} = 2 is canonical, |z| = |w|^{1/2} = 0.5 is not.
        assert_eq!(normalize_a(c(2.0, 0.0), w).1, 0);
        let (z, n) = normalize_a(c(0.5, 0.0), w);
        assert_eq!(n, -1);
        assert!((z - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn big_phi_example() {
        let s = Surface::default();
        let p = s.big_phi(c(1.2, 0.0), c(0.25, 0.0), LogBranch(0)).unwrap();
        let EPoint::A { z, w } = p else { panic!() };
        assert!((z - c(0.5930, -0.0914)).norm() < 1e-4, "{z}");
        assert_eq!(w, c(0.25, 0.0));
        let q = s.big_phi(c(1.2, 0.0), c(0.25, 0.0), LogBranch(1)).unwrap();
        let EPoint::A { z: z1, .. } = q else { panic!() };
        assert!((z - z1).norm() < 1e-12);
    }

    #[test]
    fn big_phi_domain() {
        let s = Surface::default();
        assert!(matches!(
            s.big_phi(c(0.9, 0.0), c(0.3, 0.0), LogBranch(0)),
            Err(SurfaceError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn transit_round_trip_example() {
        let s = Surface::default();
        let EPoint::A { z, w } = s.transit_b_to_a(c(1.2, 0.0), c(4.0, 0.0)).unwrap() else { panic!() };
        let (b, _) = s.transit_a_to_b(z, w).unwrap();
        let EPoint::B { z: zb, s: sb } = b else { panic!() };
        assert!((zb - c(1.2, 0.0)).norm() < 1e-10);
        assert!((sb - c(4.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn transit_outside_gluing_region() {
        let s = Surface::default();
        assert_eq!(s.transit_a_to_b(c(1.0, 0.0), c(0.6, 0.0)), Err(SurfaceError::NotInV1));
        assert_eq!(s.transit_a_to_b(c(1.0, 0.0), c(0.1, 0.0)), Err(SurfaceError::NotInV1));
    }

    #[test]
    fn fibration_examples() {
        let s = Surface::default();
        assert_eq!(s.fibration_f(&EPoint::A { z: c(1.0, 0.0), w: c(0.3, 0.0) }), BasePoint::W(c(0.3, 0.0)));
        let BasePoint::W(w) = s.fibration_f(&EPoint::N { x: c(0.1, 0.0), y: c(0.2, 0.0) }) else { panic!() };
        assert!((w - c(0.02, 0.0)).norm() < 1e-17);
    }

    #[test]
    fn fiber_class_examples() {
        let s = Surface::default();
        assert_eq!(s.fiber_class(BasePoint::W(c(0.3, 0.0))), FiberClass::Elliptic { q: c(0.3, 0.0) });
        assert_eq!(s.fiber_class(BasePoint::W(c(0.0, 0.0))), FiberClass::Nodal);
        assert_eq!(s.fiber_class(BasePoint::S(c(0.5, 0.0))), FiberClass::Annulus { s: c(0.5, 0.0) });
        assert_eq!(s.fiber_class(BasePoint::S(c(4.0, 0.0))), FiberClass::Elliptic { q: c(0.25, 0.0) });
        assert_eq!(s.fiber_class(BasePoint::S(c(2.0, 0.0))), FiberClass::Annulus { s: c(2.0, 0.0) });
    }

    #[test]
    fn node_chart_round_trip() {
        let s = Surface::default();
        let a = s.n_to_a_raw(&[c(0.1, 0.05), c(-0.2, 0.1)]).unwrap();
        let n = s.a_to_n_raw(&a).unwrap();
        assert!((n[0] - c(0.1, 0.05)).norm() < 1e-15);
        assert!((n[1] - c(-0.2, 0.1)).norm() < 1e-15);
        // A point of A with |w| > eps^2 is not near the node.
        assert_eq!(s.a_to_n_raw(&[c(1.0, 0.0), c(0.3, 0.0)]), None);
    }

    #[test]
    fn atlas_transit_b_to_a_example() {
        let atlas = Surface::default().atlas();
        let p = atlas.transit(&PointRep::new(CHART_B, vec![c(1.2, 0.0), c(4.0, 0.0)]), CHART_A).unwrap();
        assert!((p.coords[0] - c(0.5930, -0.0914)).norm() < 1e-4);
        assert!((p.coords[1] - c(0.25, 0.0)).norm() < 1e-15);
        let back = atlas.transit(&p, CHART_B).unwrap();
        assert!((back.coords[0] - c(1.2, 0.0)).norm() < 1e-10);
        assert!((back.coords[1] - c(4.0, 0.0)).norm() < 1e-10);

        let far = PointRep::new(CHART_B, vec![c(1.2, 0.0), c(1.0, 0.0)]);
        assert!(atlas.transit(&far, CHART_A).is_err());
    }

    #[test]
    fn default_atlas_verifies() {
        let report = verify_atlas(&Surface::default().atlas(), &GridDensity::default(), &AtlasTolerances::default());
        assert!(report.passed, "{report:#?}");
        assert_eq!(report.transitions[0].points, 65_536);
        assert!(report.cocycles.is_empty());
    }
}
