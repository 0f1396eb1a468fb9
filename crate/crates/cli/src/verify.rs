//! The full verification suite behind `nonkahler verify`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use nonkahler::atlas::{verify_atlas, AtlasTolerances, GridDensity};
use nonkahler::bundles::{
    canonical_divisor_check, chern_number, pullback_to_e, section_space_dim, splitting_analysis_auto,
    triviality_check, BundleError, Cocycle, SectionSpaceProblem, SplittingType,
};
use nonkahler::holo::LogBranch;
use nonkahler::surface::{j_invariant, phi_unchecked, CanonicalForm, EPoint, Params, Surface, CHART_A, DEFAULT_J_TERMS};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::CliError;

/// Random points drawn for each sampled check.
pub const SAMPLE_POINTS: usize = 100;
/// Seeded random cases for the splitting-type round trip.
pub const SPLITTING_CASES: usize = 20;
/// Finite-difference step for the `sigma` transition check.
pub const SIGMA_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub threshold: f64,
    /// The mathematical statement this check certifies.
    pub anchor: String,
}

impl Check {
    fn at_most(name: &str, measured: f64, threshold: f64, anchor: &str) -> Self {
        let ok = measured <= threshold;
        Self::new(name, ok, measured, threshold, anchor)
    }

    fn new(name: &str, ok: bool, measured: f64, threshold: f64, anchor: &str) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            threshold,
            anchor: anchor.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub params: crate::config::Radii,
    pub seed: u64,
    pub status: Status,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Uniform point of `Delta(1, rho2) x Delta(rho0, rho1)`, kept a little away
/// from the boundary circles.
pub fn gluing_point(rng: &mut ChaCha8Rng, p: &Params) -> (Complex64, Complex64) {
    let t = |rng: &mut ChaCha8Rng| rng.random_range(0.02..0.98);
    let z = Complex64::from_polar(1.0 + (p.rho2() - 1.0) * t(rng), rng.random_range(0.0..TAU));
    let w = Complex64::from_polar(p.rho0() + (p.rho1() - p.rho0()) * t(rng), rng.random_range(0.0..TAU));
    (z, w)
}

/// Random invertible constant frame, diagonally shifted to stay well
/// conditioned.
pub fn random_frame(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let mut p = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    for i in 0..n {
        p[(i, i)] += Complex64::new(2.0, 0.0);
    }
    p
}

/// Seeded random splitting cases: rank at most 4, degrees in `-3..=3`.
pub fn splitting_cases(seed: u64, count: usize) -> Vec<(Vec<i32>, DMatrix<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=4usize);
            let k = (0..n).map(|_| rng.random_range(-3..=3)).collect();
            (k, random_frame(&mut rng, n))
        })
        .collect()
}

pub fn euler_cocycle() -> Cocycle {
    Cocycle::new(2, "euler", |w: Complex64| {
        DMatrix::from_row_slice(
            2,
            2,
            &[w.inv(), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), w],
        )
    })
    .expect("rank 2")
}

fn a_coords(p: EPoint) -> (Complex64, Complex64) {
    match p {
        EPoint::A { z, w } => (z, w),
        _ => unreachable!("the gluing lands in chart A"),
    }
}

pub fn run(config: &Config) -> Result<VerificationReport, CliError> {
    let params = config.surface_params()?;
    let surface = Surface::new(params);
    let sigma = CanonicalForm::with_fault(surface, config.inject_sigma_fault);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();

    // atlas of E
    let atlas_tol = AtlasTolerances {
        holomorphy: config.tolerances.holomorphy,
        roundtrip: config.tolerances.roundtrip,
        ..AtlasTolerances::default()
    };
    let report = verify_atlas(&surface.atlas(), &GridDensity::default(), &atlas_tol);
    let failures: usize = report.transitions.iter().map(|t| t.evaluation_failures).sum();
    checks.push(Check::at_most(
        "atlas_holomorphy",
        if failures > 0 { f64::INFINITY } else { report.max_cr() },
        atlas_tol.holomorphy,
        "the gluing and node transitions are holomorphic in both directions",
    ));
    checks.push(Check::at_most(
        "atlas_roundtrip",
        report.max_roundtrip(),
        atlas_tol.roundtrip,
        "the transitions are mutually inverse biholomorphisms on their overlaps",
    ));

    // monodromy and single-valuedness of the gluing
    let points: Vec<(Complex64, Complex64)> = (0..SAMPLE_POINTS).map(|_| gluing_point(&mut rng, &params)).collect();
    let mut monodromy: f64 = 0.0;
    let mut branch_spread: f64 = 0.0;
    let chart_a = surface.atlas();
    let chart_a = chart_a.chart(CHART_A).map_err(|e| CliError::Computation(e.to_string()))?;
    for &(z, w) in &points {
        let (z0, w0) = a_coords(surface.big_phi(z, w, LogBranch(0)).map_err(CliError::computation)?);
        for b in -3..=3 {
            let lower = phi_unchecked(w, LogBranch(b));
            let upper = phi_unchecked(w, LogBranch(b + 1));
            monodromy = monodromy.max((upper - w * lower).norm() / (w * lower).norm());
            let (zb, wb) = a_coords(surface.big_phi(z, w, LogBranch(b)).map_err(CliError::computation)?);
            branch_spread = branch_spread.max(chart_a.distance(&[zb, wb], &[z0, w0]));
        }
    }
    checks.push(Check::at_most(
        "phi_monodromy",
        monodromy,
        1e-12,
        "continuing phi once around w = 0 multiplies it by w",
    ));
    checks.push(Check::at_most(
        "big_phi_branch_independence",
        branch_spread,
        1e-12,
        "the gluing map is single-valued on the quotient",
    ));

    // the canonical form
    let mut coherence: f64 = 0.0;
    for &(z, w) in &points {
        let (za, wa) = a_coords(surface.big_phi(z, w, LogBranch(0)).map_err(CliError::computation)?);
        coherence = coherence.max(sigma.transition_residual(za, wa, SIGMA_STEP).map_err(CliError::computation)?);
    }
    checks.push(Check::at_most(
        "sigma_transition",
        coherence,
        config.tolerances.holomorphy,
        "dz ^ dw / z in chart A agrees with -(dz/z) ^ ds/s^2 in chart B",
    ));
    let eps = params.node_radius();
    let node = sigma
        .node_chain_rule(Complex64::new(0.5 * eps, 0.0), Complex64::new(0.25 * eps, 0.1 * eps), SIGMA_STEP)
        .map_err(CliError::computation)?;
    checks.push(Check::at_most(
        "sigma_node_extension",
        (node - sigma.coefficient_n(Complex64::default(), Complex64::default())).norm(),
        1e-10,
        "sigma extends across the node with coefficient 1 in (x, y)",
    ));
    let mut order_deviation: f64 = 0.0;
    for t in [1.0 / 3.0, 5.0 / 6.0] {
        let z0 = Complex64::new(1.0 + (params.rho2() - 1.0) * t, 0.0);
        for r in [0.1, 0.5, 0.9] {
            let turns = sigma.polar_winding(z0, r).map_err(CliError::computation)?;
            order_deviation = order_deviation.max((turns + 2.0).abs());
        }
    }
    checks.push(Check::at_most(
        "sigma_polar_order",
        order_deviation,
        0.1,
        "sigma has a pole of order exactly 2 along the fiber s = 0",
    ));
    let divisor = match canonical_divisor_check(params, config.inject_sigma_fault) {
        Ok(order) => order as f64,
        Err(BundleError::Mismatch { sigma_order, .. }) => sigma_order as f64,
        Err(e) => return Err(CliError::computation(e)),
    };
    checks.push(Check::new(
        "canonical_bundle",
        divisor == -2.0,
        divisor,
        -2.0,
        "the canonical bundle is the pullback of O(-2)",
    ));

    // line bundles on the base
    let settings = config.solver_settings();
    let problem = |c: Cocycle| SectionSpaceProblem::new(c, settings).map_err(CliError::computation);
    let mut chern_misses = 0;
    let mut trivial_misses = 0;
    for k in -6..=6 {
        if chern_number(&Cocycle::o_k(k), settings.radius).map_err(CliError::computation)? != k as i64 {
            chern_misses += 1;
        }
        if triviality_check(&problem(Cocycle::o_k(k))?).map_err(CliError::computation)? != (k == 0) {
            trivial_misses += 1;
        }
    }
    checks.push(Check::at_most(
        "chern_sweep",
        chern_misses as f64,
        0.0,
        "O(k) has first Chern number k",
    ));
    checks.push(Check::at_most(
        "triviality_sweep",
        trivial_misses as f64,
        0.0,
        "the pullback of O(k) is trivial if and only if k = 0",
    ));
    let mut h0_misses = 0;
    for k in -4..=6 {
        match section_space_dim(&problem(Cocycle::o_k(k))?) {
            Ok(h) if h == (k + 1).max(0) as usize => {}
            _ => h0_misses += 1,
        }
    }
    checks.push(Check::at_most(
        "h0_sweep",
        h0_misses as f64,
        0.0,
        "O(k) has k + 1 independent sections for k >= -1 and none below",
    ));

    // splitting types
    let mut splitting_misses = 0;
    for (k, frame) in splitting_cases(config.seed, SPLITTING_CASES) {
        let cocycle = Cocycle::diagonal(&k).conjugated(&frame).map_err(CliError::computation)?;
        let expected = SplittingType::from_degrees(k);
        match splitting_analysis_auto(&problem(cocycle)?) {
            Ok(a) if a.splitting_type == expected && a.det_winding == expected.degree() => {}
            _ => splitting_misses += 1,
        }
    }
    match splitting_analysis_auto(&problem(euler_cocycle())?) {
        Ok(a) if a.splitting_type.degrees() == [0, 0] => {}
        _ => splitting_misses += 1,
    }
    checks.push(Check::at_most(
        "splitting_roundtrip",
        splitting_misses as f64,
        0.0,
        "a bundle on CP^1 is determined by its sorted splitting degrees",
    ));

    // total space of a pulled-back rank-2 bundle
    let total = pullback_to_e(&[-1, 3], params).map_err(CliError::computation)?;
    let square = total.commuting_square(SAMPLE_POINTS).map_err(CliError::computation)?;
    checks.push(Check::at_most(
        "pullback_square",
        square.max_residual,
        1e-10,
        "f o pi equals xi o f~ on the total space of the pulled-back bundle",
    ));
    let total_report = verify_atlas(total.atlas(), &GridDensity::default(), &atlas_tol);
    checks.push(Check::new(
        "total_space_atlas",
        total_report.passed,
        total_report.max_cr(),
        atlas_tol.holomorphy,
        "the total space is a complex manifold with linear fiber transitions",
    ));

    // elliptic fibers
    let square_lattice = j_invariant(Complex64::new((-2.0 * PI).exp(), 0.0), DEFAULT_J_TERMS).map_err(CliError::computation)?;
    checks.push(Check::at_most(
        "j_square_lattice",
        (square_lattice - 1728.0).norm() / 1728.0,
        1e-6,
        "the fiber with nome e^{-2 pi} is the square torus, j = 1728",
    ));
    let q = 1e-6;
    let near_node = j_invariant(Complex64::new(q, 0.0), DEFAULT_J_TERMS).map_err(CliError::computation)?;
    checks.push(Check::at_most(
        "j_leading_pole",
        (near_node * q - 1.0).norm(),
        1e-3,
        "j has a simple pole in the nome as fibers degenerate to the nodal curve",
    ));

    let status = if checks.iter().all(Check::passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        params: config.params,
        seed: config.seed,
        status,
        checks,
    })
}
