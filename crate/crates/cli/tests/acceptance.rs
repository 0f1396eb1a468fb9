//! Acceptance criteria, one test per criterion. Each test writes one
//! `PASS`/`FAIL` line per measured item straight to stderr, so the lines are
//! visible without `--nocapture`.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::sync::Arc;

use nonkahler::atlas::{verify_atlas, AtlasDescription, AtlasTolerances, CoordMap, GridDensity, Transition};
use nonkahler::bundles::{
    canonical_divisor_check, chern_number, pullback_to_e, section_space_dim, splitting_analysis_auto,
    triviality_check, Cocycle, SectionSpaceProblem, SolverSettings, SplittingType,
};
use nonkahler::holo::LogBranch;
use nonkahler::surface::{
    j_invariant, phi_unchecked, CanonicalForm, EPoint, Params, SigmaFault, Surface, CHART_A, DEFAULT_J_TERMS,
};
use nonkahler_cli::commands::{fiber_moduli, Sweep};
use nonkahler_cli::config::Config;
use nonkahler_cli::verify::{euler_cocycle, gluing_point, splitting_cases};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

/// Writes one result line and returns whether it passed.
fn line(criterion: u32, item: &str, ok: bool, detail: String) -> bool {
    let status = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(err, "{status} criterion {criterion:>2} | {item} | {detail}").expect("stderr");
    ok
}

fn all(results: &[bool]) -> bool {
    results.iter().all(|&r| r)
}

fn a_coords(p: EPoint) -> (Complex64, Complex64) {
    match p {
        EPoint::A { z, w } => (z, w),
        other => panic!("expected chart A, got {other:?}"),
    }
}

#[test]
fn criterion_01_monodromy_and_single_valuedness() {
    let surface = Surface::default();
    let atlas = surface.atlas();
    let chart_a = atlas.chart(CHART_A).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let points: Vec<_> = (0..128).map(|_| gluing_point(&mut rng, surface.params())).collect();
    let mut spread: f64 = 0.0;
    let mut monodromy: f64 = 0.0;
    for &(z, w) in &points {
        let reference = a_coords(surface.big_phi(z, w, LogBranch(0)).unwrap());
        for b in -3..=3 {
            let (zb, wb) = a_coords(surface.big_phi(z, w, LogBranch(b)).unwrap());
            spread = spread.max(chart_a.distance(&[zb, wb], &[reference.0, reference.1]));
            let lower = phi_unchecked(w, LogBranch(b));
            let upper = phi_unchecked(w, LogBranch(b + 1));
            monodromy = monodromy.max((upper - w * lower).norm() / (w * lower).norm());
        }
    }
    let ok = all(&[
        line(1, "big_phi branch independence, 128 points x 7 branches", spread <= 1e-12, format!("max {spread:.3e} <= 1e-12")),
        line(1, "phi(w, b+1) = w phi(w, b)", monodromy <= 1e-12, format!("max rel {monodromy:.3e} <= 1e-12")),
    ]);
    assert!(ok);
}

/// The surface atlas with the `z` output of the gluing conjugated.
fn conjugated_gluing(surface: &Surface) -> AtlasDescription {
    let atlas = surface.atlas();
    let transitions: Vec<Transition> = atlas
        .transitions()
        .iter()
        .map(|t| {
            let mut t = t.clone();
            if t.name == "B->A" {
                let forward = t.forward.clone();
                let corrupted: CoordMap = Arc::new(move |c: &[Complex64]| {
                    let mut out = forward(c)?;
                    out[0] = out[0].conj();
                    Some(out)
                });
                t.forward = corrupted;
            }
            t
        })
        .collect();
    AtlasDescription::new(atlas.charts().to_vec(), transitions).unwrap()
}

#[test]
fn criterion_02_atlas_holomorphy() {
    let surface = Surface::default();
    let density = GridDensity::default();
    let tol = AtlasTolerances::default();
    let report = verify_atlas(&surface.atlas(), &density, &tol);
    let points: usize = report.transitions.iter().map(|t| t.points).sum();
    let faulty = verify_atlas(&conjugated_gluing(&surface), &density, &tol);
    let fault_cr = faulty.transitions.iter().map(|t| t.max_cr_forward).fold(0.0, f64::max);
    let ok = all(&[
        line(2, "verify_atlas passes", report.passed, format!("{points} points, h = {}", tol.step)),
        line(2, "max CR residual", report.max_cr() <= 1e-8, format!("{:.3e} <= 1e-8", report.max_cr())),
        line(2, "max round-trip error", report.max_roundtrip() <= 1e-10, format!("{:.3e} <= 1e-10", report.max_roundtrip())),
        line(
            2,
            "conjugated gluing is rejected",
            !faulty.passed && fault_cr >= 0.1,
            format!("residual {fault_cr:.3e} >= 0.1"),
        ),
    ]);
    assert!(ok);
}

#[test]
fn criterion_03_canonical_form() {
    let surface = Surface::default();
    let sigma = CanonicalForm::new(surface);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (z, w) = gluing_point(&mut rng, surface.params());
        let (za, wa) = a_coords(surface.big_phi(z, w, LogBranch(0)).unwrap());
        worst = worst.max(sigma.transition_residual(za, wa, 1e-5).unwrap());
    }
    let exact = sigma.coefficient_n(Complex64::new(0.1, 0.0), Complex64::new(0.05, 0.0));
    let eps = surface.params().node_radius();
    let mut chain: f64 = 0.0;
    for (x, y) in [(0.1, 0.05), (0.5 * eps, -0.3 * eps), (0.2 * eps, 0.9 * eps)] {
        let v = sigma
            .node_chain_rule(Complex64::new(x, 0.1 * x), Complex64::new(y, 0.0), 1e-5)
            .unwrap();
        chain = chain.max((v - 1.0).norm());
    }
    let ok = all(&[
        line(3, "sigma transition check, 100 overlap points", worst <= 1e-8, format!("max {worst:.3e} <= 1e-8")),
        line(3, "chart N coefficient", exact == Complex64::new(1.0, 0.0), format!("{exact}")),
        line(3, "chain-rule value in chart N", chain <= 1e-10, format!("|c - 1| = {chain:.3e} <= 1e-10")),
    ]);
    assert!(ok);
}

#[test]
fn criterion_04_polar_order() {
    let sigma = CanonicalForm::new(Surface::default());
    let mut results = Vec::new();
    for z0 in [1.2, 1.5] {
        for r in [0.1, 0.5, 0.9] {
            let turns = sigma.polar_winding(Complex64::new(z0, 0.0), r).unwrap();
            let order = sigma.polar_order(Complex64::new(z0, 0.0), r).unwrap();
            let deviation = (turns - order as f64).abs();
            results.push(line(
                4,
                &format!("polar order at z0 = {z0}, r = {r}"),
                order == -2 && deviation < 0.1,
                format!("order {order}, unrounded {turns:.6}"),
            ));
        }
    }
    let order = canonical_divisor_check(Params::default(), SigmaFault::None);
    results.push(line(4, "canonical divisor check", order == Ok(-2), format!("{order:?}")));
    assert!(all(&results));
}

fn settings() -> SolverSettings {
    SolverSettings::default()
}

#[test]
fn criterion_05_chern_and_triviality() {
    let mut chern_ok = true;
    let mut trivial_ok = true;
    for k in -6..=6 {
        chern_ok &= chern_number(&Cocycle::o_k(k), settings().radius).unwrap() == k as i64;
        let problem = SectionSpaceProblem::new(Cocycle::o_k(k), settings()).unwrap();
        trivial_ok &= triviality_check(&problem).unwrap() == (k == 0);
    }
    let ok = all(&[
        line(5, "chern_number(O(k)) = k, k in -6..=6", chern_ok, "exact".into()),
        line(5, "triviality_check(O(k)) iff k = 0, k in -6..=6", trivial_ok, "exact".into()),
    ]);
    assert!(ok);
}

#[test]
fn criterion_06_section_counts() {
    let mut results = Vec::new();
    for truncation in [32, 40] {
        for rank_tol in [1e-8, 1e-9, 1e-10] {
            let s = SolverSettings {
                truncation,
                rank_tol,
                ..settings()
            };
            let misses: Vec<i32> = (-4..=6)
                .filter(|&k| {
                    let problem = SectionSpaceProblem::new(Cocycle::o_k(k), s).unwrap();
                    section_space_dim(&problem).ok() != Some((k + 1).max(0) as usize)
                })
                .collect();
            results.push(line(
                6,
                &format!("h0(O(k)) = max(0, k+1), k in -4..=6, N = {truncation}, rank_tol = {rank_tol:e}"),
                misses.is_empty(),
                format!("mismatches {misses:?}"),
            ));
        }
    }
    assert!(all(&results));
}

#[test]
fn criterion_07_splitting_types() {
    let mut results = Vec::new();
    let mut exact = 0;
    let mut sums = 0;
    let cases = splitting_cases(SEED, 20);
    for (k, frame) in &cases {
        let cocycle = Cocycle::diagonal(k).conjugated(frame).unwrap();
        let problem = SectionSpaceProblem::new(cocycle, settings()).unwrap();
        let expected = SplittingType::from_degrees(k.clone());
        match splitting_analysis_auto(&problem) {
            Ok(a) => {
                exact += usize::from(a.splitting_type == expected);
                sums += usize::from(a.splitting_type.degree() == a.det_winding && a.det_winding == expected.degree());
            }
            Err(e) => {
                line(7, &format!("case {k:?}"), false, e.to_string());
            }
        }
    }
    results.push(line(7, "20 seeded conjugated diagonal cocycles", exact == cases.len(), format!("{exact}/20 exact")));
    results.push(line(7, "sum of degrees equals det winding", sums == cases.len(), format!("{sums}/20")));
    let euler = splitting_analysis_auto(&SectionSpaceProblem::new(euler_cocycle(), settings()).unwrap());
    let euler_ok = matches!(&euler, Ok(a) if a.splitting_type.degrees() == [0, 0] && a.det_winding == 0);
    results.push(line(
        7,
        "Euler cocycle [[1/w, 1], [0, w]] splits as (0, 0)",
        euler_ok,
        format!("{:?}", euler.map(|a| a.splitting_type)),
    ));
    assert!(all(&results));
}

#[test]
fn criterion_08_fiber_moduli() {
    let square = j_invariant(Complex64::new((-2.0 * PI).exp(), 0.0), DEFAULT_J_TERMS).unwrap();
    let square_err = (square - 1728.0).norm() / 1728.0;
    let q = 1e-6;
    let pole = (j_invariant(Complex64::new(q, 0.0), DEFAULT_J_TERMS).unwrap() * q - 1.0).norm();
    let rows = fiber_moduli(
        &Config::default(),
        &Sweep::Radial {
            from: 0.05,
            to: 0.45,
            points: 50,
        },
    )
    .unwrap();
    let moduli: Vec<f64> = rows.iter().map(|r| r.j.norm()).collect();
    let increases = moduli.windows(2).filter(|p| p[1] >= p[0]).count();
    let ok = all(&[
        line(8, "j(e^{-2 pi}) = 1728", square_err <= 1e-6, format!("rel err {square_err:.3e} <= 1e-6")),
        line(8, "|q j(q) - 1| at q = 1e-6", pole < 1e-3, format!("{pole:.3e} < 1e-3")),
        line(
            8,
            "|j| strictly decreasing on real w in [0.05, 0.45], 50 points",
            rows.len() == 50 && increases == 0,
            format!(
                "{} rows, {increases} of 49 steps do not decrease; |j| goes from {:.4e} to {:.4e}",
                rows.len(),
                moduli.first().copied().unwrap_or(f64::NAN),
                moduli.last().copied().unwrap_or(f64::NAN)
            ),
        ),
    ]);
    assert!(ok);
}

#[test]
fn criterion_09_pullback_diagram() {
    let total = pullback_to_e(&[-1, 3], Params::default()).unwrap();
    let square = total.commuting_square(100).unwrap();
    let report = verify_atlas(total.atlas(), &GridDensity::default(), &AtlasTolerances::default());
    let winding = total.fiber_det_winding(settings().radius).unwrap();
    let ok = all(&[
        line(
            9,
            "f o pi = xi o f~ on the (-1, 3) total space",
            square.points >= 100 && square.max_residual <= 1e-10,
            format!("{} points, max {:.3e} <= 1e-10", square.points, square.max_residual),
        ),
        line(
            9,
            "verify_atlas on the total space",
            report.passed,
            format!("max CR {:.3e}, round trip {:.3e}", report.max_cr(), report.max_roundtrip()),
        ),
        line(9, "det fiber transition winds 2 times", winding == 2, format!("{winding}")),
    ]);
    assert!(ok);
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let output = Command::new(env!("CARGO_BIN_EXE_nonkahler"))
        .args(args)
        .env_remove("NONKAHLER_CONFIG")
        .output()
        .expect("run nonkahler");
    (output.status.code().unwrap_or(-1), output.stdout)
}

#[test]
fn criterion_10_cli_contract() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"params": {"rho0": 0.2, "rho1": 0.5, "rho2": 2.5}}"#).unwrap();
    let bad = bad.to_str().unwrap();

    let (code, first) = cli(&["verify", "--seed", "42"]);
    let (_, second) = cli(&["verify", "--seed", "42"]);
    let (bad_code, _) = cli(&["--config", bad, "verify"]);
    let (fault_code, _) = cli(&["verify", "--inject-sigma-fault", "simple-pole-in-b"]);
    let moduli = cli(&["fiber-moduli", "--points", "50"]);
    let export = cli(&["atlas-export"]);
    let via_env = Command::new(env!("CARGO_BIN_EXE_nonkahler"))
        .arg("verify")
        .env("NONKAHLER_CONFIG", bad)
        .output()
        .expect("run nonkahler");
    let env_code = via_env.status.code().unwrap_or(-1);
    let identical = first == second && moduli == cli(&["fiber-moduli", "--points", "50"]) && export == cli(&["atlas-export"]);
    let ok = all(&[
        line(10, "verify on the default config exits 0", code == 0, format!("exit {code}")),
        line(10, "rho-chain violation exits 2", bad_code == 2, format!("exit {bad_code}")),
        line(10, "config path from NONKAHLER_CONFIG is honoured", env_code == 2, format!("exit {env_code}")),
        line(10, "sigma corruption hook exits 1", fault_code == 1, format!("exit {fault_code}")),
        line(10, "repeated runs are byte-identical", identical && !first.is_empty(), "verify, fiber-moduli, atlas-export".into()),
    ]);
    assert!(ok);
}
