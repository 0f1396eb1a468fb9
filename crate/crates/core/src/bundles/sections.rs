//! Global holomorphic sections by truncated Taylor matching on a circle, and
//! splitting types recovered from how the section count grows under twists.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cocycle::{chern_number, Cocycle};
use super::BundleError;
use crate::surface::Params;

pub const DEFAULT_TRUNCATION: usize = 32;
pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// The reported dimension must survive this many extra Taylor terms.
pub const TRUNCATION_PROBE: usize = 8;

/// Numerical settings of the section solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Matching circle `|w| = radius`, inside the overlap annulus.
    pub radius: f64,
    /// Highest Taylor degree kept in each chart.
    pub truncation: usize,
    pub samples: usize,
    /// Relative singular-value threshold.
    pub rank_tol: f64,
}

impl SolverSettings {
    /// Defaults, matching on the geometric mean of the overlap radii.
    pub fn for_params(params: &Params) -> Self {
        Self {
            radius: (params.rho0() * params.rho1()).sqrt(),
            truncation: DEFAULT_TRUNCATION,
            samples: DEFAULT_SAMPLES,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    pub fn validate(&self) -> Result<(), BundleError> {
        if self.truncation == 0 {
            return Err(BundleError::InvalidSettings("truncation must be positive".into()));
        }
        if self.samples < 4 * (self.truncation + 1) {
            return Err(BundleError::InvalidSettings(format!(
                "{} samples are too few for truncation {}; need at least {}",
                self.samples,
                self.truncation,
                4 * (self.truncation + 1)
            )));
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return Err(BundleError::InvalidSettings("rank_tol must lie in (0, 1)".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(BundleError::InvalidSettings("radius must be positive".into()));
        }
        Ok(())
    }

    /// The matching circle must lie in the overlap `rho0 < |w| < rho1`.
    pub fn validate_for(&self, params: &Params) -> Result<(), BundleError> {
        self.validate()?;
        if !(params.rho0() < self.radius && self.radius < params.rho1()) {
            return Err(BundleError::InvalidSettings(format!(
                "radius {} is outside the overlap ({}, {})",
                self.radius,
                params.rho0(),
                params.rho1()
            )));
        }
        Ok(())
    }
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self::for_params(&Params::default())
    }
}

#[derive(Debug, Clone)]
pub struct SectionSpaceProblem {
    cocycle: Cocycle,
    settings: SolverSettings,
}

impl SectionSpaceProblem {
    pub fn new(cocycle: Cocycle, settings: SolverSettings) -> Result<Self, BundleError> {
        settings.validate()?;
        Ok(Self { cocycle, settings })
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    /// Same settings, different bundle.
    pub fn with_cocycle(&self, cocycle: Cocycle) -> Self {
        Self {
            cocycle,
            settings: self.settings,
        }
    }
}

/// Transition sampled on the matching circle, stored as the unitary DFT of
/// each entry over the samples: `spectrum[(i, c)][q]`.
struct SampledTransition {
    rank: usize,
    spectrum: Vec<Vec<Complex64>>,
}

impl SampledTransition {
    fn new(cocycle: &Cocycle, settings: &SolverSettings) -> Result<Self, BundleError> {
        let m = settings.samples;
        let rank = cocycle.rank();
        let values: Vec<DMatrix<Complex64>> = (0..m)
            .map(|t| cocycle.eval(Complex64::from_polar(settings.radius, TAU * t as f64 / m as f64)))
            .collect();
        let finite = values.iter().all(|g| g.iter().all(|x| x.re.is_finite() && x.im.is_finite()));
        if !finite {
            return Err(BundleError::SingularTransition {
                radius: settings.radius,
            });
        }
        let twiddle: Vec<Complex64> = (0..m).map(|k| Complex64::from_polar(1.0, -TAU * k as f64 / m as f64)).collect();
        let norm = (m as f64).sqrt().recip();
        let mut spectrum = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for c in 0..rank {
                spectrum.push(
                    (0..m)
                        .map(|q| {
                            let sum: Complex64 = values.iter().enumerate().map(|(t, g)| g[(i, c)] * twiddle[(q * t) % m]).sum();
                            sum * norm
                        })
                        .collect(),
                );
            }
        }
        Ok(Self { rank, spectrum })
    }

    fn samples(&self) -> usize {
        self.spectrum[0].len()
    }
}

/// Singular values, in decreasing order, of the column-normalized matching
/// system `s1(w_t) - G(w_t) s2(1/w_t) = 0` with Taylor degree at most
/// `truncation` in each chart, together with the number of unknowns.
///
/// The rows are taken through a unitary DFT over the samples, which leaves
/// the singular values unchanged: a chart-1 unknown of degree `j` becomes a
/// unit vector at frequency `j`, and a chart-2 unknown of degree `j` becomes
/// the transition spectrum shifted by `j`. Rows of negligible weight are then
/// dropped; their total Frobenius norm stays below `drop_budget`, which bounds
/// the change of every singular value.
fn matching_spectrum(sampled: &SampledTransition, truncation: usize, drop_budget: f64) -> (Vec<f64>, usize) {
    let rank = sampled.rank;
    let m = sampled.samples();
    let terms = truncation + 1;
    let unknowns = 2 * rank * terms;
    let mut a = DMatrix::<Complex64>::zeros(rank * m, unknowns);
    for j in 0..terms {
        for i in 0..rank {
            // chart-1 coefficient of degree j, component i
            a[(i * m + j % m, j * rank + i)] = Complex64::new(1.0, 0.0);
        }
        for c in 0..rank {
            // chart-2 coefficient of degree j, component c; the scale r^{-j}
            // is removed again by the normalization below
            let col = rank * terms + j * rank + c;
            for i in 0..rank {
                let entry = &sampled.spectrum[i * rank + c];
                for f in 0..m {
                    a[(i * m + f, col)] = -entry[(f + j) % m];
                }
            }
            let mut column = a.column_mut(col);
            let norm = column.norm();
            if norm > 0.0 {
                column /= Complex64::new(norm, 0.0);
            }
        }
    }

    let mut weights: Vec<(f64, usize)> = a.row_iter().map(|r| r.norm_squared()).zip(0..).collect();
    weights.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut dropped = 0.0;
    let mut keep = vec![true; a.nrows()];
    for &(w, row) in &weights {
        if dropped + w > drop_budget * drop_budget {
            break;
        }
        dropped += w;
        keep[row] = false;
    }
    let kept: Vec<usize> = (0..a.nrows()).filter(|&r| keep[r]).collect();
    let reduced = a.select_rows(kept.iter());
    let mut values: Vec<f64> = reduced.singular_values().iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    (values, unknowns)
}

fn kernel_dim(spectrum: &(Vec<f64>, usize), rank_tol: f64) -> usize {
    let (values, unknowns) = spectrum;
    let top = values.first().copied().unwrap_or(0.0);
    let numerical_rank = values.iter().filter(|&&v| v > rank_tol * top).count();
    unknowns - numerical_rank
}

/// Dimension of the space of global holomorphic sections.
///
/// Counted as the numerical kernel of the matching system. The count is
/// accepted only when it is the same with `TRUNCATION_PROBE` more Taylor
/// terms and with the threshold scaled by ten either way.
pub fn section_space_dim(problem: &SectionSpaceProblem) -> Result<usize, BundleError> {
    let settings = &problem.settings;
    let sampled = SampledTransition::new(&problem.cocycle, settings)?;
    // singular values are at least 1 at the top (unit columns), so this
    // keeps every perturbation far below the smallest threshold used
    let budget = 1e-3 * settings.rank_tol / 10.0;
    let base = matching_spectrum(&sampled, settings.truncation, budget);
    let extended = matching_spectrum(&sampled, settings.truncation + TRUNCATION_PROBE, budget);
    let dims = [
        kernel_dim(&base, settings.rank_tol),
        kernel_dim(&base, settings.rank_tol * 10.0),
        kernel_dim(&base, settings.rank_tol / 10.0),
        kernel_dim(&extended, settings.rank_tol),
    ];
    if dims.iter().any(|&d| d != dims[0]) {
        return Err(BundleError::RankUnstable { dims: dims.to_vec() });
    }
    Ok(dims[0])
}

/// A line bundle is trivial iff both it and its dual have a section.
pub fn triviality_check(problem: &SectionSpaceProblem) -> Result<bool, BundleError> {
    if problem.cocycle.rank() != 1 {
        return Err(BundleError::RankMismatch {
            expected: 1,
            found: problem.cocycle.rank(),
        });
    }
    if section_space_dim(problem)? == 0 {
        return Ok(false);
    }
    Ok(section_space_dim(&problem.with_cocycle(problem.cocycle.dual()))? >= 1)
}

/// Sorted degrees `k_1 <= ... <= k_n` of `O(k_1) + ... + O(k_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SplittingType(Vec<i32>);

impl SplittingType {
    pub fn from_degrees(mut degrees: Vec<i32>) -> Self {
        degrees.sort_unstable();
        Self(degrees)
    }

    pub fn degrees(&self) -> &[i32] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&k| k as i64).sum()
    }

    /// Closed form of `h0(E(m))` for this splitting.
    pub fn h0_after_twist(&self, m: i32) -> usize {
        self.0.iter().map(|&k| (k + m + 1).max(0) as usize).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub m: i32,
    pub h: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingAnalysis {
    pub splitting_type: SplittingType,
    /// `h0` of each twist by `O(m)` over the range used.
    pub h_profile: Vec<ProfilePoint>,
    pub det_winding: i64,
}

/// Section counts of twists, each computed at most once.
struct TwistCounter<'a> {
    problem: &'a SectionSpaceProblem,
    cache: BTreeMap<i32, usize>,
}

impl<'a> TwistCounter<'a> {
    fn new(problem: &'a SectionSpaceProblem) -> Self {
        Self {
            problem,
            cache: BTreeMap::new(),
        }
    }

    fn h(&mut self, m: i32) -> Result<usize, BundleError> {
        if let Some(&h) = self.cache.get(&m) {
            return Ok(h);
        }
        let twisted = self.problem.with_cocycle(self.problem.cocycle.twisted(m));
        let h = section_space_dim(&twisted)?;
        self.cache.insert(m, h);
        Ok(h)
    }
}

/// Splitting type from the twist profile over `m_range`.
///
/// With `h(m) = h0(E(m))`, the increment `h(m) - h(m-1)` counts the `k_i`
/// with `k_i >= -m`. The range must start where `h` vanishes and end where
/// the increment has reached the rank.
pub fn splitting_analysis(problem: &SectionSpaceProblem, m_range: RangeInclusive<i32>) -> Result<SplittingAnalysis, BundleError> {
    let mut counter = TwistCounter::new(problem);
    analyse(&mut counter, *m_range.start(), *m_range.end())
}

pub fn splitting_type(problem: &SectionSpaceProblem, m_range: RangeInclusive<i32>) -> Result<SplittingType, BundleError> {
    Ok(splitting_analysis(problem, m_range)?.splitting_type)
}

/// Like [`splitting_analysis`], widening the twist range until it brackets
/// every degree. Twists are kept within half the truncation.
pub fn splitting_analysis_auto(problem: &SectionSpaceProblem) -> Result<SplittingAnalysis, BundleError> {
    let limit = (problem.settings.truncation / 2) as i32;
    let rank = problem.cocycle.rank();
    let mut counter = TwistCounter::new(problem);
    let mut low = -1;
    while counter.h(low)? > 0 {
        low -= 1;
        if low < -limit {
            return Err(BundleError::RangeTooNarrow(format!("h0 does not vanish above twist {}", -limit)));
        }
    }
    let mut high = low + 1;
    while counter.h(high)? - counter.h(high - 1)? < rank {
        high += 1;
        if high > limit {
            return Err(BundleError::RangeTooNarrow(format!("increments stay below the rank up to twist {limit}")));
        }
    }
    analyse(&mut counter, low, high)
}

fn analyse(counter: &mut TwistCounter<'_>, low: i32, high: i32) -> Result<SplittingAnalysis, BundleError> {
    if high <= low {
        return Err(BundleError::RangeTooNarrow(format!("empty twist range {low}..={high}")));
    }
    let rank = counter.problem.cocycle.rank();
    let mut h_profile = Vec::new();
    for m in low..=high {
        h_profile.push(ProfilePoint { m, h: counter.h(m)? });
    }
    if h_profile[0].h != 0 {
        return Err(BundleError::RangeTooNarrow(format!("h0 = {} at the lowest twist {low}", h_profile[0].h)));
    }
    let increments: Vec<i64> = h_profile.windows(2).map(|p| p[1].h as i64 - p[0].h as i64).collect();
    let last = *increments.last().expect("range has two points");
    if last != rank as i64 {
        return Err(BundleError::RangeTooNarrow(format!("increment {last} at the top twist {high}, rank is {rank}")));
    }

    let winding = chern_number(&counter.problem.cocycle, counter.problem.settings.radius)?;
    let mut degrees = Vec::with_capacity(rank);
    let mut previous = 0;
    for (offset, &d) in increments.iter().enumerate() {
        if d < previous || d > rank as i64 {
            return Err(BundleError::SumMismatch {
                sum: degrees.iter().map(|&k: &i32| k as i64).sum(),
                winding,
            });
        }
        let m = low + 1 + offset as i32;
        degrees.extend(std::iter::repeat_n(-m, (d - previous) as usize));
        previous = d;
    }
    let splitting_type = SplittingType::from_degrees(degrees);
    if splitting_type.degree() != winding {
        return Err(BundleError::SumMismatch {
            sum: splitting_type.degree(),
            winding,
        });
    }
    Ok(SplittingAnalysis {
        splitting_type,
        h_profile,
        det_winding: winding,
    })
}

/// Whether two tuples of degrees give isomorphic bundles over `CP^1`.
pub fn classify_q(k: &[i32], k_prime: &[i32]) -> Result<bool, BundleError> {
    if k.len() != k_prime.len() {
        return Err(BundleError::LengthMismatch {
            left: k.len(),
            right: k_prime.len(),
        });
    }
    Ok(SplittingType::from_degrees(k.to_vec()) == SplittingType::from_degrees(k_prime.to_vec()))
}
