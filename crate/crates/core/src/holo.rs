//! Numerical complex-analysis kernel.
//!
//! Everything here works on uniformly sampled circles: contour integrals use
//! the trapezoid rule (spectrally accurate for integrands holomorphic on an
//! annulus around the circle), winding numbers come from phase unwrapping,
//! and holomorphy is certified through finite-difference estimates of the
//! Wirtinger derivative d/d(conj z).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use thiserror::Error;

/// Default finite-difference step for [`cr_residual`].
pub const DEFAULT_STEP: f64 = 1e-4;

/// Relative threshold below which a sampled value counts as vanishing.
pub const VANISH_THRESHOLD: f64 = 1e-9;

/// A winding number further than this from the nearest integer is rejected.
const WINDING_ROUNDING_SLACK: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HoloError {
    #[error("circle radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("sample count must be a power of two >= 16, got {0}")]
    InvalidSampleCount(usize),
    #[error("function vanishes on the contour (|g| = {value:e} at sample {index})")]
    VanishesOnPath { index: usize, value: f64 },
    #[error("phase step {step:.3} rad at sample {index} is too coarse; raise the sample count")]
    Resolution { index: usize, step: f64 },
    #[error("winding sum {0} is not close to an integer")]
    NonIntegerWinding(f64),
    #[error("non-finite function value at sample {0}")]
    NonFinite(usize),
    #[error("map could not be evaluated near {0:?}")]
    EvaluationOutsideDomain(Vec<Complex64>),
    #[error("path passes through the origin at vertex {0}")]
    PathThroughZero(usize),
    #[error("argument step {step:.3} rad between vertices {index} and {next} is too coarse", next = .index + 1)]
    StepTooCoarse { index: usize, step: f64 },
    #[error("path is empty")]
    EmptyPath,
}

/// Uniformly sampled circle `center + radius * e^{i theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePath {
    center: Complex64,
    radius: f64,
    samples: usize,
}

impl CirclePath {
    pub fn new(center: Complex64, radius: f64, samples: usize) -> Result<Self, HoloError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(HoloError::InvalidRadius(radius));
        }
        if samples < 16 || !samples.is_power_of_two() {
            return Err(HoloError::InvalidSampleCount(samples));
        }
        Ok(Self {
            center,
            radius,
            samples,
        })
    }

    /// Circle of the given radius around the origin.
    pub fn centered(radius: f64, samples: usize) -> Result<Self, HoloError> {
        Self::new(Complex64::new(0.0, 0.0), radius, samples)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// The k-th node, at angle `2 pi k / samples`.
    pub fn point(&self, k: usize) -> Complex64 {
        self.center + self.offset(k)
    }

    fn offset(&self, k: usize) -> Complex64 {
        Complex64::from_polar(self.radius, TAU * k as f64 / self.samples as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.samples).map(move |k| self.point(k))
    }
}

/// Choice of sheet for the logarithm: `principal log + 2 pi i * branch`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LogBranch(pub i32);

impl LogBranch {
    pub const PRINCIPAL: LogBranch = LogBranch(0);

    pub fn branch(self) -> i32 {
        self.0
    }

    /// Logarithm of `w` on this sheet.
    pub fn log(self, w: Complex64) -> Complex64 {
        w.ln() + Complex64::new(0.0, TAU * self.0 as f64)
    }

    pub fn next(self) -> LogBranch {
        LogBranch(self.0 + 1)
    }
}

/// Degree of `g` around `path`, i.e. `(1 / 2 pi i) \oint d log g`.
///
/// Fails rather than guessing when `g` (nearly) vanishes on the path or when
/// consecutive samples differ in phase by `pi/2` or more.
pub fn winding_number<F>(g: F, path: &CirclePath) -> Result<i64, HoloError>
where
    F: Fn(Complex64) -> Complex64,
{
    let (turns, _) = winding_sum(g, path)?;
    Ok(turns.round() as i64)
}

/// Unrounded winding sum together with its distance to the nearest integer.
pub fn winding_sum<F>(g: F, path: &CirclePath) -> Result<(f64, f64), HoloError>
where
    F: Fn(Complex64) -> Complex64,
{
    let values: Vec<Complex64> = path.points().map(&g).collect();
    if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(HoloError::NonFinite(index));
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let threshold = VANISH_THRESHOLD * scale;
    for (index, v) in values.iter().enumerate() {
        let value = v.norm();
        if value <= threshold || value == 0.0 {
            return Err(HoloError::VanishesOnPath { index, value });
        }
    }

    let mut total = 0.0;
    for index in 0..values.len() {
        let next = values[(index + 1) % values.len()];
        let step = (next / values[index]).arg();
        if step.abs() >= PI / 2.0 {
            return Err(HoloError::Resolution { index, step });
        }
        total += step;
    }
    let turns = total / TAU;
    let distance = (turns - turns.round()).abs();
    if distance > WINDING_ROUNDING_SLACK {
        return Err(HoloError::NonIntegerWinding(turns));
    }
    Ok((turns, distance))
}

/// n-th Laurent coefficient of `g` about the path's center, by the trapezoid rule.
///
/// Exact (up to rounding) for Laurent polynomials whose degrees differ from `n`
/// by less than the sample count.
pub fn laurent_coefficient<F>(g: F, path: &CirclePath, n: i32) -> Result<Complex64, HoloError>
where
    F: Fn(Complex64) -> Complex64,
{
    // (1/2 pi i) \oint g (w-c)^{-n-1} dw = (1/2 pi) \int g (w-c)^{-n} d theta
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..path.samples() {
        let offset = path.offset(k);
        let value = g(path.center() + offset);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(HoloError::NonFinite(k));
        }
        acc += value * offset.powi(-n);
    }
    Ok(acc / path.samples() as f64)
}

fn dbar_stencil<F>(f: &F, p: &[Complex64], var: usize, h: f64) -> Result<Vec<Complex64>, HoloError>
where
    F: Fn(&[Complex64]) -> Option<Vec<Complex64>>,
{
    let directions = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut acc: Vec<Complex64> = Vec::new();
    let mut shifted = p.to_vec();
    for u in directions {
        shifted[var] = p[var] + u * h;
        let value = f(&shifted).ok_or_else(|| HoloError::EvaluationOutsideDomain(p.to_vec()))?;
        if acc.is_empty() {
            acc = vec![Complex64::new(0.0, 0.0); value.len()];
        }
        // (d/dx + i d/dy)/2 by central differences: weights u/(4h).
        for (a, v) in acc.iter_mut().zip(value) {
            *a += u * v;
        }
    }
    Ok(acc.into_iter().map(|a| a / (4.0 * h)).collect())
}

/// Largest Wirtinger derivative `|d F_j / d conj(p_i)|` at `p`.
///
/// Central differences in the real and imaginary directions with step `h`,
/// Richardson-extrapolated against step `2h`. For holomorphic `F` the plain
/// stencil carries an error of `h^2 F'''/6`; the extrapolation removes it and
/// leaves an `O(h^6)` remainder, so thin annuli near the origin do not need a
/// smaller step. Returns `EvaluationOutsideDomain` when `F` returns `None`
/// anywhere on the stencil (which reaches `2h` from `p`).
pub fn cr_residual<F>(f: F, p: &[Complex64], h: f64) -> Result<f64, HoloError>
where
    F: Fn(&[Complex64]) -> Option<Vec<Complex64>>,
{
    let mut worst: f64 = 0.0;
    for var in 0..p.len() {
        let fine = dbar_stencil(&f, p, var, h)?;
        let coarse = dbar_stencil(&f, p, var, 2.0 * h)?;
        for (a, b) in fine.iter().zip(&coarse) {
            let estimate = (4.0 * a - b) / 3.0;
            worst = worst.max(estimate.norm());
        }
    }
    Ok(worst)
}

/// Analytic continuation of the logarithm along a polyline.
///
/// The start value is the logarithm of `path[0]` on the sheet `start`. Returns
/// the sheet reached at the final vertex and the continued value there.
pub fn continue_log(path: &[Complex64], start: LogBranch) -> Result<(LogBranch, Complex64), HoloError> {
    let first = *path.first().ok_or(HoloError::EmptyPath)?;
    if let Some(index) = path.iter().position(|p| p.norm() == 0.0) {
        return Err(HoloError::PathThroughZero(index));
    }
    let mut angle = start.log(first).im;
    for (index, pair) in path.windows(2).enumerate() {
        let step = (pair[1] / pair[0]).arg();
        if step.abs() >= PI / 2.0 {
            return Err(HoloError::StepTooCoarse { index, step });
        }
        angle += step;
    }
    let last = path[path.len() - 1];
    let value = Complex64::new(last.norm().ln(), angle);
    let branch = ((angle - last.arg()) / TAU).round() as i32;
    Ok((LogBranch(branch), value))
}
