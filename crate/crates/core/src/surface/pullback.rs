//! Pullback of meromorphic functions on `CP^1` along `f`.

use num_complex::Complex64;

use super::{BasePoint, EPoint, Surface, SurfaceError};

/// Values below this (relative to the coefficient scale) count as zero when
/// deciding whether numerator and denominator vanish together.
const ZERO_TOLERANCE: f64 = 1e-12;

/// `numerator(w) / denominator(w)`, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    numerator: Vec<Complex64>,
    denominator: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeroValue {
    Finite(Complex64),
    Pole,
}

impl MeroValue {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            MeroValue::Finite(v) => Some(v),
            MeroValue::Pole => None,
        }
    }
}

fn trimmed(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    coeffs
}

fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::default(), |acc, &c| acc * x + c)
}

impl RationalFunction {
    pub fn new(numerator: Vec<Complex64>, denominator: Vec<Complex64>) -> Result<Self, SurfaceError> {
        let denominator = trimmed(denominator);
        if denominator.is_empty() {
            return Err(SurfaceError::ZeroDenominator);
        }
        Ok(Self {
            numerator: trimmed(numerator),
            denominator,
        })
    }

    /// Polynomial in `w`.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs, vec![Complex64::new(1.0, 0.0)]).expect("constant denominator")
    }

    fn degree(&self) -> usize {
        self.numerator.len().max(self.denominator.len()).saturating_sub(1)
    }

    fn scale(&self) -> f64 {
        self.numerator
            .iter()
            .chain(&self.denominator)
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn quotient(&self, num: Complex64, den: Complex64) -> Result<MeroValue, SurfaceError> {
        let tiny = ZERO_TOLERANCE * self.scale();
        match (num.norm() <= tiny, den.norm() <= tiny) {
            (true, true) => Err(SurfaceError::IndeterminateAtPoint),
            (_, true) => Ok(MeroValue::Pole),
            _ => Ok(MeroValue::Finite(num / den)),
        }
    }

    /// Value at a base point. In the `s` chart both polynomials are
    /// homogenized by `s^degree`, so `w = infinity` (`s = 0`) is handled.
    pub fn eval(&self, base: BasePoint) -> Result<MeroValue, SurfaceError> {
        match base {
            BasePoint::W(w) => self.quotient(horner(&self.numerator, w), horner(&self.denominator, w)),
            BasePoint::S(s) => {
                let d = self.degree();
                // s^d p(1/s) = sum c_k s^{d-k}
                let reversed = |coeffs: &[Complex64]| {
                    let mut padded = coeffs.to_vec();
                    padded.resize(d + 1, Complex64::default());
                    padded.reverse();
                    padded
                };
                self.quotient(
                    horner(&reversed(&self.numerator), s),
                    horner(&reversed(&self.denominator), s),
                )
            }
        }
    }
}

/// `f^* r`, evaluable on points of `E`.
#[derive(Debug, Clone)]
pub struct PulledBackFunction {
    surface: Surface,
    function: RationalFunction,
}

impl PulledBackFunction {
    pub fn new(surface: Surface, function: RationalFunction) -> Self {
        Self { surface, function }
    }

    pub fn eval(&self, p: &EPoint) -> Result<MeroValue, SurfaceError> {
        self.function.eval(self.surface.fibration_f(p))
    }
}

impl Surface {
    /// Pull a meromorphic function on the base back along `f`.
    pub fn meromorphic_pullback(&self, function: RationalFunction) -> PulledBackFunction {
        PulledBackFunction::new(*self, function)
    }
}
