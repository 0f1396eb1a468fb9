//! Transition data for vector bundles over the two-chart `CP^1`.
//!
//! Chart 1 has coordinate `w`, chart 2 has `s = 1/w`. A cocycle `G` glues
//! local sections by `s1(w) = G(w) s2(1/w)` on the overlap annulus.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BundleError;
use crate::holo::{cr_residual, winding_number, CirclePath, DEFAULT_STEP};

pub type MatrixFn = Arc<dyn Fn(Complex64) -> DMatrix<Complex64> + Send + Sync>;

/// Below this `|det G|`, relative to the largest sampled value, the
/// transition is treated as singular.
const SINGULAR_DET: f64 = 1e-12;

#[derive(Clone)]
pub struct Cocycle {
    rank: usize,
    label: String,
    transition: MatrixFn,
}

impl fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cocycle")
            .field("rank", &self.rank)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl Cocycle {
    pub fn new<F>(rank: usize, label: impl Into<String>, transition: F) -> Result<Self, BundleError>
    where
        F: Fn(Complex64) -> DMatrix<Complex64> + Send + Sync + 'static,
    {
        if rank == 0 {
            return Err(BundleError::ZeroRank);
        }
        Ok(Self {
            rank,
            label: label.into(),
            transition: Arc::new(transition),
        })
    }

    /// `O(k)`: `G(w) = w^k`.
    pub fn o_k(k: i32) -> Self {
        Self::diagonal(&[k])
    }

    /// `O(k_1) + ... + O(k_n)`.
    pub fn diagonal(k: &[i32]) -> Self {
        assert!(!k.is_empty(), "diagonal cocycle needs at least one degree");
        let degrees = k.to_vec();
        let label = if k.len() == 1 {
            format!("O({})", k[0])
        } else {
            format!("diag{k:?}")
        };
        Self {
            rank: k.len(),
            label,
            transition: Arc::new(move |w| {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    degrees.len(),
                    degrees.iter().map(|&d| w.powi(d)),
                ))
            }),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, w: Complex64) -> DMatrix<Complex64> {
        (self.transition)(w)
    }

    pub fn det(&self, w: Complex64) -> Complex64 {
        self.eval(w).determinant()
    }

    /// `P G P^{-1}`: the same bundle in a different constant frame.
    pub fn conjugated(&self, p: &DMatrix<Complex64>) -> Result<Self, BundleError> {
        if p.nrows() != self.rank || p.ncols() != self.rank {
            return Err(BundleError::RankMismatch {
                expected: self.rank,
                found: p.nrows().max(p.ncols()),
            });
        }
        let p_inv = p.clone().try_inverse().ok_or(BundleError::SingularMatrix)?;
        let p = p.clone();
        let inner = self.transition.clone();
        Ok(Self {
            rank: self.rank,
            label: format!("conj({})", self.label),
            transition: Arc::new(move |w| &p * inner(w) * &p_inv),
        })
    }

    /// Tensor with `O(m)`.
    pub fn twisted(&self, m: i32) -> Self {
        let inner = self.transition.clone();
        Self {
            rank: self.rank,
            label: format!("{}({m:+})", self.label),
            transition: Arc::new(move |w| inner(w) * w.powi(m)),
        }
    }

    /// Multiply by a scalar function, which must be holomorphic and
    /// nonvanishing on the overlap.
    pub fn scaled<F>(&self, label: &str, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let inner = self.transition.clone();
        Self {
            rank: self.rank,
            label: format!("{label}*{}", self.label),
            transition: Arc::new(move |w| inner(w) * f(w)),
        }
    }

    /// Dual bundle, with transition `G^{-T}`.
    pub fn dual(&self) -> Self {
        let inner = self.transition.clone();
        let rank = self.rank;
        Self {
            rank,
            label: format!("dual({})", self.label),
            transition: Arc::new(move |w| {
                inner(w)
                    .transpose()
                    .try_inverse()
                    .unwrap_or_else(|| DMatrix::from_element(rank, rank, Complex64::new(f64::NAN, f64::NAN)))
            }),
        }
    }

    pub fn direct_sum(&self, other: &Cocycle) -> Self {
        let (a, b) = (self.transition.clone(), other.transition.clone());
        let (n, m) = (self.rank, other.rank);
        Self {
            rank: n + m,
            label: format!("{}+{}", self.label, other.label),
            transition: Arc::new(move |w| {
                let mut out = DMatrix::zeros(n + m, n + m);
                out.view_mut((0, 0), (n, n)).copy_from(&a(w));
                out.view_mut((n, n), (m, m)).copy_from(&b(w));
                out
            }),
        }
    }

    /// Check that `det G` stays away from zero on `samples` points of each
    /// circle in `radii` and that every entry is holomorphic there.
    pub fn validate(&self, radii: &[f64], samples: usize, holomorphy_tol: f64) -> Result<(), BundleError> {
        let mut first_winding = None;
        for &r in radii {
            let path = CirclePath::centered(r, samples)?;
            let dets: Vec<Complex64> = path.points().map(|w| self.det(w)).collect();
            let largest = dets.iter().map(|d| d.norm()).fold(0.0, f64::max);
            if !largest.is_finite() || dets.iter().any(|d| !(d.norm() > SINGULAR_DET * largest)) {
                return Err(BundleError::SingularTransition { radius: r });
            }
            // A zero of det between two circles shows up as a jump in winding.
            let winding = winding_number(|w| self.det(w), &path)?;
            if *first_winding.get_or_insert(winding) != winding {
                return Err(BundleError::SingularTransition { radius: r });
            }
            for w in path.points() {
                let entries = |p: &[Complex64]| Some(self.eval(p[0]).iter().copied().collect::<Vec<_>>());
                let residual = cr_residual(entries, &[w], DEFAULT_STEP)?;
                if residual > holomorphy_tol * largest.max(1.0) {
                    return Err(BundleError::NotHolomorphic { point: w, residual });
                }
            }
        }
        Ok(())
    }
}

/// First Chern number: winding of `det G` counter-clockwise around `|w| = r`.
pub fn chern_number(c: &Cocycle, r: f64) -> Result<i64, BundleError> {
    let path = CirclePath::centered(r, 256)?;
    Ok(winding_number(|w| c.det(w), &path)?)
}

/// One term `coefficient * w^exponent`, written `[exponent, re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaurentTerm(pub i32, pub f64, pub f64);

/// Cocycle given entrywise by Laurent polynomials in `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentMatrix {
    pub rank: usize,
    /// Row-major; each entry is a list of terms.
    pub entries: Vec<Vec<Vec<LaurentTerm>>>,
}

impl LaurentMatrix {
    pub fn validate(&self) -> Result<(), BundleError> {
        if self.rank == 0 {
            return Err(BundleError::ZeroRank);
        }
        let shape_ok = self.entries.len() == self.rank && self.entries.iter().all(|row| row.len() == self.rank);
        if !shape_ok {
            return Err(BundleError::Malformed(format!(
                "entries must be a {0}x{0} array of term lists",
                self.rank
            )));
        }
        let finite = self.entries.iter().flatten().flatten().all(|t| t.1.is_finite() && t.2.is_finite());
        if !finite {
            return Err(BundleError::Malformed("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn to_cocycle(&self) -> Result<Cocycle, BundleError> {
        self.validate()?;
        let n = self.rank;
        let entries = self.entries.clone();
        Cocycle::new(n, "file", move |w| {
            DMatrix::from_fn(n, n, |i, j| {
                entries[i][j]
                    .iter()
                    .map(|t| Complex64::new(t.1, t.2) * w.powi(t.0))
                    .sum()
            })
        })
    }
}
