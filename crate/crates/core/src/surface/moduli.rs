//! Moduli of the elliptic fibers.
//!
//! The fiber of chart `A` over `w` is `C* / w^Z`, a Tate curve with nome
//! `q = w`; its isomorphism class is `j(q)`.

use num_complex::Complex64;

use super::SurfaceError;

pub const DEFAULT_J_TERMS: usize = 64;

/// Accepted size of the truncated tail, relative to the partial sums.
const TAIL_TOLERANCE: f64 = 1e-10;

fn sigma3(n: usize) -> f64 {
    let mut total = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += (d as f64).powi(3);
            let e = n / d;
            if e != d {
                total += (e as f64).powi(3);
            }
        }
        d += 1;
    }
    total
}

/// Klein's `j` from its q-expansion `E4^3 / Delta`, with
/// `E4 = 1 + 240 sum sigma3(n) q^n` and `Delta = q prod (1 - q^n)^24`,
/// both truncated after `terms` terms.
///
/// The truncation is rejected when the last retained term, extrapolated
/// geometrically, exceeds `1e-10` of the partial sum.
pub fn j_invariant(q: Complex64, terms: usize) -> Result<Complex64, SurfaceError> {
    let r = q.norm();
    if !(r > 0.0 && r < 1.0) || terms == 0 {
        return Err(SurfaceError::InvalidNome(q));
    }
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut product = Complex64::new(1.0, 0.0);
    let mut q_n = Complex64::new(1.0, 0.0);
    let mut last_e4_term = 0.0;
    for n in 1..=terms {
        q_n *= q;
        let term = 240.0 * sigma3(n) * q_n;
        e4 += term;
        last_e4_term = term.norm();
        product *= (Complex64::new(1.0, 0.0) - q_n).powi(24);
    }
    let geometric = 1.0 / (1.0 - r);
    let e4_tail = last_e4_term * geometric / e4.norm();
    // log prod (1 - q^n)^24 has tail about 24 |q|^{T+1} / (1 - |q|)
    let product_tail = 24.0 * r.powi(terms as i32 + 1) * geometric;
    let tail = e4_tail.max(product_tail);
    if !(tail < TAIL_TOLERANCE) {
        return Err(SurfaceError::TruncationInsufficient { terms, tail });
    }
    let delta = q * product;
    Ok(e4 * e4 * e4 / delta)
}
