//! Matrix exponential by scaling and squaring around a degree-18 Taylor
//! polynomial, evaluated with the Paterson-Stockmeyer scheme.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};

const DEGREE: usize = 18;
const MAX_SQUARINGS: u32 = 60;

/// Largest scaled 1-norm for which the Taylor remainder stays below `tol`.
fn theta(tol: f64) -> f64 {
    // ‖A‖^{19}/19! · e^{‖A‖} ≤ tol, solved by fixed-point iteration.
    let fact: f64 = (1..=DEGREE + 1).map(|k| k as f64).product();
    let mut t: f64 = 1.0;
    for _ in 0..50 {
        t = (tol * fact * (-t).exp()).powf(1.0 / (DEGREE + 1) as f64);
    }
    t
}

pub(crate) fn norm1<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(M)` for a square matrix with entries of type `T` (real or complex).
///
/// The scaling exponent is picked from the 1-norm so that the truncated
/// series error is below `tol` before squaring.
pub fn expm<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: f64) -> Result<DMatrix<T>> {
    assert!(m.is_square(), "expm needs a square matrix");
    if m.iter().any(|x| !x.clone().is_finite()) {
        return Err(Error::NonFinite("expm input"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let norm = norm1(m);
    let th = theta(tol);
    let mut s = 0u32;
    if norm > th {
        s = (norm / th).log2().ceil() as u32;
    }
    if s > MAX_SQUARINGS {
        return Err(Error::ScalingOverflow(s));
    }
    let a = if s == 0 {
        m.clone()
    } else {
        m.scale(0.5f64.powi(s as i32))
    };

    // Paterson-Stockmeyer with block size 4: powers A..A⁴, then Horner in A⁴.
    let q = 4usize;
    let mut powers = Vec::with_capacity(q + 1);
    powers.push(DMatrix::<T>::identity(n, n));
    powers.push(a.clone());
    for k in 2..=q {
        let next = &powers[k - 1] * &a;
        powers.push(next);
    }
    let coeff = |k: usize| -> f64 { 1.0 / (1..=k).map(|j| j as f64).product::<f64>() };
    let block = |j: usize| -> DMatrix<T> {
        let mut b = DMatrix::<T>::zeros(n, n);
        for (i, p) in powers.iter().enumerate().take(q) {
            let k = q * j + i;
            if k <= DEGREE {
                b += p.scale(coeff(k));
            }
        }
        b
    };
    let top = DEGREE / q;
    let mut acc = block(top);
    for j in (0..top).rev() {
        acc = &powers[q] * acc + block(j);
    }
    for _ in 0..s {
        acc = &acc * &acc;
    }
    if acc.iter().any(|x| !x.clone().is_finite()) {
        return Err(Error::NonFinite("expm result"));
    }
    Ok(acc)
}
