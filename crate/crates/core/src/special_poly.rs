//! Classical orthogonal polynomials and the four-variable source-derivative
//! engine.
//!
//! Every derivative-of-exponential identity the closed forms rely on has the
//! shape
//!
//! ```text
//! ∂^{o₁}_τ ∂^{o₂}_t ∂^{o₃}_{τ'} ∂^{o₄}_{t'}
//!     exp[A(τt + τ't') + B(ττ' + tt') + s_τ τ + s_t t + s_{τ'} τ' + s_{t'} t'] |₀
//! ```
//!
//! which [`source_derivative`] evaluates as an exact finite sum. The Jacobi
//! closed form [`gen_quad_closed`] covers the source-free case.
//!
//! Factorials are never formed directly. Binomials and multinomials are built
//! by ratio accumulation so intermediate values stay well inside `f64` range
//! up to the order cap.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the total derivative order (sum of the four orders).
pub const DEFAULT_ORDER_CAP: u32 = 24;

/// Relative threshold on `|B² − A²| / (A² + B²)` below which
/// [`gen_quad_closed`] abandons the Jacobi quotient for the direct sum.
pub const SINGULAR_EPS: f64 = 1e-10;

fn check_order(order: u32, cap: u32) -> Result<()> {
    if order > cap {
        Err(Error::OrderOverflow { order, cap })
    } else {
        Ok(())
    }
}

/// Generalized binomial coefficient `C(a, k)` for real `a`.
pub(crate) fn binom_real(a: f64, k: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c *= (a - i as f64) / (i as f64 + 1.0);
    }
    c
}

/// `C(n, k)` for integers, zero when `k > n`.
pub(crate) fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    binom_real(n as f64, k)
}

/// `n! / (k₁! k₂! k₃!)` with `k₁ + k₂ + k₃ = n`.
fn multinomial3(k1: u32, k2: u32, k3: u32) -> f64 {
    binom(k1 + k2 + k3, k1) * binom(k2 + k3, k2)
}

/// `n!` by accumulation; only used for small arguments.
pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Falling factorial `n (n−1) … (n−k+1)` = `n!/(n−k)!`.
pub(crate) fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

/// Jacobi polynomial `P_m^{(α,β)}(x)` from its finite binomial sum.
///
/// Uses the product form `Σ_k C(m+α, k) C(m+β, m−k) ((x+1)/2)^k ((x−1)/2)^{m−k}`,
/// which is regular at `x = 1`.
pub fn jacobi(m: u32, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    jacobi_capped(m, alpha, beta, x, DEFAULT_ORDER_CAP)
}

pub fn jacobi_capped(m: u32, alpha: f64, beta: f64, x: f64, cap: u32) -> Result<f64> {
    check_order(m, cap)?;
    if !(alpha.is_finite() && beta.is_finite() && x.is_finite()) {
        return Err(Error::NonFinite("jacobi argument"));
    }
    let up = 0.5 * (x + 1.0);
    let down = 0.5 * (x - 1.0);
    let mut sum = 0.0;
    for k in 0..=m {
        let c = binom_real(m as f64 + alpha, k) * binom_real(m as f64 + beta, m - k);
        sum += c * up.powi(k as i32) * down.powi((m - k) as i32);
    }
    Ok(sum)
}

/// Legendre polynomial; delegates to [`jacobi`] with `α = β = 0`.
pub fn legendre(n: u32, x: f64) -> Result<f64> {
    jacobi(n, 0.0, 0.0, x)
}

/// Laguerre polynomial `L_n(x) = Σ_k (−1)^k C(n,k) x^k / k!`.
pub fn laguerre(n: u32, x: f64) -> Result<f64> {
    check_order(n, DEFAULT_ORDER_CAP)?;
    if !x.is_finite() {
        return Err(Error::NonFinite("laguerre argument"));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        term *= -((n - k) as f64) * x / ((k + 1) as f64 * (k + 1) as f64);
        sum += term;
    }
    Ok(sum)
}

fn complex_powers(z: Complex64, n: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    out.push(acc);
    for _ in 0..n {
        acc *= z;
        out.push(acc);
    }
    out
}

/// Two-variable Hermite polynomial
/// `H_{m,n}(x,y) = Σ_l (−1)^l m! n! x^{m−l} y^{n−l} / (l! (m−l)! (n−l)!)`.
pub fn hermite2(m: u32, n: u32, x: Complex64, y: Complex64) -> Result<Complex64> {
    check_order(m.max(n), DEFAULT_ORDER_CAP)?;
    if !(x.re.is_finite() && x.im.is_finite() && y.re.is_finite() && y.im.is_finite()) {
        return Err(Error::NonFinite("hermite2 argument"));
    }
    let xp = complex_powers(x, m);
    let yp = complex_powers(y, n);
    // c_l = (−1)^l C(m,l) C(n,l) l!
    let mut c = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 0..=m.min(n) {
        sum += xp[(m - l) as usize] * yp[(n - l) as usize] * c;
        c *= -((m - l) as f64) * ((n - l) as f64) / (l + 1) as f64;
    }
    Ok(sum)
}

/// A mixed-partial request on the exponential generating function.
///
/// Orders are listed in the variable order `(τ, t, τ', t')`. `coeff_diag`
/// multiplies `τt + τ't'`, `coeff_cross` multiplies `ττ' + tt'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub order_tau: u32,
    pub order_t: u32,
    pub order_taup: u32,
    pub order_tp: u32,
    pub coeff_diag: Complex64,
    pub coeff_cross: Complex64,
    pub src_tau: Complex64,
    pub src_t: Complex64,
    pub src_taup: Complex64,
    pub src_tp: Complex64,
    pub cap: u32,
}

impl SourceSpec {
    /// Source-free request with real coefficients.
    pub fn quadratic(orders: [u32; 4], diag: f64, cross: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        SourceSpec {
            order_tau: orders[0],
            order_t: orders[1],
            order_taup: orders[2],
            order_tp: orders[3],
            coeff_diag: diag.into(),
            coeff_cross: cross.into(),
            src_tau: zero,
            src_t: zero,
            src_taup: zero,
            src_tp: zero,
            cap: DEFAULT_ORDER_CAP,
        }
    }

    /// Sets the four linear sources, in `(τ, t, τ', t')` order.
    pub fn with_sources(mut self, sources: [Complex64; 4]) -> Self {
        self.src_tau = sources[0];
        self.src_t = sources[1];
        self.src_taup = sources[2];
        self.src_tp = sources[3];
        self
    }

    pub fn with_coefficients(mut self, diag: Complex64, cross: Complex64) -> Self {
        self.coeff_diag = diag;
        self.coeff_cross = cross;
        self
    }

    pub fn total_order(&self) -> u32 {
        self.order_tau + self.order_t + self.order_taup + self.order_tp
    }

    fn all_finite(&self) -> bool {
        [
            self.coeff_diag,
            self.coeff_cross,
            self.src_tau,
            self.src_t,
            self.src_taup,
            self.src_tp,
        ]
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Evaluates the mixed partial derivative described by `spec` at the origin.
///
/// Monomials are `(τt)^a (τ't')^b (ττ')^c (tt')^d τ^{e₁} t^{e₂} τ'^{e₃} t'^{e₄}`;
/// the four orders pin `e₁…e₄` once `(a, b, c, d)` are chosen, so the sum
/// runs over those four indices only.
pub fn source_derivative(spec: &SourceSpec) -> Result<Complex64> {
    check_order(spec.total_order(), spec.cap)?;
    if !spec.all_finite() {
        return Err(Error::NonFinite("source_derivative coefficient"));
    }
    let (o1, o2, o3, o4) = (spec.order_tau, spec.order_t, spec.order_taup, spec.order_tp);
    let top = o1.max(o2).max(o3).max(o4);
    let pa = complex_powers(spec.coeff_diag, o1.min(o2) + o3.min(o4));
    let pb = complex_powers(spec.coeff_cross, o1.min(o3) + o2.min(o4));
    let s1 = complex_powers(spec.src_tau, top);
    let s2 = complex_powers(spec.src_t, top);
    let s3 = complex_powers(spec.src_taup, top);
    let s4 = complex_powers(spec.src_tp, top);

    let mut sum = Complex64::new(0.0, 0.0);
    for a in 0..=o1.min(o2) {
        for b in 0..=o3.min(o4) {
            for c in 0..=(o1 - a).min(o3 - b) {
                for d in 0..=(o2 - a).min(o4 - b) {
                    let e1 = o1 - a - c;
                    let e2 = o2 - a - d;
                    let e3 = o3 - b - c;
                    let e4 = o4 - b - d;
                    // o₁!o₂!o₃!o₄! / (a!b!c!d!e₁!e₂!e₃!e₄!) regrouped as four
                    // multinomials times a!b!c!d!.
                    let weight = multinomial3(a, c, e1)
                        * multinomial3(a, d, e2)
                        * multinomial3(b, c, e3)
                        * multinomial3(b, d, e4)
                        * factorial(a)
                        * factorial(b)
                        * factorial(c)
                        * factorial(d);
                    let term = pa[(a + b) as usize]
                        * pb[(c + d) as usize]
                        * s1[e1 as usize]
                        * s2[e2 as usize]
                        * s3[e3 as usize]
                        * s4[e4 as usize];
                    sum += term * weight;
                }
            }
        }
    }
    Ok(sum)
}

/// Jacobi closed form of the source-free derivative with orders `(m, m, n, n)`:
/// `m! n! A^{|n−m|} (B² − A²)^{min} P_{min}^{(|n−m|,0)}((B²+A²)/(B²−A²))`.
///
/// Falls back to [`source_derivative`] when `|B² − A²| < SINGULAR_EPS · (A² + B²)`.
pub fn gen_quad_closed(a: f64, b: f64, m: u32, n: u32) -> Result<f64> {
    check_order(2 * (m + n), DEFAULT_ORDER_CAP)?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("gen_quad_closed coefficient"));
    }
    let a2 = a * a;
    let b2 = b * b;
    let gap = b2 - a2;
    if gap.abs() <= SINGULAR_EPS * (a2 + b2) {
        let spec = SourceSpec::quadratic([m, m, n, n], a, b);
        return Ok(source_derivative(&spec)?.re);
    }
    let lo = m.min(n);
    let diff = m.max(n) - lo;
    let y = (b2 + a2) / gap;
    let p = jacobi(lo, diff as f64, 0.0, y)?;
    Ok(factorial(m) * factorial(n) * a.powi(diff as i32) * gap.powi(lo as i32) * p)
}

/// Four-index normalization `N_{l,p,q,s}`: source-free derivative with orders
/// `(l, p, q, s)`, diagonal coefficient `B₁` and cross coefficient `B₂`.
/// Vanishes unless `p + q = l + s`.
pub fn n4(l: u32, p: u32, q: u32, s: u32, b1: f64, b2: f64) -> Result<f64> {
    let spec = SourceSpec::quadratic([l, p, q, s], b1, b2);
    Ok(source_derivative(&spec)?.re)
}

/// The single-sum series for [`n4`], kept as an independent second path.
///
/// The summation index is the `tt'` exponent; its range is bounded by the
/// non-negativity of every factorial argument.
pub fn n4_series(l: u32, p: u32, q: u32, r: u32, b1: f64, b2: f64) -> Result<f64> {
    check_order(l + p + q + r, DEFAULT_ORDER_CAP)?;
    if p + q != l + r {
        return Ok(0.0);
    }
    let (l, p, q, r) = (l as i64, p as i64, q as i64, r as i64);
    let prefactor = factorial(l as u32) * factorial(p as u32) * factorial(q as u32) * factorial(r as u32);
    let mut sum = 0.0;
    for s in 0..=r {
        let f = [s, q - r + s, r - s, l + r - q - s];
        if f.iter().any(|&v| v < 0) {
            continue;
        }
        let denom: f64 = f.iter().map(|&v| factorial(v as u32)).product();
        let pow1 = (l - q + 2 * r - 2 * s) as i32;
        let pow2 = (q - r + 2 * s) as i32;
        sum += b1.powi(pow1) * b2.powi(pow2) / denom;
    }
    Ok(prefactor * sum)
}
