//! Wigner function, characteristic function and the quadrature form of the
//! teleportation fidelity.
//!
//! The Wigner convention follows the displaced-parity normalization in which
//! the two-mode vacuum is `π⁻² exp(−2|α|² − 2|β|²)`; its integral over
//! `d²α d²β` is `1/4`, not `1`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::normalization;
use crate::error::{Error, Result};
use crate::special_poly::{binom, factorial, hermite2, source_derivative, SourceSpec};
use crate::state_params::{DerivedParams, StateParams};

/// Relative size of `K₃` below which the Hermite path is abandoned.
pub const HERMITE_KAPPA: f64 = 1e-8;

/// Successive-refinement tolerance of [`fidelity_numeric`].
pub const QUADRATURE_REFINE_TOL: f64 = 1e-5;

/// A point `(α, β)` of two-mode phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl PhasePoint {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        PhasePoint { alpha, beta }
    }

    pub fn origin() -> Self {
        let z = Complex64::new(0.0, 0.0);
        PhasePoint { alpha: z, beta: z }
    }

    fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite()
    }
}

/// Which EPR quadrature pair a Wigner grid is plotted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    /// `(Q₊, P₊)` with `Q₋ = P₋ = 0`.
    Sum,
    /// `(Q₋, P₋)` with `Q₊ = P₊ = 0`.
    Diff,
}

impl AxisKind {
    pub fn label(&self) -> &'static str {
        match self {
            AxisKind::Sum => "sum",
            AxisKind::Diff => "diff",
        }
    }

    /// Maps a grid node to `(α, β)` with `α = (Q_a + iP_a)/√2`,
    /// `Q_± = (Q_a ± Q_b)/√2` and the other quadrature pair held at zero.
    pub fn point(&self, q: f64, p: f64) -> PhasePoint {
        let qa = q * FRAC_1_SQRT_2;
        let pa = p * FRAC_1_SQRT_2;
        let (qb, pb) = match self {
            AxisKind::Sum => (qa, pa),
            AxisKind::Diff => (-qa, -pa),
        };
        PhasePoint {
            alpha: Complex64::new(qa, pa) * FRAC_1_SQRT_2,
            beta: Complex64::new(qb, pb) * FRAC_1_SQRT_2,
        }
    }
}

/// Sampled Wigner surface. `values[i * p_values.len() + j]` is the value at
/// `(q_values[i], p_values[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub axis_kind: AxisKind,
    pub q_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub values: Vec<f64>,
    pub params: StateParams,
}

impl WignerGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_values.len() + j]
    }

    /// `(q, p, w)` of the smallest sample.
    pub fn minimum(&self) -> (f64, f64, f64) {
        let (k, w) =
            self.values.iter().copied().enumerate().fold(
                (0, f64::INFINITY),
                |best, (k, w)| if w < best.1 { (k, w) } else { best },
            );
        let np = self.p_values.len();
        (self.q_values[k / np], self.p_values[k % np], w)
    }
}

/// Wigner function of the squeezed thermal state (no photons added).
pub fn wigner_w0(dp: &DerivedParams, pt: &PhasePoint) -> f64 {
    let g = 2.0 * dp.nbar + 1.0;
    let radial = pt.alpha.norm_sqr() + pt.beta.norm_sqr();
    let cross = 2.0 * (pt.alpha * pt.beta).re;
    let r2 = 2.0 * dp.r;
    let expo = (-2.0 * r2.cosh() * radial + 2.0 * r2.sinh() * cross) / g;
    expo.exp() / (PI * PI * g * g)
}

/// The linear sources `(R₁, R₂, R₃, R₄)` of the Wigner generating function.
fn wigner_sources(dp: &DerivedParams, pt: &PhasePoint) -> [Complex64; 4] {
    let r1 = 2.0 * (dp.k1 * pt.alpha - dp.k3 * pt.beta.conj());
    let r3 = 2.0 * (dp.k1 * pt.beta - dp.k3 * pt.alpha.conj());
    [r1, -r1.conj(), r3, -r3.conj()]
}

/// Wigner evaluator for fixed `(m, n, r, n̄)`; caches `N_{m,n}`.
#[derive(Debug, Clone, Copy)]
pub struct WignerKernel {
    m: u32,
    n: u32,
    dp: DerivedParams,
    norm: f64,
}

impl WignerKernel {
    pub fn new(m: u32, n: u32, dp: &DerivedParams) -> Result<Self> {
        Ok(WignerKernel {
            m,
            n,
            dp: *dp,
            norm: normalization(m, n, dp)?,
        })
    }

    fn hermite_is_safe(&self, pt: &PhasePoint) -> bool {
        let [r1, _, r3, _] = wigner_sources(&self.dp, pt);
        self.dp.k3 >= HERMITE_KAPPA * (self.dp.k1 + r1.norm() + r3.norm())
    }

    /// Non-Gaussian factor `F_{m,n}` through the double Hermite sum.
    pub fn factor_hermite(&self, pt: &PhasePoint) -> Result<f64> {
        let (m, n) = (self.m, self.n);
        let dp = &self.dp;
        let [r1, _, r3, _] = wigner_sources(dp, pt);
        let root = Complex64::new(0.0, 1.0) * dp.k3.sqrt();
        let x = r1 / root;
        let y = r3 / root;
        let mut sum = 0.0;
        for l in 0..=m {
            for j in 0..=n {
                // (m!n!)² / (l! j! [(m−l)!(n−j)!]²) = [C(m,l) C(n,j)]² l! j!
                let cb = binom(m, l) * binom(n, j);
                let coeff = cb * cb * factorial(l) * factorial(j);
                let scale = (-dp.k1).powi((l + j) as i32) * dp.k3.powi((m - l + n - j) as i32);
                let h = hermite2(m - l, n - j, x, y)?;
                sum += coeff * scale * h.norm_sqr();
            }
        }
        Ok(sum / self.norm)
    }

    /// Non-Gaussian factor through the source-derivative engine; regular for
    /// every `K₃ >= 0`. Returned complex so callers can inspect the residue.
    pub fn factor_source(&self, pt: &PhasePoint) -> Result<Complex64> {
        let (m, n) = (self.m, self.n);
        let spec = SourceSpec::quadratic([m, m, n, n], self.dp.k1, self.dp.k3)
            .with_sources(reorder_tau_first(wigner_sources(&self.dp, pt)));
        let d = source_derivative(&spec)?;
        let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
        Ok(d * sign / self.norm)
    }

    /// `F_{m,n}`, choosing the Hermite path unless `K₃` is too small.
    pub fn factor(&self, pt: &PhasePoint) -> Result<f64> {
        if !pt.is_finite() {
            return Err(Error::NonFinite("phase point"));
        }
        if self.hermite_is_safe(pt) {
            self.factor_hermite(pt)
        } else {
            Ok(self.factor_source(pt)?.re)
        }
    }

    pub fn eval(&self, pt: &PhasePoint) -> Result<f64> {
        Ok(wigner_w0(&self.dp, pt) * self.factor(pt)?)
    }
}

/// `[R₁, R₂, R₃, R₄]` are the sources of `(t, τ, t', τ')`; the engine wants
/// `(τ, t, τ', t')`.
fn reorder_tau_first(src: [Complex64; 4]) -> [Complex64; 4] {
    [src[1], src[0], src[3], src[2]]
}

/// Non-Gaussian factor `F_{m,n}(α, β)`.
pub fn wigner_factor(m: u32, n: u32, dp: &DerivedParams, pt: &PhasePoint) -> Result<f64> {
    WignerKernel::new(m, n, dp)?.factor(pt)
}

/// The printed origin value of the single-photon-added Wigner function,
/// `W_{0,1}(0,0)`; always negative.
pub fn wigner01_origin_printed(dp: &DerivedParams) -> f64 {
    let g = 2.0 * dp.nbar + 1.0;
    let ch2 = dp.r.cosh().powi(2);
    -((dp.nbar + ch2) / g.powi(3)) / ((ch2 + dp.nbar * (2.0 * dp.r).cosh()) * PI * PI)
}

/// Wigner function of the photon-added state.
pub fn wigner(m: u32, n: u32, dp: &DerivedParams, pt: &PhasePoint) -> Result<f64> {
    WignerKernel::new(m, n, dp)?.eval(pt)
}

/// Samples the Wigner function on a `(q, p)` grid of the chosen quadrature pair.
pub fn wigner_grid(
    params: &StateParams,
    axis_kind: AxisKind,
    q_values: &[f64],
    p_values: &[f64],
) -> Result<WignerGrid> {
    if q_values.is_empty() || p_values.is_empty() {
        return Err(Error::InvalidParams("wigner grid axes must be nonempty".into()));
    }
    params.validate()?;
    let kernel = WignerKernel::new(params.m, params.n, &params.derived())?;
    let np = p_values.len();
    let values = (0..q_values.len() * np)
        .into_par_iter()
        .map(|k| kernel.eval(&axis_kind.point(q_values[k / np], p_values[k % np])))
        .collect::<Result<Vec<_>>>()?;
    Ok(WignerGrid {
        axis_kind,
        q_values: q_values.to_vec(),
        p_values: p_values.to_vec(),
        values,
        params: *params,
    })
}

/// Characteristic function `tr[D_a(α) D_b(β) ρ]` evaluator with cached `N_{m,n}`.
#[derive(Debug, Clone, Copy)]
pub struct CfKernel {
    m: u32,
    n: u32,
    dp: DerivedParams,
    norm: f64,
}

impl CfKernel {
    pub fn new(m: u32, n: u32, dp: &DerivedParams) -> Result<Self> {
        Ok(CfKernel {
            m,
            n,
            dp: *dp,
            norm: normalization(m, n, dp)?,
        })
    }

    pub fn eval(&self, pt: &PhasePoint) -> Result<Complex64> {
        if !pt.is_finite() {
            return Err(Error::NonFinite("phase point"));
        }
        let (a, b) = (pt.alpha, pt.beta);
        let (b1, b2) = (self.dp.b1, self.dp.b2);
        let expo = -(b1 - 0.5) * (a.norm_sqr() + b.norm_sqr()) + b2 * (a * b + (a * b).conj());
        let s_t = a * b1 - b.conj() * b2;
        let s_tau = b * b2 - a.conj() * b1;
        let s_taup = a * b2 - b.conj() * b1;
        let s_tp = b * b1 - a.conj() * b2;
        let spec =
            SourceSpec::quadratic([self.m, self.m, self.n, self.n], b1, b2).with_sources([s_tau, s_t, s_taup, s_tp]);
        Ok(expo.exp() * source_derivative(&spec)? / self.norm)
    }
}

/// Characteristic function of the photon-added state.
pub fn cf_patmsts(m: u32, n: u32, dp: &DerivedParams, pt: &PhasePoint) -> Result<Complex64> {
    CfKernel::new(m, n, dp)?.eval(pt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureScheme {
    GaussHermite,
    UniformBox,
}

/// Discretization of the `∫ d²η` fidelity integral. The integration variable
/// is rescaled by the Gaussian envelope of the integrand before either rule
/// is applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub points_per_axis: usize,
    pub box_halfwidth: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: QuadratureScheme::GaussHermite,
            points_per_axis: 40,
            box_halfwidth: 6.0,
        }
    }
}

impl QuadratureSpec {
    pub fn uniform_box() -> Self {
        QuadratureSpec {
            scheme: QuadratureScheme::UniformBox,
            points_per_axis: 121,
            box_halfwidth: 6.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.points_per_axis < 8 {
            return Err(Error::InvalidParams(format!(
                "quadrature needs at least 8 points per axis, got {}",
                self.points_per_axis
            )));
        }
        if self.scheme == QuadratureScheme::UniformBox && (self.box_halfwidth.is_nan() || self.box_halfwidth <= 0.0) {
            return Err(Error::InvalidParams("box half-width must be positive".into()));
        }
        Ok(())
    }

    /// 1-D nodes and weights for `∫ e^{−u²} f(u) du`.
    fn rule(&self, points: usize) -> (Vec<f64>, Vec<f64>) {
        match self.scheme {
            QuadratureScheme::GaussHermite => gauss_hermite(points),
            QuadratureScheme::UniformBox => {
                let w = self.box_halfwidth;
                let h = 2.0 * w / (points - 1) as f64;
                let nodes: Vec<f64> = (0..points).map(|k| -w + k as f64 * h).collect();
                let weights = nodes
                    .iter()
                    .enumerate()
                    .map(|(k, &u)| {
                        let end = if k == 0 || k == points - 1 { 0.5 } else { 1.0 };
                        end * h * (-u * u).exp()
                    })
                    .collect();
                (nodes, weights)
            }
        }
    }

    fn refined_points(&self) -> usize {
        match self.scheme {
            QuadratureScheme::GaussHermite => self.points_per_axis + self.points_per_axis / 2,
            QuadratureScheme::UniformBox => 2 * self.points_per_axis - 1,
        }
    }
}

/// Gauss-Hermite nodes and weights for the weight `e^{−x²}`, by Newton
/// iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn coherent_cf(gamma: Complex64, eta: Complex64) -> Complex64 {
    (-0.5 * eta.norm_sqr() + eta * gamma.conj() - eta.conj() * gamma).exp()
}

fn fidelity_sum(
    kernel: &CfKernel,
    quad: &QuadratureSpec,
    points: usize,
    gamma: Complex64,
    scale: f64,
) -> Result<Complex64> {
    let (nodes, weights) = quad.rule(points);
    let inv = 1.0 / scale.sqrt();
    let mut total = Complex64::new(0.0, 0.0);
    for (&x, &wx) in nodes.iter().zip(&weights) {
        for (&y, &wy) in nodes.iter().zip(&weights) {
            let u2 = x * x + y * y;
            let eta = Complex64::new(x, y) * inv;
            let pt = PhasePoint::new(-eta.conj(), -eta);
            let integrand = coherent_cf(gamma, eta) * coherent_cf(gamma, -eta) * kernel.eval(&pt)?;
            total += integrand * (wx * wy * u2.exp());
        }
    }
    Ok(total / (PI * scale))
}

/// Teleportation fidelity for a coherent input `|γ⟩`, by quadrature of
/// `∫ d²η/π χ_in(η) χ_in(−η) χ_E(−η*, −η)`.
pub fn fidelity_numeric_coherent(
    m: u32,
    n: u32,
    dp: &DerivedParams,
    quad: &QuadratureSpec,
    gamma: Complex64,
) -> Result<f64> {
    quad.validate()?;
    let kernel = CfKernel::new(m, n, dp)?;
    // Gaussian envelope of the full integrand is exp(−2(B₁ − B₂)|η|²).
    let scale = 2.0 * (dp.b1 - dp.b2);
    let coarse = fidelity_sum(&kernel, quad, quad.points_per_axis, gamma, scale)?;
    let fine = fidelity_sum(&kernel, quad, quad.refined_points(), gamma, scale)?;
    let gap = (fine - coarse).norm();
    if gap > QUADRATURE_REFINE_TOL {
        return Err(Error::QuadratureNonconvergence(gap));
    }
    Ok(fine.re)
}

/// Teleportation fidelity for the vacuum input (`γ = 0`).
pub fn fidelity_numeric(m: u32, n: u32, dp: &DerivedParams, quad: &QuadratureSpec) -> Result<f64> {
    fidelity_numeric_coherent(m, n, dp, quad, Complex64::new(0.0, 0.0))
}
