//! Scalar closed-form observables of the photon-added squeezed thermal state.
//!
//! Everything here is assembled from the normalization `N_{m,n}` (and the
//! four-index `N_{l,p,q,s}` for the off-diagonal moments). A few printed
//! special-case formulas are kept as `*_printed` functions; they are
//! cross-checks only and the oracle decides where they disagree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_poly::{self, factorial, falling, jacobi, n4, DEFAULT_ORDER_CAP};
use crate::state_params::DerivedParams;

/// Bracket and iteration budget of [`sv_threshold`].
pub const SV_BRACKET: (f64, f64) = (1e-6, 5.0);
pub const SV_MAX_ITER: u32 = 60;
pub const SV_TOL: f64 = 1e-6;
const SV_SCAN_STEP: f64 = 0.01;

/// One entry of a two-mode photon-number distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PndEntry {
    pub ma: u32,
    pub nb: u32,
    pub prob: f64,
}

fn check_order(order: u32) -> Result<()> {
    if order > DEFAULT_ORDER_CAP {
        Err(Error::OrderOverflow {
            order,
            cap: DEFAULT_ORDER_CAP,
        })
    } else {
        Ok(())
    }
}

/// `N_{m,n} = m! n! B₁^{|n−m|} ω^{min} P_{min}^{(0,|n−m|)}(υ/ω)`.
pub fn normalization(m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    check_order(2 * (m + n))?;
    let lo = m.min(n);
    let diff = m.max(n) - lo;
    let p = jacobi(lo, 0.0, diff as f64, dp.upsilon / dp.omega)?;
    Ok(factorial(m) * factorial(n) * dp.b1.powi(diff as i32) * dp.omega.powi(lo as i32) * p)
}

/// `(⟨a†a⟩, ⟨b†b⟩)`.
pub fn mean_photons(m: u32, n: u32, dp: &DerivedParams) -> Result<(f64, f64)> {
    let nmn = normalization(m, n, dp)?;
    let na = normalization(m + 1, n, dp)? / nmn - 1.0;
    let nb = normalization(m, n + 1, dp)? / nmn - 1.0;
    Ok((na, nb))
}

/// `⟨a†b†ab⟩`.
pub fn cross_moment(m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    let nmn = normalization(m, n, dp)?;
    let n11 = normalization(m + 1, n + 1, dp)?;
    let n10 = normalization(m + 1, n, dp)?;
    let n01 = normalization(m, n + 1, dp)?;
    Ok((n11 - n10 - n01) / nmn + 1.0)
}

/// `(⟨a†b†⟩, ⟨ab⟩)`, both real for real squeezing.
pub fn pair_moments(m: u32, n: u32, dp: &DerivedParams) -> Result<(f64, f64)> {
    let nmn = normalization(m, n, dp)?;
    let create = n4(m, m + 1, n, n + 1, dp.b1, dp.b2)? / nmn;
    let annihilate = n4(m + 1, m, n + 1, n, dp.b1, dp.b2)? / nmn;
    Ok((create, annihilate))
}

/// Intermode cross-correlation `⟨a†b†ab⟩/(⟨a†a⟩⟨b†b⟩) − 1`.
///
/// Returns [`Error::Degenerate`] when either mean photon number vanishes
/// (the two-mode vacuum).
pub fn cross_correlation_g(m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    let nmn = normalization(m, n, dp)?;
    let n11 = normalization(m + 1, n + 1, dp)?;
    let n10 = normalization(m + 1, n, dp)?;
    let n01 = normalization(m, n + 1, dp)?;
    let da = n10 - nmn;
    let db = n01 - nmn;
    if da.abs() <= 1e-13 * n10 || db.abs() <= 1e-13 * n01 {
        return Err(Error::Degenerate("cross_correlation_g"));
    }
    Ok((n11 * nmn - n01 * n10) / (db * da))
}

/// Two-mode antibunching parameter; negative values signal antibunching.
pub fn antibunching_r(m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    let nmn = normalization(m, n, dp)?;
    let n10 = normalization(m + 1, n, dp)?;
    let n01 = normalization(m, n + 1, dp)?;
    let n11 = normalization(m + 1, n + 1, dp)?;
    let n20 = normalization(m + 2, n, dp)?;
    let n02 = normalization(m, n + 2, dp)?;
    let omega = nmn - n10 - n01;
    let den = 2.0 * (n11 + omega);
    if den.abs() <= 1e-13 * n11 {
        return Err(Error::Degenerate("antibunching_r"));
    }
    Ok((n20 + n02 + 2.0 * (omega - n11)) / den)
}

/// The printed `m = n = 0` special case of the antibunching parameter.
///
/// Disagrees with [`antibunching_r`] and with the oracle: at `r = 0` it gives
/// `−(2n̄+1)/n̄²` where two independent thermal fields give `1`. Kept so the
/// verification report can show the disagreement.
pub fn antibunching_r00_printed(dp: &DerivedParams) -> f64 {
    let g = 2.0 * dp.nbar + 1.0;
    let r = dp.r;
    let s = (2.0 * r).sinh();
    let num = g * (4.0 * (2.0 * r).cosh() + g * s * s);
    let den = g * (g * (4.0 * r).cosh() - 2.0 * (2.0 * r).cosh()) + 1.0;
    -num / den
}

/// Photon-number distribution of the squeezed thermal state, evaluated on its
/// generating function with coefficients `1 − A₃` (diagonal) and `A₂` (cross).
pub fn pnd_tmsts(ma: u32, nb: u32, dp: &DerivedParams) -> Result<f64> {
    let h = special_poly::gen_quad_closed(dp.one_minus_a3, dp.a2, ma, nb)?;
    Ok(dp.a1 * h / (factorial(ma) * factorial(nb)))
}

fn pnd_printed_with_nu_power(ma: u32, nb: u32, dp: &DerivedParams, nu_power: u32) -> Result<Option<f64>> {
    check_order(2 * (ma + nb))?;
    let Some(chi) = dp.chi else { return Ok(None) };
    let (lo, hi) = (ma.min(nb), ma.max(nb));
    let x = dp.nbar * (dp.nbar + 1.0);
    let p = jacobi(lo, (hi - lo) as f64, 0.0, chi)?;
    Ok(Some(
        dp.a1 * x.powi((hi - lo) as i32) * dp.mu.powi(lo as i32) / dp.nu.powi(nu_power as i32) * p,
    ))
}

/// The printed μ/ν/χ form of the squeezed-thermal PND, with the `ν` exponent
/// read as `n_b` (the larger index after symmetric extension). `None` on the
/// `χ` singular manifold.
pub fn pnd_tmsts_printed(ma: u32, nb: u32, dp: &DerivedParams) -> Result<Option<f64>> {
    pnd_printed_with_nu_power(ma, nb, dp, ma.max(nb))
}

/// The same printed form with the `ν` exponent taken literally as the
/// mode-a index. Only correct on the diagonal `m_a = n_b`.
pub fn pnd_tmsts_printed_literal(ma: u32, nb: u32, dp: &DerivedParams) -> Result<Option<f64>> {
    pnd_printed_with_nu_power(ma, nb, dp, ma.min(nb))
}

/// Photon-number distribution of the photon-added state.
pub fn pnd_patmsts(ma: u32, nb: u32, m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    if ma < m || nb < n {
        check_order(2 * (ma + nb))?;
        return Ok(0.0);
    }
    let base = pnd_tmsts(ma - m, nb - n, dp)?;
    let nmn = normalization(m, n, dp)?;
    Ok(falling(ma, m) * falling(nb, n) * base / nmn)
}

/// All PND entries with `ma, nb <= max`.
pub fn pnd_table(max: u32, m: u32, n: u32, dp: &DerivedParams) -> Result<Vec<PndEntry>> {
    let mut out = Vec::with_capacity(((max + 1) * (max + 1)) as usize);
    for ma in 0..=max {
        for nb in 0..=max {
            out.push(PndEntry {
                ma,
                nb,
                prob: pnd_patmsts(ma, nb, m, n, dp)?,
            });
        }
    }
    Ok(out)
}

/// Shchukin-Vogel inseparability witness; negative certifies entanglement.
pub fn sv_witness(m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    let nmn = normalization(m, n, dp)?;
    let n10 = normalization(m + 1, n, dp)?;
    let n01 = normalization(m, n + 1, dp)?;
    let (create, annihilate) = pair_moments(m, n, dp)?;
    Ok((n10 / nmn - 1.5) * (n01 / nmn - 1.5) - create * annihilate)
}

/// Printed special cases of the witness for `(0,1)`, `(1,0)` and `(1,1)`.
pub fn sv_witness_printed(m: u32, n: u32, dp: &DerivedParams) -> Option<f64> {
    let (b1, b2) = (dp.b1, dp.b2);
    match (m, n) {
        (0, 1) | (1, 0) => Some((dp.upsilon / b1 - 1.5) * (2.0 * b1 - 1.5) - 4.0 * b2 * b2),
        (1, 1) => {
            let t = b1 * (3.0 - dp.omega / dp.upsilon) - 1.5;
            let k = 2.0 * b1 * b1 + b2 * b2;
            Some(t * t - 4.0 * k * k * b2 * b2 / (dp.upsilon * dp.upsilon))
        }
        _ => None,
    }
}

/// Outcome of the witness threshold search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvThreshold {
    /// Smallest squeezing at which the witness changes sign.
    Crossing(f64),
    /// The witness is already negative as `r → 0⁺`.
    AlwaysSatisfied,
    /// No sign change anywhere on the bracket.
    NoCrossing,
}

impl SvThreshold {
    pub fn value(&self) -> Option<f64> {
        match self {
            SvThreshold::Crossing(r) => Some(*r),
            _ => None,
        }
    }
}

/// Smallest `r` in the bracket where the witness crosses zero.
///
/// A coarse scan locates the first sign change, then bisection refines it.
pub fn sv_threshold(m: u32, n: u32, nbar: f64) -> Result<SvThreshold> {
    let f = |r: f64| sv_witness(m, n, &DerivedParams::new(r, nbar));
    let (lo, hi) = SV_BRACKET;
    let f_lo = f(lo)?;
    if f_lo < 0.0 {
        return Ok(SvThreshold::AlwaysSatisfied);
    }
    let steps = ((hi - lo) / SV_SCAN_STEP).ceil() as u32;
    let mut a = lo;
    let mut fa = f_lo;
    for k in 1..=steps {
        let b = (lo + k as f64 * SV_SCAN_STEP).min(hi);
        let fb = f(b)?;
        if fa == 0.0 {
            return Ok(SvThreshold::Crossing(a));
        }
        if fa.signum() != fb.signum() {
            let (mut x0, mut x1) = (a, b);
            for _ in 0..SV_MAX_ITER {
                if x1 - x0 <= SV_TOL * 1e-3 {
                    break;
                }
                let mid = 0.5 * (x0 + x1);
                let fm = f(mid)?;
                if fm.signum() == fa.signum() {
                    x0 = mid;
                } else {
                    x1 = mid;
                }
            }
            return Ok(SvThreshold::Crossing(0.5 * (x0 + x1)));
        }
        a = b;
        fa = fb;
    }
    Ok(SvThreshold::NoCrossing)
}

/// Entanglement threshold of the photon-subtracted state, `½ ln(2n̄+1)`.
pub fn subtraction_benchmark_rc(nbar: f64) -> f64 {
    0.5 * (2.0 * nbar + 1.0).ln()
}

/// Fidelity of teleporting a coherent state with the photon-added resource.
pub fn fidelity_closed(m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    let g = 2.0 * dp.nbar + 1.0;
    let k = m + n;
    let nmn = normalization(m, n, dp)?;
    let up = (g * (2.0 * dp.r).exp() + 1.0).powi(k as i32);
    let down = g * (-2.0 * dp.r).exp() + 1.0;
    Ok(up / down * factorial(k) / (4f64.powi(k as i32) * nmn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_poly::gen_quad_closed;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn normalization_examples() {
        let dp = DerivedParams::new(0.3, 0.0);
        assert_eq!(normalization(0, 0, &dp).unwrap(), 1.0);
        let expected = 2.0 * 0.3f64.cosh().powi(4);
        assert!(rel(normalization(0, 2, &dp).unwrap(), expected) < 1e-14);
        let dp = DerivedParams::new(0.3, 0.2);
        assert!(rel(normalization(1, 1, &dp).unwrap(), dp.upsilon) < 1e-14);
    }

    #[test]
    fn normalization_matches_generating_function_and_is_symmetric() {
        for &(r, nbar) in &[(0.1, 0.0), (0.3, 0.2), (0.6, 1.0), (1.0, 0.01), (2.0, 5.0)] {
            let dp = DerivedParams::new(r, nbar);
            for m in 0..5 {
                for n in 0..5 {
                    let a = normalization(m, n, &dp).unwrap();
                    let b = gen_quad_closed(dp.b1, dp.b2, m, n).unwrap();
                    assert!(rel(a, b) < 1e-12, "N_{m},{n} at r={r}: {a} vs {b}");
                    assert!(rel(a, normalization(n, m, &dp).unwrap()) < 1e-12);
                    assert!(a > 0.0);
                }
            }
        }
    }

    #[test]
    fn mean_photons_limits() {
        let nbar = 0.4;
        let (na, nb) = mean_photons(0, 0, &DerivedParams::new(0.0, nbar)).unwrap();
        assert!(rel(na, nbar) < 1e-14 && rel(nb, nbar) < 1e-14);
        let r: f64 = 0.7;
        let (na, nb) = mean_photons(0, 0, &DerivedParams::new(r, 0.0)).unwrap();
        assert!(rel(na, r.sinh().powi(2)) < 1e-13 && rel(nb, na) < 1e-15);
    }

    #[test]
    fn cross_moment_limits() {
        let nbar = 0.3;
        assert!(rel(cross_moment(0, 0, &DerivedParams::new(0.0, nbar)).unwrap(), nbar * nbar) < 1e-13);
        let r: f64 = 0.45;
        let (s2, c2) = (r.sinh().powi(2), r.cosh().powi(2));
        let v = cross_moment(0, 0, &DerivedParams::new(r, 0.0)).unwrap();
        assert!(rel(v, s2 * s2 + s2 * c2) < 1e-13);
    }

    #[test]
    fn correlation_limits() {
        assert_eq!(cross_correlation_g(0, 0, &DerivedParams::new(0.0, 0.5)).unwrap(), 0.0);
        let r: f64 = 0.8;
        let g = cross_correlation_g(0, 0, &DerivedParams::new(r, 0.0)).unwrap();
        assert!(rel(g, 1.0 / r.tanh().powi(2)) < 1e-12);
        assert!(matches!(
            cross_correlation_g(0, 0, &DerivedParams::new(0.0, 0.0)),
            Err(Error::Degenerate(_))
        ));
        assert!(cross_correlation_g(0, 1, &DerivedParams::new(0.5, 0.01)).unwrap() > 0.0);
    }

    #[test]
    fn antibunching_limits() {
        let v = antibunching_r(0, 0, &DerivedParams::new(0.0, 0.6)).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
        let r: f64 = 0.5;
        let v = antibunching_r(0, 0, &DerivedParams::new(r, 0.0)).unwrap();
        assert!(rel(v, -1.0 / (2.0 * r).cosh()) < 1e-12);
        // printed special case disagrees at r = 0
        let printed = antibunching_r00_printed(&DerivedParams::new(0.0, 1.0));
        assert!((printed + 3.0).abs() < 1e-12);
    }

    #[test]
    fn antibunching_sign_change_near_point_one() {
        let f = |r: f64| antibunching_r(0, 1, &DerivedParams::new(r, 0.01)).unwrap();
        assert!(f(0.02) > 0.0);
        assert!(f(0.2) < 0.0);
    }

    #[test]
    fn pnd_limits() {
        let nbar: f64 = 0.35;
        let dp = DerivedParams::new(0.0, nbar);
        for ma in 0..5 {
            for nb in 0..5 {
                let th = |k: u32| nbar.powi(k as i32) / (nbar + 1.0).powi(k as i32 + 1);
                assert!(rel(pnd_tmsts(ma, nb, &dp).unwrap(), th(ma) * th(nb)) < 1e-12);
            }
        }
        let r: f64 = 0.6;
        let dp = DerivedParams::new(r, 1e-8);
        for ma in 0..5 {
            for nb in 0..5 {
                let expected = if ma == nb {
                    r.tanh().powi(2 * ma as i32) / r.cosh().powi(2)
                } else {
                    0.0
                };
                assert!((pnd_tmsts(ma, nb, &dp).unwrap() - expected).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn pnd_printed_form_agrees_off_singularity() {
        let dp = DerivedParams::new(0.4, 0.3);
        for ma in 0..5 {
            for nb in 0..5 {
                let a = pnd_tmsts(ma, nb, &dp).unwrap();
                let b = pnd_tmsts_printed(ma, nb, &dp).unwrap().unwrap();
                assert!(rel(a, b) < 1e-10, "({ma},{nb}) {a} vs {b}");
            }
        }
        let lit = pnd_tmsts_printed_literal(1, 3, &dp).unwrap().unwrap();
        assert!(rel(lit, pnd_tmsts(1, 3, &dp).unwrap()) > 1e-3);
    }

    #[test]
    fn pnd_patmsts_cases() {
        let dp = DerivedParams::new(0.3, 0.2);
        assert_eq!(pnd_patmsts(0, 5, 1, 0, &dp).unwrap(), 0.0);
        for ma in 0..4 {
            for nb in 0..4 {
                assert_eq!(pnd_patmsts(ma, nb, 0, 0, &dp).unwrap(), pnd_tmsts(ma, nb, &dp).unwrap());
            }
        }
        let dp = DerivedParams::new(0.1, 0.05);
        let total: f64 = pnd_table(6, 1, 1, &dp).unwrap().iter().map(|e| e.prob).sum();
        assert!((total - 1.0).abs() < 1e-4 && total < 1.0, "{total}");
    }

    #[test]
    fn sv_examples() {
        let dp = DerivedParams::new(0.45, 0.3);
        let v = sv_witness(0, 0, &dp).unwrap();
        assert!(rel(v, (dp.b1 - 1.5).powi(2) - dp.b2 * dp.b2) < 1e-13);
        assert!(sv_witness(0, 1, &DerivedParams::new(0.2, 0.0)).unwrap() < 0.0);
        for &(m, n) in &[(0, 1), (1, 0), (1, 1)] {
            let a = sv_witness(m, n, &dp).unwrap();
            let b = sv_witness_printed(m, n, &dp).unwrap();
            assert!(rel(a, b) < 1e-12);
        }
        assert!(rel(sv_witness(1, 2, &dp).unwrap(), sv_witness(2, 1, &dp).unwrap()) < 1e-12);
    }

    #[test]
    fn thresholds() {
        let ra = sv_threshold(0, 1, 1.0).unwrap().value().unwrap();
        // Root of the (0,1) witness at n̄ = 1, found independently with mpmath.
        assert!((ra - 0.294694223547).abs() < 1e-5, "r_a = {ra}");
        assert_eq!(sv_threshold(0, 1, 1e-9).unwrap(), SvThreshold::AlwaysSatisfied);
        let r11 = sv_threshold(1, 1, 1.0).unwrap().value().unwrap();
        assert!(r11 < subtraction_benchmark_rc(1.0));
        assert_eq!(subtraction_benchmark_rc(0.0), 0.0);
        assert!((subtraction_benchmark_rc(1.0) - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((subtraction_benchmark_rc(0.2) - 0.5 * 1.4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn fidelity_printed_limits() {
        assert!((fidelity_closed(0, 0, &DerivedParams::new(0.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((fidelity_closed(0, 1, &DerivedParams::new(0.0, 0.0)).unwrap() - 0.25).abs() < 1e-15);
        for &r in &[0.2f64, 0.5, 1.0] {
            let t = r.tanh();
            let dp = DerivedParams::new(r, 0.0);
            assert!(rel(fidelity_closed(0, 0, &dp).unwrap(), (1.0 + t) / 2.0) < 1e-13);
            let f11 = (1.0 + t).powi(3) / (4.0 * (1.0 + t * t));
            assert!(rel(fidelity_closed(1, 1, &dp).unwrap(), f11) < 1e-13);
            let f01 = (1.0 + t) / (4.0 * (1.0 - t)) / r.cosh().powi(2);
            assert!(rel(fidelity_closed(0, 1, &dp).unwrap(), f01) < 1e-13);
        }
    }

    #[test]
    fn classical_limit_crossing() {
        for &nbar in &[0.0, 0.2, 1.0, 3.0] {
            let rc = subtraction_benchmark_rc(nbar);
            let f = |r: f64| fidelity_closed(0, 0, &DerivedParams::new(r, nbar)).unwrap() - 0.5;
            let (mut lo, mut hi) = (0.0, 3.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!((0.5 * (lo + hi) - rc).abs() < 1e-9);
        }
    }

    #[test]
    fn g_versus_r_on_the_legend_set() {
        // n̄ = 0.01, r from 0.2 to 1.5 in steps of 0.05. Only the
        // doubly-added states grow monotonically; (0,0) follows coth²r down.
        let trend = |m, n| {
            let g: Vec<f64> = (4..=30)
                .map(|k| cross_correlation_g(m, n, &DerivedParams::new(0.05 * k as f64, 0.01)).unwrap())
                .collect();
            let up = g.windows(2).all(|w| w[1] > w[0]);
            let down = g.windows(2).all(|w| w[1] < w[0]);
            (up, down)
        };
        assert_eq!(trend(1, 1), (true, false));
        assert_eq!(trend(1, 2), (true, false));
        assert_eq!(trend(0, 0), (false, true));
        assert_eq!(trend(0, 1), (false, false));
        assert_eq!(trend(0, 2), (false, false));
    }
}
