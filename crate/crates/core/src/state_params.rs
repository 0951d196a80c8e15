//! Physical inputs of the state family and every derived scalar the closed
//! forms use, plus the Gaussian P and Q functions of the underlying
//! two-mode squeezed thermal state.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_poly::DEFAULT_ORDER_CAP;

/// Relative guard for the singular manifolds of `χ` and of the P function.
pub const SINGULAR_REL_EPS: f64 = 1e-12;

/// Photons added to each mode, squeezing and thermal occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub m: u32,
    pub n: u32,
    pub r: f64,
    pub nbar: f64,
}

impl StateParams {
    pub fn new(m: u32, n: u32, r: f64, nbar: f64) -> Result<Self> {
        let p = StateParams { m, n, r, nbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "squeezing r = {} must be finite and >= 0",
                self.r
            )));
        }
        if !(self.nbar.is_finite() && self.nbar >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "thermal nbar = {} must be finite and >= 0",
                self.nbar
            )));
        }
        if self.m + self.n > DEFAULT_ORDER_CAP {
            return Err(Error::InvalidParams(format!(
                "m + n = {} exceeds the order cap {}",
                self.m + self.n,
                DEFAULT_ORDER_CAP
            )));
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedParams {
        DerivedParams::new(self.r, self.nbar)
    }
}

/// Auxiliary scalars of the squeezed thermal state.
///
/// `a*` are the normal-ordering coefficients, `at*` the anti-normal ones
/// (these diverge on the manifold `(n̄+1)² = (2n̄+1)cosh²r`, see
/// [`DerivedParams::p_singular`]). `chi` is `None` where its denominator
/// vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub r: f64,
    pub nbar: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// `1 − A₃`, evaluated as `n̄(n̄+1)/ν` to keep precision at small `n̄`.
    pub one_minus_a3: f64,
    pub at1: f64,
    pub at2: f64,
    pub at3: f64,
    pub b1: f64,
    pub b2: f64,
    pub omega: f64,
    pub upsilon: f64,
    pub nu: f64,
    pub mu: f64,
    pub chi: Option<f64>,
    pub k1: f64,
    pub k3: f64,
    pub p_singular: bool,
}

impl DerivedParams {
    pub fn new(r: f64, nbar: f64) -> Self {
        let ch = r.cosh();
        let sh = r.sinh();
        let ch2 = ch * ch;
        let c2r = (2.0 * r).cosh();
        let c4r = (4.0 * r).cosh();
        let th = r.tanh();
        let g = 2.0 * nbar + 1.0;
        let np1 = nbar + 1.0;
        let xth = nbar * np1;

        let nu = g * ch2 + nbar * nbar;
        let a1 = 1.0 / (ch2 * (np1 * np1 - nbar * nbar * th * th));
        let a2 = g * sh * ch / nu;
        let a3 = (ch2 + nbar * c2r) / nu;

        let den_p = np1 * np1 - g * ch2;
        let p_singular = den_p.abs() <= SINGULAR_REL_EPS * np1 * np1;
        let at1 = 1.0 / den_p;
        let at2 = g * sh * ch / den_p;
        let at3 = (sh * sh + nbar * c2r) / den_p;

        let b1 = ch2 + nbar * c2r;
        let b2 = g * sh * ch;
        let omega = nbar * nbar + g * ch2;
        let upsilon = xth * c4r + (nbar + ch2) * c2r;
        let mu = g * ch2 - np1 * np1;

        let s = g * (2.0 * r).sinh();
        let num = s * s + 4.0 * xth * xth;
        let den = s * s - 4.0 * xth * xth;
        let chi = if den.abs() <= SINGULAR_REL_EPS * num {
            None
        } else {
            Some(num / den)
        };

        DerivedParams {
            r,
            nbar,
            a1,
            a2,
            a3,
            one_minus_a3: xth / nu,
            at1,
            at2,
            at3,
            b1,
            b2,
            omega,
            upsilon,
            nu,
            mu,
            chi,
            k1: (nbar + ch2) / g,
            k3: sh * ch / g,
            p_singular,
        }
    }
}

/// Derives every auxiliary scalar from the physical inputs.
pub fn derive(p: &StateParams) -> Result<DerivedParams> {
    p.validate()?;
    Ok(p.derived())
}

/// Glauber-Sudarshan P function of the squeezed thermal state.
///
/// Not positive in general; on the singular manifold the returned value is
/// whatever the unregularized Gaussian gives (check `dp.p_singular`).
pub fn p_function_tmsts(dp: &DerivedParams, alpha: Complex64, beta: Complex64) -> f64 {
    let cross = 2.0 * (alpha * beta).re;
    let radial = alpha.norm_sqr() + beta.norm_sqr();
    dp.at1 * (dp.at2 * cross - dp.at3 * radial).exp()
}

/// Husimi Q function, `⟨αβ|ρ|αβ⟩/π²`.
pub fn q_function_tmsts(dp: &DerivedParams, alpha: Complex64, beta: Complex64) -> f64 {
    let cross = 2.0 * (alpha * beta).re;
    let radial = alpha.norm_sqr() + beta.norm_sqr();
    dp.a1 * (dp.a2 * cross - dp.a3 * radial).exp() / (PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RS: [f64; 6] = [0.0, 0.1, 0.3, 0.6, 1.0, 2.0];
    const NBARS: [f64; 5] = [0.0, 0.01, 0.2, 1.0, 5.0];

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn vacuum_input_collapses() {
        let dp = DerivedParams::new(0.0, 0.0);
        assert_eq!((dp.a1, dp.a2, dp.a3), (1.0, 0.0, 1.0));
        assert_eq!((dp.b1, dp.b2), (1.0, 0.0));
        assert_eq!((dp.omega, dp.upsilon), (1.0, 1.0));
        assert!(dp.p_singular);
    }

    #[test]
    fn squeezed_vacuum_limits() {
        for &r in &RS[1..] {
            let dp = DerivedParams::new(r, 0.0);
            let ch2 = r.cosh().powi(2);
            assert!(rel(dp.omega, ch2) < 1e-14);
            assert!(rel(dp.b1, ch2) < 1e-14);
            assert!(rel(dp.upsilon / dp.omega, (2.0 * r).cosh()) < 1e-13);
        }
    }

    #[test]
    fn derived_invariants_hold_on_sweep() {
        for &r in &RS {
            for &nbar in &NBARS {
                let dp = DerivedParams::new(r, nbar);
                let d = dp.a3 * dp.a3 - dp.a2 * dp.a2;
                assert!(rel(dp.a1 / d, 1.0) < 1e-12, "A1/(A3²−A2²) at r={r} n̄={nbar}");
                assert!(rel(dp.b1, dp.a3 / d) < 1e-12);
                if dp.b2 != 0.0 {
                    assert!(rel(dp.b2, dp.a2 / d) < 1e-12);
                } else {
                    assert_eq!(dp.a2, 0.0);
                }
                assert!(rel(dp.b1 * dp.b1 - dp.b2 * dp.b2, dp.omega) < 1e-12);
                assert!(rel(dp.b1 * dp.b1 + dp.b2 * dp.b2, dp.upsilon) < 1e-12);
                assert!(rel(dp.nu, dp.omega) < 1e-12);
                assert!(rel(1.0 - dp.a3, dp.one_minus_a3) < 1e-9 || (1.0 - dp.a3 - dp.one_minus_a3).abs() < 1e-15);
                let x2 = (nbar * (nbar + 1.0)).powi(2);
                if let Some(chi) = dp.chi {
                    let lhs = chi * (dp.b2 * dp.b2 - x2);
                    assert!(rel(lhs, dp.b2 * dp.b2 + x2) < 1e-12);
                }
                if dp.mu.abs() > 1e-12 {
                    assert!(rel(dp.at1 * dp.mu, -1.0) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn chi_flagged_on_singular_manifold() {
        // B₂ = n̄(n̄+1) happens for n̄ = 1 at (2n̄+1) sinh r cosh r = 2.
        let nbar: f64 = 1.0;
        let r = 0.5 * (4.0 / 3.0f64).asinh();
        let dp = DerivedParams::new(r, nbar);
        assert!(dp.chi.is_none());
    }

    #[test]
    fn p_and_q_peaks() {
        let nbar = 0.7;
        let dp = DerivedParams::new(0.0, nbar);
        let z = Complex64::new(0.0, 0.0);
        assert!(rel(p_function_tmsts(&dp, z, z), 1.0 / (nbar * nbar)) < 1e-14);
        let dp = DerivedParams::new(0.37, 0.4);
        assert!(rel(p_function_tmsts(&dp, z, z), dp.at1) < 1e-15);
        assert!(rel(q_function_tmsts(&dp, z, z), dp.a1 / (PI * PI)) < 1e-15);
        let vac = DerivedParams::new(0.0, 0.0);
        assert!(rel(q_function_tmsts(&vac, z, z), 1.0 / (PI * PI)) < 1e-15);
    }

    #[test]
    fn q_is_nonnegative() {
        for &r in &RS {
            for &nbar in &NBARS {
                let dp = DerivedParams::new(r, nbar);
                for k in 0..50 {
                    let t = k as f64 * 0.37;
                    let a = Complex64::new(t.sin() * 2.0, (1.3 * t).cos());
                    let b = Complex64::new((0.7 * t).cos() * 1.5, -t.sin());
                    assert!(q_function_tmsts(&dp, a, b) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(StateParams::new(0, 0, -0.1, 0.0).is_err());
        assert!(StateParams::new(0, 0, 0.1, f64::NAN).is_err());
        assert!(StateParams::new(20, 10, 0.1, 0.0).is_err());
        assert!(StateParams::new(1, 2, 0.3, 0.2).is_ok());
    }
}
