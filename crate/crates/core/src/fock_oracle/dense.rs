//! Dense operators on a truncated Fock space. Only used at small truncations,
//! to cross-check the sector-blocked density and to test operator identities.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::expm::expm;
use crate::error::Result;

/// A dense operator on one mode (`modes == 1`, size `D×D`) or two modes
/// (`modes == 2`, size `D²×D²`, row index `n_a·D + n_b`).
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub dim_per_mode: usize,
    pub modes: u8,
    pub entries: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn single(dim: usize, entries: DMatrix<Complex64>) -> Self {
        assert_eq!(entries.shape(), (dim, dim));
        FockOperator {
            dim_per_mode: dim,
            modes: 1,
            entries,
        }
    }

    pub fn two_mode(dim: usize, entries: DMatrix<Complex64>) -> Self {
        assert_eq!(entries.shape(), (dim * dim, dim * dim));
        FockOperator {
            dim_per_mode: dim,
            modes: 2,
            entries,
        }
    }

    pub fn index(&self, na: usize, nb: usize) -> usize {
        na * self.dim_per_mode + nb
    }

    /// `self ⊗ other` for two single-mode operators.
    pub fn kron(&self, other: &FockOperator) -> FockOperator {
        assert!(self.modes == 1 && other.modes == 1 && self.dim_per_mode == other.dim_per_mode);
        FockOperator::two_mode(self.dim_per_mode, self.entries.kronecker(&other.entries))
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            entries: self.entries.adjoint(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &FockOperator) -> FockOperator {
        assert_eq!((self.modes, self.dim_per_mode), (other.modes, other.dim_per_mode));
        FockOperator {
            entries: &self.entries * &other.entries,
            ..self.clone()
        }
    }

    pub fn exp(&self, tol: f64) -> Result<FockOperator> {
        Ok(FockOperator {
            entries: expm(&self.entries, tol)?,
            ..self.clone()
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }
}

/// Single-mode `(a, a†, 1)` truncated to `dim` levels.
pub fn build_ladder(dim: usize) -> (FockOperator, FockOperator, FockOperator) {
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    (
        FockOperator::single(dim, a),
        FockOperator::single(dim, adag),
        FockOperator::single(dim, DMatrix::identity(dim, dim)),
    )
}

/// Single-mode parity `(−1)^{a†a}`.
pub fn parity(dim: usize) -> FockOperator {
    let d = nalgebra::DVector::from_fn(dim, |k, _| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    FockOperator::single(dim, DMatrix::from_diagonal(&d))
}

/// `exp[r(a†b† − ab)]` on the two-mode truncation.
pub fn squeeze_dense(dim: usize, r: f64, tol: f64) -> Result<FockOperator> {
    let (a, adag, _) = build_ladder(dim);
    let ab = a.kron(&a);
    let adbd = adag.kron(&adag);
    let gen = FockOperator::two_mode(dim, (adbd.entries - ab.entries).scale(r));
    gen.exp(tol)
}

/// Single-mode displacement `exp(αa† − α*a)` at truncation `dim`.
pub fn displacement_dense(dim: usize, alpha: Complex64, tol: f64) -> Result<FockOperator> {
    let (a, adag, _) = build_ladder(dim);
    let gen = adag.entries * alpha - a.entries * alpha.conj();
    FockOperator::single(dim, gen).exp(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn ladder_basics() {
        let d = 8;
        let (a, adag, id) = build_ladder(d);
        let mut one = nalgebra::DVector::<Complex64>::zeros(d);
        one[1] = Complex64::new(1.0, 0.0);
        let down = &a.entries * &one;
        assert!((down[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(adag, a.adjoint());
        let comm = &a.entries * &adag.entries - &adag.entries * &a.entries;
        let inner = comm.view((0, 0), (d - 1, d - 1)) - id.entries.view((0, 0), (d - 1, d - 1));
        assert!(max_abs(&inner.into_owned()) < 1e-14);
        let num = (&adag.entries * &a.entries).map(|z| z.re);
        let eig = num.symmetric_eigenvalues();
        let mut ev: Vec<f64> = eig.iter().copied().collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn squeeze_conjugation_on_interior() {
        // S a† S† = a† cosh r − b sinh r and the b-mode partner, checked on
        // states well inside the truncation.
        let d = 24;
        let r = 0.3;
        let s = squeeze_dense(d, r, 1e-13).unwrap();
        let (a, adag, id) = build_ladder(d);
        let ad_full = adag.kron(&id);
        let bd_full = id.kron(&adag);
        let a_full = a.kron(&id);
        let b_full = id.kron(&a);
        let lhs_a = s.mul(&ad_full).mul(&s.adjoint());
        let lhs_b = s.mul(&bd_full).mul(&s.adjoint());
        let rhs_a = ad_full.entries.scale(r.cosh()) - b_full.entries.scale(r.sinh());
        let rhs_b = bd_full.entries.scale(r.cosh()) - a_full.entries.scale(r.sinh());
        let interior = 6;
        for na in 0..interior {
            for nb in 0..interior {
                for ma in 0..interior {
                    for mb in 0..interior {
                        let (i, j) = (s.index(na, nb), s.index(ma, mb));
                        assert!((lhs_a.entries[(i, j)] - rhs_a[(i, j)]).norm() < 1e-8);
                        assert!((lhs_b.entries[(i, j)] - rhs_b[(i, j)]).norm() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn displacement_unitary_and_coherent_column() {
        let d = 60;
        for k in 0..10 {
            let t = k as f64;
            let alpha = Complex64::new(0.9 * (0.7 * t).cos(), 0.8 * (1.3 * t).sin());
            let op = displacement_dense(d, alpha, 1e-13).unwrap();
            let u = &op.entries * op.entries.adjoint();
            let err = max_abs(&(u - DMatrix::identity(d, d)));
            assert!(err < 1e-10, "unitarity defect {err}");
            let pref = (-alpha.norm_sqr() / 2.0).exp();
            let mut fact = 1.0;
            for n in 0..10 {
                if n > 0 {
                    fact *= n as f64;
                }
                let want = alpha.powu(n as u32) * pref / fact.sqrt();
                assert!((op.entries[(n, 0)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parity_flips_ladder() {
        let d = 10;
        let (a, _, _) = build_ladder(d);
        let p = parity(d);
        let conj = p.mul(&a).mul(&p);
        assert!(max_abs(&(conj.entries + &a.entries)) < 1e-15);
    }
}
