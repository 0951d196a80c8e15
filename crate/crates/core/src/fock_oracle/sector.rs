//! Density matrices stored block-diagonally in `Δ = n_a − n_b`.
//!
//! Thermal products are diagonal, two-mode squeezing conserves `Δ` and
//! photon addition shifts it by `m − n`, so every state the oracle builds
//! is block-diagonal in `Δ` with real entries. Block `Δ` holds the states
//! `(start + j + Δ⁺, start + j + Δ⁻)` for `j = 0..size`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::dense::FockOperator;
use super::expm::expm;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub delta: i64,
    pub start: usize,
    pub mat: DMatrix<f64>,
}

impl Block {
    pub fn state(&self, j: usize) -> (usize, usize) {
        let k = self.start + j;
        (k + self.delta.max(0) as usize, k + (-self.delta).max(0) as usize)
    }

    fn local(&self, na: usize, nb: usize) -> Option<usize> {
        let lo = na.min(nb);
        if lo < self.start {
            return None;
        }
        let j = lo - self.start;
        (j < self.mat.nrows()).then_some(j)
    }
}

/// A two-mode density (or unnormalized positive operator) with every
/// occupied level below `dim` in each mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorDensity {
    pub dim: usize,
    /// Sorted by `delta`, contiguous.
    pub blocks: Vec<Block>,
}

impl SectorDensity {
    fn block(&self, delta: i64) -> Option<&Block> {
        let first = self.blocks.first()?.delta;
        let idx = delta - first;
        if idx < 0 {
            return None;
        }
        self.blocks.get(idx as usize)
    }

    /// `⟨na, nb| ρ |ma, mb⟩`.
    pub fn element(&self, na: usize, nb: usize, ma: usize, mb: usize) -> f64 {
        let delta = na as i64 - nb as i64;
        if delta != ma as i64 - mb as i64 {
            return 0.0;
        }
        let Some(b) = self.block(delta) else { return 0.0 };
        match (b.local(na, nb), b.local(ma, mb)) {
            (Some(i), Some(j)) => b.mat[(i, j)],
            _ => 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.mat.trace()).sum()
    }

    pub fn scale_mut(&mut self, s: f64) {
        for b in &mut self.blocks {
            b.mat *= s;
        }
    }

    /// Total population on levels `>= dim − width` of either mode.
    pub fn edge_population(&self, width: usize) -> f64 {
        let cut = self.dim.saturating_sub(width);
        let mut p = 0.0;
        for b in &self.blocks {
            for j in 0..b.mat.nrows() {
                let (na, nb) = b.state(j);
                if na >= cut || nb >= cut {
                    p += b.mat[(j, j)];
                }
            }
        }
        p
    }

    /// Largest `|ρ_ij − ρ_ji*|` (blocks are real, so this is plain asymmetry).
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            let n = b.mat.nrows();
            for i in 0..n {
                for j in (i + 1)..n {
                    worst = worst.max((b.mat[(i, j)] - b.mat[(j, i)]).abs());
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue over all blocks (of the symmetrized block).
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let sym = (&b.mat + b.mat.transpose()) * 0.5;
                sym.symmetric_eigenvalues().min()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `tr(ρ O)` for an operator that factorizes as `X ⊗ Y`, given the
    /// single-mode matrices (at least `dim × dim`).
    pub fn trace_product(&self, x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in &self.blocks {
            let n = b.mat.nrows();
            for ci in 0..n {
                let (i, j) = b.state(ci);
                for ck in 0..n {
                    let rho = b.mat[(ci, ck)];
                    if rho == 0.0 {
                        continue;
                    }
                    let (k, l) = b.state(ck);
                    acc += x[(k, i)] * y[(l, j)] * rho;
                }
            }
        }
        acc
    }

    /// Expand into a dense two-mode operator (small `dim` only).
    pub fn to_dense(&self) -> FockOperator {
        let d = self.dim;
        let mut m = DMatrix::<Complex64>::zeros(d * d, d * d);
        for b in &self.blocks {
            let n = b.mat.nrows();
            for i in 0..n {
                let (na, nb) = b.state(i);
                for j in 0..n {
                    let (ma, mb) = b.state(j);
                    m[(na * d + nb, ma * d + mb)] = Complex64::new(b.mat[(i, j)], 0.0);
                }
            }
        }
        FockOperator::two_mode(d, m)
    }
}

/// Renormalized truncated thermal weights `n̄^k/(n̄+1)^{k+1}`, `k < dim`.
pub fn thermal_weights(nbar: f64, dim: usize) -> Vec<f64> {
    let q = nbar / (nbar + 1.0);
    let mut w: Vec<f64> = (0..dim).map(|k| q.powi(k as i32) / (nbar + 1.0)).collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// `exp[r(a†b† − ab)]` restricted to sector `Δ` of a `dim`-level truncation.
///
/// The generator is a real antisymmetric tridiagonal chain.
pub fn squeeze_block(delta: i64, dim: usize, r: f64, tol: f64) -> Result<DMatrix<f64>> {
    let size = dim - delta.unsigned_abs() as usize;
    let (pa, pb) = (delta.max(0) as f64, (-delta).max(0) as f64);
    let mut g = DMatrix::<f64>::zeros(size, size);
    for k in 0..size.saturating_sub(1) {
        let c = r * ((k as f64 + pa + 1.0) * (k as f64 + pb + 1.0)).sqrt();
        g[(k + 1, k)] = c;
        g[(k, k + 1)] = -c;
    }
    expm(&g, tol)
}

/// Thermal ⊗ thermal, squeezed: `S ρ_th ⊗ ρ_th S†` on a `dim`-level truncation.
pub fn squeezed_thermal(r: f64, nbar: f64, dim: usize, tol: f64) -> Result<SectorDensity> {
    let w = thermal_weights(nbar, dim);
    let d = dim as i64;
    let mut blocks = Vec::with_capacity(2 * dim - 1);
    for delta in -(d - 1)..d {
        let size = dim - delta.unsigned_abs() as usize;
        let (pa, pb) = (delta.max(0) as usize, (-delta).max(0) as usize);
        let diag = DVector::from_fn(size, |k, _| w[k + pa] * w[k + pb]);
        let mat = if r == 0.0 {
            DMatrix::from_diagonal(&diag)
        } else {
            let e = squeeze_block(delta, dim, r, tol)?;
            let mut ew = e.clone();
            for (j, mut col) in ew.column_iter_mut().enumerate() {
                col *= diag[j];
            }
            ew * e.transpose()
        };
        blocks.push(Block { delta, start: 0, mat });
    }
    Ok(SectorDensity { dim, blocks })
}

/// `a†^m b†^n ρ a^m b^n`, exact: the result lives on `dim + max(m, n)` levels.
pub fn add_photons(rho: &SectorDensity, m: u32, n: u32) -> SectorDensity {
    let (m, n) = (m as usize, n as usize);
    let rise = |k: usize, p: usize| -> f64 { (1..=p).map(|i| (k + i) as f64).product::<f64>().sqrt() };
    let blocks = rho
        .blocks
        .iter()
        .map(|b| {
            let size = b.mat.nrows();
            let f: Vec<f64> = (0..size)
                .map(|j| {
                    let (na, nb) = b.state(j);
                    rise(na, m) * rise(nb, n)
                })
                .collect();
            let mat = DMatrix::from_fn(size, size, |i, j| f[i] * b.mat[(i, j)] * f[j]);
            let (na0, nb0) = b.state(0);
            Block {
                delta: b.delta + m as i64 - n as i64,
                start: (na0 + m).min(nb0 + n),
                mat,
            }
        })
        .collect();
    SectorDensity {
        dim: rho.dim + m.max(n),
        blocks,
    }
}
