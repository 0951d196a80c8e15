//! Brute-force ground truth on a truncated two-mode Fock space.
//!
//! Nothing in here touches the closed forms: the state is built from thermal
//! weights, a matrix exponential of the squeezing generator and explicit
//! creation operators, and observables are traces against ladder words,
//! displacement operators and displaced parity.

mod dense;
mod expm;
mod sector;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use dense::{build_ladder, displacement_dense, parity, squeeze_dense, FockOperator};
pub use expm::expm;
pub use sector::{add_photons, squeezed_thermal, thermal_weights, Block, SectorDensity};

use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;
use crate::state_params::StateParams;

/// Environment variable that overrides [`OracleConfig::max_dim`].
pub const MAX_DIM_ENV: &str = "PATMSTS_MAX_DIM";

/// Truncation and accuracy knobs of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Largest accepted change of trace/norm between successive truncations,
    /// and largest accepted population on the last four levels.
    pub trunc_tol: f64,
    /// Levels per mode before giving up.
    pub max_dim: usize,
    pub expm_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            trunc_tol: 1e-10,
            max_dim: 256,
            expm_tol: 1e-13,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.trunc_tol > 0.0 && self.trunc_tol < 1.0) {
            return Err(Error::InvalidParams(format!(
                "trunc_tol = {} must lie in (0, 1)",
                self.trunc_tol
            )));
        }
        if self.max_dim < 4 {
            return Err(Error::InvalidParams(format!(
                "max_dim = {} must be at least 4",
                self.max_dim
            )));
        }
        if !(self.expm_tol > 0.0 && self.expm_tol < 1e-3) {
            return Err(Error::InvalidParams(format!(
                "expm_tol = {} out of range",
                self.expm_tol
            )));
        }
        Ok(())
    }

    /// Applies `PATMSTS_MAX_DIM` if set.
    pub fn with_env_overrides(mut self) -> Result<Self> {
        if let Ok(v) = std::env::var(MAX_DIM_ENV) {
            self.max_dim = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("{MAX_DIM_ENV}={v} is not an integer")))?;
        }
        Ok(self)
    }
}

/// One of the four single-mode ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ladder {
    A,
    Adag,
    B,
    Bdag,
}

/// A normalized photon-added state together with its normalization.
#[derive(Debug, Clone)]
pub struct OracleState {
    pub params: StateParams,
    pub rho: SectorDensity,
    /// `tr(a†^m b†^n ρ^S a^m b^n)`.
    pub norm: f64,
    /// Levels per mode of the squeezed thermal state before photon addition.
    pub dim_used: usize,
}

/// Size of the next truncation: steps of 4, growing to about a quarter of
/// the current size past 32 levels.
fn next_dim(d: usize) -> usize {
    d + 4 * (d / 16).max(1)
}

type RhoKey = (u64, u64, usize);

/// Small cache of squeezed thermal states, bounded by the number of stored
/// matrix entries.
struct RhoCache {
    entries: Vec<(RhoKey, Arc<SectorDensity>)>,
}

const RHO_CACHE_CELLS: usize = 24_000_000;

fn cells(rho: &SectorDensity) -> usize {
    rho.blocks.iter().map(|b| b.mat.len()).sum()
}

static RHO_CACHE: Mutex<RhoCache> = Mutex::new(RhoCache { entries: Vec::new() });

fn squeezed_thermal_cached(r: f64, nbar: f64, dim: usize, tol: f64) -> Result<Arc<SectorDensity>> {
    let key = (r.to_bits(), nbar.to_bits(), dim);
    {
        let mut cache = RHO_CACHE.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(pos) = cache.entries.iter().position(|(k, _)| *k == key) {
            let hit = cache.entries.remove(pos);
            let rho = hit.1.clone();
            cache.entries.insert(0, hit);
            return Ok(rho);
        }
    }
    let rho = Arc::new(squeezed_thermal(r, nbar, dim, tol)?);
    let mut cache = RHO_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    cache.entries.insert(0, (key, rho.clone()));
    let mut total = 0;
    let mut keep = 0;
    for (_, v) in &cache.entries {
        total += cells(v);
        if total > RHO_CACHE_CELLS && keep > 0 {
            break;
        }
        keep += 1;
    }
    cache.entries.truncate(keep);
    Ok(rho)
}

fn build_at(params: &StateParams, dim: usize, cfg: &OracleConfig) -> Result<(SectorDensity, f64)> {
    let rho_s = squeezed_thermal_cached(params.r, params.nbar, dim, cfg.expm_tol)?;
    let mut rho = add_photons(&rho_s, params.m, params.n);
    let norm = rho.trace();
    rho.scale_mut(1.0 / norm);
    Ok((rho, norm))
}

fn select_and_build(params: &StateParams, cfg: &OracleConfig) -> Result<OracleState> {
    params.validate()?;
    cfg.validate()?;
    let shift = params.m.max(params.n) as usize;
    let mut dim = 4;
    let mut prev = build_at(params, dim, cfg)?;
    loop {
        let next = next_dim(dim);
        if next > cfg.max_dim {
            return Err(Error::TruncationExceeded {
                max_dim: cfg.max_dim,
                tol: cfg.trunc_tol,
            });
        }
        let cur = build_at(params, next, cfg)?;
        let dnorm = (cur.1 - prev.1).abs() / cur.1;
        if dnorm <= cfg.trunc_tol && prev.0.edge_population((dim / 4).min(4) + shift) <= cfg.trunc_tol {
            return Ok(OracleState {
                params: *params,
                rho: prev.0,
                norm: prev.1,
                dim_used: dim,
            });
        }
        prev = cur;
        dim = next;
    }
}

/// Smallest truncation (on the step schedule 4, 8, 12, …) whose norm agrees
/// with the next one to `trunc_tol` and whose last four levels (one at
/// `D = 4`) hold less than `trunc_tol` of the population.
pub fn truncation_select(params: &StateParams, cfg: &OracleConfig) -> Result<usize> {
    Ok(select_and_build(params, cfg)?.dim_used)
}

/// Builds the normalized photon-added squeezed thermal state.
pub fn build_patmsts(params: &StateParams, cfg: &OracleConfig) -> Result<OracleState> {
    select_and_build(params, cfg)
}

/// Builds at a fixed truncation, skipping the selection loop.
pub fn build_patmsts_at(params: &StateParams, dim: usize, cfg: &OracleConfig) -> Result<OracleState> {
    params.validate()?;
    let (rho, norm) = build_at(params, dim, cfg)?;
    Ok(OracleState {
        params: *params,
        rho,
        norm,
        dim_used: dim,
    })
}

/// Applies a ladder word (matrix-product order, rightmost first) to
/// `|na, nb⟩`; `None` if it is annihilated.
fn apply_word(word: &[Ladder], na: usize, nb: usize) -> Option<(f64, usize, usize)> {
    let (mut a, mut b, mut c) = (na, nb, 1.0f64);
    for op in word.iter().rev() {
        match op {
            Ladder::A => {
                if a == 0 {
                    return None;
                }
                c *= (a as f64).sqrt();
                a -= 1;
            }
            Ladder::Adag => {
                a += 1;
                c *= (a as f64).sqrt();
            }
            Ladder::B => {
                if b == 0 {
                    return None;
                }
                c *= (b as f64).sqrt();
                b -= 1;
            }
            Ladder::Bdag => {
                b += 1;
                c *= (b as f64).sqrt();
            }
        }
    }
    Some((c, a, b))
}

/// `tr(ρ O)` with `O` the product of `word`.
pub fn oracle_expectation(rho: &SectorDensity, word: &[Ladder]) -> Complex64 {
    let mut acc = 0.0;
    for blk in &rho.blocks {
        for j in 0..blk.mat.nrows() {
            let (na, nb) = blk.state(j);
            if let Some((c, ya, yb)) = apply_word(word, na, nb) {
                acc += c * rho.element(na, nb, ya, yb);
            }
        }
    }
    Complex64::new(acc, 0.0)
}

/// `⟨ma, nb|ρ|ma, nb⟩`.
pub fn oracle_pnd(rho: &SectorDensity, ma: usize, nb: usize) -> f64 {
    rho.element(ma, nb, ma, nb)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Displacement,
    DisplacedParity,
}

type DispKey = (u64, Kind);

static DISP_CACHE: Mutex<Option<HashMap<DispKey, Arc<DMatrix<f64>>>>> = Mutex::new(None);

/// Real single-mode matrix for `x ≥ 0`: either `D(x)` or `D(x) Π D(x)†`,
/// computed on a padded truncation and cut back to `dim` levels.
fn real_single_mode(x: f64, kind: Kind, dim: usize, tol: f64) -> Result<Arc<DMatrix<f64>>> {
    let key = (x.to_bits(), kind);
    {
        let guard = DISP_CACHE.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(m) = guard.as_ref().and_then(|c| c.get(&key)) {
            if m.nrows() >= dim {
                return Ok(m.clone());
            }
        }
    }
    // Round up so that nearby requests share one computation.
    let keep = dim.div_ceil(32) * 32;
    let pad = keep + 32 + (x * x + 8.0 * x * (keep as f64).sqrt()).ceil() as usize;
    let mut g = DMatrix::<f64>::zeros(pad, pad);
    for k in 1..pad {
        let s = x * (k as f64).sqrt();
        g[(k, k - 1)] = s;
        g[(k - 1, k)] = -s;
    }
    let e = expm(&g, tol)?;
    let full = match kind {
        Kind::Displacement => e,
        Kind::DisplacedParity => {
            let mut ep = e.clone();
            for (k, mut col) in ep.column_iter_mut().enumerate() {
                if k % 2 == 1 {
                    col.neg_mut();
                }
            }
            ep * e.transpose()
        }
    };
    let m = Arc::new(full.view((0, 0), (keep, keep)).into_owned());
    let mut guard = DISP_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    guard.get_or_insert_with(HashMap::new).insert(key, m.clone());
    Ok(m)
}

/// Complex `dim × dim` matrix for amplitude `z`, from the real one at `|z|`
/// via the phase rotation `e^{iθ a†a}`.
fn single_mode(z: Complex64, kind: Kind, dim: usize, tol: f64) -> Result<DMatrix<Complex64>> {
    if !z.is_finite() {
        return Err(Error::NonFinite("phase-space point"));
    }
    let (x, theta) = z.to_polar();
    let m = real_single_mode(x, kind, dim, tol)?;
    Ok(DMatrix::from_fn(dim, dim, |k, i| {
        Complex64::from_polar(m[(k, i)], theta * (k as f64 - i as f64))
    }))
}

/// Wigner function as displaced parity, `π⁻² tr[ρ D Π D†]` on both modes.
pub fn oracle_wigner(rho: &SectorDensity, pt: &PhasePoint, cfg: &OracleConfig) -> Result<f64> {
    let x = single_mode(pt.alpha, Kind::DisplacedParity, rho.dim, cfg.expm_tol)?;
    let y = single_mode(pt.beta, Kind::DisplacedParity, rho.dim, cfg.expm_tol)?;
    let w = rho.trace_product(&x, &y) / (PI * PI);
    if w.im.abs() > 1e-10 * w.re.abs().max(1.0) {
        return Err(Error::OracleCheck(format!(
            "Wigner value has imaginary part {:e}",
            w.im
        )));
    }
    Ok(w.re)
}

/// Characteristic function `tr[D_a(α) D_b(β) ρ]`.
pub fn oracle_cf(rho: &SectorDensity, pt: &PhasePoint, cfg: &OracleConfig) -> Result<Complex64> {
    let x = single_mode(pt.alpha, Kind::Displacement, rho.dim, cfg.expm_tol)?;
    let y = single_mode(pt.beta, Kind::Displacement, rho.dim, cfg.expm_tol)?;
    Ok(rho.trace_product(&x, &y))
}

/// Husimi function `⟨αβ|ρ|αβ⟩/π²`, with `|α⟩ = D(α)|0⟩`.
pub fn oracle_husimi(rho: &SectorDensity, pt: &PhasePoint, cfg: &OracleConfig) -> Result<f64> {
    let da = single_mode(pt.alpha, Kind::Displacement, rho.dim, cfg.expm_tol)?;
    let db = single_mode(pt.beta, Kind::Displacement, rho.dim, cfg.expm_tol)?;
    let proj = |d: &DMatrix<Complex64>| {
        let col = d.column(0);
        col * col.adjoint()
    };
    let q = rho.trace_product(&proj(&da), &proj(&db));
    Ok(q.re / (PI * PI))
}

/// Trace, Hermiticity and positivity defects of a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityChecks {
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl DensityChecks {
    pub fn of(rho: &SectorDensity) -> Self {
        DensityChecks {
            trace_defect: (rho.trace() - 1.0).abs(),
            hermiticity_defect: rho.hermiticity_defect(),
            min_eigenvalue: rho.min_eigenvalue(),
        }
    }

    pub fn passes(&self) -> bool {
        self.trace_defect <= 1e-12 && self.hermiticity_defect <= 1e-12 && self.min_eigenvalue >= -1e-10
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn vacuum_state() {
        let p = StateParams::new(0, 0, 0.0, 0.0).unwrap();
        let st = build_patmsts(&p, &cfg()).unwrap();
        assert_eq!(st.dim_used, 4);
        assert_eq!(st.norm, 1.0);
        assert_eq!(oracle_pnd(&st.rho, 0, 0), 1.0);
        assert_eq!(oracle_expectation(&st.rho, &[Ladder::Adag, Ladder::A]).re, 0.0);
        let w = oracle_wigner(&st.rho, &PhasePoint::origin(), &cfg()).unwrap();
        assert!((w - 1.0 / (PI * PI)).abs() < 1e-14);
        let cf = oracle_cf(&st.rho, &PhasePoint::origin(), &cfg()).unwrap();
        assert!((cf - 1.0).norm() < 1e-14);
    }

    #[test]
    fn vacuum_wigner_off_origin() {
        let p = StateParams::new(0, 0, 0.0, 0.0).unwrap();
        let st = build_patmsts(&p, &cfg()).unwrap();
        let pt = PhasePoint::new(Complex64::new(0.4, -0.3), Complex64::new(-0.2, 0.5));
        let w = oracle_wigner(&st.rho, &pt, &cfg()).unwrap();
        let want = (-2.0 * (0.25 + 0.29f64)).exp() / (PI * PI);
        assert!((w - want).abs() < 1e-13 * want);
        let cf = oracle_cf(&st.rho, &pt, &cfg()).unwrap();
        assert!((cf.re - (-0.5 * 0.54f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn squeezed_vacuum_schmidt_form() {
        let r = 0.3;
        let p = StateParams::new(0, 0, r, 0.0).unwrap();
        let st = build_patmsts(&p, &cfg()).unwrap();
        let (s2, t) = (1.0 / r.cosh().powi(2), r.tanh());
        for na in 0..6 {
            for ma in 0..6 {
                let want = s2 * t.powi((na + ma) as i32);
                assert!((st.rho.element(na, na, ma, ma) - want).abs() < 1e-8);
            }
            assert!((oracle_pnd(&st.rho, na, na) - s2 * t.powi(2 * na as i32)).abs() < 1e-12);
        }
        assert_eq!(oracle_pnd(&st.rho, 1, 0), 0.0);
    }

    #[test]
    fn unsqueezed_is_thermal_product() {
        let nbar = 0.4;
        let p = StateParams::new(0, 0, 0.0, nbar).unwrap();
        let st = build_patmsts(&p, &cfg()).unwrap();
        let th = |k: i32| nbar.powi(k) / (nbar + 1.0).powi(k + 1);
        for na in 0..5usize {
            for nb in 0..5usize {
                let want = th(na as i32) * th(nb as i32);
                assert!((oracle_pnd(&st.rho, na, nb) - want).abs() < 1e-11);
                if na != nb {
                    assert_eq!(st.rho.element(na, nb, nb, na), 0.0);
                }
            }
        }
        assert_eq!(st.rho.element(1, 1, 0, 0), 0.0);
    }

    #[test]
    fn pair_moment_of_squeezed_thermal() {
        // ⟨a†b†⟩ = (2n̄+1) sinh r cosh r for the squeezed thermal state.
        let (r, nbar) = (0.35, 0.25);
        let p = StateParams::new(0, 0, r, nbar).unwrap();
        let st = build_patmsts(&p, &cfg()).unwrap();
        let v = oracle_expectation(&st.rho, &[Ladder::Adag, Ladder::Bdag]).re;
        let want = (2.0 * nbar + 1.0) * r.sinh() * r.cosh();
        assert!((v - want).abs() < 1e-10);
        let n = oracle_expectation(&st.rho, &[Ladder::Adag, Ladder::A]).re;
        let want = nbar * (2.0 * r).cosh() + r.sinh().powi(2);
        assert!((n - want).abs() < 1e-10);
    }

    #[test]
    fn truncation_grows_with_squeezing() {
        let mut last = 0;
        for &r in &[0.0, 0.2, 0.5, 0.8] {
            let d = truncation_select(&StateParams::new(0, 0, r, 0.2).unwrap(), &cfg()).unwrap();
            assert!(d >= last);
            last = d;
        }
        let small = OracleConfig { max_dim: 8, ..cfg() };
        let err = truncation_select(&StateParams::new(1, 1, 1.0, 1.0).unwrap(), &small);
        assert!(matches!(err, Err(Error::TruncationExceeded { max_dim: 8, .. })));
    }

    #[test]
    fn density_checks_hold() {
        let p = StateParams::new(1, 2, 0.4, 0.3).unwrap();
        let st = build_patmsts(&p, &cfg()).unwrap();
        let c = DensityChecks::of(&st.rho);
        assert!(c.passes(), "{c:?}");
    }

    #[test]
    fn config_validation_and_env() {
        assert!(OracleConfig {
            trunc_tol: 0.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(OracleConfig { max_dim: 3, ..cfg() }.validate().is_err());
        assert!(cfg().validate().is_ok());
    }

    #[test]
    fn ladder_words() {
        assert_eq!(apply_word(&[Ladder::A], 0, 3), None);
        let (c, a, b) = apply_word(&[Ladder::Adag, Ladder::A, Ladder::Bdag], 2, 0).unwrap();
        assert_eq!((a, b), (2, 1));
        assert!((c - 2.0).abs() < 1e-15);
    }
}
