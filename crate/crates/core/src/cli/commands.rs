use rayon::prelude::*;
use serde::Serialize;

use super::{CliError, Format, Quantity, RunConfig, Sweep};
use crate::closed_form::{
    antibunching_r, cross_correlation_g, fidelity_closed, subtraction_benchmark_rc, sv_threshold, sv_witness,
    SvThreshold,
};
use crate::error::{Error, Result};
use crate::phase_space::{wigner_grid, AxisKind};
use crate::state_params::{DerivedParams, StateParams};

/// Fixed 17-significant-digit formatting used in every CSV.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

/// `r_min + k·r_step` for every `k` that stays within `r_max` (with a
/// small allowance for rounding of the endpoint).
pub fn r_grid(s: &Sweep) -> Vec<f64> {
    let count = ((s.r_max - s.r_min) / s.r_step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| s.r_min + k as f64 * s.r_step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub m: u32,
    pub n: u32,
    pub r: f64,
    pub nbar: f64,
    pub quantity: &'static str,
    pub value: f64,
}

fn evaluate(q: Quantity, m: u32, n: u32, dp: &DerivedParams) -> Result<f64> {
    let v = match q {
        Quantity::G => cross_correlation_g(m, n, dp),
        Quantity::Rab => antibunching_r(m, n, dp),
        Quantity::Sv => sv_witness(m, n, dp),
        Quantity::Fidelity => fidelity_closed(m, n, dp),
    };
    match v {
        Err(Error::Degenerate(_)) => Ok(f64::NAN),
        other => other,
    }
}

fn sorted_sweep(s: &Sweep) -> (Vec<(u32, u32)>, Vec<f64>) {
    let mut mn = s.mn.clone();
    mn.sort_unstable();
    mn.dedup();
    let mut nbars = s.nbar.clone();
    nbars.sort_by(|a, b| a.total_cmp(b));
    nbars.dedup();
    (mn, nbars)
}

/// Rows in lexicographic `(m, n, nbar, r)` order.
pub fn table_rows(cfg: &RunConfig) -> Result<Vec<TableRow>> {
    let sweep = cfg.sweep_or_point();
    let (mn, nbars) = sorted_sweep(&sweep);
    let rs = r_grid(&sweep);
    let mut points = Vec::new();
    for &(m, n) in &mn {
        for &nbar in &nbars {
            for &r in &rs {
                points.push(StateParams { m, n, r, nbar });
            }
        }
    }
    let label = cfg.quantity.label();
    points
        .par_iter()
        .map(|p| {
            p.validate()?;
            let value = evaluate(cfg.quantity, p.m, p.n, &p.derived())?;
            Ok(TableRow {
                m: p.m,
                n: p.n,
                r: p.r,
                nbar: p.nbar,
                quantity: label,
                value,
            })
        })
        .collect()
}

pub fn cmd_table(cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let rows = table_rows(cfg)?;
    Ok(match cfg.format {
        Format::Csv => {
            let mut s = String::from("m,n,r,nbar,quantity,value\n");
            for row in &rows {
                s += &format!(
                    "{},{},{},{},{},{}\n",
                    row.m,
                    row.n,
                    num(row.r),
                    num(row.nbar),
                    row.quantity,
                    num(row.value)
                );
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows).map_err(|e| CliError::Io(e.to_string()))? + "\n",
    })
}

fn axis_values(points: usize, half: f64) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| -half + 2.0 * half * i as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Serialize)]
struct WignerJson<'a> {
    params: StateParams,
    axis_kind: &'static str,
    q: &'a [f64],
    p: &'a [f64],
    /// Row-major: `w[i * p.len() + j]` at `(q[i], p[j])`.
    w: &'a [f64],
}

pub fn cmd_wigner(cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let axis: AxisKind = cfg.wigner.axis.into();
    let values = axis_values(cfg.wigner.grid, cfg.wigner.box_halfwidth);
    let grid = wigner_grid(&cfg.params, axis, &values, &values)?;
    Ok(match cfg.format {
        Format::Csv => {
            let mut s = String::from("axis_kind,q,p,w\n");
            for (i, &q) in grid.q_values.iter().enumerate() {
                for (j, &p) in grid.p_values.iter().enumerate() {
                    s += &format!("{},{},{},{}\n", axis.label(), num(q), num(p), num(grid.at(i, j)));
                }
            }
            s
        }
        Format::Json => {
            let doc = WignerJson {
                params: grid.params,
                axis_kind: axis.label(),
                q: &grid.q_values,
                p: &grid.p_values,
                w: &grid.values,
            };
            serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))? + "\n"
        }
    })
}

fn threshold_cell(t: SvThreshold) -> String {
    match t {
        SvThreshold::Crossing(r) => num(r),
        SvThreshold::AlwaysSatisfied => "none".into(),
        SvThreshold::NoCrossing => "unreached".into(),
    }
}

#[derive(Serialize)]
struct ThresholdRow {
    m: u32,
    n: u32,
    nbar: f64,
    r_a: Option<f64>,
    r_a_kind: &'static str,
    r_c: f64,
}

pub fn cmd_thresholds(cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let sweep = cfg.sweep_or_point();
    let (mn, nbars) = sorted_sweep(&sweep);
    let mut jobs = Vec::new();
    for &(m, n) in &mn {
        for &nbar in &nbars {
            StateParams { m, n, r: 0.0, nbar }.validate()?;
            jobs.push((m, n, nbar));
        }
    }
    let results: Vec<(u32, u32, f64, SvThreshold)> = jobs
        .par_iter()
        .map(|&(m, n, nbar)| Ok((m, n, nbar, sv_threshold(m, n, nbar)?)))
        .collect::<Result<_>>()?;
    Ok(match cfg.format {
        Format::Csv => {
            let mut s = String::from("m,n,nbar,r_a,r_c\n");
            for &(m, n, nbar, t) in &results {
                s += &format!(
                    "{m},{n},{},{},{}\n",
                    num(nbar),
                    threshold_cell(t),
                    num(subtraction_benchmark_rc(nbar))
                );
            }
            s
        }
        Format::Json => {
            let rows: Vec<ThresholdRow> = results
                .iter()
                .map(|&(m, n, nbar, t)| ThresholdRow {
                    m,
                    n,
                    nbar,
                    r_a: t.value(),
                    r_a_kind: match t {
                        SvThreshold::Crossing(_) => "crossing",
                        SvThreshold::AlwaysSatisfied => "none",
                        SvThreshold::NoCrossing => "unreached",
                    },
                    r_c: subtraction_benchmark_rc(nbar),
                })
                .collect();
            serde_json::to_string_pretty(&rows).map_err(|e| CliError::Io(e.to_string()))? + "\n"
        }
    })
}
