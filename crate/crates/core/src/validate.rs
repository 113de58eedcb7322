//! Closed forms against Monte Carlo on a fixed grid.
//!
//! Each cell pairs an exact value with an independent sampled estimate and
//! records the z-score. The run passes when every |z| is at most
//! [`Z_LIMIT`].

use std::f64::consts::LOG2_E;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mc::{sample_capacity_siso, sample_ctr, sample_delta_mimo, sample_marquet_term, Estimate, McConfig};
use crate::mimo::{capacity_ctr, pilot_gram_optimality_check, MimoParams};
use crate::siso::{capacity_csi, joint_bound_j1, SisoParams};
use crate::specfun::expint_scaled_sum;
use crate::table::{Cell, Column, ColumnKind, Table};
use crate::units::SnrValue;

pub const Z_LIMIT: f64 = 4.0;

/// The closed forms under test. Swappable so the harness itself can be
/// shown to catch a wrong formula.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForms {
    pub capacity: fn(SnrValue) -> f64,
    /// E[log2(1 + SNR·S/(1 + SNR·τ))], S a sum of T − τ unit exponentials.
    pub marquet: fn(u32, u32, SnrValue) -> Result<f64>,
    pub joint_j1: fn(&SisoParams) -> f64,
    pub ctr: fn(u32, u32, SnrValue) -> Result<f64>,
}

fn marquet_closed(blocklength: u32, tau: u32, snr: SnrValue) -> Result<f64> {
    let x = tau as f64 + 1.0 / snr.linear();
    Ok(LOG2_E * expint_scaled_sum(blocklength - tau, x)?)
}

fn ctr_closed(t: u32, r: u32, rho: SnrValue) -> Result<f64> {
    // Only called on rank-one shapes, where the result is exact.
    let cfg = McConfig::new(McConfig::MIN_SAMPLES, 0)?;
    Ok(capacity_ctr(t, r, rho, &cfg)?.mean)
}

impl Default for ClosedForms {
    fn default() -> Self {
        ClosedForms {
            capacity: capacity_csi,
            marquet: marquet_closed,
            joint_j1: joint_bound_j1,
            ctr: ctr_closed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationCell {
    pub check: &'static str,
    pub point: String,
    pub closed_form: f64,
    pub estimate: Estimate,
    pub z: f64,
}

impl ValidationCell {
    fn new(check: &'static str, point: String, closed_form: f64, estimate: Estimate) -> Self {
        ValidationCell {
            check,
            point,
            closed_form,
            z: estimate.z_score(closed_form),
            estimate,
        }
    }

    pub fn passed(&self) -> bool {
        self.z.abs() <= Z_LIMIT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub config: McConfig,
    pub cells: Vec<ValidationCell>,
}

impl ValidationReport {
    pub fn max_abs_z(&self) -> f64 {
        self.cells.iter().map(|c| c.z.abs()).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.cells.iter().all(ValidationCell::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCell> {
        self.cells.iter().filter(|c| !c.passed())
    }

    /// `Err(Error::Validation)` naming every failing cell.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let list: Vec<String> = self
            .failures()
            .map(|c| format!("{} at {} (z = {:.2})", c.check, c.point, c.z))
            .collect();
        Err(Error::Validation(list.join("; ")))
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec![
            Column::new("check", ColumnKind::Label),
            Column::new("point", ColumnKind::Label),
            Column::new("closed_form", ColumnKind::Bits),
            Column::new("estimate", ColumnKind::Bits),
            Column::new("std_error", ColumnKind::Stat),
            Column::new("samples", ColumnKind::Count),
            Column::new("z", ColumnKind::Stat),
            Column::new("pass", ColumnKind::Label),
        ]);
        for c in &self.cells {
            t.push(vec![
                Cell::from(c.check),
                Cell::from(c.point.clone()),
                Cell::Num(c.closed_form),
                Cell::Num(c.estimate.mean),
                Cell::Num(c.estimate.std_error),
                Cell::from(c.estimate.samples_used),
                Cell::Num(c.z),
                Cell::Flag(c.passed()),
            ]);
        }
        t
    }
}

/// Sample budget for matrix-valued cells: a tenth of the scalar budget.
fn matrix_config(cfg: &McConfig) -> McConfig {
    cfg.with_samples((cfg.samples / 10).max(McConfig::MIN_SAMPLES))
}

fn db(v: f64) -> Result<SnrValue> {
    SnrValue::from_db(v)
}

/// Runs every pairing with the real closed forms.
pub fn validate_all(cfg: &McConfig) -> Result<ValidationReport> {
    validate_with(cfg, &ClosedForms::default())
}

/// Runs every pairing against the supplied closed forms.
pub fn validate_with(cfg: &McConfig, forms: &ClosedForms) -> Result<ValidationReport> {
    cfg.validate()?;
    let mcfg = matrix_config(cfg);
    let mut cells = Vec::new();
    let mut tag = 0u64;
    let mut next = |c: &McConfig| {
        tag += 1;
        c.substream(tag)
    };

    for snr_db in [-10.0, 0.0, 10.0, 20.0] {
        let snr = db(snr_db)?;
        let est = sample_capacity_siso(snr, &next(cfg))?;
        cells.push(ValidationCell::new("capacity", format!("snr_db={snr_db}"), (forms.capacity)(snr), est));
    }

    for t in [2u32, 10, 50] {
        for tau in [0u32, 1] {
            for snr_db in [0.0, 10.0, 20.0] {
                let snr = db(snr_db)?;
                let est = sample_marquet_term(t, tau, snr, &next(cfg))?;
                cells.push(ValidationCell::new(
                    "marquet_term",
                    format!("T={t} tau={tau} snr_db={snr_db}"),
                    (forms.marquet)(t, tau, snr)?,
                    est,
                ));
            }
        }
    }

    for (t, r, snr_db) in [(1u32, 4u32, 0.0), (3, 1, 10.0), (1, 2, -5.0)] {
        let snr = db(snr_db)?;
        let est = sample_ctr(t, r, snr, &next(&mcfg))?;
        cells.push(ValidationCell::new(
            "ctr_rank_one",
            format!("t={t} r={r} snr_db={snr_db}"),
            (forms.ctr)(t, r, snr)?,
            est,
        ));
    }

    // Theorem-2 bound with one antenna each side, both C terms sampled.
    for (t, tau, snr_db) in [(10u32, 1u32, 0.0), (20, 2, 10.0)] {
        let snr = db(snr_db)?;
        let p = SisoParams::new(t, tau, snr)?;
        let s = snr.linear();
        let c = sample_ctr(1, 1, snr, &next(&mcfg))?;
        let pen_snr = SnrValue::from_linear(s / (1.0 + s * tau as f64))?;
        let pen = sample_ctr(1, t - tau, pen_snr, &next(&mcfg))?;
        let est = c.combine(1.0 - tau as f64 / t as f64, pen, -1.0 / t as f64);
        cells.push(ValidationCell::new(
            "mimo_j1_reduction",
            format!("T={t} tau={tau} snr_db={snr_db}"),
            (forms.joint_j1)(&p),
            est,
        ));
    }

    // Δ with one transmit antenna is n_r·C_{1,T−τ}(SNR/(1 + SNR·τ)), exact.
    for (n_r, t, tau, snr_db) in [(1u32, 10u32, 1u32, 10.0), (2, 20, 2, 0.0)] {
        let snr = db(snr_db)?;
        let p = MimoParams::new(1, n_r, t, tau, snr)?;
        let est = sample_delta_mimo(&p, &[tau as f64], &next(&mcfg))?;
        let s = snr.linear();
        let closed = n_r as f64 * (forms.ctr)(1, t - tau, SnrValue::from_linear(s / (1.0 + s * tau as f64))?)?;
        cells.push(ValidationCell::new(
            "delta_uniform",
            format!("n_t=1 n_r={n_r} T={t} tau={tau} snr_db={snr_db}"),
            closed,
            est,
        ));
    }

    // Orthogonal pilots against diagonal perturbations. One-sided: a
    // perturbation only counts against the claim if it lowers Δ.
    let p = MimoParams::new(2, 2, 20, 2, db(10.0)?)?;
    let perturbations = [vec![2.5, 1.5], vec![3.0, 1.0], vec![4.0, 0.0]];
    let report = pilot_gram_optimality_check(&p, &perturbations, &next(&mcfg))?;
    for row in &report.rows {
        let shortfall = row.difference.min(0.0);
        let z = if row.combined_std_error > 0.0 {
            shortfall / row.combined_std_error
        } else {
            0.0
        };
        cells.push(ValidationCell {
            check: "pilot_gram_optimality",
            point: format!("n_t=2 n_r=2 T=20 tau=2 snr_db=10 diag={:?}", row.diagonal),
            closed_form: report.uniform.mean,
            estimate: row.delta,
            z,
        });
    }

    Ok(ValidationReport { config: *cfg, cells })
}
