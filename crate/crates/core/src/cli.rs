//! Command-line front end.
//!
//! Every subcommand produces a [`Table`], written as CSV (header row first)
//! or as JSON `{"meta": ..., "rows": [...]}` where `meta` echoes the resolved
//! configuration. Exit codes: 0 success, 1 runtime failure, 2 bad arguments,
//! 3 validation failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::mc::{Estimate, McConfig};
use crate::mimo::{
    capacity_ctr, mimo_joint_j1, mimo_joint_j2, mimo_optimize_pilots, mimo_power_advantage_asymptotic,
    mimo_separate, MimoParams,
};
use crate::siso::{
    capacity_csi, joint_bound_j1, joint_bound_j2, optimize_pilots_joint, power_advantage_asymptotic,
    power_advantage_at_snr, separate_bound, single_pilot_advantage, true_capacity_gap, JointBound, SisoParams,
};
use crate::sweeps::{
    convergence_table, default_convergence_grid, default_fig2_grid, sweep_fig1, sweep_fig2, FIG1_GRID,
    FIG1_SNR_DB, FIG2_SNR_DB,
};
use crate::table::{Cell, Column, ColumnKind, Table};
use crate::units::{PowerOffset, SnrValue};
use crate::validate::validate_all;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(name = "blockfade", version, about = "Spectral-efficiency bounds for pilot-assisted block-fading channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Shared {
    /// Fading blocklength in symbols
    #[arg(long = "T", global = true)]
    #[serde(rename = "T")]
    blocklength: Option<u32>,
    /// Pilot symbols per block
    #[arg(long, global = true)]
    tau: Option<u32>,
    /// SNR in dB
    #[arg(long, global = true, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Transmit antennas
    #[arg(long, global = true)]
    nt: Option<u32>,
    /// Receive antennas
    #[arg(long, global = true)]
    nr: Option<u32>,
    /// Monte Carlo sample count
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Monte Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// Evaluate one bound at a single point
    Bound {
        #[arg(long, value_enum)]
        kind: BoundKind,
    },
    /// Search the pilot count that maximises a joint bound
    OptimizePilots {
        #[arg(long, value_enum, default_value_t = PilotKind::J1)]
        kind: PilotKind,
    },
    /// Power offsets between the bounds
    Offset {
        #[arg(long, value_enum)]
        kind: OffsetKind,
    },
    /// Tables behind the efficiency and power-advantage figures
    Sweep {
        #[arg(value_enum)]
        which: SweepKind,
        /// Comma-separated blocklengths
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<u32>>,
        /// Comma-separated SNRs in dB
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        snrs: Option<Vec<f64>>,
    },
    /// Check every closed form against Monte Carlo
    Validate,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum BoundKind {
    C,
    Is,
    J1,
    J2,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum PilotKind {
    J1,
    J2,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OffsetKind {
    AdvantageAsymptotic,
    AdvantageAtSnr,
    SinglePilot,
    TrueCapacityGap,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum SweepKind {
    Fig1,
    Fig2,
    Convergence,
}

/// A failed run: exit code plus message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn flag_for(param: &str) -> &str {
    match param {
        "T" => "--T",
        "tau" => "--tau",
        "snr" => "--snr-db",
        "n_t" | "t" => "--nt",
        "n_r" | "r" => "--nr",
        "samples" => "--samples",
        "grid" => "--grid",
        other => other,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::Domain { param, detail } | Error::Range { param, detail } => {
                Failure::usage(format!("invalid value for {}: {detail}", flag_for(param)))
            }
            Error::Validation(_) => Failure {
                code: EXIT_VALIDATION,
                message: e.to_string(),
            },
            _ => Failure {
                code: EXIT_FAILURE,
                message: e.to_string(),
            },
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: format!("i/o error: {e}"),
        }
    }
}

/// Everything the run actually used, echoed in JSON output.
#[derive(Debug, Serialize)]
struct RunConfig {
    #[serde(flatten)]
    command: Command,
    #[serde(flatten)]
    shared: Shared,
    mc: Option<McConfig>,
}

struct Context {
    shared: Shared,
    mc: Option<McConfig>,
}

impl Context {
    fn blocklength(&mut self) -> Result<u32, Failure> {
        self.shared
            .blocklength
            .ok_or_else(|| Failure::usage("missing required flag --T"))
    }

    fn snr(&mut self) -> Result<SnrValue, Failure> {
        let db = self
            .shared
            .snr_db
            .ok_or_else(|| Failure::usage("missing required flag --snr-db"))?;
        Ok(SnrValue::from_db(db)?)
    }

    /// (n_t, n_r), defaulting to one antenna each.
    fn antennas(&mut self) -> (u32, u32) {
        let nt = *self.shared.nt.get_or_insert(1);
        let nr = *self.shared.nr.get_or_insert(1);
        (nt, nr)
    }

    fn square_antennas(&mut self) -> Result<u32, Failure> {
        let (nt, nr) = self.antennas();
        if nt != nr {
            return Err(Failure::usage(format!(
                "this command needs --nt equal to --nr, got {nt} and {nr}"
            )));
        }
        Ok(nt)
    }

    fn mc(&mut self, default_samples: u64) -> Result<McConfig, Failure> {
        let samples = *self.shared.samples.get_or_insert(default_samples);
        let seed = *self.shared.seed.get_or_insert(DEFAULT_SEED);
        let cfg = McConfig::new(samples, seed)?;
        self.mc = Some(cfg);
        Ok(cfg)
    }

    fn tau(&mut self, default: u32) -> u32 {
        *self.shared.tau.get_or_insert(default)
    }
}

fn estimate_cells(e: Estimate) -> [Cell; 3] {
    if e.is_exact() {
        [Cell::Num(e.mean), Cell::Num(0.0), Cell::Int(0)]
    } else {
        [Cell::Num(e.mean), Cell::Num(e.std_error), Cell::Int(e.samples_used as i64)]
    }
}

fn bound(ctx: &mut Context, kind: BoundKind) -> Result<Table, Failure> {
    let snr = ctx.snr()?;
    let (nt, nr) = ctx.antennas();
    let scalar = nt == 1 && nr == 1;
    let mut table = Table::new(vec![
        Column::new("kind", ColumnKind::Label),
        Column::new("n_t", ColumnKind::Count),
        Column::new("n_r", ColumnKind::Count),
        Column::new("T", ColumnKind::Count),
        Column::new("tau", ColumnKind::Count),
        Column::new("snr_db", ColumnKind::Db),
        Column::new("value", ColumnKind::Bits),
        Column::new("std_error", ColumnKind::Stat),
        Column::new("samples", ColumnKind::Count),
    ]);
    let label = match kind {
        BoundKind::C => "c",
        BoundKind::Is => "is",
        BoundKind::J1 => "j1",
        BoundKind::J2 => "j2",
    };
    let (t_cell, tau_cell, estimate) = match kind {
        BoundKind::C if scalar => (Cell::Empty, Cell::Empty, Estimate::exact(capacity_csi(snr))),
        BoundKind::C => {
            let cfg = ctx.mc(McConfig::DEFAULT_MATRIX_SAMPLES)?;
            (Cell::Empty, Cell::Empty, capacity_ctr(nt, nr, snr, &cfg.substream(1))?)
        }
        BoundKind::Is => {
            let t = ctx.blocklength()?;
            let (tau_star, e) = if scalar {
                let s = separate_bound(t, snr)?;
                (s.tau_star, Estimate::exact(s.value))
            } else {
                let cfg = ctx.mc(McConfig::DEFAULT_MATRIX_SAMPLES)?;
                let s = mimo_separate(nt, nr, t, snr, &cfg)?;
                (s.tau_star, s.value)
            };
            (Cell::Int(t as i64), Cell::Int(tau_star as i64), e)
        }
        BoundKind::J1 | BoundKind::J2 => {
            let t = ctx.blocklength()?;
            let tau = ctx.tau(nt);
            let e = if scalar {
                let p = SisoParams::new(t, tau, snr)?;
                Estimate::exact(if kind == BoundKind::J1 {
                    joint_bound_j1(&p)
                } else {
                    joint_bound_j2(&p)
                })
            } else {
                let cfg = ctx.mc(McConfig::DEFAULT_MATRIX_SAMPLES)?;
                let p = MimoParams::new(nt, nr, t, tau, snr)?;
                if kind == BoundKind::J1 {
                    mimo_joint_j1(&p, &cfg)?
                } else {
                    mimo_joint_j2(&p, &cfg)?
                }
            };
            (Cell::Int(t as i64), Cell::Int(tau as i64), e)
        }
    };
    let mut row = vec![
        Cell::from(label),
        Cell::from(nt),
        Cell::from(nr),
        t_cell,
        tau_cell,
        Cell::Num(snr.db()),
    ];
    row.extend(estimate_cells(estimate));
    table.push(row);
    Ok(table)
}

fn optimize(ctx: &mut Context, kind: PilotKind) -> Result<Table, Failure> {
    let t = ctx.blocklength()?;
    let snr = ctx.snr()?;
    let n = ctx.square_antennas()?;
    let mut table = Table::new(vec![
        Column::new("kind", ColumnKind::Label),
        Column::new("n", ColumnKind::Count),
        Column::new("T", ColumnKind::Count),
        Column::new("snr_db", ColumnKind::Db),
        Column::new("tau_star", ColumnKind::Count),
        Column::new("value", ColumnKind::Bits),
        Column::new("std_error", ColumnKind::Stat),
        Column::new("samples", ColumnKind::Count),
        Column::new("tau_continuous", ColumnKind::Real),
        Column::new("tie_flagged", ColumnKind::Label),
    ]);
    let label = match kind {
        PilotKind::J1 => "j1",
        PilotKind::J2 => "j2",
    };
    let (tau_star, estimate, tau_continuous, tie) = if n == 1 {
        let which = match kind {
            PilotKind::J1 => JointBound::J1,
            PilotKind::J2 => JointBound::J2,
        };
        let c = optimize_pilots_joint(t, snr, which)?;
        (c.tau_star, Estimate::exact(c.value), c.tau_continuous, false)
    } else {
        if kind != PilotKind::J1 {
            return Err(Failure::usage("multi-antenna pilot search supports --kind j1 only"));
        }
        let cfg = ctx.mc(McConfig::DEFAULT_MATRIX_SAMPLES)?;
        let c = mimo_optimize_pilots(n, t, snr, &cfg)?;
        (c.tau_star, c.value, c.tau_continuous, c.tie_flagged)
    };
    let mut row = vec![
        Cell::from(label),
        Cell::from(n),
        Cell::from(t),
        Cell::Num(snr.db()),
        Cell::from(tau_star),
    ];
    row.extend(estimate_cells(estimate));
    row.push(Cell::Num(tau_continuous));
    row.push(Cell::Flag(tie));
    table.push(row);
    Ok(table)
}

fn offset(ctx: &mut Context, kind: OffsetKind) -> Result<Table, Failure> {
    let t = ctx.blocklength()?;
    let mut table = Table::new(vec![
        Column::new("quantity", ColumnKind::Label),
        Column::new("T", ColumnKind::Count),
        Column::new("snr_db", ColumnKind::Db),
        Column::new("units", ColumnKind::Units),
        Column::new("db", ColumnKind::Db),
    ]);
    let mut push = |name: &str, snr: Cell, o: PowerOffset| {
        table.push(vec![Cell::from(name), Cell::from(t), snr, Cell::Num(o.units), Cell::Num(o.db)]);
    };
    match kind {
        OffsetKind::AdvantageAsymptotic => {
            let n = ctx.square_antennas()?;
            let o = if n == 1 {
                power_advantage_asymptotic(t)?
            } else {
                mimo_power_advantage_asymptotic(n, t)?
            };
            push("advantage_asymptotic", Cell::Empty, o);
        }
        OffsetKind::AdvantageAtSnr => {
            let snr = ctx.snr()?;
            push("advantage_at_snr", Cell::Num(snr.db()), power_advantage_at_snr(t, snr)?);
        }
        OffsetKind::SinglePilot => push("single_pilot", Cell::Empty, single_pilot_advantage(t)?),
        OffsetKind::TrueCapacityGap => {
            let g = true_capacity_gap(t)?;
            push("true_capacity_gap_exact", Cell::Empty, g.exact);
            push("true_capacity_gap_stirling", Cell::Empty, g.stirling);
            push("j2_gap_exact", Cell::Empty, g.j2_gap_exact);
            push("j2_gap_stirling", Cell::Empty, g.j2_gap_stirling);
        }
    }
    Ok(table)
}

fn sweep(ctx: &mut Context, which: SweepKind, grid: Option<&[u32]>, snrs: Option<&[f64]>) -> Result<Table, Failure> {
    let table = match which {
        SweepKind::Fig1 => sweep_fig1(grid.unwrap_or(&FIG1_GRID), snrs.unwrap_or(&FIG1_SNR_DB))?,
        SweepKind::Fig2 => {
            let default = default_fig2_grid();
            sweep_fig2(grid.unwrap_or(&default), snrs.unwrap_or(&FIG2_SNR_DB))?
        }
        SweepKind::Convergence => {
            if ctx.shared.snr_db.is_none() {
                ctx.shared.snr_db = Some(10.0);
            }
            let snr = ctx.snr()?;
            let default = default_convergence_grid();
            convergence_table(grid.unwrap_or(&default), snr)?
        }
    };
    Ok(table)
}

fn write_output(ctx: &Context, command: &Command, table: &Table, summary: Option<serde_json::Value>) -> Result<(), Failure> {
    let mut sink: Box<dyn Write> = match &ctx.shared.out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match ctx.shared.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            let (header, rows) = table.rendered();
            w.write_record(&header).map_err(csv_failure)?;
            for row in rows {
                w.write_record(&row).map_err(csv_failure)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let meta = RunConfig {
                command: command.clone(),
                shared: ctx.shared.clone(),
                mc: ctx.mc,
            };
            let mut doc = json!({ "meta": meta, "rows": table.json_rows() });
            if let Some(s) = summary {
                doc["summary"] = s;
            }
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(|e| Failure {
                code: EXIT_FAILURE,
                message: e.to_string(),
            })?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: format!("csv error: {e}"),
    }
}

fn dispatch(cli: Cli, stderr: &mut dyn Write) -> Result<(), Failure> {
    let mut ctx = Context {
        shared: cli.shared,
        mc: None,
    };
    let mut summary = None;
    let mut verdict = Ok(());
    let table = match &cli.command {
        Command::Bound { kind } => bound(&mut ctx, *kind)?,
        Command::OptimizePilots { kind } => optimize(&mut ctx, *kind)?,
        Command::Offset { kind } => offset(&mut ctx, *kind)?,
        Command::Sweep { which, grid, snrs } => sweep(&mut ctx, *which, grid.as_deref(), snrs.as_deref())?,
        Command::Validate => {
            let cfg = ctx.mc(McConfig::DEFAULT_SCALAR_SAMPLES)?;
            let report = validate_all(&cfg)?;
            let passed = report.passed();
            let max_z = report.max_abs_z();
            let _ = writeln!(
                stderr,
                "validation {}: {} cells, max |z| = {max_z:.3}",
                if passed { "PASS" } else { "FAIL" },
                report.cells.len()
            );
            summary = Some(json!({ "passed": passed, "max_abs_z": max_z, "cells": report.cells.len() }));
            let table = report.to_table();
            if let Err(e) = report.into_result() {
                verdict = Err(Failure::from(e));
            }
            table
        }
    };
    write_output(&ctx, &cli.command, &table, summary)?;
    verdict
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
            } else {
                let _ = write!(io::stdout(), "{}", e.render());
            }
            return code;
        }
    };
    match dispatch(cli, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flag_names_follow_parameters() {
        assert_eq!(flag_for("snr"), "--snr-db");
        assert_eq!(flag_for("n_t"), "--nt");
        let f = Failure::from(Error::domain("T", "blocklength must be at least 2, got 1"));
        assert_eq!(f.code, EXIT_USAGE);
        assert!(f.message.contains("--T"));
        assert_eq!(Failure::from(Error::Validation("x".into())).code, EXIT_VALIDATION);
        assert_eq!(Failure::from(Error::Saturation("x".into())).code, EXIT_FAILURE);
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut err = Vec::new();
        assert_eq!(run(["blockfade", "frobnicate"], &mut err), EXIT_USAGE);
        assert!(!err.is_empty());
        let mut err = Vec::new();
        assert_eq!(run(["blockfade", "bound", "--kind", "j1", "--snr-db", "0"], &mut err), EXIT_USAGE);
        assert!(String::from_utf8(err).unwrap().contains("--T"));
        let mut err = Vec::new();
        let code = run(["blockfade", "bound", "--kind", "j1", "--T", "1", "--snr-db", "0"], &mut err);
        assert_eq!(code, EXIT_USAGE);
    }
}
