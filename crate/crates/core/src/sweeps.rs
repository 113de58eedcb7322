//! Sweeps over blocklength or SNR, and the fixed tables behind the
//! efficiency-vs-T and power-advantage-vs-T figures and the convergence study.
//!
//! Grid points are evaluated in parallel; rows always come out in grid order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mc::{Estimate, McConfig};
use crate::mimo::{capacity_ctr, mimo_joint_j1, mimo_joint_j2, mimo_power_advantage_asymptotic, mimo_separate, MimoParams};
use crate::siso::{
    capacity_csi, joint_bound_j1, joint_bound_j2, power_advantage_asymptotic, power_advantage_at_snr,
    separate_bound, SisoParams,
};
use crate::table::{Cell, Column, ColumnKind, Table};
use crate::units::SnrValue;

/// Default blocklengths for the efficiency-vs-T sweep.
pub const FIG1_GRID: [u32; 13] = [2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128];
/// Default SNRs (dB) for the efficiency-vs-T sweep.
pub const FIG1_SNR_DB: [f64; 2] = [0.0, 10.0];
/// Default finite SNRs (dB) for the power-advantage sweep.
pub const FIG2_SNR_DB: [f64; 2] = [10.0, 20.0];

/// Roughly `points` log-spaced integers from `lo` to `hi` inclusive, deduplicated.
pub fn log_spaced_integers(lo: u32, hi: u32, points: usize) -> Vec<u32> {
    assert!(lo >= 1 && hi >= lo && points >= 2);
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u32> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as u32)
        .collect();
    out.dedup();
    out
}

/// Blocklengths 2..=100, log-spaced.
pub fn default_fig2_grid() -> Vec<u32> {
    log_spaced_integers(2, 100, 20)
}

/// Blocklengths 10..=10⁴, log-spaced.
pub fn default_convergence_grid() -> Vec<u32> {
    log_spaced_integers(10, 10_000, 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Blocklength,
    SnrDb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    /// Perfect-CSI capacity.
    C,
    /// Separate processing, with its optimal pilot count.
    Is,
    J1,
    J2,
    /// Asymptotic power advantage of joint over separate processing.
    Asymptotes,
}

/// Parameters held fixed while the sweep variable moves. The swept field is
/// ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub blocklength: u32,
    pub tau: u32,
    pub snr_db: f64,
    pub n_t: u32,
    pub n_r: u32,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            blocklength: 10,
            tau: 1,
            snr_db: 10.0,
            n_t: 1,
            n_r: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub fixed: FixedParams,
    pub curves: Vec<Curve>,
    pub mc: McConfig,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::domain("grid", "need at least two grid points"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("grid", "grid values must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("grid", "grid must be strictly increasing"));
    }
    Ok(())
}

fn check_blocklength_grid(grid: &[u32]) -> Result<()> {
    check_grid(&grid.iter().map(|&t| t as f64).collect::<Vec<_>>())?;
    if grid[0] < 2 {
        return Err(Error::domain("T", format!("blocklengths must be at least 2, got {}", grid[0])));
    }
    Ok(())
}

impl SweepSpec {
    pub fn new(
        variable: SweepVariable,
        grid: Vec<f64>,
        fixed: FixedParams,
        curves: Vec<Curve>,
        mc: McConfig,
    ) -> Result<Self> {
        check_grid(&grid)?;
        if curves.is_empty() {
            return Err(Error::domain("curves", "select at least one curve"));
        }
        if variable == SweepVariable::Blocklength
            && grid.iter().any(|&t| t < 2.0 || t.fract() != 0.0 || t > u32::MAX as f64)
        {
            return Err(Error::domain("T", "blocklength grid must hold integers >= 2"));
        }
        Ok(SweepSpec {
            variable,
            grid,
            fixed,
            curves,
            mc,
        })
    }

    fn sampled(&self) -> bool {
        self.fixed.n_t.min(self.fixed.n_r) > 1
    }

    fn columns(&self) -> Vec<Column> {
        let mut cols = vec![match self.variable {
            SweepVariable::Blocklength => Column::new("T", ColumnKind::Count),
            SweepVariable::SnrDb => Column::new("snr_db", ColumnKind::Db),
        }];
        let sampled = self.sampled();
        let bits = |cols: &mut Vec<Column>, name: &str| {
            cols.push(Column::new(name, ColumnKind::Bits));
            if sampled {
                cols.push(Column::new(format!("{name}_se"), ColumnKind::Stat));
            }
        };
        for curve in &self.curves {
            match curve {
                Curve::C => bits(&mut cols, "C"),
                Curve::Is => {
                    bits(&mut cols, "I_S");
                    cols.push(Column::new("tau_star_I_S", ColumnKind::Count));
                }
                Curve::J1 => bits(&mut cols, "I_J1"),
                Curve::J2 => bits(&mut cols, "I_J2"),
                Curve::Asymptotes => cols.push(Column::new("advantage_asymptotic_db", ColumnKind::Db)),
            }
        }
        cols
    }

    fn point(&self, x: f64) -> Result<Vec<Cell>> {
        let f = &self.fixed;
        let (blocklength, snr_db) = match self.variable {
            SweepVariable::Blocklength => (x as u32, f.snr_db),
            SweepVariable::SnrDb => (f.blocklength, x),
        };
        let snr = SnrValue::from_db(snr_db)?;
        let mut row = vec![match self.variable {
            SweepVariable::Blocklength => Cell::Int(blocklength as i64),
            SweepVariable::SnrDb => Cell::Num(snr_db),
        }];
        let sampled = self.sampled();
        let push = |row: &mut Vec<Cell>, e: Estimate| {
            row.push(Cell::Num(e.mean));
            if sampled {
                row.push(Cell::Num(e.std_error));
            }
        };
        let scalar = f.n_t == 1 && f.n_r == 1;
        for curve in &self.curves {
            match curve {
                Curve::C if scalar => push(&mut row, Estimate::exact(capacity_csi(snr))),
                Curve::C => push(&mut row, capacity_ctr(f.n_t, f.n_r, snr, &self.mc.substream(1))?),
                Curve::Is if scalar => {
                    let s = separate_bound(blocklength, snr)?;
                    push(&mut row, Estimate::exact(s.value));
                    row.push(Cell::Int(s.tau_star as i64));
                }
                Curve::Is => {
                    let s = mimo_separate(f.n_t, f.n_r, blocklength, snr, &self.mc)?;
                    push(&mut row, s.value);
                    row.push(Cell::Int(s.tau_star as i64));
                }
                Curve::J1 | Curve::J2 if scalar => {
                    let p = SisoParams::new(blocklength, f.tau, snr)?;
                    let v = if *curve == Curve::J1 {
                        joint_bound_j1(&p)
                    } else {
                        joint_bound_j2(&p)
                    };
                    push(&mut row, Estimate::exact(v));
                }
                Curve::J1 | Curve::J2 => {
                    let p = MimoParams::new(f.n_t, f.n_r, blocklength, f.tau, snr)?;
                    let v = if *curve == Curve::J1 {
                        mimo_joint_j1(&p, &self.mc)?
                    } else {
                        mimo_joint_j2(&p, &self.mc)?
                    };
                    push(&mut row, v);
                }
                Curve::Asymptotes => {
                    if f.n_t != f.n_r {
                        return Err(Error::domain("n_r", "asymptotic advantage needs n_t = n_r"));
                    }
                    row.push(Cell::Num(mimo_power_advantage_asymptotic(f.n_t, blocklength)?.db));
                }
            }
        }
        Ok(row)
    }
}

fn collect_rows<T, F>(grid: &[T], f: F) -> Result<Vec<Vec<Cell>>>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>> + Sync + Send,
{
    grid.par_iter().map(f).collect()
}

/// Evaluates the selected curves at every grid point.
pub fn sweep(spec: &SweepSpec) -> Result<Table> {
    let mut table = Table::new(spec.columns());
    for row in collect_rows(&spec.grid, |&x| spec.point(x))? {
        table.push(row);
    }
    Ok(table)
}

/// Efficiency vs blocklength: C, I_S with its pilot count, and I_J1, I_J2
/// at one pilot, for each SNR.
pub fn sweep_fig1(t_grid: &[u32], snr_db_list: &[f64]) -> Result<Table> {
    check_blocklength_grid(t_grid)?;
    let mut table = Table::new(vec![
        Column::new("snr_db", ColumnKind::Db),
        Column::new("T", ColumnKind::Count),
        Column::new("C", ColumnKind::Bits),
        Column::new("I_S", ColumnKind::Bits),
        Column::new("tau_star_I_S", ColumnKind::Count),
        Column::new("I_J1", ColumnKind::Bits),
        Column::new("I_J2", ColumnKind::Bits),
    ]);
    let points: Vec<(f64, u32)> = snr_db_list
        .iter()
        .flat_map(|&d| t_grid.iter().map(move |&t| (d, t)))
        .collect();
    let rows = collect_rows(&points, |&(snr_db, t)| {
        let snr = SnrValue::from_db(snr_db)?;
        let p = SisoParams::new(t, 1, snr)?;
        let s = separate_bound(t, snr)?;
        Ok(vec![
            Cell::Num(snr_db),
            Cell::Int(t as i64),
            Cell::Num(capacity_csi(snr)),
            Cell::Num(s.value),
            Cell::Int(s.tau_star as i64),
            Cell::Num(joint_bound_j1(&p)),
            Cell::Num(joint_bound_j2(&p)),
        ])
    })?;
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

fn snr_label(snr_db: f64) -> String {
    format!("advantage_{snr_db}db")
}

/// Power advantage of joint over separate processing vs blocklength: the
/// asymptote and the value at each finite SNR, all in dB.
pub fn sweep_fig2(t_grid: &[u32], snr_db_list: &[f64]) -> Result<Table> {
    check_blocklength_grid(t_grid)?;
    let snrs = snr_db_list
        .iter()
        .map(|&d| SnrValue::from_db(d))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![
        Column::new("T", ColumnKind::Count),
        Column::new("advantage_asymptotic_db", ColumnKind::Db),
    ];
    columns.extend(snr_db_list.iter().map(|&d| Column::new(snr_label(d), ColumnKind::Db)));
    let mut table = Table::new(columns);
    let rows = collect_rows(t_grid, |&t| {
        let mut row = vec![Cell::Int(t as i64), Cell::Num(power_advantage_asymptotic(t)?.db)];
        for &snr in &snrs {
            row.push(Cell::Num(power_advantage_at_snr(t, snr)?.db));
        }
        Ok(row)
    })?;
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Gaps to capacity and their rate-normalised forms, (C − I_S)·√T and
/// (C − I_J2)·T/log2 T with one pilot, per blocklength.
pub fn convergence_table(t_grid: &[u32], snr: SnrValue) -> Result<Table> {
    check_blocklength_grid(t_grid)?;
    let (lo, hi) = (t_grid[0] as f64, t_grid[t_grid.len() - 1] as f64);
    if hi / lo < 100.0 {
        return Err(Error::domain(
            "grid",
            format!("convergence grid must span two decades, got {lo}..{hi}"),
        ));
    }
    let mut table = Table::new(vec![
        Column::new("T", ColumnKind::Count),
        Column::new("gap_separate", ColumnKind::Bits),
        Column::new("gap_separate_norm", ColumnKind::Bits),
        Column::new("gap_joint", ColumnKind::Bits),
        Column::new("gap_joint_norm", ColumnKind::Bits),
    ]);
    let c = capacity_csi(snr);
    let rows = collect_rows(t_grid, |&t| {
        let tf = t as f64;
        let gap_s = c - separate_bound(t, snr)?.value;
        let gap_j = c - joint_bound_j2(&SisoParams::new(t, 1, snr)?);
        Ok(vec![
            Cell::Int(t as i64),
            Cell::Num(gap_s),
            Cell::Num(gap_s * tf.sqrt()),
            Cell::Num(gap_j),
            Cell::Num(gap_j * tf / tf.log2()),
        ])
    })?;
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> McConfig {
        McConfig::new(2000, 3).unwrap()
    }

    fn band(v: &[f64]) -> f64 {
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        let min = v.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_spaced_integers(2, 100, 20);
        assert_eq!(g[0], 2);
        assert_eq!(*g.last().unwrap(), 100);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let c = default_convergence_grid();
        assert_eq!((c[0], *c.last().unwrap()), (10, 10_000));
    }

    #[test]
    fn fig1_orderings() {
        let t = sweep_fig1(&FIG1_GRID, &FIG1_SNR_DB).unwrap();
        assert_eq!(t.rows.len(), FIG1_GRID.len() * 2);
        let c = t.column_values("C").unwrap();
        let is = t.column_values("I_S").unwrap();
        let j1 = t.column_values("I_J1").unwrap();
        let j2 = t.column_values("I_J2").unwrap();
        let ts = t.column_values("T").unwrap();
        for i in 0..c.len() {
            assert!(j1[i] <= c[i] && j2[i] <= j1[i], "row {i}");
            // With T = 2 separate processing beats the one-pilot joint lower
            // bound; the bound is loose there, the ordering holds from T = 3.
            if ts[i] == 2.0 {
                assert!(is[i] > j1[i], "row {i}");
            } else {
                assert!(is[i] <= j1[i], "row {i}");
            }
        }
        // 10 dB rows: capacity is constant in T, the joint gap shrinks.
        let n = FIG1_GRID.len();
        assert!(c[n..].iter().all(|&v| (v - 2.906_515).abs() < 1e-6));
        let gaps: Vec<f64> = (n..2 * n).map(|i| c[i] - j1[i]).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fig2_orderings() {
        let t = sweep_fig2(&default_fig2_grid(), &FIG2_SNR_DB).unwrap();
        let asym = t.column_values("advantage_asymptotic_db").unwrap();
        let a10 = t.column_values("advantage_10db").unwrap();
        let a20 = t.column_values("advantage_20db").unwrap();
        for i in 0..asym.len() {
            assert!(a10[i] <= a20[i] + 1e-6 && a20[i] <= asym[i] + 1e-6, "row {i}");
        }
        assert_eq!(asym[0], 0.0);
        let t10 = sweep_fig2(&[10, 11], &[]).unwrap();
        assert!((t10.column_values("advantage_asymptotic_db").unwrap()[0] - 1.8992).abs() < 1e-3);
    }

    #[test]
    fn convergence_rates() {
        let t = convergence_table(&default_convergence_grid(), SnrValue::from_db(10.0).unwrap()).unwrap();
        let ts = t.column_values("T").unwrap();
        let top: Vec<usize> = (0..ts.len()).filter(|&i| ts[i] >= 1000.0).collect();
        let joint = t.column_values("gap_joint_norm").unwrap();
        let top_joint: Vec<f64> = top.iter().map(|&i| joint[i]).collect();
        assert!(band(&top_joint) <= 1.25, "{top_joint:?}");
        assert!(band(&t.column_values("gap_separate_norm").unwrap()) <= 2.0);
        for col in ["gap_separate", "gap_joint"] {
            let g = t.column_values(col).unwrap();
            assert!(g.windows(2).all(|w| w[1] < w[0]), "{col}");
        }
    }

    #[test]
    fn convergence_needs_two_decades() {
        let err = convergence_table(&[10, 20, 500], SnrValue::from_db(10.0).unwrap()).unwrap_err();
        assert_eq!(err.param(), Some("grid"));
        assert!(convergence_table(&[10, 1000], SnrValue::from_db(10.0).unwrap()).is_ok());
    }

    #[test]
    fn grids_must_increase() {
        assert!(sweep_fig1(&[4, 4], &[0.0]).is_err());
        assert!(sweep_fig1(&[1, 4], &[0.0]).is_err());
        assert!(sweep_fig2(&[4], &[0.0]).is_err());
        let spec = SweepSpec::new(
            SweepVariable::SnrDb,
            vec![0.0, -1.0],
            FixedParams::default(),
            vec![Curve::C],
            cfg(),
        );
        assert_eq!(spec.unwrap_err().param(), Some("grid"));
        let spec = SweepSpec::new(
            SweepVariable::Blocklength,
            vec![2.0, 2.5],
            FixedParams::default(),
            vec![Curve::C],
            cfg(),
        );
        assert_eq!(spec.unwrap_err().param(), Some("T"));
    }

    #[test]
    fn generic_sweep_matches_fixed_tables() {
        let spec = SweepSpec::new(
            SweepVariable::Blocklength,
            vec![4.0, 8.0, 16.0],
            FixedParams::default(),
            vec![Curve::C, Curve::Is, Curve::J1, Curve::J2, Curve::Asymptotes],
            cfg(),
        )
        .unwrap();
        let t = sweep(&spec).unwrap();
        let names: Vec<&str> = t.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            ["T", "C", "I_S", "tau_star_I_S", "I_J1", "I_J2", "advantage_asymptotic_db"]
        );
        let f1 = sweep_fig1(&[4, 8, 16], &[10.0]).unwrap();
        for col in ["C", "I_S", "I_J1", "I_J2"] {
            assert_eq!(t.column_values(col), f1.column_values(col), "{col}");
        }
    }

    #[test]
    fn mimo_sweep_has_error_columns() {
        let fixed = FixedParams {
            n_t: 2,
            n_r: 2,
            tau: 2,
            ..FixedParams::default()
        };
        let spec = SweepSpec::new(SweepVariable::SnrDb, vec![0.0, 10.0], fixed, vec![Curve::C, Curve::J2], cfg())
            .unwrap();
        let t = sweep(&spec).unwrap();
        let names: Vec<&str> = t.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["snr_db", "C", "C_se", "I_J2", "I_J2_se"]);
        assert!(t.column_values("C_se").unwrap().iter().all(|&s| s > 0.0));
        assert_eq!(sweep(&spec).unwrap(), t);
    }
}
