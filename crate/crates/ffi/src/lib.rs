//! C interface to `blockfade`.
//!
//! Every function returns a [`BfStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`bf_last_error_message`]. SNRs are passed in dB.
//!
//! Monte Carlo configurations and result tables are opaque handles created
//! and freed by this library.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blockfade::mc::{Estimate, McConfig};
use blockfade::table::Table;
use blockfade::{mimo, siso, specfun, sweeps, validate, Error, SnrValue};

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Saturation = 4,
    ValidationFailed = 5,
    Internal = 6,
    Panic = 7,
}

/// A sampled or exact value; `samples_used == 0` marks an exact value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples_used: u64,
}

impl From<Estimate> for BfEstimate {
    fn from(e: Estimate) -> Self {
        BfEstimate {
            mean: e.mean,
            std_error: e.std_error,
            samples_used: e.samples_used,
        }
    }
}

/// Opaque Monte Carlo configuration.
pub struct BfMcConfig(McConfig);

/// Opaque result table.
pub struct BfTable(Table);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BfStatus {
    match e {
        Error::Domain { .. } => BfStatus::InvalidArgument,
        Error::Range { .. } => BfStatus::OutOfRange,
        Error::Saturation(_) => BfStatus::Saturation,
        Error::Validation(_) => BfStatus::ValidationFailed,
        Error::Internal(_) => BfStatus::Internal,
    }
}

struct Fail(BfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> BfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_last_error(format!("panic: {msg}"));
            BfStatus::Panic
        }
    }
}

/// Writes through `out` after checking it.
///
/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn snr(db: f64) -> Result<SnrValue, Fail> {
    Ok(SnrValue::from_db(db)?)
}

/// # Safety
/// `cfg` must be null or a live handle from [`bf_mc_config_new`].
unsafe fn config<'a>(cfg: *const BfMcConfig) -> Result<&'a McConfig, Fail> {
    cfg.as_ref().map(|c| &c.0).ok_or_else(|| null("config"))
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null("array"));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL,
/// or 0 if there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a Monte Carlo configuration. Free with [`bf_mc_config_free`].
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bf_mc_config_new(samples: u64, seed: u64, out: *mut *mut BfMcConfig) -> BfStatus {
    guard(|| {
        let cfg = McConfig::new(samples, seed)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        put(out, Box::into_raw(Box::new(BfMcConfig(cfg))))
    })
}

/// # Safety
/// `cfg` must be null or a handle from [`bf_mc_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bf_mc_config_free(cfg: *mut BfMcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// e^x·E_k(x).
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_expint_scaled(k: u32, x: f64, out: *mut f64) -> BfStatus {
    guard(|| put(out, specfun::expint_scaled(k, x)?.scaled_value))
}

/// Perfect-CSI capacity in bits/s/Hz.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_capacity_csi(snr_db: f64, out: *mut f64) -> BfStatus {
    guard(|| put(out, siso::capacity_csi(snr(snr_db)?)))
}

/// Separate-processing efficiency and its optimal pilot count.
///
/// # Safety
/// `out_value` and `out_tau` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bf_separate_bound(
    blocklength: u32,
    snr_db: f64,
    out_value: *mut f64,
    out_tau: *mut u32,
) -> BfStatus {
    guard(|| {
        if out_value.is_null() || out_tau.is_null() {
            return Err(null("output pointer"));
        }
        let s = siso::separate_bound(blocklength, snr(snr_db)?)?;
        put(out_value, s.value)?;
        put(out_tau, s.tau_star)
    })
}

/// First joint-processing lower bound.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_joint_bound_j1(blocklength: u32, tau: u32, snr_db: f64, out: *mut f64) -> BfStatus {
    guard(|| {
        let p = siso::SisoParams::new(blocklength, tau, snr(snr_db)?)?;
        put(out, siso::joint_bound_j1(&p))
    })
}

/// Second (simpler) joint-processing lower bound.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_joint_bound_j2(blocklength: u32, tau: u32, snr_db: f64, out: *mut f64) -> BfStatus {
    guard(|| {
        let p = siso::SisoParams::new(blocklength, tau, snr(snr_db)?)?;
        put(out, siso::joint_bound_j2(&p))
    })
}

/// Asymptotic power advantage of joint over separate processing, in dB.
///
/// # Safety
/// `out_db` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_power_advantage_asymptotic(blocklength: u32, out_db: *mut f64) -> BfStatus {
    guard(|| put(out_db, siso::power_advantage_asymptotic(blocklength)?.db))
}

/// Power advantage at a finite SNR, in dB.
///
/// # Safety
/// `out_db` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_power_advantage_at_snr(blocklength: u32, snr_db: f64, out_db: *mut f64) -> BfStatus {
    guard(|| put(out_db, siso::power_advantage_at_snr(blocklength, snr(snr_db)?)?.db))
}

/// High-SNR gain of one pilot over none, in dB.
///
/// # Safety
/// `out_db` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_single_pilot_advantage(blocklength: u32, out_db: *mut f64) -> BfStatus {
    guard(|| put(out_db, siso::single_pilot_advantage(blocklength)?.db))
}

/// High-SNR gap to the noncoherent capacity with the Stirling approximation, in dB.
///
/// # Safety
/// `out_db` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_true_capacity_gap_stirling(blocklength: u32, out_db: *mut f64) -> BfStatus {
    guard(|| put(out_db, siso::true_capacity_gap(blocklength)?.stirling.db))
}

/// Ergodic MIMO capacity functional C_{t,r}; exact when t or r is 1.
///
/// # Safety
/// `cfg` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_capacity_ctr(
    t: u32,
    r: u32,
    snr_db: f64,
    cfg: *const BfMcConfig,
    out: *mut BfEstimate,
) -> BfStatus {
    guard(|| {
        let cfg = config(cfg)?;
        put(out, mimo::capacity_ctr(t, r, snr(snr_db)?, cfg)?.into())
    })
}

/// # Safety
/// `cfg` must be a live handle and `out` valid for a write.
#[allow(clippy::too_many_arguments)]
unsafe fn mimo_bound(
    which: fn(&mimo::MimoParams, &McConfig) -> blockfade::Result<Estimate>,
    n_t: u32,
    n_r: u32,
    blocklength: u32,
    tau: u32,
    snr_db: f64,
    cfg: *const BfMcConfig,
    out: *mut BfEstimate,
) -> BfStatus {
    guard(|| {
        let cfg = config(cfg)?;
        let p = mimo::MimoParams::new(n_t, n_r, blocklength, tau, snr(snr_db)?)?;
        put(out, which(&p, cfg)?.into())
    })
}

/// First joint bound with n_t transmit and n_r receive antennas.
///
/// # Safety
/// `cfg` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_mimo_joint_j1(
    n_t: u32,
    n_r: u32,
    blocklength: u32,
    tau: u32,
    snr_db: f64,
    cfg: *const BfMcConfig,
    out: *mut BfEstimate,
) -> BfStatus {
    mimo_bound(mimo::mimo_joint_j1, n_t, n_r, blocklength, tau, snr_db, cfg, out)
}

/// Second joint bound with n_t transmit and n_r receive antennas.
///
/// # Safety
/// `cfg` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_mimo_joint_j2(
    n_t: u32,
    n_r: u32,
    blocklength: u32,
    tau: u32,
    snr_db: f64,
    cfg: *const BfMcConfig,
    out: *mut BfEstimate,
) -> BfStatus {
    mimo_bound(mimo::mimo_joint_j2, n_t, n_r, blocklength, tau, snr_db, cfg, out)
}

/// # Safety
/// `out` must be valid for a pointer write.
unsafe fn emit_table(out: *mut *mut BfTable, table: Table) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(BfTable(table))))
}

/// Efficiency-vs-blocklength table. Free with [`bf_table_free`].
///
/// # Safety
/// `grid` and `snrs_db` must hold `grid_len` and `snrs_len` values; `out`
/// must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bf_sweep_fig1(
    grid: *const u32,
    grid_len: usize,
    snrs_db: *const f64,
    snrs_len: usize,
    out: *mut *mut BfTable,
) -> BfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let t = sweeps::sweep_fig1(slice(grid, grid_len)?, slice(snrs_db, snrs_len)?)?;
        emit_table(out, t)
    })
}

/// Power-advantage-vs-blocklength table. Free with [`bf_table_free`].
///
/// # Safety
/// As for [`bf_sweep_fig1`].
#[no_mangle]
pub unsafe extern "C" fn bf_sweep_fig2(
    grid: *const u32,
    grid_len: usize,
    snrs_db: *const f64,
    snrs_len: usize,
    out: *mut *mut BfTable,
) -> BfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let t = sweeps::sweep_fig2(slice(grid, grid_len)?, slice(snrs_db, snrs_len)?)?;
        emit_table(out, t)
    })
}

/// Gap-to-capacity table; the grid must span two decades.
///
/// # Safety
/// `grid` must hold `grid_len` values; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bf_convergence_table(
    grid: *const u32,
    grid_len: usize,
    snr_db: f64,
    out: *mut *mut BfTable,
) -> BfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let t = sweeps::convergence_table(slice(grid, grid_len)?, snr(snr_db)?)?;
        emit_table(out, t)
    })
}

/// Runs the closed-form-vs-Monte-Carlo report. The table is produced even
/// when a check fails; `out_passed` tells which.
///
/// # Safety
/// `cfg` must be a live handle; `out` and `out_passed` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bf_validate_all(cfg: *const BfMcConfig, out: *mut *mut BfTable, out_passed: *mut bool) -> BfStatus {
    guard(|| {
        if out.is_null() || out_passed.is_null() {
            return Err(null("output pointer"));
        }
        let report = validate::validate_all(config(cfg)?)?;
        put(out_passed, report.passed())?;
        emit_table(out, report.to_table())
    })
}

/// # Safety
/// `table` must be null or a live table handle.
#[no_mangle]
pub unsafe extern "C" fn bf_table_free(table: *mut BfTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live table handle.
#[no_mangle]
pub unsafe extern "C" fn bf_table_rows(table: *const BfTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.rows.len())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live table handle.
#[no_mangle]
pub unsafe extern "C" fn bf_table_columns(table: *const BfTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.columns.len())
}

/// Copies the name of column `col` into `buf` like
/// [`bf_last_error_message`]; the full length goes to `out_len`.
///
/// # Safety
/// `table` must be a live handle, `buf` valid for `len` bytes (or null),
/// `out_len` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_table_column_name(
    table: *const BfTable,
    col: usize,
    buf: *mut c_char,
    len: usize,
    out_len: *mut usize,
) -> BfStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        let c = t.0.columns.get(col).ok_or_else(|| {
            Fail(BfStatus::OutOfRange, format!("column {col} out of range"))
        })?;
        let bytes = c.name.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        put(out_len, bytes.len())
    })
}

/// Numeric value at (`row`, `col`) at full precision. Text cells give
/// `BF_STATUS_INVALID_ARGUMENT`; empty cells give NaN.
///
/// # Safety
/// `table` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bf_table_value(table: *const BfTable, row: usize, col: usize, out: *mut f64) -> BfStatus {
    use blockfade::table::Cell;
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        let cell = t
            .0
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .ok_or_else(|| Fail(BfStatus::OutOfRange, format!("cell ({row}, {col}) out of range")))?;
        let v = match cell {
            Cell::Int(v) => *v as f64,
            Cell::Num(v) => *v,
            Cell::Flag(b) => f64::from(u8::from(*b)),
            Cell::Empty => f64::NAN,
            Cell::Text(_) => {
                return Err(Fail(
                    BfStatus::InvalidArgument,
                    format!("cell ({row}, {col}) holds text"),
                ))
            }
        };
        put(out, v)
    })
}
