#ifndef BLOCKFADE_H
#define BLOCKFADE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call.
typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_POINTER = 1,
  BF_STATUS_INVALID_ARGUMENT = 2,
  BF_STATUS_OUT_OF_RANGE = 3,
  BF_STATUS_SATURATION = 4,
  BF_STATUS_VALIDATION_FAILED = 5,
  BF_STATUS_INTERNAL = 6,
  BF_STATUS_PANIC = 7,
} BfStatus;

// Opaque Monte Carlo configuration.
typedef struct BfMcConfig BfMcConfig;

// Opaque result table.
typedef struct BfTable BfTable;

// A sampled or exact value; `samples_used == 0` marks an exact value.
typedef struct BfEstimate {
  double mean;
  double std_error;
  uint64_t samples_used;
} BfEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length excluding the NUL,
// or 0 if there is none.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t bf_last_error_message(char *buf, size_t len);

// Creates a Monte Carlo configuration. Free with [`bf_mc_config_free`].
//
// # Safety
// `out` must be valid for a pointer write.
enum BfStatus bf_mc_config_new(uint64_t samples, uint64_t seed, struct BfMcConfig **out);

// # Safety
// `cfg` must be null or a handle from [`bf_mc_config_new`] not yet freed.
void bf_mc_config_free(struct BfMcConfig *cfg);

// e^x·E_k(x).
//
// # Safety
// `out` must be valid for a write.
enum BfStatus bf_expint_scaled(uint32_t k, double x, double *out);

// Perfect-CSI capacity in bits/s/Hz.
//
// # Safety
// `out` must be valid for a write.
enum BfStatus bf_capacity_csi(double snr_db, double *out);

// Separate-processing efficiency and its optimal pilot count.
//
// # Safety
// `out_value` and `out_tau` must be valid for writes.
enum BfStatus bf_separate_bound(uint32_t blocklength,
                                double snr_db,
                                double *out_value,
                                uint32_t *out_tau);

// First joint-processing lower bound.
//
// # Safety
// `out` must be valid for a write.
enum BfStatus bf_joint_bound_j1(uint32_t blocklength, uint32_t tau, double snr_db, double *out);

// Second (simpler) joint-processing lower bound.
//
// # Safety
// `out` must be valid for a write.
enum BfStatus bf_joint_bound_j2(uint32_t blocklength, uint32_t tau, double snr_db, double *out);

// Asymptotic power advantage of joint over separate processing, in dB.
//
// # Safety
// `out_db` must be valid for a write.
enum BfStatus bf_power_advantage_asymptotic(uint32_t blocklength, double *out_db);

// Power advantage at a finite SNR, in dB.
//
// # Safety
// `out_db` must be valid for a write.
enum BfStatus bf_power_advantage_at_snr(uint32_t blocklength, double snr_db, double *out_db);

// High-SNR gain of one pilot over none, in dB.
//
// # Safety
// `out_db` must be valid for a write.
enum BfStatus bf_single_pilot_advantage(uint32_t blocklength, double *out_db);

// High-SNR gap to the noncoherent capacity with the Stirling approximation, in dB.
//
// # Safety
// `out_db` must be valid for a write.
enum BfStatus bf_true_capacity_gap_stirling(uint32_t blocklength, double *out_db);

// Ergodic MIMO capacity functional C_{t,r}; exact when t or r is 1.
//
// # Safety
// `cfg` must be a live handle and `out` valid for a write.
enum BfStatus bf_capacity_ctr(uint32_t t,
                              uint32_t r,
                              double snr_db,
                              const struct BfMcConfig *cfg,
                              struct BfEstimate *out);

// First joint bound with n_t transmit and n_r receive antennas.
//
// # Safety
// `cfg` must be a live handle and `out` valid for a write.
enum BfStatus bf_mimo_joint_j1(uint32_t n_t,
                               uint32_t n_r,
                               uint32_t blocklength,
                               uint32_t tau,
                               double snr_db,
                               const struct BfMcConfig *cfg,
                               struct BfEstimate *out);

// Second joint bound with n_t transmit and n_r receive antennas.
//
// # Safety
// `cfg` must be a live handle and `out` valid for a write.
enum BfStatus bf_mimo_joint_j2(uint32_t n_t,
                               uint32_t n_r,
                               uint32_t blocklength,
                               uint32_t tau,
                               double snr_db,
                               const struct BfMcConfig *cfg,
                               struct BfEstimate *out);

// Efficiency-vs-blocklength table. Free with [`bf_table_free`].
//
// # Safety
// `grid` and `snrs_db` must hold `grid_len` and `snrs_len` values; `out`
// must be valid for a pointer write.
enum BfStatus bf_sweep_fig1(const uint32_t *grid,
                            size_t grid_len,
                            const double *snrs_db,
                            size_t snrs_len,
                            struct BfTable **out);

// Power-advantage-vs-blocklength table. Free with [`bf_table_free`].
//
// # Safety
// As for [`bf_sweep_fig1`].
enum BfStatus bf_sweep_fig2(const uint32_t *grid,
                            size_t grid_len,
                            const double *snrs_db,
                            size_t snrs_len,
                            struct BfTable **out);

// Gap-to-capacity table; the grid must span two decades.
//
// # Safety
// `grid` must hold `grid_len` values; `out` must be valid for a pointer write.
enum BfStatus bf_convergence_table(const uint32_t *grid,
                                   size_t grid_len,
                                   double snr_db,
                                   struct BfTable **out);

// Runs the closed-form-vs-Monte-Carlo report. The table is produced even
// when a check fails; `out_passed` tells which.
//
// # Safety
// `cfg` must be a live handle; `out` and `out_passed` valid for writes.
enum BfStatus bf_validate_all(const struct BfMcConfig *cfg, struct BfTable **out, bool *out_passed);

// # Safety
// `table` must be null or a live table handle.
void bf_table_free(struct BfTable *table);

// Row count, or 0 for a null handle.
//
// # Safety
// `table` must be null or a live table handle.
size_t bf_table_rows(const struct BfTable *table);

// Column count, or 0 for a null handle.
//
// # Safety
// `table` must be null or a live table handle.
size_t bf_table_columns(const struct BfTable *table);

// Copies the name of column `col` into `buf` like
// [`bf_last_error_message`]; the full length goes to `out_len`.
//
// # Safety
// `table` must be a live handle, `buf` valid for `len` bytes (or null),
// `out_len` valid for a write.
enum BfStatus bf_table_column_name(const struct BfTable *table,
                                   size_t col,
                                   char *buf,
                                   size_t len,
                                   size_t *out_len);

// Numeric value at (`row`, `col`) at full precision. Text cells give
// `BF_STATUS_INVALID_ARGUMENT`; empty cells give NaN.
//
// # Safety
// `table` must be a live handle and `out` valid for a write.
enum BfStatus bf_table_value(const struct BfTable *table, size_t row, size_t col, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOCKFADE_H */
