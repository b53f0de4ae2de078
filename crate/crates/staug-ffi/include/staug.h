/* C interface to the staug time-series augmentation library. */

#ifndef STAUG_H
#define STAUG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Augmentation method selector for experiment runs.
 */
typedef enum StaugAug {
  StaugAugNone = 0,
  StaugAugStaug = 1,
  StaugAugNofreq = 2,
  StaugAugNotime = 3,
  StaugAugFilter = 4,
  StaugAugPermute = 5,
} StaugAug;

/**
 * Result of every fallible call.
 */
typedef enum StaugStatus {
  /**
   * Success.
   */
  StaugOk = 0,
  /**
   * A null pointer or invalid handle was passed.
   */
  StaugNullArgument = 1,
  /**
   * Invalid configuration, bounds, shape, or input data.
   */
  StaugConfigError = 2,
  /**
   * Numerical failure (divergence, degenerate envelope).
   */
  StaugNumericalError = 3,
  /**
   * An output buffer was too small for the requested data.
   */
  StaugBufferTooSmall = 4,
} StaugStatus;

/**
 * Opaque single-channel decomposition handle.
 */
typedef struct StaugDecomposition StaugDecomposition;

/**
 * Opaque multivariate series handle.
 */
typedef struct StaugSeries StaugSeries;

/**
 * EMD sifting and termination parameters; mirror of the library defaults.
 */
typedef struct StaugEmdConfig {
  double sd_threshold;
  size_t max_sift_iters;
  size_t max_imfs;
  double residue_energy_ratio;
  size_t boundary_extrema;
} StaugEmdConfig;

/**
 * One train/evaluate run on a series already held in a handle.
 */
typedef struct StaugExperimentConfig {
  size_t context;
  size_t horizon;
  size_t stride;
  enum StaugAug aug;
  double alpha;
  double weight_low;
  double weight_high;
  double train_fraction;
  uint64_t seed;
  size_t epochs;
  size_t batch_size;
  double learning_rate;
  double lr_decay;
} StaugExperimentConfig;

/**
 * Forecast error on the test split.
 */
typedef struct StaugMetrics {
  double mse;
  double mae;
} StaugMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *staug_last_error(void);

/**
 * Library defaults for [`StaugEmdConfig`].
 */
struct StaugEmdConfig staug_emd_config_default(void);

/**
 * Library defaults for [`StaugExperimentConfig`] (96-step context/horizon,
 * no augmentation, seed 0).
 */
struct StaugExperimentConfig staug_experiment_config_default(void);

/**
 * Build a series from a channel-major buffer of `channels * length` values
 * (channel 0 first). Returns null on failure.
 *
 * # Safety
 * `values` must point to `channels * length` readable doubles.
 */
struct StaugSeries *staug_series_new(const double *values, size_t channels, size_t length);

/**
 * Load a series from a CSV file (header row, timestamp first column).
 * Returns null on failure.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string.
 */
struct StaugSeries *staug_series_from_csv(const char *path);

/**
 * Generate the synthetic tones + trend + noise series used by the test
 * harness. Returns null on failure.
 */
struct StaugSeries *staug_series_synth(size_t length,
                                       size_t channels,
                                       double noise_std,
                                       uint64_t seed);

/**
 * Release a series handle. Null is ignored.
 *
 * # Safety
 * `series` must come from a `staug_series_*` constructor and not be freed twice.
 */
void staug_series_free(struct StaugSeries *series);

/**
 * Number of time steps, or 0 for a null handle.
 *
 * # Safety
 * `series` must be a live series handle or null.
 */
size_t staug_series_len(const struct StaugSeries *series);

/**
 * Number of channels, or 0 for a null handle.
 *
 * # Safety
 * `series` must be a live series handle or null.
 */
size_t staug_series_channels(const struct StaugSeries *series);

/**
 * Decompose one channel into IMFs plus residue. Returns null on failure.
 *
 * # Safety
 * `series` must be a live series handle; `cfg` null means library defaults.
 */
struct StaugDecomposition *staug_decompose(const struct StaugSeries *series,
                                           size_t channel,
                                           const struct StaugEmdConfig *cfg);

/**
 * Release a decomposition handle. Null is ignored.
 *
 * # Safety
 * `dec` must come from [`staug_decompose`] and not be freed twice.
 */
void staug_decomposition_free(struct StaugDecomposition *dec);

/**
 * Number of IMFs, or 0 for a null handle.
 *
 * # Safety
 * `dec` must be a live decomposition handle or null.
 */
size_t staug_decomposition_imf_count(const struct StaugDecomposition *dec);

/**
 * Signal length, or 0 for a null handle.
 *
 * # Safety
 * `dec` must be a live decomposition handle or null.
 */
size_t staug_decomposition_len(const struct StaugDecomposition *dec);

/**
 * Copy IMF `index` (or the residue when `index` equals the IMF count) into
 * `out`, which must hold `out_len >= staug_decomposition_len(dec)` doubles.
 *
 * # Safety
 * `dec` must be a live decomposition handle; `out` must point to `out_len`
 * writable doubles.
 */
enum StaugStatus staug_decomposition_component(const struct StaugDecomposition *dec,
                                               size_t index,
                                               double *out,
                                               size_t out_len);

/**
 * Produce one augmented window (frequency recombination + mix-up) from the
 * stride-1 window at `offset`. History and future are written channel-major
 * into buffers of `channels * context` and `channels * horizon` doubles.
 *
 * # Safety
 * `series` must be a live series handle; `out_history` and `out_future` must
 * point to buffers of the stated sizes.
 */
enum StaugStatus staug_augment_window(const struct StaugSeries *series,
                                      size_t context,
                                      size_t horizon,
                                      size_t offset,
                                      uint64_t seed,
                                      double *out_history,
                                      double *out_future);

/**
 * Run a full train/evaluate experiment and write test metrics to `out`.
 *
 * # Safety
 * `series` must be a live series handle; `cfg` and `out` must be valid.
 */
enum StaugStatus staug_run_experiment(const struct StaugSeries *series,
                                      const struct StaugExperimentConfig *cfg,
                                      struct StaugMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STAUG_H */
