#ifndef DPGRAPH_H
#define DPGRAPH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum DpgStatus {
  DPG_STATUS_OK = 0,
  DPG_STATUS_NULL_POINTER = 1,
  DPG_STATUS_INVALID_UTF8 = 2,
  DPG_STATUS_INVALID_ARGUMENT = 3,
  DPG_STATUS_PARSE_ERROR = 4,
  DPG_STATUS_GRAPH_ERROR = 5,
  DPG_STATUS_BOUND_VIOLATION = 6,
  DPG_STATUS_UNSUPPORTED = 7,
  DPG_STATUS_BUFFER_TOO_SMALL = 8,
  DPG_STATUS_PANIC = 9,
} DpgStatus;

typedef enum DpgMechanism {
  DPG_MECHANISM_SENS_DIFF = 0,
  DPG_MECHANISM_COMPOSE_BOUNDED = 1,
  DPG_MECHANISM_COMPOSE_PROJECTION = 2,
} DpgMechanism;

/**
 * Opaque released series.
 */
typedef struct DpgRelease DpgRelease;

/**
 * Opaque graph sequence.
 */
typedef struct DpgSequence DpgSequence;

typedef struct DpgSynthetic1Params {
  size_t m0;
  size_t per_year;
  size_t years;
  size_t refs;
  double p_isolated;
  double decay;
  uint64_t seed;
} DpgSynthetic1Params;

typedef struct DpgSynthetic2Params {
  size_t population;
  size_t attach;
  double p_recover;
  double p_infect;
  size_t initial_infected;
  size_t max_steps;
  uint64_t seed;
} DpgSynthetic2Params;

/**
 * `bounds` and `projection_thresholds` are optional: `"D"` or
 * `"D_in:D_out"`, NULL to derive them from the data.
 */
typedef struct DpgReleaseConfig {
  const char *statistic;
  enum DpgMechanism mechanism;
  double epsilon;
  const char *bounds;
  const char *projection_thresholds;
  uint64_t seed;
  uint64_t trial;
  bool zero_noise;
} DpgReleaseConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *dpg_last_error_message(void);

/**
 * Parses the text edge-list format.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum DpgStatus dpg_sequence_from_edge_list(const char *text,
                                           const int64_t *time_origin,
                                           struct DpgSequence **out);

/**
 * # Safety
 * `seq` must come from this library and not be used afterwards.
 */
void dpg_sequence_free(struct DpgSequence *seq);

/**
 * Number of time steps, 0 for NULL.
 *
 * # Safety
 * `seq` must be NULL or a live handle.
 */
size_t dpg_sequence_horizon(const struct DpgSequence *seq);

/**
 * # Safety
 * `seq` must be NULL or a live handle.
 */
size_t dpg_sequence_node_count(const struct DpgSequence *seq);

/**
 * # Safety
 * `seq` must be NULL or a live handle.
 */
size_t dpg_sequence_edge_count(const struct DpgSequence *seq);

struct DpgSynthetic1Params dpg_synthetic1_default_params(void);

struct DpgSynthetic2Params dpg_synthetic2_default_params(void);

/**
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum DpgStatus dpg_generate_synthetic1(const struct DpgSynthetic1Params *params,
                                       struct DpgSequence **out);

/**
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum DpgStatus dpg_generate_synthetic2(const struct DpgSynthetic2Params *params,
                                       struct DpgSequence **out);

/**
 * Serializes to the edge-list format. Free the result with
 * [`dpg_string_free`].
 *
 * # Safety
 * `seq` must be a live handle and `out` a valid pointer.
 */
enum DpgStatus dpg_sequence_to_edge_list(const struct DpgSequence *seq, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void dpg_string_free(char *s);

/**
 * Exact values `f(G_1), …, f(G_T)` of a scalar statistic. Writes at most
 * `cap` values and stores the horizon in `len`; fails with
 * `BufferTooSmall` when `cap` is less than the horizon.
 *
 * # Safety
 * `out` must have room for `cap` doubles; `len` must be valid.
 */
enum DpgStatus dpg_statistic_series(const struct DpgSequence *seq,
                                    const char *statistic,
                                    double *out,
                                    size_t cap,
                                    size_t *len);

/**
 * Difference-sequence sensitivity for `bounds` (`"D"` or `"D_in:D_out"`).
 *
 * # Safety
 * String arguments must be valid C strings; `out` must be valid.
 */
enum DpgStatus dpg_diff_sensitivity(const char *statistic, const char *bounds, uint64_t *out);

/**
 * Runs one mechanism once.
 *
 * # Safety
 * `seq` must be a live handle, `cfg` and `out` valid pointers and the
 * strings in `cfg` NULL or valid C strings.
 */
enum DpgStatus dpg_release(const struct DpgSequence *seq,
                           const struct DpgReleaseConfig *cfg,
                           struct DpgRelease **out);

/**
 * Number of releases.
 *
 * # Safety
 * `rel` must be NULL or a live handle.
 */
size_t dpg_release_len(const struct DpgRelease *rel);

/**
 * Values per release: 1 for scalars, the degree range for histograms.
 *
 * # Safety
 * `rel` must be NULL or a live handle.
 */
size_t dpg_release_width(const struct DpgRelease *rel);

/**
 * Pointer to `len * width` values in release-major order, owned by `rel`.
 *
 * # Safety
 * `rel` must be NULL or a live handle.
 */
const double *dpg_release_values(const struct DpgRelease *rel);

/**
 * # Safety
 * `rel` must be NULL or a live handle.
 */
uint64_t dpg_release_sensitivity(const struct DpgRelease *rel);

/**
 * # Safety
 * `rel` must be NULL or a live handle.
 */
double dpg_release_noise_scale(const struct DpgRelease *rel);

/**
 * # Safety
 * `rel` must come from this library and not be used afterwards.
 */
void dpg_release_free(struct DpgRelease *rel);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPGRAPH_H */
