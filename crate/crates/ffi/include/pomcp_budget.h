#ifndef POMCP_BUDGET_H
#define POMCP_BUDGET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum PbStatus {
  /**
   * The call succeeded.
   */
  PbOk = 0,
  /**
   * A required pointer argument was null.
   */
  PbNullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PbInvalidUtf8 = 2,
  /**
   * The configuration JSON failed to parse or validate.
   */
  PbInvalidConfig = 3,
  /**
   * A numeric routine failed (ill-conditioned Gram matrix).
   */
  PbNumericError = 4,
  /**
   * Any other runtime failure; see `pb_last_error`.
   */
  PbRuntimeError = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  PbPanic = 6,
} PbStatus;

/**
 * Opaque experiment handle: a validated configuration plus the environment
 * built from it. Created by `pb_config_from_json`, released by
 * `pb_config_free`.
 */
typedef struct PbConfig PbConfig;

/**
 * Flat per-episode metrics filled in by `pb_episode_run`.
 */
typedef struct PbEpisodeMetrics {
  /**
   * Number of environment steps taken.
   */
  uint64_t steps;
  /**
   * Sum of per-step rewards under the pre-update belief.
   */
  double total_reward;
  /**
   * Sum of ground-truth field values along the executed trajectory.
   */
  double total_truth;
  /**
   * Rollouts actually spent planning over the episode.
   */
  uint64_t total_rollouts;
  /**
   * Steps on which the planner was invoked (the rest executed a
   * previously committed action for free).
   */
  uint64_t planning_calls;
  /**
   * Planning wall-clock time in milliseconds.
   */
  double total_wall_ms;
} PbEpisodeMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a JSON experiment configuration.
 *
 * On success writes a heap-allocated handle to `out` and returns `PbOk`;
 * the caller owns the handle and must release it with `pb_config_free`.
 * On failure `out` is untouched.
 *
 * # Safety
 * `json` must point to a nul-terminated string and `out` to writable
 * storage for one pointer.
 */
enum PbStatus pb_config_from_json(const char *json, struct PbConfig **out);

/**
 * Releases a handle returned by `pb_config_from_json`. A null handle is a
 * no-op.
 *
 * # Safety
 * `handle` must be null or a pointer obtained from `pb_config_from_json`
 * that has not already been freed.
 */
void pb_config_free(struct PbConfig *handle);

/**
 * Runs one seeded episode and fills `metrics`. The handle is not mutated,
 * so episodes for different seeds may run concurrently on one handle.
 *
 * # Safety
 * `handle` must be a live pointer from `pb_config_from_json` and `metrics`
 * must point to writable storage for one `PbEpisodeMetrics`.
 */
enum PbStatus pb_episode_run(const struct PbConfig *handle,
                             uint64_t seed,
                             struct PbEpisodeMetrics *metrics);

/**
 * Copies the message for the most recent failure on this thread into `buf`
 * (truncated to `len - 1` bytes, always nul-terminated when `len > 0`) and
 * returns the full message length in bytes, excluding the terminator. Call
 * with a null `buf` or zero `len` to query the required size.
 *
 * # Safety
 * When non-null, `buf` must point to at least `len` writable bytes.
 */
uintptr_t pb_last_error(char *buf, uintptr_t len);

/**
 * Library version as a static nul-terminated string; the caller must not
 * free it.
 */
const char *pb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POMCP_BUDGET_H */
