#ifndef MODTREE_H
#define MODTREE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Classification of an infinite-tree modulus.
 */
typedef enum MtModulusKind {
  MT_MODULUS_POSITIVE = 0,
  MT_MODULUS_ZERO = 1,
  MT_MODULUS_INCONCLUSIVE = 2,
} MtModulusKind;

/**
 * Status codes returned by every fallible call.
 */
typedef enum MtStatus {
  /**
   * Success.
   */
  MT_STATUS_OK = 0,
  /**
   * A pointer argument was null.
   */
  MT_STATUS_NULL_ARGUMENT = 1,
  /**
   * The input document or parameter was invalid.
   */
  MT_STATUS_INVALID_INPUT = 2,
  /**
   * The computation could not certify a result.
   */
  MT_STATUS_INCONCLUSIVE = 3,
  /**
   * An internal error (panic) occurred.
   */
  MT_STATUS_INTERNAL = 4,
} MtStatus;

/**
 * Transience classification of the conductance-weighted random walk.
 */
typedef enum MtWalkClass {
  MT_WALK_TRANSIENT = 0,
  MT_WALK_RECURRENT = 1,
  MT_WALK_UNDETERMINED = 2,
} MtWalkClass;

/**
 * Opaque handle for an explicit finite tree.
 */
typedef struct MtFiniteTree MtFiniteTree;

/**
 * Opaque handle for a radially symmetric tree specification.
 */
typedef struct MtSpec MtSpec;

/**
 * Critical-exponent bracket for a skip-sequence tree.
 */
typedef struct MtPcEstimate {
  /**
   * Lower end of the bracket; meaningless when an endpoint flag is set.
   */
  double p_lo;
  /**
   * Upper end of the bracket; meaningless when an endpoint flag is set.
   */
  double p_hi;
  /**
   * Point estimate; meaningless when an endpoint flag is set.
   */
  double estimate;
  /**
   * Nonzero when the series is summable for every exponent.
   */
  uint8_t pc_is_one;
  /**
   * Nonzero when the series diverges for every exponent.
   */
  uint8_t pc_is_infinite;
} MtPcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message for the most recent failure on this thread, or null if
 * no failure has occurred. The pointer stays valid until the next failing
 * call on the same thread.
 */
const char *mt_last_error_message(void);

/**
 * Parses a radially symmetric tree document (JSON, kind "radial" or "skip")
 * into a new handle. The handle must be released with `mt_spec_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum MtStatus mt_spec_parse(const char *json, struct MtSpec **out);

/**
 * Releases a handle created by `mt_spec_parse`. Passing null is a no-op.
 *
 * # Safety
 * `spec` must be null or a pointer previously returned by `mt_spec_parse`
 * that has not been freed.
 */
void mt_spec_free(struct MtSpec *spec);

/**
 * Parses an explicit finite tree document (JSON, kind "finite") into a new
 * handle. The handle must be released with `mt_finite_tree_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum MtStatus mt_finite_tree_parse(const char *json, struct MtFiniteTree **out);

/**
 * Releases a handle created by `mt_finite_tree_parse`. Passing null is a
 * no-op.
 *
 * # Safety
 * `tree` must be null or a pointer previously returned by
 * `mt_finite_tree_parse` that has not been freed.
 */
void mt_finite_tree_free(struct MtFiniteTree *tree);

/**
 * Classifies the p-modulus of the full infinite family. `out_value` receives
 * the modulus when the classification is positive, 0 when it is zero, and is
 * not written otherwise.
 *
 * # Safety
 * All pointers must be valid; `spec` must be a live `mt_spec_parse` handle.
 */
enum MtStatus mt_mod_p_infinite(const struct MtSpec *spec,
                                double p,
                                enum MtModulusKind *out_kind,
                                double *out_value);

/**
 * Exact modulus of the depth-`n` truncation.
 *
 * # Safety
 * All pointers must be valid; `spec` must be a live `mt_spec_parse` handle.
 */
enum MtStatus mt_mod_p_truncated(const struct MtSpec *spec, double p, size_t n, double *out_value);

/**
 * Brackets the critical exponent of a skip-sequence tree to within
 * `resolution`.
 *
 * # Safety
 * All pointers must be valid; `spec` must be a live `mt_spec_parse` handle
 * whose children rule is a skip sequence.
 */
enum MtStatus mt_estimate_pc(const struct MtSpec *spec,
                             double resolution,
                             struct MtPcEstimate *out);

/**
 * Classifies the conductance-weighted random walk on the tree as transient
 * or recurrent via the 2-modulus.
 *
 * # Safety
 * All pointers must be valid; `spec` must be a live `mt_spec_parse` handle.
 */
enum MtStatus mt_classify_walk(const struct MtSpec *spec, enum MtWalkClass *out_class);

/**
 * Numerically solves the modulus problem on an explicit finite tree.
 * `out_density` (optional, may be null) must point to at least
 * `mt_finite_tree_edge_count` doubles and receives the optimal density in
 * edge-index order.
 *
 * # Safety
 * `tree` must be a live `mt_finite_tree_parse` handle; `out_value` must be
 * valid; `out_density` must be null or a buffer of at least edge-count
 * doubles.
 */
enum MtStatus mt_solve(const struct MtFiniteTree *tree,
                       double p,
                       double *out_value,
                       double *out_density);

/**
 * Number of edges of a finite-tree handle.
 *
 * # Safety
 * `tree` must be a live `mt_finite_tree_parse` handle.
 */
size_t mt_finite_tree_edge_count(const struct MtFiniteTree *tree);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MODTREE_H */
