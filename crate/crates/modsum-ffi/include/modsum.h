#ifndef MODSUM_H
#define MODSUM_H

/* This file is generated from the modsum-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum ModsumStatus {
  /**
   * Success; the out parameter has been written.
   */
  MODSUM_OK = 0,
  /**
   * A parameter is outside its domain.
   */
  MODSUM_ERR_DOMAIN = 1,
  /**
   * The requested optimization problem has no feasible point.
   */
  MODSUM_ERR_INFEASIBLE = 2,
  /**
   * Internal solver failure.
   */
  MODSUM_ERR_INTERNAL = 3,
  /**
   * A required pointer argument was null.
   */
  MODSUM_ERR_NULL_POINTER = 4,
} ModsumStatus;

/**
 * Opaque source handle. The layout is private to this crate.
 */
typedef struct ModsumSource ModsumSource;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a source from P(Z=0) = `p` and the conditionals
 * P(X=0|Z=0) = `x0`, P(X=0|Z=1) = `x1`, P(Y=0|Z=0) = `y0`,
 * P(Y=0|Z=1) = `y1`. On success writes an owned handle to `out`.
 */
enum ModsumStatus modsum_source_new(double p,
                                    double x0,
                                    double x1,
                                    double y0,
                                    double y1,
                                    struct ModsumSource **out);

/**
 * Creates the running-example source with P(Z=0) = `p`.
 */
enum ModsumStatus modsum_source_probdist(double p, struct ModsumSource **out);

/**
 * Releases a handle created by `modsum_source_new` or
 * `modsum_source_probdist`. Null is accepted and ignored.
 */
void modsum_source_free(struct ModsumSource *source);

/**
 * Cut-set sum-rate lower bound, in bits per symbol.
 */
enum ModsumStatus modsum_cut_set(const struct ModsumSource *source, double *out);

/**
 * Closed-form sum-rate lower bound for the running-example family with
 * P(Z=0) = `p`.
 */
enum ModsumStatus modsum_theorem1(double p, double *out);

/**
 * Auxiliary-variable (envelope) sum-rate lower bound.
 */
enum ModsumStatus modsum_nw_extension(const struct ModsumSource *source, double *out);

/**
 * General coupling-based sum-rate lower bound.
 */
enum ModsumStatus modsum_theorem2(const struct ModsumSource *source, double *out);

/**
 * Minimum of H(M1) + H(M2) over all zero-error schemes at blocklength `n`
 * (1 or 2), via exhaustive enumeration under the default search budget.
 */
enum ModsumStatus modsum_min_sum_message_entropy(const struct ModsumSource *source,
                                                 uint32_t n,
                                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODSUM_H */
