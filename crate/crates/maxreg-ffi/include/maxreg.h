#ifndef MAXREG_H
#define MAXREG_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which engine evaluates the maximal operator.
 */
typedef enum MaxregEngine {
  MAXREG_ENGINE_ORACLE = 0,
  MAXREG_ENGINE_FAST = 1,
} MaxregEngine;

/**
 * Status codes returned by every entry point.
 */
typedef enum MaxregStatus {
  MAXREG_STATUS_OK = 0,
  /**
   * A check ran and failed (batch runs only).
   */
  MAXREG_STATUS_CHECK_FAILURES = 1,
  /**
   * Exponent or theorem hypotheses not satisfied.
   */
  MAXREG_STATUS_HYPOTHESES_UNMET = 2,
  MAXREG_STATUS_NULL_POINTER = 3,
  MAXREG_STATUS_INVALID_ARGUMENT = 4,
  MAXREG_STATUS_DEGENERATE_GEOMETRY = 5,
  MAXREG_STATUS_GRID_TOO_COARSE = 6,
  MAXREG_STATUS_OUTSIDE_DOMAIN = 7,
  MAXREG_STATUS_IO_ERROR = 8,
  MAXREG_STATUS_INTERNAL_PANIC = 9,
} MaxregStatus;

/**
 * Scalar field on the lattice that created it.
 */
typedef struct MaxregField MaxregField;

/**
 * Rasterized domain plus its stencil cache.
 */
typedef struct MaxregLattice MaxregLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *maxreg_last_error(void);

/**
 * Library version as a static string.
 */
const char *maxreg_version(void);

/**
 * Builds a lattice from a domain description
 * `{"kind": "...", "params": {...}}` and a grid spacing.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated UTF-8 string and `out` a valid
 * pointer. On success `*out` owns the lattice; free with
 * [`maxreg_lattice_free`].
 */
enum MaxregStatus maxreg_lattice_new(const char *spec_json, double h, struct MaxregLattice **out);

/**
 * Frees a lattice handle. Null is a no-op.
 *
 * # Safety
 * `ptr` must come from [`maxreg_lattice_new`] and not be freed twice.
 */
void maxreg_lattice_free(struct MaxregLattice *ptr);

/**
 * Number of grid nodes strictly inside the domain.
 *
 * # Safety
 * `ptr` must be a live lattice handle.
 */
int64_t maxreg_lattice_inside_count(const struct MaxregLattice *ptr);

/**
 * Spatial dimension of the lattice.
 *
 * # Safety
 * `ptr` must be a live lattice handle.
 */
int32_t maxreg_lattice_dim(const struct MaxregLattice *ptr);

/**
 * Copy of the distance-to-complement field.
 *
 * # Safety
 * `lat` must be live; `out` valid. Free the result with
 * [`maxreg_field_free`].
 */
enum MaxregStatus maxreg_lattice_delta(const struct MaxregLattice *lat, struct MaxregField **out);

/**
 * Realizes a generator spec (JSON) on the lattice.
 *
 * # Safety
 * `lat` must be live, `gen_json` NUL-terminated UTF-8, `out` valid.
 */
enum MaxregStatus maxreg_field_generate(const struct MaxregLattice *lat,
                                        const char *gen_json,
                                        struct MaxregField **out);

/**
 * Frees a field handle. Null is a no-op.
 *
 * # Safety
 * `ptr` must come from this library and not be freed twice.
 */
void maxreg_field_free(struct MaxregField *ptr);

/**
 * Number of values [`maxreg_field_values`] will write.
 *
 * # Safety
 * `ptr` must be a live field handle.
 */
int64_t maxreg_field_len(const struct MaxregField *ptr);

/**
 * Copies the inside-point values (row-major node order) into `buf`.
 *
 * # Safety
 * `buf` must have room for `maxreg_field_len` doubles.
 */
enum MaxregStatus maxreg_field_values(const struct MaxregField *ptr, double *buf, size_t len);

/**
 * Writes the field as CSV (row-major, blank cells outside the domain).
 *
 * # Safety
 * `ptr` live, `path` NUL-terminated UTF-8.
 */
enum MaxregStatus maxreg_field_write_csv(const struct MaxregField *ptr, const char *path);

/**
 * Evaluates the multilinear maximal operator over `m` slot fields.
 *
 * # Safety
 * `slots` must point to `m` live field handles created on `lat`'s grid;
 * `out` must be valid.
 */
enum MaxregStatus maxreg_local_maximal(const struct MaxregLattice *lat,
                                       const struct MaxregField *const *slots,
                                       size_t m,
                                       double alpha,
                                       enum MaxregEngine engine,
                                       double rel_tol,
                                       struct MaxregField **out);

/**
 * Evaluates the spherical maximal operator of one field.
 *
 * # Safety
 * `lat` and `field` live and matching; `out` valid.
 */
enum MaxregStatus maxreg_spherical_maximal(const struct MaxregLattice *lat,
                                           const struct MaxregField *field,
                                           double alpha,
                                           struct MaxregField **out);

/**
 * Runs a full JSON configuration, writing artifacts under `out_dir`.
 * Returns `Ok`, `CheckFailures` or `HypothesesUnmet` mirroring the CLI
 * exit contract; other codes signal setup errors.
 *
 * # Safety
 * Both strings NUL-terminated UTF-8.
 */
enum MaxregStatus maxreg_run_config(const char *config_json, const char *out_dir);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MAXREG_H */
