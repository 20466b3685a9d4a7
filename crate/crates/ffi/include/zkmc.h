#ifndef ZKMC_H
#define ZKMC_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZkmcStatus {
  /**
   * Success, a valid certificate or an accepted proof.
   */
  ZKMC_STATUS_OK = 0,
  /**
   * The certificate is invalid or the proof was rejected.
   */
  ZKMC_STATUS_INVALID = 1,
  /**
   * Malformed certificate text or graph JSON.
   */
  ZKMC_STATUS_PARSE = 2,
  ZKMC_STATUS_NULL_POINTER = 3,
  /**
   * The arguments do not fit together, e.g. a table ranking given to the symbolic scheme.
   */
  ZKMC_STATUS_INVALID_ARGUMENT = 4,
  /**
   * Parameter or bundle bytes could not be decoded.
   */
  ZKMC_STATUS_DECODE = 5,
  /**
   * An internal failure; the library caught a panic.
   */
  ZKMC_STATUS_INTERNAL = 6,
} ZkmcStatus;

/**
 * Owned bytes returned to the caller.
 */
typedef struct ZkmcBuffer ZkmcBuffer;

/**
 * An explicit graph or its labels-only state space.
 */
typedef struct ZkmcGraph ZkmcGraph;

/**
 * A parsed `.zkgc` unit.
 */
typedef struct ZkmcUnit ZkmcUnit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty after a success.
 *
 * The pointer stays valid until the next library call on the same thread.
 */
const char *zkmc_last_error(void);

/**
 * Parses a NUL-terminated `.zkgc` unit with coefficient bound `bound`.
 *
 * # Safety
 * `source` must be a valid C string and `out` a writable pointer.
 */
enum ZkmcStatus zkmc_unit_parse(const char *source, uint64_t bound, struct ZkmcUnit **out);

/**
 * # Safety
 * `unit` must come from [`zkmc_unit_parse`] and not be used afterwards. Null is ignored.
 */
void zkmc_unit_free(struct ZkmcUnit *unit);

/**
 * Parses a graph or state-space JSON document.
 *
 * # Safety
 * `json` must be a valid C string and `out` a writable pointer.
 */
enum ZkmcStatus zkmc_graph_parse(const char *json, struct ZkmcGraph **out);

/**
 * # Safety
 * `graph` must come from [`zkmc_graph_parse`] and not be used afterwards. Null is ignored.
 */
void zkmc_graph_free(struct ZkmcGraph *graph);

/**
 * # Safety
 * `buffer` must be a live buffer handle.
 */
const uint8_t *zkmc_buffer_data(const struct ZkmcBuffer *buffer);

/**
 * # Safety
 * `buffer` must be a live buffer handle.
 */
size_t zkmc_buffer_len(const struct ZkmcBuffer *buffer);

/**
 * # Safety
 * `buffer` must come from this library and not be used afterwards. Null is ignored.
 */
void zkmc_buffer_free(struct ZkmcBuffer *buffer);

/**
 * Checks a certificate in plaintext. A table ranking needs `graph`; a
 * piecewise ranking is checked against the unit's own system and `graph` may be null.
 *
 * Returns `ZKMC_STATUS_OK` when valid and `ZKMC_STATUS_INVALID` otherwise.
 *
 * # Safety
 * `unit` must be live; `graph` must be live or null.
 */
enum ZkmcStatus zkmc_check(const struct ZkmcUnit *unit,
                           const struct ZkmcGraph *graph,
                           uint64_t bound);

/**
 * Generates KZG parameters sized for a table certificate over `space`.
 *
 * # Safety
 * `unit` and `space` must be live; `out` must be writable.
 */
enum ZkmcStatus zkmc_explicit_setup(const struct ZkmcUnit *unit,
                                    const struct ZkmcGraph *space,
                                    struct ZkmcBuffer **out);

/**
 * Proves that `graph` satisfies the table certificate in `unit`.
 *
 * # Safety
 * Handles must be live, `params` must point to `params_len` bytes and `out` must be writable.
 */
enum ZkmcStatus zkmc_explicit_prove(const struct ZkmcUnit *unit,
                                    const struct ZkmcGraph *graph,
                                    const uint8_t *params,
                                    size_t params_len,
                                    struct ZkmcBuffer **out);

/**
 * Verifies an explicit bundle against the public certificate and state space.
 *
 * # Safety
 * Handles must be live and the byte pointers must cover their lengths.
 */
enum ZkmcStatus zkmc_explicit_verify(const struct ZkmcUnit *unit,
                                     const struct ZkmcGraph *space,
                                     const uint8_t *params,
                                     size_t params_len,
                                     const uint8_t *bundle,
                                     size_t bundle_len);

/**
 * Generates Pedersen parameters sized for a piecewise certificate and its system.
 *
 * # Safety
 * `unit` must be live and `out` writable.
 */
enum ZkmcStatus zkmc_symbolic_setup(const struct ZkmcUnit *unit,
                                    uint64_t bound,
                                    struct ZkmcBuffer **out);

/**
 * Proves every obligation of the unit's piecewise certificate over its system.
 *
 * # Safety
 * `unit` must be live, `params` must cover `params_len` bytes and `out` must be writable.
 */
enum ZkmcStatus zkmc_symbolic_prove(const struct ZkmcUnit *unit,
                                    uint64_t bound,
                                    const uint8_t *params,
                                    size_t params_len,
                                    size_t batch,
                                    struct ZkmcBuffer **out);

/**
 * Verifies a symbolic bundle from the public certificate alone; the unit's system, if any, is ignored.
 *
 * # Safety
 * `unit` must be live and the byte pointers must cover their lengths.
 */
enum ZkmcStatus zkmc_symbolic_verify(const struct ZkmcUnit *unit,
                                     uint64_t bound,
                                     const uint8_t *params,
                                     size_t params_len,
                                     const uint8_t *bundle,
                                     size_t bundle_len,
                                     size_t batch);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZKMC_H */
