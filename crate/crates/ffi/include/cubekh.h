#ifndef CUBEKH_H
#define CUBEKH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CubekhStatus {
  CUBEKH_STATUS_OK = 0,
  CUBEKH_STATUS_NULL_POINTER = 1,
  CUBEKH_STATUS_INVALID_UTF8 = 2,
  CUBEKH_STATUS_VALIDATION = 3,
  CUBEKH_STATUS_BUDGET_EXCEEDED = 4,
  CUBEKH_STATUS_INTERNAL = 5,
  CUBEKH_STATUS_PANIC = 6,
} CubekhStatus;

/**
 * Opaque link diagram.
 */
typedef struct CubekhDiagram CubekhDiagram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Owned by the library.
 */
const char *cubekh_last_error(void);

/**
 * Parses `{"pd": [[...]], "free_loops": n, "orientation": [...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CubekhStatus cubekh_diagram_from_json(const char *json, struct CubekhDiagram **out);

/**
 * Releases a diagram. NULL is ignored.
 *
 * # Safety
 * `d` must come from [`cubekh_diagram_from_json`] and not be used afterwards.
 */
void cubekh_diagram_free(struct CubekhDiagram *d);

/**
 * Number of crossings.
 *
 * # Safety
 * `d` and `out` must be valid pointers.
 */
enum CubekhStatus cubekh_diagram_crossings(const struct CubekhDiagram *d, uint64_t *out);

/**
 * Total rank of reduced Khovanov homology over F2. `max_crossings` 0 uses the default cap.
 *
 * # Safety
 * `d` and `out` must be valid pointers.
 */
enum CubekhStatus cubekh_khr_total(const struct CubekhDiagram *d,
                                   size_t max_crossings,
                                   uint64_t *out);

/**
 * Total rank of Khovanov homology over F2. `max_crossings` 0 uses the default cap.
 *
 * # Safety
 * `d` and `out` must be valid pointers.
 */
enum CubekhStatus cubekh_kh_total(const struct CubekhDiagram *d,
                                  size_t max_crossings,
                                  uint64_t *out);

/**
 * Link determinant, cross-checked between the Goeritz matrix and the state sum.
 *
 * # Safety
 * `d` and `out` must be valid pointers.
 */
enum CubekhStatus cubekh_det(const struct CubekhDiagram *d, uint64_t *out);

/**
 * Runs a JSON job as the command-line tool would. `*out` receives the result
 * document, or the `{"error": ...}` document when the status is not OK.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CubekhStatus cubekh_run_job_json(const char *json, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cubekh_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBEKH_H */
