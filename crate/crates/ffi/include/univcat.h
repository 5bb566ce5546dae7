#ifndef UNIVCAT_H
#define UNIVCAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UcRing {
  /**
   * Whatever the input declares.
   */
  UC_RING_DECLARED = 0,
  UC_RING_Z = 1,
  UC_RING_Q = 2,
} UcRing;

typedef enum UcStatus {
  UC_STATUS_OK = 0,
  UC_STATUS_NULL_ARGUMENT = 1,
  UC_STATUS_INVALID_UTF8 = 2,
  UC_STATUS_PARSE = 3,
  UC_STATUS_INVALID = 4,
  UC_STATUS_RING = 5,
  UC_STATUS_INTERNAL = 6,
  UC_STATUS_PANIC = 7,
} UcStatus;

typedef enum UcVerdict {
  UC_VERDICT_PASS = 0,
  UC_VERDICT_FAIL = 1,
  UC_VERDICT_INCONCLUSIVE = 2,
} UcVerdict;

/**
 * A representation together with its cache of commutants.
 */
typedef struct UcRepresentation UcRepresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the library; static, never freed.
 */
const char *uc_version(void);

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next `uc_*` call on the same thread.
 */
const char *uc_last_error_message(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library and not yet freed.
 */
void uc_string_free(char *s);

/**
 * Parses a representation document. A `Z` document may be read over `Q`.
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum UcStatus uc_representation_from_json(const char *json,
                                          enum UcRing ring,
                                          struct UcRepresentation **out);

/**
 * # Safety
 * `rep` is NULL or a handle from [`uc_representation_from_json`] not yet freed.
 */
void uc_representation_free(struct UcRepresentation *rep);

/**
 * # Safety
 * `rep` is NULL or a live handle.
 */
enum UcRing uc_representation_ring(const struct UcRepresentation *rep);

/**
 * Number of objects of the underlying diagram; 0 for NULL.
 *
 * # Safety
 * `rep` is NULL or a live handle.
 */
size_t uc_representation_object_count(const struct UcRepresentation *rep);

/**
 * Commutant at `stage` (comma-separated objects of a full subdiagram;
 * NULL or `"all"` for the whole diagram).
 *
 * # Safety
 * `rep` is a live handle, `stage` is NULL or nul-terminated, `out` is writable.
 */
enum UcStatus uc_end_json(const struct UcRepresentation *rep, const char *stage, char **out);

/**
 * Commutants along a chain of stages with their rank traces.
 *
 * # Safety
 * `rep` is a live handle, `chain_json` is nul-terminated, `out` is writable.
 */
enum UcStatus uc_tower_json(const struct UcRepresentation *rep, const char *chain_json, char **out);

/**
 * Runs the equivalence criterion. `verdict` may be NULL.
 *
 * # Safety
 * `rep` is a live handle, the JSON arguments are nul-terminated, `out` is
 * writable and `verdict` is NULL or writable.
 */
enum UcStatus uc_criterion_json(const struct UcRepresentation *rep,
                                const char *target_json,
                                const char *maps_json,
                                char **out,
                                enum UcVerdict *verdict);

/**
 * Smith normal form `U·A·V = S` of a matrix literal or bare array of rows.
 *
 * # Safety
 * `matrix_json` is nul-terminated and `out` is writable.
 */
enum UcStatus uc_snf_json(const char *matrix_json, enum UcRing ring, char **out);

/**
 * Relative homology of a graph pair document.
 *
 * # Safety
 * `graph_json` is nul-terminated and `out` is writable.
 */
enum UcStatus uc_homology_json(const char *graph_json, char **out);

/**
 * Exactness of the long exact sequence of a graph triple. `exact` receives
 * 1 when every node is exact and 0 otherwise; it may be NULL.
 *
 * # Safety
 * `graph_json` is nul-terminated, `out` is writable, `exact` is NULL or writable.
 */
enum UcStatus uc_les_check_json(const char *graph_json, char **out, int32_t *exact);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIVCAT_H */
