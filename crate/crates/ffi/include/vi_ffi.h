#ifndef VI_FFI_H
#define VI_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define VI_CONVENTION_PAPER 0

#define VI_CONVENTION_DUAL 1

typedef enum ViStatus {
  VI_STATUS_OK = 0,
  VI_STATUS_NULL_POINTER = 1,
  VI_STATUS_INVALID_ARGUMENT = 2,
  VI_STATUS_INADMISSIBLE = 3,
  VI_STATUS_INTERNAL = 4,
  VI_STATUS_PANIC = 5,
} ViStatus;

/**
 * Opaque query handle.
 */
typedef struct ViQuery ViQuery;

/**
 * Opaque result handle.
 */
typedef struct ViResult ViResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a query with an empty monomial. Returns null for an unknown
 * convention code.
 */
struct ViQuery *vi_query_new(uint32_t n,
                             uint32_t k,
                             uint32_t g,
                             int64_t e_prime,
                             int64_t d,
                             uint32_t convention_code);

/**
 * Appends one exponent `a` to the monomial.
 *
 * # Safety
 * `query` must be null or a live handle from [`vi_query_new`].
 */
enum ViStatus vi_query_push_exponent(struct ViQuery *query, uint32_t a);

/**
 * # Safety
 * `query` must be null or a handle from [`vi_query_new`] not yet freed.
 */
void vi_query_free(struct ViQuery *query);

/**
 * Evaluates the invariant (degree-reducing first when `d != 0`).
 * `workers == 0` picks the worker count automatically.
 *
 * # Safety
 * `query` must be a live query handle and `out` a writable pointer.
 */
enum ViStatus vi_invariant(const struct ViQuery *query, size_t workers, struct ViResult **out);

/**
 * Number of maximal rank-k subbundles.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum ViStatus vi_count_maximal(uint32_t n,
                               int64_t d,
                               uint32_t k,
                               uint32_t g,
                               uint32_t convention_code,
                               size_t workers,
                               struct ViResult **out);

/**
 * Compares the root-of-unity sum with the quantum cohomology oracle.
 *
 * # Safety
 * `query` must be a live query handle and `agrees` a writable pointer.
 */
enum ViStatus vi_oracle_compare(const struct ViQuery *query, bool *agrees);

/**
 * Exact value as a decimal string such as `"6"` or `"-7/3"`. Free with
 * [`vi_string_free`].
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
char *vi_result_value(const struct ViResult *result);

/**
 * # Safety
 * `result` must be null or a live result handle.
 */
bool vi_result_is_integral(const struct ViResult *result);

/**
 * Number of subsets summed.
 *
 * # Safety
 * `result` must be null or a live result handle.
 */
uint64_t vi_result_terms(const struct ViResult *result);

/**
 * # Safety
 * `result` must be null or a result handle not yet freed.
 */
void vi_result_free(struct ViResult *result);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void vi_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *vi_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VI_FFI_H */
