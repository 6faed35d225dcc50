#ifndef MULTIORDER_H
#define MULTIORDER_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum MoStatus {
  MO_STATUS_OK = 0,
  MO_STATUS_USAGE = 1,
  MO_STATUS_HORIZON = 2,
  MO_STATUS_PARSE = 3,
  MO_STATUS_PRECONDITION = 4,
  MO_STATUS_CONTRADICTION = 5,
  MO_STATUS_NULL_POINTER = 6,
  MO_STATUS_PANIC = 7,
} MoStatus;

typedef enum MoGroup {
  MO_GROUP_Z = 0,
  MO_GROUP_Z2 = 1,
  MO_GROUP_Z3 = 2,
  MO_GROUP_H3 = 3,
} MoGroup;

/**
 * Opaque order handle.
 */
typedef struct MoOrder MoOrder;

/**
 * A group element; coordinates past the group's rank are ignored on input
 * and zero on output.
 */
typedef struct MoElement {
  enum MoGroup group;
  int64_t coords[3];
} MoElement;

/**
 * Message of the last failed call on this thread (empty after a success).
 * Valid until the next call into the library on this thread.
 */
const char *mo_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mo_string_free(char *s);

/**
 * The standard order on ℤ.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MoStatus mo_order_standard(struct MoOrder **out);

/**
 * Sample an order. `family` is `dirac-standard-Z`, `pair-swap-Z` or `hierarchical`.
 *
 * # Safety
 * `family` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum MoStatus mo_order_sample(enum MoGroup group,
                              const char *family,
                              uint64_t sampler_seed,
                              uint64_t seed,
                              struct MoOrder **out);

/**
 * Parse an order window file (`k<TAB>element` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum MoStatus mo_order_parse_window(enum MoGroup group, const char *text, struct MoOrder **out);

/**
 * # Safety
 * `order` must come from this library and not have been freed.
 */
void mo_order_free(struct MoOrder *order);

/**
 * # Safety
 * `order` must be a live handle; `out` must be valid for writes.
 */
enum MoStatus mo_order_group(const struct MoOrder *order, enum MoGroup *out);

/**
 * `k^≺`.
 *
 * # Safety
 * `order` must be a live handle; `out` must be valid for writes.
 */
enum MoStatus mo_order_element_at(const struct MoOrder *order, int64_t k, struct MoElement *out);

/**
 * The index `k` with `k^≺ = g`.
 *
 * # Safety
 * `order` must be a live handle; `g` must be readable; `out` must be valid for writes.
 */
enum MoStatus mo_order_index_of(const struct MoOrder *order,
                                const struct MoElement *g,
                                int64_t *out);

/**
 * `g(≺)` as a new handle.
 *
 * # Safety
 * `order` must be a live handle; `g` must be readable; `out` must be valid for writes.
 */
enum MoStatus mo_order_act(const struct MoOrder *order,
                           const struct MoElement *g,
                           struct MoOrder **out);

/**
 * The window `[lo, hi]` in order-file format; free with [`mo_string_free`].
 *
 * # Safety
 * `order` must be a live handle; `out` must be valid for writes.
 */
enum MoStatus mo_order_window_text(const struct MoOrder *order, int64_t lo, int64_t hi, char **out);

/**
 * Truncated order distance at depth `depth` as an exact `"p/q"` string
 * (error bound `2^-depth`); free with [`mo_string_free`].
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be valid for writes.
 */
enum MoStatus mo_order_metric(const struct MoOrder *a,
                              const struct MoOrder *b,
                              uint32_t depth,
                              char **out);

/**
 * The reindexing identities at `(order, g, i)`.
 *
 * # Safety
 * `order` must be a live handle; `g` must be readable; `out` must be valid for writes.
 */
enum MoStatus mo_reindex_check(const struct MoOrder *order,
                               const struct MoElement *g,
                               int64_t i,
                               bool *out);

/**
 * Parse `"3"`, `"1,-2"` or `"1,0,2"` as an element of `group`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum MoStatus mo_element_parse(enum MoGroup group, const char *text, struct MoElement *out);

/**
 * Write `a·b` to `out`.
 *
 * # Safety
 * `a`, `b` must be readable; `out` must be valid for writes.
 */
enum MoStatus mo_element_mul(const struct MoElement *a,
                             const struct MoElement *b,
                             struct MoElement *out);

#endif  /* MULTIORDER_H */
