#ifndef NILPOTWIST_H
#define NILPOTWIST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum NwStatus {
  NW_STATUS_OK = 0,
  NW_STATUS_NULL_POINTER = 1,
  NW_STATUS_INVALID_ARGUMENT = 2,
  NW_STATUS_INVALID_PRESENTATION = 3,
  NW_STATUS_INCONSISTENT = 4,
  NW_STATUS_NOT_CLASS2 = 5,
  NW_STATUS_NOT_NILPOTENT = 6,
  NW_STATUS_EVEN_ORDER = 7,
  NW_STATUS_BUDGET_EXCEEDED = 8,
  NW_STATUS_INTERNAL = 9,
} NwStatus;

/*
 Opaque group handle.
 */
typedef struct NwGroup NwGroup;

/*
 Opaque handle for the string of groups built from an input group.
 */
typedef struct NwString NwString;

/*
 Builds a group from a catalog spec such as `burnside:A:p=3`,
 `heisenberg:p=3:k=2`, `abelian:3^3x3` or `product(a,b)`.

 # Safety
 `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NwStatus nw_group_from_spec(const char *spec, struct NwGroup **out);

/*
 Builds a group from a JSON polycyclic presentation.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NwStatus nw_group_from_json(const char *json, struct NwGroup **out);

/*
 Releases a group handle. Null is ignored.

 # Safety
 `g` must come from this library and not be used afterwards.
 */
void nw_group_free(struct NwGroup *g);

/*
 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_order(const struct NwGroup *g, uint64_t *out);

/*
 Writes a newly allocated copy of the group's label.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_label(const struct NwGroup *g, char **out);

/*
 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_is_class2(const struct NwGroup *g, bool *out);

/*
 Multiplies elements given by their indices in `0..order`.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_multiply_index(const struct NwGroup *g,
                                      uint64_t a,
                                      uint64_t b,
                                      uint64_t *out);

/*
 Twists the group by `x∘y = [x,y]^n xy`. The result is a new handle.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_twist(const struct NwGroup *g, int64_t n, struct NwGroup **out);

/*
 Applies the twist by `n` to the group `i` times.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_iterate_twist(const struct NwGroup *g,
                                     int64_t n,
                                     uint32_t i,
                                     struct NwGroup **out);

/*
 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_center_order(const struct NwGroup *g, uint64_t *out);

/*
 Writes the group's isomorphism invariants as a JSON object.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_group_fingerprint_json(const struct NwGroup *g, char **out);

/*
 Decides whether two groups are isomorphic. A `budget` of 0 uses the
 default search budget.

 # Safety
 `g` and `h` must be live handles and `out` a valid pointer.
 */
enum NwStatus nw_is_isomorphic(const struct NwGroup *g,
                               const struct NwGroup *h,
                               uint64_t budget,
                               bool *out);

/*
 Builds the string of groups starting at `g`. The input must have odd
 order and class at most 2.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_string_of(const struct NwGroup *g, struct NwString **out);

/*
 # Safety
 `s` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_string_len(const struct NwString *s, size_t *out);

/*
 Writes a new handle for term `index` of the string.

 # Safety
 `s` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_string_term(const struct NwString *s, size_t index, struct NwGroup **out);

/*
 Writes a JSON report of the string: per-term invariants and whether the
 terms are pairwise non-isomorphic.

 # Safety
 `s` must be a live handle and `out` a valid pointer.
 */
enum NwStatus nw_string_report_json(const struct NwString *s, char **out);

/*
 Releases a string handle. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void nw_string_free(struct NwString *s);

/*
 Message for the last failed call on this thread, or null after a
 successful call. Valid until the next call into the library.
 */
const char *nw_last_error_message(void);

/*
 Releases a string returned through a `char **` out pointer. Null is
 ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void nw_free_cstring(char *s);

#endif  /* NILPOTWIST_H */
