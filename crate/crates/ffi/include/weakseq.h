#ifndef WEAKSEQ_H
#define WEAKSEQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Classification of an ordering by its partial sums.
typedef enum WsOrderingClass {
  // All partial sums distinct.
  WS_ORDERING_CLASS_SEQUENCING = 0,
  // `s_1..s_{k-1}` distinct and nonzero, `s_k = 0`.
  WS_ORDERING_CLASS_R_SEQUENCING = 1,
  WS_ORDERING_CLASS_NEITHER = 2,
} WsOrderingClass;

// Outcome of [`ws_search`].
typedef enum WsSearchResult {
  WS_SEARCH_RESULT_FOUND = 0,
  WS_SEARCH_RESULT_NONE_EXISTS = 1,
  WS_SEARCH_RESULT_BUDGET_EXHAUSTED = 2,
} WsSearchResult;

// Result of every fallible call.
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  // A required pointer argument was null.
  WS_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  WS_STATUS_INVALID_UTF8 = 2,
  // Arguments out of range or inconsistent (bad modulus, duplicate
  // element, window larger than the set, unknown family, ...).
  WS_STATUS_INVALID_ARGUMENT = 3,
  // A caller-supplied buffer is too small.
  WS_STATUS_BUFFER_TOO_SMALL = 4,
  // The computation would exceed its memory cap.
  WS_STATUS_RESOURCE_LIMIT = 5,
  // A greedy prefix ran out of candidates.
  WS_STATUS_EXHAUSTED = 6,
  // A bug in the library, including caught panics.
  WS_STATUS_INTERNAL = 7,
} WsStatus;

// A sequence of distinct nonzero residues modulo n.
typedef struct WsOrdering WsOrdering;

// A set of distinct nonzero residues modulo n.
typedef struct WsSubset WsSubset;

// A product of linear factors.
typedef struct WsSystem WsSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *ws_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ws_version(void);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void ws_string_free(char *s);

// Subset of Z_n from residues in `0..n`. Elements must be distinct and
// nonzero; they are stored sorted.
//
// # Safety
// `elements` must point to `len` values; `out` must be writable.
enum WsStatus ws_subset_new(uint64_t n,
                            const uint32_t *elements,
                            size_t len,
                            struct WsSubset **out);

// Subset of Z_n from a comma separated list such as `"1,2,-3"`.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum WsStatus ws_subset_parse(uint64_t n, const char *text, struct WsSubset **out);

// Number of elements, or 0 for null.
//
// # Safety
// `set` must be null or a live subset.
size_t ws_subset_len(const struct WsSubset *set);

// Copy the sorted elements into `buf`, which must hold `ws_subset_len`
// values.
//
// # Safety
// `set` must be a live subset; `buf` must have `cap` writable slots.
enum WsStatus ws_subset_elements(const struct WsSubset *set, uint32_t *buf, size_t cap);

// # Safety
// `set` must be null or a live subset, and is invalid afterwards.
void ws_subset_free(struct WsSubset *set);

// Ordering of distinct nonzero residues in `0..n`.
//
// # Safety
// `sequence` must point to `len` values; `out` must be writable.
enum WsStatus ws_ordering_new(uint64_t n,
                              const uint32_t *sequence,
                              size_t len,
                              struct WsOrdering **out);

// Ordering from a comma separated list such as `"1,-2,5"`.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum WsStatus ws_ordering_parse(uint64_t n, const char *text, struct WsOrdering **out);

// Number of elements, or 0 for null.
//
// # Safety
// `ordering` must be null or a live ordering.
size_t ws_ordering_len(const struct WsOrdering *ordering);

// Copy the sequence into `buf`.
//
// # Safety
// `ordering` must be live; `buf` must have `cap` writable slots.
enum WsStatus ws_ordering_elements(const struct WsOrdering *ordering, uint32_t *buf, size_t cap);

// Copy the partial sums `s_0 = 0, s_1, ..., s_k` into `buf`, which must
// hold `len + 1` values.
//
// # Safety
// `ordering` must be live; `buf` must have `cap` writable slots.
enum WsStatus ws_ordering_partial_sums(const struct WsOrdering *ordering,
                                       uint32_t *buf,
                                       size_t cap);

// # Safety
// `ordering` must be live; `out` must be writable.
enum WsStatus ws_ordering_classify(const struct WsOrdering *ordering, enum WsOrderingClass *out);

// Number of pairs `i < j` with `j - i <= t` and `s_i = s_j`. Zero means the
// ordering is a t-weak sequencing.
//
// # Safety
// `ordering` must be live; `out` must be writable.
enum WsStatus ws_ordering_violation_count(const struct WsOrdering *ordering, size_t t, size_t *out);

// # Safety
// `ordering` must be null or live, and is invalid afterwards.
void ws_ordering_free(struct WsOrdering *ordering);

// Depth-first search for a t-weak sequencing visiting at most `max_nodes`
// nodes (0 for the library default). `*ordering` receives a new ordering
// when the result is `Found` and null otherwise; `nodes` may be null.
//
// # Safety
// `set` must be live; `result` and `ordering` must be writable; `nodes`
// must be null or writable.
enum WsStatus ws_search(const struct WsSubset *set,
                        size_t t,
                        uint64_t max_nodes,
                        enum WsSearchResult *result,
                        struct WsOrdering **ordering,
                        uint64_t *nodes);

// 3-weak sequencing of a set with at least four elements.
//
// # Safety
// `set` must be live; `out` must be writable.
enum WsStatus ws_construct_t3(const struct WsSubset *set, struct WsOrdering **out);

// Greedy t-weak prefix of length `h`. `cmpp` selects the variant that
// ignores the single-element window; `involution_first` starts with n/2
// when the set contains it.
//
// # Safety
// `set` must be live; `out` must be writable.
enum WsStatus ws_greedy_prefix(const struct WsSubset *set,
                               size_t t,
                               size_t h,
                               bool cmpp,
                               bool involution_first,
                               struct WsOrdering **out);

// Build a polynomial family by name (`F`, `P`, `Pbar`, `Q`, `Qbar`, `Htop`,
// `Hbartop`). Pass 0 for parameters the family does not take.
//
// # Safety
// `family` must be a NUL-terminated string; `out` must be writable.
enum WsStatus ws_system_build(const char *family,
                              size_t k,
                              size_t t,
                              size_t ell,
                              struct WsSystem **out);

// Number of linear factors, i.e. the total degree; 0 for null.
//
// # Safety
// `sys` must be null or live.
size_t ws_system_degree(const struct WsSystem *sys);

// Number of variables; 0 for null.
//
// # Safety
// `sys` must be null or live.
size_t ws_system_num_vars(const struct WsSystem *sys);

// Exact coefficient of the monomial with exponents `exponents[0..len]`, as
// a decimal string to be released with [`ws_string_free`]. `memory_cap`
// bounds the working set in bytes (0 for the library default).
//
// # Safety
// `sys` must be live; `exponents` must point to `len` values; `out` must be
// writable.
enum WsStatus ws_coefficient(const struct WsSystem *sys,
                             const uint32_t *exponents,
                             size_t len,
                             uint64_t memory_cap,
                             char **out);

// # Safety
// `sys` must be null or live, and is invalid afterwards.
void ws_system_free(struct WsSystem *sys);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEAKSEQ_H */
