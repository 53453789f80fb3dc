#ifndef TDPARETO_H
#define TDPARETO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes. Zero is success.
typedef enum TdpStatus {
  TDP_STATUS_OK = 0,
  TDP_STATUS_NULL_POINTER = 1,
  TDP_STATUS_INVALID_UTF8 = 2,
  TDP_STATUS_PARSE = 3,
  TDP_STATUS_INVALID_INPUT = 4,
  TDP_STATUS_OUT_OF_RANGE = 5,
  TDP_STATUS_BUFFER_TOO_SMALL = 6,
  TDP_STATUS_NO_SOLUTION = 7,
  TDP_STATUS_INTERNAL = 8,
  TDP_STATUS_PANIC = 9,
} TdpStatus;

// Pareto front with optional element sets per entry.
typedef struct TdpFront TdpFront;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *tdp_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *tdp_last_error_message(void);

// Parse front text (one entry per line, `#` comments allowed) and reduce it
// to its nondominated entries. Payloads are the input line order.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum TdpStatus tdp_front_parse(const char *text, struct TdpFront **out);

// Solve an instance held in memory.
//
// `problem` is one of `stcut`, `mst`, `tsp`, `aggregation`. `input` is a
// `p mo` graph, or instance JSON for aggregation. `td` may be NULL, in which
// case a min-degree decomposition is built. `threads` of 0 uses all cores.
// Element sets of every entry are reconstructed.
//
// # Safety
// String arguments must be NUL-terminated or NULL where allowed; `out` must
// be writable.
enum TdpStatus tdp_solve(const char *problem,
                         const char *input,
                         const char *td,
                         bool heuristic,
                         uint32_t threads,
                         struct TdpFront **out);

// Release a front. NULL is ignored.
//
// # Safety
// `front` must come from this library and not be used afterwards.
void tdp_front_free(struct TdpFront *front);

// Number of entries, or 0 for NULL.
//
// # Safety
// `front` must be NULL or a live handle.
size_t tdp_front_len(const struct TdpFront *front);

// Objective count, or 0 for NULL.
//
// # Safety
// `front` must be NULL or a live handle.
size_t tdp_front_dim(const struct TdpFront *front);

// Copy entry `index` as fixed-point tenths into `out[0..cap]`.
//
// # Safety
// `out` must hold `cap` writable values.
enum TdpStatus tdp_front_cost_fixed(const struct TdpFront *front,
                                    size_t index,
                                    int64_t *out,
                                    size_t cap);

// Copy entry `index` as doubles into `out[0..cap]`.
//
// # Safety
// `out` must hold `cap` writable values.
enum TdpStatus tdp_front_cost(const struct TdpFront *front, size_t index, double *out, size_t cap);

// Element count of entry `index` of a solved front.
//
// # Safety
// `len` must be writable.
enum TdpStatus tdp_front_solution_len(const struct TdpFront *front, size_t index, size_t *len);

// Copy the element ids of entry `index` into `out[0..cap]`: vertex ids for
// s-t cut, triangle vertex ids for aggregation, input edge positions for
// spanning trees and tours.
//
// # Safety
// `out` must hold `cap` writable values.
enum TdpStatus tdp_front_solution(const struct TdpFront *front,
                                  size_t index,
                                  uint64_t *out,
                                  size_t cap);

// Front in text form; release with `tdp_string_free`.
//
// # Safety
// `front` must be a live handle; `out` must be writable.
enum TdpStatus tdp_front_to_text(const struct TdpFront *front, char **out);

// Release a string from `tdp_front_to_text`. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void tdp_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TDPARETO_H */
