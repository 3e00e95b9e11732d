#ifndef CGW_H
#define CGW_H

/* Generated by cbindgen from cgw-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum CgwStatus {
  // The operation succeeded; for witness runs, the pair refutes
  // acceptability (element-conjugate, no global conjugator).
  CGW_STATUS_OK = 0,
  // The pair failed verification (an element pair is certified
  // non-conjugate, or a global conjugator exists).
  CGW_STATUS_VERIFICATION_FAILED = 1,
  // A search ran out of budget before deciding.
  CGW_STATUS_UNDECIDED = 2,
  // No construction covers the requested family and size.
  CGW_STATUS_OUT_OF_COVERAGE = 3,
  // Malformed input (bad family name, field parameters, or text format).
  CGW_STATUS_INVALID_ARGUMENT = 4,
  // Unexpected internal failure; see `cgw_last_error`.
  CGW_STATUS_INTERNAL_ERROR = 5,
} CgwStatus;

// Opaque verified-witness handle.
typedef struct CgwWitness CgwWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The last error message on this thread, or NULL. Free with
// `cgw_string_free`.
char *cgw_last_error(void);

// Release a string allocated by this library.
//
// # Safety
// `s` must be a pointer previously returned by a `cgw_*` function and not
// yet freed.
void cgw_string_free(char *s);

// Construct a witness pair and run both deciders.
//
// `family` is one of "GL", "SL", "U", "Sp", "Oodd", "Oeven"; `base_q` is
// used by the unitary family only (pass 0 for the default p^(k/2));
// `budget` of 0 selects the default of 10^7 candidates.
//
// On success writes a handle to `out` and returns the verification
// verdict: Ok (refutes), VerificationFailed, or Undecided. The handle is
// valid (and carries the full report) in all three cases.
//
// # Safety
// `family` must be a valid NUL-terminated string and `out` a valid
// pointer; the handle must be released with `cgw_witness_free`.
enum CgwStatus cgw_witness_run(const char *family,
                               uint32_t n,
                               uint64_t p,
                               uint32_t k,
                               uint64_t base_q,
                               uint64_t budget,
                               uint64_t seed,
                               bool exhaustive,
                               bool stability,
                               struct CgwWitness **out);

// The full JSON report for a witness handle. Free with `cgw_string_free`.
//
// # Safety
// `w` must be a live handle from `cgw_witness_run`.
char *cgw_witness_json(const struct CgwWitness *w);

// True when the handle certifies an element-conjugate pair with no global
// conjugator.
//
// # Safety
// `w` must be a live handle from `cgw_witness_run`.
bool cgw_witness_refutes(const struct CgwWitness *w);

// Release a witness handle.
//
// # Safety
// `w` must come from `cgw_witness_run` and not be freed twice.
void cgw_witness_free(struct CgwWitness *w);

// Similarity-invariant class data of a square invertible matrix in the
// text format (first line `rows cols <fieldspec>`, then one row per line).
// Writes a JSON string to `json_out`.
//
// # Safety
// `matrix_text` must be a valid NUL-terminated string, `json_out` a valid
// pointer; the string must be released with `cgw_string_free`.
enum CgwStatus cgw_invariant_json(const char *matrix_text, char **json_out);

// Enumerate valid class functions for a family ("GL", "U", "Sp", "O") and
// size over F_{p^k}; `base_q` as in `cgw_witness_run`. Writes a JSON
// string to `json_out`.
//
// # Safety
// `kind` must be a valid NUL-terminated string, `json_out` a valid
// pointer; the string must be released with `cgw_string_free`.
enum CgwStatus cgw_classes_json(const char *kind,
                                uint32_t n,
                                uint64_t p,
                                uint32_t k,
                                uint64_t base_q,
                                uint64_t budget,
                                char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CGW_H */
