#ifndef CRU_H
#define CRU_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CruStatus {
  CRU_STATUS_OK = 0,
  /**
   * Recognition ran but produced no call-sign.
   */
  CRU_STATUS_NO_MATCH = 1,
  CRU_STATUS_NULL_ARGUMENT = 2,
  CRU_STATUS_INVALID_UTF8 = 3,
  /**
   * Input does not follow the expected grammar.
   */
  CRU_STATUS_INVALID = 4,
  CRU_STATUS_IO = 5,
  CRU_STATUS_INTERNAL = 6,
} CruStatus;

/**
 * Opaque airline registry handle.
 */
typedef struct CruRegistry CruRegistry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next call on the same thread; do not free.
 */
const char *cru_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cru_string_free(char *s);

/**
 * The built-in airline registry.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CruStatus cru_registry_builtin(struct CruRegistry **out);

/**
 * Loads a registry TSV file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CruStatus cru_registry_load(const char *path, struct CruRegistry **out);

/**
 * Releases a registry. NULL is ignored.
 *
 * # Safety
 * `reg` must come from this library and not have been freed.
 */
void cru_registry_free(struct CruRegistry *reg);

/**
 * Validates an ICAO call-sign and writes its canonical form.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CruStatus cru_parse_icao(const char *text, char **out);

/**
 * Converts a spoken call-sign span (whitespace-separated words) to ICAO.
 * Returns `NoMatch` when the span carries no complete call-sign.
 *
 * # Safety
 * Pointers must be valid; `spoken` NUL-terminated.
 */
enum CruStatus cru_spoken_to_icao(const struct CruRegistry *reg, const char *spoken, char **out);

/**
 * Recognizes the call-sign of a transcript without surveillance data.
 *
 * # Safety
 * Pointers must be valid; `transcript` NUL-terminated.
 */
enum CruStatus cru_vanilla_recognize(const struct CruRegistry *reg,
                                     const char *transcript,
                                     char **out);

/**
 * Recognizes the call-sign of a transcript against `n` surveillance
 * call-signs with the default matcher settings. `score` (optional)
 * receives the best candidate similarity, or -1 when there was none.
 *
 * # Safety
 * Pointers must be valid; `surveillance` must hold `n` NUL-terminated
 * strings.
 */
enum CruStatus cru_recognize_with_context(const struct CruRegistry *reg,
                                          const char *transcript,
                                          const char *const *surveillance,
                                          uintptr_t n,
                                          char **out,
                                          double *score);

/**
 * Windowed similarity of a spoken call-sign variant inside a transcript.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum CruStatus cru_similarity(const char *transcript, const char *variant, double *out);

/**
 * Corpus word error rate in percent over `n` hypothesis/reference pairs.
 *
 * # Safety
 * `hypotheses` and `references` must each hold `n` NUL-terminated strings.
 */
enum CruStatus cru_wer(const char *const *hypotheses,
                       const char *const *references,
                       uintptr_t n,
                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRU_H */
