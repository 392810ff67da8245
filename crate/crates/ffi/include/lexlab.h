#ifndef LEXLAB_H
#define LEXLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LexlabClass {
  LEXLAB_CLASS_UNKNOWN = 0,
  LEXLAB_CLASS_FUNCTIONAL = 1,
  LEXLAB_CLASS_CONTENT = 2,
} LexlabClass;

typedef enum LexlabStatus {
  LEXLAB_STATUS_OK = 0,
  LEXLAB_STATUS_NULL_POINTER = 1,
  LEXLAB_STATUS_INVALID_UTF8 = 2,
  LEXLAB_STATUS_PARSE_ERROR = 3,
  LEXLAB_STATUS_UNIFY_FAILURE = 4,
  LEXLAB_STATUS_INVALID_ARGUMENT = 5,
  LEXLAB_STATUS_CONFIG_ERROR = 6,
  LEXLAB_STATUS_PIPELINE_ERROR = 7,
  LEXLAB_STATUS_PANIC = 8,
} LexlabStatus;

/**
 * A daughter lexicon with its label mint.
 */
typedef struct LexlabDaughter LexlabDaughter;

/**
 * A parsed feature structure.
 */
typedef struct LexlabFeatureStructure LexlabFeatureStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next lexlab call on the same thread.
 */
const char *lexlab_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void lexlab_string_free(char *s);

/**
 * Parses bracket notation, e.g. `[CAT:det, NUMBER:?N]`.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum LexlabStatus lexlab_fs_parse(const char *src, struct LexlabFeatureStructure **out);

/**
 * # Safety
 * `fs` must come from this library and not have been freed already.
 */
void lexlab_fs_free(struct LexlabFeatureStructure *fs);

/**
 * Renders a structure in bracket notation.
 *
 * # Safety
 * `fs` must be a live handle; `out` must be writable.
 */
enum LexlabStatus lexlab_fs_to_string(const struct LexlabFeatureStructure *fs, char **out);

/**
 * Unifies two structures. On conflict returns `UNIFY_FAILURE`; the error
 * message names the failing path.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum LexlabStatus lexlab_fs_unify(const struct LexlabFeatureStructure *a,
                                  const struct LexlabFeatureStructure *b,
                                  struct LexlabFeatureStructure **out);

/**
 * # Safety
 * `general` and `specific` must be live handles; `out` must be writable.
 */
enum LexlabStatus lexlab_fs_subsumes(const struct LexlabFeatureStructure *general,
                                     const struct LexlabFeatureStructure *specific,
                                     bool *out);

/**
 * Classifies a word with frequency `f` out of `total` tokens against a
 * threshold of `threshold_num / threshold_den` per mil.
 *
 * # Safety
 * `out` must be writable.
 */
enum LexlabStatus lexlab_threshold_classify(uint64_t f,
                                            uint64_t total,
                                            uint64_t threshold_num,
                                            uint64_t threshold_den,
                                            enum LexlabClass *out);

/**
 * Two-sided Fisher exact test on `[[a, b], [c, d]]`. A zero row or column
 * gives p = 1.
 *
 * # Safety
 * `out_p` must be writable.
 */
enum LexlabStatus lexlab_fisher_exact(uint64_t a,
                                      uint64_t b,
                                      uint64_t c,
                                      uint64_t d,
                                      double *out_p);

/**
 * A new, empty daughter lexicon.
 */
struct LexlabDaughter *lexlab_daughter_new(uint64_t session_id);

/**
 * # Safety
 * `d` must come from [`lexlab_daughter_new`] and not have been freed already.
 */
void lexlab_daughter_free(struct LexlabDaughter *d);

/**
 * Ingests one utterance of `n` tokens.
 *
 * # Safety
 * `d` must be a live handle; `tokens` must point to `n` NUL-terminated strings.
 */
enum LexlabStatus lexlab_daughter_ingest(struct LexlabDaughter *d,
                                         const char *const *tokens,
                                         size_t n);

/**
 * Attempts function/content acquisition. `out_fired` reports whether it
 * fired on this call.
 *
 * # Safety
 * `d` must be a live handle; `out_fired` must be writable.
 */
enum LexlabStatus lexlab_daughter_acquire(struct LexlabDaughter *d,
                                          uint64_t min_exemplars,
                                          uint64_t threshold_num,
                                          uint64_t threshold_den,
                                          bool *out_fired);

/**
 * # Safety
 * `d` must be a live handle; `phonform` a NUL-terminated string; `out` writable.
 */
enum LexlabStatus lexlab_daughter_classify(const struct LexlabDaughter *d,
                                           const char *phonform,
                                           enum LexlabClass *out);

/**
 * The lexicon as JSON lines.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum LexlabStatus lexlab_daughter_dump(const struct LexlabDaughter *d, char **out);

/**
 * Runs an experiment from config text (`key = value` lines) and returns
 * its log as JSON. Relative paths are taken relative to the working
 * directory.
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out_json` must be writable.
 */
enum LexlabStatus lexlab_run_experiment(const char *config, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEXLAB_H */
