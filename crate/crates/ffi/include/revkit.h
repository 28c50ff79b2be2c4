#ifndef REVKIT_H
#define REVKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RevkitStatus {
  REVKIT_STATUS_OK = 0,
  REVKIT_STATUS_NULL_POINTER = 1,
  REVKIT_STATUS_INVALID_UTF8 = 2,
  REVKIT_STATUS_INVALID_INPUT = 3,
  REVKIT_STATUS_NOT_FOUND = 4,
  REVKIT_STATUS_INTERNAL = 5,
} RevkitStatus;

// Parsed corpus. Opaque to C.
typedef struct RevkitCorpus RevkitCorpus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a success.
//
// The pointer stays valid until the next revkit call on the same thread.
const char *revkit_last_error(void);

// Parses `len` bytes of corpus JSON into a new handle.
//
// # Safety
// `json` must point to `len` readable bytes and `out` must be writable.
enum RevkitStatus revkit_corpus_parse(const uint8_t *json, size_t len, struct RevkitCorpus **out);

// # Safety
// `corpus` must be NULL or a handle from [`revkit_corpus_parse`] not yet freed.
void revkit_corpus_free(struct RevkitCorpus *corpus);

// # Safety
// `corpus` must be a live handle and `out` writable.
enum RevkitStatus revkit_corpus_group_count(const struct RevkitCorpus *corpus, size_t *out);

// # Safety
// `corpus` must be a live handle and `out` writable.
enum RevkitStatus revkit_corpus_version_count(const struct RevkitCorpus *corpus,
                                              size_t group_index,
                                              size_t *out);

// Aligns two versions of one group and writes the alignment as JSON.
//
// `metric` may be NULL for jaccard; a NaN `threshold` selects the metric default.
//
// # Safety
// `corpus` must be a live handle, `metric` NULL or a C string, `out` writable.
enum RevkitStatus revkit_align_versions(const struct RevkitCorpus *corpus,
                                        size_t group_index,
                                        uint32_t src_version,
                                        uint32_t tgt_version,
                                        const char *metric,
                                        double threshold,
                                        char **out);

// Token-set Jaccard similarity of two raw sentences.
//
// # Safety
// `a` and `b` must be C strings and `out` writable.
enum RevkitStatus revkit_jaccard(const char *a, const char *b, double *out);

// Word-level diff of two raw sentences, as a JSON array of edits.
//
// # Safety
// `src` and `tgt` must be C strings and `out` writable.
enum RevkitStatus revkit_diff_edits(const char *src, const char *tgt, char **out);

// Edits from a word alignment given as Pharaoh links (`"0-0 1-2"`).
//
// A NULL `links` falls back to the links of a token diff.
//
// # Safety
// `src` and `tgt` must be C strings, `links` NULL or a C string, `out` writable.
enum RevkitStatus revkit_extract_edits(const char *src,
                                       const char *tgt,
                                       const char *links,
                                       char **out);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void revkit_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REVKIT_H */
