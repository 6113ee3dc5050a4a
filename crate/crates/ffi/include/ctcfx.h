#ifndef CTCFX_H
#define CTCFX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CtcStatus {
  CTC_STATUS_OK = 0,
  CTC_STATUS_NULL_POINTER = 1,
  CTC_STATUS_INVALID_ARGUMENT = 2,
  CTC_STATUS_INVALID_UTF8 = 3,
  CTC_STATUS_DICTIONARY = 4,
  CTC_STATUS_DECODE = 5,
  CTC_STATUS_BEAM_COLLAPSE = 6,
  CTC_STATUS_BUFFER_TOO_SMALL = 7,
  CTC_STATUS_CONFIG = 8,
  CTC_STATUS_PANIC = 9,
} CtcStatus;

// Streaming fixed-point decoder.
typedef struct CtcDecoder CtcDecoder;

// Compiled dictionary.
typedef struct CtcDict CtcDict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *ctc_last_error(void);

// Compiles `count` NUL-terminated words. `alphabet` lists every label in
// order, separator `_` last; NULL selects `a`-`z`, apostrophe, `_`.
//
// # Safety
// `words` must point to `count` valid C strings and `out` must be writable.
enum CtcStatus ctc_dict_compile(const char *const *words,
                                size_t count,
                                const char *alphabet,
                                struct CtcDict **out);

// Loads a serialized dictionary.
//
// # Safety
// `data` must point to `len` readable bytes and `out` must be writable.
enum CtcStatus ctc_dict_load(const uint8_t *data, size_t len, struct CtcDict **out);

// Serializes `dict` into `buf`. `*len` receives the blob size; when `cap`
// is too small nothing is written and `BufferTooSmall` is returned.
//
// # Safety
// `dict` must be a live handle; `buf` must hold `cap` bytes; `len` must be
// writable.
enum CtcStatus ctc_dict_save(const struct CtcDict *dict, uint8_t *buf, size_t cap, size_t *len);

// Node count, or 0 for a NULL handle.
//
// # Safety
// `dict` must be NULL or a live handle.
size_t ctc_dict_node_count(const struct CtcDict *dict);

// Number of labels `K`, or 0 for a NULL handle.
//
// # Safety
// `dict` must be NULL or a live handle.
size_t ctc_dict_k(const struct CtcDict *dict);

// Follows the labels `prefix[0..len]` (each in `1..=K`) from the root.
// `*found` is 0 when the prefix leaves the dictionary. Otherwise
// `allowed[k - 1]` is 1 when label `k` may follow, and `next[k - 1]` is the
// resulting pointer; both arrays must hold `K` entries.
//
// # Safety
// `dict` must be a live handle; the arrays must be valid for the sizes
// above.
enum CtcStatus ctc_dict_probe(const struct CtcDict *dict,
                              const uint16_t *prefix,
                              size_t len,
                              uint8_t *found,
                              uint8_t *allowed,
                              uint32_t *next);

// # Safety
// `dict` must be NULL or a handle not yet freed.
void ctc_dict_free(struct CtcDict *dict);

// Decoder for frames of `k` labels plus blank with beam width `w`,
// `q = 30` and the default softmax constants. With a non-NULL `dict` the
// dictionary constrains every hypothesis; the handle keeps its own copy.
//
// # Safety
// `dict` must be NULL or a live handle; `out` must be writable.
enum CtcStatus ctc_decoder_new(size_t k,
                               size_t w,
                               bool adjust,
                               const struct CtcDict *dict,
                               struct CtcDecoder **out);

// Like [`ctc_decoder_new`] with settings read from a TOML document, using
// the same keys as the command-line configuration file.
//
// # Safety
// `toml` must be a valid C string; see [`ctc_decoder_new`].
enum CtcStatus ctc_decoder_new_with_config(size_t k,
                                           const char *toml,
                                           const struct CtcDict *dict,
                                           struct CtcDecoder **out);

// Feeds one frame of raw network outputs: `K + 1` signed bytes with two
// fractional bits, blank last. The approximate softmax runs first.
//
// # Safety
// `dec` must be a live handle; `logits` must hold `len` bytes.
enum CtcStatus ctc_decoder_push_logits(struct CtcDecoder *dec, const int8_t *logits, size_t len);

// Feeds one frame of probabilities, `K + 1` values, blank last.
//
// # Safety
// `dec` must be a live handle; `probs` must hold `len` values.
enum CtcStatus ctc_decoder_push_probs(struct CtcDecoder *dec, const double *probs, size_t len);

// Copies the current best sentence (labels `1..=K`) into `labels`.
// `*len` receives its length; `BufferTooSmall` when `cap` is short.
// `score` may be NULL; it receives the stored, scaled probability.
//
// # Safety
// `dec` must be a live handle; `labels` must hold `cap` entries; `len`
// must be writable.
enum CtcStatus ctc_decoder_best(const struct CtcDecoder *dec,
                                uint16_t *labels,
                                size_t cap,
                                size_t *len,
                                double *score);

// Frames consumed so far, or 0 for a NULL handle.
//
// # Safety
// `dec` must be NULL or a live handle.
size_t ctc_decoder_frames(const struct CtcDecoder *dec);

// # Safety
// `dec` must be NULL or a handle not yet freed.
void ctc_decoder_free(struct CtcDecoder *dec);

// Approximate softmax of one frame with the default constants and
// `q = 30`. `out` receives `len` probabilities.
//
// # Safety
// `logits` must hold `len` bytes and `out` `len` doubles.
enum CtcStatus ctc_softmax_approx(const int8_t *logits, size_t len, double *out);

// Storage ratio of the textbook beam over the bounded one; NaN for
// `k < 2` or `w == 0`.
double ctc_compression_ratio(uint64_t k,
                             uint64_t w,
                             uint64_t t,
                             uint64_t prob_bits,
                             uint64_t sl_bits);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CTCFX_H */
