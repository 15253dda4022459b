#ifndef MTRNN_FFI_H
#define MTRNN_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MtrnnStatus {
  MTRNN_STATUS_OK = 0,
  MTRNN_STATUS_NULL_POINTER = 1,
  MTRNN_STATUS_INVALID_ARGUMENT = 2,
  MTRNN_STATUS_IO = 3,
  MTRNN_STATUS_CHECKPOINT = 4,
  MTRNN_STATUS_CONFIG = 5,
  MTRNN_STATUS_DATA = 6,
  /**
   * The output buffer is too small; the needed size was reported.
   */
  MTRNN_STATUS_BUFFER_TOO_SMALL = 7,
  MTRNN_STATUS_PANIC = 8,
} MtrnnStatus;

/**
 * A trained model with the encoding it was trained with.
 */
typedef struct MtrnnModel MtrnnModel;

/**
 * Sizes a caller needs to prepare inputs for a model.
 */
typedef struct MtrnnDims {
  size_t proprio_channels;
  size_t vision_channels;
  size_t auditory_csc;
  size_t somatosensory_csc;
  size_t visual_csc;
  size_t training_scenes;
} MtrnnDims;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mtrnn_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mtrnn_version(void);

/**
 * Loads a checkpoint written by `mtrnn train`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MtrnnStatus mtrnn_model_load(const char *path, struct MtrnnModel **out);

/**
 * Releases a model. NULL is ignored.
 *
 * # Safety
 * `model` must come from [`mtrnn_model_load`] and not be used afterwards.
 */
void mtrnn_model_free(struct MtrnnModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum MtrnnStatus mtrnn_model_dims(const struct MtrnnModel *model, struct MtrnnDims *out);

/**
 * Perceives a proprioceptive and a visual sequence and writes the produced
 * sentence into `text` (NUL-terminated). `needed` receives the buffer size
 * required including the NUL; with a short buffer nothing is written and
 * `MTRNN_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * The sequences must hold `steps x channels` doubles (see
 * [`mtrnn_model_dims`]); `text` must hold `capacity` bytes; `needed` must be
 * valid.
 */
enum MtrnnStatus mtrnn_model_describe(const struct MtrnnModel *model,
                                      const double *proprio,
                                      size_t proprio_steps,
                                      const double *vision,
                                      size_t vision_steps,
                                      char *text,
                                      size_t capacity,
                                      size_t *needed);

/**
 * Edit distance between two whitespace-separated token strings
 * (insertion and deletion cost 1, substitution 2).
 *
 * # Safety
 * Both strings must be NUL-terminated; `out` must be valid.
 */
enum MtrnnStatus mtrnn_edit_distance(const char *produced, const char *target, size_t *out);

/**
 * Relative pattern distance of `count` patterns of `dim` values. A set with
 * a zero pair distance gives 0.
 *
 * # Safety
 * `patterns` must hold `count * dim` doubles; `out` must be valid.
 */
enum MtrnnStatus mtrnn_d_rel(const double *patterns, size_t count, size_t dim, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MTRNN_FFI_H */
