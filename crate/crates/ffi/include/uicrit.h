#ifndef UICRIT_H
#define UICRIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum UicStatus {
  UIC_STATUS_OK = 0,
  UIC_STATUS_NULL_POINTER = 1,
  UIC_STATUS_INVALID_UTF8 = 2,
  UIC_STATUS_IO = 3,
  UIC_STATUS_MODEL = 4,
  UIC_STATUS_EXPR = 5,
  UIC_STATUS_EVAL = 6,
  UIC_STATUS_SEARCH_CAP = 7,
  UIC_STATUS_INVALID_ARGUMENT = 8,
  UIC_STATUS_BUFFER_TOO_SMALL = 9,
  UIC_STATUS_PANIC = 10,
} UicStatus;

/**
 * A loaded, validated model.
 */
typedef struct UicModel UicModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *uic_version(void);

/**
 * Copies the calling thread's last error message into `buf`, truncated
 * and NUL-terminated. Returns the full message length in bytes, without
 * the terminator; 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or valid for `capacity` bytes.
 */
size_t uic_last_error_message(char *buf, size_t capacity);

/**
 * Loads and validates a model file; `*out` receives the handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UicStatus uic_model_load(const char *path, struct UicModel **out);

/**
 * Builds the one-family model around a built-in plugin.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UicStatus uic_model_plugin(const char *name, uint64_t n_max, struct UicModel **out);

/**
 * Releases a model handle. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void uic_model_free(struct UicModel *model);

/**
 * Profile of `criterion` (`ui`, `wui`, `wsui`, `uni`, `wuni`, `wsuni`,
 * `sui`) at `n_levels` levels. `values` receives the reported values;
 * `lo` and `hi`, when not null, the certificate interval. A null `family`
 * selects the first family by name; zero horizons select the defaults.
 *
 * # Safety
 * Strings must be NUL-terminated; `levels` and each non-null output must
 * be valid for `n_levels` elements.
 */
enum UicStatus uic_profile(const struct UicModel *model,
                           const char *family,
                           const char *criterion,
                           const double *levels,
                           size_t n_levels,
                           uint64_t atom_horizon,
                           uint64_t series_horizon,
                           double *values,
                           double *lo,
                           double *hi);

/**
 * Searches the `k` thresholds of φ for a family. `*written` receives `k`
 * on success; `UIC_STATUS_BUFFER_TOO_SMALL` is returned, with `*written`
 * set to `k`, when `capacity < k`.
 *
 * # Safety
 * `thresholds` must be valid for `capacity` elements and `written` a
 * valid pointer.
 */
enum UicStatus uic_phi_find(const struct UicModel *model,
                            const char *family,
                            uint32_t k,
                            uint64_t search_cap,
                            uint64_t *thresholds,
                            size_t capacity,
                            size_t *written);

/**
 * `φ(t)` for the given strictly increasing positive thresholds.
 *
 * # Safety
 * `thresholds` must be valid for `len` elements and `out` a valid pointer.
 */
enum UicStatus uic_phi_eval(const uint64_t *thresholds, size_t len, double t, double *out);

/**
 * Parses and evaluates a formula at index `n`.
 *
 * # Safety
 * `text` must be NUL-terminated and `out` a valid pointer.
 */
enum UicStatus uic_expr_eval(const char *text, uint64_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UICRIT_H */
