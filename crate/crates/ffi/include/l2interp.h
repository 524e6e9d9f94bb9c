#ifndef L2INTERP_H
#define L2INTERP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum L2iStatus {
  L2I_STATUS_OK = 0,
  L2I_STATUS_NULL_POINTER = 1,
  L2I_STATUS_INVALID_ARGUMENT = 2,
  L2I_STATUS_KERNEL_PARSE = 3,
  L2I_STATUS_IO = 4,
  L2I_STATUS_FORMAT = 5,
  L2I_STATUS_UNSUPPORTED_FORMAT = 6,
  L2I_STATUS_QUADRATURE = 7,
  L2I_STATUS_NON_CONFORMING = 8,
  L2I_STATUS_PANIC = 9,
} L2iStatus;

typedef enum L2iBoundary {
  L2I_BOUNDARY_CLAMP = 0,
  L2I_BOUNDARY_MIRROR = 1,
} L2iBoundary;

/**
 * Interpolation lookup table.
 */
typedef struct L2iIlut L2iIlut;

/**
 * Grayscale image with 8- or 16-bit samples.
 */
typedef struct L2iImage L2iImage;

/**
 * Parsed interpolation kernel.
 */
typedef struct L2iKernel L2iKernel;

/**
 * Rational rotation actually applied by [`l2i_rotate`].
 */
typedef struct L2iRotation {
  int64_t n;
  int64_t m;
  uint32_t q;
  /**
   * Degrees.
   */
  double angle_deviation;
  double implied_scale;
} L2iRotation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL.
 *
 * The pointer stays valid until the next failing call on this thread.
 */
const char *l2i_last_error(void);

/**
 * Parses a kernel id such as `l2opt:L=2` or `blend:w=0.5,l2opt:L=3,cubic6`.
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out_kernel` a valid pointer.
 */
enum L2iStatus l2i_kernel_parse(const char *id, struct L2iKernel **out_kernel);

/**
 * # Safety
 * `kernel` must come from [`l2i_kernel_parse`] and not be used afterwards.
 */
void l2i_kernel_free(struct L2iKernel *kernel);

/**
 * Writes the canonical id, NUL-terminated, into `buf` when it fits.
 * `*needed` receives the length including the terminator.
 *
 * # Safety
 * `buf` must hold `len` bytes (or be NULL with `len` 0).
 */
enum L2iStatus l2i_kernel_name(const struct L2iKernel *kernel,
                               char *buf,
                               size_t len,
                               size_t *needed);

/**
 * # Safety
 * Pointers must be valid.
 */
enum L2iStatus l2i_kernel_support(const struct L2iKernel *kernel, size_t *out_support);

/**
 * # Safety
 * Pointers must be valid.
 */
enum L2iStatus l2i_kernel_eval(const struct L2iKernel *kernel, double x, double *out_value);

/**
 * Frequency approximation error `E` and its parts `E1`, `E2`.
 * `out_e1` and `out_e2` may be NULL.
 *
 * # Safety
 * Non-NULL pointers must be valid.
 */
enum L2iStatus l2i_kernel_fae(const struct L2iKernel *kernel,
                              double *out_e,
                              double *out_e1,
                              double *out_e2);

/**
 * Least FAE reachable with support `L`. `L = 0` gives 1.
 *
 * # Safety
 * `out_e` must be valid.
 */
enum L2iStatus l2i_optimal_fae(size_t support, double *out_e);

/**
 * Samples `kernel` at `r/q` for `r = 0..=q·L`. With `renormalize`, each
 * phase is rescaled to sum to one (kernels that are no partition of unity
 * are rejected).
 *
 * # Safety
 * Pointers must be valid.
 */
enum L2iStatus l2i_ilut_build(const struct L2iKernel *kernel,
                              uint32_t q,
                              bool renormalize,
                              struct L2iIlut **out_ilut);

/**
 * # Safety
 * `ilut` must come from [`l2i_ilut_build`] and not be used afterwards.
 */
void l2i_ilut_free(struct L2iIlut *ilut);

/**
 * Number of stored one-sided entries, `q·L + 1`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum L2iStatus l2i_ilut_len(const struct L2iIlut *ilut, size_t *out_len);

/**
 * `h(r/q)` for any integer `r`; zero outside the support.
 *
 * # Safety
 * Pointers must be valid.
 */
enum L2iStatus l2i_ilut_lookup(const struct L2iIlut *ilut, int64_t r, double *out_value);

/**
 * Borrows the weight array. It lives as long as the table.
 *
 * # Safety
 * Pointers must be valid.
 */
enum L2iStatus l2i_ilut_weights(const struct L2iIlut *ilut,
                                const double **out_weights,
                                size_t *out_len);

/**
 * Copies `width·height` row-major samples into a new image.
 *
 * # Safety
 * `samples` must point to `width·height` values.
 */
enum L2iStatus l2i_image_new(size_t width,
                             size_t height,
                             uint32_t bit_depth,
                             const uint16_t *samples,
                             struct L2iImage **out_image);

/**
 * Reads a PGM file (P2 or P5).
 *
 * # Safety
 * `path` must be NUL-terminated and `out_image` valid.
 */
enum L2iStatus l2i_image_read(const char *path, struct L2iImage **out_image);

/**
 * Writes a binary PGM file.
 *
 * # Safety
 * `path` must be NUL-terminated and `image` valid.
 */
enum L2iStatus l2i_image_write(const struct L2iImage *image, const char *path);

/**
 * # Safety
 * `image` must come from this library and not be used afterwards.
 */
void l2i_image_free(struct L2iImage *image);

/**
 * Width, height and bit depth. Any out-pointer may be NULL.
 *
 * # Safety
 * `image` must be valid.
 */
enum L2iStatus l2i_image_info(const struct L2iImage *image,
                              size_t *out_width,
                              size_t *out_height,
                              uint32_t *out_bit_depth);

/**
 * Copies the samples into `buf`, which must hold `width·height` values.
 *
 * # Safety
 * `buf` must point to `len` writable values.
 */
enum L2iStatus l2i_image_copy_samples(const struct L2iImage *image, uint16_t *buf, size_t len);

/**
 * Zooms by `m/q`; the output has `ceil(n·m/q)` samples per axis.
 *
 * # Safety
 * Pointers must be valid.
 */
enum L2iStatus l2i_zoom(const struct L2iImage *image,
                        uint32_t m,
                        uint32_t q,
                        const struct L2iKernel *kernel,
                        enum L2iBoundary boundary,
                        bool use_ilut,
                        struct L2iImage **out_image);

/**
 * Rotates about the center by the rational approximation of `angle_deg`
 * with denominator `q`. `out_rotation` may be NULL.
 *
 * # Safety
 * Non-NULL pointers must be valid.
 */
enum L2iStatus l2i_rotate(const struct L2iImage *image,
                          double angle_deg,
                          uint32_t q,
                          const struct L2iKernel *kernel,
                          enum L2iBoundary boundary,
                          struct L2iImage **out_image,
                          struct L2iRotation *out_rotation);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* L2INTERP_H */
