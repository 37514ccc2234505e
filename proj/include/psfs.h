/* psfs - perspective shape-from-shading toolkit, C interface.
 *
 * All functions return psfs_status; PSFS_OK is 0. Objects created by the
 * library are returned through out-parameters as opaque handles and must be
 * released with the matching _destroy call. On failure the out-parameters
 * are left untouched and psfs_last_error_message() describes the problem
 * for the calling thread.
 */

#ifndef PSFS_H
#define PSFS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PSFS_API __declspec(dllexport)
#else
#define PSFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psfs_status {
  PSFS_OK = 0,
  PSFS_ERROR_INVALID_ARGUMENT = 1,
  PSFS_ERROR_IO = 2,
  PSFS_ERROR_NUMERIC = 3
} psfs_status;

PSFS_API const char* psfs_status_name(psfs_status status);
PSFS_API const char* psfs_last_error_message(void);

/* Worker threads for pixel-parallel loops; 0 selects the hardware count.
 * Results are bit-identical for every thread count. */
PSFS_API psfs_status psfs_set_threads(int threads);

/* ------------------------------------------------------------------ */
/* Fields: 2-D double grids, row-major, pixel (col, row), row 0 on top. */

typedef struct psfs_field psfs_field;

PSFS_API psfs_status psfs_field_create(int width, int height, double fill, psfs_field** out);
PSFS_API void psfs_field_destroy(psfs_field* field);
PSFS_API psfs_status psfs_field_clone(const psfs_field* field, psfs_field** out);
PSFS_API int psfs_field_width(const psfs_field* field);
PSFS_API int psfs_field_height(const psfs_field* field);
PSFS_API psfs_status psfs_field_get(const psfs_field* field, int col, int row, double* out);
PSFS_API psfs_status psfs_field_set(psfs_field* field, int col, int row, double value);
PSFS_API const double* psfs_field_data(const psfs_field* field);
PSFS_API psfs_status psfs_field_min_max(const psfs_field* field, double* min_out,
                                        double* max_out);

/* ------------------------------------------------------------------ */
/* Camera calibration. */

typedef struct psfs_intrinsics {
  double focal;
  double hx;
  double hy;
  double cx;
  double cy;
} psfs_intrinsics;

/* Image-plane coordinates of a pixel: x = hx*(a - cx), y = hy*(b - cy). */
PSFS_API psfs_status psfs_pixel_to_image(const psfs_intrinsics* k, double a, double b,
                                         double* x_out, double* y_out);
PSFS_API psfs_status psfs_scale_intrinsics(const psfs_intrinsics* k, int level, double eta,
                                           psfs_intrinsics* out);

/* ------------------------------------------------------------------ */
/* File formats. */

PSFS_API psfs_status psfs_read_pgm(const char* path, psfs_field** out);
PSFS_API psfs_status psfs_write_pgm(const char* path, const psfs_field* levels);
PSFS_API psfs_status psfs_read_pfm(const char* path, psfs_field** out);
PSFS_API psfs_status psfs_write_pfm(const char* path, const psfs_field* field);

/* ------------------------------------------------------------------ */
/* Image formation. */

typedef enum psfs_scene_kind {
  PSFS_SCENE_SOMBRERO = 0,
  PSFS_SCENE_PLANE = 1,
  PSFS_SCENE_HEMISPHERE = 2
} psfs_scene_kind;

typedef struct psfs_scene_spec {
  psfs_scene_kind kind;
  double plane_depth;   /* plane */
  double centre_depth;  /* hemisphere */
  double radius;        /* hemisphere */
} psfs_scene_spec;

PSFS_API psfs_status psfs_generate_scene(const psfs_scene_spec* spec, const psfs_intrinsics* k,
                                         int width, int height, psfs_field** depth_out);
PSFS_API psfs_status psfs_shade(const psfs_field* depth, const psfs_intrinsics* k,
                                psfs_field** image_out);

/* 8-bit quantisation; scale_out receives 255/max(irradiance). */
PSFS_API psfs_status psfs_quantise_8bit(const psfs_field* irradiance, psfs_field** levels_out,
                                        double* scale_out);
PSFS_API psfs_status psfs_quantise_with_scale(const psfs_field* irradiance, double scale,
                                              psfs_field** levels_out);
/* Levels below floor_level are lifted to it before dividing by the scale. */
PSFS_API psfs_status psfs_dequantise(const psfs_field* levels, double scale, int floor_level,
                                     psfs_field** irradiance_out);

/* Deterministic Gaussian noise on 8-bit levels, clamped to [0, 255]. */
PSFS_API psfs_status psfs_add_gaussian_noise(const psfs_field* levels, double sigma,
                                             uint64_t seed, psfs_field** out);

/* ------------------------------------------------------------------ */
/* Reconstruction. */

typedef enum psfs_scheme {
  PSFS_SCHEME_FULL = 0,
  PSFS_SCHEME_SIMPLIFIED = 1,
  PSFS_SCHEME_ALTERNATING = 2
} psfs_scheme;

typedef enum psfs_penaliser {
  PSFS_PENALISER_QUADRATIC = 0,
  PSFS_PENALISER_CHARBONNIER = 1
} psfs_penaliser;

typedef enum psfs_init_kind {
  PSFS_INIT_DATA_TERM = 0, /* pointwise z = sqrt(Q^3/I) at the coarsest level */
  PSFS_INIT_CONSTANT = 1   /* fronto-parallel plane at init_depth */
} psfs_init_kind;

typedef struct psfs_solver_config {
  double alpha;           /* smoothness weight */
  double tau;             /* time step of the simplified scheme */
  long long iterations;   /* per pyramid level */
  double eta;             /* downsampling factor in (0.5, 1) */
  double lambda;          /* charbonnier contrast */
  psfs_scheme scheme;
  psfs_penaliser penaliser;
  int min_level_size;     /* coarsest level keeps min(w,h) >= this; 0 -> 8 */
  psfs_init_kind init_kind;
  double init_depth;
} psfs_solver_config;

PSFS_API void psfs_solver_config_defaults(psfs_solver_config* cfg);

typedef struct psfs_reconstruction psfs_reconstruction;

/* image: positive irradiance (dequantised, floored); confidence may be NULL
 * for an all-ones weighting. */
PSFS_API psfs_status psfs_reconstruct(const psfs_field* image, const psfs_intrinsics* k,
                                      const psfs_field* confidence,
                                      const psfs_solver_config* cfg,
                                      psfs_reconstruction** out);
PSFS_API void psfs_reconstruction_destroy(psfs_reconstruction* rec);
PSFS_API const psfs_field* psfs_reconstruction_depth(const psfs_reconstruction* rec);
PSFS_API const psfs_field* psfs_reconstruction_reprojection(const psfs_reconstruction* rec);
PSFS_API int psfs_reconstruction_levels(const psfs_reconstruction* rec);
PSFS_API long long psfs_reconstruction_trace_size(const psfs_reconstruction* rec);
PSFS_API psfs_status psfs_reconstruction_trace_row(const psfs_reconstruction* rec,
                                                   long long index, long long* iteration_out,
                                                   int* level_out, double* energy_out);
PSFS_API psfs_status psfs_write_energy_trace(const psfs_reconstruction* rec, const char* path);

/* ------------------------------------------------------------------ */
/* Evaluation. */

PSFS_API psfs_status psfs_relative_surface_error(const psfs_field* depth,
                                                 const psfs_field* depth_gt,
                                                 const psfs_intrinsics* k, double* out);
PSFS_API psfs_status psfs_relative_image_error(const psfs_field* image,
                                               const psfs_field* image_gt, double* out);
/* Same measures restricted to pixels where mask > 0. */
PSFS_API psfs_status psfs_relative_surface_error_masked(const psfs_field* depth,
                                                        const psfs_field* depth_gt,
                                                        const psfs_intrinsics* k,
                                                        const psfs_field* mask, double* out);
PSFS_API psfs_status psfs_relative_image_error_masked(const psfs_field* image,
                                                      const psfs_field* image_gt,
                                                      const psfs_field* mask, double* out);
PSFS_API psfs_status psfs_surface_error_map(const psfs_field* depth, const psfs_field* depth_gt,
                                            const psfs_intrinsics* k, double threshold,
                                            psfs_field** map_out, psfs_field** mask_out);

/* ------------------------------------------------------------------ */
/* Run manifests: ordered key=value lines. */

typedef struct psfs_manifest psfs_manifest;

PSFS_API psfs_status psfs_manifest_create(psfs_manifest** out);
PSFS_API void psfs_manifest_destroy(psfs_manifest* manifest);
PSFS_API psfs_status psfs_manifest_set(psfs_manifest* manifest, const char* key,
                                       const char* value);
PSFS_API psfs_status psfs_manifest_set_double(psfs_manifest* manifest, const char* key,
                                              double value);
PSFS_API psfs_status psfs_manifest_set_int(psfs_manifest* manifest, const char* key,
                                           long long value);
/* NULL when the key is absent; the pointer stays valid until the manifest
 * is modified or destroyed. */
PSFS_API const char* psfs_manifest_get(const psfs_manifest* manifest, const char* key);
PSFS_API psfs_status psfs_manifest_write(const psfs_manifest* manifest, const char* path);
PSFS_API psfs_status psfs_manifest_read(const char* path, psfs_manifest** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PSFS_H */
