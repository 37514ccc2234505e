// C bindings: translate between opaque handles / status codes and the C++
// core. Every entry point catches and stores the error for the caller.

#include "psfs.h"

#include <cstring>
#include <exception>
#include <string>

#include "errors.hpp"
#include "field.hpp"
#include "image_io.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "scene.hpp"
#include "solver.hpp"

struct psfs_field {
  psfs::ScalarField value;
};

struct psfs_reconstruction {
  psfs::ReconstructionResult result;
  psfs_field depth;
  psfs_field reprojection;
};

struct psfs_manifest {
  psfs::Manifest value;
};

namespace {

thread_local std::string g_last_error;

psfs_status fail(psfs_status status, const char* what) {
  g_last_error = what != nullptr ? what : "unknown error";
  return status;
}

template <typename Fn>
psfs_status guarded(Fn&& fn) {
  try {
    fn();
    return PSFS_OK;
  } catch (const psfs::InvalidArgument& e) {
    return fail(PSFS_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const psfs::IoError& e) {
    return fail(PSFS_ERROR_IO, e.what());
  } catch (const psfs::DivergenceError& e) {
    return fail(PSFS_ERROR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(PSFS_ERROR_INVALID_ARGUMENT, e.what());
  }
}

psfs::CameraIntrinsics to_intrinsics(const psfs_intrinsics* k) {
  if (k == nullptr) throw psfs::InvalidArgument("intrinsics pointer is null");
  return psfs::CameraIntrinsics(k->focal, k->hx, k->hy, k->cx, k->cy);
}

const psfs::ScalarField& ref(const psfs_field* f, const char* what) {
  if (f == nullptr) throw psfs::InvalidArgument(std::string(what) + " is null");
  return f->value;
}

psfs_field* make_field(psfs::ScalarField&& v) { return new psfs_field{std::move(v)}; }

void require_out(const void* p) {
  if (p == nullptr) throw psfs::InvalidArgument("output pointer is null");
}

psfs::SolverConfig to_config(const psfs_solver_config* cfg) {
  if (cfg == nullptr) throw psfs::InvalidArgument("solver config is null");
  psfs::SolverConfig out;
  out.alpha = cfg->alpha;
  out.tau = cfg->tau;
  out.iterations = cfg->iterations;
  out.eta = cfg->eta;
  out.lambda = cfg->lambda;
  switch (cfg->scheme) {
    case PSFS_SCHEME_FULL:
      out.scheme = psfs::Scheme::full;
      break;
    case PSFS_SCHEME_SIMPLIFIED:
      out.scheme = psfs::Scheme::simplified;
      break;
    case PSFS_SCHEME_ALTERNATING:
      out.scheme = psfs::Scheme::alternating;
      break;
    default:
      throw psfs::InvalidArgument("unknown scheme");
  }
  switch (cfg->penaliser) {
    case PSFS_PENALISER_QUADRATIC:
      out.penaliser = psfs::PenaliserKind::quadratic;
      break;
    case PSFS_PENALISER_CHARBONNIER:
      out.penaliser = psfs::PenaliserKind::charbonnier;
      break;
    default:
      throw psfs::InvalidArgument("unknown penaliser");
  }
  out.min_level_size = cfg->min_level_size > 0 ? cfg->min_level_size : 8;
  switch (cfg->init_kind) {
    case PSFS_INIT_DATA_TERM:
      out.init = psfs::InitialGuess::from_data();
      break;
    case PSFS_INIT_CONSTANT:
      out.init = psfs::InitialGuess::constant(cfg->init_depth);
      break;
    default:
      throw psfs::InvalidArgument("unknown initial guess kind");
  }
  return out;
}

}  // namespace

extern "C" {

const char* psfs_status_name(psfs_status status) {
  switch (status) {
    case PSFS_OK:
      return "ok";
    case PSFS_ERROR_INVALID_ARGUMENT:
      return "invalid argument";
    case PSFS_ERROR_IO:
      return "i/o error";
    case PSFS_ERROR_NUMERIC:
      return "numeric failure";
  }
  return "unknown";
}

const char* psfs_last_error_message(void) { return g_last_error.c_str(); }

psfs_status psfs_set_threads(int threads) {
  return guarded([&] { psfs::set_thread_count(threads); });
}

psfs_status psfs_field_create(int width, int height, double fill, psfs_field** out) {
  return guarded([&] {
    require_out(out);
    *out = make_field(psfs::ScalarField(width, height, fill));
  });
}

void psfs_field_destroy(psfs_field* field) { delete field; }

psfs_status psfs_field_clone(const psfs_field* field, psfs_field** out) {
  return guarded([&] {
    require_out(out);
    *out = make_field(psfs::ScalarField(ref(field, "field")));
  });
}

int psfs_field_width(const psfs_field* field) {
  return field == nullptr ? 0 : field->value.width();
}

int psfs_field_height(const psfs_field* field) {
  return field == nullptr ? 0 : field->value.height();
}

psfs_status psfs_field_get(const psfs_field* field, int col, int row, double* out) {
  return guarded([&] {
    require_out(out);
    const psfs::ScalarField& f = ref(field, "field");
    if (col < 0 || col >= f.width() || row < 0 || row >= f.height())
      throw psfs::InvalidArgument("psfs_field_get: index out of range");
    *out = f.at(col, row);
  });
}

psfs_status psfs_field_set(psfs_field* field, int col, int row, double value) {
  return guarded([&] {
    if (field == nullptr) throw psfs::InvalidArgument("field is null");
    psfs::ScalarField& f = field->value;
    if (col < 0 || col >= f.width() || row < 0 || row >= f.height())
      throw psfs::InvalidArgument("psfs_field_set: index out of range");
    f.at(col, row) = value;
  });
}

const double* psfs_field_data(const psfs_field* field) {
  return field == nullptr ? nullptr : field->value.data();
}

psfs_status psfs_field_min_max(const psfs_field* field, double* min_out, double* max_out) {
  return guarded([&] {
    const psfs::ScalarField& f = ref(field, "field");
    if (min_out != nullptr) *min_out = psfs::min_value(f);
    if (max_out != nullptr) *max_out = psfs::max_value(f);
  });
}

psfs_status psfs_pixel_to_image(const psfs_intrinsics* k, double a, double b, double* x_out,
                                double* y_out) {
  return guarded([&] {
    require_out(x_out);
    require_out(y_out);
    const psfs::Vec2 x = psfs::pixel_to_image(a, b, to_intrinsics(k));
    *x_out = x.x;
    *y_out = x.y;
  });
}

psfs_status psfs_scale_intrinsics(const psfs_intrinsics* k, int level, double eta,
                                  psfs_intrinsics* out) {
  return guarded([&] {
    require_out(out);
    const psfs::CameraIntrinsics scaled = psfs::scale_intrinsics(to_intrinsics(k), level, eta);
    *out = {scaled.focal, scaled.hx, scaled.hy, scaled.cx, scaled.cy};
  });
}

psfs_status psfs_read_pgm(const char* path, psfs_field** out) {
  return guarded([&] {
    require_out(out);
    if (path == nullptr) throw psfs::InvalidArgument("path is null");
    *out = make_field(psfs::read_pgm(path));
  });
}

psfs_status psfs_write_pgm(const char* path, const psfs_field* levels) {
  return guarded([&] {
    if (path == nullptr) throw psfs::InvalidArgument("path is null");
    psfs::write_pgm(path, ref(levels, "levels"));
  });
}

psfs_status psfs_read_pfm(const char* path, psfs_field** out) {
  return guarded([&] {
    require_out(out);
    if (path == nullptr) throw psfs::InvalidArgument("path is null");
    *out = make_field(psfs::read_pfm(path));
  });
}

psfs_status psfs_write_pfm(const char* path, const psfs_field* field) {
  return guarded([&] {
    if (path == nullptr) throw psfs::InvalidArgument("path is null");
    psfs::write_pfm(path, ref(field, "field"));
  });
}

psfs_status psfs_generate_scene(const psfs_scene_spec* spec, const psfs_intrinsics* k,
                                int width, int height, psfs_field** depth_out) {
  return guarded([&] {
    require_out(depth_out);
    if (spec == nullptr) throw psfs::InvalidArgument("scene spec is null");
    psfs::SceneSpec s;
    switch (spec->kind) {
      case PSFS_SCENE_SOMBRERO:
        s = psfs::SceneSpec::sombrero();
        break;
      case PSFS_SCENE_PLANE:
        s = psfs::SceneSpec::plane(spec->plane_depth);
        break;
      case PSFS_SCENE_HEMISPHERE:
        s = psfs::SceneSpec::hemisphere(spec->centre_depth, spec->radius);
        break;
      default:
        throw psfs::InvalidArgument("unknown scene kind");
    }
    *depth_out = make_field(psfs::generate_scene(s, to_intrinsics(k), width, height));
  });
}

psfs_status psfs_shade(const psfs_field* depth, const psfs_intrinsics* k,
                       psfs_field** image_out) {
  return guarded([&] {
    require_out(image_out);
    *image_out = make_field(psfs::shade(ref(depth, "depth"), to_intrinsics(k)));
  });
}

psfs_status psfs_quantise_8bit(const psfs_field* irradiance, psfs_field** levels_out,
                               double* scale_out) {
  return guarded([&] {
    require_out(levels_out);
    require_out(scale_out);
    psfs::Quantised q = psfs::quantise_8bit(ref(irradiance, "irradiance"));
    *levels_out = make_field(std::move(q.levels));
    *scale_out = q.scale;
  });
}

psfs_status psfs_quantise_with_scale(const psfs_field* irradiance, double scale,
                                     psfs_field** levels_out) {
  return guarded([&] {
    require_out(levels_out);
    *levels_out = make_field(psfs::quantise_with_scale(ref(irradiance, "irradiance"), scale));
  });
}

psfs_status psfs_dequantise(const psfs_field* levels, double scale, int floor_level,
                            psfs_field** irradiance_out) {
  return guarded([&] {
    require_out(irradiance_out);
    *irradiance_out = make_field(psfs::dequantise(ref(levels, "levels"), scale, floor_level));
  });
}

psfs_status psfs_add_gaussian_noise(const psfs_field* levels, double sigma, uint64_t seed,
                                    psfs_field** out) {
  return guarded([&] {
    require_out(out);
    *out = make_field(psfs::add_gaussian_noise(ref(levels, "levels"), sigma, seed));
  });
}

void psfs_solver_config_defaults(psfs_solver_config* cfg) {
  if (cfg == nullptr) return;
  cfg->alpha = 7.5e-5;
  cfg->tau = 1e-2;
  cfg->iterations = 100000;
  cfg->eta = 0.8;
  cfg->lambda = 1e-3;
  cfg->scheme = PSFS_SCHEME_ALTERNATING;
  cfg->penaliser = PSFS_PENALISER_CHARBONNIER;
  cfg->min_level_size = 8;
  cfg->init_kind = PSFS_INIT_DATA_TERM;
  cfg->init_depth = 1.0;
}

psfs_status psfs_reconstruct(const psfs_field* image, const psfs_intrinsics* k,
                             const psfs_field* confidence, const psfs_solver_config* cfg,
                             psfs_reconstruction** out) {
  return guarded([&] {
    require_out(out);
    const psfs::ScalarField& img = ref(image, "image");
    const psfs::CameraIntrinsics intr = to_intrinsics(k);
    const psfs::SolverConfig config = to_config(cfg);
    psfs::ReconstructionResult result =
        confidence == nullptr ? psfs::reconstruct(img, intr, config)
                              : psfs::reconstruct(img, intr, confidence->value, config);
    auto* rec = new psfs_reconstruction;
    rec->result = std::move(result);
    rec->depth.value = rec->result.depth;
    rec->reprojection.value = rec->result.reprojection;
    *out = rec;
  });
}

void psfs_reconstruction_destroy(psfs_reconstruction* rec) { delete rec; }

const psfs_field* psfs_reconstruction_depth(const psfs_reconstruction* rec) {
  return rec == nullptr ? nullptr : &rec->depth;
}

const psfs_field* psfs_reconstruction_reprojection(const psfs_reconstruction* rec) {
  return rec == nullptr ? nullptr : &rec->reprojection;
}

int psfs_reconstruction_levels(const psfs_reconstruction* rec) {
  return rec == nullptr ? 0 : rec->result.levels;
}

long long psfs_reconstruction_trace_size(const psfs_reconstruction* rec) {
  return rec == nullptr ? 0 : static_cast<long long>(rec->result.trace.size());
}

psfs_status psfs_reconstruction_trace_row(const psfs_reconstruction* rec, long long index,
                                          long long* iteration_out, int* level_out,
                                          double* energy_out) {
  return guarded([&] {
    if (rec == nullptr) throw psfs::InvalidArgument("reconstruction is null");
    if (index < 0 || index >= static_cast<long long>(rec->result.trace.size()))
      throw psfs::InvalidArgument("trace index out of range");
    const psfs::TraceSample& t = rec->result.trace[static_cast<std::size_t>(index)];
    if (iteration_out != nullptr) *iteration_out = t.iteration;
    if (level_out != nullptr) *level_out = t.level;
    if (energy_out != nullptr) *energy_out = t.energy;
  });
}

psfs_status psfs_write_energy_trace(const psfs_reconstruction* rec, const char* path) {
  return guarded([&] {
    if (rec == nullptr) throw psfs::InvalidArgument("reconstruction is null");
    if (path == nullptr) throw psfs::InvalidArgument("path is null");
    psfs::write_energy_trace_csv(path, rec->result.trace);
  });
}

psfs_status psfs_relative_surface_error(const psfs_field* depth, const psfs_field* depth_gt,
                                        const psfs_intrinsics* k, double* out) {
  return guarded([&] {
    require_out(out);
    *out = psfs::relative_surface_error(ref(depth, "depth"), ref(depth_gt, "ground truth"),
                                        to_intrinsics(k));
  });
}

psfs_status psfs_relative_image_error(const psfs_field* image, const psfs_field* image_gt,
                                      double* out) {
  return guarded([&] {
    require_out(out);
    *out = psfs::relative_image_error(ref(image, "image"), ref(image_gt, "ground truth"));
  });
}

psfs_status psfs_relative_surface_error_masked(const psfs_field* depth,
                                               const psfs_field* depth_gt,
                                               const psfs_intrinsics* k, const psfs_field* mask,
                                               double* out) {
  return guarded([&] {
    require_out(out);
    *out = psfs::relative_surface_error(ref(depth, "depth"), ref(depth_gt, "ground truth"),
                                        to_intrinsics(k), ref(mask, "mask"));
  });
}

psfs_status psfs_relative_image_error_masked(const psfs_field* image, const psfs_field* image_gt,
                                             const psfs_field* mask, double* out) {
  return guarded([&] {
    require_out(out);
    *out = psfs::relative_image_error(ref(image, "image"), ref(image_gt, "ground truth"),
                                      ref(mask, "mask"));
  });
}

psfs_status psfs_surface_error_map(const psfs_field* depth, const psfs_field* depth_gt,
                                   const psfs_intrinsics* k, double threshold,
                                   psfs_field** map_out, psfs_field** mask_out) {
  return guarded([&] {
    require_out(map_out);
    require_out(mask_out);
    psfs::SurfaceErrorMap m = psfs::surface_error_map(ref(depth, "depth"),
                                                      ref(depth_gt, "ground truth"),
                                                      to_intrinsics(k), threshold);
    *map_out = make_field(std::move(m.map));
    *mask_out = make_field(std::move(m.mask));
  });
}

psfs_status psfs_manifest_create(psfs_manifest** out) {
  return guarded([&] {
    require_out(out);
    *out = new psfs_manifest;
  });
}

void psfs_manifest_destroy(psfs_manifest* manifest) { delete manifest; }

psfs_status psfs_manifest_set(psfs_manifest* manifest, const char* key, const char* value) {
  return guarded([&] {
    if (manifest == nullptr || key == nullptr || value == nullptr)
      throw psfs::InvalidArgument("psfs_manifest_set: null argument");
    manifest->value.set(key, std::string(value));
  });
}

psfs_status psfs_manifest_set_double(psfs_manifest* manifest, const char* key, double value) {
  return guarded([&] {
    if (manifest == nullptr || key == nullptr)
      throw psfs::InvalidArgument("psfs_manifest_set_double: null argument");
    manifest->value.set(key, value);
  });
}

psfs_status psfs_manifest_set_int(psfs_manifest* manifest, const char* key, long long value) {
  return guarded([&] {
    if (manifest == nullptr || key == nullptr)
      throw psfs::InvalidArgument("psfs_manifest_set_int: null argument");
    manifest->value.set(key, value);
  });
}

const char* psfs_manifest_get(const psfs_manifest* manifest, const char* key) {
  if (manifest == nullptr || key == nullptr) return nullptr;
  const std::string* v = manifest->value.find(key);
  return v == nullptr ? nullptr : v->c_str();
}

psfs_status psfs_manifest_write(const psfs_manifest* manifest, const char* path) {
  return guarded([&] {
    if (manifest == nullptr || path == nullptr)
      throw psfs::InvalidArgument("psfs_manifest_write: null argument");
    manifest->value.write(path);
  });
}

psfs_status psfs_manifest_read(const char* path, psfs_manifest** out) {
  return guarded([&] {
    require_out(out);
    if (path == nullptr) throw psfs::InvalidArgument("path is null");
    auto* m = new psfs_manifest;
    try {
      m->value = psfs::Manifest::read(path);
    } catch (...) {
      delete m;
      throw;
    }
    *out = m;
  });
}

} /* extern "C" */
