// psfs command line: render | noise | reconstruct | evaluate.
// Exit codes: 0 ok, 2 usage error, 3 i/o failure, 4 numeric failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psfs.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(psfs_status status) {
  switch (status) {
    case PSFS_OK:
      return 0;
    case PSFS_ERROR_IO:
      return kExitIo;
    case PSFS_ERROR_NUMERIC:
      return kExitNumeric;
    default:
      return kExitUsage;
  }
}

void check(psfs_status status) {
  if (status != PSFS_OK) throw CliError{exit_code_for(status), psfs_last_error_message()};
}

using FieldPtr = std::unique_ptr<psfs_field, decltype(&psfs_field_destroy)>;
FieldPtr own(psfs_field* f) { return FieldPtr(f, &psfs_field_destroy); }

using ManifestPtr = std::unique_ptr<psfs_manifest, decltype(&psfs_manifest_destroy)>;
ManifestPtr new_manifest() {
  psfs_manifest* m = nullptr;
  check(psfs_manifest_create(&m));
  return ManifestPtr(m, &psfs_manifest_destroy);
}

using ReconstructionPtr = std::unique_ptr<psfs_reconstruction, decltype(&psfs_reconstruction_destroy)>;

// Shared flag bundles -------------------------------------------------

struct SizeFlag {
  int width = 0;
  int height = 0;
};

struct IntrinsicsFlags {
  double focal = 0.0;
  double h = 0.0;
  double hx = 0.0;  // optional overrides
  double hy = 0.0;
  std::vector<double> pp;

  psfs_intrinsics build() const {
    psfs_intrinsics k;
    k.focal = focal;
    k.hx = hx > 0.0 ? hx : h;
    k.hy = hy > 0.0 ? hy : h;
    k.cx = pp.size() == 2 ? pp[0] : 0.0;
    k.cy = pp.size() == 2 ? pp[1] : 0.0;
    return k;
  }

  void record(psfs_manifest* m) const {
    const psfs_intrinsics k = build();
    check(psfs_manifest_set_double(m, "focal", k.focal));
    check(psfs_manifest_set_double(m, "hx", k.hx));
    check(psfs_manifest_set_double(m, "hy", k.hy));
    check(psfs_manifest_set_double(m, "cx", k.cx));
    check(psfs_manifest_set_double(m, "cy", k.cy));
  }
};

void add_intrinsics_flags(CLI::App* cmd, IntrinsicsFlags& flags) {
  cmd->add_option("--focal", flags.focal, "focal length")->required();
  cmd->add_option("--h", flags.h, "grid spacing (both axes)")->required();
  cmd->add_option("--hx", flags.hx, "override spacing in x");
  cmd->add_option("--hy", flags.hy, "override spacing in y");
  cmd->add_option("--pp", flags.pp, "principal point cx,cy")
      ->required()
      ->delimiter(',')
      ->expected(2);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string default_manifest_path(const std::string& primary_output) {
  return primary_output + ".manifest";
}

// render ---------------------------------------------------------------

struct RenderArgs {
  std::string scene;
  std::string size;
  IntrinsicsFlags intr;
  double z0 = 2.0;
  double centre_depth = 2.0;
  double radius = 0.5;
  std::string out_image;
  std::string out_depth;
  std::string manifest;
};

SizeFlag parse_size(const std::string& s) {
  SizeFlag out;
  if (std::sscanf(s.c_str(), "%dx%d", &out.width, &out.height) != 2 || out.width < 1 ||
      out.height < 1)
    throw CliError{kExitUsage, "--size expects WIDTHxHEIGHT, e.g. 256x256"};
  return out;
}

int run_render(const RenderArgs& args) {
  Timer timer;
  const SizeFlag size = parse_size(args.size);

  psfs_scene_spec spec{};
  if (args.scene == "sombrero") {
    spec.kind = PSFS_SCENE_SOMBRERO;
  } else if (args.scene == "plane") {
    spec.kind = PSFS_SCENE_PLANE;
    spec.plane_depth = args.z0;
  } else if (args.scene == "hemisphere") {
    spec.kind = PSFS_SCENE_HEMISPHERE;
    spec.centre_depth = args.centre_depth;
    spec.radius = args.radius;
  } else {
    throw CliError{kExitUsage, "--scene must be sombrero, plane or hemisphere"};
  }

  const psfs_intrinsics k = args.intr.build();
  psfs_field* raw = nullptr;
  check(psfs_generate_scene(&spec, &k, size.width, size.height, &raw));
  FieldPtr depth = own(raw);
  check(psfs_shade(depth.get(), &k, &raw));
  FieldPtr irradiance = own(raw);
  double scale = 0.0;
  check(psfs_quantise_8bit(irradiance.get(), &raw, &scale));
  FieldPtr levels = own(raw);

  check(psfs_write_pgm(args.out_image.c_str(), levels.get()));
  check(psfs_write_pfm(args.out_depth.c_str(), depth.get()));

  ManifestPtr m = new_manifest();
  check(psfs_manifest_set(m.get(), "command", "render"));
  check(psfs_manifest_set(m.get(), "scene", args.scene.c_str()));
  check(psfs_manifest_set(m.get(), "size", args.size.c_str()));
  args.intr.record(m.get());
  if (args.scene == "plane") check(psfs_manifest_set_double(m.get(), "z0", args.z0));
  if (args.scene == "hemisphere") {
    check(psfs_manifest_set_double(m.get(), "centre_depth", args.centre_depth));
    check(psfs_manifest_set_double(m.get(), "radius", args.radius));
  }
  check(psfs_manifest_set_double(m.get(), "irradiance_scale", scale));
  check(psfs_manifest_set(m.get(), "out_image", args.out_image.c_str()));
  check(psfs_manifest_set(m.get(), "out_depth", args.out_depth.c_str()));
  check(psfs_manifest_set_double(m.get(), "duration_seconds", timer.seconds()));
  const std::string mpath =
      args.manifest.empty() ? default_manifest_path(args.out_image) : args.manifest;
  check(psfs_manifest_write(m.get(), mpath.c_str()));
  return 0;
}

// noise ----------------------------------------------------------------

struct NoiseArgs {
  std::string input;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string output;
  std::string manifest;
};

int run_noise(const NoiseArgs& args) {
  Timer timer;
  psfs_field* raw = nullptr;
  check(psfs_read_pgm(args.input.c_str(), &raw));
  FieldPtr levels = own(raw);
  check(psfs_add_gaussian_noise(levels.get(), args.sigma, args.seed, &raw));
  FieldPtr noisy = own(raw);
  check(psfs_write_pgm(args.output.c_str(), noisy.get()));

  ManifestPtr m = new_manifest();
  check(psfs_manifest_set(m.get(), "command", "noise"));
  check(psfs_manifest_set(m.get(), "input", args.input.c_str()));
  check(psfs_manifest_set_double(m.get(), "sigma", args.sigma));
  check(psfs_manifest_set_int(m.get(), "seed", static_cast<long long>(args.seed)));
  check(psfs_manifest_set(m.get(), "output", args.output.c_str()));
  check(psfs_manifest_set_double(m.get(), "duration_seconds", timer.seconds()));
  const std::string mpath =
      args.manifest.empty() ? default_manifest_path(args.output) : args.manifest;
  check(psfs_manifest_write(m.get(), mpath.c_str()));
  return 0;
}

// reconstruct ----------------------------------------------------------

struct ReconstructArgs {
  std::string image;
  double irradiance_scale = 0.0;
  IntrinsicsFlags intr;
  std::string mask;
  double alpha = 7.5e-5;
  double tau = 1e-2;
  double iters = 1e5;
  double eta = 0.8;
  double lambda = 1e-3;
  std::string scheme = "alternating";
  std::string penaliser = "charbonnier";
  std::string init = "data";
  int threads = 0;
  std::string out_depth;
  std::string out_reproj;
  std::string out_trace;
  std::string manifest;
};

psfs_scheme parse_scheme(const std::string& s) {
  if (s == "full") return PSFS_SCHEME_FULL;
  if (s == "simplified") return PSFS_SCHEME_SIMPLIFIED;
  if (s == "alternating") return PSFS_SCHEME_ALTERNATING;
  throw CliError{kExitUsage, "--scheme must be full, simplified or alternating"};
}

psfs_penaliser parse_penaliser(const std::string& s) {
  if (s == "quadratic") return PSFS_PENALISER_QUADRATIC;
  if (s == "charbonnier") return PSFS_PENALISER_CHARBONNIER;
  throw CliError{kExitUsage, "--penaliser must be quadratic or charbonnier"};
}

void parse_init(const std::string& s, psfs_solver_config& cfg) {
  if (s == "data") {
    cfg.init_kind = PSFS_INIT_DATA_TERM;
    return;
  }
  double z0 = 0.0;
  if (std::sscanf(s.c_str(), "plane:%lf", &z0) == 1 && z0 > 0.0) {
    cfg.init_kind = PSFS_INIT_CONSTANT;
    cfg.init_depth = z0;
    return;
  }
  throw CliError{kExitUsage, "--init must be 'data' or 'plane:<depth>'"};
}

long long parse_iterations(double iters) {
  if (!(iters >= 0.0) || iters > 9e18)
    throw CliError{kExitUsage, "--iters must be a non-negative count"};
  return static_cast<long long>(std::llround(iters));
}

int run_reconstruct(const ReconstructArgs& args) {
  Timer timer;
  check(psfs_set_threads(args.threads));
  if (!(args.irradiance_scale > 0.0))
    throw CliError{kExitUsage, "--irradiance-scale must be positive (from the render manifest)"};

  psfs_field* raw = nullptr;
  check(psfs_read_pgm(args.image.c_str(), &raw));
  FieldPtr levels = own(raw);
  // Dark pixels are lifted to level 1 so the data term stays defined.
  check(psfs_dequantise(levels.get(), args.irradiance_scale, 1, &raw));
  FieldPtr irradiance = own(raw);

  FieldPtr confidence(nullptr, &psfs_field_destroy);
  if (!args.mask.empty()) {
    check(psfs_read_pgm(args.mask.c_str(), &raw));
    FieldPtr mask_levels = own(raw);
    check(psfs_dequantise(mask_levels.get(), 255.0, 0, &raw));
    confidence = own(raw);
  }

  psfs_solver_config cfg;
  psfs_solver_config_defaults(&cfg);
  cfg.alpha = args.alpha;
  cfg.tau = args.tau;
  cfg.iterations = parse_iterations(args.iters);
  cfg.eta = args.eta;
  cfg.lambda = args.lambda;
  cfg.scheme = parse_scheme(args.scheme);
  cfg.penaliser = parse_penaliser(args.penaliser);
  parse_init(args.init, cfg);

  const psfs_intrinsics k = args.intr.build();
  psfs_reconstruction* rec_raw = nullptr;
  check(psfs_reconstruct(irradiance.get(), &k, confidence.get(), &cfg, &rec_raw));
  ReconstructionPtr rec(rec_raw, &psfs_reconstruction_destroy);

  check(psfs_write_pfm(args.out_depth.c_str(), psfs_reconstruction_depth(rec.get())));
  check(psfs_quantise_with_scale(psfs_reconstruction_reprojection(rec.get()),
                                 args.irradiance_scale, &raw));
  FieldPtr reproj_levels = own(raw);
  check(psfs_write_pgm(args.out_reproj.c_str(), reproj_levels.get()));
  check(psfs_write_energy_trace(rec.get(), args.out_trace.c_str()));

  ManifestPtr m = new_manifest();
  check(psfs_manifest_set(m.get(), "command", "reconstruct"));
  check(psfs_manifest_set(m.get(), "image", args.image.c_str()));
  check(psfs_manifest_set_double(m.get(), "irradiance_scale", args.irradiance_scale));
  args.intr.record(m.get());
  check(psfs_manifest_set(m.get(), "mask", args.mask.c_str()));
  check(psfs_manifest_set_double(m.get(), "alpha", args.alpha));
  check(psfs_manifest_set_double(m.get(), "tau", args.tau));
  check(psfs_manifest_set_int(m.get(), "iters", cfg.iterations));
  check(psfs_manifest_set_double(m.get(), "eta", args.eta));
  check(psfs_manifest_set_double(m.get(), "lambda", args.lambda));
  check(psfs_manifest_set(m.get(), "scheme", args.scheme.c_str()));
  check(psfs_manifest_set(m.get(), "penaliser", args.penaliser.c_str()));
  check(psfs_manifest_set(m.get(), "init", args.init.c_str()));
  check(psfs_manifest_set_int(m.get(), "threads", args.threads));
  check(psfs_manifest_set_int(m.get(), "levels", psfs_reconstruction_levels(rec.get())));
  const long long trace_rows = psfs_reconstruction_trace_size(rec.get());
  if (trace_rows > 0) {
    double final_energy = 0.0;
    check(psfs_reconstruction_trace_row(rec.get(), trace_rows - 1, nullptr, nullptr,
                                        &final_energy));
    check(psfs_manifest_set_double(m.get(), "final_energy", final_energy));
  }
  const int pixels = psfs_field_width(levels.get()) * psfs_field_height(levels.get());
  if (cfg.scheme == PSFS_SCHEME_FULL && pixels >= 128 * 128)
    check(psfs_manifest_set(m.get(), "warning",
                            "full scheme at this size may take hours; its stable time step "
                            "shrinks with the squared grid spacing"));
  check(psfs_manifest_set(m.get(), "out_depth", args.out_depth.c_str()));
  check(psfs_manifest_set(m.get(), "out_reproj", args.out_reproj.c_str()));
  check(psfs_manifest_set(m.get(), "out_trace", args.out_trace.c_str()));
  check(psfs_manifest_set_double(m.get(), "duration_seconds", timer.seconds()));
  const std::string mpath =
      args.manifest.empty() ? default_manifest_path(args.out_depth) : args.manifest;
  check(psfs_manifest_write(m.get(), mpath.c_str()));
  return 0;
}

// evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string depth;
  std::string gt_depth;
  std::string reproj;
  std::string gt_image;
  IntrinsicsFlags intr;
  std::string mask;
  std::string error_map;
  double threshold = 0.01;
  std::string manifest;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int run_evaluate(const EvaluateArgs& args) {
  Timer timer;
  psfs_field* raw = nullptr;
  check(psfs_read_pfm(args.depth.c_str(), &raw));
  FieldPtr depth = own(raw);
  check(psfs_read_pfm(args.gt_depth.c_str(), &raw));
  FieldPtr gt_depth = own(raw);
  check(psfs_read_pgm(args.reproj.c_str(), &raw));
  FieldPtr reproj = own(raw);
  check(psfs_read_pgm(args.gt_image.c_str(), &raw));
  FieldPtr gt_image = own(raw);

  const psfs_intrinsics k = args.intr.build();
  double rse = 0.0, rie = 0.0;
  check(psfs_relative_surface_error(depth.get(), gt_depth.get(), &k, &rse));
  check(psfs_relative_image_error(reproj.get(), gt_image.get(), &rie));
  std::printf("rse=%.17g\n", rse);
  std::printf("rie=%.17g\n", rie);

  // With a confidence mask, also report the measures over the trusted pixels.
  double rse_masked = 0.0, rie_masked = 0.0;
  if (!args.mask.empty()) {
    check(psfs_read_pgm(args.mask.c_str(), &raw));
    FieldPtr mask = own(raw);
    check(psfs_relative_surface_error_masked(depth.get(), gt_depth.get(), &k, mask.get(),
                                             &rse_masked));
    check(psfs_relative_image_error_masked(reproj.get(), gt_image.get(), mask.get(),
                                           &rie_masked));
    std::printf("rse_masked=%.17g\n", rse_masked);
    std::printf("rie_masked=%.17g\n", rie_masked);
  }

  if (!args.error_map.empty()) {
    psfs_field* map_raw = nullptr;
    psfs_field* mask_raw = nullptr;
    check(psfs_surface_error_map(depth.get(), gt_depth.get(), &k, args.threshold, &map_raw,
                                 &mask_raw));
    FieldPtr map = own(map_raw);
    FieldPtr mask = own(mask_raw);
    if (ends_with(args.error_map, ".pfm")) {
      check(psfs_write_pfm(args.error_map.c_str(), map.get()));
    } else {
      // Flagged pixels saturate; 255 marks errors above the threshold.
      const int w = psfs_field_width(mask.get());
      const int h = psfs_field_height(mask.get());
      check(psfs_field_create(w, h, 0.0, &raw));
      FieldPtr levels = own(raw);
      for (int b = 0; b < h; ++b)
        for (int a = 0; a < w; ++a) {
          double v = 0.0;
          check(psfs_field_get(mask.get(), a, b, &v));
          check(psfs_field_set(levels.get(), a, b, v > 0.5 ? 255.0 : 0.0));
        }
      check(psfs_write_pgm(args.error_map.c_str(), levels.get()));
    }
  }

  ManifestPtr m = new_manifest();
  check(psfs_manifest_set(m.get(), "command", "evaluate"));
  check(psfs_manifest_set(m.get(), "depth", args.depth.c_str()));
  check(psfs_manifest_set(m.get(), "gt_depth", args.gt_depth.c_str()));
  check(psfs_manifest_set(m.get(), "reproj", args.reproj.c_str()));
  check(psfs_manifest_set(m.get(), "gt_image", args.gt_image.c_str()));
  args.intr.record(m.get());
  check(psfs_manifest_set(m.get(), "mask", args.mask.c_str()));
  check(psfs_manifest_set(m.get(), "error_map", args.error_map.c_str()));
  check(psfs_manifest_set_double(m.get(), "threshold", args.threshold));
  check(psfs_manifest_set_double(m.get(), "rse", rse));
  check(psfs_manifest_set_double(m.get(), "rie", rie));
  if (!args.mask.empty()) {
    check(psfs_manifest_set_double(m.get(), "rse_masked", rse_masked));
    check(psfs_manifest_set_double(m.get(), "rie_masked", rie_masked));
  }
  check(psfs_manifest_set_double(m.get(), "duration_seconds", timer.seconds()));
  const std::string mpath =
      args.manifest.empty() ? args.depth + ".eval.manifest" : args.manifest;
  check(psfs_manifest_write(m.get(), mpath.c_str()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perspective shape-from-shading toolkit"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  RenderArgs render;
  CLI::App* cmd_render = app.add_subcommand("render", "render a synthetic scene");
  cmd_render->set_help_flag("--help", "print help");
  cmd_render->add_option("--scene", render.scene, "sombrero | plane | hemisphere")->required();
  cmd_render->add_option("--size", render.size, "image size WIDTHxHEIGHT")->required();
  add_intrinsics_flags(cmd_render, render.intr);
  cmd_render->add_option("--z0", render.z0, "plane depth");
  cmd_render->add_option("--centre-depth", render.centre_depth, "hemisphere centre depth");
  cmd_render->add_option("--radius", render.radius, "hemisphere radius");
  cmd_render->add_option("--out-image", render.out_image, "8-bit image (PGM)")->required();
  cmd_render->add_option("--out-depth", render.out_depth, "ground-truth depth (PFM)")->required();
  cmd_render->add_option("--manifest", render.manifest, "manifest path");

  NoiseArgs noise;
  CLI::App* cmd_noise = app.add_subcommand("noise", "add Gaussian noise to an 8-bit image");
  cmd_noise->set_help_flag("--help", "print help");
  cmd_noise->add_option("--input", noise.input, "input PGM")->required();
  cmd_noise->add_option("--sigma", noise.sigma, "noise standard deviation (grey levels)")
      ->required();
  cmd_noise->add_option("--seed", noise.seed, "random seed")->required();
  cmd_noise->add_option("--output", noise.output, "output PGM")->required();
  cmd_noise->add_option("--manifest", noise.manifest, "manifest path");

  ReconstructArgs rec;
  CLI::App* cmd_rec = app.add_subcommand("reconstruct", "reconstruct depth from one image");
  cmd_rec->set_help_flag("--help", "print help");
  cmd_rec->add_option("--image", rec.image, "input image (PGM)")->required();
  cmd_rec->add_option("--irradiance-scale", rec.irradiance_scale,
                      "levels per irradiance unit, from the render manifest")
      ->required();
  add_intrinsics_flags(cmd_rec, rec.intr);
  cmd_rec->add_option("--mask", rec.mask, "confidence mask (PGM, level/255)");
  cmd_rec->add_option("--alpha", rec.alpha, "smoothness weight");
  cmd_rec->add_option("--tau", rec.tau, "time step of the simplified scheme");
  cmd_rec->add_option("--iters", rec.iters, "iterations per level (accepts 1e6)");
  cmd_rec->add_option("--eta", rec.eta, "pyramid downsampling factor");
  cmd_rec->add_option("--lambda", rec.lambda, "charbonnier contrast");
  cmd_rec->add_option("--scheme", rec.scheme, "full | simplified | alternating");
  cmd_rec->add_option("--penaliser", rec.penaliser, "quadratic | charbonnier");
  cmd_rec->add_option("--init", rec.init, "data | plane:<depth>");
  cmd_rec->add_option("--threads", rec.threads, "worker threads (0 = all cores)");
  cmd_rec->add_option("--out-depth", rec.out_depth, "depth output (PFM)")->required();
  cmd_rec->add_option("--out-reproj", rec.out_reproj, "reprojected image (PGM)")->required();
  cmd_rec->add_option("--out-trace", rec.out_trace, "energy trace (CSV)")->required();
  cmd_rec->add_option("--manifest", rec.manifest, "manifest path");

  EvaluateArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("evaluate", "compare against ground truth");
  cmd_eval->set_help_flag("--help", "print help");
  cmd_eval->add_option("--depth", eval.depth, "reconstructed depth (PFM)")->required();
  cmd_eval->add_option("--gt-depth", eval.gt_depth, "ground-truth depth (PFM)")->required();
  cmd_eval->add_option("--reproj", eval.reproj, "reprojected image (PGM)")->required();
  cmd_eval->add_option("--gt-image", eval.gt_image, "input image (PGM)")->required();
  add_intrinsics_flags(cmd_eval, eval.intr);
  cmd_eval->add_option("--mask", eval.mask,
                       "confidence mask (PGM); adds measures over trusted pixels");
  cmd_eval->add_option("--error-map", eval.error_map,
                       "surface error output (.pfm map or PGM mask)");
  cmd_eval->add_option("--threshold", eval.threshold, "error-map threshold");
  cmd_eval->add_option("--manifest", eval.manifest, "manifest path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitUsage;
  }

  try {
    if (cmd_render->parsed()) return run_render(render);
    if (cmd_noise->parsed()) return run_noise(noise);
    if (cmd_rec->parsed()) return run_reconstruct(rec);
    if (cmd_eval->parsed()) return run_evaluate(eval);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
  return kExitUsage;
}
