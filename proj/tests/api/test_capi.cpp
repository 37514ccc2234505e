#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "psfs.h"

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

struct Field {
  psfs_field* p = nullptr;
  ~Field() { psfs_field_destroy(p); }
};

const psfs_intrinsics kCam{1.0, 1.0 / 100, 1.0 / 100, 16.0, 16.0};

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("status names and error messages") {
    CHECK(std::string(psfs_status_name(PSFS_OK)) == "ok");
    CHECK(std::string(psfs_status_name(PSFS_ERROR_IO)) == "i/o error");

    Field f;
    CHECK(psfs_field_create(0, 4, 0.0, &f.p) == PSFS_ERROR_INVALID_ARGUMENT);
    CHECK(std::strlen(psfs_last_error_message()) > 0);
    CHECK(f.p == nullptr);
  }

  TEST_CASE("field lifecycle") {
    Field f;
    REQUIRE(psfs_field_create(5, 3, 1.5, &f.p) == PSFS_OK);
    CHECK(psfs_field_width(f.p) == 5);
    CHECK(psfs_field_height(f.p) == 3);
    CHECK(psfs_field_set(f.p, 4, 2, -7.0) == PSFS_OK);
    double v = 0.0;
    CHECK(psfs_field_get(f.p, 4, 2, &v) == PSFS_OK);
    CHECK(v == -7.0);
    CHECK(psfs_field_get(f.p, 5, 0, &v) == PSFS_ERROR_INVALID_ARGUMENT);

    double mn = 0.0, mx = 0.0;
    CHECK(psfs_field_min_max(f.p, &mn, &mx) == PSFS_OK);
    CHECK(mn == -7.0);
    CHECK(mx == 1.5);

    Field c;
    REQUIRE(psfs_field_clone(f.p, &c.p) == PSFS_OK);
    CHECK(psfs_field_get(c.p, 4, 2, &v) == PSFS_OK);
    CHECK(v == -7.0);

    const double* data = psfs_field_data(f.p);
    REQUIRE(data != nullptr);
    CHECK(data[2 * 5 + 4] == -7.0);
  }

  TEST_CASE("pixel transform and intrinsics scaling") {
    double x = 1.0, y = 1.0;
    REQUIRE(psfs_pixel_to_image(&kCam, 16, 16, &x, &y) == PSFS_OK);
    CHECK(x == doctest::Approx(0.0));
    CHECK(y == doctest::Approx(0.0));

    psfs_intrinsics scaled;
    REQUIRE(psfs_scale_intrinsics(&kCam, 1, 0.8, &scaled) == PSFS_OK);
    CHECK(scaled.hx == doctest::Approx(kCam.hx / 0.8));
    CHECK(scaled.cx == doctest::Approx(kCam.cx * 0.8));
    CHECK(psfs_scale_intrinsics(&kCam, 1, 1.5, &scaled) == PSFS_ERROR_INVALID_ARGUMENT);
  }

  TEST_CASE("render, degrade and reconstruct through the C surface") {
    psfs_scene_spec spec{};
    spec.kind = PSFS_SCENE_PLANE;
    spec.plane_depth = 2.0;

    Field depth;
    REQUIRE(psfs_generate_scene(&spec, &kCam, 32, 32, &depth.p) == PSFS_OK);
    Field image;
    REQUIRE(psfs_shade(depth.p, &kCam, &image.p) == PSFS_OK);

    double centre = 0.0;
    REQUIRE(psfs_field_get(image.p, 16, 16, &centre) == PSFS_OK);
    CHECK(centre == doctest::Approx(0.25).epsilon(1e-13));

    Field levels;
    double scale = 0.0;
    REQUIRE(psfs_quantise_8bit(image.p, &levels.p, &scale) == PSFS_OK);
    CHECK(scale > 0.0);

    Field noisy;
    REQUIRE(psfs_add_gaussian_noise(levels.p, 0.0, 1, &noisy.p) == PSFS_OK);

    Field irradiance;
    REQUIRE(psfs_dequantise(noisy.p, scale, 1, &irradiance.p) == PSFS_OK);

    psfs_solver_config cfg;
    psfs_solver_config_defaults(&cfg);
    cfg.iterations = 50;
    cfg.alpha = 1e-6;

    psfs_reconstruction* rec = nullptr;
    REQUIRE(psfs_reconstruct(irradiance.p, &kCam, nullptr, &cfg, &rec) == PSFS_OK);
    CHECK(psfs_reconstruction_levels(rec) >= 4);
    CHECK(psfs_reconstruction_trace_size(rec) > 0);

    long long iter = -1;
    int level = -1;
    double energy = -1.0;
    REQUIRE(psfs_reconstruction_trace_row(rec, 0, &iter, &level, &energy) == PSFS_OK);
    CHECK(iter == 0);
    CHECK(level == psfs_reconstruction_levels(rec) - 1);
    CHECK(std::isfinite(energy));

    double rse = 1.0;
    REQUIRE(psfs_relative_surface_error(psfs_reconstruction_depth(rec), depth.p, &kCam,
                                        &rse) == PSFS_OK);
    CHECK(rse < 2e-2);  // quantised input, tiny budget; exactness is tested elsewhere

    psfs_reconstruction_destroy(rec);
  }

  TEST_CASE("results do not depend on the thread count") {
    psfs_scene_spec spec{};
    spec.kind = PSFS_SCENE_SOMBRERO;
    Field depth;
    REQUIRE(psfs_generate_scene(&spec, &kCam, 32, 32, &depth.p) == PSFS_OK);
    Field image;
    REQUIRE(psfs_shade(depth.p, &kCam, &image.p) == PSFS_OK);
    Field levels;
    double scale = 0.0;
    REQUIRE(psfs_quantise_8bit(image.p, &levels.p, &scale) == PSFS_OK);
    Field irradiance;
    REQUIRE(psfs_dequantise(levels.p, scale, 1, &irradiance.p) == PSFS_OK);

    psfs_solver_config cfg;
    psfs_solver_config_defaults(&cfg);
    cfg.iterations = 40;

    std::vector<double> runs[2];
    for (int t = 0; t < 2; ++t) {
      REQUIRE(psfs_set_threads(t == 0 ? 1 : 4) == PSFS_OK);
      psfs_reconstruction* rec = nullptr;
      REQUIRE(psfs_reconstruct(irradiance.p, &kCam, nullptr, &cfg, &rec) == PSFS_OK);
      const psfs_field* d = psfs_reconstruction_depth(rec);
      const double* data = psfs_field_data(d);
      runs[t].assign(data, data + 32 * 32);
      psfs_reconstruction_destroy(rec);
    }
    REQUIRE(psfs_set_threads(0) == PSFS_OK);
    CHECK(runs[0] == runs[1]);  // bit-identical depths
  }

  TEST_CASE("file io through the C surface") {
    Field f;
    REQUIRE(psfs_field_create(7, 5, 3.0, &f.p) == PSFS_OK);
    const std::string pfm = temp_path("capi_test.pfm");
    REQUIRE(psfs_write_pfm(pfm.c_str(), f.p) == PSFS_OK);
    Field back;
    REQUIRE(psfs_read_pfm(pfm.c_str(), &back.p) == PSFS_OK);
    CHECK(psfs_field_width(back.p) == 7);
    double v = 0.0;
    CHECK(psfs_field_get(back.p, 6, 4, &v) == PSFS_OK);
    CHECK(v == 3.0);
    std::remove(pfm.c_str());

    Field missing;
    CHECK(psfs_read_pgm(temp_path("capi_no_such.pgm").c_str(), &missing.p) == PSFS_ERROR_IO);
    CHECK(missing.p == nullptr);
  }

  TEST_CASE("manifests through the C surface") {
    psfs_manifest* m = nullptr;
    REQUIRE(psfs_manifest_create(&m) == PSFS_OK);
    CHECK(psfs_manifest_set(m, "command", "render") == PSFS_OK);
    CHECK(psfs_manifest_set_double(m, "alpha", 7.5e-5) == PSFS_OK);
    CHECK(psfs_manifest_set_int(m, "iters", 42) == PSFS_OK);
    CHECK(psfs_manifest_get(m, "command") == std::string("render"));
    CHECK(psfs_manifest_get(m, "absent") == nullptr);

    const std::string path = temp_path("capi_manifest.txt");
    REQUIRE(psfs_manifest_write(m, path.c_str()) == PSFS_OK);
    psfs_manifest* back = nullptr;
    REQUIRE(psfs_manifest_read(path.c_str(), &back) == PSFS_OK);
    CHECK(psfs_manifest_get(back, "iters") == std::string("42"));
    psfs_manifest_destroy(back);
    psfs_manifest_destroy(m);
    std::remove(path.c_str());
  }

  TEST_CASE("null arguments are rejected, not crashed on") {
    CHECK(psfs_shade(nullptr, &kCam, nullptr) == PSFS_ERROR_INVALID_ARGUMENT);
    CHECK(psfs_reconstruct(nullptr, nullptr, nullptr, nullptr, nullptr) ==
          PSFS_ERROR_INVALID_ARGUMENT);
    CHECK(psfs_field_data(nullptr) == nullptr);
    CHECK(psfs_field_width(nullptr) == 0);
    psfs_field_destroy(nullptr);
    psfs_reconstruction_destroy(nullptr);
    psfs_manifest_destroy(nullptr);
  }
}
