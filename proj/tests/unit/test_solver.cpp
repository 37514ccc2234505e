#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "energy.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "metrics.hpp"
#include "scene.hpp"
#include "solver.hpp"

using namespace psfs;

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  double next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return (z >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
};

ScalarField random_positive_field(Rng& rng, int w, int h, double lo, double hi) {
  ScalarField f(w, h);
  for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = rng.uniform(lo, hi);
  return f;
}

// Central finite differences of the discrete energy under a frozen plan,
// rescaled to the per-cell-area form the analytic gradient uses.
ScalarField fd_gradient(const ScalarField& z, const ScalarField& img, const EnergySettings& s,
                        const UpwindPlan& plan) {
  const double eps = 1e-6 * max_value(z);
  ScalarField g(z.width(), z.height());
  ScalarField probe = z;
  for (int b = 0; b < z.height(); ++b) {
    for (int a = 0; a < z.width(); ++a) {
      const double base = probe.at(a, b);
      probe.at(a, b) = base + eps;
      const double ep = total_energy(probe, img, s, plan);
      probe.at(a, b) = base - eps;
      const double en = total_energy(probe, img, s, plan);
      probe.at(a, b) = base;
      g.at(a, b) = (ep - en) / (2.0 * eps) / (s.intrinsics.hx * s.intrinsics.hy);
    }
  }
  return g;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f.data()[i]));
  return m;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

// Independent scatter of the data-term flux contributions, the terms the
// simplified scheme omits.
ScalarField flux_divergence_oracle(const ScalarField& z, const ScalarField& img,
                                   const EnergySettings& s, const UpwindPlan& plan) {
  const int w = z.width(), h = z.height();
  const double f = s.intrinsics.focal;
  const double hx = s.intrinsics.hx, hy = s.intrinsics.hy;
  ScalarField out(w, h, 0.0);
  for (int b = 0; b < h; ++b) {
    for (int a = 0; a < w; ++a) {
      const std::size_t i = static_cast<std::size_t>(b) * w + a;
      const double c = s.confidence.data()[i];
      if (c <= 0.0) continue;
      double zx = 0.0, zy = 0.0;
      if (plan.dx[i] == UpwindDir::backward)
        zx = (z.at(a, b) - z.at(a - 1, b)) / hx;
      else if (plan.dx[i] == UpwindDir::forward)
        zx = (z.at(a + 1, b) - z.at(a, b)) / hx;
      if (plan.dy[i] == UpwindDir::backward)
        zy = (z.at(a, b) - z.at(a, b - 1)) / hy;
      else if (plan.dy[i] == UpwindDir::forward)
        zy = (z.at(a, b + 1) - z.at(a, b)) / hy;

      const double x = hx * a - hx * s.intrinsics.cx;
      const double y = hy * b - hy * s.intrinsics.cy;
      const double q = f / std::sqrt(x * x + y * y + f * f);
      const double v = zx * x + zy * y + z.at(a, b);
      const double w2 = f * f * (zx * zx + zy * zy) + v * v;
      const double model = q * q * q / (z.at(a, b) * std::sqrt(w2));
      const double r = img.data()[i] - model;
      const double common = c * 2.0 * r * model / w2;

      if (plan.dx[i] == UpwindDir::backward) {
        out.at(a, b) += common * (f * f * zx + v * x) / hx;
        out.at(a - 1, b) -= common * (f * f * zx + v * x) / hx;
      } else if (plan.dx[i] == UpwindDir::forward) {
        out.at(a + 1, b) += common * (f * f * zx + v * x) / hx;
        out.at(a, b) -= common * (f * f * zx + v * x) / hx;
      }
      if (plan.dy[i] == UpwindDir::backward) {
        out.at(a, b) += common * (f * f * zy + v * y) / hy;
        out.at(a, b - 1) -= common * (f * f * zy + v * y) / hy;
      } else if (plan.dy[i] == UpwindDir::forward) {
        out.at(a, b + 1) += common * (f * f * zy + v * y) / hy;
        out.at(a, b) -= common * (f * f * zy + v * y) / hy;
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("upwind gradient selection") {
    // 1-D cases embedded in a 3x3 field, checked at the centre pixel
    auto embed = [](double l, double m, double r) {
      ScalarField z(3, 3, m);
      z.at(0, 1) = l;
      z.at(1, 1) = m;
      z.at(2, 1) = r;
      return z;
    };
    SUBCASE("backward difference wins") {
      const Vec2 g = upwind_gradient(embed(1, 3, 2), 1, 1, 1.0, 1.0);
      CHECK(g.x == 2.0);
    }
    SUBCASE("forward difference wins with its sign restored") {
      const Vec2 g = upwind_gradient(embed(1, 2, 0), 1, 1, 1.0, 1.0);
      CHECK(g.x == -2.0);
    }
    SUBCASE("local minimum contributes nothing") {
      const Vec2 g = upwind_gradient(embed(3, 1, 2), 1, 1, 1.0, 1.0);
      CHECK(g.x == 0.0);
    }
    SUBCASE("spacing rescales the value") {
      const Vec2 g = upwind_gradient(embed(1, 3, 2), 1, 1, 0.5, 1.0);
      CHECK(g.x == 4.0);
    }
    SUBCASE("one-sided at the borders") {
      ScalarField z(3, 1, 0.0);
      z.at(0, 0) = 5;
      z.at(1, 0) = 3;
      z.at(2, 0) = 4;
      // left border: only the forward difference (3-5=-2 < 0) is eligible
      CHECK(upwind_gradient(z, 0, 0, 1.0, 1.0).x == -2.0);
      // right border: only the backward difference (4-3=1 > 0) is eligible
      CHECK(upwind_gradient(z, 2, 0, 1.0, 1.0).x == 1.0);
      // 1-pixel column has no y-neighbours at all
      CHECK(upwind_gradient(z, 1, 0, 1.0, 1.0).y == 0.0);
    }
  }

  TEST_CASE("analytic gradient matches finite differences") {
    Rng rng(101);
    const CameraIntrinsics k(1.0, 0.01, 0.0125, 8, 8);
    for (const double alpha : {0.0, 7.5e-5, 1.0}) {
      for (const bool charb : {false, true}) {
        const ScalarField z = random_positive_field(rng, 16, 16, 0.5, 3.0);
        const ScalarField img = random_positive_field(rng, 16, 16, 0.05, 1.0);
        const ScalarField conf = random_positive_field(rng, 16, 16, 0.0, 1.0);
        EnergySettings s(alpha, charb ? Penaliser::charbonnier(1e-3) : Penaliser::quadratic(),
                         conf, k);
        const UpwindPlan plan = plan_upwind(z);
        const ScalarField g = el_gradient_full(z, img, s, plan);
        const ScalarField g_fd = fd_gradient(z, img, s, plan);
        const double rel = max_abs_diff(g, g_fd) / std::max(max_abs(g), 1e-12);
        CHECK(rel < 1e-4);
      }
    }
  }

  TEST_CASE("gradient vanishes at an exact stationary point") {
    const CameraIntrinsics k(1.0, 1.0 / 200, 1.0 / 200, 12, 12);
    const ScalarField z = generate_scene(SceneSpec::plane(2.0), k, 24, 24);
    const ScalarField img = shade(z, k);
    SUBCASE("alpha zero, exact image") {
      EnergySettings s(0.0, Penaliser::charbonnier(1e-3), ScalarField(24, 24, 1.0), k);
      CHECK(max_abs(el_gradient_full(z, img, s)) == 0.0);
      CHECK(max_abs(el_gradient_simplified(z, img, s)) == 0.0);
    }
    SUBCASE("confidence zero, quadratic penaliser, flat depth") {
      EnergySettings s(1.0, Penaliser::quadratic(), ScalarField(24, 24, 0.0), k);
      CHECK(max_abs(el_gradient_full(z, img, s)) == 0.0);
    }
  }

  TEST_CASE("simplified gradient differs exactly by the flux terms") {
    Rng rng(211);
    const CameraIntrinsics k(1.0, 0.02, 0.02, 10, 10);
    const ScalarField z = random_positive_field(rng, 20, 20, 0.5, 2.5);
    const ScalarField img = random_positive_field(rng, 20, 20, 0.05, 1.0);
    const ScalarField conf = random_positive_field(rng, 20, 20, 0.0, 1.0);
    EnergySettings s(3e-4, Penaliser::charbonnier(1e-3), conf, k);
    const UpwindPlan plan = plan_upwind(z);

    const ScalarField full = el_gradient_full(z, img, s, plan);
    const ScalarField simp = el_gradient_simplified(z, img, s, plan);
    const ScalarField oracle = flux_divergence_oracle(z, img, s, plan);

    ScalarField diff(20, 20);
    for (std::size_t i = 0; i < diff.size(); ++i)
      diff.data()[i] = full.data()[i] - simp.data()[i];
    const double scale = std::max(max_abs(oracle), 1e-12);
    CHECK(max_abs_diff(diff, oracle) <= 1e-10 * scale);
  }

  TEST_CASE("simplified equals full on constant fields") {
    const CameraIntrinsics k(1.0, 0.01, 0.01, 8, 8);
    const ScalarField z(16, 16, 1.5);
    const ScalarField img(16, 16, 0.3);
    EnergySettings s(1e-3, Penaliser::charbonnier(1e-3), ScalarField(16, 16, 1.0), k);
    const ScalarField full = el_gradient_full(z, img, s);
    const ScalarField simp = el_gradient_simplified(z, img, s);
    CHECK(max_abs_diff(full, simp) == 0.0);
  }

  TEST_CASE("explicit step") {
    SUBCASE("zero gradient is the identity") {
      const ScalarField z(4, 4, 2.0);
      const ScalarField g(4, 4, 0.0);
      const ScalarField out = explicit_step(z, g, 0.5);
      CHECK(max_abs_diff(out, z) == 0.0);
    }
    SUBCASE("plain arithmetic") {
      const ScalarField z(2, 2, 2.0);
      const ScalarField g(2, 2, 1.0);
      const ScalarField out = explicit_step(z, g, 0.5);
      CHECK(out.at(0, 0) == 1.5);
    }
    SUBCASE("updates crossing zero are floored") {
      const ScalarField z(2, 2, 0.1);
      const ScalarField g(2, 2, 10.0);
      const ScalarField out = explicit_step(z, g, 1.0);
      CHECK(out.at(1, 1) == kDepthFloor);
    }
    SUBCASE("rejects bad tau") {
      const ScalarField z(2, 2, 1.0);
      CHECK_THROWS_AS(explicit_step(z, z, 0.0), InvalidArgument);
    }
  }

  TEST_CASE("level alpha scaling") {
    CHECK(scaled_alpha(1e-4, 0.8, 0) == 1e-4);
    CHECK(scaled_alpha(1e-4, 0.8, 1) == doctest::Approx(2.44140625e-4).epsilon(1e-13));
  }

  TEST_CASE("run_level basics") {
    const CameraIntrinsics k(1.0, 1.0 / 50, 1.0 / 50, 12, 12);
    const ScalarField z_gt = generate_scene(SceneSpec::sombrero(), k, 24, 24);
    const Quantised q = quantise_8bit(shade(z_gt, k));
    const ScalarField img = dequantise(q.levels, q.scale, 1);
    EnergySettings s(7.5e-5, Penaliser::charbonnier(1e-3), ScalarField(24, 24, 1.0), k);

    SolverConfig cfg;
    cfg.iterations = 0;

    SUBCASE("zero iterations return the input") {
      const ScalarField z0 = initialise(img, k);
      const ScalarField out = run_level(z0, img, s, cfg);
      CHECK(max_abs_diff(out, z0) == 0.0);
    }

    SUBCASE("one tiny simplified step does not increase the frozen energy") {
      const ScalarField z0 = initialise(img, k);
      const UpwindPlan plan = plan_upwind(z0);
      const ScalarField g = el_gradient_simplified(z0, img, s, plan);
      const ScalarField z1 = explicit_step(z0, g, 1e-6);
      CHECK(total_energy(z1, img, s, plan) <= total_energy(z0, img, s, plan));
    }

    SUBCASE("alternating is simplified then full by construction") {
      cfg.iterations = 6;
      cfg.tau = 1e-3;
      cfg.scheme = Scheme::alternating;
      const ScalarField z0 = initialise(img, k);
      const ScalarField alternating = run_level(z0, img, s, cfg);

      SolverConfig half = cfg;
      half.iterations = 3;
      half.scheme = Scheme::simplified;
      const ScalarField stage1 = run_level(z0, img, s, half);
      half.scheme = Scheme::full;
      const ScalarField stage2 = run_level(stage1, img, s, half);
      CHECK(max_abs_diff(alternating, stage2) == 0.0);
    }

    SUBCASE("energy trace is sampled") {
      cfg.iterations = 10;
      cfg.scheme = Scheme::simplified;
      std::vector<TraceSample> trace;
      const ScalarField z0 = initialise(img, k);
      run_level(z0, img, s, cfg, 3, &trace);
      REQUIRE(trace.size() == 11);  // initial state plus every iteration
      CHECK(trace.front().iteration == 0);
      CHECK(trace.back().iteration == 10);
      for (const TraceSample& t : trace) {
        CHECK(t.level == 3);
        CHECK(std::isfinite(t.energy));
      }
    }

    SUBCASE("divergence is reported with the iteration index") {
      cfg.iterations = 2000;
      cfg.tau = 1e9;
      cfg.scheme = Scheme::simplified;
      cfg.alpha = 1.0;
      cfg.penaliser = PenaliserKind::quadratic;
      EnergySettings rough(1.0, Penaliser::quadratic(), ScalarField(24, 24, 1.0), k);
      Rng rng(5);
      const ScalarField z0 = random_positive_field(rng, 24, 24, 0.5, 2.0);
      CHECK_THROWS_AS(run_level(z0, img, rough, cfg, 0, nullptr), DivergenceError);
    }
  }

  TEST_CASE("initialisation from the data term") {
    SUBCASE("inverse square law on the axis") {
      const CameraIntrinsics k(1.0, 0.01, 0.01, 4, 4);
      ScalarField img(9, 9, 0.25);
      const ScalarField z = initialise(img, k);
      CHECK(z.at(4, 4) == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("hand value off axis") {
      // pick intrinsics so Q = 0.8 at pixel (0,0): x = 0.75, f = 1
      const CameraIntrinsics k(1.0, 0.75, 0.75, 1, 0);
      ScalarField img(2, 1, 1.0);
      const ScalarField z = initialise(img, k);
      CHECK(z.at(0, 0) == doctest::Approx(std::sqrt(0.512)).epsilon(1e-13));
    }
    SUBCASE("exact recovery of a fronto-parallel plane") {
      const CameraIntrinsics k(1.0, 1.0 / 200, 1.0 / 200, 16, 16);
      const ScalarField z_gt = generate_scene(SceneSpec::plane(2.0), k, 32, 32);
      const ScalarField z = initialise(shade(z_gt, k), k);
      CHECK(max_abs_diff(z, z_gt) <= 1e-12);
    }
    SUBCASE("rejects non-positive irradiance") {
      const CameraIntrinsics k(1.0, 0.01, 0.01, 4, 4);
      CHECK_THROWS_AS(initialise(ScalarField(8, 8, 0.0), k), InvalidArgument);
    }
  }

  TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    SolverConfig bad = cfg;
    bad.eta = 0.5;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = cfg;
    bad.eta = 1.0;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = cfg;
    bad.tau = 0.0;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = cfg;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad = cfg;
    bad.init = InitialGuess::constant(0.0);
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
  }

  TEST_CASE("coarse-to-fine reconstruction of a plane") {
    const CameraIntrinsics k(1.0, 1.0 / 200, 1.0 / 200, 16, 16);
    const ScalarField z_gt = generate_scene(SceneSpec::plane(2.0), k, 32, 32);
    const ScalarField img = shade(z_gt, k);

    SolverConfig cfg;
    cfg.alpha = 1e-6;
    cfg.tau = 1e-2;
    cfg.iterations = 200;
    const ReconstructionResult rec = reconstruct(img, k, cfg);

    CHECK(rec.levels >= 5);
    CHECK(relative_surface_error(rec.depth, z_gt, k) < 1e-3);
    CHECK(all_positive(rec.depth));
    CHECK(rec.reprojection.same_size(img));
    CHECK(!rec.trace.empty());

    SUBCASE("level-0 settings are the caller's") {
      // the finest level of the trace is level 0 and appears last
      CHECK(rec.trace.back().level == 0);
    }
  }

  TEST_CASE("reconstruct validates inputs") {
    const CameraIntrinsics k(1.0, 0.01, 0.01, 8, 8);
    SolverConfig cfg;
    cfg.iterations = 1;
    SUBCASE("image must be positive") {
      CHECK_THROWS_AS(reconstruct(ScalarField(16, 16, 0.0), k, cfg), InvalidArgument);
    }
    SUBCASE("confidence dimensions must match") {
      CHECK_THROWS_AS(
          reconstruct(ScalarField(16, 16, 0.5), k, ScalarField(8, 8, 1.0), cfg),
          InvalidArgument);
    }
  }
}
