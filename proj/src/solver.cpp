#include "solver.hpp"

#include <algorithm>
#include <cmath>

#include "energy_detail.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "scene.hpp"

namespace psfs {

void validate(const SolverConfig& cfg) {
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha))
    throw InvalidArgument("SolverConfig: alpha must be non-negative");
  if (!(cfg.tau > 0.0)) throw InvalidArgument("SolverConfig: tau must be positive");
  if (cfg.iterations < 0) throw InvalidArgument("SolverConfig: iterations must be non-negative");
  if (!(cfg.eta > 0.5 && cfg.eta < 1.0))
    throw InvalidArgument("SolverConfig: eta must lie in (0.5, 1)");
  if (!(cfg.lambda > 0.0)) throw InvalidArgument("SolverConfig: lambda must be positive");
  if (cfg.min_level_size < 5)
    throw InvalidArgument("SolverConfig: min_level_size must be at least 5");
  if (cfg.init.kind == InitialGuess::Kind::constant && !(cfg.init.depth > 0.0))
    throw InvalidArgument("SolverConfig: constant initial depth must be positive");
}

double scaled_alpha(double alpha, double eta, int level) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("scaled_alpha: eta must lie in (0,1)");
  if (level < 0) throw InvalidArgument("scaled_alpha: level must be non-negative");
  return alpha / std::pow(eta, 4.0 * level);
}

namespace {

// Exact gradient (per unit cell area) of the frozen-direction discrete
// energy. Sources scatter into a 3x3 neighbourhood at most, so each thread
// owns a strip of target rows and walks the sources of [r0-1, r1+1); the
// per-target accumulation order is then the same for any strip partition.
void el_gradient_into(ScalarField& grad, const ScalarField& z, const ScalarField& img,
                      const EnergySettings& s, const UpwindPlan& plan, bool with_flux,
                      const PixelGeometry* geom) {
  detail::check_energy_inputs(z, img, s, "el_gradient");
  if (plan.width != z.width() || plan.height != z.height())
    throw InvalidArgument("el_gradient: plan size mismatch");

  PixelGeometry local;
  if (geom == nullptr) {
    local = make_pixel_geometry(z.width(), z.height(), s.intrinsics);
    geom = &local;
  }
  if (!grad.same_size(z)) grad = ScalarField(z.width(), z.height());

  const int w = z.width(), h = z.height();
  const double hx = s.intrinsics.hx, hy = s.intrinsics.hy;
  const double inv_hx = 1.0 / hx, inv_hy = 1.0 / hy;
  const double inv_hx2 = inv_hx * inv_hx, inv_hy2 = inv_hy * inv_hy;
  const double inv_4hxhy = 0.25 * inv_hx * inv_hy;
  const double f2 = s.intrinsics.focal * s.intrinsics.focal;
  const double alpha = s.alpha;
  const Penaliser pen = s.penaliser;

  parallel_rows(h, [&](int r0, int r1) {
    for (int b = r0; b < r1; ++b)
      for (int a = 0; a < w; ++a) grad.at(a, b) = 0.0;

    const auto dep = [&](int aa, int bb, double v) {
      if (bb >= r0 && bb < r1) grad.at(aa, bb) += v;
    };

    const int src_begin = std::max(0, r0 - 1);
    const int src_end = std::min(h, r1 + 1);
    for (int b = src_begin; b < src_end; ++b) {
      for (int a = 0; a < w; ++a) {
        const std::size_t i = static_cast<std::size_t>(b) * w + a;

        const double c = s.confidence.data()[i];
        if (c > 0.0) {
          const UpwindDir dx = plan.dx[i];
          const UpwindDir dy = plan.dy[i];
          const double zx = detail::apply_dir_x(z, a, b, dx, inv_hx);
          const double zy = detail::apply_dir_y(z, a, b, dy, inv_hy);
          const detail::DataSample d = detail::data_sample(geom->q3[i], z.data()[i], zx, zy,
                                                           geom->x[a], geom->y[b], f2,
                                                           img.data()[i]);
          const double common = c * 2.0 * d.r * d.model;
          dep(a, b, common * (1.0 / z.data()[i] + d.v * d.inv_w2));

          if (with_flux) {
            if (dx != UpwindDir::none) {
              const double gx = common * (f2 * zx + d.v * geom->x[a]) * d.inv_w2 * inv_hx;
              if (dx == UpwindDir::backward) {
                dep(a, b, gx);
                dep(a - 1, b, -gx);
              } else {
                dep(a + 1, b, gx);
                dep(a, b, -gx);
              }
            }
            if (dy != UpwindDir::none) {
              const double gy = common * (f2 * zy + d.v * geom->y[b]) * d.inv_w2 * inv_hy;
              if (dy == UpwindDir::backward) {
                dep(a, b, gy);
                dep(a, b - 1, -gy);
              } else {
                dep(a, b + 1, gy);
                dep(a, b, -gy);
              }
            }
          }
        }

        if (alpha > 0.0) {
          const detail::HessianSample hs = detail::hessian_at(z, a, b, inv_hx2, inv_hy2,
                                                              inv_4hxhy);
          const double frob = hs.xx * hs.xx + 2.0 * hs.xy * hs.xy + hs.yy * hs.yy;
          const double psi_d = penalise(frob, pen).derivative;
          const int am = a > 0 ? a - 1 : 0;
          const int ap = a < w - 1 ? a + 1 : w - 1;
          const int bm = b > 0 ? b - 1 : 0;
          const int bp = b < h - 1 ? b + 1 : h - 1;

          const double cxx = alpha * psi_d * 2.0 * hs.xx * inv_hx2;
          dep(ap, b, cxx);
          dep(a, b, -2.0 * cxx);
          dep(am, b, cxx);

          const double cyy = alpha * psi_d * 2.0 * hs.yy * inv_hy2;
          dep(a, bp, cyy);
          dep(a, b, -2.0 * cyy);
          dep(a, bm, cyy);

          const double cxy = alpha * psi_d * 4.0 * hs.xy * inv_4hxhy;
          dep(ap, bp, cxy);
          dep(ap, bm, -cxy);
          dep(am, bp, -cxy);
          dep(am, bm, cxy);
        }
      }
    }
  });
}

Penaliser penaliser_of(const SolverConfig& cfg) {
  return cfg.penaliser == PenaliserKind::quadratic ? Penaliser::quadratic()
                                                   : Penaliser::charbonnier(cfg.lambda);
}

}  // namespace

ScalarField el_gradient_full(const ScalarField& z, const ScalarField& img,
                             const EnergySettings& s) {
  return el_gradient_full(z, img, s, plan_upwind(z));
}

ScalarField el_gradient_full(const ScalarField& z, const ScalarField& img,
                             const EnergySettings& s, const UpwindPlan& plan) {
  ScalarField grad;
  el_gradient_into(grad, z, img, s, plan, true, nullptr);
  return grad;
}

ScalarField el_gradient_simplified(const ScalarField& z, const ScalarField& img,
                                   const EnergySettings& s) {
  return el_gradient_simplified(z, img, s, plan_upwind(z));
}

ScalarField el_gradient_simplified(const ScalarField& z, const ScalarField& img,
                                   const EnergySettings& s, const UpwindPlan& plan) {
  ScalarField grad;
  el_gradient_into(grad, z, img, s, plan, false, nullptr);
  return grad;
}

ScalarField explicit_step(const ScalarField& z, const ScalarField& gradient, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("explicit_step: tau must be positive");
  if (!z.same_size(gradient)) throw InvalidArgument("explicit_step: size mismatch");
  ScalarField out(z.width(), z.height());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = z.data()[i] - tau * gradient.data()[i];
    out.data()[i] = v < kDepthFloor ? kDepthFloor : v;
  }
  return out;
}

namespace {

struct Phase {
  long long iters;
  double tau;
  bool flux;
};

}  // namespace

ScalarField run_level(const ScalarField& z0, const ScalarField& img, const EnergySettings& s,
                      const SolverConfig& cfg, int level, std::vector<TraceSample>* trace) {
  validate(cfg);
  detail::check_energy_inputs(z0, img, s, "run_level");

  const int w = z0.width(), h = z0.height();
  const long long n = cfg.iterations;
  const double tau_full = cfg.tau * std::min(s.intrinsics.hx * s.intrinsics.hx,
                                             s.intrinsics.hy * s.intrinsics.hy);

  Phase phases[2];
  int phase_count = 0;
  switch (cfg.scheme) {
    case Scheme::simplified:
      phases[phase_count++] = {n, cfg.tau, false};
      break;
    case Scheme::full:
      phases[phase_count++] = {n, tau_full, true};
      break;
    case Scheme::alternating:
      phases[phase_count++] = {n / 2, cfg.tau, false};
      phases[phase_count++] = {n - n / 2, tau_full, true};
      break;
  }

  const PixelGeometry geom = make_pixel_geometry(w, h, s.intrinsics);
  ScalarField z = z0;
  ScalarField grad(w, h);
  UpwindPlan plan;
  std::vector<char> row_bad(h, 0);

  const long long stride = std::max<long long>(1, n / 100);
  const auto record = [&](long long iteration) {
    if (trace == nullptr) return;
    trace->push_back({level, iteration, total_energy(z, img, s, plan_upwind(z), &geom)});
  };
  record(0);

  long long iteration = 0;
  for (int p = 0; p < phase_count; ++p) {
    const Phase& phase = phases[p];
    for (long long i = 0; i < phase.iters; ++i) {
      plan_upwind(z, plan);
      el_gradient_into(grad, z, img, s, plan, phase.flux, &geom);

      std::fill(row_bad.begin(), row_bad.end(), 0);
      parallel_rows(h, [&](int r0, int r1) {
        for (int b = r0; b < r1; ++b) {
          for (int a = 0; a < w; ++a) {
            double v = z.at(a, b) - phase.tau * grad.at(a, b);
            if (v < kDepthFloor) v = kDepthFloor;
            if (!std::isfinite(v)) row_bad[b] = 1;
            z.at(a, b) = v;
          }
        }
      });
      ++iteration;
      for (int b = 0; b < h; ++b)
        if (row_bad[b])
          throw DivergenceError("run_level: non-finite depth value", level, iteration);
      if (iteration % stride == 0 || iteration == n) record(iteration);
    }
  }
  return z;
}

ScalarField initialise(const ScalarField& img, const CameraIntrinsics& k) {
  if (img.empty()) throw InvalidArgument("initialise: empty image");
  const PixelGeometry geom = make_pixel_geometry(img.width(), img.height(), k);
  ScalarField z(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double value = img.data()[i];
    if (!(value > 0.0)) throw InvalidArgument("initialise: irradiance must be positive");
    z.data()[i] = std::sqrt(geom.q3[i] / value);
  }
  return z;
}

ReconstructionResult reconstruct(const ScalarField& img, const CameraIntrinsics& k,
                                 const ScalarField& confidence, const SolverConfig& cfg) {
  validate(cfg);
  if (img.empty()) throw InvalidArgument("reconstruct: empty image");
  if (!all_positive(img))
    throw InvalidArgument("reconstruct: image must be positive everywhere (floor dark pixels)");
  if (!confidence.same_size(img))
    throw InvalidArgument("reconstruct: confidence size mismatch");

  std::vector<ScalarField> images{img};
  std::vector<ScalarField> confs{confidence};
  while (true) {
    const ScalarField& cur = images.back();
    const int nw = static_cast<int>(std::lround(cur.width() * cfg.eta));
    const int nh = static_cast<int>(std::lround(cur.height() * cfg.eta));
    if (std::min(nw, nh) < cfg.min_level_size) break;
    if (nw >= cur.width() || nh >= cur.height()) break;
    images.push_back(downsample(cur, cfg.eta));
    confs.push_back(downsample(confs.back(), cfg.eta));
  }
  const int levels = static_cast<int>(images.size());

  ScalarField z;
  {
    const CameraIntrinsics coarse = scale_intrinsics(k, levels - 1, cfg.eta);
    const ScalarField& base = images.back();
    z = cfg.init.kind == InitialGuess::Kind::constant
            ? ScalarField(base.width(), base.height(), cfg.init.depth)
            : initialise(base, coarse);
  }

  ReconstructionResult result;
  for (int level = levels - 1; level >= 0; --level) {
    const CameraIntrinsics kl = scale_intrinsics(k, level, cfg.eta);
    EnergySettings settings(scaled_alpha(cfg.alpha, cfg.eta, level), penaliser_of(cfg),
                            confs[level], kl);
    z = run_level(z, images[level], settings, cfg, level, &result.trace);
    if (level > 0) z = upsample(z, images[level - 1].width(), images[level - 1].height());
  }

  result.depth = std::move(z);
  result.reprojection = shade(result.depth, k);
  result.levels = levels;
  return result;
}

ReconstructionResult reconstruct(const ScalarField& img, const CameraIntrinsics& k,
                                 const SolverConfig& cfg) {
  return reconstruct(img, k, ScalarField(img.width(), img.height(), 1.0), cfg);
}

}  // namespace psfs
