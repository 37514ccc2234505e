#pragma once

// Shared pixel-level pieces of the discrete energy and its gradient.

#include <cmath>
#include <string>

#include "energy.hpp"
#include "errors.hpp"

namespace psfs::detail {

inline void check_energy_inputs(const ScalarField& z, const ScalarField& img,
                                const EnergySettings& s, const char* who) {
  if (!z.same_size(img)) throw InvalidArgument(std::string(who) + ": image/depth size mismatch");
  if (!z.same_size(s.confidence))
    throw InvalidArgument(std::string(who) + ": confidence size mismatch");
  if (s.alpha < 0.0) throw InvalidArgument(std::string(who) + ": alpha must be non-negative");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z.data()[i] > 0.0))
      throw InvalidArgument(std::string(who) + ": depth must be positive everywhere");
    const double c = s.confidence.data()[i];
    if (!(c >= 0.0 && c <= 1.0))
      throw InvalidArgument(std::string(who) + ": confidence must lie in [0,1]");
  }
}

// dm = z_i - z_{i-1}, dp = z_{i+1} - z_i (grid spacing cancels in the
// comparisons). Ties on a positive maximum go to the backward difference;
// a zero maximum contributes nothing.
inline UpwindDir upwind_dir(bool has_m, double dm, bool has_p, double dp) {
  if (has_m && has_p) {
    if (dm <= 0.0 && dp >= 0.0) return UpwindDir::none;
    return (dm >= -dp) ? UpwindDir::backward : UpwindDir::forward;
  }
  if (has_m) return dm > 0.0 ? UpwindDir::backward : UpwindDir::none;
  if (has_p) return dp < 0.0 ? UpwindDir::forward : UpwindDir::none;
  return UpwindDir::none;
}

inline double apply_dir_x(const ScalarField& z, int a, int b, UpwindDir d, double inv_hx) {
  switch (d) {
    case UpwindDir::backward:
      return (z.at(a, b) - z.at(a - 1, b)) * inv_hx;
    case UpwindDir::forward:
      return (z.at(a + 1, b) - z.at(a, b)) * inv_hx;
    default:
      return 0.0;
  }
}

inline double apply_dir_y(const ScalarField& z, int a, int b, UpwindDir d, double inv_hy) {
  switch (d) {
    case UpwindDir::backward:
      return (z.at(a, b) - z.at(a, b - 1)) * inv_hy;
    case UpwindDir::forward:
      return (z.at(a, b + 1) - z.at(a, b)) * inv_hy;
    default:
      return 0.0;
  }
}

// Central second differences with reflected (clamped-index) ghost values.
struct HessianSample {
  double xx, xy, yy;
};

inline HessianSample hessian_at(const ScalarField& z, int a, int b, double inv_hx2,
                                double inv_hy2, double inv_4hxhy) {
  const int w = z.width(), h = z.height();
  const int am = a > 0 ? a - 1 : 0;
  const int ap = a < w - 1 ? a + 1 : w - 1;
  const int bm = b > 0 ? b - 1 : 0;
  const int bp = b < h - 1 ? b + 1 : h - 1;
  HessianSample s;
  s.xx = (z.at(ap, b) - 2.0 * z.at(a, b) + z.at(am, b)) * inv_hx2;
  s.yy = (z.at(a, bp) - 2.0 * z.at(a, b) + z.at(a, bm)) * inv_hy2;
  s.xy = (z.at(ap, bp) - z.at(ap, bm) - z.at(am, bp) + z.at(am, bm)) * inv_4hxhy;
  return s;
}

// Brightness model and residual pieces at one pixel.
struct DataSample {
  double model;  // Q^3/(z W)
  double r;      // I - model
  double v;      // (grad z . x) + z
  double inv_w2;
};

inline DataSample data_sample(double q3, double z, double zx, double zy, double x, double y,
                              double f2, double i_val) {
  DataSample s;
  s.v = zx * x + zy * y + z;
  const double w2 = f2 * (zx * zx + zy * zy) + s.v * s.v;
  s.inv_w2 = 1.0 / w2;
  s.model = q3 / (z * std::sqrt(w2));
  s.r = i_val - s.model;
  return s;
}

}  // namespace psfs::detail
