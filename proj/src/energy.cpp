#include "energy.hpp"

#include <cmath>

#include "energy_detail.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace psfs {

PenaltyEval penalise(double s_sq, const Penaliser& p) {
  if (s_sq < 0.0) throw InvalidArgument("penalise: squared argument must be non-negative");
  if (p.kind == PenaliserKind::quadratic) return {s_sq, 1.0};
  if (!(p.lambda > 0.0)) throw InvalidArgument("penalise: charbonnier lambda must be positive");
  const double root = std::sqrt(1.0 + s_sq / (p.lambda * p.lambda));
  return {2.0 * p.lambda * p.lambda * root, 1.0 / root};
}

double data_residual(const Vec2& x, double z, const Vec2& grad_z, double i_val, double focal) {
  if (!(z > 0.0)) throw InvalidArgument("data_residual: depth must be positive");
  if (!(focal > 0.0)) throw InvalidArgument("data_residual: focal length must be positive");
  const double v = grad_z.x * x.x + grad_z.y * x.y + z;
  const double w2 = focal * focal * (grad_z.x * grad_z.x + grad_z.y * grad_z.y) + v * v;
  if (!(w2 > 0.0)) throw InvalidArgument("data_residual: degenerate normal magnitude W = 0");
  const double q = conversion_factor(x, focal);
  const double r = i_val - q * q * q / (z * std::sqrt(w2));
  return r * r;
}

double smoothness_density(double z_xx, double z_xy, double z_yy, const Penaliser& p) {
  return penalise(z_xx * z_xx + 2.0 * z_xy * z_xy + z_yy * z_yy, p).value;
}

void plan_upwind(const ScalarField& z, UpwindPlan& plan) {
  const int w = z.width(), h = z.height();
  plan.width = w;
  plan.height = h;
  plan.dx.resize(z.size());
  plan.dy.resize(z.size());
  parallel_rows(h, [&](int r0, int r1) {
    for (int b = r0; b < r1; ++b) {
      for (int a = 0; a < w; ++a) {
        const std::size_t i = static_cast<std::size_t>(b) * w + a;
        const double dmx = a > 0 ? z.at(a, b) - z.at(a - 1, b) : 0.0;
        const double dpx = a < w - 1 ? z.at(a + 1, b) - z.at(a, b) : 0.0;
        plan.dx[i] = detail::upwind_dir(a > 0, dmx, a < w - 1, dpx);
        const double dmy = b > 0 ? z.at(a, b) - z.at(a, b - 1) : 0.0;
        const double dpy = b < h - 1 ? z.at(a, b + 1) - z.at(a, b) : 0.0;
        plan.dy[i] = detail::upwind_dir(b > 0, dmy, b < h - 1, dpy);
      }
    }
  });
}

UpwindPlan plan_upwind(const ScalarField& z) {
  UpwindPlan plan;
  plan_upwind(z, plan);
  return plan;
}

Vec2 upwind_gradient(const ScalarField& z, int col, int row, double hx, double hy) {
  if (col < 0 || col >= z.width() || row < 0 || row >= z.height())
    throw InvalidArgument("upwind_gradient: pixel outside the grid");
  if (!(hx > 0.0) || !(hy > 0.0))
    throw InvalidArgument("upwind_gradient: grid spacing must be positive");
  const int w = z.width(), h = z.height();
  const double dmx = col > 0 ? z.at(col, row) - z.at(col - 1, row) : 0.0;
  const double dpx = col < w - 1 ? z.at(col + 1, row) - z.at(col, row) : 0.0;
  const UpwindDir dx = detail::upwind_dir(col > 0, dmx, col < w - 1, dpx);
  const double dmy = row > 0 ? z.at(col, row) - z.at(col, row - 1) : 0.0;
  const double dpy = row < h - 1 ? z.at(col, row + 1) - z.at(col, row) : 0.0;
  const UpwindDir dy = detail::upwind_dir(row > 0, dmy, row < h - 1, dpy);
  return {detail::apply_dir_x(z, col, row, dx, 1.0 / hx),
          detail::apply_dir_y(z, col, row, dy, 1.0 / hy)};
}

PixelGeometry make_pixel_geometry(int width, int height, const CameraIntrinsics& k) {
  PixelGeometry g;
  g.width = width;
  g.height = height;
  g.x.resize(width);
  g.y.resize(height);
  g.q3.resize(static_cast<std::size_t>(width) * height);
  for (int a = 0; a < width; ++a) g.x[a] = k.hx * a - k.hx * k.cx;
  for (int b = 0; b < height; ++b) g.y[b] = k.hy * b - k.hy * k.cy;
  const double f2 = k.focal * k.focal;
  for (int b = 0; b < height; ++b) {
    for (int a = 0; a < width; ++a) {
      const double q = k.focal / std::sqrt(g.x[a] * g.x[a] + g.y[b] * g.y[b] + f2);
      g.q3[static_cast<std::size_t>(b) * width + a] = q * q * q;
    }
  }
  return g;
}

double total_energy(const ScalarField& z, const ScalarField& img, const EnergySettings& s) {
  return total_energy(z, img, s, plan_upwind(z), nullptr);
}

double total_energy(const ScalarField& z, const ScalarField& img, const EnergySettings& s,
                    const UpwindPlan& plan, const PixelGeometry* geom) {
  detail::check_energy_inputs(z, img, s, "total_energy");
  if (plan.width != z.width() || plan.height != z.height())
    throw InvalidArgument("total_energy: plan size mismatch");

  PixelGeometry local;
  if (geom == nullptr) {
    local = make_pixel_geometry(z.width(), z.height(), s.intrinsics);
    geom = &local;
  }

  const int w = z.width(), h = z.height();
  const double hx = s.intrinsics.hx, hy = s.intrinsics.hy;
  const double inv_hx = 1.0 / hx, inv_hy = 1.0 / hy;
  const double inv_hx2 = inv_hx * inv_hx, inv_hy2 = inv_hy * inv_hy;
  const double inv_4hxhy = 0.25 * inv_hx * inv_hy;
  const double f2 = s.intrinsics.focal * s.intrinsics.focal;

  // Row partials summed in fixed order keep the result independent of the
  // thread partition.
  std::vector<double> row_sum(h, 0.0);
  parallel_rows(h, [&](int r0, int r1) {
    for (int b = r0; b < r1; ++b) {
      double acc = 0.0;
      for (int a = 0; a < w; ++a) {
        const std::size_t i = static_cast<std::size_t>(b) * w + a;
        const double c = s.confidence.data()[i];
        if (c > 0.0) {
          const double zx = detail::apply_dir_x(z, a, b, plan.dx[i], inv_hx);
          const double zy = detail::apply_dir_y(z, a, b, plan.dy[i], inv_hy);
          const detail::DataSample d = detail::data_sample(geom->q3[i], z.data()[i], zx, zy,
                                                           geom->x[a], geom->y[b], f2,
                                                           img.data()[i]);
          acc += c * d.r * d.r;
        }
        const detail::HessianSample hess = detail::hessian_at(z, a, b, inv_hx2, inv_hy2,
                                                              inv_4hxhy);
        const double frob = hess.xx * hess.xx + 2.0 * hess.xy * hess.xy + hess.yy * hess.yy;
        acc += s.alpha * penalise(frob, s.penaliser).value;
      }
      row_sum[b] = acc;
    }
  });

  double total = 0.0;
  for (int b = 0; b < h; ++b) total += row_sum[b];
  total *= hx * hy;
  if (!std::isfinite(total)) throw DivergenceError("total_energy: non-finite energy", -1, -1);
  return total;
}

}  // namespace psfs
