#include "field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace psfs {

ScalarField::ScalarField(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw InvalidArgument("ScalarField: dimensions must be at least 1x1");
  if (!std::isfinite(fill)) throw InvalidArgument("ScalarField: fill value must be finite");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

double min_value(const ScalarField& f) {
  if (f.empty()) throw InvalidArgument("min_value: empty field");
  return *std::min_element(f.data(), f.data() + f.size());
}

double max_value(const ScalarField& f) {
  if (f.empty()) throw InvalidArgument("max_value: empty field");
  return *std::max_element(f.data(), f.data() + f.size());
}

bool all_finite(const ScalarField& f) {
  const double* p = f.data();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

bool all_positive(const ScalarField& f) {
  const double* p = f.data();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!(p[i] > 0.0)) return false;
  return true;
}

CameraIntrinsics::CameraIntrinsics(double focal, double hx, double hy, double cx, double cy)
    : focal(focal), hx(hx), hy(hy), cx(cx), cy(cy) {
  if (!(focal > 0.0)) throw InvalidArgument("CameraIntrinsics: focal length must be positive");
  if (!(hx > 0.0) || !(hy > 0.0))
    throw InvalidArgument("CameraIntrinsics: grid spacing must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy))
    throw InvalidArgument("CameraIntrinsics: principal point must be finite");
}

Vec2 pixel_to_image(double a, double b, const CameraIntrinsics& k) {
  return {k.hx * a - k.hx * k.cx, k.hy * b - k.hy * k.cy};
}

Vec2 image_to_pixel(double x, double y, const CameraIntrinsics& k) {
  return {x / k.hx + k.cx, y / k.hy + k.cy};
}

CameraIntrinsics scale_intrinsics(const CameraIntrinsics& k, int level, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("scale_intrinsics: eta must lie in (0,1)");
  if (level < 0) throw InvalidArgument("scale_intrinsics: level must be non-negative");
  const double shrink = std::pow(eta, level);
  return CameraIntrinsics(k.focal, k.hx / shrink, k.hy / shrink, k.cx * shrink, k.cy * shrink);
}

namespace {

// Normalised overlap weights of output cell j against the input cells it
// covers; one output cell spans `scale` input cells.
struct AxisWeights {
  std::vector<int> first;            // first covered input index per output index
  std::vector<std::vector<double>> w;
};

AxisWeights area_weights(int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  AxisWeights aw;
  aw.first.resize(out_size);
  aw.w.resize(out_size);
  for (int j = 0; j < out_size; ++j) {
    const double lo = j * scale;
    const double hi = (j + 1) * scale;
    int i0 = static_cast<int>(std::floor(lo));
    int i1 = static_cast<int>(std::ceil(hi));
    i0 = std::clamp(i0, 0, in_size - 1);
    i1 = std::clamp(i1, i0 + 1, in_size);
    aw.first[j] = i0;
    double total = 0.0;
    std::vector<double> weights;
    weights.reserve(i1 - i0);
    for (int i = i0; i < i1; ++i) {
      const double overlap = std::min<double>(i + 1, hi) - std::max<double>(i, lo);
      weights.push_back(std::max(overlap, 0.0));
      total += weights.back();
    }
    for (double& v : weights) v /= total;
    aw.w[j] = std::move(weights);
  }
  return aw;
}

}  // namespace

ScalarField downsample(const ScalarField& f, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("downsample: eta must lie in (0,1)");
  const int out_w = static_cast<int>(std::lround(f.width() * eta));
  const int out_h = static_cast<int>(std::lround(f.height() * eta));
  if (out_w < 1 || out_h < 1)
    throw InvalidArgument("downsample: output dimensions would fall below 1");

  const AxisWeights wx = area_weights(f.width(), out_w);
  const AxisWeights wy = area_weights(f.height(), out_h);

  ScalarField out(out_w, out_h);
  for (int jy = 0; jy < out_h; ++jy) {
    for (int jx = 0; jx < out_w; ++jx) {
      double acc = 0.0;
      for (std::size_t ky = 0; ky < wy.w[jy].size(); ++ky) {
        const int row = wy.first[jy] + static_cast<int>(ky);
        double row_acc = 0.0;
        for (std::size_t kx = 0; kx < wx.w[jx].size(); ++kx)
          row_acc += wx.w[jx][kx] * f.at(wx.first[jx] + static_cast<int>(kx), row);
        acc += wy.w[jy][ky] * row_acc;
      }
      out.at(jx, jy) = acc;
    }
  }
  return out;
}

ScalarField upsample(const ScalarField& f, int new_width, int new_height) {
  if (f.empty()) throw InvalidArgument("upsample: empty field");
  if (new_width < f.width() || new_height < f.height())
    throw InvalidArgument("upsample: shrinking is not supported");

  const double sx = static_cast<double>(f.width()) / new_width;
  const double sy = static_cast<double>(f.height()) / new_height;

  ScalarField out(new_width, new_height);
  for (int jy = 0; jy < new_height; ++jy) {
    double src_y = (jy + 0.5) * sy - 0.5;
    src_y = std::clamp(src_y, 0.0, static_cast<double>(f.height() - 1));
    const int y0 = static_cast<int>(std::floor(src_y));
    const int y1 = std::min(y0 + 1, f.height() - 1);
    const double ty = src_y - y0;
    for (int jx = 0; jx < new_width; ++jx) {
      double src_x = (jx + 0.5) * sx - 0.5;
      src_x = std::clamp(src_x, 0.0, static_cast<double>(f.width() - 1));
      const int x0 = static_cast<int>(std::floor(src_x));
      const int x1 = std::min(x0 + 1, f.width() - 1);
      const double tx = src_x - x0;
      const double top = (1.0 - tx) * f.at(x0, y0) + tx * f.at(x1, y0);
      const double bot = (1.0 - tx) * f.at(x0, y1) + tx * f.at(x1, y1);
      out.at(jx, jy) = (1.0 - ty) * top + ty * bot;
    }
  }
  return out;
}

}  // namespace psfs
