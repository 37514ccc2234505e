#include "scene.hpp"

#include <cmath>

#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"

namespace psfs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double r) {
  if (r < 1e-6) return 1.0 - r * r / 6.0;
  return std::sin(r) / r;
}

// (r cos r - sin r) / r^3, the radial factor of the sombrero slope.
double sombrero_slope_factor(double r) {
  if (r < 1e-4) return -1.0 / 3.0 + r * r / 30.0;
  return (r * std::cos(r) - std::sin(r)) / (r * r * r);
}

double sombrero_depth(double x, double y) {
  const double r = 10.0 * std::sqrt(x * x + y * y);
  return 0.5 * sinc(r) + 1.7;
}

void check_scene(const SceneSpec& spec) {
  switch (spec.kind) {
    case SceneKind::sombrero:
      return;  // depth stays within [1.2, 2.2] by the sinc bound
    case SceneKind::plane:
      if (!(spec.plane_depth > 0.0))
        throw InvalidArgument("generate_scene: plane depth must be positive");
      return;
    case SceneKind::hemisphere:
      if (!(spec.radius > 0.0))
        throw InvalidArgument("generate_scene: hemisphere radius must be positive");
      if (!(spec.centre_depth > spec.radius))
        throw InvalidArgument("generate_scene: hemisphere would reach non-positive depth");
      return;
  }
  throw InvalidArgument("generate_scene: unknown scene kind");
}

}  // namespace

ScalarField generate_scene(const SceneSpec& spec, const CameraIntrinsics& k, int width,
                           int height) {
  if (width < 8 || height < 8) throw InvalidArgument("generate_scene: size must be >= 8x8");
  check_scene(spec);

  ScalarField depth(width, height);
  for (int b = 0; b < height; ++b) {
    for (int a = 0; a < width; ++a) {
      const Vec2 x = pixel_to_image(a, b, k);
      double z = 0.0;
      switch (spec.kind) {
        case SceneKind::sombrero:
          z = sombrero_depth(x.x, x.y);
          break;
        case SceneKind::plane:
          z = spec.plane_depth;
          break;
        case SceneKind::hemisphere: {
          const double rho2 = x.x * x.x + x.y * x.y;
          const double cap = spec.radius * spec.radius - rho2;
          z = spec.centre_depth - (cap > 0.0 ? std::sqrt(cap) : 0.0);
          break;
        }
      }
      depth.at(a, b) = z;
    }
  }
  if (!all_positive(depth)) throw InvalidArgument("generate_scene: non-positive depth");
  return depth;
}

void scene_gradient(const SceneSpec& spec, const CameraIntrinsics& k, int width, int height,
                    ScalarField& grad_x, ScalarField& grad_y) {
  if (width < 8 || height < 8) throw InvalidArgument("scene_gradient: size must be >= 8x8");
  check_scene(spec);

  grad_x = ScalarField(width, height);
  grad_y = ScalarField(width, height);
  for (int b = 0; b < height; ++b) {
    for (int a = 0; a < width; ++a) {
      const Vec2 x = pixel_to_image(a, b, k);
      double gx = 0.0, gy = 0.0;
      switch (spec.kind) {
        case SceneKind::sombrero: {
          const double r = 10.0 * std::sqrt(x.x * x.x + x.y * x.y);
          const double s = 50.0 * sombrero_slope_factor(r);
          gx = s * x.x;
          gy = s * x.y;
          break;
        }
        case SceneKind::plane:
          break;
        case SceneKind::hemisphere: {
          const double cap = spec.radius * spec.radius - (x.x * x.x + x.y * x.y);
          if (cap > 0.0) {
            const double inv = 1.0 / std::sqrt(cap);
            gx = x.x * inv;
            gy = x.y * inv;
          }
          break;
        }
      }
      grad_x.at(a, b) = gx;
      grad_y.at(a, b) = gy;
    }
  }
}

ScalarField shade_with_gradient(const ScalarField& depth, const ScalarField& grad_x,
                                const ScalarField& grad_y, const CameraIntrinsics& k) {
  if (!depth.same_size(grad_x) || !depth.same_size(grad_y))
    throw InvalidArgument("shade: gradient dimensions do not match the depth");
  if (!all_positive(depth)) throw InvalidArgument("shade: depth must be positive everywhere");

  const double f = k.focal;
  const double f2 = f * f;
  ScalarField img(depth.width(), depth.height());
  for (int b = 0; b < depth.height(); ++b) {
    for (int a = 0; a < depth.width(); ++a) {
      const Vec2 x = pixel_to_image(a, b, k);
      const double q = conversion_factor(x, f);
      const double z = depth.at(a, b);
      const double zx = grad_x.at(a, b);
      const double zy = grad_y.at(a, b);
      const double v = zx * x.x + zy * x.y + z;
      const double w = std::sqrt(f2 * (zx * zx + zy * zy) + v * v);
      const double value = q * q * q / (z * w);
      if (!std::isfinite(value) || !(value > 0.0))
        throw DivergenceError("shade: non-finite or non-positive irradiance", -1, -1);
      img.at(a, b) = value;
    }
  }
  return img;
}

ScalarField shade(const ScalarField& depth, const CameraIntrinsics& k) {
  const int w = depth.width(), h = depth.height();
  ScalarField gx(w, h), gy(w, h);
  for (int b = 0; b < h; ++b) {
    for (int a = 0; a < w; ++a) {
      if (w == 1)
        gx.at(a, b) = 0.0;
      else if (a == 0)
        gx.at(a, b) = (depth.at(1, b) - depth.at(0, b)) / k.hx;
      else if (a == w - 1)
        gx.at(a, b) = (depth.at(w - 1, b) - depth.at(w - 2, b)) / k.hx;
      else
        gx.at(a, b) = (depth.at(a + 1, b) - depth.at(a - 1, b)) / (2.0 * k.hx);

      if (h == 1)
        gy.at(a, b) = 0.0;
      else if (b == 0)
        gy.at(a, b) = (depth.at(a, 1) - depth.at(a, 0)) / k.hy;
      else if (b == h - 1)
        gy.at(a, b) = (depth.at(a, h - 1) - depth.at(a, h - 2)) / k.hy;
      else
        gy.at(a, b) = (depth.at(a, b + 1) - depth.at(a, b - 1)) / (2.0 * k.hy);
    }
  }
  return shade_with_gradient(depth, gx, gy, k);
}

Quantised quantise_8bit(const ScalarField& irradiance) {
  if (irradiance.empty()) throw InvalidArgument("quantise_8bit: empty field");
  const double mx = max_value(irradiance);
  if (!(mx > 0.0)) throw InvalidArgument("quantise_8bit: input has no positive values");
  if (min_value(irradiance) < 0.0) throw InvalidArgument("quantise_8bit: negative irradiance");
  const double scale = 255.0 / mx;
  return {quantise_with_scale(irradiance, scale), scale};
}

ScalarField quantise_with_scale(const ScalarField& irradiance, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("quantise_with_scale: scale must be positive");
  ScalarField levels(irradiance.width(), irradiance.height());
  for (std::size_t i = 0; i < irradiance.size(); ++i) {
    double v = std::round(irradiance.data()[i] * scale);
    levels.data()[i] = std::min(255.0, std::max(0.0, v));
  }
  return levels;
}

ScalarField dequantise(const ScalarField& levels, double scale, int floor_level) {
  if (!(scale > 0.0)) throw InvalidArgument("dequantise: scale must be positive");
  ScalarField out(levels.width(), levels.height());
  for (std::size_t i = 0; i < levels.size(); ++i)
    out.data()[i] = std::max(levels.data()[i], static_cast<double>(floor_level)) / scale;
  return out;
}

namespace {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t n) {
  std::uint64_t z = seed + (n + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// (0, 1]; never 0, so the Box-Muller log is safe.
double unit_open(std::uint64_t bits) { return ((bits >> 11) + 1) * 0x1.0p-53; }

void check_levels(const ScalarField& levels, const char* who) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double v = levels.data()[i];
    if (!(v >= 0.0 && v <= 255.0) || v != std::round(v))
      throw InvalidArgument(std::string(who) + ": input is not an 8-bit level field");
  }
}

}  // namespace

ScalarField gaussian_noise_field(int width, int height, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("gaussian_noise_field: sigma must be non-negative");
  ScalarField out(width, height);
  parallel_rows(height, [&](int r0, int r1) {
    for (int b = r0; b < r1; ++b) {
      for (int a = 0; a < width; ++a) {
        const std::uint64_t idx = static_cast<std::uint64_t>(b) * width + a;
        const double u1 = unit_open(splitmix64_at(seed, 2 * idx));
        const double u2 = unit_open(splitmix64_at(seed, 2 * idx + 1));
        out.at(a, b) = sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
      }
    }
  });
  return out;
}

ScalarField add_gaussian_noise(const ScalarField& levels, double sigma, std::uint64_t seed) {
  check_levels(levels, "add_gaussian_noise");
  if (sigma == 0.0) return levels;
  const ScalarField noise = gaussian_noise_field(levels.width(), levels.height(), sigma, seed);
  ScalarField out(levels.width(), levels.height());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double v = std::round(levels.data()[i] + noise.data()[i]);
    out.data()[i] = std::min(255.0, std::max(0.0, v));
  }
  return out;
}

}  // namespace psfs
