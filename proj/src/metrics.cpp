#include "metrics.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "geometry.hpp"

namespace psfs {

namespace {

// Per-pixel surface distances plus the ground-truth normalisation mass.
void surface_distances(const ScalarField& z, const ScalarField& z_gt, const CameraIntrinsics& k,
                       ScalarField& dist, double& gt_mass) {
  if (!z.same_size(z_gt)) throw InvalidArgument("surface error: dimension mismatch");
  if (!all_positive(z_gt)) throw InvalidArgument("surface error: ground truth must be positive");

  dist = ScalarField(z.width(), z.height());
  gt_mass = 0.0;
  for (int b = 0; b < z.height(); ++b) {
    for (int a = 0; a < z.width(); ++a) {
      const Vec2 x = pixel_to_image(a, b, k);
      const Vec3 s = surface_point(x, z.at(a, b), k.focal);
      const Vec3 s_gt = surface_point(x, z_gt.at(a, b), k.focal);
      const Vec3 d{s.x - s_gt.x, s.y - s_gt.y, s.z - s_gt.z};
      dist.at(a, b) = norm(d);
      gt_mass += norm(s_gt);
    }
  }
}

}  // namespace

double relative_surface_error(const ScalarField& z, const ScalarField& z_gt,
                              const CameraIntrinsics& k) {
  ScalarField dist;
  double gt_mass = 0.0;
  surface_distances(z, z_gt, k, dist, gt_mass);
  double num = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) num += dist.data()[i];
  return num / gt_mass;
}

double relative_surface_error(const ScalarField& z, const ScalarField& z_gt,
                              const CameraIntrinsics& k, const ScalarField& mask) {
  if (!mask.same_size(z)) throw InvalidArgument("surface error: mask dimension mismatch");
  ScalarField dist;
  double unused = 0.0;
  surface_distances(z, z_gt, k, dist, unused);
  double num = 0.0, den = 0.0;
  for (int b = 0; b < z.height(); ++b) {
    for (int a = 0; a < z.width(); ++a) {
      if (!(mask.at(a, b) > 0.0)) continue;
      const Vec2 x = pixel_to_image(a, b, k);
      num += dist.at(a, b);
      den += norm(surface_point(x, z_gt.at(a, b), k.focal));
    }
  }
  if (!(den > 0.0)) throw InvalidArgument("surface error: mask keeps no ground-truth mass");
  return num / den;
}

double relative_image_error(const ScalarField& img, const ScalarField& img_gt) {
  if (!img.same_size(img_gt)) throw InvalidArgument("relative_image_error: dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    num += std::abs(img.data()[i] - img_gt.data()[i]);
    den += std::abs(img_gt.data()[i]);
  }
  if (!(den > 0.0)) throw InvalidArgument("relative_image_error: zero ground-truth mass");
  return num / den;
}

double relative_image_error(const ScalarField& img, const ScalarField& img_gt,
                            const ScalarField& mask) {
  if (!img.same_size(img_gt)) throw InvalidArgument("relative_image_error: dimension mismatch");
  if (!mask.same_size(img)) throw InvalidArgument("relative_image_error: mask dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!(mask.data()[i] > 0.0)) continue;
    num += std::abs(img.data()[i] - img_gt.data()[i]);
    den += std::abs(img_gt.data()[i]);
  }
  if (!(den > 0.0)) throw InvalidArgument("relative_image_error: mask keeps no ground-truth mass");
  return num / den;
}

SurfaceErrorMap surface_error_map(const ScalarField& z, const ScalarField& z_gt,
                                  const CameraIntrinsics& k, double threshold) {
  ScalarField dist;
  double gt_mass = 0.0;
  surface_distances(z, z_gt, k, dist, gt_mass);
  const double mean_gt = gt_mass / static_cast<double>(dist.size());

  SurfaceErrorMap out;
  out.map = ScalarField(z.width(), z.height());
  out.mask = ScalarField(z.width(), z.height());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double rel = dist.data()[i] / mean_gt;
    out.map.data()[i] = rel;
    out.mask.data()[i] = rel > threshold ? 1.0 : 0.0;
  }
  return out;
}

ErrorReport evaluate_errors(const ScalarField& z, const ScalarField& z_gt,
                            const ScalarField& img, const ScalarField& img_gt,
                            const CameraIntrinsics& k) {
  ErrorReport report;
  double gt_mass = 0.0;
  surface_distances(z, z_gt, k, report.error_map, gt_mass);
  double num = 0.0;
  for (std::size_t i = 0; i < report.error_map.size(); ++i) num += report.error_map.data()[i];
  report.rse = num / gt_mass;
  report.rie = relative_image_error(img, img_gt);
  return report;
}

}  // namespace psfs
