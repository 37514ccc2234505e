#pragma once

#include "field.hpp"

namespace psfs {

// Sum of Euclidean distances between corresponding surface points, relative
// to the total ground-truth surface-point magnitude. The masked variants
// restrict both sums to pixels with positive confidence, for runs that used
// a confidence mask; totals over all pixels stay the primary measure.
double relative_surface_error(const ScalarField& z, const ScalarField& z_gt,
                              const CameraIntrinsics& k);
double relative_surface_error(const ScalarField& z, const ScalarField& z_gt,
                              const CameraIntrinsics& k, const ScalarField& mask);

// Sum of absolute brightness differences relative to the ground-truth mass.
double relative_image_error(const ScalarField& img, const ScalarField& img_gt);
double relative_image_error(const ScalarField& img, const ScalarField& img_gt,
                            const ScalarField& mask);

struct SurfaceErrorMap {
  ScalarField map;   // per-pixel |S - S_gt| normalised by the mean |S_gt|
  ScalarField mask;  // 1 where map exceeds the threshold
};

SurfaceErrorMap surface_error_map(const ScalarField& z, const ScalarField& z_gt,
                                  const CameraIntrinsics& k, double threshold = 0.01);

struct ErrorReport {
  double rse = 0.0;
  double rie = 0.0;
  ScalarField error_map;  // raw per-pixel Euclidean surface distances
};

ErrorReport evaluate_errors(const ScalarField& z, const ScalarField& z_gt,
                            const ScalarField& img, const ScalarField& img_gt,
                            const CameraIntrinsics& k);

}  // namespace psfs
