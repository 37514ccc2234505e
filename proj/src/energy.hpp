#pragma once

#include <vector>

#include "field.hpp"

namespace psfs {

enum class PenaliserKind { quadratic, charbonnier };

struct Penaliser {
  PenaliserKind kind = PenaliserKind::charbonnier;
  double lambda = 1e-3;  // contrast parameter, charbonnier only

  static Penaliser quadratic() { return {PenaliserKind::quadratic, 0.0}; }
  static Penaliser charbonnier(double lambda) { return {PenaliserKind::charbonnier, lambda}; }
};

struct PenaltyEval {
  double value;
  double derivative;  // d/d(s^2)
};

// Quadratic: s^2 with derivative 1. Charbonnier: 2 lambda^2 sqrt(1 + s^2/lambda^2)
// with derivative 1/sqrt(1 + s^2/lambda^2).
PenaltyEval penalise(double s_sq, const Penaliser& p);

// Squared reprojection residual (I - Q^3/(z W))^2 at one sample.
double data_residual(const Vec2& x, double z, const Vec2& grad_z, double i_val, double focal);

// Penalised squared Frobenius norm of the depth Hessian.
double smoothness_density(double z_xx, double z_xy, double z_yy, const Penaliser& p);

// Per-axis one-sided difference choice of the upwind scheme. The causally
// correct side is picked by max(D-z, -D+z, 0); the sign of the selected
// difference is kept. Choices are derived from an iterate and then frozen
// while the energy (or its gradient) is evaluated.
enum class UpwindDir : unsigned char { none = 0, backward = 1, forward = 2 };

struct UpwindPlan {
  int width = 0;
  int height = 0;
  std::vector<UpwindDir> dx;
  std::vector<UpwindDir> dy;
};

void plan_upwind(const ScalarField& z, UpwindPlan& plan);
UpwindPlan plan_upwind(const ScalarField& z);

// Signed upwind depth gradient at a pixel (one-sided at the borders).
Vec2 upwind_gradient(const ScalarField& z, int col, int row, double hx, double hy);

// Per-pixel image coordinates and Q^3, reusable across solver iterations.
struct PixelGeometry {
  int width = 0;
  int height = 0;
  std::vector<double> x;   // per column
  std::vector<double> y;   // per row
  std::vector<double> q3;  // per pixel
};

PixelGeometry make_pixel_geometry(int width, int height, const CameraIntrinsics& k);

struct EnergySettings {
  double alpha = 0.0;
  Penaliser penaliser;
  ScalarField confidence;  // in [0,1], image-sized
  CameraIntrinsics intrinsics;

  EnergySettings(double alpha, Penaliser penaliser, ScalarField confidence,
                 const CameraIntrinsics& intrinsics)
      : alpha(alpha),
        penaliser(penaliser),
        confidence(std::move(confidence)),
        intrinsics(intrinsics) {}
};

// Discrete energy: sum over pixels of c*D + alpha*S, times the cell area
// hx*hy. D uses the upwind depth gradient of `plan` (derived from z itself
// in the two-argument form), S uses central second differences with
// reflected boundary values.
double total_energy(const ScalarField& z, const ScalarField& img, const EnergySettings& s);
double total_energy(const ScalarField& z, const ScalarField& img, const EnergySettings& s,
                    const UpwindPlan& plan, const PixelGeometry* geom = nullptr);

}  // namespace psfs
