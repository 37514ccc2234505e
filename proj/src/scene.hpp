#pragma once

#include <cstdint>

#include "field.hpp"

namespace psfs {

enum class SceneKind { sombrero, plane, hemisphere };

// Procedural ground-truth surfaces, sampled on the image plane.
struct SceneSpec {
  SceneKind kind = SceneKind::sombrero;
  double plane_depth = 2.0;   // plane: constant depth
  double centre_depth = 2.0;  // hemisphere: depth of the sphere centre
  double radius = 0.5;        // hemisphere: sphere radius

  static SceneSpec sombrero() { return {SceneKind::sombrero, 0, 0, 0}; }
  static SceneSpec plane(double z0) { return {SceneKind::plane, z0, 0, 0}; }
  static SceneSpec hemisphere(double centre_depth, double radius) {
    return {SceneKind::hemisphere, 0, centre_depth, radius};
  }
};

// Depth sampled at the image coordinates of every pixel.
ScalarField generate_scene(const SceneSpec& spec, const CameraIntrinsics& k, int width,
                           int height);

// Closed-form depth gradient of the scene, same sampling as generate_scene.
void scene_gradient(const SceneSpec& spec, const CameraIntrinsics& k, int width, int height,
                    ScalarField& grad_x, ScalarField& grad_y);

// Lambertian irradiance Q^3/(z*W) with W = sqrt(f^2|grad z|^2 + ((grad z . x) + z)^2).
// shade() differentiates the depth by central differences (one-sided at the
// borders); the _with_gradient variant takes the gradient fields directly.
ScalarField shade(const ScalarField& depth, const CameraIntrinsics& k);
ScalarField shade_with_gradient(const ScalarField& depth, const ScalarField& grad_x,
                                const ScalarField& grad_y, const CameraIntrinsics& k);

struct Quantised {
  ScalarField levels;  // integral grey levels in [0, 255]
  double scale;        // levels = round(irradiance * scale)
};

// 8-bit quantisation with scale = 255 / max(irradiance).
Quantised quantise_8bit(const ScalarField& irradiance);

// Quantisation against an externally fixed scale; levels clamp to [0, 255].
ScalarField quantise_with_scale(const ScalarField& irradiance, double scale);

// Back to irradiance; levels below floor_level are lifted to it first.
ScalarField dequantise(const ScalarField& levels, double scale, int floor_level = 0);

// Deterministic i.i.d. N(0, sigma^2) samples; value depends only on
// (seed, pixel index), so any parallel schedule reproduces the same field.
ScalarField gaussian_noise_field(int width, int height, double sigma, std::uint64_t seed);

// levels + noise, rounded back to integral grey values and clamped to [0, 255].
ScalarField add_gaussian_noise(const ScalarField& levels, double sigma, std::uint64_t seed);

}  // namespace psfs
