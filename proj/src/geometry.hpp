#pragma once

#include "field.hpp"

namespace psfs {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Domain roles of Vec3 in the camera frame.
using SurfacePoint = Vec3;
using NormalVector = Vec3;

Vec3 cross(const Vec3& a, const Vec3& b);
double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);

// Ratio between Cartesian and radial depth, f / sqrt(|x|^2 + f^2); in (0, 1].
double conversion_factor(const Vec2& x, double focal);

// Cartesian depth from the radial depth multiple u (distance u*f along the ray).
double radial_to_cartesian(double u, const Vec2& x, double focal);
double cartesian_to_radial(double z, const Vec2& x, double focal);

// 3D surface point seen at image position x with Cartesian depth z:
// (z*x/f, z*y/f, -z).
Vec3 surface_point(const Vec2& x, double z, double focal);

// Unnormalised surface normal from the image-plane tangents:
// (zx*z/f, zy*z/f, z*((grad_z . x) + z)/f^2).
Vec3 surface_normal(const Vec2& x, double z, const Vec2& grad_z, double focal);

// Same direction derived from tangents in the world X/Y parametrisation;
// differs from surface_normal by the factor f^2/((z+zx*x)(z+zy*y)).
// Throws when one of those denominators vanishes.
Vec3 surface_normal_alt(const Vec2& x, double z, const Vec2& grad_z, double focal);

// The (-Z_X, -Z_Y, 1) construction that mixes orthographic and perspective
// reasoning. Kept for comparison tests only; off-axis it deviates from the
// correct normal direction.
Vec3 surface_normal_ortho_mixed(const Vec2& x, double z, const Vec2& grad_z, double focal);

// Unit direction towards the light source at the optical centre.
Vec3 light_direction(const Vec2& x, double focal);

}  // namespace psfs
