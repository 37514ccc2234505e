#include "geometry.hpp"

#include <cmath>

#include "errors.hpp"

namespace psfs {

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

double conversion_factor(const Vec2& x, double focal) {
  if (!(focal > 0.0)) throw InvalidArgument("conversion_factor: focal length must be positive");
  return focal / std::sqrt(x.x * x.x + x.y * x.y + focal * focal);
}

double radial_to_cartesian(double u, const Vec2& x, double focal) {
  return conversion_factor(x, focal) * u * focal;
}

double cartesian_to_radial(double z, const Vec2& x, double focal) {
  return z / (conversion_factor(x, focal) * focal);
}

Vec3 surface_point(const Vec2& x, double z, double focal) {
  if (!(focal > 0.0)) throw InvalidArgument("surface_point: focal length must be positive");
  return {z * x.x / focal, z * x.y / focal, -z};
}

Vec3 surface_normal(const Vec2& x, double z, const Vec2& grad_z, double focal) {
  if (!(focal > 0.0)) throw InvalidArgument("surface_normal: focal length must be positive");
  const double v = grad_z.x * x.x + grad_z.y * x.y + z;
  return {grad_z.x * z / focal, grad_z.y * z / focal, z * v / (focal * focal)};
}

namespace {

// Tangents of the surface seen as a graph over the world X/Y coordinates.
void world_tangents(const Vec2& x, double z, const Vec2& grad_z, double focal, Vec3& tx,
                    Vec3& ty) {
  const double dx = z + grad_z.x * x.x;
  const double dy = z + grad_z.y * x.y;
  if (dx == 0.0 || dy == 0.0)
    throw InvalidArgument("surface normal: degenerate tangent denominator");
  tx = {1.0, grad_z.x * x.y / dx, -grad_z.x * focal / dx};
  ty = {grad_z.y * x.x / dy, 1.0, -grad_z.y * focal / dy};
}

}  // namespace

Vec3 surface_normal_alt(const Vec2& x, double z, const Vec2& grad_z, double focal) {
  Vec3 tx, ty;
  world_tangents(x, z, grad_z, focal, tx, ty);
  return cross(tx, ty);
}

Vec3 surface_normal_ortho_mixed(const Vec2& x, double z, const Vec2& grad_z, double focal) {
  Vec3 tx, ty;
  world_tangents(x, z, grad_z, focal, tx, ty);
  // (-Z_X, -Z_Y, 1) with the slopes read off the world tangents.
  return {-tx.z, -ty.z, 1.0};
}

Vec3 light_direction(const Vec2& x, double focal) {
  if (!(focal > 0.0)) throw InvalidArgument("light_direction: focal length must be positive");
  const double inv = 1.0 / std::sqrt(x.x * x.x + x.y * x.y + focal * focal);
  return {-x.x * inv, -x.y * inv, focal * inv};
}

}  // namespace psfs
