#pragma once

#include <cstddef>
#include <vector>

namespace psfs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Rectangular grid of doubles, row-major. Pixel (a, b) = (column, row),
// row 0 is the top image row.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int col, int row) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
  double at(int col, int row) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_size(const ScalarField& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
bool all_finite(const ScalarField& f);
bool all_positive(const ScalarField& f);

// Pinhole calibration: focal length, grid spacing of the image plane per
// pixel step, and the principal point in pixel coordinates.
struct CameraIntrinsics {
  CameraIntrinsics(double focal, double hx, double hy, double cx, double cy);

  double focal;
  double hx;
  double hy;
  double cx;
  double cy;
};

// Pixel (a, b) to image-plane coordinates: x = hx*(a - cx), y = hy*(b - cy).
Vec2 pixel_to_image(double a, double b, const CameraIntrinsics& k);
Vec2 image_to_pixel(double x, double y, const CameraIntrinsics& k);

// Calibration for pyramid level `level` given downsampling factor eta:
// spacing grows by eta^-level, the principal point shrinks by eta^level.
CameraIntrinsics scale_intrinsics(const CameraIntrinsics& k, int level, double eta);

// Area-weighted downsampling to (round(w*eta), round(h*eta)).
ScalarField downsample(const ScalarField& f, double eta);

// Bilinear upsampling with clamped borders; shrinking is rejected.
ScalarField upsample(const ScalarField& f, int new_width, int new_height);

}  // namespace psfs
