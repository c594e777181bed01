#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "zinpaint/error.hpp"

namespace zinpaint {

// Dense H x W x C raster, row-major and channel-interleaved:
//   index(y, x, c) = (y * width + x) * channels + c.
// Generator outputs and dataset images live in [-1, 1]; intermediate
// arithmetic (residuals, gradients) may leave that range but stays finite.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels);  // zero-filled

  // Validates the shape and that every value is finite.
  static Image from_data(int height, int width, int channels,
                         std::vector<double> data);
  // from_data plus rejection of values outside [-1, 1]. Used for generator
  // outputs and loaded dataset images.
  static Image bounded(int height, int width, int channels,
                       std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }

  double& at(int y, int x, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }
  std::vector<double>& values() { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// H x W binary raster, 0 on damaged pixels and 1 elsewhere, broadcast across
// channels. An all-zero mask is rejected: it would make the fidelity loss
// vacuous.
class Mask {
 public:
  Mask() = default;
  Mask(int height, int width, std::vector<std::uint8_t> data);

  int height() const { return height_; }
  int width() const { return width_; }

  std::uint8_t at(int y, int x) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  const std::vector<std::uint8_t>& values() const { return data_; }
  std::size_t ones() const { return ones_; }

  static Mask all_ones(int height, int width);

 private:
  int height_ = 0;
  int width_ = 0;
  std::size_t ones_ = 0;
  std::vector<std::uint8_t> data_;
};

// d-dimensional latent vector, nominally in [-1,1]^d when produced by
// samplers or box projection.
struct Latent {
  std::vector<double> values;

  Latent() = default;
  explicit Latent(std::vector<double> v) : values(std::move(v)) {}

  int dim() const { return static_cast<int>(values.size()); }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

  static Latent zeros(int dim);
  // Validates finiteness.
  static Latent from(std::vector<double> v);
};

// out[p,c] = image[p,c] where mask[p] == 1, exactly 0.0 elsewhere.
Image mask_apply(const Image& image, const Mask& mask);

// Forward differences with a zero at the trailing boundary:
//   grad_x[y,x] = image[y,x+1] - image[y,x] for x < W-1, 0 at x = W-1.
// Requires at least 2 pixels along the differenced axis.
Image grad_x(const Image& image);
Image grad_y(const Image& image);

// Sum of |a - b| over all elements; the weighted overload counts only
// elements whose mask value is 1.
double l1_sum(const Image& a, const Image& b);
double l1_sum(const Image& a, const Image& b, const Mask& weight);

void check_same_shape(const Image& a, const Image& b, const char* what);
void check_mask_shape(const Image& image, const Mask& mask, const char* what);

}  // namespace zinpaint
