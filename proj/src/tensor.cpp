#include "zinpaint/tensor.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace zinpaint {

namespace {

void check_dims(int height, int width, int channels) {
  if (height < 1 || width < 1) {
    throw ShapeError("image dimensions must be positive, got " +
                     std::to_string(height) + "x" + std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw ShapeError("channel count must be 1 or 3, got " +
                     std::to_string(channels));
  }
}

}  // namespace

Image::Image(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
}

Image Image::from_data(int height, int width, int channels,
                       std::vector<double> data) {
  check_dims(height, width, channels);
  const std::size_t expected =
      static_cast<std::size_t>(height) * width * channels;
  if (data.size() != expected) {
    throw ShapeError("image data length " + std::to_string(data.size()) +
                     " does not match " + std::to_string(height) + "x" +
                     std::to_string(width) + "x" + std::to_string(channels));
  }
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw ValueError("image contains a non-finite value");
    }
  }
  Image out;
  out.height_ = height;
  out.width_ = width;
  out.channels_ = channels;
  out.data_ = std::move(data);
  return out;
}

Image Image::bounded(int height, int width, int channels,
                     std::vector<double> data) {
  for (double v : data) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw ValueError("image value " + std::to_string(v) +
                       " outside [-1, 1]");
    }
  }
  return from_data(height, width, channels, std::move(data));
}

Mask::Mask(int height, int width, std::vector<std::uint8_t> data)
    : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw ShapeError("mask dimensions must be positive");
  }
  const std::size_t expected = static_cast<std::size_t>(height) * width;
  if (data.size() != expected) {
    throw ShapeError("mask data length " + std::to_string(data.size()) +
                     " does not match " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
  ones_ = 0;
  for (std::uint8_t v : data) {
    if (v != 0 && v != 1) {
      throw ValueError("mask values must be 0 or 1");
    }
    ones_ += v;
  }
  if (ones_ == 0) {
    throw ValueError("mask with no unmasked pixel is rejected");
  }
  data_ = std::move(data);
}

Mask Mask::all_ones(int height, int width) {
  return Mask(height, width,
              std::vector<std::uint8_t>(
                  static_cast<std::size_t>(height) * width, 1));
}

Latent Latent::zeros(int dim) {
  if (dim < 1) {
    throw ShapeError("latent dim must be >= 1");
  }
  Latent z;
  z.values.assign(static_cast<std::size_t>(dim), 0.0);
  return z;
}

Latent Latent::from(std::vector<double> v) {
  if (v.empty()) {
    throw ShapeError("latent dim must be >= 1");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ValueError("latent contains a non-finite value");
    }
  }
  return Latent(std::move(v));
}

void check_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": image shapes differ (" +
                     std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + "x" +
                     std::to_string(a.channels()) + " vs " +
                     std::to_string(b.height()) + "x" +
                     std::to_string(b.width()) + "x" +
                     std::to_string(b.channels()) + ")");
  }
}

void check_mask_shape(const Image& image, const Mask& mask, const char* what) {
  if (image.height() != mask.height() || image.width() != mask.width()) {
    throw ShapeError(std::string(what) + ": mask " +
                     std::to_string(mask.height()) + "x" +
                     std::to_string(mask.width()) + " does not match image " +
                     std::to_string(image.height()) + "x" +
                     std::to_string(image.width()));
  }
}

Image mask_apply(const Image& image, const Mask& mask) {
  check_mask_shape(image, mask, "mask_apply");
  Image out(image.height(), image.width(), image.channels());
  const int c = image.channels();
  const double* src = image.data();
  double* dst = out.data();
  const std::uint8_t* m = mask.values().data();
  const std::size_t pixels =
      static_cast<std::size_t>(image.height()) * image.width();
  // Select instead of multiply: masked pixels become exactly +0.0, so their
  // input values can never influence downstream bits.
  for (std::size_t p = 0; p < pixels; ++p) {
    if (m[p]) {
      for (int k = 0; k < c; ++k) dst[p * c + k] = src[p * c + k];
    }
  }
  return out;
}

Image grad_x(const Image& image) {
  if (image.width() < 2) {
    throw ShapeError("grad_x requires width >= 2");
  }
  Image out(image.height(), image.width(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x + 1 < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        out.at(y, x, c) = image.at(y, x + 1, c) - image.at(y, x, c);
      }
    }
  }
  return out;
}

Image grad_y(const Image& image) {
  if (image.height() < 2) {
    throw ShapeError("grad_y requires height >= 2");
  }
  Image out(image.height(), image.width(), image.channels());
  for (int y = 0; y + 1 < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        out.at(y, x, c) = image.at(y + 1, x, c) - image.at(y, x, c);
      }
    }
  }
  return out;
}

double l1_sum(const Image& a, const Image& b) {
  check_same_shape(a, b, "l1_sum");
  double total = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += std::abs(pa[i] - pb[i]);
  }
  return total;
}

double l1_sum(const Image& a, const Image& b, const Mask& weight) {
  check_same_shape(a, b, "l1_sum");
  check_mask_shape(a, weight, "l1_sum");
  double total = 0.0;
  const int c = a.channels();
  const double* pa = a.data();
  const double* pb = b.data();
  const std::uint8_t* m = weight.values().data();
  const std::size_t pixels = static_cast<std::size_t>(a.height()) * a.width();
  for (std::size_t p = 0; p < pixels; ++p) {
    if (!m[p]) continue;
    for (int k = 0; k < c; ++k) {
      total += std::abs(pa[p * c + k] - pb[p * c + k]);
    }
  }
  return total;
}

}  // namespace zinpaint
