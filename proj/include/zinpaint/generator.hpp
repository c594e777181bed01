#pragma once

#include <cstddef>
#include <cstdint>

#include "zinpaint/rng.hpp"
#include "zinpaint/tensor.hpp"

namespace zinpaint {

struct Shape3 {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(height) * width * channels;
  }
  bool operator==(const Shape3&) const = default;
};

// Differentiable map Latent -> Image with a vector-Jacobian product.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual int latent_dim() const = 0;
  virtual Shape3 output_shape() const = 0;
  // Output values strictly inside (-1, 1) (tanh range).
  virtual Image forward(const Latent& z) const = 0;
  // J^T * cotangent with J = d forward / d z.
  virtual Latent vjp(const Latent& z, const Image& cotangent) const = 0;
  // Stable hash identifying the model (weights + architecture).
  virtual std::uint64_t fingerprint() const = 0;
};

// Differentiable map Image -> (0, 1) with a vector-Jacobian product.
class Discriminator {
 public:
  virtual ~Discriminator() = default;

  virtual Shape3 input_shape() const = 0;
  virtual double forward(const Image& image) const = 0;
  virtual Image vjp(const Image& image, double cotangent) const = 0;
  virtual std::uint64_t fingerprint() const = 0;
};

// i.i.d. uniform draw from [-1, 1]^dim.
Latent sample_latent(Rng& rng, int dim);

// FNV-1a, the fingerprint hash.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace zinpaint
