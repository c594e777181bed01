#pragma once

#include "zinpaint/generator.hpp"

namespace zinpaint {

// Analytic Gaussian-blob renderer: a trained-weight-free generator small
// enough to invert in microseconds, used as the default synthetic model.
//
// The latent packs, per blob k, the block [cx, cy, sigma, a_0 .. a_{C-1}]
// at offset k * (3 + C). Components are decoded affinely from [-1, 1]:
//   cx    -> [0, W-1],  cy -> [0, H-1]
//   sigma -> [sigma_min, sigma_max]
//   a_c   -> identity
// The decode is total: any finite latent yields a finite image.
struct BlobSpec {
  int blobs = 2;
  int height = 16;
  int width = 16;
  int channels = 1;
  double sigma_min = 1.5;
  double sigma_max = 5.0;

  int latent_dim() const { return blobs * (3 + channels); }
  void validate() const;
};

class BlobGenerator : public Generator {
 public:
  explicit BlobGenerator(const BlobSpec& spec);

  int latent_dim() const override { return spec_.latent_dim(); }
  Shape3 output_shape() const override {
    return {spec_.height, spec_.width, spec_.channels};
  }
  // pixel(y,x,c) = tanh( sum_k a_{k,c} * exp(-((x-cx_k)^2 + (y-cy_k)^2)
  //                                          / (2 sigma_k^2)) )
  Image forward(const Latent& z) const override;
  Latent vjp(const Latent& z, const Image& cotangent) const override;
  std::uint64_t fingerprint() const override;

  const BlobSpec& spec() const { return spec_; }

 private:
  BlobSpec spec_;
};

}  // namespace zinpaint
