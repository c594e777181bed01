#include "zinpaint/generator.hpp"

namespace zinpaint {

Latent sample_latent(Rng& rng, int dim) {
  Latent z = Latent::zeros(dim);
  for (double& v : z.values) {
    v = rng.uniform(-1.0, 1.0);
  }
  return z;
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace zinpaint
