#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zinpaint/generator.hpp"
#include "zinpaint/tensor.hpp"

namespace zinpaint {

struct PoolEntry {
  Latent z;
  Image image;  // G(z), stored eagerly
};

// N pre-generated (z, G(z)) pairs scanned to warm-start the latent search.
// The fingerprint ties a pool to the generator that produced it.
class Pool {
 public:
  Pool(std::vector<PoolEntry> entries, std::uint64_t generator_fingerprint);

  int size() const { return static_cast<int>(entries_.size()); }
  const PoolEntry& entry(int i) const {
    return entries_[static_cast<std::size_t>(i)];
  }
  const std::vector<PoolEntry>& entries() const { return entries_; }
  std::uint64_t generator_fingerprint() const { return fingerprint_; }

 private:
  std::vector<PoolEntry> entries_;
  std::uint64_t fingerprint_ = 0;
};

// Draws n latents with sample_latent and renders them. Deterministic per seed.
Pool build_pool(const Generator& g, int n, std::uint64_t seed);

struct NnInit {
  Latent z;
  int index = -1;
  double loss = 0.0;
};

// Exhaustive argmin of nn_matching_loss(damaged, mask, p_i, gamma) over the
// pool; ties break to the lowest index. Masked pixels of `damaged` are never
// read (compare against mask_apply(damaged, mask) upstream or pass the
// already-masked image).
NnInit nn_init(const Image& damaged, const Mask& mask, const Pool& pool,
               double gamma);

// .lpool byte layout, all little-endian:
//   magic "LPOOL1"
//   u32 N, u32 d, u32 H, u32 W, u32 C, u64 generator fingerprint
//   f32 latents (N * d), then f32 images (N * H * W * C, row-major,
//   channel-interleaved)
void save_pool(const Pool& pool, const std::string& path);

// Rejects a fingerprint mismatch against `g` and spot-checks stored images
// against freshly generated ones.
Pool load_pool(const std::string& path, const Generator& g);

struct PoolQualityPoint {
  int n = 0;
  double ms_ssim = 0.0;       // masked best match vs damaged image
  double matching_loss = 0.0; // best L_nn within the prefix
  int index = -1;
};

// Best-match quality over nested pool prefixes of the given sizes
// (ascending). The matching loss is non-increasing in n by construction.
std::vector<PoolQualityPoint> pool_quality_curve(const Generator& g,
                                                 const Image& damaged,
                                                 const Mask& mask,
                                                 const std::vector<int>& ns,
                                                 std::uint64_t seed,
                                                 double gamma = 0.01);

}  // namespace zinpaint
