#pragma once

#include <cstdint>
#include <vector>

#include "zinpaint/rng.hpp"
#include "zinpaint/tensor.hpp"

namespace zinpaint {

// 10 * log10(peak^2 / MSE), returning `cap` once the MSE drops below
// peak^2 * 10^(-cap/10) (identical images included).
double psnr(const Image& a, const Image& b, double peak = 2.0,
            double cap = 100.0);

// Multi-scale structural similarity, clamped to [0, 1].
//
// Per scale: SSIM contrast-structure means over 11-tap Gaussian (sigma 1.5)
// windowed statistics, windows truncated and renormalized at borders; scales
// connected by 2x2 box downsampling (odd trailing row/column dropped); the
// luminance term enters at the coarsest scale. Scale weights follow the
// standard MS-SSIM exponents {0.0448, 0.2856, 0.3001, 0.2363, 0.1333},
// renormalized when fewer scales are used. The scale count is the largest
// m <= 5 with floor(min(H, W) / 2^(m-1)) >= 2, so min(H, W) >= 32 runs the
// full five scales; images smaller than 2 pixels per side are rejected.
// Channels are scored independently and averaged.
double ms_ssim(const Image& a, const Image& b);

// Mean pairwise PSNR over all unordered frame pairs (temporal consistency).
double temporal_consistency_eta(const std::vector<Image>& frames);

// Mean over consecutive pairs of the mean absolute frame difference.
double flicker(const std::vector<Image>& frames);

// Random rectangular zero-block covering roughly `coverage` of the pixels.
struct MaskBlockSpec {
  double coverage = 0.25;
  void validate() const;
};

Mask random_block_mask(int height, int width, const MaskBlockSpec& spec,
                       Rng& rng);

// One base image replicated under S distinct random block masks.
struct PseudoSequence {
  Image base;
  std::vector<Mask> masks;
};

PseudoSequence make_pseudo_sequence(const Image& base, int s,
                                    const MaskBlockSpec& spec,
                                    std::uint64_t seed);

}  // namespace zinpaint
