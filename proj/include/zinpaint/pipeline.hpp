#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zinpaint/generator.hpp"
#include "zinpaint/optimizer.hpp"
#include "zinpaint/pool.hpp"

namespace zinpaint {

enum class InitStrategy { kRandom, kPool };
enum class SequenceMode { kIndependent, kReuse, kReuseGroup };

const char* sequence_mode_name(SequenceMode mode);
SequenceMode sequence_mode_from_name(const std::string& name);

struct InpaintConfig {
  LossWeights weights;
  OptimConfig optim;
  InitStrategy init = InitStrategy::kRandom;
  const Pool* pool = nullptr;  // required for InitStrategy::kPool
  int window = 5;              // group-consistency window W

  // Iteration budget for warm-started non-pivot frames; 0 means
  // optim.max_iters / 10 (minimum 1).
  int non_pivot_iters = 0;
  // Budget of the joint group-refinement pass; 0 means the non-pivot budget.
  int group_iters = 0;
  // When true every pivot frame is re-initialized with `init`; when false
  // (default) pivots after the first warm-start from the previous pivot.
  bool pivot_reinit = false;

  int resolved_non_pivot_iters() const;
  int resolved_group_iters() const;
  void validate() const;
};

struct InitInfo {
  InitStrategy strategy = InitStrategy::kRandom;
  int pool_index = -1;        // -1 unless pool-initialized
  double matching_loss = 0.0; // L_nn of the chosen entry, 0 for random init
};

struct InpaintResult {
  Image inpainted;
  Latent z_hat;
  Trajectory trajectory;
  InitInfo init;
  bool is_pivot = true;
};

// M .* I + (1 - M) .* G(z_hat), computed by pixel selection so unmasked
// pixels of the input survive bit-exactly.
Image blend(const Image& image, const Mask& mask, const Generator& g,
            const Latent& z_hat);

// Single-image inpainting: initialize (random draw or pool nearest
// neighbor), descend the combined objective, blend.
InpaintResult inpaint_image(const Image& image, const Mask& mask,
                            const Generator& g, const Discriminator* d,
                            const InpaintConfig& config);

struct SequenceResult {
  std::vector<InpaintResult> frames;
  // Joint objective paths of the group-refinement passes, one per window
  // (reuse+group mode with mu > 0 only).
  std::vector<Trajectory> window_trajectories;
};

// Frame scheduler. Frames are partitioned into consecutive windows of W;
// the first frame of each window is its pivot.
//   independent  - every frame through inpaint_image with a fresh init
//                  (per-frame derived seed).
//   reuse        - pivots get the full single-image treatment (warm-started
//                  from the previous pivot unless pivot_reinit); every other
//                  frame starts at the previous frame's solution with the
//                  reduced budget.
//   reuse+group  - reuse, then each window is jointly refined under the
//                  group-consistency weight mu. A zero mu has no term to
//                  apply, so the pass is skipped and results match reuse
//                  bit for bit.
SequenceResult inpaint_sequence(
    const std::vector<std::pair<Image, Mask>>& frames, const Generator& g,
    const Discriminator* d, const InpaintConfig& config, SequenceMode mode);

}  // namespace zinpaint
