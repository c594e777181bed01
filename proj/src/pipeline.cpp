#include "zinpaint/pipeline.hpp"

#include <algorithm>
#include <string>

namespace zinpaint {

namespace {

Objective frame_objective(const Image& damaged, const Mask& mask,
                          const Generator& g, const Discriminator* d,
                          const LossWeights& weights) {
  return [&damaged, &mask, &g, d, weights](const Latent& z) {
    return total_objective(z, damaged, mask, g, d, weights);
  };
}

InpaintResult run_single(const Image& image, const Image& damaged,
                         const Mask& mask, const Generator& g,
                         const Discriminator* d, const InpaintConfig& config,
                         const OptimConfig& optim) {
  InpaintResult result;
  Latent z0;
  if (config.init == InitStrategy::kPool) {
    const NnInit init = nn_init(damaged, mask, *config.pool, config.weights.gamma);
    z0 = init.z;
    result.init = InitInfo{InitStrategy::kPool, init.index, init.loss};
  } else {
    Rng rng(optim.seed);
    z0 = sample_latent(rng, g.latent_dim());
    result.init = InitInfo{InitStrategy::kRandom, -1, 0.0};
  }
  OptimResult opt = optimize_single(
      z0, frame_objective(damaged, mask, g, d, config.weights), optim);
  result.z_hat = std::move(opt.z);
  result.trajectory = std::move(opt.trajectory);
  result.inpainted = blend(image, mask, g, result.z_hat);
  return result;
}

// Warm-started continuation: like run_single but from a given z0.
InpaintResult run_warm(const Image& image, const Image& damaged,
                       const Mask& mask, const Generator& g,
                       const Discriminator* d, const InpaintConfig& config,
                       const OptimConfig& optim, const Latent& z0,
                       const InitInfo& init) {
  InpaintResult result;
  result.init = init;
  OptimResult opt = optimize_single(
      z0, frame_objective(damaged, mask, g, d, config.weights), optim);
  result.z_hat = std::move(opt.z);
  result.trajectory = std::move(opt.trajectory);
  result.inpainted = blend(image, mask, g, result.z_hat);
  return result;
}

}  // namespace

const char* sequence_mode_name(SequenceMode mode) {
  switch (mode) {
    case SequenceMode::kIndependent:
      return "independent";
    case SequenceMode::kReuse:
      return "reuse";
    case SequenceMode::kReuseGroup:
      return "reuse+group";
  }
  throw ValueError("unknown sequence mode");
}

SequenceMode sequence_mode_from_name(const std::string& name) {
  if (name == "independent") return SequenceMode::kIndependent;
  if (name == "reuse") return SequenceMode::kReuse;
  if (name == "reuse+group") return SequenceMode::kReuseGroup;
  throw ValueError("unknown sequence mode '" + name +
                   "' (expected independent, reuse, or reuse+group)");
}

int InpaintConfig::resolved_non_pivot_iters() const {
  if (non_pivot_iters > 0) return non_pivot_iters;
  return std::max(1, optim.max_iters / 10);
}

int InpaintConfig::resolved_group_iters() const {
  if (group_iters > 0) return group_iters;
  return resolved_non_pivot_iters();
}

void InpaintConfig::validate() const {
  weights.validate();
  optim.validate();
  if (window < 1) throw ValueError("window must be >= 1");
  if (non_pivot_iters < 0 || group_iters < 0) {
    throw ValueError("iteration budgets must be >= 0");
  }
  if (init == InitStrategy::kPool && pool == nullptr) {
    throw ValueError("pool initialization requires a pool");
  }
}

Image blend(const Image& image, const Mask& mask, const Generator& g,
            const Latent& z_hat) {
  check_mask_shape(image, mask, "blend");
  const Image generated = g.forward(z_hat);
  check_same_shape(image, generated, "blend");
  Image out = generated;
  const int ch = image.channels();
  const std::uint8_t* m = mask.values().data();
  const double* src = image.data();
  double* dst = out.data();
  const std::size_t pixels =
      static_cast<std::size_t>(image.height()) * image.width();
  for (std::size_t p = 0; p < pixels; ++p) {
    if (m[p]) {
      for (int k = 0; k < ch; ++k) dst[p * ch + k] = src[p * ch + k];
    }
  }
  return out;
}

InpaintResult inpaint_image(const Image& image, const Mask& mask,
                            const Generator& g, const Discriminator* d,
                            const InpaintConfig& config) {
  config.validate();
  const Image damaged = mask_apply(image, mask);
  return run_single(image, damaged, mask, g, d, config, config.optim);
}

SequenceResult inpaint_sequence(
    const std::vector<std::pair<Image, Mask>>& frames, const Generator& g,
    const Discriminator* d, const InpaintConfig& config, SequenceMode mode) {
  config.validate();
  if (frames.empty()) throw ValueError("inpaint_sequence: no frames");
  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (!frames[t].first.same_shape(frames[0].first)) {
      throw ShapeError("inpaint_sequence: frame " + std::to_string(t) +
                       " shape differs from frame 0");
    }
  }

  const std::size_t n = frames.size();
  std::vector<Image> damaged;
  damaged.reserve(n);
  for (const auto& [image, mask] : frames) {
    damaged.push_back(mask_apply(image, mask));
  }

  SequenceResult result;
  result.frames.reserve(n);

  if (mode == SequenceMode::kIndependent) {
    for (std::size_t t = 0; t < n; ++t) {
      OptimConfig optim = config.optim;
      optim.seed = Rng::derive(config.optim.seed, t);
      InpaintResult r = run_single(frames[t].first, damaged[t],
                                   frames[t].second, g, d, config, optim);
      r.is_pivot = true;
      result.frames.push_back(std::move(r));
    }
    return result;
  }

  // reuse / reuse+group: pivot every `window` frames, chain the rest.
  const int window = config.window;
  for (std::size_t t = 0; t < n; ++t) {
    const bool pivot = (t % static_cast<std::size_t>(window)) == 0;
    InpaintResult r;
    if (pivot) {
      OptimConfig optim = config.optim;
      optim.seed = Rng::derive(config.optim.seed, t);
      if (t == 0 || config.pivot_reinit) {
        r = run_single(frames[t].first, damaged[t], frames[t].second, g, d,
                       config, optim);
      } else {
        const std::size_t prev_pivot = t - static_cast<std::size_t>(window);
        r = run_warm(frames[t].first, damaged[t], frames[t].second, g, d,
                     config, optim, result.frames[prev_pivot].z_hat,
                     result.frames[prev_pivot].init);
      }
    } else {
      OptimConfig optim = config.optim;
      optim.seed = Rng::derive(config.optim.seed, t);
      optim.max_iters = config.resolved_non_pivot_iters();
      r = run_warm(frames[t].first, damaged[t], frames[t].second, g, d, config,
                   optim, result.frames[t - 1].z_hat,
                   result.frames[t - 1].init);
    }
    r.is_pivot = pivot;
    result.frames.push_back(std::move(r));
  }

  // Joint group refinement per window. mu == 0 contributes no consistency
  // term, so the pass is skipped and the reuse results stand untouched.
  if (mode == SequenceMode::kReuseGroup && config.weights.mu > 0.0) {
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(window)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(window));
      std::vector<Latent> inits;
      std::vector<Objective> objectives;
      inits.reserve(stop - start);
      objectives.reserve(stop - start);
      for (std::size_t t = start; t < stop; ++t) {
        inits.push_back(result.frames[t].z_hat);
        objectives.push_back(frame_objective(damaged[t], frames[t].second, g,
                                             d, config.weights));
      }
      OptimConfig optim = config.optim;
      optim.seed = Rng::derive(config.optim.seed, 0x90000000ULL + start);
      optim.max_iters = config.resolved_group_iters();
      WindowResult joint =
          optimize_window(inits, objectives, config.weights.mu, optim);
      for (std::size_t t = start; t < stop; ++t) {
        result.frames[t].z_hat = std::move(joint.zs[t - start]);
        result.frames[t].inpainted = blend(frames[t].first, frames[t].second,
                                           g, result.frames[t].z_hat);
      }
      result.window_trajectories.push_back(std::move(joint.trajectory));
    }
  }
  return result;
}

}  // namespace zinpaint
