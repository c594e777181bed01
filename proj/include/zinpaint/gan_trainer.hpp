#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zinpaint/blob.hpp"
#include "zinpaint/mlp.hpp"
#include "zinpaint/optimizer.hpp"

namespace zinpaint {

// Minimal adversarial trainer on a synthetic blob dataset, producing a toy
// generator/discriminator pair so the pipeline can run without external
// checkpoints. Training quality is a smoke target only.
struct TrainConfig {
  int batch_size = 32;
  int steps = 2000;
  double lr_g = 1e-3;
  double lr_d = 1e-3;
  int latent_dim = 8;
  std::uint64_t seed = 0;
  BlobSpec dataset;                 // synthetic real-image source
  std::vector<int> g_hidden = {48};
  std::vector<int> d_hidden = {48};

  void validate() const;
};

struct StepStats {
  double d_loss = 0.0;  // E[log D(x)] + E[log(1 - D(G(z)))], ascended by D
  double g_loss = 0.0;  // E[log(1 - D(G(z)))], descended by G
};

class GanTrainer {
 public:
  explicit GanTrainer(const TrainConfig& config);

  // One simultaneous update of both players on the given batch. Log
  // arguments are clamped to [1e-6, 1 - 1e-6]; a non-finite loss aborts.
  StepStats step(const std::vector<Image>& real,
                 const std::vector<Latent>& latents);

  // Runs config.steps seeded batches. Returns stats of the final step.
  StepStats run();

  const Mlp& generator_net() const { return g_; }
  const Mlp& discriminator_net() const { return d_; }
  MlpGenerator generator() const;
  MlpDiscriminator discriminator() const;
  const TrainConfig& config() const { return config_; }

  // Draws a batch of synthetic real images from the dataset spec.
  std::vector<Image> sample_real(int count);

 private:
  TrainConfig config_;
  BlobGenerator dataset_;
  Mlp g_;
  Mlp d_;
  Adam g_opt_;
  Adam d_opt_;
  Rng rng_;
};

// Full training run; writes <prefix>_generator.lgw(.json) and
// <prefix>_discriminator.lgw(.json). Deterministic per seed.
void train_toy_gan(const TrainConfig& config, const std::string& generator_path,
                   const std::string& discriminator_path);

}  // namespace zinpaint
