#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zinpaint/losses.hpp"
#include "zinpaint/tensor.hpp"

namespace zinpaint {

struct OptimConfig {
  int max_iters = 1000;
  double learning_rate = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool clamp_z = true;  // project iterates onto [-1, 1]^d after each step
  std::uint64_t seed = 0;
  void validate() const;
};

// Per-iteration objective values, recorded before each update.
struct Trajectory {
  std::vector<double> objectives;
  int iterations() const { return static_cast<int>(objectives.size()); }
};

using Objective = std::function<LatentEval(const Latent&)>;

struct OptimResult {
  Latent z;
  Trajectory trajectory;
};

// Adam descent from z0 for max_iters steps. Deterministic; throws
// NumericError (with the iteration index) on a non-finite value or gradient.
OptimResult optimize_single(const Latent& z0, const Objective& objective,
                            const OptimConfig& config);

struct WindowResult {
  std::vector<Latent> zs;
  Trajectory trajectory;  // joint objective sum_i J_i + mu * L_G
};

// Joint descent on sum_i objectives[i](z_i) + mu * L_G(z_1..z_n). With
// mu == 0 this runs the exact per-coordinate arithmetic of independent
// optimize_single calls, so the iterates match those bit for bit.
WindowResult optimize_window(const std::vector<Latent>& inits,
                             const std::vector<Objective>& objectives,
                             double mu, const OptimConfig& config);

// First iteration index whose objective is within (1 - fraction) of the
// run's total decrease above its final value:
//   threshold = final + (1 - fraction) * (first - final).
int iterations_to_saturation(const Trajectory& trajectory,
                             double fraction = 0.95);

// Two columns: iteration, objective.
void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& path);

// Coordinate-wise Adam, shared with the GAN trainer.
class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1, double beta2,
       double eps);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  long step_count_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace zinpaint
