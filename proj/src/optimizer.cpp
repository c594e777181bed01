#include "zinpaint/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace zinpaint {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void clamp_box(std::vector<double>& v) {
  for (double& x : v) x = std::clamp(x, -1.0, 1.0);
}

}  // namespace

void OptimConfig::validate() const {
  if (max_iters < 1) throw ValueError("max_iters must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValueError("learning rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ValueError("adam betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ValueError("adam eps must be positive");
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2,
           double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ShapeError("adam step: size mismatch");
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

OptimResult optimize_single(const Latent& z0, const Objective& objective,
                            const OptimConfig& config) {
  config.validate();
  OptimResult result;
  result.z = z0;
  result.trajectory.objectives.reserve(static_cast<std::size_t>(config.max_iters));
  Adam adam(z0.values.size(), config.learning_rate, config.beta1, config.beta2,
            config.eps);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const LatentEval eval = objective(result.z);
    if (!std::isfinite(eval.value) || !all_finite(eval.grad.values)) {
      throw NumericError("non-finite objective at iteration " +
                         std::to_string(iter));
    }
    if (eval.grad.values.size() != result.z.values.size()) {
      throw ShapeError("objective gradient dim does not match latent");
    }
    result.trajectory.objectives.push_back(eval.value);
    adam.step(result.z.values, eval.grad.values);
    if (config.clamp_z) clamp_box(result.z.values);
  }
  return result;
}

WindowResult optimize_window(const std::vector<Latent>& inits,
                             const std::vector<Objective>& objectives,
                             double mu, const OptimConfig& config) {
  config.validate();
  if (inits.empty()) throw ValueError("optimize_window: empty window");
  if (inits.size() != objectives.size()) {
    throw ShapeError("optimize_window: one objective per latent required");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ValueError("mu must be finite and >= 0");
  }
  const int dim = inits.front().dim();
  for (const Latent& z : inits) {
    if (z.dim() != dim) throw ShapeError("optimize_window: latent dims differ");
  }

  const std::size_t n = inits.size();
  WindowResult result;
  result.zs = inits;
  result.trajectory.objectives.reserve(static_cast<std::size_t>(config.max_iters));

  // One Adam over the concatenation; its per-coordinate state is identical
  // to n independent instances.
  Adam adam(n * static_cast<std::size_t>(dim), config.learning_rate,
            config.beta1, config.beta2, config.eps);
  std::vector<double> flat_z(n * static_cast<std::size_t>(dim));
  std::vector<double> flat_grad(n * static_cast<std::size_t>(dim));

  for (int iter = 0; iter < config.max_iters; ++iter) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const LatentEval eval = objectives[i](result.zs[i]);
      if (!std::isfinite(eval.value) || !all_finite(eval.grad.values)) {
        throw NumericError("non-finite objective for frame " +
                           std::to_string(i) + " at iteration " +
                           std::to_string(iter));
      }
      if (eval.grad.dim() != dim) {
        throw ShapeError("objective gradient dim does not match latent");
      }
      total += eval.value;
      std::copy(eval.grad.values.begin(), eval.grad.values.end(),
                flat_grad.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    if (mu > 0.0) {
      const GroupEval group = group_consistency_loss(result.zs);
      total += mu * group.value;
      for (std::size_t i = 0; i < n; ++i) {
        for (int d = 0; d < dim; ++d) {
          flat_grad[i * dim + static_cast<std::size_t>(d)] +=
              mu * group.grads[i][d];
        }
      }
    }
    result.trajectory.objectives.push_back(total);

    for (std::size_t i = 0; i < n; ++i) {
      std::copy(result.zs[i].values.begin(), result.zs[i].values.end(),
                flat_z.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    adam.step(flat_z, flat_grad);
    if (config.clamp_z) clamp_box(flat_z);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(flat_z.begin() + static_cast<std::ptrdiff_t>(i * dim),
                flat_z.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim),
                result.zs[i].values.begin());
    }
  }
  return result;
}

int iterations_to_saturation(const Trajectory& trajectory, double fraction) {
  if (trajectory.objectives.empty()) {
    throw ValueError("iterations_to_saturation: empty trajectory");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValueError("fraction must lie in (0, 1]");
  }
  const double first = trajectory.objectives.front();
  const double saturation = trajectory.objectives.back();
  const double threshold = saturation + (1.0 - fraction) * (first - saturation);
  for (std::size_t t = 0; t < trajectory.objectives.size(); ++t) {
    if (trajectory.objectives[t] <= threshold) return static_cast<int>(t);
  }
  // Unreachable: the final value always satisfies the threshold.
  return static_cast<int>(trajectory.objectives.size()) - 1;
}

void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "iteration,objective\n";
  char buf[64];
  for (std::size_t t = 0; t < trajectory.objectives.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", t,
                  trajectory.objectives[t]);
    f << buf;
  }
  if (!f) throw IoError("failed writing " + path);
}

}  // namespace zinpaint
