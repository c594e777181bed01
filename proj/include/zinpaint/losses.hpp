#pragma once

#include <vector>

#include "zinpaint/generator.hpp"
#include "zinpaint/tensor.hpp"

namespace zinpaint {

struct LossWeights {
  double lambda = 0.01;  // perceptual weight
  double gamma = 0.01;   // structure weight
  double mu = 0.1;       // group-consistency weight
  void validate() const;
};

struct LatentEval {
  double value = 0.0;
  Latent grad;
};

// Discriminator outputs are clamped into [kProbClamp, 1 - kProbClamp] before
// any log; the gradient is zero on the clamped branch.
inline constexpr double kProbClamp = 1e-6;

// L_f = sum over unmasked elements of |image - G(z)|. Only unmasked pixels of
// `image` are read, so passing the original or the pre-masked image is
// equivalent. Gradient is the exact subgradient with sign(0) = 0.
LatentEval fidelity_loss(const Latent& z, const Image& image, const Mask& mask,
                         const Generator& g);

// L_p = log(1 - D(G(z))), always <= 0 after clamping.
LatentEval perceptual_loss(const Latent& z, const Generator& g,
                           const Discriminator& d);

// J = L_f + lambda * L_p, sharing one generator forward pass. `d` may be
// null only when lambda is 0 (the perceptual term is skipped entirely).
LatentEval total_objective(const Latent& z, const Image& image,
                           const Mask& mask, const Generator& g,
                           const Discriminator* d, const LossWeights& weights);

// L_D = sum |damaged - mask_apply(candidate)|.
double data_loss(const Image& damaged, const Mask& mask,
                 const Image& candidate);

// L_S = |grad_x damaged - grad_x masked candidate|_1
//     + |grad_y damaged - grad_y masked candidate|_1.
double structure_loss(const Image& damaged, const Mask& mask,
                      const Image& candidate);

// L_nn = L_D + gamma * L_S.
double nn_matching_loss(const Image& damaged, const Mask& mask,
                        const Image& candidate, double gamma);

struct GroupEval {
  double value = 0.0;
  std::vector<Latent> grads;
};

// L_G = sum over unordered pairs i < k of sum_d |z_i[d] - z_k[d]|, with exact
// subgradients (sign(0) = 0).
GroupEval group_consistency_loss(const std::vector<Latent>& zs);

}  // namespace zinpaint
