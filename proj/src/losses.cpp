#include "zinpaint/losses.hpp"

#include <cmath>
#include <string>

namespace zinpaint {

namespace {

double sign_or_zero(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

void check_generated_shape(const Image& image, const Generator& g,
                           const char* what) {
  const Shape3 s = g.output_shape();
  if (image.height() != s.height || image.width() != s.width ||
      image.channels() != s.channels) {
    throw ShapeError(std::string(what) +
                     ": image shape does not match generator output");
  }
}

// Fidelity value and the output-side cotangent, given a generated image.
double fidelity_parts(const Image& image, const Mask& mask,
                      const Image& generated, Image* cotangent) {
  double value = 0.0;
  const int ch = image.channels();
  const std::uint8_t* m = mask.values().data();
  const double* pi = image.data();
  const double* pg = generated.data();
  double* pc = cotangent ? cotangent->data() : nullptr;
  const std::size_t pixels =
      static_cast<std::size_t>(image.height()) * image.width();
  for (std::size_t p = 0; p < pixels; ++p) {
    if (!m[p]) continue;
    for (int k = 0; k < ch; ++k) {
      const double r = pi[p * ch + k] - pg[p * ch + k];
      value += std::abs(r);
      if (pc) pc[p * ch + k] = -sign_or_zero(r);
    }
  }
  return value;
}

struct PerceptualParts {
  double value = 0.0;
  double dvalue_dp = 0.0;  // zero when the probability was clamped
};

PerceptualParts perceptual_parts(double p_raw) {
  PerceptualParts out;
  if (p_raw < kProbClamp) {
    out.value = std::log(1.0 - kProbClamp);
    out.dvalue_dp = 0.0;
  } else if (p_raw > 1.0 - kProbClamp) {
    out.value = std::log(kProbClamp);
    out.dvalue_dp = 0.0;
  } else {
    out.value = std::log(1.0 - p_raw);
    out.dvalue_dp = -1.0 / (1.0 - p_raw);
  }
  return out;
}

}  // namespace

void LossWeights::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValueError("lambda must be finite and >= 0");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValueError("gamma must be finite and >= 0");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ValueError("mu must be finite and >= 0");
  }
}

LatentEval fidelity_loss(const Latent& z, const Image& image, const Mask& mask,
                         const Generator& g) {
  check_generated_shape(image, g, "fidelity_loss");
  check_mask_shape(image, mask, "fidelity_loss");
  const Image generated = g.forward(z);
  Image cotangent(image.height(), image.width(), image.channels());
  LatentEval out;
  out.value = fidelity_parts(image, mask, generated, &cotangent);
  out.grad = g.vjp(z, cotangent);
  return out;
}

LatentEval perceptual_loss(const Latent& z, const Generator& g,
                           const Discriminator& d) {
  if (!(g.output_shape() == d.input_shape())) {
    throw ShapeError(
        "perceptual_loss: discriminator input shape does not match generator");
  }
  const Image generated = g.forward(z);
  const PerceptualParts parts = perceptual_parts(d.forward(generated));
  LatentEval out;
  out.value = parts.value;
  if (parts.dvalue_dp == 0.0) {
    out.grad = Latent::zeros(g.latent_dim());
  } else {
    out.grad = g.vjp(z, d.vjp(generated, parts.dvalue_dp));
  }
  return out;
}

LatentEval total_objective(const Latent& z, const Image& image,
                           const Mask& mask, const Generator& g,
                           const Discriminator* d, const LossWeights& weights) {
  weights.validate();
  check_generated_shape(image, g, "total_objective");
  check_mask_shape(image, mask, "total_objective");
  const Image generated = g.forward(z);

  Image cotangent(image.height(), image.width(), image.channels());
  const double fidelity = fidelity_parts(image, mask, generated, &cotangent);

  LatentEval out;
  out.value = fidelity;
  if (weights.lambda > 0.0) {
    if (d == nullptr) {
      throw ValueError("total_objective: lambda > 0 requires a discriminator");
    }
    if (!(g.output_shape() == d->input_shape())) {
      throw ShapeError(
          "total_objective: discriminator input shape does not match generator");
    }
    const PerceptualParts parts = perceptual_parts(d->forward(generated));
    out.value += weights.lambda * parts.value;
    if (parts.dvalue_dp != 0.0) {
      const Image dimg = d->vjp(generated, parts.dvalue_dp);
      double* pc = cotangent.data();
      const double* pd = dimg.data();
      for (std::size_t i = 0; i < cotangent.size(); ++i) {
        pc[i] += weights.lambda * pd[i];
      }
    }
  }
  out.grad = g.vjp(z, cotangent);
  return out;
}

double data_loss(const Image& damaged, const Mask& mask,
                 const Image& candidate) {
  check_same_shape(damaged, candidate, "data_loss");
  check_mask_shape(damaged, mask, "data_loss");
  return l1_sum(damaged, mask_apply(candidate, mask));
}

double structure_loss(const Image& damaged, const Mask& mask,
                      const Image& candidate) {
  check_same_shape(damaged, candidate, "structure_loss");
  check_mask_shape(damaged, mask, "structure_loss");
  const Image masked = mask_apply(candidate, mask);
  return l1_sum(grad_x(damaged), grad_x(masked)) +
         l1_sum(grad_y(damaged), grad_y(masked));
}

double nn_matching_loss(const Image& damaged, const Mask& mask,
                        const Image& candidate, double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValueError("gamma must be finite and >= 0");
  }
  double loss = data_loss(damaged, mask, candidate);
  if (gamma > 0.0) {
    loss += gamma * structure_loss(damaged, mask, candidate);
  }
  return loss;
}

GroupEval group_consistency_loss(const std::vector<Latent>& zs) {
  if (zs.empty()) throw ValueError("group_consistency_loss: empty window");
  const int dim = zs.front().dim();
  for (const Latent& z : zs) {
    if (z.dim() != dim) {
      throw ShapeError("group_consistency_loss: latent dims differ");
    }
  }
  GroupEval out;
  out.grads.assign(zs.size(), Latent::zeros(dim));
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t k = i + 1; k < zs.size(); ++k) {
      for (int d = 0; d < dim; ++d) {
        const double diff = zs[i][d] - zs[k][d];
        out.value += std::abs(diff);
        const double s = sign_or_zero(diff);
        out.grads[i][d] += s;
        out.grads[k][d] -= s;
      }
    }
  }
  return out;
}

}  // namespace zinpaint
