#include "zinpaint/gan_trainer.hpp"

#include <cmath>
#include <string>

namespace zinpaint {

namespace {

constexpr double kLogClamp = 1e-6;

double clamp_prob(double p) {
  if (p < kLogClamp) return kLogClamp;
  if (p > 1.0 - kLogClamp) return 1.0 - kLogClamp;
  return p;
}

bool was_clamped(double p) { return p < kLogClamp || p > 1.0 - kLogClamp; }

std::vector<double> flatten_params(const Mlp& net) {
  std::vector<double> out;
  out.reserve(net.parameter_count());
  for (const MlpLayer& l : net.layers()) {
    for (float w : l.weights) out.push_back(static_cast<double>(w));
    for (float b : l.bias) out.push_back(static_cast<double>(b));
  }
  return out;
}

void unflatten_params(Mlp& net, const std::vector<double>& flat) {
  std::size_t pos = 0;
  for (MlpLayer& l : net.layers()) {
    for (float& w : l.weights) w = static_cast<float>(flat[pos++]);
    for (float& b : l.bias) b = static_cast<float>(flat[pos++]);
  }
}

void accumulate_grads(const Mlp::Grads& grads, double scale,
                      std::vector<double>& flat) {
  std::size_t pos = 0;
  for (std::size_t li = 0; li < grads.weights.size(); ++li) {
    for (double g : grads.weights[li]) flat[pos++] += scale * g;
    for (double g : grads.bias[li]) flat[pos++] += scale * g;
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ValueError("batch size must be >= 1");
  if (steps < 0) throw ValueError("steps must be >= 0");
  if (!(lr_g >= 0.0) || !(lr_d >= 0.0)) {
    throw ValueError("learning rates must be >= 0");
  }
  if (latent_dim < 1) throw ValueError("latent dim must be >= 1");
  dataset.validate();
}

GanTrainer::GanTrainer(const TrainConfig& config)
    : config_((config.validate(), config)),
      dataset_(config.dataset),
      g_(make_random_mlp(config.latent_dim, config.g_hidden,
                         static_cast<int>(dataset_.output_shape().count()),
                         Activation::kTanh, Rng::derive(config.seed, 0xA11))),
      d_(make_random_mlp(static_cast<int>(dataset_.output_shape().count()),
                         config.d_hidden, 1, Activation::kSigmoid,
                         Rng::derive(config.seed, 0xB22))),
      g_opt_(g_.parameter_count(), config.lr_g, 0.9, 0.999, 1e-8),
      d_opt_(d_.parameter_count(), config.lr_d, 0.9, 0.999, 1e-8),
      rng_(Rng::derive(config.seed, 0xC33)) {}

std::vector<Image> GanTrainer::sample_real(int count) {
  std::vector<Image> batch;
  batch.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    batch.push_back(dataset_.forward(sample_latent(rng_, dataset_.latent_dim())));
  }
  return batch;
}

StepStats GanTrainer::step(const std::vector<Image>& real,
                           const std::vector<Latent>& latents) {
  if (real.empty() || latents.empty()) {
    throw ValueError("gan step: empty batch");
  }
  const Shape3 shape = dataset_.output_shape();
  for (const Image& x : real) {
    if (x.size() != shape.count()) {
      throw ShapeError("gan step: real image shape does not match dataset");
    }
  }
  for (const Latent& z : latents) {
    if (z.dim() != config_.latent_dim) {
      throw ShapeError("gan step: latent dim mismatch");
    }
  }

  const double inv_real = 1.0 / static_cast<double>(real.size());
  const double inv_fake = 1.0 / static_cast<double>(latents.size());

  std::vector<double> d_grad(d_.parameter_count(), 0.0);
  std::vector<double> g_grad(g_.parameter_count(), 0.0);
  double d_loss = 0.0;
  double g_loss = 0.0;

  // Discriminator view, real term: mean log D(x).
  for (const Image& x : real) {
    const double p_raw = d_.forward(x.values())[0];
    const double p = clamp_prob(p_raw);
    d_loss += std::log(p) * inv_real;
    if (!was_clamped(p_raw)) {
      // Ascent on d_loss = descent on -d_loss.
      accumulate_grads(d_.backward(x.values(), {1.0 / p}), -inv_real, d_grad);
    }
  }

  // Fake term: mean log(1 - D(G(z))). D ascends it, G descends it.
  for (const Latent& z : latents) {
    const std::vector<double> fake = g_.forward(z.values);
    const double p_raw = d_.forward(fake)[0];
    const double p = clamp_prob(p_raw);
    const double term = std::log(1.0 - p);
    d_loss += term * inv_fake;
    g_loss += term * inv_fake;
    if (!was_clamped(p_raw)) {
      const double dterm_dp = -1.0 / (1.0 - p);
      const Mlp::Grads d_back = d_.backward(fake, {dterm_dp});
      accumulate_grads(d_back, -inv_fake, d_grad);  // ascent for D
      accumulate_grads(g_.backward(z.values, d_back.input), inv_fake, g_grad);
    }
  }

  if (!std::isfinite(d_loss) || !std::isfinite(g_loss)) {
    throw NumericError("gan step produced a non-finite loss");
  }

  // Simultaneous update: both gradients were taken at the same parameters.
  std::vector<double> d_params = flatten_params(d_);
  std::vector<double> g_params = flatten_params(g_);
  d_opt_.step(d_params, d_grad);
  g_opt_.step(g_params, g_grad);
  unflatten_params(d_, d_params);
  unflatten_params(g_, g_params);

  return StepStats{d_loss, g_loss};
}

StepStats GanTrainer::run() {
  StepStats stats;
  for (int s = 0; s < config_.steps; ++s) {
    const std::vector<Image> real = sample_real(config_.batch_size);
    std::vector<Latent> latents;
    latents.reserve(static_cast<std::size_t>(config_.batch_size));
    for (int i = 0; i < config_.batch_size; ++i) {
      latents.push_back(sample_latent(rng_, config_.latent_dim));
    }
    stats = step(real, latents);
  }
  return stats;
}

MlpGenerator GanTrainer::generator() const {
  return MlpGenerator(g_, dataset_.output_shape());
}

MlpDiscriminator GanTrainer::discriminator() const {
  return MlpDiscriminator(d_, dataset_.output_shape());
}

void train_toy_gan(const TrainConfig& config, const std::string& generator_path,
                   const std::string& discriminator_path) {
  GanTrainer trainer(config);
  trainer.run();
  trainer.generator().save(generator_path);
  trainer.discriminator().save(discriminator_path);
}

}  // namespace zinpaint
