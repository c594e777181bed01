#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zinpaint/generator.hpp"

namespace zinpaint {

enum class Activation : std::uint32_t { kTanh = 0, kSigmoid = 1 };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct MlpLayer {
  int rows = 0;  // output dim
  int cols = 0;  // input dim
  Activation activation = Activation::kTanh;
  std::vector<float> weights;  // row-major, rows x cols
  std::vector<float> bias;     // rows
};

// Plain fully connected network. Parameters are stored as 32-bit floats so a
// save/load round trip reproduces forward outputs bit-exactly; arithmetic
// runs in double.
class Mlp {
 public:
  explicit Mlp(std::vector<MlpLayer> layers);  // checks the dimension chain

  int input_dim() const { return layers_.front().cols; }
  int output_dim() const { return layers_.back().rows; }
  const std::vector<MlpLayer>& layers() const { return layers_; }
  std::vector<MlpLayer>& layers() { return layers_; }

  std::vector<double> forward(const std::vector<double>& input) const;
  // d<cotangent, forward(input)> / d input.
  std::vector<double> vjp(const std::vector<double>& input,
                          const std::vector<double>& cotangent) const;

  struct Grads {
    std::vector<std::vector<double>> weights;  // per layer, row-major
    std::vector<std::vector<double>> bias;
    std::vector<double> input;
  };
  // Full reverse pass: parameter gradients plus the input cotangent.
  Grads backward(const std::vector<double>& input,
                 const std::vector<double>& cotangent) const;

  std::size_t parameter_count() const;

 private:
  std::vector<MlpLayer> layers_;
};

// Glorot-uniform initialized network with tanh hidden layers. The trainer
// starts from this; benches and tests use it as a fixed random model.
Mlp make_random_mlp(int input_dim, const std::vector<int>& hidden,
                    int output_dim, Activation final_activation,
                    std::uint64_t seed);

// .lgw byte layout, all little-endian:
//   magic "LGW1"
//   u32 layer_count
//   per layer: u32 rows, u32 cols, u32 activation (0 = tanh, 1 = sigmoid),
//              f32 weights (row-major, rows*cols), f32 bias (rows)
std::vector<std::uint8_t> serialize_lgw(const Mlp& net);
Mlp deserialize_lgw(const std::vector<std::uint8_t>& bytes);
std::uint64_t mlp_fingerprint(const Mlp& net);

// File I/O plus the JSON sidecar manifest at "<path>.json" describing kind,
// shapes, and activations. load_* cross-check the manifest against the
// binary and reject mismatches.
class MlpGenerator : public Generator {
 public:
  MlpGenerator(Mlp net, Shape3 output_shape);

  int latent_dim() const override { return net_.input_dim(); }
  Shape3 output_shape() const override { return shape_; }
  Image forward(const Latent& z) const override;
  Latent vjp(const Latent& z, const Image& cotangent) const override;
  std::uint64_t fingerprint() const override { return mlp_fingerprint(net_); }

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  void save(const std::string& lgw_path) const;
  static MlpGenerator load(const std::string& lgw_path);

 private:
  Mlp net_;
  Shape3 shape_;
};

class MlpDiscriminator : public Discriminator {
 public:
  MlpDiscriminator(Mlp net, Shape3 input_shape);

  Shape3 input_shape() const override { return shape_; }
  double forward(const Image& image) const override;
  Image vjp(const Image& image, double cotangent) const override;
  std::uint64_t fingerprint() const override { return mlp_fingerprint(net_); }

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  void save(const std::string& lgw_path) const;
  static MlpDiscriminator load(const std::string& lgw_path);

 private:
  Mlp net_;
  Shape3 shape_;
};

}  // namespace zinpaint
